//! Radial hole probabilities of the infinite Ginibre ensemble.
//!
//! The moduli of the points are independent with `R_k² ~ Gamma(k, 1)`, so for
//! a rotation-invariant hole the probability factors over `k`.

use serde::Serialize;

use crate::closed_forms::kostlan_slope_closed;
use crate::error::{Error, Result};
use crate::extrapolate::{fit, Term};
use crate::scalar::{from_usize, lit, log_add_exp, Real};
use crate::special::{gamma_interval_mass, ln_reg_gamma, reg_gamma_real};

/// Default absolute tolerance on the truncated tail of `log P`.
pub const DEFAULT_TRUNCATION: f64 = 1e-14;

/// Regularized incomplete gamma pair `(P(k, x), Q(k, x))` for integer shape.
pub fn reg_gamma<T: Real>(k: usize, x: T) -> Result<(T, T)> {
    if k == 0 {
        return Err(Error::InvalidArgument("shape must be at least 1".into()));
    }
    if !(x >= T::zero()) {
        return Err(Error::Domain(format!("argument must be non-negative, got {x}")));
    }
    Ok(reg_gamma_real(from_usize(k), x))
}

/// Hole made of annular bands `{r·inner < |z| < r·outer}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialHoleSpec<T> {
    /// Disjoint bands as fractions of `r`, sorted, within `[0, 1]`.
    pub bands: Vec<(T, T)>,
    pub r: T,
    /// Absolute bound on the neglected tail of `log P`.
    pub truncation: T,
}

impl<T: Real> RadialHoleSpec<T> {
    pub fn new(bands: Vec<(T, T)>, r: T) -> Result<Self> {
        let s = Self { bands, r, truncation: lit(DEFAULT_TRUNCATION) };
        s.validate()?;
        Ok(s)
    }

    /// `{c r < |z| < r}`; `c = 0` is the disk.
    pub fn annulus(c: T, r: T) -> Result<Self> {
        Self::new(vec![(c, T::one())], r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= T::zero()) || !self.r.is_finite() {
            return Err(Error::InvalidArgument(format!("scale must be finite and non-negative, got {}", self.r)));
        }
        if !(self.truncation > T::zero()) {
            return Err(Error::InvalidArgument("truncation tolerance must be positive".into()));
        }
        let mut prev = T::zero();
        for (i, &(a, b)) in self.bands.iter().enumerate() {
            if b > T::one() {
                return Err(Error::Domain(format!("band {i} has outer fraction {b} > 1")));
            }
            if !(a >= prev && a < b) || (i > 0 && a <= prev) {
                return Err(Error::InvalidArgument(format!("band {i} ({a}, {b}) is empty, unsorted or overlapping")));
            }
            prev = b;
        }
        Ok(())
    }
}

/// `log P` with the truncation bookkeeping.
#[derive(Clone, Debug, Serialize)]
pub struct RadialHoleResult<T> {
    pub log_probability: T,
    /// Number of factors multiplied.
    pub terms: usize,
    /// Upper bound on `|log P − partial sum|`.
    pub truncation_bound: T,
}

/// `(bound on P(R_k² < c²r²), bound on P(R_k² > r²))` valid for
/// `k ≥ c²r²` and `k ≤ r²` respectively (both equal 1 on the boundary).
pub fn chernoff_bounds<T: Real>(k: usize, r: T, c: T) -> (Result<T>, Result<T>) {
    let kk: T = from_usize(k);
    let x = c * c * r * r;
    let y = r * r;
    let lower = if !(kk >= x) {
        Err(Error::Domain(format!("lower-tail bound needs k ≥ c²r² = {x}")))
    } else if x == T::zero() {
        Ok(T::zero())
    } else {
        Ok((-kk * (kk / x).ln() + kk - x).exp())
    };
    let upper = if !(kk <= y) {
        Err(Error::Domain(format!("upper-tail bound needs k ≤ r² = {y}")))
    } else {
        Ok((-y + kk - kk * (kk / y).ln()).exp())
    };
    (lower, upper)
}

/// Chernoff bound `e^{−k log(k/x) + k − x}` on `P(Gamma(k) < x)` extended by 1
/// where it does not apply.
fn lower_tail_bound<T: Real>(k: T, x: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    if k <= x {
        return T::one();
    }
    (-k * (k / x).ln() + k - x).exp()
}

/// `log P(R_k²/r² avoids every band)`.
pub fn log_factor<T: Real>(spec: &RadialHoleSpec<T>, k: usize) -> T {
    let a: T = from_usize(k);
    let r2 = spec.r * spec.r;
    let band: T = spec
        .bands
        .iter()
        .map(|&(lo, hi)| gamma_interval_mass(a, r2 * lo * lo, r2 * hi * hi))
        .sum();
    if band < lit(0.5) {
        return (-band).ln_1p();
    }
    // complement intervals in log space
    let mut acc = T::neg_infinity();
    let mut prev = T::zero();
    let last = spec.bands.len() - 1;
    for (i, &(lo, hi)) in spec.bands.iter().enumerate() {
        if lo > prev {
            let piece = if prev == T::zero() {
                ln_reg_gamma(a, r2 * lo * lo).0
            } else {
                gamma_interval_mass(a, r2 * prev * prev, r2 * lo * lo).ln()
            };
            acc = log_add_exp(acc, piece);
        }
        prev = hi;
        if i == last {
            acc = log_add_exp(acc, ln_reg_gamma(a, r2 * hi * hi).1);
        }
    }
    acc
}

/// `log P[no point of the infinite Ginibre ensemble in the scaled bands]`.
pub fn log_hole_radial<T: Real>(spec: &RadialHoleSpec<T>) -> Result<RadialHoleResult<T>> {
    spec.validate()?;
    if spec.bands.is_empty() || spec.r == T::zero() {
        return Ok(RadialHoleResult { log_probability: T::zero(), terms: 0, truncation_bound: T::zero() });
    }
    let outer = spec.bands.last().unwrap().1;
    let x = spec.r * spec.r * outer * outer;
    let floor = (lit::<T>(2.0) * spec.r * spec.r).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let mut sum = crate::scalar::KahanSum::new();
    let mut k = 1usize;
    loop {
        sum.add(log_factor(spec, k));
        if k >= floor {
            // tail Σ_{j>k} −log(1 − b_j) ≤ Σ b_j/(1 − b_j), dominated by a
            // geometric series since b_{j+1}/b_j decreases in j
            let b1 = lower_tail_bound(from_usize::<T>(k + 1), x);
            let b2 = lower_tail_bound(from_usize::<T>(k + 2), x);
            if b1 < lit(0.5) {
                let ratio = if b1 > T::zero() { b2 / b1 } else { T::zero() };
                if ratio < T::one() {
                    let tail = b1 / (T::one() - b1) / (T::one() - ratio);
                    if tail <= spec.truncation {
                        return Ok(RadialHoleResult { log_probability: sum.value(), terms: k, truncation_bound: tail });
                    }
                }
            }
        }
        k += 1;
        if k > 50_000_000 {
            return Err(Error::NonConvergence {
                what: "radial product truncation".into(),
                achieved: f64::NAN,
                target: spec.truncation.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
}

/// Slope study of `(1/r⁴) log P[X_∞(r U_c) = 0]` for `U_c = {c < |z| < 1}`.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport<T> {
    pub c: T,
    /// `(r, (1/r⁴) log P)`.
    pub values: Vec<(T, T)>,
    pub extrapolated: T,
    pub closed_form: T,
    pub relative_gap: T,
}

/// Fits `s + α log r / r² + β / r²` (weights `r⁴`) to the normalized values.
pub fn slope_study<T: Real>(c: T, radii: &[T]) -> Result<SlopeReport<T>> {
    if radii.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    if radii[0] < lit(4.0) {
        return Err(Error::InvalidArgument("radii must be at least 4".into()));
    }
    let closed_form = kostlan_slope_closed(c)?;
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        let res = log_hole_radial(&RadialHoleSpec::annulus(c, r)?)?;
        values.push((r, res.log_probability / r.powi(4)));
    }
    let xs: Vec<T> = values.iter().map(|v| v.0).collect();
    let ys: Vec<T> = values.iter().map(|v| v.1).collect();
    let w: Vec<T> = xs.iter().map(|&r| r.powi(4)).collect();
    let f = fit(&xs, &ys, Some(&w), &[Term::LogOverXSquare, Term::InverseSquare])?;
    Ok(SlopeReport {
        c,
        values,
        extrapolated: f.limit,
        closed_form,
        relative_gap: ((f.limit - closed_form) / closed_form).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reg_gamma_examples() {
        let (p, q) = reg_gamma(1, 2.5_f64).unwrap();
        assert!((p - (1.0 - (-2.5_f64).exp())).abs() < 1e-15);
        assert!((p + q - 1.0).abs() < 1e-15);
        assert_eq!(reg_gamma(7, 0.0_f64).unwrap(), (0.0, 1.0));
        // P(10, 10) = P(Poisson(10) ≥ 10)
        let mut term = (-10.0_f64).exp();
        let mut cdf = 0.0;
        for j in 0..10 {
            if j > 0 {
                term *= 10.0 / j as f64;
            }
            cdf += term;
        }
        let (p, _) = reg_gamma(10, 10.0_f64).unwrap();
        assert!((p - (1.0 - cdf)).abs() < 1e-14);
        assert!((p - 0.54207).abs() < 1e-5);
        assert!(reg_gamma(0, 1.0_f64).is_err());
        assert!(reg_gamma(3, -1.0_f64).is_err());
    }

    #[test]
    fn disk_hole_is_sum_of_upper_tails() {
        let r = 3.0_f64;
        let res = log_hole_radial(&RadialHoleSpec::annulus(0.0, r).unwrap()).unwrap();
        let mut direct = 0.0;
        for k in 1..400 {
            direct += reg_gamma(k, r * r).unwrap().1.ln();
        }
        assert!((res.log_probability - direct).abs() < 1e-12);
        assert!(res.truncation_bound <= 1e-14);
    }

    #[test]
    fn empty_hole() {
        let res = log_hole_radial(&RadialHoleSpec::annulus(0.5, 0.0_f64).unwrap()).unwrap();
        assert_eq!(res.log_probability, 0.0);
        let res = log_hole_radial(&RadialHoleSpec::new(vec![], 3.0_f64).unwrap()).unwrap();
        assert_eq!(res.log_probability, 0.0);
    }

    #[test]
    fn annulus_factor_is_p_plus_q() {
        let spec = RadialHoleSpec::annulus(0.5, 4.0_f64).unwrap();
        for k in [1usize, 3, 4, 10, 40] {
            let (p, _) = reg_gamma(k, 4.0_f64).unwrap();
            let (_, q) = reg_gamma(k, 16.0_f64).unwrap();
            assert!((log_factor(&spec, k) - (p + q).ln()).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn two_bands_factor() {
        let spec = RadialHoleSpec::new(vec![(0.1, 0.3), (0.5, 0.9)], 5.0_f64).unwrap();
        let k = 6usize;
        let m = |lo: f64, hi: f64| gamma_interval_mass(6.0, 25.0 * lo * lo, 25.0 * hi * hi);
        let keep = m(0.0, 0.1) + m(0.3, 0.5) + reg_gamma(k, 25.0 * 0.81).unwrap().1;
        assert!((log_factor(&spec, k) - keep.ln()).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(RadialHoleSpec::new(vec![(0.5, 1.2)], 2.0_f64).is_err());
        assert!(RadialHoleSpec::new(vec![(0.5, 0.4)], 2.0_f64).is_err());
        assert!(RadialHoleSpec::new(vec![(0.1, 0.5), (0.4, 0.6)], 2.0_f64).is_err());
        assert!(RadialHoleSpec::new(vec![(0.1, 0.5)], -2.0_f64).is_err());
    }

    #[test]
    fn chernoff_edges() {
        let (lo, up) = chernoff_bounds(4, 4.0_f64, 0.5);
        assert!((lo.unwrap() - 1.0).abs() < 1e-15);
        assert!(up.is_ok());
        let (lo, up) = chernoff_bounds(16, 4.0_f64, 0.5);
        assert!(lo.unwrap() < 1.0);
        assert!((up.unwrap() - 1.0).abs() < 1e-15);
        let (lo, up) = chernoff_bounds(17, 4.0_f64, 0.5);
        assert!(lo.is_ok());
        assert!(up.is_err());
        assert!(chernoff_bounds(3, 4.0_f64, 0.5).0.is_err());
        let (_, up) = chernoff_bounds(15, 4.0_f64, 0.5);
        assert!(up.unwrap() < 1.0);
    }

    #[test]
    fn slope_study_validation() {
        assert!(slope_study(0.5_f64, &[8.0, 12.0]).is_err());
        assert!(slope_study(0.5_f64, &[8.0, 12.0, 10.0]).is_err());
        assert!(slope_study(0.5_f64, &[2.0, 12.0, 16.0]).is_err());
        assert!(slope_study(1.0_f64, &[8.0, 12.0, 16.0]).is_err());
    }
}
