//! Finite-`n` Ginibre hole probabilities `P[X_n(rU) = 0] = det M_n(rU)` with
//! `M_ij = ∫_{(rU)^c} φ_i φ̄_j dm` and `φ_k(z) = z^{k−1} e^{−|z|²/2} / √(π (k−1)!)`.
//!
//! Entries are integrated over the complement directly, ray by ray: along the
//! ray at angle θ the radial integral is a Gamma((i+j)/2) interval mass, so no
//! entry is ever formed as `1 − (something close to 1)`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::r_prime_closed;
use crate::error::{Error, Result};
use crate::extrapolate::{fit, Term};
use crate::geometry::Region;
use crate::linalg::{hermitian_log_det, CMatrix, LogDet};
use crate::quadrature::{composite, periodic_trapezoid, QuadratureRule};
use crate::scalar::{cis, from_usize, lit, Cplx, KahanSum, KahanSumC, Real};
use crate::special::{gamma_interval_mass, ln_gamma};

/// Tolerance on the spectrum leaving `[0, 1]` before assembly is refused.
pub const SPECTRUM_TOLERANCE: f64 = 1e-8;

/// `(log |φ_k(z)|, arg φ_k(z))`.
pub fn basis_log<T: Real>(k: usize, z: Cplx<T>) -> Result<(T, T)> {
    if k == 0 {
        return Err(Error::InvalidArgument("basis index starts at 1".into()));
    }
    let half: T = lit(0.5);
    let km1 = from_usize::<T>(k - 1);
    let rho = z.norm();
    let log_rho = if k == 1 { T::zero() } else { rho.ln() };
    let log_mag = km1 * log_rho - rho * rho * half - half * (T::PI().ln() + ln_gamma(from_usize::<T>(k)));
    let phase = if k == 1 || rho == T::zero() { T::zero() } else { km1 * z.arg() };
    Ok((log_mag, phase))
}

/// `M_n(rU)` with its assembly diagnostics.
#[derive(Clone, Debug)]
pub struct HoleMatrix<T> {
    pub n: usize,
    pub matrix: CMatrix<T>,
    /// Largest entry change under the last angular refinement.
    pub assembly_error: T,
    /// Hermitian defect before symmetrization.
    pub hermitian_defect: T,
}

/// Complement of the ray intervals of `rU` in `u = ρ²` coordinates.
fn complement_u<T: Real>(region: &Region<T>, r: T, theta: T) -> Vec<(T, T)> {
    let mut out = Vec::new();
    let mut prev = T::zero();
    for (lo, hi) in region.ray_intervals(theta) {
        let (lo, hi) = (r * r * lo * lo, r * r * hi * hi);
        if lo > prev {
            out.push((prev, lo));
        }
        prev = prev.max(hi);
    }
    out.push((prev, T::infinity()));
    out
}

/// One angular-rule evaluation of `M`.
fn assemble_at<T: Real>(region: &Region<T>, r: T, n: usize, nodes: &[(T, T)]) -> CMatrix<T> {
    // masses G[θ][m] for shapes a = (m + 2)/2, m = 0..2n−2 (a = (i+j)/2, i, j ≥ 1)
    let shapes = 2 * n - 1;
    let masses: Vec<Vec<T>> = nodes
        .par_iter()
        .map(|&(theta, _)| {
            let comp = complement_u(region, r, theta);
            (0..shapes)
                .map(|m| {
                    let a = from_usize::<T>(m + 2) * lit(0.5);
                    let mut acc = KahanSum::new();
                    for &(lo, hi) in &comp {
                        acc.add(gamma_interval_mass(a, lo, hi));
                    }
                    acc.value()
                })
                .collect()
        })
        .collect();
    let lg: Vec<T> = (0..shapes).map(|m| ln_gamma(from_usize::<T>(m + 2) * lit(0.5))).collect();
    let inv_tau = T::TAU().recip();
    let rows: Vec<Vec<Cplx<T>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j < i {
                        return Complex::new(T::zero(), T::zero());
                    }
                    let m = i + j; // (i+1)+(j+1) − 2
                    let ratio = (lg[m] - (lg[2 * i] + lg[2 * j]) * lit(0.5)).exp();
                    let freq = from_usize::<T>(i) - from_usize::<T>(j);
                    let mut acc = KahanSumC::new();
                    for (q, &(theta, w)) in nodes.iter().enumerate() {
                        acc.add(cis(freq * theta) * (w * masses[q][m]));
                    }
                    acc.value() * (ratio * inv_tau)
                })
                .collect()
        })
        .collect();
    let mut mat = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            mat.set(i, j, rows[i][j]);
            mat.set(j, i, rows[i][j].conj());
        }
    }
    mat
}

fn angular_nodes<T: Real>(breaks: &[T], count: usize) -> Vec<(T, T)> {
    if breaks.is_empty() {
        return periodic_trapezoid::<T>(count)
            .into_iter()
            .map(|(t, w)| (t * T::TAU(), w * T::TAU()))
            .collect();
    }
    // rotate so the first breakpoint is at the start of the period
    let start = breaks[0];
    let inner: Vec<T> = breaks[1..].iter().map(|&b| b - start).collect();
    composite(T::zero(), T::TAU(), &inner, count, 16)
        .into_iter()
        .map(|(t, w)| (t + start, w))
        .collect()
}

/// Assembles `M_n(rU)`, refining the angular rule until entries settle.
pub fn assemble<T: Real>(region: &Region<T>, r: T, n: usize, rule: &QuadratureRule) -> Result<HoleMatrix<T>> {
    region.validate()?;
    rule.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be at least 1".into()));
    }
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("scale r must be finite and non-negative, got {r}")));
    }
    if region.is_empty() || r == T::zero() {
        return Ok(HoleMatrix { n, matrix: CMatrix::identity(n), assembly_error: T::zero(), hermitian_defect: T::zero() });
    }
    let breaks = region.angular_breakpoints();
    let tol: T = lit(rule.tolerance);
    let mut count = rule.angular_nodes.max(2 * n + 32);
    let mut coarse = assemble_at(region, r, n, &angular_nodes(&breaks, count));
    let mut change = T::infinity();
    for _ in 0..=rule.max_refinements {
        count *= 2;
        let fine = assemble_at(region, r, n, &angular_nodes(&breaks, count));
        change = fine.data.iter().zip(&coarse.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()));
        coarse = fine;
        if change <= tol {
            break;
        }
    }
    if change > tol {
        return Err(Error::NonConvergence {
            what: "hole matrix angular quadrature".into(),
            achieved: change.to_f64().unwrap_or(f64::NAN),
            target: rule.tolerance,
        });
    }
    let hermitian_defect = coarse.hermitian_defect();
    coarse.symmetrize();
    let hm = HoleMatrix { n, matrix: coarse, assembly_error: change, hermitian_defect };
    check_spectrum(&hm, lit(SPECTRUM_TOLERANCE))?;
    Ok(hm)
}

/// Refuses matrices whose spectrum leaves `[−tol, 1 + tol]`, tested by
/// Cholesky factorization of `M + tol·I` and `(1 + tol)I − M`.
pub fn check_spectrum<T: Real>(m: &HoleMatrix<T>, tol: T) -> Result<()> {
    let n = m.n;
    let mut lower = m.matrix.clone();
    let mut upper = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let e = m.matrix.get(i, j);
            upper.set(i, j, -e);
        }
        lower.set(i, i, lower.get(i, i) + Complex::new(tol, T::zero()));
        upper.set(i, i, upper.get(i, i) + Complex::new(T::one() + tol, T::zero()));
    }
    hermitian_log_det(&lower, T::zero())?;
    hermitian_log_det(&upper, T::zero())?;
    Ok(())
}

/// `log det M`; `−∞` when a pivot vanishes within tolerance.
pub fn log_det<T: Real>(m: &HoleMatrix<T>) -> Result<T> {
    match hermitian_log_det(&m.matrix, lit(SPECTRUM_TOLERANCE))? {
        LogDet::Finite(v) => Ok(v.min(T::zero())),
        LogDet::Singular { .. } => Ok(T::neg_infinity()),
    }
}

/// `Σ_k log(1 − A_kk)` for rotation-invariant `U`, where `M` is diagonal with
/// entries equal to the Gamma(k) mass of the complement of the scaled bands.
pub fn radial_log_det<T: Real>(region: &Region<T>, r: T, n: usize) -> Result<T> {
    let bands = region
        .radial_decomposition()
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not rotation-invariant about 0", region.shape_name())))?;
    let mut acc = KahanSum::new();
    for k in 1..=n {
        let a = from_usize::<T>(k);
        let mut keep = KahanSum::new();
        let mut prev = T::zero();
        for &(lo, hi) in &bands.bands {
            keep.add(gamma_interval_mass(a, prev, r * r * lo * lo));
            prev = r * r * hi * hi;
        }
        keep.add(gamma_interval_mass(a, prev, T::infinity()));
        acc.add(keep.value().ln());
    }
    Ok(acc.value())
}

/// Order that makes `det M_n(rU)` stable in `n`: `⌈2r²⌉ + 40`.
pub fn default_order<T: Real>(r: T) -> usize {
    (lit::<T>(2.0) * r * r).ceil().to_usize().unwrap_or(usize::MAX - 40) + 40
}

/// `log P[X_n(rU) = 0]` with its inputs.
#[derive(Clone, Debug, Serialize)]
pub struct HoleProbResult<T> {
    pub log_probability: T,
    pub n: usize,
    pub r: T,
    pub assembly_error: T,
    /// `(n, log P)` when a sweep over orders was requested.
    pub sequence: Vec<(usize, T)>,
}

/// `log P[X_n(rU) = 0]`; `n = None` uses [`default_order`].
pub fn hole_probability<T: Real>(
    region: &Region<T>,
    r: T,
    n: Option<usize>,
    rule: &QuadratureRule,
) -> Result<HoleProbResult<T>> {
    let n = n.unwrap_or_else(|| default_order(r));
    let m = assemble(region, r, n, rule)?;
    let log_probability = log_det(&m)?;
    Ok(HoleProbResult { log_probability, n, r, assembly_error: m.assembly_error, sequence: vec![(n, log_probability)] })
}

/// `log P[X_n(rU) = 0]` for several orders at fixed `r`.
pub fn order_sweep<T: Real>(region: &Region<T>, r: T, orders: &[usize], rule: &QuadratureRule) -> Result<HoleProbResult<T>> {
    let mut sequence = Vec::with_capacity(orders.len());
    let mut assembly_error = T::zero();
    for &n in orders {
        let m = assemble(region, r, n, rule)?;
        assembly_error = assembly_error.max(m.assembly_error);
        sequence.push((n, log_det(&m)?));
    }
    let &(n, log_probability) = sequence.last().ok_or_else(|| Error::InvalidArgument("no orders given".into()))?;
    Ok(HoleProbResult { log_probability, n, r, assembly_error, sequence })
}

/// The finite-`n` route to `3/4 − R_U`.
#[derive(Clone, Debug, Serialize)]
pub struct LimitEstimate<T> {
    /// `(n, log P[X_n(√n U) = 0])`.
    pub log_probabilities: Vec<(usize, T)>,
    /// `(n, (1/n²) log P[X_n(√n U) = 0])`.
    pub sequence: Vec<(usize, T)>,
    /// Constant term of the fit `c₀ + c₁ log n / n + c₂ / n`.
    pub extrapolated: T,
    /// `−R′_U` from the closed-form catalog, when available.
    pub closed_form: Option<T>,
}

pub fn limit_estimate<T: Real>(region: &Region<T>, orders: &[usize], rule: &QuadratureRule) -> Result<LimitEstimate<T>> {
    if orders.len() < 3 {
        return Err(Error::InvalidArgument("the extrapolation needs at least 3 orders".into()));
    }
    if orders.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("orders must be strictly increasing".into()));
    }
    if !region.fits_in_unit_disk() {
        return Err(Error::Domain("U must lie in the closed unit disk".into()));
    }
    let mut log_probabilities = Vec::with_capacity(orders.len());
    let mut sequence = Vec::with_capacity(orders.len());
    for &n in orders {
        let nn = from_usize::<T>(n);
        let m = assemble(region, nn.sqrt(), n, rule)?;
        let lp = log_det(&m)?;
        log_probabilities.push((n, lp));
        sequence.push((n, lp / (nn * nn)));
    }
    let xs: Vec<T> = orders.iter().map(|&n| from_usize(n)).collect();
    let ys: Vec<T> = sequence.iter().map(|s| s.1).collect();
    let extrapolated = if ys.iter().all(|&y| y == T::zero()) {
        T::zero()
    } else {
        fit(&xs, &ys, None, &[Term::LogOverX, Term::Inverse])?.limit
    };
    let closed_form = r_prime_closed(region).ok().map(|v| -v);
    Ok(LimitEstimate { log_probabilities, sequence, extrapolated, closed_form })
}

/// `log Z_n` for `Z_n = n^{−n²/2} πⁿ ∏_{k=1}^n k!`.
pub fn log_partition<T: Real>(n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let nn = from_usize::<T>(n);
    let mut acc = KahanSum::new();
    acc.add(-nn * nn * lit::<T>(0.5) * nn.ln());
    acc.add(nn * T::PI().ln());
    // Σ_k log k! = Σ_j (n − j + 1) log j
    for j in 2..=n {
        acc.add(from_usize::<T>(n - j + 1) * from_usize::<T>(j).ln());
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::reg_gamma_real;

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn basis_log_values() {
        let (m, p) = basis_log(1, Complex::new(0.0_f64, 0.0)).unwrap();
        assert!((m + 0.5 * std::f64::consts::PI.ln()).abs() < 1e-15);
        assert_eq!(p, 0.0);
        let z = Complex::from_polar(1.0_f64, 0.7);
        let (m, p) = basis_log(2, z).unwrap();
        assert!((m - (-0.5 - 0.5 * std::f64::consts::PI.ln())).abs() < 1e-15);
        assert!((p - 0.7).abs() < 1e-15);
        let (m, _) = basis_log(10_000, Complex::new(200.0_f64, 0.0)).unwrap();
        assert!(m.is_finite());
        assert!(basis_log(0, z).is_err());
    }

    #[test]
    fn disk_matrix_is_diagonal_upper_tails() {
        let a = 0.5_f64;
        let r = 3.0;
        let m = assemble(&Region::centered_disk(a).unwrap(), r, 12, &rule()).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let e = m.matrix.get(i, j);
                if i == j {
                    let (_, q) = reg_gamma_real((i + 1) as f64, r * r * a * a);
                    assert!((e.re - q).abs() < 1e-13 && e.im.abs() < 1e-15);
                } else {
                    assert!(e.norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn empty_region_gives_identity() {
        let m = assemble(&Region::<f64>::Empty, 2.0, 5, &rule()).unwrap();
        assert_eq!(m.matrix, CMatrix::identity(5));
        assert_eq!(log_det(&m).unwrap(), 0.0);
    }

    #[test]
    fn single_point_disk() {
        let (a, r) = (0.4_f64, 2.5_f64);
        let m = assemble(&Region::centered_disk(a).unwrap(), r, 1, &rule()).unwrap();
        assert!((log_det(&m).unwrap() + r * r * a * a).abs() < 1e-13);
    }

    #[test]
    fn partition_small_cases() {
        let pi = std::f64::consts::PI;
        assert!((log_partition::<f64>(1).unwrap() - pi.ln()).abs() < 1e-15);
        assert!((log_partition::<f64>(2).unwrap() - (2.0 * pi.ln() - 2f64.ln())).abs() < 1e-14);
        assert!(log_partition::<f64>(0).is_err());
    }

    #[test]
    fn partition_against_log_gamma() {
        for n in [3usize, 10, 57] {
            let direct: f64 = (1..=n).map(|k| ln_gamma((k + 1) as f64)).sum::<f64>() + n as f64 * std::f64::consts::PI.ln()
                - (n * n) as f64 / 2.0 * (n as f64).ln();
            assert!((log_partition::<f64>(n).unwrap() - direct).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn default_order_formula() {
        assert_eq!(default_order(4.0_f64), 72);
        assert_eq!(default_order(0.1_f64), 41);
    }

    #[test]
    fn limit_refuses_bad_orders() {
        let d = Region::centered_disk(0.5_f64).unwrap();
        assert!(limit_estimate(&d, &[40, 80], &rule()).is_err());
        assert!(limit_estimate(&d, &[40, 30, 80], &rule()).is_err());
    }
}
