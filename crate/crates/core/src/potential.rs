//! Logarithmic potentials `p_μ(z) = −∫ log|z − w| dμ(w)`, logarithmic energy
//! and the weighted energy `R_μ = I_μ + ∫|z|² dμ` for mixed planar measures.

use num_complex::Complex;
use serde::Serialize;

use crate::balayage::{Basis, BoundaryMeasure};
use crate::error::{Error, Result};
use crate::geometry::{Piece, Region};
use crate::quadrature::{adaptive, composite, periodic_trapezoid, QuadratureRule};
use crate::scalar::{from_usize, lit, Cplx, KahanSum, Real};

/// Distance below which a target point counts as lying on a support.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

/// Constant density (w.r.t. Lebesgue measure) on a region.  Densities may be
/// negative so that set differences such as `D \ U` are exact sums of parts.
#[derive(Clone, Debug)]
pub struct AreaPart<T: Real> {
    pub region: Region<T>,
    pub density: T,
}

/// A density on the boundary of a region.
#[derive(Clone, Debug)]
pub struct BoundaryPart<T: Real> {
    pub region: Region<T>,
    pub measure: BoundaryMeasure<T>,
}

/// Sum of area-uniform parts, boundary densities and point masses.
#[derive(Clone, Debug, Default)]
pub struct PlanarMeasure<T: Real> {
    pub area: Vec<AreaPart<T>>,
    pub boundary: Vec<BoundaryPart<T>>,
    pub points: Vec<(Cplx<T>, T)>,
}

/// Energy decomposition of a measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport<T> {
    pub log_energy: T,
    pub field_term: T,
    pub weighted_energy: T,
    pub error_estimate: T,
}

impl<T: Real> PlanarMeasure<T> {
    pub fn new() -> Self {
        Self { area: Vec::new(), boundary: Vec::new(), points: Vec::new() }
    }

    /// Normalized area measure on the disk of radius `radius` about 0.
    pub fn uniform_disk(radius: T) -> Result<Self> {
        let region = Region::centered_disk(radius)?;
        let density = (T::PI() * radius * radius).recip();
        Ok(Self { area: vec![AreaPart { region, density }], ..Self::new() })
    }

    /// Normalized arclength measure on the circle of radius `radius` about 0.
    pub fn uniform_circle(radius: T) -> Result<Self> {
        let region = Region::centered_disk(radius)?;
        let measure = BoundaryMeasure::uniform(&region, T::one());
        Ok(Self { boundary: vec![BoundaryPart { region, measure }], ..Self::new() })
    }

    /// `ν = (1/π) m|_{D \ U} + ν₂` with `ν₂` a measure on `∂U`.
    pub fn equilibrium(region: &Region<T>, nu2: &BoundaryMeasure<T>) -> Result<Self> {
        let inv_pi = T::PI().recip();
        let mut m = Self::new();
        m.area.push(AreaPart { region: Region::centered_disk(T::one())?, density: inv_pi });
        if !region.is_empty() {
            m.area.push(AreaPart { region: region.clone(), density: -inv_pi });
            m.boundary.push(BoundaryPart { region: region.clone(), measure: nu2.clone() });
        }
        Ok(m)
    }

    /// `(1/π) m|_U`.
    pub fn area_restriction(region: &Region<T>) -> Self {
        let mut m = Self::new();
        if !region.is_empty() {
            m.area.push(AreaPart { region: region.clone(), density: T::PI().recip() });
        }
        m
    }

    pub fn total_mass(&self) -> T {
        let mut acc = KahanSum::new();
        for a in &self.area {
            acc.add(a.density * a.region.area());
        }
        for b in &self.boundary {
            acc.add(b.measure.total_mass());
        }
        for &(_, w) in &self.points {
            acc.add(w);
        }
        acc.value()
    }

    /// Potential at `z`; refuses points on a curve support or at a point mass.
    pub fn potential_at(&self, z: Cplx<T>, rule: &QuadratureRule) -> Result<T> {
        let cutoff: T = lit(SINGULAR_CUTOFF);
        for &(p, _) in &self.points {
            if (p - z).norm() <= cutoff {
                return Err(Error::Singular(format!("target coincides with a point mass at {p}")));
            }
        }
        for b in &self.boundary {
            for piece in b.region.pieces() {
                let (_, d) = nearest_on_piece(&b.region, &piece, z);
                if d <= cutoff {
                    return Err(Error::Singular("target lies on a boundary support".into()));
                }
            }
        }
        Ok(self.potential_unchecked(z, rule))
    }

    /// Potential without the support checks (log singularities integrated adaptively).
    pub fn potential_unchecked(&self, z: Cplx<T>, rule: &QuadratureRule) -> T {
        let tol: T = lit(rule.tolerance);
        let mut acc = KahanSum::new();
        for a in &self.area {
            acc.add(a.density * area_log_potential(&a.region, z, tol));
        }
        for b in &self.boundary {
            acc.add(boundary_potential(&b.region, &b.measure, z, tol));
        }
        for &(p, w) in &self.points {
            acc.add(-w * (p - z).norm().ln());
        }
        acc.value()
    }

    /// `∫ p_μ dμ`.
    pub fn log_energy(&self, rule: &QuadratureRule) -> Result<(T, T)> {
        if !self.points.is_empty() {
            return Err(Error::PointPartPresent);
        }
        let mut acc = KahanSum::new();
        let mut err = T::zero();
        for a in &self.area {
            let q = a.region.integrate(|z| Complex::new(self.potential_unchecked(z, rule), T::zero()), rule)?;
            acc.add(a.density * q.value.re);
            err = err + a.density.abs() * q.error;
        }
        for b in &self.boundary {
            let f = |z: Cplx<T>| self.potential_unchecked(z, rule);
            let coarse = b.measure.integrate_real(&b.region, &f, 128);
            let fine = b.measure.integrate_real(&b.region, &f, 256);
            acc.add(fine);
            err = err + (fine - coarse).abs();
        }
        Ok((acc.value(), err))
    }

    /// `∫ |z|² dμ`.
    pub fn field_term(&self, rule: &QuadratureRule) -> Result<(T, T)> {
        let mut acc = KahanSum::new();
        let mut err = T::zero();
        for a in &self.area {
            let q = a.region.integrate(|z| Complex::new(z.norm_sqr(), T::zero()), rule)?;
            acc.add(a.density * q.value.re);
            err = err + a.density.abs() * q.error;
        }
        for b in &self.boundary {
            acc.add(b.measure.integrate_real(&b.region, &|z: Cplx<T>| z.norm_sqr(), 512));
        }
        for &(p, w) in &self.points {
            acc.add(w * p.norm_sqr());
        }
        Ok((acc.value(), err))
    }

    /// `R_μ = I_μ + ∫|z|² dμ` for a probability measure.
    pub fn weighted_energy(&self, rule: &QuadratureRule) -> Result<EnergyReport<T>> {
        if !self.points.is_empty() {
            return Err(Error::PointPartPresent);
        }
        let mass = self.total_mass();
        if (mass - T::one()).abs() > lit(1e-10) {
            return Err(Error::MassMismatch { found: mass.to_f64().unwrap_or(f64::NAN), expected: 1.0 });
        }
        let (log_energy, e1) = self.log_energy(rule)?;
        let (field_term, e2) = self.field_term(rule)?;
        Ok(EnergyReport {
            log_energy,
            field_term,
            weighted_energy: log_energy + field_term,
            error_estimate: e1 + e2,
        })
    }
}

/// `∫_U −log|z − w| dm(w)` (unit density).
///
/// Disks and annuli use the closed form of the disk potential; other shapes
/// use `∫_U log|w − z| dm = (1/2i) ∮ (w̄ − z̄)(log|w − z| − 1/2) dw`.
pub fn area_log_potential<T: Real>(region: &Region<T>, z: Cplx<T>, tol: T) -> T {
    match region {
        Region::Empty => T::zero(),
        Region::Disk { center, radius } => disk_log_potential(*radius, (z - center).norm()),
        Region::Annulus { inner, outer } => {
            let r = z.norm();
            disk_log_potential(*outer, r) - disk_log_potential(*inner, r)
        }
        _ => {
            let mut acc = KahanSum::new();
            for piece in region.pieces() {
                let sign: T = region.component_role(piece.component).unwrap().sign();
                let (s_near, _) = nearest_on_piece(region, &piece, z);
                let f = |s: T| {
                    let (w, dw) = region.piece_eval(&piece, s);
                    let d = w - z;
                    let r = d.norm();
                    if r == T::zero() {
                        return Complex::new(T::zero(), T::zero());
                    }
                    d.conj() * (r.ln() - lit(0.5)) * dw
                };
                let bps = breakpoints_for(&piece, s_near);
                let (v, _) = adaptive(&f, T::zero(), T::one(), &bps, tol);
                // (1/2i)·v, real part
                acc.add(sign * v.im * lit(0.5));
            }
            -acc.value()
        }
    }
}

fn disk_log_potential<T: Real>(radius: T, rho: T) -> T {
    let pi = T::PI();
    let r2 = radius * radius;
    if rho <= radius {
        pi * (r2 * (lit::<T>(0.5) - radius.ln()) - rho * rho * lit(0.5))
    } else {
        -pi * r2 * rho.ln()
    }
}

fn breakpoints_for<T: Real>(_piece: &Piece<T>, s_near: T) -> Vec<T> {
    if s_near > T::zero() && s_near < T::one() {
        vec![s_near]
    } else {
        Vec::new()
    }
}

/// Closest point of a piece to `z`: `(s, distance)`.
pub fn nearest_on_piece<T: Real>(region: &Region<T>, piece: &Piece<T>, z: Cplx<T>) -> (T, T) {
    let m = 128;
    let mut best = (T::zero(), T::infinity());
    for i in 0..=m {
        let s = from_usize::<T>(i) / from_usize::<T>(m);
        let d = (region.piece_eval(piece, s).0 - z).norm();
        if d < best.1 {
            best = (s, d);
        }
    }
    // golden-section refinement on the bracketing cell
    let h = from_usize::<T>(m).recip();
    let (mut lo, mut hi) = ((best.0 - h).max(T::zero()), (best.0 + h).min(T::one()));
    let g: T = lit(0.6180339887498949);
    let dist = |s: T| (region.piece_eval(piece, s).0 - z).norm();
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (dist(x1), dist(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist(x2);
        }
        if hi - lo <= T::epsilon() * lit(4.0) {
            break;
        }
    }
    let s = (lo + hi) * lit(0.5);
    let d = dist(s);
    if d < best.1 {
        (s, d)
    } else {
        best
    }
}

/// Potential of a boundary density at `z`.
pub fn boundary_potential<T: Real>(region: &Region<T>, measure: &BoundaryMeasure<T>, z: Cplx<T>, tol: T) -> T {
    let mut acc = KahanSum::new();
    for (idx, pd) in measure.pieces.iter().enumerate() {
        if let Some(v) = circle_closed_form(region, measure, idx, z) {
            acc.add(v);
            continue;
        }
        let piece = pd.piece;
        let (s_near, _) = nearest_on_piece(region, &piece, z);
        let f = |s: T| {
            let (w, _) = region.piece_eval(&piece, s);
            let r = (w - z).norm();
            if r == T::zero() {
                return Complex::new(T::zero(), T::zero());
            }
            Complex::new(-r.ln() * measure.density(idx, s), T::zero())
        };
        let (v, _) = adaptive(&f, T::zero(), T::one(), &breakpoints_for(&piece, s_near), tol);
        acc.add(v.re);
    }
    acc.value()
}

/// Potential of a Fourier density on a full circle (disk boundary or annulus
/// component) by the Jensen/Fourier closed form.
fn circle_closed_form<T: Real>(region: &Region<T>, measure: &BoundaryMeasure<T>, idx: usize, z: Cplx<T>) -> Option<T> {
    let pd = &measure.pieces[idx];
    if pd.basis != Basis::Fourier || !pd.piece.closed {
        return None;
    }
    let (center, radius) = match region {
        Region::Disk { center, radius } => (*center, *radius),
        Region::Annulus { inner, outer } => {
            (Complex::new(T::zero(), T::zero()), if pd.piece.component == 0 { *outer } else { *inner })
        }
        _ => return None,
    };
    let d = z - center;
    let rho = d.norm();
    let phi = d.arg();
    let c = &pd.coeffs;
    let (big, ratio) = if rho <= radius { (radius, rho / radius) } else { (rho, radius / rho) };
    let mut acc = KahanSum::new();
    acc.add(-c[0] * big.ln());
    let mut pow = T::one();
    let modes = (c.len() - 1) / 2;
    for k in 1..=modes {
        pow = pow * ratio;
        let kk = from_usize::<T>(k);
        let (s, co) = (kk * phi).sin_cos();
        acc.add(pow / (lit::<T>(2.0) * kk) * (c[2 * k - 1] * co + c[2 * k] * s));
    }
    Some(acc.value())
}

/// Quadrature nodes on `[0, 1]` for a piece (trapezoid if periodic).
pub(crate) fn piece_nodes<T: Real>(piece: &Piece<T>, n: usize) -> Vec<(T, T)> {
    if piece.closed {
        periodic_trapezoid(n)
    } else {
        composite(T::zero(), T::one(), &[], n, 16)
    }
}
