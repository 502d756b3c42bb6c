//! Weighted Fekete points on `K = D̄ \ U` for the weight `ω(z) = e^{−|z|²/2}`,
//! and the Fekete route `−(2/(n(n−1))) log ∏_{i<j} |zᵢ − zⱼ| ω(zᵢ) ω(zⱼ) → R_U`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closed_forms::balayage_closed;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::scalar::{from_usize, lit, to_f64, Cplx, KahanSum, Real};

pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_MAX_ITERS: usize = 4000;

/// Points in `D̄ \ U` with their weighted log-product.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfiguration<T> {
    pub points: Vec<Cplx<T>>,
    pub feasible: bool,
    pub value: T,
}

impl<T: Real> PointConfiguration<T> {
    pub fn new(points: Vec<Cplx<T>>, region: &Region<T>) -> Self {
        let feasible = points.iter().all(|&z| is_feasible(z, region));
        let (value, _) = weighted_log_product(&points);
        Self { points, feasible, value }
    }
}

/// Outcome of [`optimize`].
#[derive(Clone, Debug)]
pub struct FeketeReport<T> {
    pub best: PointConfiguration<T>,
    /// `δ_n = exp(2·value/(n(n−1)))`.
    pub delta_n: T,
    /// `−log δ_n`.
    pub r_estimate: T,
    pub min_separation: T,
    pub restarts: usize,
    /// Iterations of the restart that produced `best`.
    pub iterations: usize,
    /// Best value after each restart, in restart order.
    pub best_so_far: Vec<T>,
}

/// Whether `z` lies in `D̄ \ U` (with the 1e−12 slack on `|z| ≤ 1`).
pub fn is_feasible<T: Real>(z: Cplx<T>, region: &Region<T>) -> bool {
    z.norm() <= T::one() + lit(1e-12) && !region.contains(z)
}

/// `Σ_{i<j} log|zᵢ − zⱼ| − ((n−1)/2) Σ|zᵢ|²`; `(−∞, false)` for coincident points.
pub fn weighted_log_product<T: Real>(points: &[Cplx<T>]) -> (T, bool) {
    let n = points.len();
    let mut acc = KahanSum::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (points[i] - points[j]).norm();
            if d == T::zero() {
                return (T::neg_infinity(), false);
            }
            acc.add(d.ln());
        }
    }
    let field: T = points.iter().map(|z| z.norm_sqr()).sum();
    let half_nm1 = from_usize::<T>(n.saturating_sub(1)) * lit(0.5);
    (acc.value() - half_nm1 * field, true)
}

/// `∂/∂xᵢ + i ∂/∂yᵢ` of [`weighted_log_product`]:
/// `Σ_{j≠i} (zᵢ − zⱼ)/|zᵢ − zⱼ|² − (n−1) zᵢ`.
pub fn gradient<T: Real>(points: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let n = points.len();
    let nm1 = from_usize::<T>(n.saturating_sub(1));
    let mut g = vec![Complex::new(T::zero(), T::zero()); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = points[i] - points[j];
            let v = d / d.norm_sqr();
            g[i] = g[i] + v;
            g[j] = g[j] - v;
        }
    }
    for (gi, z) in g.iter_mut().zip(points) {
        *gi = *gi - *z * nm1;
    }
    g
}

/// Minimum pairwise distance (0 for fewer than two points).
pub fn min_separation<T: Real>(points: &[Cplx<T>]) -> T {
    let mut best = T::infinity();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.min((points[i] - points[j]).norm());
        }
    }
    if best.is_infinite() {
        T::zero()
    } else {
        best
    }
}

/// A point of `D̄ \ U` near `z`: `z` itself when feasible, the radial clamp
/// outside the disk, and the nearest-boundary map of `U` for points inside
/// it (exit point of the ray from the anchor for custom regions).  The
/// projection of the disk center to a centered disk is `+radius`.
pub fn project_feasible<T: Real>(z: Cplx<T>, region: &Region<T>) -> Cplx<T> {
    let slack = T::one() + lit(1e-12);
    let mut p = if z.norm() > slack { z / z.norm() } else { z };
    if !region.contains(p) {
        return p;
    }
    let q = match region {
        Region::Custom(c) => ray_exit(region, c.anchor, p),
        _ => region.nearest_boundary_point(p).unwrap_or(p),
    };
    // boundary formulas may round to the inside; push outward by a few ulps
    let dir = {
        let d = q - p;
        if d.norm() > T::zero() {
            d / d.norm()
        } else if q.norm() > T::zero() {
            q / q.norm()
        } else {
            Complex::new(T::one(), T::zero())
        }
    };
    p = q;
    let mut step = T::epsilon() * lit(16.0);
    for _ in 0..200 {
        if !region.contains(p) {
            break;
        }
        p = p + dir * step;
        step = step * lit(2.0);
    }
    if p.norm() > slack {
        p = p / p.norm();
    }
    p
}

fn ray_exit<T: Real>(region: &Region<T>, anchor: Cplx<T>, z: Cplx<T>) -> Cplx<T> {
    let d = z - anchor;
    let dir = if d.norm() > T::zero() { d / d.norm() } else { Complex::new(T::one(), T::zero()) };
    let (mut lo, mut hi) = (d.norm(), d.norm().max(lit(1e-3)));
    while region.contains(anchor + dir * hi) && hi < lit(4.0) {
        hi = hi * lit(2.0);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if region.contains(anchor + dir * mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    anchor + dir * hi
}

/// `n` distinct feasible starting points, stratified from the equilibrium
/// measure `(1/π)m|_{D\U} + ν₂` when `ν₂` is known in closed form, else
/// uniform on `D̄ \ U`.
pub fn initial_configuration<T: Real>(region: &Region<T>, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Cplx<T>>> {
    let pi = T::PI();
    let closed = if region.is_empty() { None } else { balayage_closed(region).ok() };
    let (area_count, boundary_count) = match &closed {
        Some(nu2) => {
            let b = (to_f64(nu2.total_mass()) * n as f64).round() as usize;
            (n - b.min(n), b.min(n))
        }
        None => (n, 0),
    };
    let mut pts = Vec::with_capacity(n);
    // golden-angle spiral with a random rotation and radial jitter
    let golden = pi * (lit::<T>(3.0) - lit::<T>(5.0).sqrt());
    let rot: T = lit(rng.gen::<f64>() * std::f64::consts::TAU);
    let budget = if closed.is_some() || region.is_empty() {
        let keep = T::one() - region.area() / pi;
        if keep <= T::zero() {
            return Err(Error::Infeasible("U covers the disk".into()));
        }
        (from_usize::<T>(area_count) / keep).ceil().to_usize().unwrap_or(area_count).max(area_count)
    } else {
        0
    };
    if budget > 0 {
        for k in 0..budget {
            let jitter: T = lit(rng.gen::<f64>() - 0.5);
            let rho = ((from_usize::<T>(k) + lit(0.5) + jitter * lit(0.5)) / from_usize::<T>(budget)).sqrt();
            let z = Complex::from_polar(rho, rot + golden * from_usize::<T>(k));
            if !region.contains(z) && pts.len() < area_count {
                pts.push(z);
            }
        }
    }
    let mut tries = 0usize;
    while pts.len() < area_count {
        let z = Complex::new(lit::<T>(rng.gen::<f64>() * 2.0 - 1.0), lit::<T>(rng.gen::<f64>() * 2.0 - 1.0));
        if z.norm() <= T::one() && !region.contains(z) {
            pts.push(z);
        }
        tries += 1;
        if tries > 1000 * n + 100_000 {
            return Err(Error::Infeasible("could not sample D̄ \\ U".into()));
        }
    }
    if let Some(nu2) = &closed {
        // inverse CDF of ν₂ sampled on a fine grid of each piece
        let grid = 2048usize;
        let mut cdf = Vec::new();
        let mut acc = T::zero();
        for pi_idx in 0..nu2.pieces.len() {
            for q in 0..grid {
                let s = (from_usize::<T>(q) + lit(0.5)) / from_usize::<T>(grid);
                acc = acc + nu2.density(pi_idx, s).max(T::zero()) / from_usize::<T>(grid);
                cdf.push((acc, pi_idx, s));
            }
        }
        let shift: T = lit(rng.gen::<f64>());
        for k in 0..boundary_count {
            let u = (from_usize::<T>(k) + shift) / from_usize::<T>(boundary_count) * acc;
            let idx = cdf.partition_point(|e| e.0 < u).min(cdf.len() - 1);
            let (_, piece, s) = cdf[idx];
            let (z, _) = region.piece_eval(&nu2.pieces[piece].piece, s);
            pts.push(project_feasible(z, region));
        }
    }
    // separate accidental duplicates
    for i in 0..pts.len() {
        for j in 0..i {
            if (pts[i] - pts[j]).norm() < lit(1e-9) {
                pts[i] = project_feasible(pts[i] * lit::<T>(0.999) + Complex::new(lit(1e-6), lit(1e-6)), region);
            }
        }
    }
    Ok(pts)
}

/// One projected-ascent run from `start`.
fn ascend<T: Real>(region: &Region<T>, start: Vec<Cplx<T>>, max_iters: usize) -> (Vec<Cplx<T>>, T, usize) {
    let n = start.len();
    let mut z = start;
    let (mut f, _) = weighted_log_product(&z);
    let mut g = gradient(&z);
    let mut alpha = lit::<T>(0.1) / from_usize::<T>(n);
    let mut stalled = 0usize;
    let mut iters = 0usize;
    for it in 0..max_iters {
        iters = it + 1;
        let sep = min_separation(&z);
        let gmax = g.iter().fold(T::zero(), |m, v| m.max(v.norm()));
        if gmax == T::zero() {
            break;
        }
        let mut step = alpha;
        let mut accepted = None;
        for _ in 0..40 {
            // cap every displacement at half the current minimum separation
            let scale = if step * gmax > sep * lit(0.5) { sep * lit(0.5) / (step * gmax) } else { T::one() };
            let trial: Vec<Cplx<T>> =
                z.iter().zip(&g).map(|(&p, &d)| project_feasible(p + d * (step * scale), region)).collect();
            let (ft, ok) = weighted_log_product(&trial);
            let gain: T = trial.iter().zip(&z).zip(&g).map(|((t, p), d)| ((*t - *p) * d.conj()).re).sum();
            if ok && ft >= f + lit::<T>(1e-4) * gain && ft >= f {
                accepted = Some((trial, ft));
                break;
            }
            step = step * lit(0.5);
        }
        let Some((trial, ft)) = accepted else { break };
        let g_new = gradient(&trial);
        // Barzilai–Borwein step from the realized displacement
        let mut ss = T::zero();
        let mut sy = T::zero();
        for i in 0..n {
            let s = trial[i] - z[i];
            let y = g_new[i] - g[i];
            ss = ss + s.norm_sqr();
            sy = sy + (s * y.conj()).re;
        }
        alpha = if sy < T::zero() { ss / -sy } else { step * lit(2.0) };
        if !(alpha.is_finite() && alpha > T::zero()) {
            alpha = step;
        }
        let improvement = ft - f;
        z = trial;
        g = g_new;
        f = ft;
        if improvement <= T::epsilon() * lit(64.0) * f.abs().max(T::one()) {
            stalled += 1;
            if stalled >= 20 {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    (z, f, iters)
}

/// Multi-start projected gradient ascent for `n` weighted Fekete points of `D̄ \ U`.
pub fn optimize<T: Real>(region: &Region<T>, n: usize, seed: u64, restarts: usize, max_iters: usize) -> Result<FeketeReport<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 points".into()));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    region.validate()?;
    if !region.fits_in_unit_disk() {
        return Err(Error::Domain("U must lie in the closed unit disk".into()));
    }
    if region.contains(Complex::new(T::zero(), T::zero())) && region.area() >= T::PI() * (T::one() - lit(1e-12)) {
        return Err(Error::Infeasible("U fills the unit disk".into()));
    }
    let runs: Vec<Result<(Vec<Cplx<T>>, T, usize)>> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
            let start = initial_configuration(region, n, &mut rng)?;
            Ok(ascend(region, start, max_iters))
        })
        .collect();
    let mut best: Option<(Vec<Cplx<T>>, T, usize)> = None;
    let mut best_so_far = Vec::with_capacity(restarts);
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.1 > b.1) {
            best = Some(run);
        }
        best_so_far.push(best.as_ref().unwrap().1);
    }
    let (points, value, iterations) = best.unwrap();
    let pairs = from_usize::<T>(n) * from_usize::<T>(n - 1) * lit(0.5);
    let r_estimate = -value / pairs;
    let min_sep = min_separation(&points);
    let config = PointConfiguration { feasible: points.iter().all(|&z| is_feasible(z, region)), points, value };
    Ok(FeketeReport {
        best: config,
        delta_n: (-r_estimate).exp(),
        r_estimate,
        min_separation: min_sep,
        restarts,
        iterations,
        best_so_far,
    })
}
