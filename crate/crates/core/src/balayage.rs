//! Boundary densities and the numerical balayage solver.
//!
//! The balayage `ν₂` of `(1/π) m|_U` onto `∂U` is found from the moment
//! relations `∫ wⁿ dν₂ = (1/π)∫_U wⁿ dm`, completed by potential collocation
//! inside every bounded component of the complement (for an annulus all
//! moments with `n ≥ 1` vanish whatever the split between the two circles).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComponentRole, Piece, Region};
use crate::linalg::{tsvd_solve, Matrix};
use crate::potential::{area_log_potential, boundary_potential, nearest_on_piece, piece_nodes};
use crate::quadrature::QuadratureRule;
use crate::scalar::{from_usize, lit, Cplx, KahanSum, KahanSumC, Real};

/// Default number of basis modes per piece.
pub const DEFAULT_MODES: usize = 16;
/// Default highest moment order.
pub const DEFAULT_MOMENTS: usize = 48;
/// Default collocation points per bounded complement component.
pub const DEFAULT_COLLOCATION: usize = 16;
/// Residual above which a solution is flagged as not converged.
/// Distance of the exterior collocation points from `∂U`, relative to `max |z|` on `U`.
pub const EXTERIOR_OFFSET: f64 = 0.05;
pub const FEASIBILITY_THRESHOLD: f64 = 1e-3;

/// Expansion basis of a piece density `h(s)`, `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `c₀ + Σ a_k cos 2πks + b_k sin 2πks`; coefficients `(c₀, a₁, b₁, …)`.
    Fourier,
    /// `Σ d_k sin πks`; coefficients `(d₁, d₂, …)`.
    Sine,
}

/// Density of one boundary piece with respect to its local parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceDensity<T> {
    pub piece: Piece<T>,
    pub basis: Basis,
    pub coeffs: Vec<T>,
}

impl<T: Real> PieceDensity<T> {
    pub fn eval(&self, s: T) -> T {
        let mut acc = KahanSum::new();
        match self.basis {
            Basis::Fourier => {
                acc.add(self.coeffs[0]);
                let modes = (self.coeffs.len() - 1) / 2;
                for k in 1..=modes {
                    let (sn, cs) = (T::TAU() * from_usize::<T>(k) * s).sin_cos();
                    acc.add(self.coeffs[2 * k - 1] * cs + self.coeffs[2 * k] * sn);
                }
            }
            Basis::Sine => {
                for (k, &d) in self.coeffs.iter().enumerate() {
                    acc.add(d * (T::PI() * from_usize::<T>(k + 1) * s).sin());
                }
            }
        }
        acc.value()
    }

    pub fn mass(&self) -> T {
        match self.basis {
            Basis::Fourier => self.coeffs[0],
            Basis::Sine => {
                let mut acc = KahanSum::new();
                for (k, &d) in self.coeffs.iter().enumerate().step_by(2) {
                    acc.add(d * lit::<T>(2.0) / (T::PI() * from_usize::<T>(k + 1)));
                }
                acc.value()
            }
        }
    }

    fn basis_count(basis: Basis, modes: usize) -> usize {
        match basis {
            Basis::Fourier => 2 * modes + 1,
            Basis::Sine => modes,
        }
    }

    fn basis_fn(basis: Basis, j: usize, s: T) -> T {
        match basis {
            Basis::Fourier => {
                if j == 0 {
                    return T::one();
                }
                let k = from_usize::<T>(j.div_ceil(2));
                let x = T::TAU() * k * s;
                if j % 2 == 1 {
                    x.cos()
                } else {
                    x.sin()
                }
            }
            Basis::Sine => (T::PI() * from_usize::<T>(j + 1) * s).sin(),
        }
    }
}

/// Real density on `∂U`, one expansion per smooth boundary piece
/// (`dν = h(s) ds` in each piece's local parameter).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMeasure<T> {
    pub pieces: Vec<PieceDensity<T>>,
}

impl<T: Real> BoundaryMeasure<T> {
    /// Zero measure carrying the natural basis of each piece of `region`.
    pub fn zero(region: &Region<T>, modes: usize) -> Self {
        let pieces = region
            .pieces()
            .into_iter()
            .map(|piece| {
                let basis = if piece.closed { Basis::Fourier } else { Basis::Sine };
                PieceDensity { piece, basis, coeffs: vec![T::zero(); PieceDensity::<T>::basis_count(basis, modes)] }
            })
            .collect();
        Self { pieces }
    }

    /// Density constant in the parameter on every closed piece, total mass `mass`
    /// split evenly across closed pieces.
    pub fn uniform(region: &Region<T>, mass: T) -> Self {
        let mut m = Self::zero(region, 0);
        let closed = m.pieces.iter().filter(|p| p.piece.closed).count().max(1);
        for p in m.pieces.iter_mut().filter(|p| p.piece.closed) {
            p.coeffs[0] = mass / from_usize::<T>(closed);
        }
        m
    }

    pub fn density(&self, piece: usize, s: T) -> T {
        self.pieces[piece].eval(s)
    }

    pub fn total_mass(&self) -> T {
        let mut acc = KahanSum::new();
        for p in &self.pieces {
            acc.add(p.mass());
        }
        acc.value()
    }

    /// Mass carried by one boundary component.
    pub fn component_mass(&self, component: usize) -> T {
        let mut acc = KahanSum::new();
        for p in self.pieces.iter().filter(|p| p.piece.component == component) {
            acc.add(p.mass());
        }
        acc.value()
    }

    /// Share of the mass on inner (hole) components; `λ` for the annulus.
    pub fn inner_mass_fraction(&self, region: &Region<T>) -> T {
        let mut inner = KahanSum::new();
        for p in &self.pieces {
            if region.component_role(p.piece.component).ok() == Some(ComponentRole::Inner) {
                inner.add(p.mass());
            }
        }
        inner.value() / self.total_mass()
    }

    /// `∫ f dν` with `nodes` quadrature nodes per piece.
    pub fn integrate<F>(&self, region: &Region<T>, f: &F, nodes: usize) -> Cplx<T>
    where
        F: Fn(Cplx<T>) -> Cplx<T>,
    {
        let mut acc = KahanSumC::new();
        for pd in &self.pieces {
            for (s, w) in piece_nodes(&pd.piece, nodes) {
                let (z, _) = region.piece_eval(&pd.piece, s);
                acc.add(f(z) * (w * pd.eval(s)));
            }
        }
        acc.value()
    }

    pub fn integrate_real<F>(&self, region: &Region<T>, f: &F, nodes: usize) -> T
    where
        F: Fn(Cplx<T>) -> T,
    {
        self.integrate(region, &|z| Complex::new(f(z), T::zero()), nodes).re
    }

    /// Smallest density value over `samples` points per piece.
    pub fn min_density(&self, samples: usize) -> T {
        let mut m = T::infinity();
        for pd in &self.pieces {
            for i in 0..=samples {
                let s = from_usize::<T>(i) / from_usize::<T>(samples);
                m = m.min(pd.eval(s));
            }
        }
        m
    }

    /// Sup-norm distance between two densities of the same layout, sampled.
    pub fn sup_distance(&self, other: &Self, samples: usize) -> T {
        let mut m = T::zero();
        for (a, b) in self.pieces.iter().zip(&other.pieces) {
            for i in 0..samples {
                let s = (from_usize::<T>(i) + lit(0.5)) / from_usize::<T>(samples);
                m = m.max((a.eval(s) - b.eval(s)).abs());
            }
        }
        m
    }

    /// Multiplies the measure by `factor`.
    pub fn scaled_mass(&self, factor: T) -> Self {
        let mut m = self.clone();
        for p in m.pieces.iter_mut() {
            p.coeffs.iter_mut().for_each(|c| *c = *c * factor);
        }
        m
    }
}

/// `∫_{∂U} wⁿ dν(w)`.
pub fn boundary_moment<T: Real>(measure: &BoundaryMeasure<T>, region: &Region<T>, n: usize) -> Cplx<T> {
    let nodes = (4 * n + 64).max(512);
    measure.integrate(region, &|w: Cplx<T>| w.powu(n as u32), nodes)
}

/// `R_U = 3/4 + ½[∫|z|² dν₂ − (1/π)∫_U |z|² dm]`.
pub fn r_u_from_measure<T: Real>(region: &Region<T>, nu2: &BoundaryMeasure<T>, rule: &QuadratureRule) -> Result<T> {
    if region.is_empty() {
        return Ok(lit(0.75));
    }
    let expected = region.area() / T::PI();
    let found = nu2.total_mass();
    if (found - expected).abs() > lit(1e-6) {
        return Err(Error::MassMismatch {
            found: found.to_f64().unwrap_or(f64::NAN),
            expected: expected.to_f64().unwrap_or(f64::NAN),
        });
    }
    let boundary = nu2.integrate_real(region, &|z: Cplx<T>| z.norm_sqr(), 1024);
    let area = region.second_moment(rule)?;
    Ok(lit::<T>(0.75) + (boundary - area) * lit(0.5))
}

/// Solver parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalayageOptions {
    pub modes: usize,
    pub moments: usize,
    pub collocation: usize,
    pub rule: QuadratureRule,
}

impl Default for BalayageOptions {
    fn default() -> Self {
        Self {
            modes: DEFAULT_MODES,
            moments: DEFAULT_MOMENTS,
            collocation: DEFAULT_COLLOCATION,
            rule: QuadratureRule::default(),
        }
    }
}

/// Solved balayage with diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct BalayageSolution<T> {
    pub measure: BoundaryMeasure<T>,
    /// Largest mismatch `|∫wⁿdν₂ − (1/π)∫_U wⁿ dm|` over `n ≤ M`.
    pub moment_residual: T,
    /// Largest potential mismatch at the collocation points.
    pub collocation_residual: T,
    pub r_u: T,
    /// Condition number of the kept part of the least-squares system.
    pub condition: T,
    pub rank: usize,
    pub unknowns: usize,
    pub converged: bool,
}

/// Solves for `ν₂` on `∂U` with `modes` basis functions per piece, moment
/// equations up to order `moments`, and `collocation` potential-matching
/// points in each bounded complement component.
pub fn solve_balayage<T: Real>(
    region: &Region<T>,
    modes: usize,
    moments: usize,
    collocation: usize,
    rule: &QuadratureRule,
) -> Result<BalayageSolution<T>> {
    region.validate()?;
    rule.validate()?;
    if region.is_empty() {
        return Err(Error::InvalidRegion("the empty region has no boundary".into()));
    }
    if !region.closure_in_open_unit_disk() {
        return Err(Error::Domain("balayage solver needs the closure of U inside the open unit disk".into()));
    }
    if modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if moments < 2 * modes + 1 {
        return Err(Error::InvalidArgument(format!(
            "moments ({moments}) must be at least 2·modes + 1 ({})",
            2 * modes + 1
        )));
    }
    let holes = region.holes();
    if !holes.is_empty() && collocation == 0 {
        return Err(Error::InvalidArgument(
            "the complement has bounded components; collocation points are required".into(),
        ));
    }

    // Work on V = U/S so every moment row is O(1).
    let scale = region.max_modulus();
    let v = region.scaled(scale.recip());
    let template = BoundaryMeasure::zero(&v, modes);
    let mut offsets = Vec::with_capacity(template.pieces.len());
    let mut unknowns = 0;
    for p in &template.pieces {
        offsets.push(unknowns);
        unknowns += p.coeffs.len();
    }

    // Quadrature nodes and basis values per piece, shared by all rows.
    let nodes = (4 * (moments + modes) + 64).max(512);
    struct Sampled<T> {
        z: Vec<Cplx<T>>,
        w: Vec<T>,
        basis: Vec<Vec<T>>,
    }
    let sampled: Vec<Sampled<T>> = template
        .pieces
        .iter()
        .map(|pd| {
            let rule = piece_nodes(&pd.piece, nodes);
            let z = rule.iter().map(|&(s, _)| v.piece_eval(&pd.piece, s).0).collect();
            let w = rule.iter().map(|&(_, w)| w).collect();
            let basis = (0..pd.coeffs.len())
                .map(|j| rule.iter().map(|&(s, _)| PieceDensity::basis_fn(pd.basis, j, s)).collect())
                .collect();
            Sampled { z, w, basis }
        })
        .collect();

    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    let mut targets: Vec<Cplx<T>> = Vec::with_capacity(moments + 1);
    for n in 0..=moments {
        let target = v.area_moment(n, rule)?;
        targets.push(target);
        let mut re_row = vec![T::zero(); unknowns];
        let mut im_row = vec![T::zero(); unknowns];
        for (pi, sp) in sampled.iter().enumerate() {
            let pw: Vec<Cplx<T>> = sp.z.iter().map(|z| z.powu(n as u32)).collect();
            for (j, bv) in sp.basis.iter().enumerate() {
                let mut acc = KahanSumC::new();
                for q in 0..pw.len() {
                    acc.add(pw[q] * (sp.w[q] * bv[q]));
                }
                let e = acc.value();
                re_row[offsets[pi] + j] = e.re;
                im_row[offsets[pi] + j] = e.im;
            }
        }
        rows.push(re_row);
        rhs.push(target.re);
        if n > 0 {
            rows.push(im_row);
            rhs.push(target.im);
        }
    }

    let tol: T = lit(rule.tolerance);
    let mut colloc_points = Vec::new();
    // Fewer than 2N + 2 points per circle alias boundary modes onto each other.
    let per_hole = collocation.max(2 * modes + 2);
    for &(center, inradius) in &holes {
        let (c, rho) = (center / scale, inradius / scale * lit(0.5));
        for k in 0..per_hole {
            let th = T::TAU() * from_usize::<T>(k) / from_usize::<T>(per_hole);
            colloc_points.push(c + Complex::from_polar(rho, th));
        }
    }
    // Points just outside ∂U: implied by the moments in exact arithmetic, but
    // they pin the densities on straight pieces, whose polynomial moments
    // are nearly dependent.
    let offset: T = lit(EXTERIOR_OFFSET);
    let per_piece = 2 * modes + 2;
    for pd in &template.pieces {
        for j in 0..per_piece {
            let s = (from_usize::<T>(j) + lit(0.5)) / from_usize::<T>(per_piece);
            let t = pd.piece.param(s);
            let (w, _) = v.piece_eval(&pd.piece, s);
            let z = w - v.inward_normal(pd.piece.component, t)? * offset;
            if !v.contains(z) && v.boundary_distance(z) > offset * lit(0.5) {
                colloc_points.push(z);
            }
        }
    }
    let mut colloc_targets = Vec::new();
    for &z in &colloc_points {
        let mut row = vec![T::zero(); unknowns];
        for (pi, sp) in sampled.iter().enumerate() {
            let logs: Vec<T> = sp.z.iter().map(|w| -(*w - z).norm().ln()).collect();
            for (j, bv) in sp.basis.iter().enumerate() {
                let mut acc = KahanSum::new();
                for q in 0..logs.len() {
                    acc.add(logs[q] * sp.w[q] * bv[q]);
                }
                row[offsets[pi] + j] = acc.value();
            }
        }
        let target = area_log_potential(&v, z, tol) / T::PI();
        colloc_targets.push(target);
        rows.push(row);
        rhs.push(target);
    }

    // The mass row (n = 0) is imposed exactly by eliminating its largest entry.
    let mass_row = rows.remove(0);
    let mass = rhs.remove(0);
    let pivot = (0..unknowns)
        .max_by(|&i, &j| mass_row[i].abs().partial_cmp(&mass_row[j].abs()).unwrap())
        .unwrap();
    if mass_row[pivot] == T::zero() {
        return Err(Error::RankDeficient("basis carries no mass".into()));
    }
    let reduced: Vec<Vec<T>> = rows
        .iter()
        .zip(rhs.iter_mut())
        .map(|(row, b)| {
            let f = row[pivot] / mass_row[pivot];
            *b = *b - f * mass;
            (0..unknowns).filter(|&j| j != pivot).map(|j| row[j] - f * mass_row[j]).collect()
        })
        .collect();
    let cutoff = lit::<T>(1e-12).max(T::epsilon() * lit(100.0));
    let ls = if unknowns > 1 {
        Some(tsvd_solve(&Matrix::from_rows(&reduced), &rhs, cutoff)?)
    } else {
        None
    };
    let mut x = vec![T::zero(); unknowns];
    if let Some(ls) = &ls {
        let mut k = 0;
        for (j, xj) in x.iter_mut().enumerate() {
            if j != pivot {
                *xj = ls.solution[k];
                k += 1;
            }
        }
    }
    let rest: T = (0..unknowns).filter(|&j| j != pivot).map(|j| mass_row[j] * x[j]).sum();
    x[pivot] = (mass - rest) / mass_row[pivot];
    let (condition, rank) = ls.as_ref().map_or((T::one(), 1), |ls| (ls.condition, ls.rank + 1));

    let mut nu_v = template.clone();
    for (pi, pd) in nu_v.pieces.iter_mut().enumerate() {
        for j in 0..pd.coeffs.len() {
            pd.coeffs[j] = x[offsets[pi] + j];
        }
    }

    let mut moment_residual = T::zero();
    let mut power = scale * scale;
    for (n, target) in targets.iter().enumerate() {
        let m = boundary_moment(&nu_v, &v, n);
        moment_residual = moment_residual.max((m - target).norm() * power);
        power = power * scale;
    }
    let mut collocation_residual = T::zero();
    for (z, target) in colloc_points.iter().zip(&colloc_targets) {
        let p = boundary_potential(&v, &nu_v, *z, tol);
        collocation_residual = collocation_residual.max((p - *target).abs());
    }
    let s2 = scale * scale;
    collocation_residual = collocation_residual * s2;

    // Pull back to U: same parameters, mass scales by S².
    let mut measure = nu_v.scaled_mass(s2);
    for (pd, orig) in measure.pieces.iter_mut().zip(BoundaryMeasure::zero(region, modes).pieces) {
        pd.piece = orig.piece;
    }
    let r_u = r_u_from_measure(region, &measure, rule)?;
    let threshold: T = lit(FEASIBILITY_THRESHOLD);
    let converged = moment_residual <= threshold && collocation_residual <= threshold;
    Ok(BalayageSolution {
        measure,
        moment_residual,
        collocation_residual,
        r_u,
        condition,
        rank,
        unknowns,
        converged,
    })
}

/// Solves with [`BalayageOptions`].
pub fn solve_with<T: Real>(region: &Region<T>, opts: &BalayageOptions) -> Result<BalayageSolution<T>> {
    solve_balayage(region, opts.modes, opts.moments, opts.collocation, &opts.rule)
}

/// Largest `|p_{ν₂}(z) − p_{μ₂}(z)|` over test points of `U^c`, where
/// `μ₂ = (1/π) m|_U`.
pub fn potential_match_residual<T: Real>(
    measure: &BoundaryMeasure<T>,
    region: &Region<T>,
    test_points: &[Cplx<T>],
    rule: &QuadratureRule,
) -> Result<T> {
    let tol: T = lit(rule.tolerance);
    let min_gap: T = lit(1e-6);
    let pieces = region.pieces();
    let mut worst = T::zero();
    for &z in test_points {
        if region.contains(z) {
            return Err(Error::InvalidArgument(format!("test point {z} lies inside U")));
        }
        for piece in &pieces {
            if nearest_on_piece(region, piece, z).1 < min_gap {
                return Err(Error::InvalidArgument(format!("test point {z} is within 1e-6 of the boundary")));
            }
        }
        let p_nu = boundary_potential(region, measure, z, tol);
        let p_mu = area_log_potential(region, z, tol) / T::PI();
        worst = worst.max((p_nu - p_mu).abs());
    }
    Ok(worst)
}
