//! One-dimensional quadrature building blocks: Gauss–Legendre rules,
//! composite panels, periodic trapezoid rules and adaptive bisection.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;

use crate::scalar::{lit, Cplx, Real};

/// 2D quadrature scheme for region integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Tensor Gauss–Legendre (trapezoid in periodic angles) in shape-adapted coordinates.
    GaussLegendre,
    /// Midpoint grid over the bounding box with a membership mask.
    Midpoint,
}

/// Resolution and accuracy target for region integrals.
///
/// Integrals are evaluated at the given resolution and again at double
/// resolution; the difference is the error estimate.  Resolution keeps
/// doubling up to `max_refinements` times until the estimate is below
/// `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureRule {
    pub scheme: Scheme,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            scheme: Scheme::GaussLegendre,
            radial_nodes: 32,
            angular_nodes: 64,
            tolerance: 1e-12,
            max_refinements: 4,
        }
    }
}

impl QuadratureRule {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, ..Self::default() }
    }

    pub fn midpoint(nodes: usize, tolerance: f64) -> Self {
        Self {
            scheme: Scheme::Midpoint,
            radial_nodes: nodes,
            angular_nodes: nodes,
            tolerance,
            max_refinements: 3,
        }
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        if self.radial_nodes < 2 || self.angular_nodes < 2 {
            return Err(crate::error::Error::InvalidArgument(
                "quadrature resolution must be at least 2 per axis".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(crate::error::Error::InvalidArgument(
                "quadrature tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The same rule at `2^k` times the resolution.
    pub fn refined(&self, k: usize) -> Self {
        Self {
            radial_nodes: self.radial_nodes << k,
            angular_nodes: self.angular_nodes << k,
            ..*self
        }
    }
}

type Table = Arc<(Vec<f64>, Vec<f64>)>;

fn table_cache() -> &'static Mutex<HashMap<usize, Table>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Table>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn legendre_table(n: usize) -> Table {
    if let Some(t) = table_cache().lock().unwrap().get(&n) {
        return t.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n and its derivative.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let table = Arc::new((nodes, weights));
    table_cache().lock().unwrap().insert(n, table.clone());
    table
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let t = legendre_table(n);
    (t.0.iter().map(|&x| lit(x)).collect(), t.1.iter().map(|&w| lit(w)).collect())
}

/// `n`-point Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_on<T: Real>(a: T, b: T, n: usize) -> Vec<(T, T)> {
    let t = legendre_table(n);
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    t.0.iter()
        .zip(t.1.iter())
        .map(|(&x, &w)| (mid + half * lit::<T>(x), half * lit::<T>(w)))
        .collect()
}

/// Composite Gauss–Legendre rule with roughly `total` nodes in panels of at most
/// `order` nodes, respecting the given interior breakpoints.
pub fn composite<T: Real>(a: T, b: T, breakpoints: &[T], total: usize, order: usize) -> Vec<(T, T)> {
    let mut cuts: Vec<T> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    for &p in breakpoints {
        if p > a && p < b {
            cuts.push(p);
        }
    }
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let length = b - a;
    let order = order.max(1);
    let mut out = Vec::with_capacity(total + order * cuts.len());
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let share = ((hi - lo) / length).to_f64().unwrap() * total as f64;
        let panels = ((share / order as f64).ceil() as usize).max(1);
        let h = (hi - lo) / T::from_usize(panels).unwrap();
        for p in 0..panels {
            let pa = lo + h * T::from_usize(p).unwrap();
            out.extend(gauss_on(pa, pa + h, order));
        }
    }
    out
}

/// Periodic trapezoid rule on `[0, 1)`: exact for trigonometric polynomials of
/// degree below `n`.
pub fn periodic_trapezoid<T: Real>(n: usize) -> Vec<(T, T)> {
    let w = T::from_usize(n).unwrap().recip();
    (0..n).map(|i| (T::from_usize(i).unwrap() * w, w)).collect()
}

/// Adaptive Gauss–Legendre integration of a complex integrand on `[a, b]`.
///
/// Intervals are bisected until the 10-point panel and its two halves agree
/// to within `tol` (scaled by the panel's share of the interval).  Interior
/// breakpoints split the interval up front; integrable end-point
/// singularities converge because nodes never touch panel ends.
pub fn adaptive<T: Real, F>(f: &F, a: T, b: T, breakpoints: &[T], tol: T) -> (Cplx<T>, T)
where
    F: Fn(T) -> Cplx<T>,
{
    let mut cuts = vec![a];
    for &p in breakpoints {
        if p > a && p < b {
            cuts.push(p);
        }
    }
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut heap = BinaryHeap::new();
    let mut settled = Complex::new(T::zero(), T::zero());
    let mut settled_err = T::zero();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            heap.push(Segment::new(f, w[0], w[1], panel(f, w[0], w[1])));
        }
    }
    let mut panels = heap.len();
    let mut err: T = heap.iter().fold(T::zero(), |e, s: &Segment<T>| e + s.error);
    let mut running = heap.iter().fold(settled, |v, s: &Segment<T>| v + s.value);
    loop {
        let floor = T::epsilon() * lit(16.0) * running.norm();
        if err <= tol.max(floor) || panels >= MAX_PANELS || heap.is_empty() {
            let total = heap.iter().fold(settled, |v, s| v + s.value);
            let err = heap.iter().fold(settled_err, |e, s| e + s.error);
            return (total, err);
        }
        let worst = heap.pop().unwrap();
        err = err - worst.error;
        running = running - worst.value;
        let (lo, hi) = (worst.a, worst.b);
        // Stop before panel nodes collapse onto the endpoints in floating point.
        if hi - lo <= T::epsilon() * lit(1e4) * lo.abs().max(hi.abs()) {
            settled = settled + worst.value;
            settled_err = settled_err + worst.error;
            running = running + worst.value;
            continue;
        }
        let mid = (lo + hi) * lit(0.5);
        let l = Segment::new(f, lo, mid, worst.left);
        let r = Segment::new(f, mid, hi, worst.right);
        err = err + l.error + r.error;
        running = running + l.value + r.value;
        heap.push(l);
        heap.push(r);
        panels += 2;
    }
}

const PANEL_ORDER: usize = 10;
const MAX_PANELS: usize = 4000;

struct Segment<T: Real> {
    a: T,
    b: T,
    left: Cplx<T>,
    right: Cplx<T>,
    value: Cplx<T>,
    error: T,
}

impl<T: Real> Segment<T> {
    fn new<F: Fn(T) -> Cplx<T>>(f: &F, a: T, b: T, whole: Cplx<T>) -> Self {
        let mid = (a + b) * lit(0.5);
        let left = panel(f, a, mid);
        let right = panel(f, mid, b);
        let value = left + right;
        Segment { a, b, left, right, value, error: (value - whole).norm() }
    }
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T: Real> Eq for Segment<T> {}

impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn panel<T: Real, F: Fn(T) -> Cplx<T>>(f: &F, a: T, b: T) -> Cplx<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, w) in gauss_on(a, b, PANEL_ORDER) {
        acc = acc + f(x) * w;
    }
    acc
}

/// Real-valued convenience wrapper around [`adaptive`].
pub fn adaptive_real<T: Real, F>(f: &F, a: T, b: T, breakpoints: &[T], tol: T) -> (T, T)
where
    F: Fn(T) -> T,
{
    let g = |x: T| Complex::new(f(x), T::zero());
    let (v, e) = adaptive(&g, a, b, breakpoints, tol);
    (v.re, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let rule = gauss_on(0.0_f64, 2.0, n);
            for deg in 0..(2 * n) {
                let got: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
                let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
                assert!((got - exact).abs() < 1e-12 * exact, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_respects_breakpoints() {
        let rule = composite(0.0_f64, 1.0, &[0.3], 64, 16);
        let got: f64 = rule.iter().map(|&(x, w)| w * (x - 0.3).abs()).sum();
        assert!((got - (0.09 + 0.49) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_is_exact_for_trig_polynomials() {
        let rule = periodic_trapezoid::<f64>(32);
        let tau = std::f64::consts::TAU;
        let got: f64 = rule.iter().map(|&(t, w)| w * (tau * 5.0 * t).cos().powi(2)).sum();
        assert!((got - 0.5).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_log_endpoint_singularity() {
        // ∫_0^1 ln x dx = -1
        let (v, _) = adaptive_real(&|x: f64| x.ln(), 0.0, 1.0, &[], 1e-12);
        assert!((v + 1.0).abs() < 1e-10);
        // interior singularity flagged as a breakpoint
        let (v, _) = adaptive_real(&|x: f64| (x - 0.25).abs().ln(), 0.0, 1.0, &[0.25], 1e-12);
        let exact = 0.25 * 0.25f64.ln() - 0.25 + 0.75 * 0.75f64.ln() - 0.75;
        assert!((v - exact).abs() < 1e-10, "{v} {exact}");
    }

    #[test]
    fn single_precision_rule() {
        let rule = gauss_on(0.0_f32, 1.0, 8);
        let got: f32 = rule.iter().map(|&(x, w)| w * x * x).sum();
        assert!((got - 1.0 / 3.0).abs() < 1e-6);
    }
}
