//! Planar regions: membership, boundary parameterizations, areas,
//! holomorphic area moments and 2D quadrature.
//!
//! All lengths are in units of the unit-disk radius.  Boundary components
//! are parameterized over `t ∈ [0, 1)` and traversed counterclockwise; a
//! component that bounds a hole carries [`ComponentRole::Inner`].

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_on, periodic_trapezoid, QuadratureRule, Scheme};
use crate::scalar::{from_usize, lit, Cplx, KahanSumC, Real};

/// Whether a boundary component encloses the region or a hole in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentRole {
    Outer,
    Inner,
}

impl ComponentRole {
    /// Sign of the component's contribution in Green-type boundary integrals.
    pub fn sign<T: Real>(self) -> T {
        match self {
            ComponentRole::Outer => T::one(),
            ComponentRole::Inner => -T::one(),
        }
    }
}

pub type CurveFn<T> = Arc<dyn Fn(T) -> (Cplx<T>, Cplx<T>) + Send + Sync>;
pub type MembershipFn<T> = Arc<dyn Fn(Cplx<T>) -> bool + Send + Sync>;

/// One closed curve of a custom boundary.
#[derive(Clone)]
pub struct CustomComponent<T> {
    /// `t ↦ (z(t), z'(t))` on `[0, 1)`, counterclockwise, 1-periodic.
    pub curve: CurveFn<T>,
    pub role: ComponentRole,
    /// Parameters where the curve is not smooth.
    pub breakpoints: Vec<T>,
}

/// Region given by parameterized boundary curves plus a membership oracle.
#[derive(Clone)]
pub struct CustomBoundary<T> {
    pub components: Vec<CustomComponent<T>>,
    pub membership: MembershipFn<T>,
    /// A point of the region, used as the reference for ray searches.
    pub anchor: Cplx<T>,
    /// Bounded components of the complement, each as (interior point, radius of
    /// a disk around it that stays in the complement).
    pub holes: Vec<(Cplx<T>, T)>,
}

impl<T: Real> CustomBoundary<T> {
    /// Curves given by finite Fourier series `z(t) = Σ c_k e^{2πikt}`.
    ///
    /// Membership is decided by the winding number of a fine polygonal
    /// approximation (outer components count +1, inner ones −1).
    pub fn fourier(
        components: Vec<(Vec<(i64, Cplx<T>)>, ComponentRole)>,
        anchor: Cplx<T>,
        holes: Vec<(Cplx<T>, T)>,
    ) -> Self {
        let tau = T::TAU();
        let mut comps = Vec::new();
        let mut samples: Vec<(Vec<Cplx<T>>, ComponentRole)> = Vec::new();
        for (coef, role) in components {
            let coef = Arc::new(coef);
            let c2 = coef.clone();
            let curve: CurveFn<T> = Arc::new(move |t: T| {
                let mut z = Complex::new(T::zero(), T::zero());
                let mut dz = Complex::new(T::zero(), T::zero());
                for &(k, c) in c2.iter() {
                    let kk: T = lit(k as f64);
                    let e = Complex::from_polar(T::one(), tau * kk * t);
                    z = z + c * e;
                    dz = dz + c * e * Complex::new(T::zero(), tau * kk);
                }
                (z, dz)
            });
            let pts = (0..2048).map(|i| curve(from_usize::<T>(i) / lit(2048.0)).0).collect();
            samples.push((pts, role));
            comps.push(CustomComponent { curve, role, breakpoints: Vec::new() });
        }
        let samples = Arc::new(samples);
        let membership: MembershipFn<T> = Arc::new(move |z: Cplx<T>| {
            let mut wind = 0i64;
            for (pts, role) in samples.iter() {
                let w = winding_number(pts, z);
                wind += match role {
                    ComponentRole::Outer => w,
                    ComponentRole::Inner => -w,
                };
            }
            wind > 0
        });
        Self { components: comps, membership, anchor, holes }
    }
}

fn winding_number<T: Real>(pts: &[Cplx<T>], z: Cplx<T>) -> i64 {
    let mut w = 0i64;
    for i in 0..pts.len() {
        let a = pts[i] - z;
        let b = pts[(i + 1) % pts.len()] - z;
        if a.im <= T::zero() {
            if b.im > T::zero() && cross(a, b) > T::zero() {
                w += 1;
            }
        } else if b.im <= T::zero() && cross(a, b) < T::zero() {
            w -= 1;
        }
    }
    w
}

#[inline]
fn cross<T: Real>(a: Cplx<T>, b: Cplx<T>) -> T {
    a.re * b.im - a.im * b.re
}

/// Planar domain descriptor.
#[derive(Clone)]
pub enum Region<T> {
    /// No hole at all.
    Empty,
    Disk { center: Cplx<T>, radius: T },
    /// `{inner < |z| < outer}`.
    Annulus { inner: T, outer: T },
    /// `{(x/semi_x)² + (y/semi_y)² < 1}`.
    Ellipse { semi_x: T, semi_y: T },
    /// `{r e^{iθ} : r < b(1 + 2a cos θ)}` with `0 < a ≤ 1/2`.
    Cardioid { a: T, b: T },
    /// Simple polygon, counterclockwise, star-shaped about its vertex centroid.
    Polygon { vertices: Vec<Cplx<T>> },
    /// Upper half of the disk of the given radius about 0.
    HalfDisk { radius: T },
    Custom(CustomBoundary<T>),
}

impl<T: Real> fmt::Debug for Region<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Empty => write!(f, "Empty"),
            Region::Disk { center, radius } => write!(f, "Disk({center}, {radius})"),
            Region::Annulus { inner, outer } => write!(f, "Annulus({inner}, {outer})"),
            Region::Ellipse { semi_x, semi_y } => write!(f, "Ellipse({semi_x}, {semi_y})"),
            Region::Cardioid { a, b } => write!(f, "Cardioid(a={a}, b={b})"),
            Region::Polygon { vertices } => f.debug_tuple("Polygon").field(vertices).finish(),
            Region::HalfDisk { radius } => write!(f, "HalfDisk({radius})"),
            Region::Custom(c) => write!(f, "Custom({} components)", c.components.len()),
        }
    }
}

/// Disjoint annular bands `(inner, outer)` whose union is a rotation-invariant region.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RadialDecomposition<T> {
    pub bands: Vec<(T, T)>,
}

/// Smooth stretch of a boundary component, `t ∈ [t0, t1)`.
///
/// `closed` pieces cover a whole smooth component and are periodic in the
/// local parameter; open pieces end at corners.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Piece<T> {
    pub component: usize,
    pub t0: T,
    pub t1: T,
    pub closed: bool,
}

impl<T: Real> Piece<T> {
    #[inline]
    pub fn param(&self, s: T) -> T {
        self.t0 + s * (self.t1 - self.t0)
    }
}

/// Value of a region integral with its resolution-doubling error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: Cplx<T>,
    pub error: T,
}

impl<T: Real> Region<T> {
    pub fn disk(center: Cplx<T>, radius: T) -> Result<Self> {
        let r = Region::Disk { center, radius };
        r.validate()?;
        Ok(r)
    }

    pub fn centered_disk(radius: T) -> Result<Self> {
        Self::disk(Complex::new(T::zero(), T::zero()), radius)
    }

    pub fn annulus(inner: T, outer: T) -> Result<Self> {
        let r = Region::Annulus { inner, outer };
        r.validate()?;
        Ok(r)
    }

    pub fn ellipse(semi_x: T, semi_y: T) -> Result<Self> {
        let r = Region::Ellipse { semi_x, semi_y };
        r.validate()?;
        Ok(r)
    }

    pub fn cardioid(a: T, b: T) -> Result<Self> {
        let r = Region::Cardioid { a, b };
        r.validate()?;
        Ok(r)
    }

    pub fn half_disk(radius: T) -> Result<Self> {
        let r = Region::HalfDisk { radius };
        r.validate()?;
        Ok(r)
    }

    /// Polygon from vertices in either orientation; stored counterclockwise.
    pub fn polygon(mut vertices: Vec<Cplx<T>>) -> Result<Self> {
        if vertices.len() >= 3 && signed_area(&vertices) < T::zero() {
            vertices.reverse();
        }
        let r = Region::Polygon { vertices };
        r.validate()?;
        Ok(r)
    }

    /// The triangle `a·T` with vertices at `a`, `aω`, `aω²` (ω a cube root of unity).
    pub fn equilateral_triangle(a: T) -> Result<Self> {
        let vertices = (0..3)
            .map(|p| Complex::from_polar(a, T::TAU() * from_usize::<T>(p) / lit(3.0)))
            .collect();
        Self::polygon(vertices)
    }

    /// Checks the shape invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidRegion(m.to_string()));
        let finite = |x: T| x.is_finite();
        match self {
            Region::Empty => Ok(()),
            Region::Disk { center, radius } => {
                if !(finite(center.re) && finite(center.im) && finite(*radius) && *radius > T::zero()) {
                    return bad("disk radius must be positive and finite");
                }
                Ok(())
            }
            Region::Annulus { inner, outer } => {
                if !(finite(*outer) && *inner > T::zero() && inner < outer) {
                    return bad("annulus requires 0 < inner < outer");
                }
                Ok(())
            }
            Region::Ellipse { semi_x, semi_y } => {
                if !(finite(*semi_x) && finite(*semi_y) && *semi_x > T::zero() && *semi_y > T::zero()) {
                    return bad("ellipse semi-axes must be positive");
                }
                Ok(())
            }
            Region::Cardioid { a, b } => {
                if !(finite(*a) && finite(*b) && *a > T::zero() && *b > T::zero()) {
                    return bad("cardioid requires a, b > 0");
                }
                if *a > lit(0.5) {
                    return bad("cardioid requires a <= 1/2 (the polar radius b(1+2a cos θ) must stay non-negative)");
                }
                Ok(())
            }
            Region::HalfDisk { radius } => {
                if !(finite(*radius) && *radius > T::zero()) {
                    return bad("half-disk radius must be positive");
                }
                Ok(())
            }
            Region::Polygon { vertices } => validate_polygon(vertices),
            Region::Custom(c) => {
                if c.components.is_empty() {
                    return bad("custom boundary needs at least one component");
                }
                if !c.components.iter().any(|k| k.role == ComponentRole::Outer) {
                    return bad("custom boundary needs an outer component");
                }
                if !(c.membership)(c.anchor) {
                    return bad("custom anchor must lie in the region");
                }
                Ok(())
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Empty)
    }

    /// Short shape tag.
    pub fn shape_name(&self) -> &'static str {
        match self {
            Region::Empty => "empty",
            Region::Disk { .. } => "disk",
            Region::Annulus { .. } => "annulus",
            Region::Ellipse { .. } => "ellipse",
            Region::Cardioid { .. } => "cardioid",
            Region::Polygon { .. } => "polygon",
            Region::HalfDisk { .. } => "half_disk",
            Region::Custom(_) => "custom",
        }
    }

    /// True iff `z` lies in the open region.
    pub fn contains(&self, z: Cplx<T>) -> bool {
        // Points within a few ulps of the boundary count as boundary points.
        let shrink = T::one() - T::epsilon() * lit(8.0);
        let grow = T::one() + T::epsilon() * lit(8.0);
        match self {
            Region::Empty => false,
            Region::Disk { center, radius } => (z - center).norm() < *radius * shrink,
            Region::Annulus { inner, outer } => {
                let r = z.norm();
                r > *inner * grow && r < *outer * shrink
            }
            Region::Ellipse { semi_x, semi_y } => {
                let u = z.re / *semi_x;
                let v = z.im / *semi_y;
                u * u + v * v < shrink * shrink
            }
            Region::Cardioid { a, b } => {
                let r = z.norm();
                if r == T::zero() {
                    return true;
                }
                r < *b * (T::one() + lit::<T>(2.0) * *a * (z.re / r)) * shrink
            }
            Region::HalfDisk { radius } => {
                z.im > *radius * T::epsilon() * lit(8.0) && z.norm() < *radius * shrink
            }
            Region::Polygon { vertices } => {
                let scale = vertices.iter().map(|v| v.norm()).fold(T::zero(), T::max);
                let eps = T::epsilon() * lit(64.0) * scale.max(T::one());
                let n = vertices.len();
                for i in 0..n {
                    if segment_distance(z, vertices[i], vertices[(i + 1) % n]) <= eps {
                        return false;
                    }
                }
                winding_number(vertices, z) != 0
            }
            Region::Custom(c) => (c.membership)(z),
        }
    }

    pub fn component_count(&self) -> usize {
        match self {
            Region::Empty => 0,
            Region::Annulus { .. } => 2,
            Region::Custom(c) => c.components.len(),
            _ => 1,
        }
    }

    pub fn component_role(&self, component: usize) -> Result<ComponentRole> {
        self.check_component(component)?;
        Ok(match self {
            Region::Annulus { .. } if component == 1 => ComponentRole::Inner,
            Region::Custom(c) => c.components[component].role,
            _ => ComponentRole::Outer,
        })
    }

    fn check_component(&self, component: usize) -> Result<()> {
        let count = self.component_count();
        if component >= count {
            return Err(Error::InvalidComponent { index: component, count });
        }
        Ok(())
    }

    /// Boundary point and derivative with respect to `t` (one-sided from the
    /// right at corners).
    pub fn boundary_eval(&self, component: usize, t: T) -> Result<(Cplx<T>, Cplx<T>)> {
        self.check_component(component)?;
        let t = t - t.floor();
        let tau = T::TAU();
        let i = Complex::new(T::zero(), T::one());
        Ok(match self {
            Region::Empty => unreachable!(),
            Region::Disk { center, radius } => {
                let e = Complex::from_polar(*radius, tau * t);
                (center + e, e * i * tau)
            }
            Region::Annulus { inner, outer } => {
                let rad = if component == 0 { *outer } else { *inner };
                let e = Complex::from_polar(rad, tau * t);
                (e, e * i * tau)
            }
            Region::Ellipse { semi_x, semi_y } => {
                let (s, c) = (tau * t).sin_cos();
                (
                    Complex::new(*semi_x * c, *semi_y * s),
                    Complex::new(-*semi_x * s, *semi_y * c) * tau,
                )
            }
            Region::Cardioid { a, b } => {
                let th = tau * t;
                let two: T = lit(2.0);
                let rr = *b * (T::one() + two * *a * th.cos());
                let dr = -two * *a * *b * th.sin();
                let e = Complex::from_polar(T::one(), th);
                (e * rr, e * Complex::new(dr, rr) * tau)
            }
            Region::Polygon { vertices } => {
                let n = vertices.len();
                let x = t * from_usize::<T>(n);
                let p = x.floor().to_usize().unwrap_or(0).min(n - 1);
                let s = x - from_usize::<T>(p);
                let (v0, v1) = (vertices[p], vertices[(p + 1) % n]);
                (v0 * (T::one() - s) + v1 * s, (v1 - v0) * from_usize::<T>(n))
            }
            Region::HalfDisk { radius } => {
                let two: T = lit(2.0);
                if t < lit(0.5) {
                    let s = two * t;
                    (Complex::new(*radius * (two * s - T::one()), T::zero()), Complex::new(two * two * *radius, T::zero()))
                } else {
                    let s = two * t - T::one();
                    let e = Complex::from_polar(*radius, T::PI() * s);
                    (e, e * i * T::PI() * two)
                }
            }
            Region::Custom(c) => (c.components[component].curve)(t),
        })
    }

    /// Boundary point and speed `|dz/dt|`.
    pub fn boundary_point(&self, component: usize, t: T) -> Result<(Cplx<T>, T)> {
        let (z, dz) = self.boundary_eval(component, t)?;
        Ok((z, dz.norm()))
    }

    /// Parameter values in `[0, 1)` of corners on a component.
    pub fn breakpoints(&self, component: usize) -> Result<Vec<T>> {
        self.check_component(component)?;
        Ok(match self {
            Region::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).map(|p| from_usize::<T>(p) / from_usize::<T>(n)).collect()
            }
            Region::HalfDisk { .. } => vec![T::zero(), lit(0.5)],
            Region::Custom(c) => c.components[component].breakpoints.clone(),
            _ => Vec::new(),
        })
    }

    /// Smooth boundary pieces, ordered by component then parameter.
    pub fn pieces(&self) -> Vec<Piece<T>> {
        let mut out = Vec::new();
        for c in 0..self.component_count() {
            let mut bp = self.breakpoints(c).unwrap_or_default();
            bp.iter_mut().for_each(|t| *t = *t - t.floor());
            bp.sort_by(|x, y| x.partial_cmp(y).unwrap());
            bp.dedup();
            if bp.is_empty() {
                out.push(Piece { component: c, t0: T::zero(), t1: T::one(), closed: true });
                continue;
            }
            for k in 0..bp.len() {
                let t0 = bp[k];
                let t1 = if k + 1 < bp.len() { bp[k + 1] } else { bp[0] + T::one() };
                out.push(Piece { component: c, t0, t1, closed: false });
            }
        }
        out
    }

    /// Point and derivative with respect to the local parameter `s ∈ [0, 1]` of a piece.
    pub fn piece_eval(&self, piece: &Piece<T>, s: T) -> (Cplx<T>, Cplx<T>) {
        let t = piece.param(s);
        let (z, dz) = self
            .boundary_eval(piece.component, t)
            .expect("piece component in range");
        // Use the left limit of the derivative at the closing end of an open piece.
        let dz = if !piece.closed && s >= T::one() {
            self.boundary_eval(piece.component, t - T::epsilon() * lit(8.0)).unwrap().1
        } else {
            dz
        };
        (z, dz * (piece.t1 - piece.t0))
    }

    /// Lebesgue area.
    pub fn area(&self) -> T {
        let pi = T::PI();
        match self {
            Region::Empty => T::zero(),
            Region::Disk { radius, .. } => pi * *radius * *radius,
            Region::Annulus { inner, outer } => pi * (*outer * *outer - *inner * *inner),
            Region::Ellipse { semi_x, semi_y } => pi * *semi_x * *semi_y,
            Region::Cardioid { a, b } => pi * *b * *b * (T::one() + lit::<T>(2.0) * *a * *a),
            Region::HalfDisk { radius } => pi * *radius * *radius * lit(0.5),
            Region::Polygon { vertices } => signed_area(vertices).abs(),
            Region::Custom(_) => {
                // Green: area = (1/2) Σ sign ∮ Im(z̄ dz)
                self.green_boundary_integral(|z, dz| Complex::new((z.conj() * dz).im * lit(0.5), T::zero()), 2048)
                    .re
            }
        }
    }

    /// `∮_{∂U} f(z, dz/dt) dt` over all components with role signs, using a
    /// periodic trapezoid rule per smooth piece (Gauss–Legendre on open pieces).
    pub fn green_boundary_integral<F>(&self, f: F, nodes: usize) -> Cplx<T>
    where
        F: Fn(Cplx<T>, Cplx<T>) -> Cplx<T>,
    {
        let mut acc = KahanSumC::new();
        for piece in self.pieces() {
            let sign: T = self.component_role(piece.component).unwrap().sign();
            let rule: Vec<(T, T)> = if piece.closed {
                periodic_trapezoid(nodes)
            } else {
                crate::quadrature::composite(T::zero(), T::one(), &[], nodes, 16)
            };
            for (s, w) in rule {
                let (z, dz) = self.piece_eval(&piece, s);
                acc.add(f(z, dz) * (w * sign));
            }
        }
        acc.value()
    }

    /// Largest modulus of a point of the closure.
    pub fn max_modulus(&self) -> T {
        match self {
            Region::Empty => T::zero(),
            Region::Disk { center, radius } => center.norm() + *radius,
            Region::Annulus { outer, .. } => *outer,
            Region::Ellipse { semi_x, semi_y } => semi_x.max(*semi_y),
            Region::Cardioid { a, b } => *b * (T::one() + lit::<T>(2.0) * *a),
            Region::HalfDisk { radius } => *radius,
            Region::Polygon { vertices } => vertices.iter().map(|v| v.norm()).fold(T::zero(), T::max),
            Region::Custom(c) => {
                let mut m = T::zero();
                for comp in &c.components {
                    for i in 0..4096 {
                        let (z, _) = (comp.curve)(from_usize::<T>(i) / lit(4096.0));
                        m = m.max(z.norm());
                    }
                }
                m
            }
        }
    }

    /// Whether the closure lies in the closed unit disk.
    pub fn fits_in_unit_disk(&self) -> bool {
        self.max_modulus() <= T::one()
    }

    /// Whether the closure lies in the open unit disk.
    pub fn closure_in_open_unit_disk(&self) -> bool {
        self.max_modulus() < T::one()
    }

    /// The dilation `s·U`.
    pub fn scaled(&self, s: T) -> Region<T> {
        match self {
            Region::Empty => Region::Empty,
            Region::Disk { center, radius } => Region::Disk { center: center * s, radius: *radius * s },
            Region::Annulus { inner, outer } => Region::Annulus { inner: *inner * s, outer: *outer * s },
            Region::Ellipse { semi_x, semi_y } => Region::Ellipse { semi_x: *semi_x * s, semi_y: *semi_y * s },
            Region::Cardioid { a, b } => Region::Cardioid { a: *a, b: *b * s },
            Region::HalfDisk { radius } => Region::HalfDisk { radius: *radius * s },
            Region::Polygon { vertices } => Region::Polygon { vertices: vertices.iter().map(|v| v * s).collect() },
            Region::Custom(c) => {
                let components = c
                    .components
                    .iter()
                    .map(|k| {
                        let f = k.curve.clone();
                        CustomComponent {
                            curve: Arc::new(move |t| {
                                let (z, dz) = f(t);
                                (z * s, dz * s)
                            }),
                            role: k.role,
                            breakpoints: k.breakpoints.clone(),
                        }
                    })
                    .collect();
                let m = c.membership.clone();
                CustomBoundary {
                    components,
                    membership: Arc::new(move |z| m(z / s)),
                    anchor: c.anchor * s,
                    holes: c.holes.iter().map(|&(h, r)| (h * s, r * s)).collect(),
                }
                .into()
            }
        }
    }

    /// Bands when the region is rotation-invariant about the origin.
    pub fn radial_decomposition(&self) -> Option<RadialDecomposition<T>> {
        match self {
            Region::Empty => Some(RadialDecomposition { bands: Vec::new() }),
            Region::Disk { center, radius } if center.norm() == T::zero() => {
                Some(RadialDecomposition { bands: vec![(T::zero(), *radius)] })
            }
            Region::Annulus { inner, outer } => Some(RadialDecomposition { bands: vec![(*inner, *outer)] }),
            _ => None,
        }
    }

    /// Bounded components of the complement as (interior point, inradius about it).
    pub fn holes(&self) -> Vec<(Cplx<T>, T)> {
        match self {
            Region::Annulus { inner, .. } => vec![(Complex::new(T::zero(), T::zero()), *inner)],
            Region::Custom(c) => c.holes.clone(),
            _ => Vec::new(),
        }
    }

    /// Largest `ε` such that every boundary point touches a closed ball of
    /// radius `ε` inside the complement.  `Some(∞)` for convex shapes, `None`
    /// when no positive radius works (reflex corners, cusps) or when it is
    /// unknown (custom boundaries).
    pub fn exterior_ball_radius(&self) -> Option<T> {
        match self {
            Region::Empty => Some(T::infinity()),
            Region::Disk { .. } | Region::Ellipse { .. } | Region::HalfDisk { .. } => Some(T::infinity()),
            Region::Annulus { inner, .. } => Some(*inner),
            Region::Polygon { vertices } => {
                let n = vertices.len();
                let convex = (0..n).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let c = vertices[(i + 2) % n];
                    cross(b - a, c - b) >= T::zero()
                });
                if convex {
                    Some(T::infinity())
                } else {
                    None
                }
            }
            Region::Cardioid { a, b } => {
                if *a >= lit(0.5) {
                    return None;
                }
                // Signed curvature of the polar curve; concave stretches limit ε.
                let mut worst = T::zero();
                for i in 0..4096 {
                    let th = T::TAU() * from_usize::<T>(i) / lit(4096.0);
                    let two: T = lit(2.0);
                    let r = *b * (T::one() + two * *a * th.cos());
                    let dr = -two * *a * *b * th.sin();
                    let ddr = -two * *a * *b * th.cos();
                    let kappa = (r * r + two * dr * dr - r * ddr) / (r * r + dr * dr).powf(lit(1.5));
                    worst = worst.max(-kappa);
                }
                if worst > T::zero() {
                    Some(worst.recip())
                } else {
                    Some(T::infinity())
                }
            }
            Region::Custom(_) => None,
        }
    }

    /// Radial intervals `{ρ ≥ 0 : ρ e^{iθ} ∈ U}`, sorted and disjoint.
    pub fn ray_intervals(&self, theta: T) -> Vec<(T, T)> {
        let dir = Complex::from_polar(T::one(), theta);
        let zero = T::zero();
        match self {
            Region::Empty => Vec::new(),
            Region::Disk { center, radius } => {
                // |ρ d − c|² = a²  ⇔  ρ² − 2ρ Re(c̄ d) + |c|² − a² = 0
                let bq = (center.conj() * dir).re;
                let cq = center.norm_sqr() - *radius * *radius;
                let disc = bq * bq - cq;
                if disc <= zero {
                    return Vec::new();
                }
                let sq = disc.sqrt();
                let hi = bq + sq;
                if hi <= zero {
                    return Vec::new();
                }
                // Stable smaller root.
                let lo = if cq <= zero { zero } else { cq / hi };
                vec![(lo, hi)]
            }
            Region::Annulus { inner, outer } => vec![(*inner, *outer)],
            Region::Ellipse { semi_x, semi_y } => {
                let u = dir.re / *semi_x;
                let v = dir.im / *semi_y;
                vec![(zero, (u * u + v * v).sqrt().recip())]
            }
            Region::Cardioid { a, b } => {
                let r = *b * (T::one() + lit::<T>(2.0) * *a * theta.cos());
                if r > zero {
                    vec![(zero, r)]
                } else {
                    Vec::new()
                }
            }
            Region::HalfDisk { radius } => {
                if theta.sin() > zero {
                    vec![(zero, *radius)]
                } else {
                    Vec::new()
                }
            }
            Region::Polygon { vertices } => {
                let n = vertices.len();
                let mut cuts = vec![zero];
                for i in 0..n {
                    let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                    let e = q - p;
                    let den = cross(dir, e);
                    if den == zero {
                        continue;
                    }
                    // ρ d = p + s e
                    let rho = cross(p, e) / den;
                    let s = cross(p, dir) / den;
                    if rho > zero && s >= zero && s <= T::one() {
                        cuts.push(rho);
                    }
                }
                self.intervals_from_cuts(dir, cuts)
            }
            Region::Custom(_) => {
                let far = self.max_modulus() * lit(1.0001);
                let m = 512;
                let mut cuts = vec![zero];
                let mut prev = self.contains(Complex::new(zero, zero));
                for k in 1..=m {
                    let rho = far * from_usize::<T>(k) / from_usize::<T>(m);
                    let now = self.contains(dir * rho);
                    if now != prev {
                        let (mut lo, mut hi) = (far * from_usize::<T>(k - 1) / from_usize::<T>(m), rho);
                        for _ in 0..60 {
                            let mid = (lo + hi) * lit(0.5);
                            if self.contains(dir * mid) == prev {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        cuts.push((lo + hi) * lit(0.5));
                        prev = now;
                    }
                }
                self.intervals_from_cuts(dir, cuts)
            }
        }
    }

    fn intervals_from_cuts(&self, dir: Cplx<T>, mut cuts: Vec<T>) -> Vec<(T, T)> {
        cuts.push(self.max_modulus() * lit(2.0) + T::one());
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut out: Vec<(T, T)> = Vec::new();
        for w in cuts.windows(2) {
            let mid = (w[0] + w[1]) * lit(0.5);
            if self.contains(dir * mid) {
                match out.last_mut() {
                    Some(last) if last.1 == w[0] => last.1 = w[1],
                    _ => out.push((w[0], w[1])),
                }
            }
        }
        out
    }

    /// Angles in `[0, 2π)` where [`Region::ray_intervals`] fails to be smooth in θ.
    pub fn angular_breakpoints(&self) -> Vec<T> {
        let tau = T::TAU();
        let wrap = |x: T| {
            let y = x - (x / tau).floor() * tau;
            if y >= tau {
                y - tau
            } else {
                y
            }
        };
        let mut out = match self {
            Region::Disk { center, radius } => {
                let d = center.norm();
                if d > *radius {
                    let half = (*radius / d).asin();
                    vec![wrap(center.arg() - half), wrap(center.arg() + half)]
                } else if d == *radius {
                    let h = T::FRAC_PI_2();
                    vec![wrap(center.arg() - h), wrap(center.arg() + h)]
                } else {
                    Vec::new()
                }
            }
            Region::HalfDisk { .. } => vec![T::zero(), T::PI()],
            Region::Polygon { vertices } => vertices
                .iter()
                .filter(|v| v.norm() > T::zero())
                .map(|v| wrap(v.arg()))
                .collect(),
            _ => Vec::new(),
        };
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup();
        out
    }

    /// Complex integral `∫_U f dm` with an error estimate from resolution doubling.
    pub fn integrate<F>(&self, f: F, rule: &QuadratureRule) -> Result<Integral<T>>
    where
        F: Fn(Cplx<T>) -> Cplx<T>,
    {
        rule.validate()?;
        if self.is_empty() {
            return Ok(Integral { value: Complex::new(T::zero(), T::zero()), error: T::zero() });
        }
        let tol: T = lit(rule.tolerance);
        let mut coarse = self.integrate_at(&f, rule)?;
        let mut estimate = T::infinity();
        for k in 1..=rule.max_refinements.max(1) {
            let fine = self.integrate_at(&f, &rule.refined(k))?;
            estimate = (fine - coarse).norm();
            if estimate <= tol {
                return Ok(Integral { value: fine, error: estimate });
            }
            coarse = fine;
        }
        Err(Error::NonConvergence {
            what: format!("quadrature over {}", self.shape_name()),
            achieved: estimate.to_f64().unwrap_or(f64::NAN),
            target: rule.tolerance,
        })
    }

    /// One tensor-rule evaluation at fixed resolution.
    fn integrate_at<F>(&self, f: &F, rule: &QuadratureRule) -> Result<Cplx<T>>
    where
        F: Fn(Cplx<T>) -> Cplx<T>,
    {
        let (nr, na) = (rule.radial_nodes, rule.angular_nodes);
        if rule.scheme == Scheme::Midpoint || matches!(self, Region::Custom(_)) {
            return Ok(self.midpoint_grid(f, nr.max(na)));
        }
        let zero = T::zero();
        let mut acc = KahanSumC::new();
        let tau = T::TAU();
        match self {
            Region::Empty | Region::Custom(_) => {}
            Region::Disk { center, radius } => {
                polar(&mut acc, f, *center, zero, *radius, nr, na);
            }
            Region::Annulus { inner, outer } => {
                polar(&mut acc, f, Complex::new(zero, zero), *inner, *outer, nr, na);
            }
            Region::Ellipse { semi_x, semi_y } => {
                let ang = periodic_trapezoid::<T>(na);
                let rad = gauss_on(zero, T::one(), nr);
                for &(t, wt) in &ang {
                    let (s, c) = (tau * t).sin_cos();
                    let e = Complex::new(*semi_x * c, *semi_y * s);
                    for &(rho, wr) in &rad {
                        acc.add(f(e * rho) * (wt * tau * wr * rho * *semi_x * *semi_y));
                    }
                }
            }
            Region::Cardioid { a, b } => {
                let ang = periodic_trapezoid::<T>(na);
                let rad = gauss_on(zero, T::one(), nr);
                for &(t, wt) in &ang {
                    let th = tau * t;
                    let big_r = *b * (T::one() + lit::<T>(2.0) * *a * th.cos());
                    let e = Complex::from_polar(big_r, th);
                    for &(u, wu) in &rad {
                        acc.add(f(e * u) * (wt * tau * wu * u * big_r * big_r));
                    }
                }
            }
            Region::HalfDisk { radius } => {
                let ang = gauss_on(zero, T::PI(), na);
                let rad = gauss_on(zero, *radius, nr);
                for &(th, wt) in &ang {
                    let e = Complex::from_polar(T::one(), th);
                    for &(rho, wr) in &rad {
                        acc.add(f(e * rho) * (wt * wr * rho));
                    }
                }
            }
            Region::Polygon { vertices } => {
                let n = vertices.len();
                let c = vertices.iter().fold(Complex::new(zero, zero), |s, v| s + v) / from_usize::<T>(n);
                let gu = gauss_on(zero, T::one(), nr);
                let gw = gauss_on(zero, T::one(), na);
                for p in 0..n {
                    let e0 = vertices[p] - c;
                    let e1 = vertices[(p + 1) % n] - c;
                    let jac = cross(e0, e1).abs();
                    for &(w, ww) in &gw {
                        let edge = e0 * (T::one() - w) + e1 * w;
                        for &(u, wu) in &gu {
                            acc.add(f(c + edge * u) * (ww * wu * u * jac));
                        }
                    }
                }
            }
        }
        Ok(acc.value())
    }

    fn midpoint_grid<F>(&self, f: &F, n: usize) -> Cplx<T>
    where
        F: Fn(Cplx<T>) -> Cplx<T>,
    {
        let (lo, hi) = self.bounding_box();
        let hx = (hi.re - lo.re) / from_usize::<T>(n);
        let hy = (hi.im - lo.im) / from_usize::<T>(n);
        let half: T = lit(0.5);
        let mut acc = KahanSumC::new();
        for i in 0..n {
            let x = lo.re + (from_usize::<T>(i) + half) * hx;
            for j in 0..n {
                let z = Complex::new(x, lo.im + (from_usize::<T>(j) + half) * hy);
                if self.contains(z) {
                    acc.add(f(z) * (hx * hy));
                }
            }
        }
        acc.value()
    }

    /// Axis-aligned bounding box `(lower-left, upper-right)`.
    pub fn bounding_box(&self) -> (Cplx<T>, Cplx<T>) {
        let m = self.max_modulus();
        match self {
            Region::Disk { center, radius } => (
                Complex::new(center.re - *radius, center.im - *radius),
                Complex::new(center.re + *radius, center.im + *radius),
            ),
            Region::Ellipse { semi_x, semi_y } => (Complex::new(-*semi_x, -*semi_y), Complex::new(*semi_x, *semi_y)),
            Region::HalfDisk { radius } => (Complex::new(-*radius, T::zero()), Complex::new(*radius, *radius)),
            Region::Polygon { vertices } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo = Complex::new(lo.re.min(v.re), lo.im.min(v.im));
                    hi = Complex::new(hi.re.max(v.re), hi.im.max(v.im));
                }
                (lo, hi)
            }
            _ => (Complex::new(-m, -m), Complex::new(m, m)),
        }
    }

    /// `(1/π)∫_U wⁿ dm(w)`.
    ///
    /// Evaluated on the normalized region `U/s` (`s` the largest modulus) and
    /// rescaled by `s^{n+2}`, so the tolerance applies at unit scale.
    /// Custom regions use the boundary form `(1/2i)∮ w̄ wⁿ dw`.
    pub fn area_moment(&self, n: usize, rule: &QuadratureRule) -> Result<Cplx<T>> {
        if self.is_empty() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        match self {
            // mean value property
            Region::Disk { center, radius } => return Ok(center.powu(n as u32) * *radius * *radius),
            Region::Annulus { inner, outer } => {
                let m = if n == 0 { *outer * *outer - *inner * *inner } else { T::zero() };
                return Ok(Complex::new(m, T::zero()));
            }
            _ => {}
        }
        let s = self.max_modulus();
        let unit = self.scaled(s.recip());
        let v = if let Region::Custom(_) = unit {
            unit.green_moment(n, rule)?
        } else {
            // wⁿ has degree n radially and frequency n in angle
            let sized = QuadratureRule {
                radial_nodes: rule.radial_nodes.max(n / 2 + 16),
                angular_nodes: rule.angular_nodes.max(2 * n + 32),
                ..*rule
            };
            unit.integrate(|w| w.powu(n as u32), &sized)?.value
        };
        Ok(v * s.powi(n as i32 + 2) / T::PI())
    }

    /// `∫_U wⁿ dm` through Green's theorem, with node doubling until converged.
    pub fn green_moment(&self, n: usize, rule: &QuadratureRule) -> Result<Cplx<T>> {
        let half_i = Complex::new(T::zero(), lit::<T>(-0.5));
        let eval = |nodes: usize| {
            self.green_boundary_integral(|z, dz| z.conj() * z.powu(n as u32) * dz, nodes) * half_i
        };
        let tol: T = lit(rule.tolerance);
        let mut nodes = (rule.angular_nodes * 4).max(2 * n + 32);
        let mut coarse = eval(nodes);
        let mut estimate = T::infinity();
        for _ in 0..=rule.max_refinements.max(1) + 2 {
            nodes *= 2;
            let fine = eval(nodes);
            estimate = (fine - coarse).norm();
            if estimate <= tol {
                return Ok(fine);
            }
            coarse = fine;
        }
        Err(Error::NonConvergence {
            what: "boundary moment".into(),
            achieved: estimate.to_f64().unwrap_or(f64::NAN),
            target: rule.tolerance,
        })
    }

    /// `(1/π)∫_U |w|² dm(w)`; custom regions use `(1/2i)∮ w w̄²/2 dw`.
    pub fn second_moment(&self, rule: &QuadratureRule) -> Result<T> {
        match self {
            Region::Empty => Ok(T::zero()),
            Region::Custom(_) => {
                let v = self.green_boundary_integral(|z, dz| z * z.conj() * z.conj() * dz * lit::<T>(0.5), 4096);
                Ok(v.im * lit::<T>(0.5) / T::PI())
            }
            _ => Ok(self.integrate(|z| Complex::new(z.norm_sqr(), T::zero()), rule)?.value.re / T::PI()),
        }
    }

    /// Distance from `z` to the boundary, sampled for custom regions.
    pub fn boundary_distance(&self, z: Cplx<T>) -> T {
        self.nearest_boundary_point(z).map_or(T::infinity(), |p| (p - z).norm())
    }

    /// Nearest boundary point (closed form per shape; radial map for the
    /// ellipse and cardioid; sampling for custom regions).  Ties at symmetric
    /// centres resolve toward the positive real direction.
    pub fn nearest_boundary_point(&self, z: Cplx<T>) -> Option<Cplx<T>> {
        let zero = T::zero();
        let unit_dir = |w: Cplx<T>| {
            let r = w.norm();
            if r == zero {
                Complex::new(T::one(), zero)
            } else {
                w / r
            }
        };
        Some(match self {
            Region::Empty => return None,
            Region::Disk { center, radius } => center + unit_dir(z - center) * *radius,
            Region::Annulus { inner, outer } => {
                let r = z.norm();
                let d = unit_dir(z);
                if (r - *inner).abs() <= (*outer - r).abs() {
                    d * *inner
                } else {
                    d * *outer
                }
            }
            Region::Ellipse { semi_x, semi_y } => {
                let d = unit_dir(z);
                let u = d.re / *semi_x;
                let v = d.im / *semi_y;
                d * (u * u + v * v).sqrt().recip()
            }
            Region::Cardioid { a, b } => {
                let d = unit_dir(z);
                d * (*b * (T::one() + lit::<T>(2.0) * *a * d.re))
            }
            Region::HalfDisk { radius } => {
                let on_diam = Complex::new(z.re.max(-*radius).min(*radius), zero);
                let on_arc = if z.im >= zero {
                    unit_dir(z) * *radius
                } else if z.re >= zero {
                    Complex::new(*radius, zero)
                } else {
                    Complex::new(-*radius, zero)
                };
                if (on_arc - z).norm() < (on_diam - z).norm() {
                    on_arc
                } else {
                    on_diam
                }
            }
            Region::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = vertices[0];
                let mut bd = T::infinity();
                for i in 0..n {
                    let p = segment_nearest(z, vertices[i], vertices[(i + 1) % n]);
                    let d = (p - z).norm();
                    if d < bd {
                        bd = d;
                        best = p;
                    }
                }
                best
            }
            Region::Custom(c) => {
                let mut best = c.anchor;
                let mut bd = T::infinity();
                for comp in &c.components {
                    for i in 0..4096 {
                        let (p, _) = (comp.curve)(from_usize::<T>(i) / lit(4096.0));
                        let d = (p - z).norm();
                        if d < bd {
                            bd = d;
                            best = p;
                        }
                    }
                }
                best
            }
        })
    }

    /// A local feature size used for offsets off the boundary.
    pub fn feature_size(&self) -> T {
        match self {
            Region::Empty => T::one(),
            Region::Annulus { inner, outer } => (*outer - *inner).min(*inner),
            Region::Ellipse { semi_x, semi_y } => semi_x.min(*semi_y),
            Region::Cardioid { a, b } => *b * (T::one() - lit::<T>(2.0) * *a).max(lit(0.1)),
            Region::Polygon { .. } => self.area().sqrt(),
            Region::HalfDisk { radius } => *radius,
            Region::Disk { radius, .. } => *radius,
            Region::Custom(_) => self.area().sqrt(),
        }
    }

    /// Inward unit normal at a smooth boundary point (left of the direction of
    /// travel for outer components, right for inner ones).
    pub fn inward_normal(&self, component: usize, t: T) -> Result<Cplx<T>> {
        let (_, dz) = self.boundary_eval(component, t)?;
        let n = dz * Complex::new(T::zero(), T::one()) / dz.norm();
        Ok(match self.component_role(component)? {
            ComponentRole::Outer => n,
            ComponentRole::Inner => -n,
        })
    }
}

impl<T> From<CustomBoundary<T>> for Region<T> {
    fn from(c: CustomBoundary<T>) -> Self {
        Region::Custom(c)
    }
}

fn polar<T: Real, F: Fn(Cplx<T>) -> Cplx<T>>(
    acc: &mut KahanSumC<T>,
    f: &F,
    center: Cplx<T>,
    r0: T,
    r1: T,
    nr: usize,
    na: usize,
) {
    let tau = T::TAU();
    let ang = periodic_trapezoid::<T>(na);
    let rad = gauss_on(r0, r1, nr);
    for &(t, wt) in &ang {
        let e = Complex::from_polar(T::one(), tau * t);
        for &(rho, wr) in &rad {
            acc.add(f(center + e * rho) * (wt * tau * wr * rho));
        }
    }
}

/// Shoelace signed area (positive for counterclockwise vertices).
pub fn signed_area<T: Real>(v: &[Cplx<T>]) -> T {
    let n = v.len();
    let mut s = T::zero();
    for i in 0..n {
        s = s + cross(v[i], v[(i + 1) % n]);
    }
    s * lit(0.5)
}

fn segment_nearest<T: Real>(z: Cplx<T>, a: Cplx<T>, b: Cplx<T>) -> Cplx<T> {
    let e = b - a;
    let len2 = e.norm_sqr();
    if len2 == T::zero() {
        return a;
    }
    let s = ((z - a).conj() * e).re / len2;
    a + e * s.max(T::zero()).min(T::one())
}

fn segment_distance<T: Real>(z: Cplx<T>, a: Cplx<T>, b: Cplx<T>) -> T {
    (segment_nearest(z, a, b) - z).norm()
}

fn segments_cross<T: Real>(p1: Cplx<T>, p2: Cplx<T>, q1: Cplx<T>, q2: Cplx<T>) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    ((d1 > T::zero()) != (d2 > T::zero())) && ((d3 > T::zero()) != (d4 > T::zero()))
}

fn validate_polygon<T: Real>(v: &[Cplx<T>]) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidRegion(m.to_string()));
    let n = v.len();
    if n < 3 {
        return bad("polygon needs at least 3 vertices");
    }
    if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return bad("polygon vertices must be finite");
    }
    let scale = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let area = signed_area(v);
    if area.abs() <= T::epsilon() * lit(100.0) * scale * scale {
        return bad("polygon vertices are collinear");
    }
    if area < T::zero() {
        return bad("polygon must be counterclockwise (use Region::polygon to normalize)");
    }
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return bad("polygon edges intersect");
            }
        }
    }
    let c = v.iter().fold(Complex::new(T::zero(), T::zero()), |s, z| s + z) / from_usize::<T>(n);
    for i in 0..n {
        if cross(v[i] - c, v[(i + 1) % n] - c) <= T::zero() {
            return bad("polygon must be star-shaped about its vertex centroid");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    fn catalog() -> Vec<Region<f64>> {
        vec![
            Region::centered_disk(0.5).unwrap(),
            Region::disk(c(0.2, 0.1), 0.3).unwrap(),
            Region::annulus(0.3, 0.6).unwrap(),
            Region::ellipse(0.6, 0.4).unwrap(),
            Region::cardioid(0.2, 0.3).unwrap(),
            Region::equilateral_triangle(0.7).unwrap(),
            Region::half_disk(0.8).unwrap(),
        ]
    }

    #[test]
    fn membership_examples() {
        assert!(Region::centered_disk(0.5).unwrap().contains(c(0.2, 0.0)));
        assert!(!Region::annulus(0.3, 0.6).unwrap().contains(c(0.1, 0.0)));
        let card = Region::cardioid(0.2, 0.3).unwrap();
        assert!(!card.contains(c(0.3 * 1.4 * 1.0001, 0.0)));
        assert!(card.contains(c(0.3 * 1.4 * 0.9999, 0.0)));
    }

    #[test]
    fn boundary_points_sit_on_the_boundary() {
        for region in catalog() {
            let h = 1e-9 * region.feature_size();
            for comp in 0..region.component_count() {
                for k in 0..50 {
                    let t = (k as f64 + 0.37) / 50.0;
                    let (z, speed) = region.boundary_point(comp, t).unwrap();
                    assert!(speed > 0.0);
                    assert!(!region.contains(z), "{region:?} t={t}");
                    let n = region.inward_normal(comp, t).unwrap();
                    assert!(region.contains(z + n * h), "{region:?} comp={comp} t={t}");
                    assert!(!region.contains(z - n * h), "{region:?} comp={comp} t={t}");
                }
            }
        }
    }

    #[test]
    fn parameterization_examples() {
        let d = Region::centered_disk(0.4).unwrap();
        let (z, speed) = d.boundary_point(0, 0.25).unwrap();
        assert!((z - c(0.0, 0.4)).norm() < 1e-15);
        assert!((speed - std::f64::consts::TAU * 0.4).abs() < 1e-14);
        let e = Region::ellipse(0.6, 0.4).unwrap();
        let (z, _) = e.boundary_point(0, 0.125).unwrap();
        let ang = std::f64::consts::FRAC_PI_4;
        assert!((z - c(0.6 * ang.cos(), 0.4 * ang.sin())).norm() < 1e-15);
        assert!(matches!(d.boundary_point(1, 0.0), Err(Error::InvalidComponent { .. })));
    }

    #[test]
    fn areas_match_quadrature() {
        let rule = QuadratureRule::default();
        for region in catalog() {
            let q = region.integrate(|_| c(1.0, 0.0), &rule).unwrap();
            assert!((q.value.re - region.area()).abs() < 1e-8, "{region:?}");
        }
    }

    #[test]
    fn cardioid_area_matches_polar_midpoint_oracle() {
        let (a, b) = (0.3, 0.5);
        let m = 20000;
        let mut s = 0.0;
        for i in 0..m {
            let th = std::f64::consts::TAU * (i as f64 + 0.5) / m as f64;
            let r = b * (1.0 + 2.0 * a * th.cos());
            s += 0.5 * r * r;
        }
        s *= std::f64::consts::TAU / m as f64;
        let region = Region::cardioid(a, b).unwrap();
        assert!((region.area() - s).abs() < 1e-12);
    }

    #[test]
    fn second_moments() {
        let rule = QuadratureRule::default();
        let unit = Region::centered_disk(1.0).unwrap();
        let v = unit.integrate(|z| c(z.norm_sqr(), 0.0), &rule).unwrap().value.re;
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // cardioid: (1/4)∫ r(θ)⁴ dθ by midpoint
        let (a, b) = (0.25, 0.6);
        let m = 20000;
        let mut s = 0.0;
        for i in 0..m {
            let th = std::f64::consts::TAU * (i as f64 + 0.5) / m as f64;
            s += 0.25 * (b * (1.0 + 2.0 * a * th.cos())).powi(4);
        }
        s *= std::f64::consts::TAU / m as f64;
        let card = Region::cardioid(a, b).unwrap();
        let v = card.integrate(|z| c(z.norm_sqr(), 0.0), &rule).unwrap().value.re;
        assert!((v - s).abs() < 1e-11);
        let closed = std::f64::consts::PI * b.powi(4) * (0.5 + 6.0 * a * a + 3.0 * a.powi(4));
        assert!((v - closed).abs() < 1e-11);
    }

    #[test]
    fn ellipse_and_cardioid_moments() {
        let rule = QuadratureRule::default();
        let (a, b) = (0.6_f64, 0.4_f64);
        let e = Region::ellipse(a, b).unwrap();
        let (al, be) = ((a + b) / 2.0, (a - b) / 2.0);
        let mut binom = 1.0;
        for n in 0..12usize {
            if n > 0 && n % 2 == 0 {
                let k = n / 2;
                binom = binom * (n * (n - 1)) as f64 / (k * k) as f64;
            }
            let m = e.area_moment(n, &rule).unwrap();
            let expect = if n % 2 == 0 {
                // the θ-integral of the middle binomial term contributes 2π
                2.0 * (al * al - be * be) * (al * be).powi(n as i32 / 2) * binom / (n as f64 + 2.0)
            } else {
                0.0
            };
            assert!((m - c(expect, 0.0)).norm() < 1e-12, "n={n} {m} {expect}");
        }
        let (a, b) = (0.2_f64, 0.3_f64);
        let card = Region::cardioid(a, b).unwrap();
        for n in 0..10usize {
            let m = card.area_moment(n, &rule).unwrap();
            let expect = b.powi(n as i32 + 2) * a.powi(n as i32) * (n as f64 + 1.0 + 2.0 * a * a);
            assert!((m - c(expect, 0.0)).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn green_moments_agree_with_area_quadrature() {
        let rule = QuadratureRule::default();
        for region in catalog() {
            for n in [0usize, 1, 3, 6] {
                let direct = region.area_moment(n, &rule).unwrap();
                let green = region.green_moment(n, &rule).unwrap() / std::f64::consts::PI;
                assert!((direct - green).norm() < 1e-10, "{region:?} n={n}");
            }
        }
    }

    #[test]
    fn radial_decomposition_examples() {
        assert_eq!(
            Region::centered_disk(0.4).unwrap().radial_decomposition().unwrap().bands,
            vec![(0.0, 0.4)]
        );
        assert_eq!(Region::annulus(0.2, 0.5).unwrap().radial_decomposition().unwrap().bands, vec![(0.2, 0.5)]);
        assert!(Region::ellipse(0.6, 0.4).unwrap().radial_decomposition().is_none());
        assert!(Region::disk(c(0.1, 0.0), 0.2).unwrap().radial_decomposition().is_none());
    }

    #[test]
    fn ray_intervals_agree_with_membership() {
        let mut regions = catalog();
        regions.push(Region::disk(c(0.5, 0.2), 0.3).unwrap());
        regions.push(
            Region::polygon(vec![c(0.6, 0.0), c(0.1, 0.1), c(0.0, 0.6), c(-0.1, 0.1), c(-0.6, 0.0), c(0.0, -0.5)])
                .unwrap(),
        );
        for region in regions {
            for k in 0..37 {
                let th = std::f64::consts::TAU * (k as f64 + 0.123) / 37.0;
                let iv = region.ray_intervals(th);
                let dir = Complex::from_polar(1.0, th);
                for j in 0..200 {
                    let rho = (j as f64 + 0.5) / 200.0;
                    let inside = iv.iter().any(|&(lo, hi)| rho > lo && rho < hi);
                    assert_eq!(inside, region.contains(dir * rho), "{region:?} θ={th} ρ={rho}");
                }
            }
        }
    }

    #[test]
    fn polygon_validation() {
        let tri = Region::polygon(vec![c(0.0, 0.0), c(0.0, 0.5), c(0.5, 0.0)]).unwrap();
        // normalized to counterclockwise
        if let Region::Polygon { vertices } = &tri {
            assert!(signed_area(vertices) > 0.0);
        }
        assert!(Region::polygon(vec![c(0.0, 0.0), c(0.1, 0.1), c(0.2, 0.2)]).is_err());
        let bowtie = vec![c(0.0, 0.0), c(0.5, 0.5), c(0.5, 0.0), c(0.0, 0.5)];
        assert!(Region::polygon(bowtie).is_err());
        assert!(Region::annulus(0.5, 0.3).is_err());
        assert!(Region::cardioid(0.6, 0.3).is_err());
    }

    #[test]
    fn exterior_ball_radius_per_shape() {
        assert_eq!(Region::ellipse(0.6, 0.4).unwrap().exterior_ball_radius(), Some(f64::INFINITY));
        assert_eq!(Region::annulus(0.3, 0.6).unwrap().exterior_ball_radius(), Some(0.3));
        assert_eq!(Region::cardioid(0.1, 0.3).unwrap().exterior_ball_radius(), Some(f64::INFINITY));
        let dimpled: f64 = Region::cardioid(0.4, 0.3).unwrap().exterior_ball_radius().unwrap();
        assert!(dimpled > 0.0 && dimpled.is_finite());
        assert_eq!(Region::cardioid(0.5, 0.3).unwrap().exterior_ball_radius(), None);
    }

    #[test]
    fn custom_fourier_circle_behaves_like_disk() {
        let custom: Region<f64> = CustomBoundary::fourier(
            vec![(vec![(0, c(0.1, 0.0)), (1, c(0.3, 0.0))], ComponentRole::Outer)],
            c(0.1, 0.0),
            vec![],
        )
        .into();
        custom.validate().unwrap();
        let disk = Region::disk(c(0.1, 0.0), 0.3).unwrap();
        assert!((custom.area() - disk.area()).abs() < 1e-13);
        let rule = QuadratureRule::default();
        for n in 0..5 {
            let a = custom.area_moment(n, &rule).unwrap();
            let b = disk.area_moment(n, &rule).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
        assert!(custom.contains(c(0.3, 0.0)));
        assert!(!custom.contains(c(0.45, 0.0)));
    }

    #[test]
    fn single_precision_region() {
        let d = Region::<f32>::centered_disk(0.5).unwrap();
        let rule = QuadratureRule::with_tolerance(1e-5);
        let m = d.area_moment(0, &rule).unwrap();
        assert!((m.re - 0.25).abs() < 1e-6);
    }
}
