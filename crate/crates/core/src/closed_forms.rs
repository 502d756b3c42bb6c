//! Closed-form catalog: balayage densities, the annulus split `λ`, the hole
//! rate excess `R′_U = R_U − 3/4`, and the radial slope for `{c < |z| < 1}`.
//!
//! Densities are expressed w.r.t. the boundary parameter `t ∈ [0, 1)` of
//! [`Region::boundary_eval`], so `a²/(2π) dθ` on a circle becomes `h = a²`.

use num_complex::Complex;
use serde::Serialize;

use crate::balayage::BoundaryMeasure;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::scalar::{lit, Real};

/// `(b² − a²)`-fraction of the annulus balayage carried by the inner circle.
///
/// With `x = 2 log(b/a)` this is `1/x − 1/(eˣ − 1)`; it tends to 1/2 as
/// `a → b`, which is the value returned for `a = b`.
pub fn annulus_lambda<T: Real>(a: T, b: T) -> Result<T> {
    if !(a > T::zero() && a <= b && b <= T::one()) {
        return Err(Error::Domain(format!("annulus_lambda needs 0 < a <= b <= 1, got a={a}, b={b}")));
    }
    let x = lit::<T>(2.0) * (b / a).ln();
    if x < lit(1e-3) {
        let x2 = x * x;
        return Ok(lit::<T>(0.5) - x / lit(12.0) + x2 * x / lit(720.0) - x2 * x2 * x / lit(30240.0));
    }
    Ok(x.recip() - x.exp_m1().recip())
}

/// `R′` of the annulus `{a < |z| < b}`:
/// `(b⁴ − a⁴)/4 − (b² − a²)²/(4 log(b/a))`, evaluated without cancellation
/// as `b → a`.
pub fn annulus_r_prime<T: Real>(a: T, b: T) -> T {
    let x = lit::<T>(2.0) * (b / a).ln();
    let e = x.exp_m1();
    let bracket = if x < lit(1e-2) {
        let x2 = x * x;
        x2 / lit(6.0) + x2 * x / lit(12.0) + x2 * x2 / lit(40.0) + x2 * x2 * x / lit(180.0)
            + x2 * x2 * x2 / lit(1008.0)
    } else {
        lit::<T>(2.0) + e * (T::one() - lit::<T>(2.0) / x)
    };
    let a2 = a * a;
    a2 * a2 * e * bracket / lit(4.0)
}

/// Limit slope of `(1/r⁴) log P[no point in {cr < |z| < r}]`:
/// `−((1 − c²)/4)(1 + c² + (1 − c²)/log c)`; `c = 0` gives −1/4.
pub fn kostlan_slope_closed<T: Real>(c: T) -> Result<T> {
    if !(c >= T::zero() && c < T::one()) {
        return Err(Error::Domain(format!("slope needs 0 <= c < 1, got {c}")));
    }
    if c == T::zero() {
        return Ok(lit(-0.25));
    }
    Ok(-annulus_r_prime(c, T::one()))
}

fn equilateral_circumradius<T: Real>(vertices: &[Complex<T>]) -> Option<T> {
    if vertices.len() != 3 {
        return None;
    }
    let s: Vec<T> = (0..3).map(|i| (vertices[(i + 1) % 3] - vertices[i]).norm()).collect();
    let mean = (s[0] + s[1] + s[2]) / lit(3.0);
    let tol = lit::<T>(1e-12).max(T::epsilon() * lit(16.0)) * mean;
    if (s[0] - mean).abs() <= tol && (s[1] - mean).abs() <= tol && (s[2] - mean).abs() <= tol {
        Some(mean / lit::<T>(3.0).sqrt())
    } else {
        None
    }
}

/// `R′_U` for catalog shapes.  Disks in any position, annuli, centered
/// ellipses, cardioids, equilateral triangles in any position and
/// orientation, and the upper half-disk.
pub fn r_prime_closed<T: Real>(region: &Region<T>) -> Result<T> {
    let pi = T::PI();
    match region {
        Region::Empty => Ok(T::zero()),
        Region::Disk { radius, .. } => Ok(radius.powi(4) / lit(4.0)),
        Region::Annulus { inner, outer } => Ok(annulus_r_prime(*inner, *outer)),
        Region::Ellipse { semi_x, semi_y } => {
            let ab = *semi_x * *semi_y;
            Ok(ab * ab * ab / (lit::<T>(2.0) * (*semi_x * *semi_x + *semi_y * *semi_y)))
        }
        Region::Cardioid { a, b } => {
            let q = *a * *a + T::one();
            Ok(b.powi(4) / lit(2.0) * (q * q - lit(0.5)))
        }
        Region::HalfDisk { radius } => {
            Ok(radius.powi(4) / lit(2.0) * (lit::<T>(0.5) - lit::<T>(4.0) / (pi * pi)))
        }
        Region::Polygon { vertices } => match equilateral_circumradius(vertices) {
            Some(a) => Ok(a.powi(4) * lit::<T>(9.0) * lit::<T>(3.0).sqrt() / (lit::<T>(160.0) * pi)),
            None => Err(Error::NotCatalog("only equilateral triangles have a catalog value".into())),
        },
        Region::Custom(_) => Err(Error::NotCatalog("custom boundary".into())),
    }
}

/// `R_U = 3/4 + R′_U`.
pub fn r_u_closed<T: Real>(region: &Region<T>) -> Result<T> {
    Ok(lit::<T>(0.75) + r_prime_closed(region)?)
}

/// Closed-form balayage density, for shapes where it is known.
///
/// The cardioid uses `b²/(2π)(1 + 2a² + 2a cos θ)`, the only one of the
/// candidate formulas whose total mass equals `area/π = b²(1 + 2a²)`.
pub fn balayage_closed<T: Real>(region: &Region<T>) -> Result<BoundaryMeasure<T>> {
    let two: T = lit(2.0);
    match region {
        Region::Disk { radius, .. } => Ok(BoundaryMeasure::uniform(region, *radius * *radius)),
        Region::Annulus { inner, outer } => {
            let lam = annulus_lambda(*inner, *outer)?;
            let mass = *outer * *outer - *inner * *inner;
            let mut m = BoundaryMeasure::zero(region, 0);
            m.pieces[0].coeffs[0] = (T::one() - lam) * mass;
            m.pieces[1].coeffs[0] = lam * mass;
            Ok(m)
        }
        Region::Ellipse { semi_x, semi_y } => {
            let (a, b) = (*semi_x, *semi_y);
            let k = (a * a - b * b) / (a * a + b * b);
            let mut m = BoundaryMeasure::zero(region, 2);
            // ab(1 − k cos 2θ), θ = 2πt
            m.pieces[0].coeffs[0] = a * b;
            m.pieces[0].coeffs[3] = -a * b * k;
            Ok(m)
        }
        Region::Cardioid { a, b } => {
            let mut m = BoundaryMeasure::zero(region, 1);
            m.pieces[0].coeffs[0] = *b * *b * (T::one() + two * *a * *a);
            m.pieces[0].coeffs[1] = two * *a * *b * *b;
            Ok(m)
        }
        Region::Empty => Err(Error::NotCatalog("empty region has no boundary".into())),
        _ => Err(Error::NotCatalog(format!("no closed-form balayage density for {}", region.shape_name()))),
    }
}

/// Sine coefficients (w.r.t. `sin πks` on the arc piece) of the half-disk arc
/// density implied by the imaginary parts of the moment relations.  Even
/// coefficients vanish.
pub fn half_disk_arc_coefficients<T: Real>(radius: T, count: usize) -> Vec<T> {
    (1..=count)
        .map(|k| {
            if k % 2 == 1 {
                let kk: T = lit(k as f64);
                lit::<T>(4.0) * radius * radius / (T::PI() * kk * (kk + lit(2.0)))
            } else {
                T::zero()
            }
        })
        .collect()
}

/// One row of the catalog table.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormEntry {
    pub shape: &'static str,
    pub parameters: String,
    pub r_prime_formula: &'static str,
    pub density_formula: Option<&'static str>,
    pub r_prime: f64,
    pub r_u: f64,
    pub note: &'static str,
}

/// The catalog evaluated at representative parameters.
pub fn catalog() -> Vec<(Region<f64>, ClosedFormEntry)> {
    let rows: Vec<(Region<f64>, &'static str, String, &'static str, Option<&'static str>, &'static str)> = vec![
        (
            Region::centered_disk(0.5).unwrap(),
            "disk",
            "a=0.5".into(),
            "a^4/4",
            Some("a^2/(2pi) dtheta"),
            "",
        ),
        (
            Region::disk(Complex::new(0.2, 0.1), 0.3).unwrap(),
            "translated_disk",
            "c0=0.2+0.1i a=0.3".into(),
            "a^4/4",
            Some("a^2/(2pi) dtheta"),
            "independent of the center",
        ),
        (
            Region::annulus(0.3, 0.6).unwrap(),
            "annulus",
            "a=0.3 b=0.6".into(),
            "(b^4-a^4)/4 - (b^2-a^2)^2/(4 log(b/a))",
            Some("lambda(b^2-a^2) dtheta/(2pi) on |z|=a; (1-lambda)(b^2-a^2) dtheta/(2pi) on |z|=b"),
            "",
        ),
        (
            Region::ellipse(0.6, 0.4).unwrap(),
            "ellipse",
            "a=0.6 b=0.4".into(),
            "(ab)^3/(2(a^2+b^2))",
            Some("(ab/2pi)(1 - (a^2-b^2)/(a^2+b^2) cos 2theta) dtheta"),
            "",
        ),
        (
            Region::cardioid(0.2, 0.3).unwrap(),
            "cardioid",
            "a=0.2 b=0.3".into(),
            "(b^4/2)((a^2+1)^2 - 1/2)",
            Some("(b^2/2pi)(1 + 2a^2 + 2a cos theta) dtheta"),
            "mass-consistent density (total mass b^2(1+2a^2))",
        ),
        (
            Region::equilateral_triangle(0.5).unwrap(),
            "triangle",
            "a=0.5".into(),
            "a^4 9sqrt(3)/(160pi)",
            None,
            "density not in closed form",
        ),
        (
            Region::half_disk(0.8).unwrap(),
            "half_disk",
            "a=0.8".into(),
            "(a^4/2)(1/2 - 4/pi^2)",
            None,
            "density not in closed form",
        ),
    ];
    rows.into_iter()
        .map(|(region, shape, parameters, r_prime_formula, density_formula, note)| {
            let r_prime = r_prime_closed(&region).unwrap();
            let entry = ClosedFormEntry {
                shape,
                parameters,
                r_prime_formula,
                density_formula,
                r_prime,
                r_u: 0.75 + r_prime,
                note,
            };
            (region, entry)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balayage::{boundary_moment, r_u_from_measure};
    use crate::quadrature::QuadratureRule;

    #[test]
    fn lambda_values() {
        let lam = annulus_lambda(0.3_f64, 0.6).unwrap();
        // direct arithmetic of ((b²−a²) − 2a² log(b/a)) / (2(b²−a²) log(b/a))
        let (a, b) = (0.3_f64, 0.6_f64);
        let l = (b / a).ln();
        let direct = ((b * b - a * a) - 2.0 * a * a * l) / (2.0 * (b * b - a * a) * l);
        assert!((lam - direct).abs() < 1e-15);
        assert!((lam - 0.388_014_187_11).abs() < 1e-10);
        assert_eq!(annulus_lambda(0.4_f64, 0.4).unwrap(), 0.5);
        let near = annulus_lambda(0.4_f64, 0.4 * (1.0 + 1e-6)).unwrap();
        assert!((near - 0.5).abs() < 1e-6);
        assert!(annulus_lambda(0.5_f64, 0.4).is_err());
        assert!(annulus_lambda(0.5_f64, 1.2).is_err());
    }

    #[test]
    fn series_branch_is_continuous() {
        let a = 0.5_f64;
        for &x in &[9.9e-4_f64, 1.0001e-3, 9.9e-3, 1.001e-2] {
            let b = a * (x / 2.0).exp();
            let direct = (b.powi(4) - a.powi(4)) / 4.0 - (b * b - a * a).powi(2) / (4.0 * (b / a).ln());
            let stable = annulus_r_prime(a, b);
            assert!((stable - direct).abs() < 1e-12 * a.powi(4), "x={x}");
            let lam = annulus_lambda(a, b).unwrap();
            assert!((lam - (1.0 / x - 1.0 / x.exp_m1())).abs() < 1e-9);
        }
    }

    #[test]
    fn slope_values() {
        assert_eq!(kostlan_slope_closed(0.0_f64).unwrap(), -0.25);
        // approaches −1/4 like 1/(4 log c)
        for &c in &[1e-3_f64, 1e-6, 1e-9] {
            let gap = kostlan_slope_closed(c).unwrap() + 0.25;
            assert!((gap + 0.25 / c.ln()).abs() < 4.0 * c * c + 1e-15, "c={c} {gap}");
        }
        let s = kostlan_slope_closed(0.5_f64).unwrap();
        assert!((s + 0.031_496_009_874_989_5).abs() < 1e-13);
        assert!(kostlan_slope_closed(1.0 - 1e-9_f64).unwrap().abs() < 1e-12);
        assert!(kostlan_slope_closed(1.0_f64).is_err());
    }

    #[test]
    fn r_prime_examples() {
        let d = Region::disk(Complex::new(0.1, -0.2), 0.4).unwrap();
        assert!((r_prime_closed(&d).unwrap() - 0.4f64.powi(4) / 4.0).abs() < 1e-16);
        let e = Region::ellipse(0.6_f64, 0.4).unwrap();
        assert!((r_prime_closed(&e).unwrap() - 0.013_292_307_692_307_69).abs() < 1e-15);
        let tri = Region::equilateral_triangle(0.5_f64).unwrap();
        let rotated = Region::polygon(
            (0..3)
                .map(|p| Complex::new(0.1, 0.05) + Complex::from_polar(0.5, 0.3 + std::f64::consts::TAU * p as f64 / 3.0))
                .collect(),
        )
        .unwrap();
        assert!((r_prime_closed(&tri).unwrap() - r_prime_closed(&rotated).unwrap()).abs() < 1e-15);
        let skew = Region::polygon(vec![Complex::new(0.0, 0.0), Complex::new(0.5, 0.0), Complex::new(0.0, 0.3)]).unwrap();
        assert!(matches!(r_prime_closed(&skew), Err(Error::NotCatalog(_))));
        // degenerate annulus
        assert!(r_prime_closed(&Region::annulus(0.5_f64, 0.5 + 1e-9).unwrap()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn densities_have_area_mass_and_reproduce_catalog() {
        let rule = QuadratureRule::default();
        for (region, entry) in catalog() {
            let Ok(nu2) = balayage_closed(&region) else { continue };
            let mass = nu2.total_mass();
            assert!((mass - region.area() / std::f64::consts::PI).abs() < 1e-10, "{}", entry.shape);
            assert!(nu2.min_density(400) >= 0.0);
            let r = r_u_from_measure(&region, &nu2, &rule).unwrap();
            assert!((r - entry.r_u).abs() < 1e-8, "{} {r} {}", entry.shape, entry.r_u);
        }
    }

    #[test]
    fn closed_densities_satisfy_moment_relations() {
        let rule = QuadratureRule::default();
        for (region, entry) in catalog() {
            let Ok(nu2) = balayage_closed(&region) else { continue };
            for n in 0..12 {
                let lhs = boundary_moment(&nu2, &region, n);
                let rhs = region.area_moment(n, &rule).unwrap();
                assert!((lhs - rhs).norm() < 1e-12, "{} n={n}", entry.shape);
            }
        }
    }

    #[test]
    fn cardioid_first_moment() {
        let (a, b) = (0.2_f64, 0.3_f64);
        let region = Region::cardioid(a, b).unwrap();
        let nu2 = balayage_closed(&region).unwrap();
        let m1 = boundary_moment(&nu2, &region, 1);
        assert!((m1.re - b.powi(3) * a * (2.0 + 2.0 * a * a)).abs() < 1e-15);
    }

    #[test]
    fn half_disk_arc_coefficients_give_the_second_moment() {
        // ∫|z|² dν₂ = a²∫(1 − cos 2θ) g dθ with g the arc density in θ
        let a = 0.7_f64;
        let d = half_disk_arc_coefficients(a, 4001);
        let mut s = 0.0;
        for (k, &dk) in d.iter().enumerate() {
            let k = (k + 1) as f64;
            if dk == 0.0 {
                continue;
            }
            // ∫_0^1 (1 − cos 2πs) sin πks ds for odd k
            let i = 2.0 / (std::f64::consts::PI * k) - (1.0 / (k + 2.0) + 1.0 / (k - 2.0)) / std::f64::consts::PI;
            s += dk * i;
        }
        let second = a * a * s;
        let expect = a.powi(4) * (0.75 - 4.0 / std::f64::consts::PI.powi(2));
        assert!((second - expect).abs() < 1e-9, "{second} {expect}");
    }
}
