use ginibre_holes::potential::PlanarMeasure;
use ginibre_holes::QuadratureRule;
use num_complex::Complex;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Complex<f64>> {
    (0.0..1.5_f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // Jensen: (1/2π)∫ log(1/|z − ρe^{iθ}|) dθ = −log max(|z|, ρ)
    #[test]
    fn circle_potential_is_jensen(rho in 0.05..0.95_f64, z in point()) {
        prop_assume!((z.norm() - rho).abs() > 1e-6);
        let p = PlanarMeasure::uniform_circle(rho).unwrap().potential_at(z, &QuadratureRule::default()).unwrap();
        prop_assert!((p + z.norm().max(rho).ln()).abs() < 1e-10);
    }

    #[test]
    fn disk_potential_closed_form(a in 0.05..0.95_f64, z in point()) {
        let p = PlanarMeasure::uniform_disk(a).unwrap().potential_at(z, &QuadratureRule::default()).unwrap();
        let r = z.norm();
        let expect = if r <= a { 0.5 * (1.0 - r * r / (a * a)) - a.ln() } else { -r.ln() };
        prop_assert!((p - expect).abs() < 1e-10, "{p} {expect}");
    }

    #[test]
    fn superposition(r1 in 0.1..0.4_f64, r2 in 0.5..0.9_f64, z in point()) {
        prop_assume!((z.norm() - r1).abs() > 1e-6 && (z.norm() - r2).abs() > 1e-6);
        let rule = QuadratureRule::default();
        let a = PlanarMeasure::uniform_circle(r1).unwrap();
        let b = PlanarMeasure::uniform_disk(r2).unwrap();
        let mut sum = a.clone();
        sum.area.extend(b.area.iter().cloned());
        let total = sum.potential_at(z, &rule).unwrap();
        let parts = a.potential_at(z, &rule).unwrap() + b.potential_at(z, &rule).unwrap();
        prop_assert!((total - parts).abs() < 1e-12);
    }
}
