use ginibre_holes::fekete::{gradient, is_feasible, min_separation, optimize, project_feasible, weighted_log_product};
use ginibre_holes::Region;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn region() -> impl Strategy<Value = Region<f64>> {
    prop_oneof![
        Just(Region::Empty),
        (0.05..0.8_f64).prop_map(|a| Region::centered_disk(a).unwrap()),
        (0.1..0.6_f64, 0.05..0.3_f64).prop_map(|(a, w)| Region::annulus(a, a + w).unwrap()),
        (0.1..0.7_f64, 0.1..0.7_f64).prop_map(|(a, b)| Region::ellipse(a, b).unwrap()),
        (0.05..0.5_f64, 0.1..0.4_f64).prop_map(|(a, b)| Region::cardioid(a, b).unwrap()),
        (0.1..0.8_f64).prop_map(|a| Region::half_disk(a).unwrap()),
        (0.1..0.8_f64).prop_map(|a| Region::equilateral_triangle(a).unwrap()),
    ]
}

fn config(n: usize) -> impl Strategy<Value = Vec<Complex<f64>>> {
    prop::collection::vec((0.0..0.95_f64, 0.0..std::f64::consts::TAU), n)
        .prop_map(|v| v.into_iter().map(|(r, t)| Complex::from_polar(r.sqrt(), t)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_matches_finite_differences(pts in config(12)) {
        prop_assume!(min_separation(&pts) > 1e-2);
        let g = gradient(&pts);
        let h = 1e-6;
        for i in 0..pts.len() {
            let mut fd = [0.0; 2];
            for (axis, d) in [Complex::new(h, 0.0), Complex::new(0.0, h)].into_iter().enumerate() {
                let mut p = pts.clone();
                p[i] = pts[i] + d;
                let fp = weighted_log_product(&p).0;
                p[i] = pts[i] - d;
                let fm = weighted_log_product(&p).0;
                fd[axis] = (fp - fm) / (2.0 * h);
            }
            let err = (g[i] - Complex::new(fd[0], fd[1])).norm() / g[i].norm().max(1.0);
            prop_assert!(err < 1e-6, "point {i}: {err}");
        }
    }

    #[test]
    fn projection_is_feasible_and_idempotent(region in region(), r in 0.0..1.5_f64, t in 0.0..std::f64::consts::TAU) {
        let z = Complex::from_polar(r, t);
        let p = project_feasible(z, &region);
        prop_assert!(is_feasible(p, &region), "{region:?}: {z} → {p}");
        prop_assert_eq!(project_feasible(p, &region), p);
        if is_feasible(z, &region) {
            prop_assert_eq!(p, z);
        }
    }
}

#[test]
fn three_points_form_the_optimal_triangle() {
    // brute force over the radius of an equilateral configuration
    let f = |s: f64| 3.0 * (3f64.sqrt() * s).ln() - 3.0 * s * s;
    let best = (1..=100_000).map(|i| i as f64 * 1e-5).max_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
    let rep = optimize(&Region::<f64>::Empty, 3, 11, 4, 4000).unwrap();
    assert!((rep.best.value - f(best)).abs() < 1e-8, "{} vs {}", rep.best.value, f(best));
    for z in &rep.best.points {
        assert!((z.norm() - best).abs() < 1e-4);
    }
}

#[test]
fn optimized_points_are_feasible_and_locally_optimal() {
    let region = Region::ellipse(0.5_f64, 0.3).unwrap();
    let rep = optimize(&region, 30, 5, 4, 4000).unwrap();
    assert!(rep.best.feasible && rep.min_separation > 0.0);
    assert!(rep.best.points.iter().all(|&z| is_feasible(z, &region)));
    assert!(rep.best_so_far.windows(2).all(|w| w[1] >= w[0]));
    let pairs = 30.0 * 29.0 / 2.0;
    assert!((rep.r_estimate + rep.best.value / pairs).abs() < 1e-14);
    assert!((rep.delta_n - (-rep.r_estimate).exp()).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tried = 0;
    while tried < 1000 {
        let cand = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if !is_feasible(cand, &region) {
            continue;
        }
        let i = rng.gen_range(0..30);
        let mut p = rep.best.points.clone();
        p[i] = cand;
        let (v, ok) = weighted_log_product(&p);
        assert!(!ok || v <= rep.best.value + 1e-9, "move of point {i} to {cand} improves by {}", v - rep.best.value);
        tried += 1;
    }
}

#[test]
fn seeds_are_reproducible() {
    let region = Region::centered_disk(0.4).unwrap();
    let a = optimize(&region, 20, 3, 3, 500).unwrap();
    let b = optimize(&region, 20, 3, 3, 500).unwrap();
    assert_eq!(a.best.points, b.best.points);
    assert_eq!(a.r_estimate, b.r_estimate);
}
