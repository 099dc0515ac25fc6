use proptest::prelude::*;

use spstiefel::manifold::tangency_residual;
use spstiefel::matkit::{
    apply_j_left, expm, poisson_dense, rand_gaussian, rand_symplectic, skew_part, solve_dense, sym_part,
    InitStrategy, MatrixRng,
};
use spstiefel::retraction::{retract_cayley_generic, retract_qgeo};
use spstiefel::solver::{nonmonotone_accept, nonmonotone_update, trial_step, NonMonotoneState, StepHistory};
use spstiefel::{
    check_symplectic, inner, project_normal, project_tangent, LineSearchConfig, Mat, MetricSpec, MetricVariant,
    Point, StepRule,
};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..6).prop_flat_map(|n| (Just(n), 1..=n))
}

fn point(n: usize, p: usize, seed: u64) -> Point {
    rand_symplectic(n, p, InitStrategy::RightExponential, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn j_twice_negates(m in 1usize..6, c in 1usize..5, seed in any::<u64>()) {
        let a = rand_gaussian::<f64>(2 * m, c, seed);
        let jja = apply_j_left(m, &apply_j_left(m, &a).unwrap()).unwrap();
        prop_assert_eq!(jja, -&a);
        let jd = poisson_dense::<f64>(m).matmul(&a);
        prop_assert_eq!(apply_j_left(m, &a).unwrap(), jd);
    }

    #[test]
    fn sym_and_skew_parts_reconstruct(m in 1usize..8, seed in any::<u64>()) {
        let a = rand_gaussian::<f64>(m, m, seed);
        let s = sym_part(&a).unwrap();
        let k = skew_part(&a).unwrap();
        prop_assert!((&(&s + &k) - &a).max_abs() <= 1e-15 * (1.0 + a.max_abs()));
        prop_assert_eq!(&s, &s.transpose());
        prop_assert_eq!(&k, &(-&k.transpose()));
    }

    #[test]
    fn exponential_of_hamiltonian_is_symplectic(m in 1usize..6, spread in 0.01f64..1.5, seed in any::<u64>()) {
        let w = MatrixRng::new(seed).symmetric::<f64>(2 * m, spread);
        let e = expm(&apply_j_left(m, &w).unwrap()).unwrap();
        let r = check_symplectic(&e, m, m).unwrap();
        prop_assert!(r <= 1e-12 * e.frobenius_norm().powi(2), "{r:e}");
    }

    #[test]
    fn dense_solve_has_small_residual(m in 1usize..10, seed in any::<u64>()) {
        let a = &rand_gaussian::<f64>(m, m, seed) + &Mat::identity(m).scale(m as f64);
        let b = rand_gaussian::<f64>(m, 2, seed ^ 1);
        let x = solve_dense(&a, &b).unwrap();
        prop_assert!((&a.matmul(&x) - &b).frobenius_norm() <= 1e-12 * (1.0 + b.frobenius_norm()));
    }

    #[test]
    fn projections_are_complementary((n, p) in dims(), seed in any::<u64>()) {
        let x = point(n, p, seed);
        let y = rand_gaussian::<f64>(2 * n, 2 * p, seed ^ 7);
        let t = project_tangent(&x, &y).unwrap();
        let nv = project_normal(&x, &y).unwrap();
        let scale = y.frobenius_norm() * x.matrix().frobenius_norm().powi(4);
        prop_assert!((&(t.matrix() + nv.matrix()) - &y).frobenius_norm() <= 1e-14 * scale);
        prop_assert!(tangency_residual(x.matrix(), t.matrix()) <= 1e-13 * scale);
        let tt = project_tangent(&x, t.matrix()).unwrap();
        prop_assert!((tt.matrix() - t.matrix()).frobenius_norm() <= 1e-14 * scale);
    }

    #[test]
    fn metric_is_positive_on_tangents((n, p) in dims(), seed in any::<u64>(), v in prop::bool::ANY) {
        let x = point(n, p, seed);
        let z = project_tangent(&x, &rand_gaussian(2 * n, 2 * p, seed ^ 3)).unwrap();
        let variant = if v { MetricVariant::I } else { MetricVariant::II };
        let g = inner(&x, MetricSpec::with_default_rho(variant), &z, &z).unwrap();
        prop_assert!(g > 0.0);
    }

    #[test]
    fn nonmonotone_reference_stays_above_accepted_values(
        alpha in 0.0f64..=1.0,
        f0 in -10.0f64..10.0,
        drops in prop::collection::vec((0.0f64..1.0, 1e-3f64..1.0), 1..30),
    ) {
        let mut st = NonMonotoneState::new(f0);
        for (frac, t) in drops {
            // Accept a value on the admissible side of the test, then update.
            let dd = -1.0;
            let f_new = st.c + 1e-4 * t * dd - frac;
            prop_assert!(nonmonotone_accept(f_new, &st, t, dd, 1e-4));
            let next = nonmonotone_update(&st, f_new, alpha);
            prop_assert!(next.c < st.c);
            prop_assert!(f_new <= next.c + 1e-12 * (1.0 + next.c.abs()));
            prop_assert!(next.q >= 1.0);
            st = next;
        }
    }

    #[test]
    fn trial_steps_respect_the_clamps(seed in any::<u64>(), k in 1usize..20, rule in 0usize..4) {
        let mut rng = MatrixRng::new(seed);
        let xs: Vec<Mat> = (0..4).map(|_| rng.gaussian(4, 2)).collect();
        let step_rule = [StepRule::Bb1, StepRule::Bb2, StepRule::Abb, StepRule::ModifiedRatio][rule];
        let cfg = LineSearchConfig { step_rule, ..Default::default() };
        let h = StepHistory {
            x_prev: &xs[0],
            x: &xs[1],
            grad_prev: &xs[2],
            grad: &xs[3],
            f_prev: rng.normal(),
            f: rng.normal(),
            dir_deriv: -rng.uniform(),
        };
        let g = trial_step(&h, k, &cfg);
        prop_assert!((cfg.gamma_min..=cfg.gamma_max).contains(&g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn retractions_fix_the_base_and_stay_feasible((n, p) in dims(), seed in any::<u64>(), t in 0.0f64..1.0) {
        let x = point(n, p, seed);
        let z = project_tangent(&x, &rand_gaussian(2 * n, 2 * p, seed ^ 5)).unwrap();
        let z = z.scale(1.0 / (1.0 + z.matrix().frobenius_norm()));
        for y in [retract_qgeo(&x, &z, 0.0).unwrap(), retract_cayley_generic(&x, &z, 0.0).unwrap()] {
            prop_assert!((y.matrix() - x.matrix()).max_abs() <= 1e-14);
        }
        let y = retract_qgeo(&x, &z, t).unwrap();
        prop_assert!(y.residual() <= 1e-8, "qgeo {:e}", y.residual());
        if let Ok(y) = retract_cayley_generic(&x, &z, t) {
            prop_assert!(y.residual() <= 1e-8, "cayley {:e}", y.residual());
        }
    }
}
