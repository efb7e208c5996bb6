use hardy_stein::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn remainder_nonnegative(a in -1e3f64..1e3, b in -1e3f64..1e3, p in 1.01f64..6.0, eps in 1e-4f64..2.0) {
        let scale = a.abs().max(b.abs()).max(eps).powf(p);
        prop_assert!(f_value(a, b, p).unwrap() >= -1e-12 * scale);
        prop_assert!(f_eps_value(a, b, p, eps).unwrap() >= -1e-12 * scale);
        prop_assert!(k_value(a, b, p).unwrap() >= 0.0);
        prop_assert_eq!(f_value(a, a, p).unwrap(), 0.0);
    }

    #[test]
    fn regularized_below_plain(a in -50f64..50.0, b in -50f64..50.0, p in 1.05f64..1.95, eps in 1e-3f64..1.0) {
        let f = f_value(a, b, p).unwrap();
        prop_assert!(f_eps_value(a, b, p, eps).unwrap() <= f / (p - 1.0) + 1e-12 * (1.0 + f));
    }

    #[test]
    fn symmetrization_reconstructs(alpha in 0.1f64..1.9, cp in 0.0f64..3.0, cm in 0.0f64..3.0, y in -20f64..20.0) {
        prop_assume!(cp + cm > 0.1 && y.abs() > 1e-3);
        let nu = LevyMeasure::stable_asymmetric(1, alpha, cp, cm).unwrap();
        let s = symmetrize(&nu);
        let r = s.ratio([y, 0.0]);
        prop_assert!(r.abs() <= 1.0);
        let expected = if y > 0.0 { (cp - cm) / (cp + cm) } else { (cm - cp) / (cp + cm) };
        prop_assert!((r - expected).abs() <= 1e-12);
        let back = (1.0 + r) * s.nu_sym.density([y, 0.0]);
        prop_assert!((back - nu.density([y, 0.0])).abs() <= 1e-12 * nu.density([y, 0.0]).max(1e-300));
        prop_assert_eq!(s.nu_sym.density([y, 0.0]), s.nu_sym.density([-y, 0.0]));
    }

    #[test]
    fn exponent_conjugation(alpha in 0.1f64..1.9, cp in 0.0f64..3.0, cm in 0.0f64..3.0, xi in -50f64..50.0) {
        prop_assume!(cp + cm > 0.1);
        let psi = char_exponent(&LevyMeasure::stable_asymmetric(1, alpha, cp, cm).unwrap());
        let a = psi.eval([xi, 0.0]);
        let b = psi.eval([-xi, 0.0]);
        prop_assert!(a.re >= 0.0);
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup_contracts(alpha in 0.3f64..1.9, cp in 0.1f64..3.0, cm in 0.0f64..3.0, t in 0.01f64..3.0, seed in 0u64..1000) {
        let grid = Grid::new(1, 256, 20.0).unwrap();
        let f = hardy_stein::testfns::random_smooth(&grid, 3, seed);
        let op = SemigroupOperator::new(&char_exponent(&LevyMeasure::stable_asymmetric(1, alpha, cp, cm).unwrap()), &grid, Variant::Forward).unwrap();
        for variant in [Variant::Forward, Variant::Dual, Variant::Symmetrized] {
            let g = op.with_variant(variant).apply(t, &f).unwrap();
            for p in [1.5, 2.0, 3.0] {
                prop_assert!(g.norm(p) <= f.norm(p) * (1.0 + 1e-10));
            }
        }
    }
}
