use std::f64::consts::PI;

use hardy_stein::identity::{identity_lhs, infinite_horizon_report, verify_identity_eps};
use hardy_stein::testfns::{gaussian_bump, random_smooth, remove_mean};
use hardy_stein::*;

fn cauchy() -> LevyMeasure {
    LevyMeasure::stable_asymmetric(1, 1.0, 1.0 / PI, 1.0 / PI).unwrap()
}

fn asym() -> LevyMeasure {
    LevyMeasure::stable_asymmetric(1, 1.2, 2.0, 1.0).unwrap()
}

fn one_level() -> QuadSpec {
    QuadSpec {
        refine_levels: 0,
        ..QuadSpec::default()
    }
}

/// `(2 pi)^{-1} sum_k |f^(xi_k)|^2 (1 - e^{-2T|xi_k|}) dxi` for the unit
/// Gaussian, using its analytic transform.
fn cauchy_gaussian_oracle(grid: &Grid, horizon: f64) -> f64 {
    let dk = grid.frequency_spacing();
    let terms: f64 = (1i64..=20000)
        .map(|k| {
            let xi = k as f64 * dk;
            2.0 * 2.0 * PI * (-xi * xi).exp() * (1.0 - (-2.0 * horizon * xi).exp())
        })
        .sum();
    terms * dk / (2.0 * PI)
}

#[test]
fn p_two_against_plancherel_oracle() {
    let grid = Grid::new(1, 4096, 40.0).unwrap();
    let f = gaussian_bump(&grid, 1.0);
    let oracle = cauchy_gaussian_oracle(&grid, 1.0);
    let r = verify_identity(&char_exponent(&cauchy()), &f, 2.0, 1.0, &QuadSpec::default()).unwrap();
    assert!((r.lhs - oracle).abs() < 1e-10 * oracle, "lhs {} oracle {oracle}", r.lhs);
    let errs: Vec<f64> = r.refinement_trace.iter().map(|e| (e.rhs - oracle).abs() / oracle).collect();
    assert_eq!(errs.len(), 3);
    assert!(errs[0] <= 1e-3, "{errs:?}");
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    assert!(r.converging());
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
}

#[test]
fn zero_and_tiny_horizon() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let psi = char_exponent(&asym());
    assert_eq!(hardy_stein_rhs(&psi, &GridFunction::zeros(&grid), 3.0, 1.0, &one_level()).unwrap(), 0.0);
    let f = gaussian_bump(&grid, 1.0);
    for p in [1.5, 3.0] {
        let v = hardy_stein_rhs(&psi, &f, p, 1e-4, &one_level()).unwrap();
        assert!(v >= 0.0 && v <= 1e-3 * f.norm_pow(p), "p {p}: {v}");
        let op = SemigroupOperator::new(&psi, &grid, Variant::Forward).unwrap();
        let lhs = identity_lhs(&op, &TaylorRemainder::new(p, 0.0).unwrap(), &f, 1e-4).unwrap();
        assert!((v - lhs).abs() <= 2e-2 * lhs, "p {p}: rhs {v} lhs {lhs}");
    }
}

#[test]
fn asymmetric_p_three_and_three_halves() {
    let grid = Grid::new(1, 2048, 40.0).unwrap();
    let f = random_smooth(&grid, 4, 31);
    let psi = char_exponent(&asym());
    for p in [3.0, 1.5] {
        let r = verify_identity(&psi, &f, p, 1.0, &QuadSpec { refine_levels: 1, ..QuadSpec::default() }).unwrap();
        assert!(r.rel_error <= 2e-2, "p {p}: {r:?}");
        assert!(r.converging(), "p {p}: {:?}", r.refinement_trace);
    }
}

#[test]
fn horizon_ladder_is_monotone_and_matches() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let f = gaussian_bump(&grid, 1.0);
    let psi = char_exponent(&asym());
    let mut prev = 0.0;
    for t in [0.25, 0.5, 1.0, 2.0] {
        let r = verify_identity(&psi, &f, 3.0, t, &one_level()).unwrap();
        assert!(r.rhs >= prev, "T {t}");
        assert!(r.rel_error <= 2e-2, "T {t}: {}", r.rel_error);
        prev = r.rhs;
    }
}

#[test]
fn symmetric_measure_equals_its_symmetrization() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let f = gaussian_bump(&grid, 1.0);
    let nu = LevyMeasure::stable_asymmetric(1, 1.4, 0.7, 0.7).unwrap();
    let sym = symmetrize(&nu);
    let a = hardy_stein_rhs(&char_exponent(&nu), &f, 3.0, 1.0, &one_level()).unwrap();
    let b = hardy_stein_rhs(&char_exponent(&sym.nu_sym), &f, 3.0, 1.0, &one_level()).unwrap();
    assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
}

#[test]
fn regularized_remainder_within_envelope() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let f = remove_mean(&random_smooth(&grid, 4, 12));
    let psi = char_exponent(&asym());
    let p = 1.5;
    let plain = verify_identity(&psi, &f, p, 1.0, &one_level()).unwrap();
    for eps in [1e-2, 1e-3, 1e-4] {
        let r = verify_identity_eps(&psi, &f, p, eps, 1.0, &one_level()).unwrap();
        assert!(r.rhs >= 0.0 && r.rhs <= plain.rhs / (p - 1.0), "eps {eps}: {} vs {}", r.rhs, plain.rhs);
        assert!(r.rel_error <= 2e-2, "eps {eps}: {}", r.rel_error);
    }
}

#[test]
fn infinite_horizon_bracket() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let f = remove_mean(&gaussian_bump(&grid, 1.0));
    let r = infinite_horizon_report(&char_exponent(&cauchy()), &f, 2.0, 8.0, &one_level()).unwrap();
    assert!(r.rhs <= r.norm_pow * 1.01);
    assert!((r.norm_pow - r.rhs).abs() <= r.remainder_bound + 1e-2 * r.norm_pow);
}

#[test]
fn two_dimensional_identity() {
    let grid = Grid::new(2, 64, 10.0).unwrap();
    let f = gaussian_bump(&grid, 1.0);
    let nu = LevyMeasure::stable_asymmetric(2, 1.2, 2.0, 1.0).unwrap();
    let r = verify_identity(&char_exponent(&nu), &f, 3.0, 1.0, &one_level()).unwrap();
    assert!(r.rel_error <= 5e-2, "{r:?}");
}
