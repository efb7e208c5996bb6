use std::f64::consts::PI;

use hardy_stein::testfns::{gaussian_bump, random_smooth};
use hardy_stein::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cauchy() -> LevyMeasure {
    LevyMeasure::stable_asymmetric(1, 1.0, 1.0 / PI, 1.0 / PI).unwrap()
}

fn measures() -> Vec<LevyMeasure> {
    vec![
        cauchy(),
        LevyMeasure::stable_asymmetric(1, 1.2, 2.0, 1.0).unwrap(),
        LevyMeasure::stable_asymmetric(1, 1.5, 0.5, 0.0).unwrap(),
        LevyMeasure::tempered_stable(1, 0.8, 1.0, 2.0, 1.0, 3.0).unwrap(),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn plancherel_norm_of_evolved_gaussian() {
    let grid = Grid::new(1, 4096, 40.0).unwrap();
    let f = gaussian_bump(&grid, 1.0);
    let op = SemigroupOperator::new(&char_exponent(&cauchy()), &grid, Variant::Forward).unwrap();
    let got = semigroup_apply(&op, 1.0, &f).unwrap().norm(2.0);
    // lattice sum of (2 pi)^{-1} |f^|^2 e^{-2|xi|} with the analytic transform
    let dk = grid.frequency_spacing();
    let lattice: f64 = (-20000i64..=20000)
        .map(|k| {
            let xi = k as f64 * dk;
            2.0 * PI * (-xi * xi).exp() * (-2.0 * xi.abs()).exp()
        })
        .sum::<f64>()
        * dk
        / (2.0 * PI);
    assert!(rel(got, lattice.sqrt()) < 1e-8, "{got} vs {}", lattice.sqrt());
    // the continuum value differs by the periodized Cauchy tail
    let continuum = (PI.sqrt() * libm::erfc(1.0) * 1f64.exp()).sqrt();
    assert!(rel(got, continuum) < 2e-3);
}

#[test]
fn parseval_and_plancherel() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let f = random_smooth(&grid, 6, 1);
    let g = random_smooth(&grid, 6, 2);
    let (fh, gh) = (fourier_forward(&f), fourier_forward(&g));
    let spectral = fh.parseval(&gh).unwrap();
    let spatial = f.inner(&g).unwrap();
    assert!(rel(spectral.re, spatial) < 1e-10 && spectral.im.abs() < 1e-10 * spatial.abs());
    assert!(rel(fh.parseval(&fh).unwrap().re, f.norm_pow(2.0)) < 1e-10);
    let back = fourier_inverse(&fh);
    let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12);
}

#[test]
fn duality_and_semigroup_law() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let f = random_smooth(&grid, 5, 3);
    let g = random_smooth(&grid, 5, 4);
    for nu in measures() {
        let fwd = SemigroupOperator::new(&char_exponent(&nu), &grid, Variant::Forward).unwrap();
        let dual = fwd.with_variant(Variant::Dual);
        let sym = fwd.with_variant(Variant::Symmetrized);
        let lhs = fwd.apply(0.7, &f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&dual.apply(0.7, &g).unwrap()).unwrap();
        assert!(rel(lhs, rhs) < 1e-10);

        let two_step = fwd.apply(0.3, &fwd.apply(0.5, &f).unwrap()).unwrap();
        let one_step = fwd.apply(0.8, &f).unwrap();
        let d = two_step.sub(&one_step).unwrap().norm(f64::INFINITY);
        assert!(d < 1e-10 * f.norm(f64::INFINITY));

        let halves = dual.apply(0.5, &fwd.apply(0.5, &f).unwrap()).unwrap();
        let d = halves.sub(&sym.apply(1.0, &f).unwrap()).unwrap().norm(f64::INFINITY);
        assert!(d < 1e-10 * f.norm(f64::INFINITY));
    }
}

#[test]
fn contraction_in_every_variant() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (k, nu) in measures().iter().enumerate() {
        let fwd = SemigroupOperator::new(&char_exponent(nu), &grid, Variant::Forward).unwrap();
        for variant in [Variant::Forward, Variant::Dual, Variant::Symmetrized] {
            let op = fwd.with_variant(variant);
            let f = random_smooth(&grid, 4, 100 + k as u64);
            let t = rng.random_range(0.05..2.0);
            let g = op.apply(t, &f).unwrap();
            assert!(g.max_abs_imag() <= 1e-12);
            for p in [1.5, 2.0, 3.0] {
                assert!(g.norm(p) <= f.norm(p) * (1.0 + 1e-10), "{variant:?} p {p}");
            }
        }
    }
}

#[test]
fn stable_density_has_unit_mass() {
    let grid = Grid::new(1, 4096, 40.0).unwrap();
    let nu = LevyMeasure::stable_asymmetric(1, 1.5, 1.0, 1.0).unwrap();
    let op = SemigroupOperator::new(&char_exponent(&nu), &grid, Variant::Forward).unwrap();
    let p = transition_density(&op, 1.0).unwrap();
    assert!((p.integral().re - 1.0).abs() < 1e-8);
    assert!(p.real_values().iter().all(|v| *v > -1e-10));
}

#[test]
fn density_bounded_by_ultra_constant() {
    let grid = Grid::new(1, 4096, 40.0).unwrap();
    let cases = [(0, 0.5), (1, 1.0), (2, 2.0), (3, 1.0), (1, 3.0)];
    let all = measures();
    for (i, t) in cases {
        let op = SemigroupOperator::new(&char_exponent(&all[i]), &grid, Variant::Forward).unwrap();
        let p = transition_density(&op, t).unwrap();
        let c = ultra_constant(&op, t).unwrap();
        let sup = p.real_values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(sup <= c.torus * (1.0 + 1e-12), "case {i} t {t}: {sup} > {}", c.torus);
    }
}

#[test]
fn cauchy_ultra_constant_closed_form_and_monotone() {
    let grid = Grid::new(1, 4096, 40.0).unwrap();
    let op = SemigroupOperator::new(&char_exponent(&cauchy()), &grid, Variant::Forward).unwrap();
    let mut prev = f64::INFINITY;
    for t in [0.5, 1.0, 2.0, 4.0] {
        let c = ultra_constant(&op, t).unwrap();
        assert!((c.continuum - 1.0 / (PI * t)).abs() < 1e-8);
        assert!(c.continuum < prev);
        prev = c.continuum;
    }
    for nu in measures() {
        let op = SemigroupOperator::new(&char_exponent(&nu), &grid, Variant::Forward).unwrap();
        let c: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|t| ultra_constant(&op, *t).unwrap().continuum).collect();
        assert!(c[0] > c[1] && c[1] > c[2]);
    }
}

#[test]
fn sup_bound_from_ultracontractivity() {
    let grid = Grid::new(1, 2048, 40.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let all = measures();
    for k in 0..20 {
        let nu = &all[k % all.len()];
        let op = SemigroupOperator::new(&char_exponent(nu), &grid, Variant::Forward).unwrap();
        let p = [1.5, 2.0, 3.0][k % 3];
        let t = [0.5, 1.0][k % 2];
        let f = random_smooth(&grid, rng.random_range(1..6), 1000 + k as u64);
        let c = ultra_constant(&op, t).unwrap().torus;
        let lhs = op.apply(t, &f).unwrap().norm(f64::INFINITY);
        assert!(lhs <= c.powf(1.0 / p) * f.norm(p) + 1e-10, "case {k}");
    }
}

#[test]
fn aliasing_guard_rejects_short_times() {
    let grid = Grid::new(1, 64, 40.0).unwrap();
    let op = SemigroupOperator::new(&char_exponent(&cauchy()), &grid, Variant::Forward).unwrap();
    assert!(transition_density(&op, 1e-3).is_err());
    assert!(ultra_constant(&op, 1e-3).is_err());
}

#[test]
fn exponent_invariants() {
    for nu in measures() {
        let psi = char_exponent(&nu);
        assert_eq!(psi.eval([0.0, 0.0]).norm(), 0.0);
        for xi in [0.3, 1.0, 7.5, -2.0] {
            let v = psi.eval([xi, 0.0]);
            let w = psi.eval([-xi, 0.0]);
            assert!(v.re >= 0.0);
            assert!((v - w.conj()).norm() <= 1e-12 * v.norm());
        }
    }
    let q = quadrature_exponent(&LevyMeasure::stable_asymmetric(1, 1.2, 2.0, 1.0).unwrap());
    assert!(q.eval([2.0, 0.0]).im.abs() > 1e-3);
}

#[test]
fn two_dimensional_round_trip_and_contraction() {
    let grid = Grid::new(2, 64, 10.0).unwrap();
    let f = random_smooth(&grid, 4, 5);
    let back = fourier_inverse(&fourier_forward(&f));
    let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12);
    let nu = LevyMeasure::stable_asymmetric(2, 1.2, 2.0, 1.0).unwrap();
    let op = SemigroupOperator::new(&char_exponent(&nu), &grid, Variant::Forward).unwrap();
    let g = op.apply(0.5, &f).unwrap();
    assert!(g.norm(2.0) <= f.norm(2.0) * (1.0 + 1e-10));
}
