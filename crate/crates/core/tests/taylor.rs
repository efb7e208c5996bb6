use hardy_stein::{comparability_scan, f_eps_value, f_value, k_value, TaylorRemainder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn heavy(rng: &mut ChaCha8Rng) -> f64 {
    let m: f64 = rng.random_range(-6.0..6.0);
    let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
    s * 10f64.powf(m / 2.0)
}

#[test]
fn nonnegative_on_a_million_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for i in 0..1_000_000 {
        let p = rng.random_range(1.0..6.0) + 1e-9;
        let a = heavy(&mut rng);
        let b = if i % 4 == 0 { a * (1.0 + 1e-6 * rng.random_range(-1.0..1.0)) } else { heavy(&mut rng) };
        let eps = 10f64.powf(rng.random_range(-4.0..1.0));
        let scale = a.abs().max(b.abs()).max(eps).powf(p);
        for v in [
            f_value(a, b, p).unwrap(),
            f_eps_value(a, b, p, eps).unwrap(),
            k_value(a, b, p).unwrap(),
        ] {
            worst = worst.min(v / scale);
        }
    }
    assert!(worst >= -1e-12, "most negative normalized value {worst}");
}

#[test]
fn f_eps_below_f_over_p_minus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [1.2, 1.5, 1.9] {
        for eps in [0.1, 1.0] {
            for _ in 0..100_000 {
                let a = heavy(&mut rng);
                let b = heavy(&mut rng);
                let fe = f_eps_value(a, b, p, eps).unwrap();
                let f = f_value(a, b, p).unwrap();
                assert!(fe <= f / (p - 1.0) + 1e-12 * (1.0 + f), "p {p} eps {eps} a {a} b {b}");
            }
        }
    }
}

#[test]
fn f_eps_converges_to_f() {
    let f = f_value(1.3, -0.7, 1.5).unwrap();
    let mut prev = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4, 1e-6] {
        let d = (f_eps_value(1.3, -0.7, 1.5, eps).unwrap() - f).abs();
        assert!(d <= prev);
        prev = d;
    }
    assert!(prev <= 1e-6);
}

#[test]
fn small_increment_matches_second_derivative() {
    for p in [1.5, 3.0, 4.5] {
        for a in [0.7, -2.0] {
            let target = |h: f64| p * (p - 1.0) / 2.0 * f64::abs(a).powf(p - 2.0) * h * h;
            let devs: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&h| (f_value(a, a + h, p).unwrap() / target(h) - 1.0).abs())
                .collect();
            // the defect is first order in h
            assert!(devs[1] < 0.2 * devs[0] && devs[2] < 0.2 * devs[1], "{devs:?}");
            assert!(devs[2] < 1e-3);
        }
    }
}

#[test]
fn closed_values() {
    assert_eq!(f_value(1.0, 2.0, 3.0).unwrap(), 4.0);
    assert_eq!(f_value(0.0, -3.0, 1.5).unwrap(), 3f64.powf(1.5));
    assert_eq!(f_value(2.5, 2.5, 1.7).unwrap(), 0.0);
    assert!(f_value(1.0, 2.0, 1.0).is_err());
    assert!(f_value(f64::NAN, 2.0, 3.0).is_err());
    let rem = TaylorRemainder::new(2.0, 0.0).unwrap();
    assert_eq!(rem.value(-1.25, 3.0), 4.25 * 4.25);
}

// Envelopes recorded with seed 2024 and 10^6 samples; regression bounds only.
const ENVELOPES: [(f64, f64, f64); 5] = [
    (1.2, 0.120000, 1.511382),
    (1.5, 0.375000, 1.231843),
    (1.9, 0.855000, 1.035177),
    (3.0, 0.779763, 3.000000),
    (4.0, 0.666667, 6.000000),
];

#[test]
fn comparability_envelope_regression() {
    for (p, lo, hi) in ENVELOPES {
        let s = comparability_scan(p, 1_000_000, 2024).unwrap();
        assert!(s.ratio_min > 0.0 && s.ratio_max.is_finite());
        assert!((s.ratio_min - lo).abs() <= 1e-6 && (s.ratio_max - hi).abs() <= 1e-6, "{s:?}");
        // other seeds stay inside the recorded band
        let t = comparability_scan(p, 100_000, 9).unwrap();
        assert!(t.ratio_min >= lo - 1e-6 && t.ratio_max <= hi + 1e-6, "{t:?}");
    }
}

#[test]
fn p_three_floor() {
    let s = comparability_scan(3.0, 1_000_000, 5).unwrap();
    assert!(s.ratio_min >= 0.5);
}
