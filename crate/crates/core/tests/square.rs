use hardy_stein::square::square_function_of;
use hardy_stein::testfns::{random_smooth, remove_mean, zero_mean_family};
use hardy_stein::*;

fn nu() -> LevyMeasure {
    LevyMeasure::stable_asymmetric(1, 1.2, 2.0, 1.0).unwrap()
}

fn quad() -> QuadSpec {
    QuadSpec::default()
}

#[test]
fn plancherel_ratio_and_starred_below_full() {
    let grid = Grid::new(1, 1024, 40.0).unwrap();
    let report = norm_equivalence_report(
        &nu(),
        &zero_mean_family(&grid),
        &[SquareVariant::Full],
        &[2.0],
        &quad(),
    )
    .unwrap();
    assert_eq!(report.rows.len(), 5);
    for row in &report.rows {
        assert!((0.98..=1.02).contains(&row.ratio), "{row:?}");
    }
    for (i, f) in zero_mean_family(&grid).iter().enumerate() {
        let full = square_function_of(&nu(), f, SquareVariant::Full, None, &quad(), &[2.0]).unwrap();
        let star = square_function_of(&nu(), f, SquareVariant::Starred, Some(full.t_max), &quad(), &[2.0]).unwrap();
        let g = full.g_values.real_values();
        let s = star.g_values.real_values();
        assert!(g.iter().chain(&s).all(|v| *v >= 0.0));
        let violations = g.iter().zip(&s).filter(|(a, b)| b > a).count();
        assert_eq!(violations, 0, "function {i}");
        assert!(full.energy_defect(f).abs() <= 1e-2, "function {i}: {}", full.energy_defect(f));
    }
}

#[test]
fn ratios_stable_under_refinement() {
    let family: Vec<_> = [1024usize, 2048]
        .iter()
        .map(|n| zero_mean_family(&Grid::new(1, *n, 40.0).unwrap()))
        .collect();
    let variants = [SquareVariant::Full, SquareVariant::Starred];
    let ps = [1.5, 3.0];
    let coarse = norm_equivalence_report(&nu(), &family[0][..2], &variants, &ps, &quad()).unwrap();
    let fine = norm_equivalence_report(&nu(), &family[1][..2], &variants, &ps, &quad()).unwrap();
    for (a, b) in coarse.rows.iter().zip(&fine.rows) {
        assert!(a.ratio > 0.0 && a.ratio.is_finite());
        assert!((a.ratio - b.ratio).abs() <= 0.05 * b.ratio, "{a:?} {b:?}");
    }
}

#[test]
fn homogeneity() {
    let grid = Grid::new(1, 512, 20.0).unwrap();
    let f = remove_mean(&random_smooth(&grid, 3, 4));
    let a = square_function_of(&nu(), &f, SquareVariant::Full, Some(4.0), &quad(), &[2.0]).unwrap();
    let b = square_function_of(&nu(), &f.scaled(2.0), SquareVariant::Full, Some(4.0), &quad(), &[2.0]).unwrap();
    let c = square_function_of(&nu(), &f.scaled(-0.5), SquareVariant::Starred, Some(4.0), &quad(), &[2.0]).unwrap();
    let d = square_function_of(&nu(), &f, SquareVariant::Starred, Some(4.0), &quad(), &[2.0]).unwrap();
    for (x, y) in a.g_values.real_values().iter().zip(b.g_values.real_values()) {
        assert!((2.0 * x - y).abs() <= 1e-12 * (1.0 + y));
    }
    for (x, y) in d.g_values.real_values().iter().zip(c.g_values.real_values()) {
        assert!((0.5 * x - y).abs() <= 1e-12 * (1.0 + x));
    }
}

#[test]
fn zero_function_and_rejections() {
    let grid = Grid::new(1, 256, 20.0).unwrap();
    let z = GridFunction::zeros(&grid);
    let r = square_function_of(&nu(), &z, SquareVariant::Full, None, &quad(), &[2.0]).unwrap();
    assert!(r.g_values.real_values().iter().all(|v| *v == 0.0));

    let psi = char_exponent(&nu());
    let fwd = SemigroupOperator::new(&psi, &grid, Variant::Forward).unwrap();
    let sym = fwd.with_variant(Variant::Symmetrized);
    let f = remove_mean(&random_smooth(&grid, 2, 1));
    assert!(square_function(&sym, &nu(), &f, SquareVariant::Full, Some(1.0), &quad(), &[2.0]).is_err());
    let nu_sym = symmetrize(&nu()).nu_sym;
    assert!(square_function(&fwd, &nu_sym, &f, SquareVariant::Full, Some(1.0), &quad(), &[2.0]).is_err());
    assert!(square_function(&sym, &nu_sym, &f, SquareVariant::Full, Some(1.0), &quad(), &[2.0]).is_ok());
}

#[test]
fn two_dimensional_energy() {
    let grid = Grid::new(2, 64, 10.0).unwrap();
    let f = remove_mean(&random_smooth(&grid, 3, 6));
    let nu = LevyMeasure::stable_asymmetric(2, 1.2, 1.0, 1.0).unwrap();
    let full = square_function_of(&nu, &f, SquareVariant::Full, None, &quad(), &[2.0]).unwrap();
    assert!(full.energy_defect(&f).abs() <= 2e-2, "{}", full.energy_defect(&f));
    let star = square_function_of(&nu, &f, SquareVariant::Starred, Some(full.t_max), &quad(), &[2.0]).unwrap();
    assert!(star.p_norms[0].g_norm <= full.p_norms[0].g_norm * (1.0 + 1e-2));
}
