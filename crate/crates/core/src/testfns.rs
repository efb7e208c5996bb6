//! Smooth test functions placed well inside the periodic cell.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Grid, GridFunction, Point};

fn r2(x: Point, dim: usize) -> f64 {
    if dim == 1 {
        x[0] * x[0]
    } else {
        x[0] * x[0] + x[1] * x[1]
    }
}

/// `exp(-|x|^2 / (2 s^2))`.
pub fn gaussian_bump(grid: &Grid, s: f64) -> GridFunction {
    let d = grid.dim();
    GridFunction::from_fn(grid, |x| (-r2(x, d) / (2.0 * s * s)).exp())
}

/// Five zero-mean functions of unit scale.
pub fn zero_mean_family(grid: &Grid) -> Vec<GridFunction> {
    let d = grid.dim();
    let g = |x: Point, c: f64, s: f64| (-r2([x[0] - c, x[1]], d) / (2.0 * s * s)).exp();
    let mut out = vec![
        GridFunction::from_fn(grid, |x| x[0] * g(x, 0.0, 1.0)),
        GridFunction::from_fn(grid, |x| g(x, -1.5, 1.0) - g(x, 1.5, 1.0)),
        GridFunction::from_fn(grid, |x| (1.0 - r2(x, d)) * g(x, 0.0, 1.0)),
        GridFunction::from_fn(grid, |x| (3.0 * x[0]).sin() * g(x, 0.0, 1.5)),
    ];
    out.push(remove_mean(&random_smooth(grid, 5, 17)));
    out.into_iter().map(|f| remove_mean(&f)).collect()
}

/// Sum of `terms` Gaussians with random centers, widths and signs.
pub fn random_smooth(grid: &Grid, terms: usize, seed: u64) -> GridFunction {
    let d = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 0.25 * grid.half_width();
    let bumps: Vec<(Point, f64, f64)> = (0..terms)
        .map(|_| {
            let c = [rng.random_range(-span..span), if d == 2 { rng.random_range(-span..span) } else { 0.0 }];
            (c, rng.random_range(0.5..1.5), rng.random_range(-1.0..1.0))
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, s, a)| a * (-r2([x[0] - c[0], x[1] - c[1]], d) / (2.0 * s * s)).exp())
            .sum()
    })
}

/// Subtracts the mean times a wide bump of unit integral, so that the
/// result stays concentrated and integrates to zero on the grid.
pub fn remove_mean(f: &GridFunction) -> GridFunction {
    let grid = f.grid();
    let wide = gaussian_bump(grid, 2.0);
    let m = f.integral().re / wide.integral().re;
    f.sub(&wide.scaled(m)).expect("same grid")
}
