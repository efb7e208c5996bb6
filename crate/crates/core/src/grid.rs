//! Periodized functions on a uniform box grid with FFT access.
//!
//! Conventions follow `f^(xi) = int f(x) e^{-i x.xi} dx` and
//! `f(x) = (2 pi)^{-d} int f^(xi) e^{i x.xi} dxi`. Grid points are
//! `x_j = -L + j h` with `h = 2L/N`; frequencies are `xi_k = pi k / L` with the
//! signed index `k` in FFT order.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Point or frequency in at most two dimensions; unused components are zero.
pub type Point = [f64; 2];

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: Point) -> f64 {
    (a[0] * a[0] + a[1] * a[1]).sqrt()
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid on `[-L, L)^d`, `d` in {1, 2}.
#[derive(Clone)]
pub struct Grid {
    dim: usize,
    n: usize,
    half_width: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("half_width", &self.half_width)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.half_width == other.half_width
    }
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::param("dim", format!("{dim} not in {{1, 2}}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::param("n", format!("{n} is not a power of two >= 4")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::param("half_width", format!("{half_width}")));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Ok(Grid {
            dim,
            n,
            half_width,
            plans: Arc::new(plans),
        })
    }

    /// N = 4096, L = 40 in one dimension; N = 256, L = 20 in two.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Grid::new(1, 4096, 40.0),
            2 => Grid::new(2, 256, 20.0),
            _ => Err(Error::param("dim", format!("{dim} not in {{1, 2}}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    pub fn frequency_spacing(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Largest representable frequency magnitude per axis.
    pub fn nyquist(&self) -> f64 {
        self.frequency_spacing() * (self.n / 2) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    fn axes(&self, idx: usize) -> (usize, usize) {
        if self.dim == 1 {
            (idx, 0)
        } else {
            (idx / self.n, idx % self.n)
        }
    }

    pub fn point(&self, idx: usize) -> Point {
        let (i, j) = self.axes(idx);
        if self.dim == 1 {
            [self.coordinate(i), 0.0]
        } else {
            [self.coordinate(i), self.coordinate(j)]
        }
    }

    pub(crate) fn signed(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    pub fn frequency(&self, idx: usize) -> Point {
        let (i, j) = self.axes(idx);
        let dk = self.frequency_spacing();
        if self.dim == 1 {
            [dk * self.signed(i) as f64, 0.0]
        } else {
            [dk * self.signed(i) as f64, dk * self.signed(j) as f64]
        }
    }

    /// All frequencies that alias onto index `idx`: the Nyquist component of
    /// each axis appears with both signs.
    pub fn aliases(&self, idx: usize) -> Vec<Point> {
        let xi = self.frequency(idx);
        let (i, j) = self.axes(idx);
        let half = self.n / 2;
        let mut out = vec![xi];
        if i == half {
            let extra: Vec<Point> = out.iter().map(|p| [-p[0], p[1]]).collect();
            out.extend(extra);
        }
        if self.dim == 2 && j == half {
            let extra: Vec<Point> = out.iter().map(|p| [p[0], -p[1]]).collect();
            out.extend(extra);
        }
        out
    }

    pub(crate) fn is_nyquist_index(&self, idx: usize) -> bool {
        let (i, j) = self.axes(idx);
        i == self.n / 2 || (self.dim == 2 && j == self.n / 2)
    }

    /// Tabulates a Fourier multiplier in FFT order. At Nyquist indices the
    /// value is averaged over the aliases, which keeps real inputs real
    /// whenever `m(-xi) = conj m(xi)`.
    pub fn multiplier(&self, m: impl Fn(Point) -> Complex64) -> Vec<Complex64> {
        (0..self.len())
            .map(|idx| {
                if self.is_nyquist_index(idx) {
                    let al = self.aliases(idx);
                    let s: Complex64 = al.iter().map(|xi| m(*xi)).sum();
                    s / al.len() as f64
                } else {
                    m(self.frequency(idx))
                }
            })
            .collect()
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(buf.len(), self.len());
        plan.process(buf);
        if self.dim == 2 {
            let n = self.n;
            let mut t = vec![Complex64::new(0.0, 0.0); buf.len()];
            transpose(buf, &mut t, n);
            plan.process(&mut t);
            transpose(&t, buf, n);
        }
    }

    /// Unnormalized forward DFT over all axes.
    pub(crate) fn forward_raw(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.plans.forward);
    }

    /// Unnormalized inverse DFT over all axes.
    pub(crate) fn inverse_raw(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.plans.inverse);
    }

    /// Fourier-series coefficients `c_k` with `u_j = sum_k c_k e^{2 pi i j k / N}`.
    pub(crate) fn coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward_raw(&mut buf);
        let scale = 1.0 / self.len() as f64;
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }

    pub(crate) fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.inverse_raw(&mut buf);
        buf
    }

    pub(crate) fn synthesize_real(&self, coeffs: &[Complex64], out: &mut Vec<f64>) {
        let mut buf = coeffs.to_vec();
        self.inverse_raw(&mut buf);
        out.clear();
        out.extend(buf.iter().map(|c| c.re));
    }

    /// Index of the grid point `idx` shifted by `offset` grid steps per axis.
    pub(crate) fn cyclic_index(&self, idx: usize, offset: [i64; 2]) -> usize {
        let n = self.n as i64;
        let (i, j) = self.axes(idx);
        let si = (i as i64 + offset[0]).rem_euclid(n) as usize;
        if self.dim == 1 {
            si
        } else {
            let sj = (j as i64 + offset[1]).rem_euclid(n) as usize;
            si * self.n + sj
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            dst[j * n + i] = src[i * n + j];
        }
    }
}

/// A periodized function sampled on a [`Grid`].
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
    real: bool,
}

impl GridFunction {
    pub fn from_real(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite sample"));
        }
        Ok(GridFunction {
            grid: grid.clone(),
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            real: true,
        })
    }

    pub fn from_complex(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::param("values", "non-finite sample"));
        }
        Ok(GridFunction {
            grid: grid.clone(),
            values,
            real: false,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| Complex64::new(f(grid.point(i)), 0.0))
            .collect();
        GridFunction {
            grid: grid.clone(),
            values,
            real: true,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            real: true,
        }
    }

    /// Builds a real function from complex samples, dropping the imaginary part.
    pub(crate) fn real_from_complex(grid: &Grid, values: Vec<Complex64>) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: values.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
            real: true,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// `||f||_p` by the rectangle rule; `p = inf` gives the maximum modulus.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().fold(0.0, |m, v| m.max(v.norm()));
        }
        let terms: Vec<f64> = self.values.iter().map(|v| v.norm().powf(p)).collect();
        (self.grid.cell_volume() * crate::quadrature::pairwise_sum(&terms)).powf(1.0 / p)
    }

    /// `||f||_p^p`.
    pub fn norm_pow(&self, p: f64) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|v| v.norm().powf(p)).collect();
        self.grid.cell_volume() * crate::quadrature::pairwise_sum(&terms)
    }

    /// `<f, g> = int f g dx` (bilinear, real parts).
    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        let terms: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a * b).re)
            .collect();
        Ok(self.grid.cell_volume() * crate::quadrature::pairwise_sum(&terms))
    }

    pub fn integral(&self) -> Complex64 {
        let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
        let h = self.grid.cell_volume();
        Complex64::new(
            h * crate::quadrature::pairwise_sum(&re),
            h * crate::quadrature::pairwise_sum(&im),
        )
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            real: self.real,
        }
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            real: self.real && other.real,
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            real: self.real && other.real,
        })
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Fraction of `||f||_1` carried outside the middle half of the box.
    pub fn wraparound_fraction(&self) -> f64 {
        let l = self.grid.half_width();
        let mut outer = 0.0;
        let mut total = 0.0;
        for (idx, v) in self.values.iter().enumerate() {
            let p = self.grid.point(idx);
            let a = v.norm();
            total += a;
            if p[0].abs() > 0.5 * l || p[1].abs() > 0.5 * l {
                outer += a;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }

    /// Rejects functions whose mass outside the middle half exceeds `1e-10 ||f||_1`.
    pub fn check_support(&self) -> Result<()> {
        let frac = self.wraparound_fraction();
        if frac > 1e-10 {
            return Err(Error::param(
                "f",
                format!("wraparound mass fraction {frac:e} exceeds 1e-10; enlarge L"),
            ));
        }
        Ok(())
    }

    /// Periodic six-point Lagrange interpolation of the real part (1-d only).
    pub fn interpolate(&self, x: f64) -> f64 {
        assert_eq!(self.grid.dim(), 1, "interpolation is implemented for d = 1");
        let h = self.grid.spacing();
        let n = self.grid.points_per_axis() as i64;
        let s = (x + self.grid.half_width()) / h;
        let base = s.floor();
        let frac = s - base;
        let base = base as i64;
        let mut acc = 0.0;
        for m in -2i64..=3 {
            let mut w = 1.0;
            for k in -2i64..=3 {
                if k != m {
                    w *= (frac - k as f64) / (m - k) as f64;
                }
            }
            let idx = (base + m).rem_euclid(n) as usize;
            acc += w * self.values[idx].re;
        }
        acc
    }

    /// Fourier-series coefficients of the samples.
    pub(crate) fn coefficients(&self) -> Vec<Complex64> {
        self.grid.coefficients(&self.values)
    }
}

/// Samples of `f^(xi_k)` in FFT order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn frequency(&self, idx: usize) -> Point {
        self.grid.frequency(idx)
    }

    /// `(2 pi)^{-d} int f^ conj(g^) dxi` on the frequency lattice.
    pub fn parseval(&self, other: &Spectrum) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("spectra on different grids".into()));
        }
        let dxi = (self.grid.frequency_spacing() / (2.0 * std::f64::consts::PI))
            .powi(self.grid.dim() as i32);
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * dxi)
    }
}

pub(crate) fn phase(grid: &Grid, idx: usize) -> f64 {
    // e^{i xi_k L} per axis = (-1)^k
    let xi = grid.frequency(idx);
    let dk = grid.frequency_spacing();
    let k0 = (xi[0] / dk).round() as i64;
    let k1 = (xi[1] / dk).round() as i64;
    if (k0 + k1).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Discrete approximation of `f^(xi) = int f(x) e^{-i x.xi} dx`.
pub fn fourier_forward(f: &GridFunction) -> Spectrum {
    let grid = f.grid.clone();
    let mut buf = f.values.clone();
    grid.forward_raw(&mut buf);
    let h = grid.cell_volume();
    for (idx, v) in buf.iter_mut().enumerate() {
        *v *= h * phase(&grid, idx);
    }
    Spectrum { grid, values: buf }
}

/// Inverse of [`fourier_forward`].
pub fn fourier_inverse(s: &Spectrum) -> GridFunction {
    let grid = s.grid.clone();
    let mut buf: Vec<Complex64> = s
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| v * phase(&grid, idx))
        .collect();
    grid.inverse_raw(&mut buf);
    let scale = 1.0 / grid.volume();
    for v in &mut buf {
        *v *= scale;
    }
    GridFunction {
        grid,
        values: buf,
        real: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(3, 64, 1.0).is_err());
        assert!(Grid::new(1, 100, 1.0).is_err());
        assert!(Grid::new(1, 64, -1.0).is_err());
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let grid = Grid::new(1, 4096, 20.0).unwrap();
        let f = GridFunction::from_fn(&grid, |x| (-0.5 * x[0] * x[0]).exp());
        let s = fourier_forward(&f);
        for (idx, v) in s.values().iter().enumerate() {
            let xi = s.frequency(idx)[0];
            if xi.abs() <= 5.0 {
                let exact = (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * xi * xi).exp();
                assert!((v - exact).norm() < 1e-8, "xi={xi} {v} vs {exact}");
            }
        }
    }

    #[test]
    fn zero_transforms_to_zero() {
        let grid = Grid::new(2, 16, 3.0).unwrap();
        let s = fourier_forward(&GridFunction::zeros(&grid));
        assert!(s.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn round_trip_in_two_dimensions() {
        let grid = Grid::new(2, 32, 4.0).unwrap();
        let f = GridFunction::from_fn(&grid, |p| (-(p[0] - 0.3).powi(2) - 2.0 * p[1] * p[1]).exp() * (1.0 + p[0]));
        let back = fourier_inverse(&fourier_forward(&f));
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn aliases_cover_nyquist_axes() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        assert_eq!(grid.aliases(4 * 8 + 4).len(), 4);
        assert_eq!(grid.aliases(4 * 8 + 1).len(), 2);
        assert_eq!(grid.aliases(1).len(), 1);
    }

    #[test]
    fn interpolation_reproduces_smooth_function() {
        let grid = Grid::new(1, 1024, 10.0).unwrap();
        let f = GridFunction::from_fn(&grid, |x| (-x[0] * x[0]).exp());
        for &x in &[0.0123, -1.777, 2.5] {
            assert!((f.interpolate(x) - (-x * x as f64).exp()).abs() < 1e-8);
        }
    }
}
