//! Quadrature of increment integrals
//! `int_0^T a(t) int int G(u_t(x), u_t(x + y)) b(y) nu(dy) dx dt`
//! shared by the Hardy-Stein identity, the square functions and the
//! bilinear multiplier form.
//!
//! The y-integral is split by a smooth radial partition of unity `chi`:
//! `chi nu` is integrated on graded polar shells with exact spectral shifts,
//! `(1 - chi) nu` folded onto the torus is smooth and integrated by the
//! rectangle rule over cyclic grid shifts, `|y| < delta_c` uses the
//! second-order expansion of `G`, and mass beyond the folded images enters
//! through the torus mean of `G`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Point};
use crate::measure::{directions, LevyMeasure};
use crate::quadrature::{cap_panel_width, geometric_breaks, graded_from_zero, pairwise_sum, GaussLegendre, TimeMesh};
use crate::semigroup::SemigroupOperator;
use crate::taylor::TaylorRemainder;

/// Mesh descriptor: time nodes, radial shells, near-field cutoff in grid
/// spacings and the number of refinement levels run by verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    #[serde(default = "default_t_nodes")]
    pub t_nodes: usize,
    #[serde(default = "default_y_shells")]
    pub y_shells: usize,
    #[serde(default = "default_cut")]
    pub y_cut_factor: f64,
    #[serde(default = "default_levels")]
    pub refine_levels: usize,
}

fn default_t_nodes() -> usize {
    64
}
fn default_y_shells() -> usize {
    48
}
fn default_cut() -> f64 {
    2.0
}
fn default_levels() -> usize {
    2
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            t_nodes: 64,
            y_shells: 48,
            y_cut_factor: 2.0,
            refine_levels: 2,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.t_nodes < 4 {
            return Err(Error::param("t_nodes", "need at least 4 time nodes"));
        }
        if self.y_shells < 4 {
            return Err(Error::param("y_shells", "need at least 4 shells"));
        }
        if !(self.y_cut_factor > 0.0 && self.y_cut_factor.is_finite()) {
            return Err(Error::param("y_cut_factor", "must be positive"));
        }
        if self.refine_levels > 6 {
            return Err(Error::param("refine_levels", "at most 6"));
        }
        Ok(())
    }

    /// Mesh at refinement level `l`: twice the nodes and half the cutoff per level.
    pub fn level(&self, l: usize) -> QuadSpec {
        let k = 1usize << l;
        QuadSpec {
            t_nodes: self.t_nodes * k,
            y_shells: self.y_shells * k,
            y_cut_factor: self.y_cut_factor / k as f64,
            refine_levels: 0,
        }
    }

    /// Geometric time mesh on `[0, T]`; four decades below `min(T, 1)` with
    /// `t_nodes` per four decades.
    pub fn time_mesh(&self, horizon: f64) -> TimeMesh {
        let first = 1e-4 * horizon.min(1.0);
        let decades = (horizon / first).log10();
        let count = ((self.t_nodes as f64) * decades / 4.0).round().max(4.0) as usize;
        TimeMesh::geometric(first, horizon, count)
    }
}

/// The y-quadrature: spectral-shift nodes, cyclic-shift nodes, the
/// near-field second-moment matrix and the far-field mass.
#[derive(Debug, Clone)]
pub(crate) struct IncrementRule {
    pub polar: Vec<(Point, f64)>,
    pub cart: Vec<([i64; 2], f64)>,
    /// `sum_off w_off e^{i xi.y_off}` per frequency when the cyclic shifts
    /// are applied as a convolution.
    pub cart_symbol: Option<Vec<Complex64>>,
    pub near: [[f64; 2]; 2],
    pub tail_mass: f64,
}

impl IncrementRule {
    fn has_near(&self) -> bool {
        self.near.iter().flatten().any(|v| *v != 0.0)
    }
}

fn smooth_cut(r: f64, center: f64, width: f64) -> f64 {
    0.5 * libm::erfc((r - center) / width)
}

fn co_cut(r: f64, center: f64, width: f64) -> f64 {
    0.5 * libm::erfc((center - r) / width)
}

/// With `dense` the cyclic shifts cover every grid offset and are applied
/// by FFT convolution, which needs a kernel linear in `G(a, .)`.
pub(crate) fn build_rule(
    nu: &LevyMeasure,
    grid: &Grid,
    level: &QuadSpec,
    b: &(dyn Fn(Point) -> f64 + Sync),
    dense: bool,
) -> Result<IncrementRule> {
    if nu.dim() != grid.dim() {
        return Err(Error::GridMismatch("measure and grid dimensions differ".into()));
    }
    let dim = grid.dim();
    let zero = [[0.0; 2]; 2];
    if let Some(atoms) = nu.atoms() {
        return Ok(IncrementRule {
            polar: atoms.iter().map(|(p, m)| (*p, m * b(*p))).collect(),
            cart: vec![],
            cart_symbol: None,
            near: zero,
            tail_mass: 0.0,
        });
    }
    if nu.is_finite_activity() {
        // bounded density on a bounded support: Gauss-Legendre on each ray
        let gl = GaussLegendre::new(8);
        let mut polar = Vec::new();
        for (e, _) in directions(1, 0) {
            let (lo, hi) = nu.radial_support(e);
            if hi <= lo {
                continue;
            }
            let panels = (level.y_shells / 8).max(2);
            let br: Vec<f64> = (0..=panels).map(|k| lo + (hi - lo) * k as f64 / panels as f64).collect();
            for w in br.windows(2) {
                for (r, wt) in gl.on(w[0], w[1]) {
                    let y = [r * e[0], r * e[1]];
                    polar.push((y, wt * nu.radial_density(e, r) * b(y)));
                }
            }
        }
        return Ok(IncrementRule {
            polar,
            cart: vec![],
            cart_symbol: None,
            near: zero,
            tail_mass: 0.0,
        });
    }

    let n = grid.points_per_axis();
    let h = grid.spacing();
    let l = grid.half_width();
    let stride = match (dense, dim) {
        (true, _) => 1,
        (false, 1) => (n / 1024).max(1),
        (false, _) => (n / 64).max(1),
    };
    let step = stride as f64 * h;
    let width = 2.0 * step;
    let center = 14.0 * step;
    let outer = center + 7.0 * width;
    let cut = level.y_cut_factor * h;
    if cut >= outer {
        return Err(Error::param("y_cut_factor", "near-field cutoff exceeds the polar region"));
    }
    let alpha = nu.singularity_order();

    // Directions with angular weights.
    let dirs: Vec<(Point, f64)> = if dim == 1 {
        directions(1, 0)
    } else {
        directions(2, (level.y_shells / 4).max(8))
    };

    // Polar nodes on graded shells from the cutoff to the outer radius.
    let radial_gl = GaussLegendre::new(2);
    let shells = if dim == 1 { level.y_shells } else { (level.y_shells / 4).max(4) };
    let br = cap_panel_width(&geometric_breaks(cut, outer, shells), width);
    let mut polar = Vec::new();
    for (e, we) in &dirs {
        for w in br.windows(2) {
            for (r, wr) in radial_gl.on(w[0], w[1]) {
                let y = [r * e[0], r * e[1]];
                let weight = we * wr * nu.radial_density(*e, r) * smooth_cut(r, center, width) * b(y);
                if weight != 0.0 {
                    polar.push((y, weight));
                }
            }
        }
    }

    // Second moments inside the cutoff.
    let floor = nu.inner_cutoff().min(1e-3 * cut);
    let near_gl = GaussLegendre::new(8);
    let mut near = [[0.0; 2]; 2];
    for (e, we) in &dirs {
        let be = b([0.5 * cut * e[0], 0.5 * cut * e[1]]);
        if be == 0.0 {
            continue;
        }
        let m2 = graded_from_zero(&near_gl, floor, cut, 32, 1.0 - alpha, |r| {
            r * r * nu.radial_density(*e, r)
        });
        for i in 0..dim {
            for j in 0..dim {
                near[i][j] += we * be * m2 * e[i] * e[j];
            }
        }
    }

    // Cyclic shifts carrying (1 - chi) nu plus all periodic images.
    // Distant images are nearly uniform over a period and go to the far field.
    let max_images = if dim == 1 { 16 } else { 3 };
    let images = (((nu.outer_cutoff() - l) / (2.0 * l)).ceil().max(0.0) as i64).min(max_images);
    let per_axis = (n / stride) as i64;
    let half = per_axis / 2;
    let cell = step.powi(dim as i32);
    let offsets: Vec<[i64; 2]> = if dim == 1 {
        (-half..half).map(|j| [j * stride as i64, 0]).collect()
    } else {
        (-half..half)
            .flat_map(|i| (-half..half).map(move |j| [i * stride as i64, j * stride as i64]))
            .collect()
    };
    let cart: Vec<([i64; 2], f64)> = offsets
        .par_iter()
        .map(|off| {
            let y = [off[0] as f64 * h, off[1] as f64 * h];
            let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
            let mut terms = Vec::new();
            if r > 0.0 {
                terms.push(co_cut(r, center, width) * nu.density(y) * b(y));
            }
            let range = -images..=images;
            for mi in range.clone() {
                let mjs: Vec<i64> = if dim == 1 { vec![0] } else { range.clone().collect() };
                for mj in mjs {
                    if mi == 0 && mj == 0 {
                        continue;
                    }
                    let z = [y[0] + 2.0 * l * mi as f64, y[1] + 2.0 * l * mj as f64];
                    terms.push(nu.density(z) * b(z));
                }
            }
            (*off, cell * pairwise_sum(&terms))
        })
        .filter(|(_, w)| *w != 0.0)
        .collect();

    // Mass outside the box covered by the images.
    let reach = (2 * images + 1) as f64 * l;
    let tail_mass = if dim == 1 {
        directions(1, 0)
            .iter()
            .map(|(e, _)| b([reach * e[0], 0.0]) * nu.radial_tail(*e, reach))
            .sum()
    } else {
        let gl = GaussLegendre::new(16);
        let mut acc = 0.0;
        for k in 0..8 {
            let a = -FRAC_PI_2 + k as f64 * PI / 4.0;
            for (th, w) in gl.on(a, a + PI / 4.0) {
                let e = [th.cos(), th.sin()];
                let rb = reach / e[0].abs().max(e[1].abs());
                acc += w * b([rb * e[0], rb * e[1]]) * nu.radial_tail(e, rb);
            }
        }
        acc
    };

    let cart_symbol = if dense {
        let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (off, w) in &cart {
            buf[grid.cyclic_index(0, *off)] += w;
        }
        grid.inverse_raw(&mut buf);
        Some(buf)
    } else {
        None
    };

    Ok(IncrementRule {
        polar,
        cart,
        cart_symbol,
        near,
        tail_mass,
    })
}

/// Pointwise increment functional `G`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Kernel {
    Taylor(TaylorRemainder),
    Square { starred: bool },
    Bilinear,
}

/// Per-time-slice data shared by all nodes.
struct Slice {
    u: Vec<f64>,
    v: Option<Vec<f64>>,
    grad_u: [Vec<f64>; 2],
    grad_v: [Vec<f64>; 2],
    phi: Vec<f64>,
    dphi: Vec<f64>,
    far: Vec<f64>,
}

/// `e^{i k dk c}` for signed `k` in FFT order along one axis, alias-averaged
/// at Nyquist; powers by recurrence, resynchronized every 32 steps.
fn axis_phase(n: usize, dk: f64, c: f64, out: &mut Vec<Complex64>) {
    out.clear();
    out.resize(n, Complex64::new(0.0, 0.0));
    let z = Complex64::from_polar(1.0, dk * c);
    let mut p = Complex64::new(1.0, 0.0);
    for k in 0..n / 2 {
        if k % 32 == 0 {
            p = Complex64::from_polar(1.0, dk * k as f64 * c);
        }
        out[k] = p;
        if k > 0 {
            out[n - k] = p.conj();
        }
        p *= z;
    }
    out[n / 2] = Complex64::new((dk * (n / 2) as f64 * c).cos(), 0.0);
}

/// `e^{i xi.y}` in FFT order, alias-averaged at Nyquist indices.
fn shift_phase(grid: &Grid, y: Point, out: &mut Vec<Complex64>) {
    let n = grid.points_per_axis();
    let dk = grid.frequency_spacing();
    if grid.dim() == 1 {
        axis_phase(n, dk, y[0], out);
        return;
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    axis_phase(n, dk, y[0], &mut a);
    axis_phase(n, dk, y[1], &mut b);
    out.clear();
    for ai in &a {
        for bj in &b {
            out.push(ai * bj);
        }
    }
}

fn gradient_coeffs(grid: &Grid, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let xi = grid.frequency(idx);
            let n = grid.points_per_axis();
            let k = if grid.dim() == 1 { idx } else if axis == 0 { idx / n } else { idx % n };
            if k == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, xi[axis])
            }
        })
        .collect()
}

fn real_synth(grid: &Grid, c: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::new();
    grid.synthesize_real(c, &mut out);
    out
}

impl Kernel {
    fn prepare(&self, grid: &Grid, s: &mut Slice) {
        let n = s.u.len() as f64;
        match self {
            Kernel::Taylor(rem) => {
                s.phi = s.u.iter().map(|x| rem.phi(*x)).collect();
                s.dphi = s.u.iter().map(|x| rem.phi_prime(*x)).collect();
                let mean_phi = pairwise_sum(&s.phi) / n;
                let mean_u = pairwise_sum(&s.u) / n;
                s.far = (0..s.u.len())
                    .map(|i| mean_phi - s.phi[i] - s.dphi[i] * (mean_u - s.u[i]))
                    .collect();
            }
            Kernel::Square { starred: false } => {
                let mean_u = pairwise_sum(&s.u) / n;
                let sq: Vec<f64> = s.u.iter().map(|x| x * x).collect();
                let mean_u2 = pairwise_sum(&sq) / n;
                s.far = s.u.iter().map(|a| mean_u2 - 2.0 * a * mean_u + a * a).collect();
            }
            Kernel::Square { starred: true } => {
                // mean over z with |u(z)| < |a| of (u(z) - a)^2, by sorted prefix sums
                let mut order: Vec<usize> = (0..s.u.len()).collect();
                order.sort_by(|&i, &j| s.u[i].abs().total_cmp(&s.u[j].abs()).then(i.cmp(&j)));
                let mut p1 = vec![0.0; order.len() + 1];
                let mut p2 = vec![0.0; order.len() + 1];
                let sorted: Vec<f64> = order.iter().map(|&i| s.u[i].abs()).collect();
                for (k, &i) in order.iter().enumerate() {
                    p1[k + 1] = p1[k] + s.u[i];
                    p2[k + 1] = p2[k] + s.u[i] * s.u[i];
                }
                s.far = s
                    .u
                    .iter()
                    .map(|a| {
                        let k = sorted.partition_point(|v| *v < a.abs());
                        (p2[k] - 2.0 * a * p1[k] + k as f64 * a * a) / n
                    })
                    .collect();
            }
            Kernel::Bilinear => {
                let v = s.v.as_ref().expect("bilinear kernel needs two functions");
                let mean_u = pairwise_sum(&s.u) / n;
                let mean_v = pairwise_sum(v) / n;
                let uv: Vec<f64> = s.u.iter().zip(v).map(|(a, b)| a * b).collect();
                let mean_uv = pairwise_sum(&uv) / n;
                s.far = s
                    .u
                    .iter()
                    .zip(v)
                    .map(|(a, b)| mean_uv - a * mean_v - b * mean_u + a * b)
                    .collect();
            }
        }
        let _ = grid;
    }

    /// `G(u(x), u(x + y))` for a spectrally shifted slice.
    #[inline]
    fn pair(&self, s: &Slice, x: usize, ub: f64, va: f64, vb: f64) -> f64 {
        let ua = s.u[x];
        match self {
            Kernel::Taylor(rem) => rem.value_from(ua, s.phi[x], s.dphi[x], ub),
            Kernel::Square { starred } => {
                if !*starred || ua.abs() > ub.abs() {
                    (ub - ua) * (ub - ua)
                } else {
                    0.0
                }
            }
            Kernel::Bilinear => (ub - ua) * (vb - va),
        }
    }

    /// `G(u(x), u(z))` for grid points `x`, `z`, using precomputed arrays.
    #[inline]
    fn pair_indexed(&self, s: &Slice, x: usize, z: usize) -> f64 {
        match self {
            Kernel::Taylor(_) => s.phi[z] - s.phi[x] - s.dphi[x] * (s.u[z] - s.u[x]),
            Kernel::Square { starred } => {
                let (a, b) = (s.u[x], s.u[z]);
                if !*starred || a.abs() > b.abs() {
                    (b - a) * (b - a)
                } else {
                    0.0
                }
            }
            Kernel::Bilinear => {
                let v = s.v.as_ref().unwrap();
                (s.u[z] - s.u[x]) * (v[z] - v[x])
            }
        }
    }

    /// Adds `sum_off w_off G(u(x), u(x + off))` using that `G(a, b)` is
    /// linear in functions of `b`; `sym` is the symbol of the weights.
    fn convolved(
        &self,
        grid: &Grid,
        s: &Slice,
        cu: &[Complex64],
        cv: Option<&[Complex64]>,
        sym: &[Complex64],
        acc: &mut [f64],
    ) {
        let mass = sym[0].re;
        let i = Complex64::new(0.0, 1.0);
        // correlate two real fields at once
        let pair = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
            let packed: Vec<Complex64> = a.iter().zip(b).zip(sym).map(|((x, y), w)| (x + i * y) * w).collect();
            grid.synthesize(&packed)
        };
        let coeffs = |v: &[f64]| -> Vec<Complex64> {
            let c: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, 0.0)).collect();
            grid.coefficients(&c)
        };
        match self {
            Kernel::Taylor(_) => {
                let out = pair(&coeffs(&s.phi), cu);
                for (x, a) in acc.iter_mut().enumerate() {
                    let (cp, cuv) = (out[x].re, out[x].im);
                    *a += cp - mass * s.phi[x] - s.dphi[x] * (cuv - mass * s.u[x]);
                }
            }
            Kernel::Square { starred: false } => {
                let sq: Vec<f64> = s.u.iter().map(|v| v * v).collect();
                let out = pair(&coeffs(&sq), cu);
                for (x, a) in acc.iter_mut().enumerate() {
                    let u = s.u[x];
                    *a += out[x].re - 2.0 * u * out[x].im + mass * u * u;
                }
            }
            Kernel::Bilinear => {
                let v = s.v.as_ref().expect("bilinear kernel needs two functions");
                let uv: Vec<f64> = s.u.iter().zip(v).map(|(a, b)| a * b).collect();
                let lin = pair(cu, cv.expect("bilinear kernel needs two functions"));
                let quad = pair(&coeffs(&uv), &vec![Complex64::new(0.0, 0.0); cu.len()]);
                for (x, a) in acc.iter_mut().enumerate() {
                    *a += quad[x].re - s.u[x] * lin[x].im - v[x] * lin[x].re + mass * s.u[x] * v[x];
                }
            }
            Kernel::Square { starred: true } => unreachable!("starred kernel is not linear"),
        }
    }

    fn near(&self, s: &Slice, m: &[[f64; 2]; 2], dim: usize, x: usize) -> f64 {
        let q = |g1: &[Vec<f64>; 2], g2: &[Vec<f64>; 2]| {
            let mut acc = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    acc += m[i][j] * g1[i][x] * g2[j][x];
                }
            }
            acc
        };
        match self {
            Kernel::Taylor(rem) => 0.5 * rem.phi_second(s.u[x]) * q(&s.grad_u, &s.grad_u),
            Kernel::Square { starred: false } => q(&s.grad_u, &s.grad_u),
            Kernel::Square { starred: true } => {
                if s.u[x] == 0.0 {
                    0.0
                } else {
                    0.5 * q(&s.grad_u, &s.grad_u)
                }
            }
            Kernel::Bilinear => q(&s.grad_u, &s.grad_v),
        }
    }
}

/// Per-point values of `int G(u_t(x), u_t(x + y)) b(y) nu(dy)` at one time.
fn slice_integral(
    op: &SemigroupOperator,
    fc: &[Complex64],
    gc: Option<&[Complex64]>,
    kernel: &Kernel,
    rule: &IncrementRule,
    t: f64,
) -> (Vec<f64>, f64) {
    let grid = op.grid();
    let dim = grid.dim();
    let len = grid.len();
    let cu = op.evolve_coefficients(fc, t);
    let cv = gc.map(|g| op.evolve_coefficients(g, t));
    let empty = || [Vec::new(), Vec::new()];
    let mut s = Slice {
        u: real_synth(grid, &cu),
        v: cv.as_ref().map(|c| real_synth(grid, c)),
        grad_u: empty(),
        grad_v: empty(),
        phi: Vec::new(),
        dphi: Vec::new(),
        far: Vec::new(),
    };
    if rule.has_near() {
        for axis in 0..dim {
            s.grad_u[axis] = real_synth(grid, &gradient_coeffs(grid, &cu, axis));
            if let Some(c) = &cv {
                s.grad_v[axis] = real_synth(grid, &gradient_coeffs(grid, c, axis));
            }
        }
    }
    kernel.prepare(grid, &mut s);
    let mut acc = vec![0.0; len];

    // Cyclic shifts.
    if let Some(sym) = &rule.cart_symbol {
        kernel.convolved(grid, &s, &cu, cv.as_deref(), sym, &mut acc);
    } else {
        let n = grid.points_per_axis();
        for (off, w) in &rule.cart {
            if dim == 1 {
                let o = off[0].rem_euclid(n as i64) as usize;
                for x in 0..len {
                    let z = if x + o < len { x + o } else { x + o - len };
                    acc[x] += w * kernel.pair_indexed(&s, x, z);
                }
            } else {
                for x in 0..len {
                    let z = grid.cyclic_index(x, *off);
                    acc[x] += w * kernel.pair_indexed(&s, x, z);
                }
            }
        }
    }

    // Spectral shifts, two real shifts per complex synthesis.
    let bilinear = matches!(kernel, Kernel::Bilinear);
    let step = if bilinear { 1 } else { 2 };
    let i = Complex64::new(0.0, 1.0);
    let mut ph1 = Vec::with_capacity(len);
    let mut ph2 = Vec::with_capacity(len);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for chunk in rule.polar.chunks(step) {
        let (y1, w1) = chunk[0];
        shift_phase(grid, y1, &mut ph1);
        if bilinear {
            let cv = cv.as_ref().unwrap();
            for (k, b) in buf.iter_mut().enumerate() {
                *b = (cu[k] + i * cv[k]) * ph1[k];
            }
            grid.inverse_raw(&mut buf);
            let v = s.v.as_ref().unwrap();
            for x in 0..len {
                acc[x] += w1 * kernel.pair(&s, x, buf[x].re, v[x], buf[x].im);
            }
        } else if chunk.len() > 1 {
            let (y2, w2) = chunk[1];
            shift_phase(grid, y2, &mut ph2);
            for (k, b) in buf.iter_mut().enumerate() {
                *b = cu[k] * (ph1[k] + i * ph2[k]);
            }
            grid.inverse_raw(&mut buf);
            for x in 0..len {
                acc[x] += w1 * kernel.pair(&s, x, buf[x].re, 0.0, 0.0) + w2 * kernel.pair(&s, x, buf[x].im, 0.0, 0.0);
            }
        } else {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = cu[k] * ph1[k];
            }
            grid.inverse_raw(&mut buf);
            for x in 0..len {
                acc[x] += w1 * kernel.pair(&s, x, buf[x].re, 0.0, 0.0);
            }
        }
    }

    let mut near_total = 0.0;
    if rule.has_near() {
        let near: Vec<f64> = (0..len).map(|x| kernel.near(&s, &rule.near, dim, x)).collect();
        for (a, v) in acc.iter_mut().zip(&near) {
            *a += v;
        }
        near_total = grid.cell_volume() * pairwise_sum(&near);
    }
    if rule.tail_mass != 0.0 {
        for (a, f) in acc.iter_mut().zip(&s.far) {
            *a += rule.tail_mass * f;
        }
    }
    (acc, near_total)
}

/// Per-point time integral `sum_t w_t a(t) slice_t(x)` with its spatial
/// integral and the part contributed by the near field.
pub(crate) struct TimeIntegral {
    pub pointwise: Vec<f64>,
    pub total: f64,
    pub near_total: f64,
}

pub(crate) fn time_integral(
    op: &SemigroupOperator,
    fc: &[Complex64],
    gc: Option<&[Complex64]>,
    kernel: &Kernel,
    rule: &IncrementRule,
    mesh: &TimeMesh,
    a: &(dyn Fn(f64) -> f64 + Sync),
) -> TimeIntegral {
    let len = op.grid().len();
    let slices: Vec<(Vec<f64>, f64)> = mesh
        .nodes
        .par_iter()
        .map(|&t| {
            if a(t) == 0.0 {
                (vec![0.0; len], 0.0)
            } else {
                slice_integral(op, fc, gc, kernel, rule, t)
            }
        })
        .collect();
    let mut pointwise = vec![0.0; len];
    let mut near = Vec::with_capacity(slices.len());
    for (((s, nt), w), t) in slices.iter().zip(&mesh.weights).zip(&mesh.nodes) {
        let f = w * a(*t);
        for (p, v) in pointwise.iter_mut().zip(s) {
            *p += f * v;
        }
        near.push(f * nt);
    }
    let total = op.grid().cell_volume() * pairwise_sum(&pointwise);
    TimeIntegral {
        pointwise,
        total,
        near_total: pairwise_sum(&near),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::char_exponent;
    use crate::grid::GridFunction;
    use crate::semigroup::Variant;

    #[test]
    fn rule_reproduces_real_part_of_exponent() {
        // sum over nodes of (2 - 2 cos(xi.y)) w must equal 2 Re psi on the lattice
        let nu = LevyMeasure::stable_asymmetric(1, 1.2, 2.0, 1.0).unwrap();
        let grid = Grid::new(1, 1024, 20.0).unwrap();
        let psi = char_exponent(&nu);
        for (k, level) in [(1i64, 0), (5, 0), (10, 0), (40, 2)] {
            let rule = build_rule(&nu, &grid, &QuadSpec::default().level(level), &|_| 1.0, false).unwrap();
            let xi = k as f64 * grid.frequency_spacing();
            let mut s = 0.0;
            for (y, w) in &rule.polar {
                s += w * 2.0 * crate::exponent::one_minus_cos(xi * y[0]);
            }
            for (off, w) in &rule.cart {
                s += w * 2.0 * crate::exponent::one_minus_cos(xi * off[0] as f64 * grid.spacing());
            }
            s += rule.near[0][0] * xi * xi;
            s += rule.tail_mass * 2.0;
            let exact = 2.0 * psi.real_part([xi, 0.0]);
            assert!((s - exact).abs() < 1e-3 * exact, "k {k}: {s} vs {exact}");
        }
    }

    #[test]
    fn zero_function_gives_zero() {
        let nu = LevyMeasure::stable_asymmetric(1, 1.0, 1.0, 1.0).unwrap();
        let grid = Grid::new(1, 256, 10.0).unwrap();
        let op = SemigroupOperator::new(&char_exponent(&nu), &grid, Variant::Forward).unwrap();
        let rule = build_rule(&nu, &grid, &QuadSpec::default(), &|_| 1.0, true).unwrap();
        let f = GridFunction::zeros(&grid);
        let mesh = QuadSpec::default().time_mesh(1.0);
        let k = Kernel::Taylor(TaylorRemainder::new(3.0, 0.0).unwrap());
        let out = time_integral(&op, &f.coefficients(), None, &k, &rule, &mesh, &|_| 1.0);
        assert!(out.pointwise.iter().all(|v| *v == 0.0));
    }
}
