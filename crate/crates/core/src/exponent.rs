//! Characteristic exponents `psi(xi) = int (1 - e^{i xi.y} + i xi.y 1_{|y|<=1}) nu(dy)`.
//!
//! Stable and tempered families use radial closed forms; everything else goes
//! through graded Lévy-Khintchine quadrature. In two dimensions the radial
//! functions are integrated over directions with angular Gauss-Legendre
//! panels graded toward the kinks.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::{dot, norm, Grid, Point};
use crate::measure::{Family, JumpLaw, LevyMeasure};
use crate::quadrature::{cap_panel_width, geometric_breaks, pairwise_sum, GaussLegendre};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentSource {
    ClosedForm,
    LevyKhintchineQuadrature,
}

/// `psi` of a pure-jump measure.
#[derive(Debug, Clone)]
pub struct CharacteristicExponent {
    measure: LevyMeasure,
    source: ExponentSource,
}

/// Exponent with closed forms substituted for the families that have them.
pub fn char_exponent(nu: &LevyMeasure) -> CharacteristicExponent {
    let source = if has_closed_form(nu) {
        ExponentSource::ClosedForm
    } else {
        ExponentSource::LevyKhintchineQuadrature
    };
    CharacteristicExponent {
        measure: nu.clone(),
        source,
    }
}

/// Exponent evaluated by Lévy-Khintchine quadrature regardless of family.
pub fn quadrature_exponent(nu: &LevyMeasure) -> CharacteristicExponent {
    CharacteristicExponent {
        measure: nu.clone(),
        source: ExponentSource::LevyKhintchineQuadrature,
    }
}

fn has_closed_form(nu: &LevyMeasure) -> bool {
    match nu.family() {
        Family::StableAsymmetric { .. } | Family::CompoundPoisson { .. } => true,
        Family::TemperedStable { alpha, .. } => *alpha != 1.0,
        Family::Custom(_) => false,
        Family::Symmetrized(inner) | Family::Reflected(inner) => has_closed_form(inner),
    }
}

impl CharacteristicExponent {
    pub fn measure(&self) -> &LevyMeasure {
        &self.measure
    }

    pub fn source(&self) -> ExponentSource {
        self.source
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    pub fn eval(&self, xi: Point) -> Complex64 {
        self.eval_with_error(xi).0
    }

    pub fn real_part(&self, xi: Point) -> f64 {
        self.eval(xi).re.max(0.0)
    }

    /// Value and quadrature error estimate (zero for closed forms).
    pub fn eval_with_error(&self, xi: Point) -> (Complex64, f64) {
        if xi[0] == 0.0 && xi[1] == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        // Evaluate on a canonical half-space so that psi(-xi) = conj psi(xi) exactly.
        if xi[0] < 0.0 || (xi[0] == 0.0 && xi[1] < 0.0) {
            let (v, e) = self.eval_with_error([-xi[0], -xi[1]]);
            return (v.conj(), e);
        }
        let quad = self.source == ExponentSource::LevyKhintchineQuadrature;
        match self.measure.family() {
            Family::CompoundPoisson { rate, jumps } => (compound_poisson(*rate, jumps, xi), 0.0),
            Family::StableAsymmetric { alpha, c_plus, c_minus } if !quad && self.dim() == 2 => {
                let re = 0.5 * (c_plus + c_minus) * stable_a(*alpha) * norm(xi).powf(*alpha) * circle_moment(*alpha);
                let im = (c_plus - c_minus)
                    * angular_integral(&self.measure, xi, |e| {
                        Complex64::new(stable_j(*alpha, dot(xi, e)), 0.0)
                    })
                    .re;
                (Complex64::new(re, im), 0.0)
            }
            _ => {
                if self.dim() == 1 {
                    let k = xi[0];
                    let (a, ea) = radial_exponent(&self.measure, [1.0, 0.0], k, quad);
                    let (b, eb) = radial_exponent(&self.measure, [-1.0, 0.0], -k, quad);
                    (a + b, ea + eb)
                } else {
                    let mut err = 0.0;
                    let v = angular_integral_full(&self.measure, xi, |e| {
                        let (v, er) = radial_exponent(&self.measure, e, dot(xi, e), quad);
                        err += er;
                        v
                    });
                    (v, err)
                }
            }
        }
    }

    /// `int (1 - cos(xi.y)) w(y) nu(dy)` for a weight `w` that depends only on
    /// the direction of `y` (measures with a density) or pointwise (atoms).
    pub fn weighted_real_part(&self, xi: Point, w: &(dyn Fn(Point) -> f64 + Sync)) -> f64 {
        if xi[0] == 0.0 && xi[1] == 0.0 {
            return 0.0;
        }
        let nu = &self.measure;
        if let Some(atoms) = nu.atoms() {
            let terms: Vec<f64> = atoms
                .iter()
                .map(|(p, m)| m * one_minus_cos(dot(xi, *p)) * w(*p))
                .collect();
            return pairwise_sum(&terms);
        }
        if nu.is_finite_activity() && nu.dim() == 1 {
            return uniform_weighted(nu, xi[0], w);
        }
        let quad = self.source == ExponentSource::LevyKhintchineQuadrature;
        if nu.dim() == 1 {
            let k = xi[0];
            let a = radial_exponent(nu, [1.0, 0.0], k, quad).0.re;
            let b = radial_exponent(nu, [-1.0, 0.0], -k, quad).0.re;
            w([1.0, 0.0]) * a + w([-1.0, 0.0]) * b
        } else {
            angular_integral_full(nu, xi, |e| {
                Complex64::new(w(e) * radial_exponent(nu, e, dot(xi, e), quad).0.re, 0.0)
            })
            .re
        }
    }
}

/// `A_a` with `int_0^inf (1 - cos(s r)) r^{-1-a} dr = A_a |s|^a`.
pub(crate) fn stable_a(alpha: f64) -> f64 {
    if alpha == 1.0 {
        FRAC_PI_2
    } else {
        -libm::tgamma(-alpha) * (PI * alpha / 2.0).cos()
    }
}

/// `J(s) = int_0^inf (s r 1_{r<=1} - sin(s r)) r^{-1-a} dr`, odd in `s`.
pub(crate) fn stable_j(alpha: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if alpha == 1.0 {
        s * s.abs().ln() - s * (1.0 - EULER_GAMMA)
    } else {
        s / (1.0 - alpha) + libm::tgamma(-alpha) * (PI * alpha / 2.0).sin() * s.signum() * s.abs().powf(alpha)
    }
}

/// `int_0^{2 pi} |cos t|^a dt`.
fn circle_moment(alpha: f64) -> f64 {
    2.0 * PI.sqrt() * libm::tgamma((alpha + 1.0) / 2.0) / libm::tgamma(alpha / 2.0 + 1.0)
}

fn compound_poisson(rate: f64, jumps: &JumpLaw, xi: Point) -> Complex64 {
    match jumps {
        JumpLaw::Atoms { atoms } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in atoms {
                let s = dot(xi, a.point);
                let small = if norm(a.point) <= 1.0 { s } else { 0.0 };
                acc += a.prob * Complex64::new(1.0 - s.cos(), small - s.sin());
            }
            acc * rate
        }
        JumpLaw::Uniform { lo, hi } => {
            let k = xi[0];
            let width = hi - lo;
            let scale = k.abs() * lo.abs().max(hi.abs());
            let phi = if scale < 1e-4 {
                let m = |n: i32| (hi.powi(n + 1) - lo.powi(n + 1)) / ((n + 1) as f64 * width);
                Complex64::new(1.0 - k * k * m(2) / 2.0, k * m(1) - k.powi(3) * m(3) / 6.0)
            } else {
                let e_hi = Complex64::new(0.0, k * hi).exp();
                let e_lo = Complex64::new(0.0, k * lo).exp();
                (e_hi - e_lo) / Complex64::new(0.0, k * width)
            };
            // E[J 1_{|J|<=1}]
            let a = lo.max(-1.0);
            let b = hi.min(1.0);
            let comp = if b > a { (b * b - a * a) / (2.0 * width) } else { 0.0 };
            rate * (Complex64::new(1.0, 0.0) - phi + Complex64::new(0.0, k * comp))
        }
    }
}

fn uniform_weighted(nu: &LevyMeasure, k: f64, w: &(dyn Fn(Point) -> f64 + Sync)) -> f64 {
    let (lo, hi) = match nu.family() {
        Family::CompoundPoisson { jumps: JumpLaw::Uniform { lo, hi }, .. } => (*lo, *hi),
        _ => {
            // symmetrized or reflected uniform law: integrate both rays
            let gl = GaussLegendre::new(12);
            let mut total = 0.0;
            for e in [[1.0, 0.0], [-1.0, 0.0]] {
                let (a, b) = nu.radial_support(e);
                if b > a {
                    let br = cap_panel_width(&[a, b], PI / k.abs().max(1e-300));
                    total += w(e)
                        * crate::quadrature::composite(&gl, &br, |r| {
                            one_minus_cos(k * r) * nu.radial_density(e, r)
                        });
                }
            }
            return total;
        }
    };
    let gl = GaussLegendre::new(12);
    let br = cap_panel_width(&[lo, hi], PI / k.abs().max(1e-300));
    let e = [lo.signum(), 0.0];
    w(e) * crate::quadrature::composite(&gl, &br, |y| one_minus_cos(k * y) * nu.density([y, 0.0]))
}

/// Radial contribution `R_e(s) = int_0^inf (1 - e^{i s r} + i s r 1_{r<=1}) rho_e(r) dr`
/// with `rho_e(r) = density(r e) r^{d-1}`.
pub(crate) fn radial_exponent(nu: &LevyMeasure, e: Point, s: f64, quad: bool) -> (Complex64, f64) {
    if s == 0.0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    if !quad {
        match nu.family() {
            Family::StableAsymmetric { alpha, c_plus, c_minus } => {
                let c = if e[0] > 0.0 { *c_plus } else if e[0] < 0.0 { *c_minus } else { 0.5 * (c_plus + c_minus) };
                let v = c * Complex64::new(stable_a(*alpha) * s.abs().powf(*alpha), stable_j(*alpha, s));
                return (v, 0.0);
            }
            Family::TemperedStable {
                alpha,
                c_plus,
                c_minus,
                theta_plus,
                theta_minus,
            } if *alpha != 1.0 => {
                let (c, th) = if e[0] > 0.0 {
                    (*c_plus, *theta_plus)
                } else if e[0] < 0.0 {
                    (*c_minus, *theta_minus)
                } else {
                    (0.5 * (c_plus + c_minus), 0.5 * (theta_plus + theta_minus))
                };
                return (c * tempered_radial(*alpha, th, s), 0.0);
            }
            Family::Symmetrized(inner) => {
                let (a, ea) = radial_exponent(inner, e, s, quad);
                let (b, eb) = radial_exponent(inner, [-e[0], -e[1]], s, quad);
                return (0.5 * (a + b), 0.5 * (ea + eb));
            }
            Family::Reflected(inner) => return radial_exponent(inner, [-e[0], -e[1]], s, quad),
            _ => {}
        }
    }
    radial_quadrature(nu, e, s)
}

/// Tempered radial function with unit intensity, `a != 1`.
fn tempered_radial(alpha: f64, theta: f64, s: f64) -> Complex64 {
    let z = s / theta;
    // (1 - i z)^a - 1 + i a z, by series when z is small to avoid cancellation
    let bracket = if z.abs() < 0.1 {
        let iz = Complex64::new(0.0, -z);
        let mut term = iz;
        let mut coef = alpha;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 2..40 {
            coef *= (alpha - (n as f64 - 1.0)) / n as f64;
            term *= iz;
            let add = coef * term;
            acc += add;
            if add.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        acc
    } else {
        Complex64::new(1.0, -z).powf(alpha) - 1.0 + Complex64::new(0.0, alpha * z)
    };
    let full = -libm::tgamma(-alpha) * theta.powf(alpha) * bracket;
    full - Complex64::new(0.0, s * tempered_drift(alpha, theta))
}

/// `int_1^inf e^{-theta r} r^{-a} dr`.
fn tempered_drift(alpha: f64, theta: f64) -> f64 {
    let gl = GaussLegendre::new(16);
    let end = 1.0 + 80.0 / theta;
    let br = geometric_breaks(1.0, end, 80);
    crate::quadrature::composite(&gl, &br, |r| (-theta * r).exp() * r.powf(-alpha))
}

/// Graded quadrature of the radial Lévy-Khintchine integral; the oscillatory
/// far field is closed by repeated integration by parts once the density
/// varies slowly on the scale `1/|s|`.
fn radial_quadrature(nu: &LevyMeasure, e: Point, s: f64) -> (Complex64, f64) {
    let (lo, hi) = nu.radial_support(e);
    if hi <= lo {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let rho = |r: f64| nu.radial_density(e, r);
    let fine = GaussLegendre::new(12);
    let coarse = GaussLegendre::new(7);
    let alpha = nu.singularity_order();
    let period = PI / s.abs();
    let re_f = |r: f64| one_minus_cos(s * r) * rho(r);
    let im_f = |r: f64| {
        let x = s * r;
        if r <= 1.0 {
            x_minus_sin(x) * rho(r)
        } else {
            -x.sin() * rho(r)
        }
    };

    let mut re = 0.0;
    let mut im = 0.0;
    let mut err = 0.0;
    let mut add_panels = |breaks: &[f64], re: &mut f64, im: &mut f64| {
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let rf = fine.integrate(a, b, re_f);
            let imf = fine.integrate(a, b, im_f);
            let rc = coarse.integrate(a, b, re_f);
            let imc = coarse.integrate(a, b, im_f);
            *re += rf;
            *im += imf;
            err += (rf - rc).abs() + (imf - imc).abs();
        }
    };

    let mut start = lo;
    if lo == 0.0 {
        // Graded inner region with analytic extrapolation below the floor.
        let floor = nu.inner_cutoff();
        let a = hi.min(1.0).min(period);
        if a > floor {
            let br = geometric_breaks(floor, a, 48);
            add_panels(&br, &mut re, &mut im);
            re += re_f(floor) * floor / (2.0 - alpha);
            im += im_f(floor) * floor / (3.0 - alpha);
        }
        start = a.max(floor);
    }

    let finite_hi = hi.is_finite();
    let end_cap = if finite_hi { hi } else { nu.outer_cutoff() };
    // Oscillatory middle region, broken at r = 1.
    let mut r1 = if finite_hi {
        hi
    } else {
        end_cap.min((200.0 * period).max(1.0).max(start))
    };
    loop {
        if !finite_hi && r1 < end_cap {
            let q = slow_variation(&rho, r1) / s.abs();
            if q > 0.02 && rho(r1) * r1 > 1e-300 {
                r1 = (2.0 * r1).min(end_cap);
                continue;
            }
        }
        break;
    }
    if r1 > start {
        let mut pts = vec![start];
        if start < 1.0 && r1 > 1.0 {
            pts.push(1.0);
        }
        pts.push(r1);
        let mut br = Vec::new();
        for w in pts.windows(2) {
            let g = if w[0] > 0.0 { geometric_breaks(w[0], w[1], 8) } else { vec![w[0], w[1]] };
            let capped = cap_panel_width(&g, period);
            if br.is_empty() {
                br.extend(capped);
            } else {
                br.extend(capped.into_iter().skip(1));
            }
        }
        add_panels(&br, &mut re, &mut im);
    }

    if !finite_hi {
        let (tail, tail_err) = oscillatory_tail(&rho, r1, s);
        re += nu.radial_tail(e, r1) - tail.re;
        im -= tail.im;
        err += tail_err;
    }
    (Complex64::new(re, im), err)
}

pub(crate) fn one_minus_cos(x: f64) -> f64 {
    let h = (0.5 * x).sin();
    2.0 * h * h
}

fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x - x.sin()
    }
}

/// `|rho'(r)| / rho(r)` by central differences.
fn slow_variation(rho: &impl Fn(f64) -> f64, r: f64) -> f64 {
    let h = 1e-3 * r;
    let v = rho(r);
    if v <= 0.0 {
        return 0.0;
    }
    ((rho(r + h) - rho(r - h)) / (2.0 * h)).abs() / v
}

/// `int_R^inf e^{i s r} rho(r) dr` by four rounds of integration by parts.
fn oscillatory_tail(rho: &impl Fn(f64) -> f64, big_r: f64, s: f64) -> (Complex64, f64) {
    let h = 0.01 * big_r;
    let f = |k: i32| rho(big_r + k as f64 * h);
    let d = [
        f(0),
        (f(1) - f(-1)) / (2.0 * h),
        (f(1) - 2.0 * f(0) + f(-1)) / (h * h),
        (f(2) - 2.0 * f(1) + 2.0 * f(-1) - f(-2)) / (2.0 * h * h * h),
    ];
    let is = Complex64::new(0.0, s);
    let lead = Complex64::new(0.0, s * big_r).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut last = 0.0;
    for (k, dk) in d.iter().enumerate() {
        let term = dk * if k % 2 == 0 { 1.0 } else { -1.0 } / is.powi(k as i32 + 1);
        acc += term;
        last = term.norm();
    }
    (-lead * acc, last)
}

/// `int_{-pi/2}^{pi/2} g(e_t) dt`, graded toward the zeros of `xi.e_t`.
pub(crate) fn angular_integral(nu: &LevyMeasure, xi: Point, g: impl FnMut(Point) -> Complex64) -> Complex64 {
    angular_over(nu, xi, -FRAC_PI_2, FRAC_PI_2, g)
}

/// Integral of `g(e_t)` over the full circle.
pub(crate) fn angular_integral_full(nu: &LevyMeasure, xi: Point, g: impl FnMut(Point) -> Complex64) -> Complex64 {
    angular_over(nu, xi, -FRAC_PI_2, 1.5 * PI, g)
}

fn angular_over(
    nu: &LevyMeasure,
    xi: Point,
    lo: f64,
    hi: f64,
    mut g: impl FnMut(Point) -> Complex64,
) -> Complex64 {
    let phi = xi[1].atan2(xi[0]);
    let mut breaks = vec![lo, hi];
    let span = hi - lo;
    let mut push = |t: f64| {
        let u = lo + (t - lo).rem_euclid(2.0 * PI);
        for cand in [u, u - 2.0 * PI, u + 2.0 * PI] {
            if cand > lo + 1e-14 && cand < hi - 1e-14 {
                breaks.push(cand);
            }
        }
    };
    push(phi + FRAC_PI_2);
    push(phi - FRAC_PI_2);
    for b in nu.angular_breaks() {
        push(b);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * span);
    let gl = GaussLegendre::new(8);
    let mut terms: Vec<Complex64> = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        // geometric grading toward both endpoints
        for side in [-1.0, 1.0] {
            let end = if side < 0.0 { a } else { b };
            let dist = geometric_breaks(half * 1e-10, half, 24);
            let mut prev = 0.0;
            for &dd in &dist {
                for (u, wt) in gl.on(prev, dd) {
                    let t = end - side * u;
                    terms.push(wt * g([t.cos(), t.sin()]));
                }
                prev = dd;
            }
            let _ = mid;
        }
    }
    let re: Vec<f64> = terms.iter().map(|c| c.re).collect();
    let im: Vec<f64> = terms.iter().map(|c| c.im).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// `psi` tabulated in FFT order on a grid. At Nyquist indices the value is the
/// alias average, which is real, so real inputs stay real.
#[derive(Debug, Clone)]
pub struct ExponentTable {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ExponentTable {
    pub fn new(psi: &CharacteristicExponent, grid: &Grid) -> Self {
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                if grid.is_nyquist_index(idx) {
                    let al = grid.aliases(idx);
                    let s: Complex64 = al.iter().map(|xi| psi.eval(*xi)).sum();
                    s / al.len() as f64
                } else {
                    psi.eval(grid.frequency(idx))
                }
            })
            .collect();
        ExponentTable {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re.max(0.0)).collect()
    }

    /// Largest `e^{-t Re psi}` over the outermost frequency shell.
    pub fn edge_decay(&self, t: f64) -> f64 {
        let g = &self.grid;
        let n = g.points_per_axis();
        let half = n / 2;
        let mut worst: f64 = 0.0;
        for idx in 0..g.len() {
            let (i, j) = if g.dim() == 1 { (idx, 0) } else { (idx / n, idx % n) };
            let on_edge = i == half || (g.dim() == 2 && j == half);
            if on_edge {
                worst = worst.max((-t * self.values[idx].re.max(0.0)).exp());
            }
        }
        worst
    }
}

/// Advisory verdict on the growth of `Re psi / log(1 + |xi|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HwVerdict {
    HoldsEmpirical,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: HwVerdict,
}

/// `min_{|xi| = R} Re psi(xi) / log(1 + R)` over sampled directions.
pub fn hartman_wintner_profile(psi: &CharacteristicExponent, radii: &[f64]) -> crate::error::Result<HwProfile> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::error::Error::param("radii", "must be positive and increasing"));
    }
    let dirs: Vec<Point> = if psi.dim() == 1 {
        vec![[1.0, 0.0], [-1.0, 0.0]]
    } else {
        (0..64)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 64.0;
                [t.cos(), t.sin()]
            })
            .collect()
    };
    let values: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            dirs.iter()
                .map(|e| psi.real_part([r * e[0], r * e[1]]))
                .fold(f64::INFINITY, f64::min)
                / (1.0 + r).ln()
        })
        .collect();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let grows = values.len() >= 2 && values[values.len() - 1] >= 2.0 * values[0];
    let verdict = if increasing && grows {
        HwVerdict::HoldsEmpirical
    } else {
        HwVerdict::Fails
    };
    Ok(HwProfile {
        radii: radii.to_vec(),
        values,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, JumpLaw};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn symmetric_cauchy_is_pi_c_abs_xi() {
        let nu = LevyMeasure::stable_asymmetric(1, 1.0, 0.7, 0.7).unwrap();
        let psi = char_exponent(&nu);
        for &k in &[0.1, 1.0, 13.0] {
            let v = psi.eval([k, 0.0]);
            assert!((v.re - PI * 0.7 * k).abs() < 1e-13 * k);
            assert!(v.im.abs() < 1e-13);
        }
        assert_eq!(psi.eval([0.0, 0.0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quadrature_matches_closed_form_for_stable() {
        for &(alpha, cp, cm) in &[(1.0, 1.0, 1.0), (1.2, 2.0, 1.0), (0.6, 1.0, 0.3), (1.7, 0.5, 1.5), (1.0, 2.0, 0.5)] {
            let nu = LevyMeasure::stable_asymmetric(1, alpha, cp, cm).unwrap();
            let closed = char_exponent(&nu);
            let quad = quadrature_exponent(&nu);
            for j in 0..13 {
                let k = 0.1 * 10f64.powf(j as f64 / 4.0);
                let a = closed.eval([k, 0.0]);
                let (b, _) = quad.eval_with_error([k, 0.0]);
                assert!(rel(b, a) < 1e-6, "alpha {alpha} k {k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn tempered_closed_form_matches_quadrature() {
        let nu = LevyMeasure::tempered_stable(1, 1.4, 1.0, 0.5, 1.0, 2.0).unwrap();
        let closed = char_exponent(&nu);
        let quad = quadrature_exponent(&nu);
        for &k in &[0.05, 0.3, 1.0, 4.0, 30.0] {
            let a = closed.eval([k, 0.0]);
            let b = quad.eval([k, 0.0]);
            assert!(rel(b, a) < 1e-6, "k {k}: {a} vs {b}");
        }
    }

    #[test]
    fn tempered_small_theta_approaches_stable() {
        let t = LevyMeasure::tempered_stable(1, 0.7, 1.0, 2.0, 1e-7, 1e-7).unwrap();
        let s = LevyMeasure::stable_asymmetric(1, 0.7, 1.0, 2.0).unwrap();
        let a = char_exponent(&t).eval([2.0, 0.0]);
        let b = char_exponent(&s).eval([2.0, 0.0]);
        assert!(rel(a, b) < 1e-4, "{a} vs {b}");
    }

    #[test]
    fn compound_poisson_closed_form() {
        let nu = LevyMeasure::compound_poisson(1, 3.0, JumpLaw::Uniform { lo: 1.0, hi: 2.0 }).unwrap();
        let psi = char_exponent(&nu);
        let k: f64 = 0.8;
        let phi = Complex64::new(0.0, 2.0 * k).exp() - Complex64::new(0.0, k).exp();
        let expect = 3.0 * (1.0 - phi / Complex64::new(0.0, k));
        assert!(rel(psi.eval([k, 0.0]), expect) < 1e-14);
        let quad = quadrature_exponent(&nu);
        assert!(rel(quad.eval([k, 0.0]), expect) < 1e-10);
        let atoms = LevyMeasure::compound_poisson(
            1,
            2.0,
            JumpLaw::Atoms {
                atoms: vec![Atom { point: [1.0, 0.0], prob: 0.5 }, Atom { point: [-1.0, 0.0], prob: 0.5 }],
            },
        )
        .unwrap();
        let v = char_exponent(&atoms).eval([k, 0.0]);
        assert!((v.re - 2.0 * (1.0 - k.cos())).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_stable_against_angular_quadrature() {
        let nu = LevyMeasure::stable_asymmetric(2, 1.3, 2.0, 1.0).unwrap();
        let closed = char_exponent(&nu);
        for &xi in &[[1.0, 0.0], [0.3, -0.8], [-2.0, 1.5]] {
            let a = closed.eval(xi);
            let b = angular_integral_full(&nu, xi, |e| radial_exponent(&nu, e, dot(xi, e), false).0);
            assert!(rel(b, a) < 1e-9, "{xi:?}: {a} vs {b}");
            assert!(a.im.abs() > 1e-3);
        }
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        let nu = LevyMeasure::stable_asymmetric(2, 0.8, 2.0, 0.5).unwrap();
        let psi = char_exponent(&nu);
        let a = psi.eval([0.4, -1.1]);
        let b = psi.eval([-0.4, 1.1]);
        assert_eq!(a, b.conj());
    }

    #[test]
    fn hw_profile_verdicts() {
        let cauchy = char_exponent(&LevyMeasure::stable_asymmetric(1, 1.0, 1.0, 1.0).unwrap());
        let prof = hartman_wintner_profile(&cauchy, &[10.0, 100.0, 1000.0]).unwrap();
        assert_eq!(prof.verdict, HwVerdict::HoldsEmpirical);
        let cp = char_exponent(&LevyMeasure::compound_poisson(1, 3.0, JumpLaw::Uniform { lo: 1.0, hi: 2.0 }).unwrap());
        let prof = hartman_wintner_profile(&cp, &[10.0, 100.0, 1000.0]).unwrap();
        assert_eq!(prof.verdict, HwVerdict::Fails);
        assert!(prof.values.iter().zip(&prof.radii).all(|(v, r)| v * (1.0 + r).ln() <= 6.0 + 1e-12));
    }
}
