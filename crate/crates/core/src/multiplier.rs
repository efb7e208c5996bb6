//! The bilinear form `Lambda_phi`, its Fourier symbol `m_phi`, the operator
//! `S_phi` and the symmetrized form `Lambda~_eta`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{build_rule, time_integral, Kernel, QuadSpec};
use crate::error::{Error, Result};
use crate::exponent::CharacteristicExponent;
use crate::grid::{Grid, GridFunction, Point};
use crate::measure::{directions, symmetrize, LevyMeasure};
use crate::quadrature::{cap_panel_width, geometric_breaks, pairwise_sum, GaussLegendre};
use crate::semigroup::{SemigroupOperator, Variant};
use crate::square::decay_horizon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfSpace {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Closed set of weights `phi(t, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiTemplate {
    Const { value: f64 },
    ExpDecayT { rate: f64 },
    SinT { freq: f64 },
    HalfSpaceY { sign: HalfSpace },
    Product { factors: Vec<PhiTemplate> },
}

/// `a(t) = scale e^{-rate t} prod sin(freq_i t)`.
#[derive(Debug, Clone, PartialEq)]
struct TimeFactor {
    scale: f64,
    rate: f64,
    freqs: Vec<f64>,
}

/// Indicator of `{y_1 > 0}`, `{y_1 < 0}`, everything or nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
enum SpaceFactor {
    All,
    Half(HalfSpace),
    Empty,
}

impl SpaceFactor {
    fn times(self, other: SpaceFactor) -> SpaceFactor {
        match (self, other) {
            (SpaceFactor::Empty, _) | (_, SpaceFactor::Empty) => SpaceFactor::Empty,
            (SpaceFactor::All, x) | (x, SpaceFactor::All) => x,
            (SpaceFactor::Half(a), SpaceFactor::Half(b)) if a == b => SpaceFactor::Half(a),
            _ => SpaceFactor::Empty,
        }
    }

    /// Half weight on the boundary hyperplane.
    fn eval(self, y: Point) -> f64 {
        match self {
            SpaceFactor::All => 1.0,
            SpaceFactor::Empty => 0.0,
            SpaceFactor::Half(s) => {
                let v = if s == HalfSpace::Plus { y[0] } else { -y[0] };
                if v > 0.0 {
                    1.0
                } else if v == 0.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }
}

/// A template with its separable factors and declared sup norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierSpec {
    pub phi: PhiTemplate,
    pub sup_norm: f64,
    pub description: String,
    #[serde(skip)]
    time: TimeFactor,
    #[serde(skip)]
    space: SpaceFactor,
}

fn split(t: &PhiTemplate) -> Result<(TimeFactor, SpaceFactor, f64, String)> {
    let one = TimeFactor {
        scale: 1.0,
        rate: 0.0,
        freqs: vec![],
    };
    let finite = |name: &'static str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::param(name, "must be finite"))
        }
    };
    Ok(match t {
        PhiTemplate::Const { value } => {
            finite("value", *value)?;
            (TimeFactor { scale: *value, ..one }, SpaceFactor::All, value.abs(), format!("{value}"))
        }
        PhiTemplate::ExpDecayT { rate } => {
            if !(*rate >= 0.0 && rate.is_finite()) {
                return Err(Error::param("rate", "must be >= 0"));
            }
            (TimeFactor { rate: *rate, ..one }, SpaceFactor::All, 1.0, format!("exp(-{rate} t)"))
        }
        PhiTemplate::SinT { freq } => {
            finite("freq", *freq)?;
            let tf = TimeFactor {
                freqs: vec![*freq],
                ..one
            };
            (tf, SpaceFactor::All, if *freq == 0.0 { 0.0 } else { 1.0 }, format!("sin({freq} t)"))
        }
        PhiTemplate::HalfSpaceY { sign } => {
            let d = if *sign == HalfSpace::Plus { "1{y>0}" } else { "1{y<0}" };
            (one, SpaceFactor::Half(*sign), 1.0, d.into())
        }
        PhiTemplate::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::param("factors", "product needs at least one factor"));
            }
            let mut tf = one;
            let mut sf = SpaceFactor::All;
            let mut sup = 1.0;
            let mut desc = Vec::new();
            for f in factors {
                let (a, b, s, d) = split(f)?;
                tf.scale *= a.scale;
                tf.rate += a.rate;
                tf.freqs.extend(a.freqs);
                sf = sf.times(b);
                sup *= s;
                desc.push(d);
            }
            if tf.freqs.len() > 12 {
                return Err(Error::param("factors", "at most 12 sine factors"));
            }
            if sf == SpaceFactor::Empty {
                sup = 0.0;
            }
            (tf, sf, sup, desc.join(" * "))
        }
    })
}

impl MultiplierSpec {
    pub fn new(phi: PhiTemplate) -> Result<Self> {
        let (time, space, sup_norm, description) = split(&phi)?;
        Ok(MultiplierSpec {
            phi,
            sup_norm,
            description,
            time,
            space,
        })
    }

    pub fn eval(&self, t: f64, y: Point) -> f64 {
        self.time_factor(t) * self.space.eval(y)
    }

    fn time_factor(&self, t: f64) -> f64 {
        let tf = &self.time;
        tf.scale * (-tf.rate * t).exp() * tf.freqs.iter().map(|w| (w * t).sin()).product::<f64>()
    }

    /// True when `phi` does not depend on `t`.
    pub fn is_time_independent(&self) -> bool {
        self.time.rate == 0.0 && self.time.freqs.is_empty()
    }

    /// Largest `|phi|` over sampled `(t, y)` stays within `sup_norm`.
    pub fn check_sup_norm(&self, dim: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..400 {
            let t = 1e-3 * 1.05f64.powi(k);
            for (e, _) in directions(dim, 8) {
                for r in [1e-3, 0.5, 3.0] {
                    worst = worst.max(self.eval(t, [r * e[0], r * e[1]]).abs());
                }
            }
        }
        if worst > self.sup_norm * (1.0 + 1e-12) {
            return Err(Error::param("sup_norm", format!("|phi| reaches {worst} > {}", self.sup_norm)));
        }
        Ok(worst)
    }

    /// `int_from^inf a(t) e^{-lambda t} dt` in closed form: the sines expand
    /// into complex exponentials.
    pub fn time_transform(&self, lambda: f64, from: f64) -> f64 {
        let tf = &self.time;
        let n = tf.freqs.len();
        let mut terms = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let mut omega = 0.0;
            let mut sign = 1.0;
            for (i, w) in tf.freqs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    omega -= w;
                    sign = -sign;
                } else {
                    omega += w;
                }
            }
            let z = Complex64::new(lambda + tf.rate, -omega);
            terms.push(sign * ((-z * from).exp() / z));
        }
        let s: Complex64 = terms.iter().sum();
        // (2i)^{-n}
        let pre = Complex64::new(0.0, -0.5).powi(n as i32);
        tf.scale * (pre * s).re
    }

    /// The same integral from 0 by Gauss-Legendre on nodes scaled by `1/lambda`.
    pub fn time_transform_quadrature(&self, lambda: f64) -> f64 {
        let s_end = 14.0 * std::f64::consts::LN_10 + 0.01;
        let omega: f64 = self.time.freqs.iter().map(|w| w.abs()).sum::<f64>() / lambda;
        let decay = 1.0 + self.time.rate / lambda;
        let width = (0.5 / decay).min(if omega > 0.0 { 1.0 / omega } else { 1.0 }).max(1e-4);
        let mut br = cap_panel_width(&geometric_breaks(1e-10, 1.0, 24), width);
        let mut s = 1.0;
        while s < s_end {
            s = (s + width).min(s_end);
            br.push(s);
        }
        let gl = GaussLegendre::new(12);
        let f = |s: f64| self.time_factor(s / lambda) * (-s).exp();
        let mut parts = vec![1e-10 * f(1e-10)];
        for w in br.windows(2) {
            parts.push(gl.integrate(w[0], w[1], f));
        }
        pairwise_sum(&parts) / lambda
    }
}

/// `m_phi` on the frequency lattice of a grid.
#[derive(Debug, Clone)]
pub struct SymbolGrid {
    grid: Grid,
    pub m_values: Vec<Complex64>,
    /// Indices with `Re psi <= 1e-12` other than the origin; their value is 0.
    pub flagged: Vec<usize>,
}

impl SymbolGrid {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sup_abs(&self) -> f64 {
        self.m_values.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    pub fn is_clean(&self, idx: usize) -> bool {
        idx != 0 && self.flagged.binary_search(&idx).is_err()
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut m_values = vec![Complex64::new(value, 0.0); grid.len()];
        m_values[0] = Complex64::new(0.0, 0.0);
        SymbolGrid {
            grid: grid.clone(),
            m_values,
            flagged: vec![],
        }
    }
}

fn y_factor(psi: &CharacteristicExponent, spec: &MultiplierSpec, xi: Point) -> f64 {
    match spec.space {
        SpaceFactor::Empty => 0.0,
        SpaceFactor::All => 2.0 * psi.real_part(xi),
        s => 2.0 * psi.weighted_real_part(xi, &|y| s.eval(y)),
    }
}

/// `m(xi) = int_0^inf int |e^{i xi.y} - 1|^2 e^{-2t Re psi(xi)} phi(t, y) nu(dy) dt`.
pub fn multiplier_symbol(spec: &MultiplierSpec, psi: &CharacteristicExponent, grid: &Grid) -> Result<SymbolGrid> {
    if psi.dim() != grid.dim() {
        return Err(Error::GridMismatch("exponent and grid dimensions differ".into()));
    }
    let op = SemigroupOperator::new(psi, grid, Variant::Forward)?;
    let re: Vec<f64> = op.table().real_parts();
    let out: Vec<(Complex64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            if idx == 0 {
                return (Complex64::new(0.0, 0.0), false);
            }
            let lambda = 2.0 * re[idx];
            if lambda <= 2e-12 {
                return (Complex64::new(0.0, 0.0), true);
            }
            let y = if grid.is_nyquist_index(idx) {
                let al = grid.aliases(idx);
                al.iter().map(|xi| y_factor(psi, spec, *xi)).sum::<f64>() / al.len() as f64
            } else {
                y_factor(psi, spec, grid.frequency(idx))
            };
            (Complex64::new(spec.time_transform(lambda, 0.0) * y, 0.0), false)
        })
        .collect();
    let flagged = out.iter().enumerate().filter(|(_, v)| v.1).map(|(i, _)| i).collect();
    Ok(SymbolGrid {
        grid: grid.clone(),
        m_values: out.into_iter().map(|v| v.0).collect(),
        flagged,
    })
}

/// `S_phi f`: the inverse transform of `m f^`.
pub fn apply_multiplier(m: &SymbolGrid, f: &GridFunction) -> Result<GridFunction> {
    if m.grid() != f.grid() {
        return Err(Error::GridMismatch("symbol and function grids differ".into()));
    }
    let grid = f.grid();
    let c: Vec<Complex64> = grid
        .coefficients(f.values())
        .iter()
        .zip(&m.m_values)
        .map(|(a, b)| a * b)
        .collect();
    let values = grid.synthesize(&c);
    if f.is_real() && m.m_values.iter().all(|v| v.im == 0.0) {
        Ok(GridFunction::real_from_complex(grid, values))
    } else {
        GridFunction::from_complex(grid, values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub value: f64,
    pub t_max: f64,
    /// Bound on the part of the time integral beyond `t_max`.
    pub tail_bound: f64,
    /// `||phi||_inf ||f||_2 ||g||_2`.
    pub cs_bound: f64,
    pub warnings: Vec<String>,
}

/// `||P_T f - mean||_2`, the increment energy left after `T`.
fn remaining_energy(op: &SemigroupOperator, f: &GridFunction, t: f64) -> Result<f64> {
    let pt = op.apply(t, f)?;
    let mean = f.integral().re / f.grid().volume();
    let vals: Vec<f64> = pt.real_values().iter().map(|v| v - mean).collect();
    Ok(GridFunction::from_real(f.grid(), vals)?.norm(2.0))
}

fn check_pair(op: &SemigroupOperator, f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.grid() != op.grid() || g.grid() != op.grid() {
        return Err(Error::GridMismatch("function and semigroup grids differ".into()));
    }
    if !f.is_real() || !g.is_real() {
        return Err(Error::param("f/g", "must be real valued"));
    }
    if op.variant() != Variant::Forward {
        return Err(Error::param("op", "the bilinear form uses the forward semigroup"));
    }
    Ok(())
}

/// Horizon where both `f` and `g` have decayed to `1e-4` of their norm.
pub fn joint_horizon(op: &SemigroupOperator, f: &GridFunction, g: &GridFunction) -> Result<f64> {
    let tf = if f.norm(2.0) == 0.0 { 1.0 } else { decay_horizon(op, f, 1e-4)? };
    let tg = if g.norm(2.0) == 0.0 { 1.0 } else { decay_horizon(op, g, 1e-4)? };
    Ok(tf.max(tg))
}

/// `int_0^T int int (P_t f(x+y) - P_t f(x)) (P_t g(x+y) - P_t g(x)) w(t, y) mu(dy) dx dt`.
fn bilinear_integral(
    op: &SemigroupOperator,
    mu: &LevyMeasure,
    a: &(dyn Fn(f64) -> f64 + Sync),
    b: &(dyn Fn(Point) -> f64 + Sync),
    f: &GridFunction,
    g: &GridFunction,
    t_max: f64,
    quad: &QuadSpec,
) -> Result<f64> {
    let rule = build_rule(mu, op.grid(), quad, b, true)?;
    let mesh = quad.time_mesh(t_max);
    let out = time_integral(op, &f.coefficients(), Some(&g.coefficients()), &Kernel::Bilinear, &rule, &mesh, a);
    if !out.total.is_finite() {
        return Err(Error::Divergence {
            what: "bilinear form".into(),
            error_estimate: f64::INFINITY,
        });
    }
    Ok(out.total)
}

fn lambda_report(
    spec: &MultiplierSpec,
    value: f64,
    op: &SemigroupOperator,
    f: &GridFunction,
    g: &GridFunction,
    t_max: f64,
) -> Result<LambdaReport> {
    let cs_bound = spec.sup_norm * f.norm(2.0) * g.norm(2.0);
    let tail_bound = spec.sup_norm * remaining_energy(op, f, t_max)? * remaining_energy(op, g, t_max)?;
    let mut warnings = Vec::new();
    if value.abs() > cs_bound * (1.0 + 1e-9) + 1e-300 {
        warnings.push(format!("|Lambda| = {value} exceeds the Cauchy-Schwarz bound {cs_bound}"));
    }
    Ok(LambdaReport {
        value,
        t_max,
        tail_bound,
        cs_bound,
        warnings,
    })
}

/// `Lambda_phi(f, g)` by x-space quadrature over `[0, t_max]`.
pub fn lambda_form(
    spec: &MultiplierSpec,
    f: &GridFunction,
    g: &GridFunction,
    op: &SemigroupOperator,
    t_max: Option<f64>,
    quad: &QuadSpec,
) -> Result<LambdaReport> {
    check_pair(op, f, g)?;
    quad.validate()?;
    let t_max = match t_max {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::param("t_max", format!("{t} must be > 0"))),
        None => joint_horizon(op, f, g)?,
    };
    let value = if spec.sup_norm == 0.0 {
        0.0
    } else {
        let space = spec.space;
        bilinear_integral(
            op,
            op.exponent().measure(),
            &|t| spec.time_factor(t),
            &|y| space.eval(y),
            f,
            g,
            t_max,
            quad,
        )?
    };
    lambda_report(spec, value, op, f, g, t_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointReport {
    pub lambda: LambdaReport,
    /// `<S_phi f, g>` as a grid inner product.
    pub inner_spatial: f64,
    /// The same pairing summed over frequencies.
    pub inner_spectral: f64,
    /// Spectral value of the part of `Lambda` beyond `t_max`.
    pub tail_term: f64,
    pub symbol_sup: f64,
    /// `|Lambda - <S f, g>| / (||f|| ||g|| ||phi||)`.
    pub rel_discrepancy: f64,
    /// The same after adding `tail_term` to `Lambda`.
    pub rel_discrepancy_tail_corrected: f64,
}

/// `Lambda_phi(f, g)` against `<S_phi f, g>`.
pub fn adjoint_identity_check(
    spec: &MultiplierSpec,
    f: &GridFunction,
    g: &GridFunction,
    op: &SemigroupOperator,
    t_max: Option<f64>,
    quad: &QuadSpec,
) -> Result<AdjointReport> {
    let lambda = lambda_form(spec, f, g, op, t_max, quad)?;
    let psi = op.exponent();
    let grid = op.grid();
    let symbol = multiplier_symbol(spec, psi, grid)?;
    let sf = apply_multiplier(&symbol, f)?;
    let inner_spatial = sf.inner(g)?;
    // spectral pairing and tail
    let cf = grid.coefficients(f.values());
    let cg = grid.coefficients(g.values());
    let re = op.table().real_parts();
    let vol = grid.volume();
    let (spec_terms, tail_terms): (Vec<f64>, Vec<f64>) = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let w = (cf[idx] * cg[idx].conj()).re * vol;
            if !symbol.is_clean(idx) || w == 0.0 {
                return (0.0, 0.0);
            }
            let lam = 2.0 * re[idx];
            let full = spec.time_transform(lam, 0.0);
            let m = symbol.m_values[idx].re;
            let tail = if full == 0.0 {
                0.0
            } else {
                m * spec.time_transform(lam, lambda.t_max) / full
            };
            (w * m, w * tail)
        })
        .unzip();
    let inner_spectral = pairwise_sum(&spec_terms);
    let tail_term = pairwise_sum(&tail_terms);
    let scale = (f.norm(2.0) * g.norm(2.0) * spec.sup_norm).max(1e-300);
    Ok(AdjointReport {
        rel_discrepancy: (lambda.value - inner_spatial).abs() / scale,
        rel_discrepancy_tail_corrected: (lambda.value + tail_term - inner_spatial).abs() / scale,
        symbol_sup: symbol.sup_abs(),
        lambda,
        inner_spatial,
        inner_spectral,
        tail_term,
    })
}

/// `eta = phi (1 + r)` paired with the symmetric measure `nu~`.
#[derive(Debug, Clone)]
pub struct SymmetrizedForm {
    pub spec: MultiplierSpec,
    pub nu_sym: LevyMeasure,
    ratio_source: crate::measure::SymmetrizationResult,
    /// Largest sampled `|eta|`; at most `2 ||phi||_inf`.
    pub eta_sup: f64,
}

impl SymmetrizedForm {
    pub fn eta(&self, t: f64, y: Point) -> f64 {
        self.spec.eval(t, y) * (1.0 + self.ratio_source.ratio(y))
    }
}

pub fn symmetrized_form(spec: &MultiplierSpec, nu: &LevyMeasure) -> Result<SymmetrizedForm> {
    let sym = symmetrize(nu);
    let mut form = SymmetrizedForm {
        spec: spec.clone(),
        nu_sym: sym.nu_sym.clone(),
        ratio_source: sym,
        eta_sup: 0.0,
    };
    let mut worst: f64 = 0.0;
    for k in 0..60 {
        let t = 1e-3 * 1.2f64.powi(k);
        for (e, _) in directions(nu.dim(), 8) {
            for r in [1e-3, 0.1, 1.0, 10.0] {
                worst = worst.max(form.eta(t, [r * e[0], r * e[1]]).abs());
            }
        }
    }
    if worst > 2.0 * spec.sup_norm * (1.0 + 1e-12) {
        return Err(Error::param("eta", format!("sup {worst} exceeds 2 ||phi||")));
    }
    form.eta_sup = worst;
    Ok(form)
}

/// `Lambda~_eta(f, g)`: increments of the same semigroup integrated against `eta nu~`.
pub fn lambda_symmetrized(
    form: &SymmetrizedForm,
    f: &GridFunction,
    g: &GridFunction,
    op: &SemigroupOperator,
    t_max: Option<f64>,
    quad: &QuadSpec,
) -> Result<LambdaReport> {
    check_pair(op, f, g)?;
    quad.validate()?;
    let t_max = match t_max {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::param("t_max", format!("{t} must be > 0"))),
        None => joint_horizon(op, f, g)?,
    };
    let spec = &form.spec;
    let value = if spec.sup_norm == 0.0 {
        0.0
    } else {
        let space = spec.space;
        let ratio = &form.ratio_source;
        bilinear_integral(
            op,
            &form.nu_sym,
            &|t| spec.time_factor(t),
            &|y| space.eval(y) * (1.0 + ratio.ratio(y)),
            f,
            g,
            t_max,
            quad,
        )?
    };
    lambda_report(spec, value, op, f, g, t_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_json() {
        let t: PhiTemplate =
            serde_json::from_str(r#"{"kind":"product","factors":[{"kind":"sin_t","freq":1.0},{"kind":"half_space_y","sign":"+"}]}"#)
                .unwrap();
        let s = MultiplierSpec::new(t).unwrap();
        assert_eq!(s.sup_norm, 1.0);
        assert_eq!(s.eval(1.0, [-1.0, 0.0]), 0.0);
        assert!(serde_json::from_str::<PhiTemplate>(r#"{"kind":"const","value":1.0,"x":2}"#).is_err());
    }

    #[test]
    fn time_transform_closed_form_matches_quadrature() {
        let cases = [
            PhiTemplate::Const { value: 2.0 },
            PhiTemplate::ExpDecayT { rate: 1.0 },
            PhiTemplate::SinT { freq: 1.0 },
            PhiTemplate::Product {
                factors: vec![
                    PhiTemplate::SinT { freq: 2.0 },
                    PhiTemplate::SinT { freq: 0.5 },
                    PhiTemplate::ExpDecayT { rate: 0.3 },
                ],
            },
        ];
        for c in cases {
            let s = MultiplierSpec::new(c).unwrap();
            for lam in [0.05, 0.7, 5.0, 80.0] {
                let a = s.time_transform(lam, 0.0);
                let b = s.time_transform_quadrature(lam);
                assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{} at {lam}: {a} vs {b}", s.description);
            }
        }
        let s = MultiplierSpec::new(PhiTemplate::SinT { freq: 1.0 }).unwrap();
        assert!((s.time_transform(2.0, 0.0) - 1.0 / 5.0).abs() < 1e-15);
    }
}
