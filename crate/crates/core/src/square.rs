//! Littlewood-Paley square functions of the symmetrized process.

use serde::{Deserialize, Serialize};

use crate::engine::{build_rule, time_integral, Kernel, QuadSpec};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::measure::{symmetrize, LevyMeasure};
use crate::exponent::char_exponent;
use crate::semigroup::{SemigroupOperator, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareVariant {
    /// Increments over all `y`.
    Full,
    /// Increments over `{y : |u(x)| > |u(x + y)|}`.
    Starred,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PNorm {
    pub p: f64,
    pub g_norm: f64,
    pub f_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SquareFunctionResult {
    pub variant: SquareVariant,
    pub t_max: f64,
    pub g_values: GridFunction,
    pub p_norms: Vec<PNorm>,
    /// `||P~_{T_max} f||_2^2`, the energy left beyond the horizon.
    pub tail_energy: f64,
}

impl SquareFunctionResult {
    /// `||G f||_2^2 + ||P~_{T_max} f||_2^2 - ||f||_2^2` relative to `||f||_2^2`.
    pub fn energy_defect(&self, f: &GridFunction) -> f64 {
        let f2 = f.norm_pow(2.0);
        (self.g_values.norm_pow(2.0) + self.tail_energy - f2) / f2.max(1e-300)
    }
}

/// Smallest `t = 2^k >= 1` with `||P~_t f||_2 <= tol ||f||_2`.
pub fn decay_horizon(op: &SemigroupOperator, f: &GridFunction, tol: f64) -> Result<f64> {
    let target = tol * f.norm(2.0);
    let mut t = 1.0;
    for _ in 0..40 {
        if op.apply(t, f)?.norm(2.0) <= target {
            return Ok(t);
        }
        t *= 2.0;
    }
    Err(Error::Divergence {
        what: "semigroup does not decay; f may have nonzero mean, pass t_max".into(),
        error_estimate: op.apply(t, f)?.norm(2.0) / f.norm(2.0).max(1e-300),
    })
}

/// Square function with the symmetrized semigroup `op` and its measure `nu_sym`.
/// Without `t_max` the horizon is where `||P~_t f||_2 <= 1e-4 ||f||_2`.
pub fn square_function(
    op: &SemigroupOperator,
    nu_sym: &LevyMeasure,
    f: &GridFunction,
    variant: SquareVariant,
    t_max: Option<f64>,
    quad: &QuadSpec,
    p_list: &[f64],
) -> Result<SquareFunctionResult> {
    if !nu_sym.is_symmetric() {
        return Err(Error::param("nu", "square functions need a symmetric measure"));
    }
    if op.variant() != Variant::Symmetrized && !op.exponent().measure().is_symmetric() {
        return Err(Error::param("op", "square functions use the symmetrized semigroup"));
    }
    if f.grid() != op.grid() {
        return Err(Error::GridMismatch("function and semigroup grids differ".into()));
    }
    if !f.is_real() {
        return Err(Error::param("f", "must be real valued"));
    }
    for &p in p_list {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::param("p", format!("{p} must be >= 1")));
        }
    }
    quad.validate()?;
    let t_max = match t_max {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::param("t_max", format!("{t} must be > 0"))),
        None => decay_horizon(op, f, 1e-4)?,
    };
    // one rule for both variants in 1-d so that G_* <= G holds node by node
    let dense = variant == SquareVariant::Full && op.grid().dim() == 2;
    let rule = build_rule(nu_sym, op.grid(), quad, &|_| 1.0, dense)?;
    let mesh = quad.time_mesh(t_max);
    let kernel = Kernel::Square {
        starred: variant == SquareVariant::Starred,
    };
    let out = time_integral(op, &f.coefficients(), None, &kernel, &rule, &mesh, &|_| 1.0);
    let values: Vec<f64> = out.pointwise.iter().map(|v| v.max(0.0).sqrt()).collect();
    let g_values = GridFunction::from_real(op.grid(), values)?;
    let p_norms = p_list
        .iter()
        .map(|&p| {
            let g_norm = g_values.norm(p);
            let f_norm = f.norm(p);
            PNorm {
                p,
                g_norm,
                f_norm,
                ratio: g_norm / f_norm.max(1e-300),
            }
        })
        .collect();
    Ok(SquareFunctionResult {
        variant,
        t_max,
        g_values,
        p_norms,
        tail_energy: op.apply(t_max, f)?.norm_pow(2.0),
    })
}

/// Symmetrizes `nu` and evaluates the square function of `f` on its grid.
pub fn square_function_of(
    nu: &LevyMeasure,
    f: &GridFunction,
    variant: SquareVariant,
    t_max: Option<f64>,
    quad: &QuadSpec,
    p_list: &[f64],
) -> Result<SquareFunctionResult> {
    let sym = symmetrize(nu);
    let op = SemigroupOperator::new(&char_exponent(nu), f.grid(), Variant::Symmetrized)?;
    square_function(&op, &sym.nu_sym, f, variant, t_max, quad, p_list)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub index: usize,
    pub variant: SquareVariant,
    pub p: f64,
    pub g_norm: f64,
    pub f_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    pub variant: SquareVariant,
    pub p: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalenceReport {
    pub rows: Vec<NormRow>,
    pub summary: Vec<NormSummary>,
}

/// Ratios `||G f||_p / ||f||_p` over a family, with min and max per `(variant, p)`.
pub fn norm_equivalence_report(
    nu: &LevyMeasure,
    family: &[GridFunction],
    variants: &[SquareVariant],
    p_list: &[f64],
    quad: &QuadSpec,
) -> Result<NormEquivalenceReport> {
    let mut rows = Vec::new();
    for (index, f) in family.iter().enumerate() {
        if f.norm(2.0) == 0.0 {
            return Err(Error::param("family", format!("function {index} is zero")));
        }
        for &variant in variants {
            let r = square_function_of(nu, f, variant, None, quad, p_list)?;
            for n in &r.p_norms {
                rows.push(NormRow {
                    index,
                    variant,
                    p: n.p,
                    g_norm: n.g_norm,
                    f_norm: n.f_norm,
                    ratio: n.ratio,
                });
            }
        }
    }
    let mut summary = Vec::new();
    for &variant in variants {
        for &p in p_list {
            let ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.variant == variant && r.p == p)
                .map(|r| r.ratio)
                .collect();
            summary.push(NormSummary {
                variant,
                p,
                ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                ratio_max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    Ok(NormEquivalenceReport { rows, summary })
}
