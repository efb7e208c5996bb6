//! The Hardy-Stein identity
//! `||f||_p^p - ||P_T f||_p^p = int_0^T int int F(P_t f(x), P_t f(x+y); p) nu(dy) dx dt`
//! checked on the periodic grid.

use serde::{Deserialize, Serialize};

use crate::engine::{build_rule, time_integral, Kernel, QuadSpec};
use crate::error::{Error, Result};
use crate::exponent::CharacteristicExponent;
use crate::grid::GridFunction;
use crate::semigroup::{SemigroupOperator, Variant};
use crate::taylor::TaylorRemainder;

/// Right-hand side at one mesh level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsEstimate {
    pub value: f64,
    /// Part of `value` coming from `|y| < y_cut_factor * h`.
    pub near_field: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub level: usize,
    pub mesh: QuadSpec,
    pub rhs: f64,
    pub rel_error: f64,
    pub near_field: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub p: f64,
    pub eps: f64,
    pub horizon: f64,
    pub lhs: f64,
    /// Finest level of the trace.
    pub rhs: f64,
    pub rel_error: f64,
    pub quadrature_budget: QuadSpec,
    pub refinement_trace: Vec<TraceEntry>,
    pub warnings: Vec<String>,
}

impl IdentityReport {
    /// Errors along the trace decrease strictly.
    pub fn converging(&self) -> bool {
        self.refinement_trace
            .windows(2)
            .all(|w| w[1].rel_error < w[0].rel_error)
    }
}

fn rel_error(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(1e-300)
}

fn check_inputs(psi: &CharacteristicExponent, f: &GridFunction, horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("T", format!("{horizon} must be > 0")));
    }
    if !f.is_real() {
        return Err(Error::param("f", "must be real valued"));
    }
    if psi.dim() != f.grid().dim() {
        return Err(Error::GridMismatch("exponent and function dimensions differ".into()));
    }
    Ok(())
}

/// Integral of `F` (or `F_eps`) at one mesh level, with the forward semigroup.
pub fn hardy_stein_rhs_with(
    op: &SemigroupOperator,
    rem: TaylorRemainder,
    f: &GridFunction,
    horizon: f64,
    level: &QuadSpec,
) -> Result<RhsEstimate> {
    check_inputs(op.exponent(), f, horizon)?;
    level.validate()?;
    if op.variant() != Variant::Forward {
        return Err(Error::param("op", "the identity uses the forward semigroup"));
    }
    if f.grid() != op.grid() {
        return Err(Error::GridMismatch("function and semigroup grids differ".into()));
    }
    let rule = build_rule(op.exponent().measure(), op.grid(), level, &|_| 1.0, true)?;
    let mesh = level.time_mesh(horizon);
    let out = time_integral(op, &f.coefficients(), None, &Kernel::Taylor(rem), &rule, &mesh, &|_| 1.0);
    if !out.total.is_finite() {
        return Err(Error::Divergence {
            what: "Hardy-Stein integral".into(),
            error_estimate: f64::INFINITY,
        });
    }
    Ok(RhsEstimate {
        value: out.total,
        near_field: out.near_total,
    })
}

/// `int_0^T int int F(P_t f(x), P_t f(x+y); p) nu(dy) dx dt` at the base mesh of `quad`.
pub fn hardy_stein_rhs(
    psi: &CharacteristicExponent,
    f: &GridFunction,
    p: f64,
    horizon: f64,
    quad: &QuadSpec,
) -> Result<f64> {
    check_inputs(psi, f, horizon)?;
    let op = SemigroupOperator::new(psi, f.grid(), Variant::Forward)?;
    Ok(hardy_stein_rhs_with(&op, TaylorRemainder::new(p, 0.0)?, f, horizon, quad)?.value)
}

/// `int Phi(f) - int Phi(P_T f)` for the convex function behind `rem`.
pub fn identity_lhs(op: &SemigroupOperator, rem: &TaylorRemainder, f: &GridFunction, horizon: f64) -> Result<f64> {
    let pt = op.apply(horizon, f)?;
    let energy = |g: &GridFunction| -> f64 {
        let vals: Vec<f64> = g.real_values().iter().map(|v| rem.phi(*v)).collect();
        g.grid().cell_volume() * crate::quadrature::pairwise_sum(&vals)
    };
    Ok(energy(f) - energy(&pt))
}

/// Runs levels `0..=quad.refine_levels` and compares with the exact left side.
/// With `eps > 0` both sides use `(x^2 + eps^2)^{p/2}` in place of `|x|^p`.
pub fn verify_identity_eps(
    psi: &CharacteristicExponent,
    f: &GridFunction,
    p: f64,
    eps: f64,
    horizon: f64,
    quad: &QuadSpec,
) -> Result<IdentityReport> {
    check_inputs(psi, f, horizon)?;
    quad.validate()?;
    let rem = TaylorRemainder::new(p, eps)?;
    let op = SemigroupOperator::new(psi, f.grid(), Variant::Forward)?;
    let lhs = identity_lhs(&op, &rem, f, horizon)?;
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    for level in 0..=quad.refine_levels {
        let mesh = quad.level(level);
        let est = hardy_stein_rhs_with(&op, rem, f, horizon, &mesh)?;
        if est.near_field > 0.1 * est.value.abs() {
            warnings.push(format!(
                "level {level}: small-y part is {:.1}% of the integral",
                100.0 * est.near_field / est.value.abs().max(1e-300)
            ));
        }
        trace.push(TraceEntry {
            level,
            mesh,
            rhs: est.value,
            rel_error: rel_error(lhs, est.value),
            near_field: est.near_field,
        });
    }
    let last = trace.last().expect("at least one level");
    let (rhs, err) = (last.rhs, last.rel_error);
    let report = IdentityReport {
        p,
        eps,
        horizon,
        lhs,
        rhs,
        rel_error: err,
        quadrature_budget: *quad,
        refinement_trace: trace,
        warnings,
    };
    if report.refinement_trace.len() > 1 && !report.converging() {
        let mut r = report;
        r.warnings.push("error did not decrease under refinement".into());
        return Ok(r);
    }
    Ok(report)
}

pub fn verify_identity(
    psi: &CharacteristicExponent,
    f: &GridFunction,
    p: f64,
    horizon: f64,
    quad: &QuadSpec,
) -> Result<IdentityReport> {
    verify_identity_eps(psi, f, p, 0.0, horizon, quad)
}

/// `rhs(T_max)` with the remainder `||P_{T_max} f||_p^p` that bounds the
/// rest of the infinite-time integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteHorizonReport {
    pub t_max: f64,
    pub norm_pow: f64,
    pub rhs: f64,
    pub remainder_bound: f64,
}

pub fn infinite_horizon_report(
    psi: &CharacteristicExponent,
    f: &GridFunction,
    p: f64,
    t_max: f64,
    quad: &QuadSpec,
) -> Result<InfiniteHorizonReport> {
    check_inputs(psi, f, t_max)?;
    let op = SemigroupOperator::new(psi, f.grid(), Variant::Forward)?;
    let rhs = hardy_stein_rhs_with(&op, TaylorRemainder::new(p, 0.0)?, f, t_max, quad)?.value;
    Ok(InfiniteHorizonReport {
        t_max,
        norm_pow: f.norm_pow(p),
        rhs,
        remainder_bound: op.apply(t_max, f)?.norm_pow(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::char_exponent;
    use crate::grid::Grid;
    use crate::measure::LevyMeasure;

    #[test]
    fn zero_function() {
        let nu = LevyMeasure::stable_asymmetric(1, 1.5, 1.0, 0.5).unwrap();
        let grid = Grid::new(1, 256, 10.0).unwrap();
        let f = GridFunction::zeros(&grid);
        let v = hardy_stein_rhs(&char_exponent(&nu), &f, 1.5, 1.0, &QuadSpec::default()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn rejects_bad_horizon() {
        let nu = LevyMeasure::stable_asymmetric(1, 1.5, 1.0, 0.5).unwrap();
        let grid = Grid::new(1, 256, 10.0).unwrap();
        let f = GridFunction::zeros(&grid);
        assert!(hardy_stein_rhs(&char_exponent(&nu), &f, 2.0, 0.0, &QuadSpec::default()).is_err());
        assert!(hardy_stein_rhs(&char_exponent(&nu), &f, 1.0, 1.0, &QuadSpec::default()).is_err());
    }
}
