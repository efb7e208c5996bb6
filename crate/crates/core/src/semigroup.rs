//! The semigroups `P_t`, its dual and its symmetrization acting on grid
//! functions, transition densities and ultracontractivity constants.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{CharacteristicExponent, ExponentTable};
use crate::grid::{phase, Grid, GridFunction};
use crate::quadrature::{cap_panel_width, composite, geometric_breaks, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Multiplier `e^{-t psi(xi)}`.
    Forward,
    /// Multiplier `e^{-t psi(-xi)}`.
    Dual,
    /// Multiplier `e^{-t Re psi(xi)}`.
    Symmetrized,
}

/// `P_t`, `P^_t` or `P~_t` on a fixed grid.
#[derive(Debug, Clone)]
pub struct SemigroupOperator {
    psi: CharacteristicExponent,
    table: Arc<ExponentTable>,
    variant: Variant,
}

impl SemigroupOperator {
    pub fn new(psi: &CharacteristicExponent, grid: &Grid, variant: Variant) -> Result<Self> {
        if psi.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "exponent in dimension {} on a {}-d grid",
                psi.dim(),
                grid.dim()
            )));
        }
        Ok(SemigroupOperator {
            psi: psi.clone(),
            table: Arc::new(ExponentTable::new(psi, grid)),
            variant,
        })
    }

    /// Same exponent table, different variant.
    pub fn with_variant(&self, variant: Variant) -> Self {
        SemigroupOperator {
            variant,
            ..self.clone()
        }
    }

    pub fn exponent(&self) -> &CharacteristicExponent {
        &self.psi
    }

    pub fn table(&self) -> &ExponentTable {
        &self.table
    }

    pub fn grid(&self) -> &Grid {
        self.table.grid()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Exponent of the variant at every frequency index.
    pub fn symbol_exponent(&self) -> Vec<Complex64> {
        self.table
            .values()
            .iter()
            .map(|v| match self.variant {
                Variant::Forward => *v,
                Variant::Dual => v.conj(),
                Variant::Symmetrized => Complex64::new(v.re.max(0.0), 0.0),
            })
            .collect()
    }

    /// The multiplier `e^{-t psi_variant}` in FFT order.
    pub fn multiplier(&self, t: f64) -> Vec<Complex64> {
        self.symbol_exponent().iter().map(|v| (-t * v).exp()).collect()
    }

    /// Fourier-series coefficients of `P_t f` given those of `f`.
    pub(crate) fn evolve_coefficients(&self, coeffs: &[Complex64], t: f64) -> Vec<Complex64> {
        coeffs
            .iter()
            .zip(self.symbol_exponent())
            .map(|(c, e)| c * (-t * e).exp())
            .collect()
    }

    pub fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("t", format!("{t} must be >= 0")));
        }
        if f.grid() != self.grid() {
            return Err(Error::GridMismatch("function and semigroup grids differ".into()));
        }
        if t == 0.0 {
            return Ok(f.clone());
        }
        let grid = self.grid();
        let c = self.evolve_coefficients(&grid.coefficients(f.values()), t);
        let values = grid.synthesize(&c);
        if f.is_real() {
            Ok(GridFunction::real_from_complex(grid, values))
        } else {
            GridFunction::from_complex(grid, values)
        }
    }

    /// `P_t f` for several times, in order.
    pub fn apply_many(&self, ts: &[f64], f: &GridFunction) -> Result<Vec<GridFunction>> {
        ts.par_iter().map(|&t| self.apply(t, f)).collect()
    }
}

pub fn semigroup_apply(op: &SemigroupOperator, t: f64, f: &GridFunction) -> Result<GridFunction> {
    op.apply(t, f)
}

/// `p_t(x) = (2 pi)^{-d} int e^{-t psi(xi)} e^{-i x.xi} dxi` on the torus.
pub fn transition_density(op: &SemigroupOperator, t: f64) -> Result<GridFunction> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("{t} must be > 0")));
    }
    let edge = op.table().edge_decay(t);
    if edge > 1e-14 {
        return Err(Error::Aliasing { edge_value: edge });
    }
    let grid = op.grid();
    let mut buf: Vec<Complex64> = op
        .multiplier(t)
        .iter()
        .enumerate()
        .map(|(idx, m)| m * phase(grid, idx))
        .collect();
    grid.forward_raw(&mut buf);
    let scale = 1.0 / grid.volume();
    let values = buf.iter().map(|v| Complex64::new(v.re * scale, 0.0)).collect();
    Ok(GridFunction::real_from_complex(grid, values))
}

/// `C_t = (2 pi)^{-d} int e^{-t Re psi}`: the continuum integral and its
/// frequency-lattice counterpart, which is what bounds grid densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UltraConstant {
    pub continuum: f64,
    pub torus: f64,
    pub error_estimate: f64,
}

pub fn ultra_constant(op: &SemigroupOperator, t: f64) -> Result<UltraConstant> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("{t} must be > 0")));
    }
    let edge = op.table().edge_decay(t);
    if edge > 1e-14 {
        return Err(Error::Aliasing { edge_value: edge });
    }
    let grid = op.grid();
    let terms: Vec<f64> = op
        .table()
        .values()
        .iter()
        .map(|v| (-t * v.re.max(0.0)).exp())
        .collect();
    let torus = crate::quadrature::pairwise_sum(&terms) / grid.volume();
    let (continuum, error_estimate) = continuum_ultra(op.exponent(), t)?;
    Ok(UltraConstant {
        continuum,
        torus,
        error_estimate,
    })
}

fn continuum_ultra(psi: &CharacteristicExponent, t: f64) -> Result<(f64, f64)> {
    let dirs: Vec<([f64; 2], f64)> = if psi.dim() == 1 {
        vec![([1.0, 0.0], 1.0), ([-1.0, 0.0], 1.0)]
    } else {
        let gl = GaussLegendre::new(48);
        gl.on(0.0, 2.0 * PI).map(|(th, w)| ([th.cos(), th.sin()], w)).collect()
    };
    let d = psi.dim() as i32;
    let mut levels = [0.0; 2];
    for (li, order) in [10usize, 16].into_iter().enumerate() {
        let gl = GaussLegendre::new(order);
        let mut total = 0.0;
        for (e, w) in &dirs {
            let g = |r: f64| {
                (-t * psi.real_part([r * e[0], r * e[1]])).exp() * r.powi(d - 1)
            };
            // radius where the integrand is negligible
            let mut end = 1.0;
            while g(end) > 1e-18 * g(1e-3).max(1e-300) {
                end *= 2.0;
                if end > 1e12 {
                    return Err(Error::Divergence {
                        what: "e^(-t Re psi) does not decay".into(),
                        error_estimate: g(end),
                    });
                }
            }
            let floor = 1e-9 * end;
            let br = cap_panel_width(&geometric_breaks(floor, end, 40), end / 64.0);
            total += w * (composite(&gl, &br, g) + floor * g(floor));
        }
        levels[li] = total / (2.0 * PI).powi(d);
    }
    Ok((levels[1], (levels[1] - levels[0]).abs()))
}
