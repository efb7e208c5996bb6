//! Pure-jump Lévy measures: construction, densities, integrability,
//! symmetrization into the even part and the Radon-Nikodym ratio `r`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm, Point};
use crate::quadrature::{composite, geometric_breaks, graded_from_zero, GaussLegendre};

pub const DEFAULT_INNER_CUTOFF: f64 = 1e-6;
pub const DEFAULT_OUTER_CUTOFF: f64 = 1e3;

/// A point mass of a compound-Poisson jump law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Point,
    pub prob: f64,
}

/// Normalized jump-size law of a compound-Poisson measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLaw {
    /// Uniform on `[lo, hi]` (one dimension).
    Uniform { lo: f64, hi: f64 },
    Atoms { atoms: Vec<Atom> },
}

/// User-supplied density with a declared singularity order.
#[derive(Clone)]
pub struct CustomDensity {
    pub name: String,
    pub alpha: f64,
    pub density: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    /// `c+ |y|^{-d-a}` on `y_1 > 0`, `c- |y|^{-d-a}` on `y_1 < 0`.
    StableAsymmetric { alpha: f64, c_plus: f64, c_minus: f64 },
    /// Stable density damped by `e^{-theta |y|}` with side-dependent `theta`.
    TemperedStable {
        alpha: f64,
        c_plus: f64,
        c_minus: f64,
        theta_plus: f64,
        theta_minus: f64,
    },
    CompoundPoisson { rate: f64, jumps: JumpLaw },
    Custom(CustomDensity),
    /// `(nu(B) + nu(-B)) / 2`.
    Symmetrized(Arc<LevyMeasure>),
    /// `nu(-B)`, the measure of the dual process.
    Reflected(Arc<LevyMeasure>),
}

/// A pure-jump Lévy measure together with the cutoffs used by quadrature.
#[derive(Debug, Clone)]
pub struct LevyMeasure {
    family: Family,
    dim: usize,
    inner_cutoff: f64,
    outer_cutoff: f64,
}

/// Serializable description of a measure, as read from JSON configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    StableAsymmetric {
        alpha: f64,
        c_plus: f64,
        c_minus: f64,
        #[serde(default = "one")]
        d: usize,
        #[serde(default)]
        inner_cutoff: Option<f64>,
        #[serde(default)]
        outer_cutoff: Option<f64>,
    },
    TemperedStable {
        alpha: f64,
        c_plus: f64,
        c_minus: f64,
        theta_plus: f64,
        theta_minus: f64,
        #[serde(default = "one")]
        d: usize,
        #[serde(default)]
        inner_cutoff: Option<f64>,
        #[serde(default)]
        outer_cutoff: Option<f64>,
    },
    CompoundPoisson {
        rate: f64,
        jumps: JumpLaw,
        #[serde(default = "one")]
        d: usize,
    },
}

fn one() -> usize {
    1
}

impl MeasureSpec {
    pub fn build(&self) -> Result<LevyMeasure> {
        match self {
            MeasureSpec::StableAsymmetric {
                alpha,
                c_plus,
                c_minus,
                d,
                inner_cutoff,
                outer_cutoff,
            } => LevyMeasure::stable_asymmetric(*d, *alpha, *c_plus, *c_minus)?
                .with_cutoffs(
                    inner_cutoff.unwrap_or(DEFAULT_INNER_CUTOFF),
                    outer_cutoff.unwrap_or(DEFAULT_OUTER_CUTOFF),
                ),
            MeasureSpec::TemperedStable {
                alpha,
                c_plus,
                c_minus,
                theta_plus,
                theta_minus,
                d,
                inner_cutoff,
                outer_cutoff,
            } => LevyMeasure::tempered_stable(
                *d,
                *alpha,
                *c_plus,
                *c_minus,
                *theta_plus,
                *theta_minus,
            )?
            .with_cutoffs(
                inner_cutoff.unwrap_or(DEFAULT_INNER_CUTOFF),
                outer_cutoff.unwrap_or(DEFAULT_OUTER_CUTOFF),
            ),
            MeasureSpec::CompoundPoisson { rate, jumps, d } => {
                LevyMeasure::compound_poisson(*d, *rate, jumps.clone())
            }
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(Error::param("d", format!("{d} not in {{1, 2}}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} not in (0, 2)")))
    }
}

fn check_intensities(c_plus: f64, c_minus: f64) -> Result<()> {
    if !(c_plus.is_finite() && c_minus.is_finite()) || c_plus < 0.0 || c_minus < 0.0 {
        return Err(Error::param("c_plus/c_minus", "intensities must be finite and >= 0"));
    }
    if c_plus + c_minus <= 0.0 {
        return Err(Error::param("c_plus/c_minus", "all-zero intensities"));
    }
    Ok(())
}

/// Half-space side of a jump: the sign of its first coordinate.
pub(crate) fn side_of(y: Point) -> f64 {
    if y[0] > 0.0 {
        1.0
    } else if y[0] < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl LevyMeasure {
    pub fn stable_asymmetric(dim: usize, alpha: f64, c_plus: f64, c_minus: f64) -> Result<Self> {
        check_dim(dim)?;
        check_alpha(alpha)?;
        check_intensities(c_plus, c_minus)?;
        Ok(Self::raw(Family::StableAsymmetric {
            alpha,
            c_plus,
            c_minus,
        }, dim))
    }

    pub fn tempered_stable(
        dim: usize,
        alpha: f64,
        c_plus: f64,
        c_minus: f64,
        theta_plus: f64,
        theta_minus: f64,
    ) -> Result<Self> {
        check_dim(dim)?;
        check_alpha(alpha)?;
        check_intensities(c_plus, c_minus)?;
        if !(theta_plus > 0.0 && theta_minus > 0.0 && theta_plus.is_finite() && theta_minus.is_finite()) {
            return Err(Error::param("theta", "tempering rates must be positive"));
        }
        Ok(Self::raw(Family::TemperedStable {
            alpha,
            c_plus,
            c_minus,
            theta_plus,
            theta_minus,
        }, dim))
    }

    pub fn compound_poisson(dim: usize, rate: f64, jumps: JumpLaw) -> Result<Self> {
        check_dim(dim)?;
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param("rate", format!("{rate} must be > 0")));
        }
        match &jumps {
            JumpLaw::Uniform { lo, hi } => {
                if dim != 1 {
                    return Err(Error::param("jumps", "uniform jump law is one-dimensional"));
                }
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(Error::param("jumps", "uniform law needs lo < hi"));
                }
                if *lo <= 0.0 && *hi >= 0.0 {
                    return Err(Error::param("jumps", "uniform law must not charge a neighbourhood of 0"));
                }
            }
            JumpLaw::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::param("jumps", "no atoms"));
                }
                let total: f64 = atoms.iter().map(|a| a.prob).sum();
                if atoms.iter().any(|a| !(a.prob > 0.0)) || (total - 1.0).abs() > 1e-12 {
                    return Err(Error::param("jumps", "atom probabilities must be positive and sum to 1"));
                }
                if atoms.iter().any(|a| norm(a.point) == 0.0 || (dim == 1 && a.point[1] != 0.0)) {
                    return Err(Error::param("jumps", "atoms must be nonzero points of R^d"));
                }
            }
        }
        Ok(Self::raw(Family::CompoundPoisson { rate, jumps }, dim))
    }

    pub fn custom(dim: usize, density: CustomDensity) -> Result<Self> {
        check_dim(dim)?;
        if !(density.alpha >= 0.0 && density.alpha < 2.0) {
            return Err(Error::param("alpha", "singularity order must lie in [0, 2)"));
        }
        Ok(Self::raw(Family::Custom(density), dim))
    }

    fn raw(family: Family, dim: usize) -> Self {
        LevyMeasure {
            family,
            dim,
            inner_cutoff: DEFAULT_INNER_CUTOFF,
            outer_cutoff: DEFAULT_OUTER_CUTOFF,
        }
    }

    pub fn with_cutoffs(mut self, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::param("cutoffs", format!("need 0 < {inner} < {outer}")));
        }
        self.inner_cutoff = inner;
        self.outer_cutoff = outer;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inner_cutoff(&self) -> f64 {
        self.inner_cutoff
    }

    pub fn outer_cutoff(&self) -> f64 {
        self.outer_cutoff
    }

    /// Order `a` of the singularity `|y|^{-d-a}` at the origin.
    pub fn singularity_order(&self) -> f64 {
        match &self.family {
            Family::StableAsymmetric { alpha, .. } | Family::TemperedStable { alpha, .. } => *alpha,
            Family::CompoundPoisson { .. } => 0.0,
            Family::Custom(c) => c.alpha,
            Family::Symmetrized(inner) | Family::Reflected(inner) => inner.singularity_order(),
        }
    }

    /// `false` only for compound-Poisson measures with atomic jumps.
    pub fn has_density(&self) -> bool {
        match &self.family {
            Family::CompoundPoisson { jumps: JumpLaw::Atoms { .. }, .. } => false,
            Family::Symmetrized(inner) | Family::Reflected(inner) => inner.has_density(),
            _ => true,
        }
    }

    /// Total mass, finite for compound-Poisson measures only.
    pub fn total_mass(&self) -> Option<f64> {
        match &self.family {
            Family::CompoundPoisson { rate, .. } => Some(*rate),
            Family::Symmetrized(inner) | Family::Reflected(inner) => inner.total_mass(),
            _ => None,
        }
    }

    pub fn is_finite_activity(&self) -> bool {
        self.total_mass().is_some()
    }

    /// Atoms `(point, mass)` of an atomic measure.
    pub fn atoms(&self) -> Option<Vec<(Point, f64)>> {
        match &self.family {
            Family::CompoundPoisson { rate, jumps: JumpLaw::Atoms { atoms } } => {
                Some(atoms.iter().map(|a| (a.point, rate * a.prob)).collect())
            }
            Family::Symmetrized(inner) => inner.atoms().map(|atoms| {
                atoms
                    .iter()
                    .flat_map(|(p, m)| [(*p, 0.5 * m), ([-p[0], -p[1]], 0.5 * m)])
                    .collect()
            }),
            Family::Reflected(inner) => inner
                .atoms()
                .map(|atoms| atoms.iter().map(|(p, m)| ([-p[0], -p[1]], *m)).collect()),
            _ => None,
        }
    }

    /// Lebesgue density at `y != 0` (zero for atomic measures).
    pub fn density(&self, y: Point) -> f64 {
        let r = norm(y);
        if r == 0.0 {
            return 0.0;
        }
        let d = self.dim as f64;
        match &self.family {
            Family::StableAsymmetric { alpha, c_plus, c_minus } => {
                let c = side_value(y, *c_plus, *c_minus);
                c * r.powf(-d - alpha)
            }
            Family::TemperedStable {
                alpha,
                c_plus,
                c_minus,
                theta_plus,
                theta_minus,
            } => {
                let c = side_value(y, *c_plus, *c_minus);
                let th = side_value(y, *theta_plus, *theta_minus);
                c * (-th * r).exp() * r.powf(-d - alpha)
            }
            Family::CompoundPoisson { rate, jumps } => match jumps {
                JumpLaw::Uniform { lo, hi } => {
                    if y[0] >= *lo && y[0] <= *hi {
                        rate / (hi - lo)
                    } else {
                        0.0
                    }
                }
                JumpLaw::Atoms { .. } => 0.0,
            },
            Family::Custom(c) => (c.density)(y).max(0.0),
            Family::Symmetrized(inner) => 0.5 * (inner.density(y) + inner.density([-y[0], -y[1]])),
            Family::Reflected(inner) => inner.density([-y[0], -y[1]]),
        }
    }

    /// Density along the ray `r e` in polar form, `density(r e) r^{d-1}`.
    pub(crate) fn radial_density(&self, e: Point, r: f64) -> f64 {
        let y = [r * e[0], r * e[1]];
        self.density(y) * r.powi(self.dim as i32 - 1)
    }

    /// Directions (angles in d = 2) where the density jumps.
    pub(crate) fn angular_breaks(&self) -> Vec<f64> {
        use std::f64::consts::FRAC_PI_2;
        match &self.family {
            Family::StableAsymmetric { .. } | Family::TemperedStable { .. } => {
                vec![-FRAC_PI_2, FRAC_PI_2]
            }
            Family::Symmetrized(inner) | Family::Reflected(inner) => {
                let mut b = inner.angular_breaks();
                let extra: Vec<f64> = b.iter().map(|t| t + std::f64::consts::PI).collect();
                b.extend(extra);
                b
            }
            _ => vec![],
        }
    }

    /// `int_R^inf density(r e) r^{d-1} dr`.
    pub(crate) fn radial_tail(&self, e: Point, big_r: f64) -> f64 {
        match &self.family {
            Family::StableAsymmetric { alpha, c_plus, c_minus } => {
                side_value(e, *c_plus, *c_minus) * big_r.powf(-alpha) / alpha
            }
            Family::CompoundPoisson { .. } => {
                let (lo, hi) = self.radial_support(e);
                if hi <= big_r {
                    0.0
                } else {
                    let gl = GaussLegendre::new(16);
                    gl.integrate(lo.max(big_r), hi, |r| self.radial_density(e, r))
                }
            }
            Family::Symmetrized(inner) => {
                0.5 * (inner.radial_tail(e, big_r) + inner.radial_tail([-e[0], -e[1]], big_r))
            }
            Family::Reflected(inner) => inner.radial_tail([-e[0], -e[1]], big_r),
            _ => {
                // Numerical: geometric panels over six decades of radius.
                let gl = GaussLegendre::new(12);
                let breaks = geometric_breaks(big_r, big_r * 1e6, 60);
                composite(&gl, &breaks, |r| self.radial_density(e, r))
            }
        }
    }

    /// Radial interval carrying mass along direction `e` (whole half-line for
    /// infinite-activity families).
    pub(crate) fn radial_support(&self, e: Point) -> (f64, f64) {
        match &self.family {
            Family::CompoundPoisson { jumps: JumpLaw::Uniform { lo, hi }, .. } => {
                if e[0] > 0.0 && *hi > 0.0 {
                    (lo.max(0.0), *hi)
                } else if e[0] < 0.0 && *lo < 0.0 {
                    ((-hi).max(0.0), -lo)
                } else {
                    (0.0, 0.0)
                }
            }
            Family::Symmetrized(inner) => {
                let (a, b) = inner.radial_support(e);
                let (c, d) = inner.radial_support([-e[0], -e[1]]);
                if b <= a {
                    (c, d)
                } else if d <= c {
                    (a, b)
                } else {
                    (a.min(c), b.max(d))
                }
            }
            Family::Reflected(inner) => inner.radial_support([-e[0], -e[1]]),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// `true` when `nu(B) = nu(-B)` for all `B`.
    pub fn is_symmetric(&self) -> bool {
        match &self.family {
            Family::StableAsymmetric { c_plus, c_minus, .. } => c_plus == c_minus,
            Family::TemperedStable {
                c_plus,
                c_minus,
                theta_plus,
                theta_minus,
                ..
            } => c_plus == c_minus && theta_plus == theta_minus,
            Family::CompoundPoisson { jumps, .. } => match jumps {
                JumpLaw::Uniform { .. } => false,
                JumpLaw::Atoms { atoms } => atoms.iter().all(|a| {
                    atoms.iter().any(|b| {
                        b.point[0] == -a.point[0] && b.point[1] == -a.point[1] && b.prob == a.prob
                    })
                }),
            },
            Family::Custom(c) => {
                let dim = self.dim;
                (1..=64).all(|k| {
                    let r = 1e-3 * 1.3f64.powi(k);
                    let th = 0.7 * k as f64;
                    let y = if dim == 1 {
                        [r, 0.0]
                    } else {
                        [r * th.cos(), r * th.sin()]
                    };
                    let a = (c.density)(y);
                    let b = (c.density)([-y[0], -y[1]]);
                    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
                })
            }
            Family::Symmetrized(_) => true,
            Family::Reflected(inner) => inner.is_symmetric(),
        }
    }

    /// Measure of the dual process, `nu(-dy)`.
    pub fn reflected(&self) -> LevyMeasure {
        match &self.family {
            Family::StableAsymmetric { alpha, c_plus, c_minus } => LevyMeasure {
                family: Family::StableAsymmetric {
                    alpha: *alpha,
                    c_plus: *c_minus,
                    c_minus: *c_plus,
                },
                ..self.clone()
            },
            Family::Reflected(inner) => inner.as_ref().clone(),
            _ => LevyMeasure {
                family: Family::Reflected(Arc::new(self.clone())),
                ..self.clone()
            },
        }
    }
}

fn side_value(y: Point, plus: f64, minus: f64) -> f64 {
    match side_of(y) {
        s if s > 0.0 => plus,
        s if s < 0.0 => minus,
        _ => 0.5 * (plus + minus),
    }
}

/// Unit directions used for polar integration: `{+1, -1}` in one dimension,
/// Gauss-Legendre angles on each half-plane in two.
pub(crate) fn directions(dim: usize, angular_order: usize) -> Vec<(Point, f64)> {
    if dim == 1 {
        return vec![([1.0, 0.0], 1.0), ([-1.0, 0.0], 1.0)];
    }
    use std::f64::consts::{FRAC_PI_2, PI};
    let gl = GaussLegendre::new(angular_order);
    let mut out = Vec::new();
    for (lo, hi) in [(-FRAC_PI_2, FRAC_PI_2), (FRAC_PI_2, FRAC_PI_2 + PI)] {
        for (th, w) in gl.on(lo, hi) {
            out.push(([th.cos(), th.sin()], w));
        }
    }
    out
}

/// Result of the integrability check `int (1 ^ |y|^2) nu(dy)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub value: f64,
    pub error_estimate: f64,
    /// `(delta, value without the extrapolated [0, delta] part)`.
    pub refinement: Vec<(f64, f64)>,
    /// Observed convergence order of the truncated values as `delta -> 0`.
    pub observed_order: Option<f64>,
}

impl LevyMeasure {
    /// `int (1 ^ |y|^2) nu(dy)` by graded quadrature from the inner cutoff,
    /// analytic extrapolation below it and an analytic tail beyond the outer
    /// cutoff.
    pub fn integrability(&self) -> Result<IntegrabilityReport> {
        if let Some(atoms) = self.atoms() {
            let v: f64 = atoms.iter().map(|(p, m)| m * norm(*p).powi(2).min(1.0)).sum();
            return Ok(IntegrabilityReport {
                value: v,
                error_estimate: 0.0,
                refinement: vec![],
                observed_order: None,
            });
        }
        let value = self.integrability_at(48, self.inner_cutoff, true);
        let coarse = self.integrability_at(24, self.inner_cutoff, true);
        let error_estimate = (value - coarse).abs();
        let alpha = self.singularity_order();
        let mut refinement = Vec::new();
        let mut observed_order = None;
        if alpha > 0.0 && !self.is_finite_activity() {
            // Truncated values at delta = 1e-2 / 2^j; differences shrink like delta^{2-a}.
            for j in 0..6 {
                let delta = 1e-2 / 2f64.powi(j);
                refinement.push((delta, self.integrability_at(48, delta, false)));
            }
            let diffs: Vec<f64> = refinement.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
            let last = diffs.len() - 1;
            if diffs[last] > 0.0 && diffs[last - 1] > 0.0 {
                observed_order = Some((diffs[last - 1] / diffs[last]).log2());
            }
        }
        if !value.is_finite() || error_estimate > 1e-6 * value.abs().max(1e-300) {
            return Err(Error::Divergence {
                what: "integrability of (1 ^ |y|^2) against nu".into(),
                error_estimate,
            });
        }
        Ok(IntegrabilityReport {
            value,
            error_estimate,
            refinement,
            observed_order,
        })
    }

    fn integrability_at(&self, shells: usize, floor: f64, extrapolate: bool) -> f64 {
        let gl = GaussLegendre::new(10);
        let alpha = self.singularity_order();
        let big_r = self.outer_cutoff;
        let mut total = 0.0;
        for (e, w) in directions(self.dim, 32) {
            let (lo, hi) = self.radial_support(e);
            if hi <= lo {
                continue;
            }
            let g = |r: f64| r.powi(2).min(1.0) * self.radial_density(e, r);
            let inner = if lo > 0.0 {
                let a = lo.min(1.0);
                let b = hi.min(1.0);
                if b > a {
                    composite(&gl, &[a, b], g)
                } else {
                    0.0
                }
            } else if extrapolate {
                graded_from_zero(&gl, floor, 1.0_f64.min(hi), shells, 1.0 - alpha, g)
            } else {
                composite(&gl, &geometric_breaks(floor, 1.0_f64.min(hi), shells), g)
            };
            let outer = if hi > 1.0 {
                let a = lo.max(1.0);
                let b = hi.min(big_r);
                let body = if b > a {
                    composite(&gl, &geometric_breaks(a, b, shells), g)
                } else {
                    0.0
                };
                body + self.radial_tail(e, big_r.max(a))
            } else {
                0.0
            };
            total += w * (inner + outer);
        }
        total
    }
}

/// Even part `nu~`, odd part `nu-bar` and the ratio `r = dnu-bar / dnu~`.
#[derive(Debug, Clone)]
pub struct SymmetrizationResult {
    pub nu_sym: LevyMeasure,
    source: LevyMeasure,
}

impl SymmetrizationResult {
    /// Density of the odd part `(density(y) - density(-y)) / 2`.
    pub fn anti_density(&self, y: Point) -> f64 {
        0.5 * (self.source.density(y) - self.source.density([-y[0], -y[1]]))
    }

    /// Radon-Nikodym ratio, zero off the support of `nu~`.
    pub fn ratio(&self, y: Point) -> f64 {
        if let Some(atoms) = self.source.atoms() {
            let m = |q: Point| -> f64 {
                atoms
                    .iter()
                    .filter(|(p, _)| p[0] == q[0] && p[1] == q[1])
                    .map(|(_, m)| m)
                    .sum()
            };
            let plus = m(y);
            let minus = m([-y[0], -y[1]]);
            let even = 0.5 * (plus + minus);
            return if even > 0.0 { 0.5 * (plus - minus) / even } else { 0.0 };
        }
        let even = self.nu_sym.density(y);
        if even > 0.0 {
            (self.anti_density(y) / even).clamp(-1.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn source(&self) -> &LevyMeasure {
        &self.source
    }
}

/// Splits `nu` into its even part and the bounded ratio of the odd part.
pub fn symmetrize(nu: &LevyMeasure) -> SymmetrizationResult {
    let nu_sym = match nu.family() {
        Family::StableAsymmetric { alpha, c_plus, c_minus } => {
            let c = 0.5 * (c_plus + c_minus);
            LevyMeasure {
                family: Family::StableAsymmetric {
                    alpha: *alpha,
                    c_plus: c,
                    c_minus: c,
                },
                ..nu.clone()
            }
        }
        _ if nu.is_symmetric() => nu.clone(),
        _ => LevyMeasure {
            family: Family::Symmetrized(Arc::new(nu.clone())),
            ..nu.clone()
        },
    };
    SymmetrizationResult {
        nu_sym,
        source: nu.clone(),
    }
}
