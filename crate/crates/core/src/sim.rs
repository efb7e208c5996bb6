//! Monte Carlo paths of pure-jump Lévy processes restricted to a band of
//! jump sizes, compensated jump integrals and the martingale form of the
//! Hardy-Stein identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Point};
use crate::measure::{directions, JumpLaw, LevyMeasure};
use crate::quadrature::{cap_panel_width, geometric_breaks, pairwise_sum, GaussLegendre};
use crate::semigroup::{SemigroupOperator, Variant};
use crate::taylor::TaylorRemainder;

/// Stored in reports so that ensembles can be regenerated.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng::seed_from_u64(seed), set_stream(path index)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub time: f64,
    pub size: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpPath {
    pub horizon: f64,
    pub jumps: Vec<Jump>,
    /// `X_t = sum_{s_i <= t} y_i + t drift`.
    pub drift: Point,
    pub small_jump_cutoff: f64,
    pub seed: u64,
    pub stream: u64,
}

impl JumpPath {
    pub fn position(&self, t: f64) -> Point {
        let mut x = [self.drift[0] * t, self.drift[1] * t];
        for j in self.jumps.iter().take_while(|j| j.time <= t) {
            x[0] += j.size[0];
            x[1] += j.size[1];
        }
        x
    }
}

fn norm(y: Point) -> f64 {
    (y[0] * y[0] + y[1] * y[1]).sqrt()
}

#[derive(Debug, Clone)]
enum Proposal {
    Atoms { points: Vec<Point>, cumulative: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    /// `K |y|^{-d-alpha}` on `delta <= |y| <= R`, thinned to the density.
    PowerLaw { alpha: f64, k: f64 },
}

/// Paths of `nu` restricted to `delta <= |y| <= R` on `[0, T]`.
#[derive(Debug, Clone)]
pub struct Simulator {
    nu: LevyMeasure,
    horizon: f64,
    delta: f64,
    outer: f64,
    proposal: Proposal,
    proposal_mass: f64,
    drift: Point,
    rule: Vec<(Point, f64)>,
}

impl Simulator {
    /// `delta = 0` keeps every jump and is allowed for finite-activity measures only.
    pub fn new(nu: &LevyMeasure, horizon: f64, delta: f64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::param("T", "must be >= 0"));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::param("delta", "must be >= 0"));
        }
        if !nu.is_finite_activity() && delta <= 0.0 {
            return Err(Error::param("delta", "infinite-activity measures need delta > 0"));
        }
        let outer = nu.outer_cutoff();
        if delta >= outer {
            return Err(Error::param("delta", "band is empty"));
        }
        let dim = nu.dim();
        let (proposal, proposal_mass) = if let Some(atoms) = nu.atoms() {
            let kept: Vec<(Point, f64)> = atoms.into_iter().filter(|(p, _)| norm(*p) >= delta).collect();
            let mut acc = 0.0;
            let mut cumulative = Vec::new();
            for (_, m) in &kept {
                acc += m;
                cumulative.push(acc);
            }
            (
                Proposal::Atoms {
                    points: kept.iter().map(|a| a.0).collect(),
                    cumulative,
                },
                acc,
            )
        } else if nu.is_finite_activity() {
            let (lo, hi) = match uniform_law(nu) {
                Some(v) => v,
                None => return Err(Error::Unsupported("simulation of this finite measure".into())),
            };
            (Proposal::Uniform { lo, hi }, nu.total_mass().unwrap_or(0.0))
        } else {
            let alpha = nu.singularity_order();
            let d = dim as f64;
            let mut k: f64 = 0.0;
            for (e, _) in directions(dim, 64) {
                for r in geometric_breaks(delta, outer.min(1e6), 200) {
                    k = k.max(nu.density([r * e[0], r * e[1]]) * r.powf(d + alpha));
                }
            }
            k *= 1.0 + 1e-9;
            let sphere = if dim == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
            let radial = (delta.powf(-alpha) - outer.powf(-alpha)) / alpha;
            (Proposal::PowerLaw { alpha, k }, k * sphere * radial)
        };
        let rule = band_rule(nu, delta, outer, &[]);
        let mut drift = [0.0; 2];
        for (y, w) in &rule {
            if norm(*y) <= 1.0 {
                drift[0] -= w * y[0];
                drift[1] -= w * y[1];
            }
        }
        Ok(Simulator {
            nu: nu.clone(),
            horizon,
            delta,
            outer,
            proposal,
            proposal_mass,
            drift,
            rule,
        })
    }

    pub fn measure(&self) -> &LevyMeasure {
        &self.nu
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Compensator drift `-int_{band, |y| <= 1} y nu(dy)`.
    pub fn drift(&self) -> Point {
        self.drift
    }

    /// Mass of the proposal process (equal to the band mass without thinning).
    pub fn proposal_mass(&self) -> f64 {
        self.proposal_mass
    }

    fn propose(&self, rng: &mut ChaCha8Rng) -> Option<Point> {
        match &self.proposal {
            Proposal::Atoms { points, cumulative } => {
                let u = rng.random::<f64>() * cumulative.last().copied().unwrap_or(0.0);
                let i = cumulative.partition_point(|c| *c <= u).min(points.len() - 1);
                Some(points[i])
            }
            Proposal::Uniform { lo, hi } => {
                let y = lo + (hi - lo) * rng.random::<f64>();
                (y.abs() >= self.delta).then_some([y, 0.0])
            }
            Proposal::PowerLaw { alpha, k } => {
                let (a, d) = (*alpha, self.nu.dim());
                let u: f64 = rng.random();
                let lo = self.delta.powf(-a);
                let hi = self.outer.powf(-a);
                let r = (lo - u * (lo - hi)).powf(-1.0 / a);
                let e = if d == 1 {
                    [if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0]
                } else {
                    let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                    [th.cos(), th.sin()]
                };
                let y = [r * e[0], r * e[1]];
                let accept = self.nu.density(y) * r.powf(d as f64 + a) / k;
                (rng.random::<f64>() < accept).then_some(y)
            }
        }
    }

    /// Path number `stream` of the ensemble keyed by `seed`.
    pub fn sample_path(&self, seed: u64, stream: u64) -> JumpPath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mean = self.proposal_mass * self.horizon;
        let count = if mean > 0.0 {
            Poisson::new(mean).map(|p| p.sample(&mut rng) as usize).unwrap_or(0)
        } else {
            0
        };
        let mut jumps = Vec::with_capacity(count);
        for _ in 0..count {
            // time drawn first so the stream layout does not depend on thinning
            let time = self.horizon * (1.0 - rng.random::<f64>());
            if let Some(size) = self.propose(&mut rng) {
                jumps.push(Jump { time, size });
            }
        }
        jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
        JumpPath {
            horizon: self.horizon,
            jumps,
            drift: self.drift,
            small_jump_cutoff: self.delta,
            seed,
            stream,
        }
    }

    /// `int_band g(y) nu(dy)`.
    pub fn band_integral(&self, g: impl Fn(Point) -> f64) -> f64 {
        let terms: Vec<f64> = self.rule.iter().map(|(y, w)| w * g(*y)).collect();
        pairwise_sum(&terms)
    }
}

pub fn sample_path(nu: &LevyMeasure, horizon: f64, delta: f64, seed: u64) -> Result<JumpPath> {
    Ok(Simulator::new(nu, horizon, delta)?.sample_path(seed, 0))
}

fn uniform_law(nu: &LevyMeasure) -> Option<(f64, f64)> {
    match nu.family() {
        crate::measure::Family::CompoundPoisson {
            jumps: JumpLaw::Uniform { lo, hi },
            ..
        } => Some((*lo, *hi)),
        _ => None,
    }
}

/// Quadrature nodes for `nu` on `delta <= |y| <= outer`, with extra radial
/// breaks where an integrand jumps.
fn band_rule(nu: &LevyMeasure, delta: f64, outer: f64, breaks: &[f64]) -> Vec<(Point, f64)> {
    if let Some(atoms) = nu.atoms() {
        return atoms.into_iter().filter(|(p, _)| norm(*p) >= delta && norm(*p) <= outer).collect();
    }
    let gl = GaussLegendre::new(8);
    let mut out = Vec::new();
    let dirs = directions(nu.dim(), 32);
    for (e, we) in dirs {
        let (lo, hi) = nu.radial_support(e);
        let (lo, hi) = (lo.max(delta), hi.min(outer));
        if hi <= lo {
            continue;
        }
        let mut br = if nu.is_finite_activity() {
            (0..=8).map(|k| lo + (hi - lo) * k as f64 / 8.0).collect()
        } else {
            cap_panel_width(&geometric_breaks(lo, hi, 120), hi.max(1.0))
        };
        br.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
        br.push(1.0f64.clamp(lo, hi));
        br.sort_by(f64::total_cmp);
        br.dedup();
        for w in br.windows(2) {
            for (r, wr) in gl.on(w[0], w[1]) {
                out.push(([r * e[0], r * e[1]], we * wr * nu.radial_density(e, r)));
            }
        }
    }
    out
}

/// Integrands `H(s, y)` for compensated integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HTemplate {
    /// `y_1 1{s <= t1}`.
    YUpToTime { t1: f64 },
    /// `value 1{band[0] <= |y| <= band[1]}`.
    ConstBand { value: f64, band: [f64; 2] },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleSpec {
    pub h: HTemplate,
    #[serde(default)]
    pub m0: f64,
}

impl MartingaleSpec {
    pub fn new(h: HTemplate, m0: f64) -> Result<Self> {
        match h {
            HTemplate::YUpToTime { t1 } if !(t1 >= 0.0) => return Err(Error::param("t1", "must be >= 0")),
            HTemplate::ConstBand { value, band } if !(value.is_finite() && band[0] >= 0.0 && band[1] >= band[0]) => {
                return Err(Error::param("band", "need finite value and 0 <= lo <= hi"))
            }
            _ => {}
        }
        if !m0.is_finite() {
            return Err(Error::param("m0", "must be finite"));
        }
        Ok(MartingaleSpec { h, m0 })
    }

    pub fn h(&self, s: f64, y: Point) -> f64 {
        match self.h {
            HTemplate::YUpToTime { t1 } => {
                if s <= t1 {
                    y[0]
                } else {
                    0.0
                }
            }
            HTemplate::ConstBand { value, band } => {
                let r = norm(y);
                if r >= band[0] && r <= band[1] {
                    value
                } else {
                    0.0
                }
            }
            HTemplate::Zero => 0.0,
        }
    }

    /// `sup |H|` over the band of `sim`.
    pub fn sup_bound(&self, sim: &Simulator) -> f64 {
        match self.h {
            HTemplate::YUpToTime { .. } => sim
                .rule
                .iter()
                .map(|(y, _)| y[0].abs())
                .fold(0.0, f64::max)
                .max(match sim.proposal {
                    Proposal::Uniform { lo, hi } => lo.abs().max(hi.abs()),
                    _ => 0.0,
                }),
            HTemplate::ConstBand { value, .. } => value.abs(),
            HTemplate::Zero => 0.0,
        }
    }

    /// Times where `H` changes in `s`.
    fn time_breaks(&self, horizon: f64) -> Vec<f64> {
        match self.h {
            HTemplate::YUpToTime { t1 } if t1 > 0.0 && t1 < horizon => vec![t1],
            _ => vec![],
        }
    }

    fn radial_breaks(&self) -> Vec<f64> {
        match self.h {
            HTemplate::ConstBand { band, .. } => band.to_vec(),
            _ => vec![],
        }
    }
}

/// Precomputed `int_band H(s, y) nu(dy)` for one `(spec, simulator)` pair.
#[derive(Debug, Clone)]
pub struct Compensator {
    spec: MartingaleSpec,
    rule: Vec<(Point, f64)>,
    /// `(t_start, rate)` pieces on which the rate is constant.
    pieces: Vec<(f64, f64)>,
    horizon: f64,
}

impl Compensator {
    pub fn new(spec: &MartingaleSpec, sim: &Simulator) -> Self {
        let rule = band_rule(&sim.nu, sim.delta, sim.outer, &spec.radial_breaks());
        let mut starts = vec![0.0];
        starts.extend(spec.time_breaks(sim.horizon));
        let pieces = starts
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let b = starts.get(i + 1).copied().unwrap_or(sim.horizon);
                let mid = 0.5 * (a + b);
                let terms: Vec<f64> = rule.iter().map(|(y, w)| w * spec.h(mid, *y)).collect();
                (a, pairwise_sum(&terms))
            })
            .collect();
        Compensator {
            spec: spec.clone(),
            rule,
            pieces,
            horizon: sim.horizon,
        }
    }

    fn rate(&self, s: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.0 <= s).max(1) - 1;
        self.pieces[i].1
    }

    /// `int_0^t int_band H nu(dy) ds`.
    pub fn integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, (a, rate)) in self.pieces.iter().enumerate() {
            let b = self.pieces.get(i + 1).map(|p| p.0).unwrap_or(self.horizon);
            if t > *a {
                acc += rate * (t.min(b) - a);
            }
        }
        acc
    }

    /// `int_0^T int_band H^2 nu(dy) ds`, the Itô isometry value.
    pub fn isometry(&self) -> f64 {
        let mut acc = 0.0;
        for (i, (a, _)) in self.pieces.iter().enumerate() {
            let b = self.pieces.get(i + 1).map(|p| p.0).unwrap_or(self.horizon);
            let mid = 0.5 * (a + b);
            let terms: Vec<f64> = self.rule.iter().map(|(y, w)| w * self.spec.h(mid, *y).powi(2)).collect();
            acc += (b - a) * pairwise_sum(&terms);
        }
        acc
    }
}

/// `M_t = M_0 + sum_{s_i <= t} H(s_i, y_i) - int_0^t int H nu(dy) ds`.
pub fn compensated_value(comp: &Compensator, path: &JumpPath, t: f64) -> f64 {
    let jumps: Vec<f64> = path
        .jumps
        .iter()
        .take_while(|j| j.time <= t)
        .map(|j| comp.spec.h(j.time, j.size))
        .collect();
    comp.spec.m0 + pairwise_sum(&jumps) - comp.integral(t)
}

/// `M_T` for the path.
pub fn compensated_integral(comp: &Compensator, path: &JumpPath) -> f64 {
    compensated_value(comp, path, path.horizon)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_samples(x: &[f64]) -> Self {
        let n = x.len() as f64;
        let mean = pairwise_sum(x) / n;
        let dev: Vec<f64> = x.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if x.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
        Estimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub p: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub rng: String,
    /// `E|M_T|^p - |M_0|^p`.
    pub lhs: Estimate,
    /// `E int_0^T int F(M_{s-}, M_{s-} + H(s, y); p) nu(dy) ds`.
    pub rhs: Estimate,
    /// Per-path difference; its standard error is the combined one.
    pub difference: Estimate,
    pub z_score: f64,
    /// `int int H^2 nu ds`, the exact value of both sides at `p = 2`.
    pub ito_isometry: Option<f64>,
    pub min_integrand: f64,
    /// `|difference| > 4` combined standard errors.
    pub defect: bool,
}

/// Martingale Hardy-Stein identity estimated on one ensemble.
pub fn martingale_hardy_stein_mc(
    spec: &MartingaleSpec,
    sim: &Simulator,
    p: f64,
    n_paths: usize,
    seed: u64,
) -> Result<MartingaleReport> {
    let rem = TaylorRemainder::new(p, 0.0)?;
    if n_paths < 2 {
        return Err(Error::param("n_paths", "need at least 2 paths"));
    }
    let comp = Compensator::new(spec, sim);
    let horizon = sim.horizon;
    let gl = GaussLegendre::new(6);
    let breaks = spec.time_breaks(horizon);
    let samples: Vec<(f64, f64, f64)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|stream| {
            let path = sim.sample_path(seed, stream);
            let mut cuts: Vec<f64> = vec![0.0, horizon];
            cuts.extend(path.jumps.iter().map(|j| j.time));
            cuts.extend(&breaks);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut pieces = Vec::new();
            let mut min_f = f64::INFINITY;
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                // on (a, b) there are no jumps, so M_{s-} = M_a - rate (s - a)
                let m_a = compensated_value(&comp, &path, a);
                let rate = comp.rate(0.5 * (a + b));
                let mut inner = |s: f64| -> f64 {
                    let m = m_a - rate * (s - a);
                    let terms: Vec<f64> = comp
                        .rule
                        .iter()
                        .map(|(y, wy)| {
                            let v = rem.value(m, m + spec.h(s, *y));
                            min_f = min_f.min(v);
                            wy * v
                        })
                        .collect();
                    pairwise_sum(&terms)
                };
                if rate == 0.0 {
                    pieces.push((b - a) * inner(0.5 * (a + b)));
                } else {
                    let nodes: Vec<(f64, f64)> = gl.on(a, b).collect();
                    for (s, ws) in nodes {
                        pieces.push(ws * inner(s));
                    }
                }
            }
            let mt = compensated_integral(&comp, &path);
            let lhs = rem.phi(mt) - rem.phi(spec.m0);
            (lhs, pairwise_sum(&pieces), min_f)
        })
        .collect();
    let lhs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let diff: Vec<f64> = samples.iter().map(|s| s.0 - s.1).collect();
    let difference = Estimate::from_samples(&diff);
    let z = difference.mean / difference.std_error.max(1e-300);
    Ok(MartingaleReport {
        p,
        horizon,
        n_paths,
        seed,
        rng: RNG_ALGORITHM.into(),
        lhs: Estimate::from_samples(&lhs),
        rhs: Estimate::from_samples(&rhs),
        difference,
        z_score: if difference.std_error == 0.0 && difference.mean == 0.0 { 0.0 } else { z },
        ito_isometry: (p == 2.0).then(|| comp.isometry()),
        min_integrand: samples.iter().map(|s| s.2).fold(f64::INFINITY, f64::min),
        defect: difference.mean.abs() > 4.0 * difference.std_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCheck {
    pub x: f64,
    pub monte_carlo: Estimate,
    pub spectral: f64,
    /// Mean shift when `delta` is halved on the same seeds.
    pub truncation_bias: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub s: f64,
    pub value: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub t: f64,
    pub delta: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub rng: String,
    pub points: Vec<PointCheck>,
    /// `E[P_{t-s} f(x_0 + X_s)]` for `s` in `{0, t/3, 2t/3, t}`.
    pub martingale_ladder: Vec<LadderPoint>,
}

/// `E f(x + X_t)` by simulation against the spectral `P_t f(x)` (d = 1).
pub fn semigroup_mc_crosscheck(
    nu: &LevyMeasure,
    f: &GridFunction,
    t: f64,
    xs: &[f64],
    n_paths: usize,
    delta: f64,
    seed: u64,
) -> Result<CrosscheckReport> {
    if nu.dim() != 1 || f.grid().dim() != 1 {
        return Err(Error::Unsupported("Monte Carlo cross-check is one-dimensional".into()));
    }
    if xs.is_empty() || n_paths < 2 {
        return Err(Error::param("xs/n_paths", "need points and at least 2 paths"));
    }
    let op = SemigroupOperator::new(&crate::exponent::char_exponent(nu), f.grid(), Variant::Forward)?;
    let ladder = [0.0, t / 3.0, 2.0 * t / 3.0, t];
    let evolved: Vec<GridFunction> = ladder.iter().map(|s| op.apply(t - s, f)).collect::<Result<_>>()?;
    let run = |delta: f64| -> Result<(Vec<Estimate>, Vec<Estimate>)> {
        let sim = Simulator::new(nu, t, delta)?;
        let per_path: Vec<(Vec<f64>, Vec<f64>)> = (0..n_paths as u64)
            .into_par_iter()
            .map(|stream| {
                let path = sim.sample_path(seed, stream);
                let xt = path.position(t)[0];
                let at_x = xs.iter().map(|x| f.interpolate(x + xt)).collect();
                let lad = ladder
                    .iter()
                    .zip(&evolved)
                    .map(|(s, g)| g.interpolate(xs[0] + path.position(*s)[0]))
                    .collect();
                (at_x, lad)
            })
            .collect();
        let pts = (0..xs.len())
            .map(|i| Estimate::from_samples(&per_path.iter().map(|p| p.0[i]).collect::<Vec<_>>()))
            .collect();
        let lad = (0..ladder.len())
            .map(|i| Estimate::from_samples(&per_path.iter().map(|p| p.1[i]).collect::<Vec<_>>()))
            .collect();
        Ok((pts, lad))
    };
    let (pts, lad) = run(delta)?;
    let halved = if nu.is_finite_activity() || delta == 0.0 {
        None
    } else {
        Some(run(0.5 * delta)?.0)
    };
    let pt = &evolved[0];
    let points = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| PointCheck {
            x,
            monte_carlo: pts[i],
            spectral: pt.interpolate(x),
            truncation_bias: halved.as_ref().map(|h| h[i].mean - pts[i].mean),
        })
        .collect();
    Ok(CrosscheckReport {
        t,
        delta,
        n_paths,
        seed,
        rng: RNG_ALGORITHM.into(),
        points,
        martingale_ladder: ladder
            .iter()
            .zip(lad)
            .map(|(s, value)| LadderPoint { s: *s, value })
            .collect(),
    })
}
