//! The verbs. Each one turns a completed config object into a resolved
//! config, a result value and its plot data.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hardy_stein::identity::verify_identity_eps;
use hardy_stein::multiplier::lambda_symmetrized;
use hardy_stein::square::{square_function_of, NormRow, NormSummary};
use hardy_stein::{
    adjoint_identity_check, apply_multiplier, char_exponent, fourier_forward, hartman_wintner_profile,
    martingale_hardy_stein_mc, multiplier_symbol, semigroup_mc_crosscheck, symmetrize, symmetrized_form, Grid,
    GridFunction, MartingaleSpec, MultiplierSpec, SemigroupOperator, Simulator, SquareVariant, Variant,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::*;
use crate::error::CliError;
use crate::formats::{encode_grid_function, num, Csv};
use crate::output::Artifacts;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    VerifyHardyStein,
    SquareFunction,
    ComputeSymbol,
    ApplyMultiplier,
    AdjointCheck,
    Simulate,
    Symmetrize,
    HwProfile,
}

impl Verb {
    pub const ALL: [Verb; 8] = [
        Verb::VerifyHardyStein,
        Verb::SquareFunction,
        Verb::ComputeSymbol,
        Verb::ApplyMultiplier,
        Verb::AdjointCheck,
        Verb::Simulate,
        Verb::Symmetrize,
        Verb::HwProfile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::VerifyHardyStein => "verify-hardy-stein",
            Verb::SquareFunction => "square-function",
            Verb::ComputeSymbol => "compute-symbol",
            Verb::ApplyMultiplier => "apply-multiplier",
            Verb::AdjointCheck => "adjoint-check",
            Verb::Simulate => "simulate",
            Verb::Symmetrize => "symmetrize",
            Verb::HwProfile => "hw-profile",
        }
    }

    /// Verbs whose config has a top-level `grid`.
    pub fn has_grid(self) -> bool {
        matches!(
            self,
            Verb::VerifyHardyStein | Verb::SquareFunction | Verb::ComputeSymbol | Verb::ApplyMultiplier | Verb::AdjointCheck
        )
    }

    pub fn has_quad(self) -> bool {
        matches!(self, Verb::VerifyHardyStein | Verb::SquareFunction | Verb::AdjointCheck)
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Verb::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown verb `{s}`"))
    }
}

/// What a verb produced before anything is written.
pub struct Outcome {
    pub config: Value,
    pub inputs: Vec<PathBuf>,
    pub result: Value,
    pub plots: Artifacts,
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Parses `obj` for `verb` and runs it.
pub fn execute(verb: Verb, obj: Map<String, Value>) -> Result<Outcome, CliError> {
    let name = verb.name();
    match verb {
        Verb::VerifyHardyStein => verify(typed(obj, name)?),
        Verb::SquareFunction => square(typed(obj, name)?),
        Verb::ComputeSymbol => symbol(typed(obj, name)?),
        Verb::ApplyMultiplier => apply(typed(obj, name)?),
        Verb::AdjointCheck => adjoint(typed(obj, name)?),
        Verb::Simulate => simulate(typed(obj, name)?),
        Verb::Symmetrize => symmetrize_verb(typed(obj, name)?),
        Verb::HwProfile => hw(typed(obj, name)?),
    }
}

#[derive(Serialize)]
struct PlancherelOracle {
    value: f64,
    lhs_rel_error: f64,
    /// `|rhs_level - oracle| / oracle` along the refinement trace.
    level_rel_errors: Vec<f64>,
    decreasing: bool,
}

/// `(2 pi)^{-d} sum |f^|^2 (1 - e^{-2T Re psi}) dxi` on the frequency lattice.
fn plancherel_oracle(f: &GridFunction, op: &SemigroupOperator, horizon: f64) -> f64 {
    let spec = fourier_forward(f);
    let grid = f.grid();
    let dxi = (grid.frequency_spacing() / (2.0 * std::f64::consts::PI)).powi(grid.dim() as i32);
    let terms: Vec<f64> = spec
        .values()
        .iter()
        .zip(op.symbol_exponent())
        .map(|(c, e)| c.norm_sqr() * -(-2.0 * horizon * e.re).exp_m1())
        .collect();
    hardy_stein::quadrature::pairwise_sum(&terms) * dxi
}

fn verify(mut cfg: VerifyConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    cfg.grid = cfg.grid.resolve(nu.dim());
    let grid = cfg.grid.build(nu.dim())?;
    let f = cfg.f.build(&grid, cfg.zero_mean)?;
    let psi = char_exponent(&nu);
    let report = verify_identity_eps(&psi, &f, cfg.p, cfg.eps, cfg.t_horizon, &cfg.quad)?;

    let oracle = (cfg.p == 2.0 && cfg.eps == 0.0).then(|| {
        let op = SemigroupOperator::new(&psi, &grid, Variant::Forward).expect("grid already validated");
        let value = plancherel_oracle(&f, &op, cfg.t_horizon);
        let rel = |x: f64| (x - value).abs() / value.abs().max(1e-300);
        let level_rel_errors: Vec<f64> = report.refinement_trace.iter().map(|e| rel(e.rhs)).collect();
        PlancherelOracle {
            value,
            lhs_rel_error: rel(report.lhs),
            decreasing: level_rel_errors.windows(2).all(|w| w[1] < w[0]),
            level_rel_errors,
        }
    });

    let mut csv = Csv::new(
        "refinement ladder: level, exact left side, quadrature right side, relative error",
        &["level", "lhs", "rhs", "rel_error"],
    );
    for e in &report.refinement_trace {
        csv.row(&[e.level.to_string(), num(report.lhs), num(e.rhs), num(e.rel_error)]);
    }
    let mut plots = Artifacts::default();
    plots.add("refinement.csv", csv.into_bytes());
    Ok(Outcome {
        inputs: cfg.f.files(),
        config: to_value(&cfg),
        result: json!({ "identity": report, "converging": report.converging(), "plancherel_oracle": oracle }),
        plots,
    })
}

#[derive(Serialize)]
struct FunctionSquare {
    index: usize,
    t_max: f64,
    /// `||G f||_2^2 + tail - ||f||_2^2` relative to `||f||_2^2`, full variant.
    energy_defect: Option<f64>,
    /// Points where the starred value exceeds the full one.
    starred_violations: Option<usize>,
}

fn square(mut cfg: SquareConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    cfg.grid = cfg.grid.resolve(nu.dim());
    let grid = cfg.grid.build(nu.dim())?;
    if cfg.variants.is_empty() || cfg.p.is_empty() {
        return Err(CliError::Config("square-function: need at least one variant and one p".into()));
    }
    let family = cfg.f.build_all(&grid, cfg.zero_mean)?;
    let mut rows = Vec::new();
    let mut per_function = Vec::new();
    let mut csv = Csv::new(
        "square function values: function index, grid point, f, then one column per variant",
        &[
            &["index"][..],
            if grid.dim() == 1 { &["x"][..] } else { &["x1", "x2"][..] },
            &["f"],
            &cfg.variants.iter().map(|v| variant_column(*v)).collect::<Vec<_>>(),
        ]
        .concat(),
    );
    for (index, f) in family.iter().enumerate() {
        if f.norm(2.0) == 0.0 {
            return Err(CliError::Config(format!("square-function: function {index} is zero")));
        }
        // one horizon per function so variants compare pointwise
        let mut t_max = cfg.t_max;
        let mut results = Vec::new();
        for &variant in &cfg.variants {
            let r = square_function_of(&nu, f, variant, t_max, &cfg.quad, &cfg.p)?;
            t_max = Some(r.t_max);
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
            results.push(r);
        }
        let find = |v: SquareVariant| results.iter().find(|r| r.variant == v);
        let full = find(SquareVariant::Full);
        let starred_violations = full.zip(find(SquareVariant::Starred)).map(|(a, b)| {
            let (a, b) = (a.g_values.real_values(), b.g_values.real_values());
            a.iter().zip(&b).filter(|(x, y)| y > x).count()
        });
        per_function.push(FunctionSquare {
            index,
            t_max: t_max.expect("at least one variant ran"),
            energy_defect: full.map(|r| r.energy_defect(f)),
            starred_violations,
        });
        let fv = f.real_values();
        let gs: Vec<Vec<f64>> = results.iter().map(|r| r.g_values.real_values()).collect();
        for idx in 0..grid.len() {
            let x = grid.point(idx);
            let mut cells = vec![index.to_string(), num(x[0])];
            if grid.dim() == 2 {
                cells.push(num(x[1]));
            }
            cells.push(num(fv[idx]));
            cells.extend(gs.iter().map(|g| num(g[idx])));
            csv.row(&cells);
        }
    }
    let mut summary = Vec::new();
    for &variant in &cfg.variants {
        for &p in &cfg.p {
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
    let mut norms = Csv::new(
        "norm ratios ||G f||_p / ||f||_p per function, variant and p",
        &["index", "variant", "p", "g_norm", "f_norm", "ratio"],
    );
    for r in &rows {
        norms.row(&[
            r.index.to_string(),
            variant_column(r.variant).trim_start_matches("g_").to_string(),
            num(r.p),
            num(r.g_norm),
            num(r.f_norm),
            num(r.ratio),
        ]);
    }
    let mut plots = Artifacts::default();
    plots.add("g_values.csv", csv.into_bytes());
    plots.add("norms.csv", norms.into_bytes());
    Ok(Outcome {
        inputs: cfg.f.files(),
        config: to_value(&cfg),
        result: json!({ "rows": rows, "summary": summary, "functions": per_function }),
        plots,
    })
}

fn variant_column(v: SquareVariant) -> &'static str {
    match v {
        SquareVariant::Full => "g_full",
        SquareVariant::Starred => "g_starred",
    }
}

/// Indices sorted by frequency, first axis slowest.
fn ascending_frequencies(grid: &Grid) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..grid.len()).collect();
    idx.sort_by(|a, b| {
        let (x, y) = (grid.frequency(*a), grid.frequency(*b));
        x[0].total_cmp(&y[0]).then(x[1].total_cmp(&y[1]))
    });
    idx
}

fn symbol(mut cfg: SymbolConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    cfg.grid = cfg.grid.resolve(nu.dim());
    let grid = cfg.grid.build(nu.dim())?;
    let spec = MultiplierSpec::new(cfg.phi.clone())?;
    let m = multiplier_symbol(&spec, &char_exponent(&nu), &grid)?;
    let mut csv = Csv::new(
        "multiplier symbol m_phi at each lattice frequency, ascending",
        if grid.dim() == 1 {
            &["xi", "re_m", "im_m"][..]
        } else {
            &["xi1", "xi2", "re_m", "im_m"][..]
        },
    );
    for idx in ascending_frequencies(&grid) {
        let xi = grid.frequency(idx);
        let v = m.m_values[idx];
        let mut cells = vec![num(xi[0])];
        if grid.dim() == 2 {
            cells.push(num(xi[1]));
        }
        cells.extend([num(v.re), num(v.im)]);
        csv.row(&cells);
    }
    let clean: Vec<f64> = (0..grid.len()).filter(|i| m.is_clean(*i)).map(|i| m.m_values[i].re).collect();
    let mut plots = Artifacts::default();
    plots.add("m_phi.csv", csv.into_bytes());
    Ok(Outcome {
        inputs: vec![],
        config: to_value(&cfg),
        result: json!({
            "description": spec.description,
            "sup_norm": spec.sup_norm,
            "symbol_sup": m.sup_abs(),
            "within_sup_norm": m.sup_abs() <= spec.sup_norm + 1e-6,
            "clean_min": clean.iter().copied().fold(f64::INFINITY, f64::min),
            "clean_max": clean.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "flagged": m.flagged.len(),
        }),
        plots,
    })
}

fn apply(mut cfg: ApplyConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    let grid = match &cfg.f {
        // an input file carries its own grid
        FunctionSpec::File { path } => {
            let g = crate::formats::read_grid_function(path)?.grid().clone();
            let clash = cfg.grid.n.is_some_and(|n| n != g.points_per_axis())
                || cfg.grid.l.is_some_and(|l| l != g.half_width());
            if clash || g.dim() != nu.dim() {
                return Err(CliError::Config(format!(
                    "{} does not match the configured grid or measure dimension",
                    path.display()
                )));
            }
            g
        }
        _ => cfg.grid.build(nu.dim())?,
    };
    cfg.grid = GridSpec {
        n: Some(grid.points_per_axis()),
        l: Some(grid.half_width()),
    };
    let f = cfg.f.build(&grid, cfg.zero_mean)?;
    let spec = MultiplierSpec::new(cfg.phi.clone())?;
    let m = multiplier_symbol(&spec, &char_exponent(&nu), &grid)?;
    let out = apply_multiplier(&m, &f)?;
    let (fin, fout) = (f.norm(2.0), out.norm(2.0));
    let mut plots = Artifacts::default();
    plots.add("output.bin", encode_grid_function(&out));
    Ok(Outcome {
        inputs: cfg.f.files(),
        config: to_value(&cfg),
        result: json!({
            "description": spec.description,
            "sup_norm": spec.sup_norm,
            "symbol_sup": m.sup_abs(),
            "input_l2": fin,
            "output_l2": fout,
            "l2_ratio": if fin > 0.0 { fout / fin } else { 0.0 },
            "output_max_abs_imag": out.max_abs_imag(),
        }),
        plots,
    })
}

fn adjoint(mut cfg: AdjointConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    cfg.grid = cfg.grid.resolve(nu.dim());
    let grid = cfg.grid.build(nu.dim())?;
    let f = cfg.f.build(&grid, cfg.zero_mean)?;
    let g = cfg.g.build(&grid, cfg.zero_mean)?;
    let spec = MultiplierSpec::new(cfg.phi.clone())?;
    let op = SemigroupOperator::new(&char_exponent(&nu), &grid, Variant::Forward)?;
    let report = adjoint_identity_check(&spec, &f, &g, &op, cfg.t_max, &cfg.quad)?;
    let symmetrized = if cfg.symmetrized {
        let form = symmetrized_form(&spec, &nu)?;
        let lam = lambda_symmetrized(&form, &f, &g, &op, Some(report.lambda.t_max), &cfg.quad)?;
        let a = report.lambda.value;
        Some(json!({
            "value": lam.value,
            "eta_sup": form.eta_sup,
            "rel_difference": (lam.value - a).abs() / a.abs().max(1e-300),
        }))
    } else {
        None
    };
    let mut inputs = cfg.f.files();
    inputs.extend(cfg.g.files());
    Ok(Outcome {
        inputs,
        config: to_value(&cfg),
        result: json!({ "description": spec.description, "adjoint": report, "symmetrized": symmetrized }),
        plots: Artifacts::default(),
    })
}

fn simulate(mut cfg: SimulateConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    let spec = MartingaleSpec::new(cfg.spec.h, cfg.spec.m0)?;
    let sim = Simulator::new(&nu, cfg.t_horizon, cfg.delta)?;
    let report = martingale_hardy_stein_mc(&spec, &sim, cfg.p, cfg.paths, cfg.seed)?;
    let mut csv = Csv::new(
        "Monte Carlo estimates with their standard errors",
        &["quantity", "estimate", "std_error"],
    );
    for (q, e) in [("lhs", report.lhs), ("rhs", report.rhs), ("difference", report.difference)] {
        csv.row(&[q.into(), num(e.mean), num(e.std_error)]);
    }
    if let Some(iso) = report.ito_isometry {
        csv.row(&["ito_isometry".into(), num(iso), num(0.0)]);
    }
    let mut inputs = vec![];
    let crosscheck = match cfg.semigroup_check.as_mut() {
        None => None,
        Some(check) => {
            check.grid = check.grid.resolve(nu.dim());
            let grid = check.grid.build(nu.dim())?;
            let f = check.f.build(&grid, false)?;
            inputs.extend(check.f.files());
            let r = semigroup_mc_crosscheck(&nu, &f, check.t, &check.xs, cfg.paths, cfg.delta, cfg.seed)?;
            for p in &r.points {
                csv.row(&[format!("semigroup_mc@{}", num(p.x)), num(p.monte_carlo.mean), num(p.monte_carlo.std_error)]);
                csv.row(&[format!("semigroup_spectral@{}", num(p.x)), num(p.spectral), num(0.0)]);
            }
            Some(r)
        }
    };
    let mut plots = Artifacts::default();
    plots.add("mc.csv", csv.into_bytes());
    Ok(Outcome {
        inputs,
        config: to_value(&cfg),
        result: json!({ "martingale": report, "semigroup_check": crosscheck }),
        plots,
    })
}

fn symmetrize_verb(cfg: SymmetrizeConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    if cfg.points.is_empty() {
        return Err(CliError::Config("symmetrize: need at least one point".into()));
    }
    let s = symmetrize(&nu);
    let mut csv = Csv::new(
        "measure density, symmetric part and ratio r on the first axis",
        &["y", "nu", "nu_sym", "r"],
    );
    let mut rows = Vec::new();
    let (mut r_sup, mut recon): (f64, f64) = (0.0, 0.0);
    for &y in &cfg.points {
        let pt = [y, 0.0];
        let (d, ds, r) = (nu.density(pt), s.nu_sym.density(pt), s.ratio(pt));
        r_sup = r_sup.max(r.abs());
        if d > 0.0 {
            recon = recon.max(((1.0 + r) * ds - d).abs() / d);
        }
        csv.row(&[num(y), num(d), num(ds), num(r)]);
        rows.push(json!({ "y": y, "nu": d, "nu_sym": ds, "r": r }));
    }
    let mut plots = Artifacts::default();
    plots.add("symmetrize.csv", csv.into_bytes());
    Ok(Outcome {
        inputs: vec![],
        config: to_value(&cfg),
        result: json!({
            "symmetric": nu.is_symmetric(),
            "ratio_sup": r_sup,
            "reconstruction_max_rel_error": recon,
            "rows": rows,
        }),
        plots,
    })
}

fn hw(cfg: HwConfig) -> Result<Outcome, CliError> {
    let nu = build_measure(&cfg.measure)?;
    let profile = hartman_wintner_profile(&char_exponent(&nu), &cfg.radii)?;
    let mut csv = Csv::new(
        "min over directions of Re psi at radius R divided by log(1 + R)",
        &["radius", "value"],
    );
    for (r, v) in profile.radii.iter().zip(&profile.values) {
        csv.row(&[num(*r), num(*v)]);
    }
    let mut plots = Artifacts::default();
    plots.add("hw.csv", csv.into_bytes());
    Ok(Outcome {
        inputs: vec![],
        config: to_value(&cfg),
        result: to_value(&profile),
        plots,
    })
}
