//! `hardy-stein`: runs the numerical verifications from JSON configs and
//! writes self-describing reports.

mod campaign;
mod config;
mod error;
mod formats;
mod output;
mod verbs;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::config::base_object;
use crate::error::CliError;
use crate::output::{input_hash, pretty, write_atomic, Artifacts, Envelope};
use crate::verbs::{execute, Verb};

pub const TOOL: &str = "hardy-stein";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "hardy-stein", version, about = "Hardy-Stein identities, square functions and multipliers for pure-jump Lévy processes")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Grid points per axis.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Grid half-width L; the grid is [-L, L)^d.
    #[arg(long, global = true)]
    grid_l: Option<f64>,
    /// Output directory; the report goes to stdout without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct Common {
    /// JSON config for the verb; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON file with the Lévy measure.
    #[arg(long)]
    measure: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Both sides of the Hardy-Stein identity with a refinement ladder.
    VerifyHardyStein {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        t_horizon: Option<f64>,
        /// Regularization of |x|^p; 0 for none.
        #[arg(long)]
        eps: Option<f64>,
        /// Test function as JSON or a JSON file.
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        refine_levels: Option<usize>,
    },
    /// Square functions and their L^p norm ratios.
    SquareFunction {
        #[command(flatten)]
        common: Common,
        /// Comma-separated: full, starred.
        #[arg(long)]
        variant: Option<String>,
        /// Comma-separated exponents.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        function: Option<String>,
    },
    /// The multiplier symbol m_phi on the frequency lattice.
    ComputeSymbol {
        #[command(flatten)]
        common: Common,
        /// Weight template as JSON or a JSON file.
        #[arg(long)]
        phi: Option<String>,
    },
    /// Applies m_phi to a grid function and writes `output.bin`.
    ApplyMultiplier {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<String>,
        /// Binary grid function to transform.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        function: Option<String>,
    },
    /// Bilinear form against the multiplier pairing.
    AdjointCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
    },
    /// Monte Carlo martingale identity, optionally with a semigroup cross-check.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Integrand template as JSON or a JSON file.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        t_horizon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Symmetric part of a measure and the ratio r.
    Symmetrize {
        #[command(flatten)]
        common: Common,
        /// Comma-separated points on the first axis.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// Growth profile of Re psi against log(1 + |xi|).
    HwProfile {
        #[command(flatten)]
        common: Common,
        /// Comma-separated increasing radii.
        #[arg(long)]
        radii: Option<String>,
    },
    /// Runs a verb from a config file.
    Run { verb: String, config: PathBuf },
    /// Runs every command of a campaign file into one directory.
    Campaign { config: PathBuf },
}

/// Inline JSON if it starts like an object, a file otherwise.
fn json_arg(s: &str) -> Result<Value, CliError> {
    if s.trim_start().starts_with('{') {
        serde_json::from_str(s).map_err(|e| CliError::Config(format!("inline JSON: {e}")))
    } else {
        config::read_json(Path::new(s))
    }
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| CliError::Config(format!("bad {what} `{x}`"))))
        .collect()
}

/// Merges flags into the config object.
struct Overrides(Map<String, Value>);

impl Overrides {
    fn new(common: &Common) -> Result<Self, CliError> {
        let mut m = base_object(common.config.as_deref())?;
        if let Some(p) = &common.measure {
            m.insert("measure".into(), config::read_json(p)?);
        }
        Ok(Overrides(m))
    }

    fn set(&mut self, key: &str, v: Option<Value>) {
        if let Some(v) = v {
            self.0.insert(key.into(), v);
        }
    }

    fn json(&mut self, key: &str, v: &Option<String>) -> Result<(), CliError> {
        if let Some(s) = v {
            self.0.insert(key.into(), json_arg(s)?);
        }
        Ok(())
    }
}

fn resolve(cmd: &Cmd) -> Result<(Verb, Map<String, Value>), CliError> {
    let verb_obj = match cmd {
        Cmd::VerifyHardyStein { common, p, t_horizon, eps, function, refine_levels } => {
            let mut o = Overrides::new(common)?;
            o.set("p", p.map(|v| json!(v)));
            o.set("t_horizon", t_horizon.map(|v| json!(v)));
            o.set("eps", eps.map(|v| json!(v)));
            o.json("f", function)?;
            if let Some(l) = refine_levels {
                campaign::set_path(&mut o.0, "quad.refine_levels", json!(l))?;
            }
            (Verb::VerifyHardyStein, o.0)
        }
        Cmd::SquareFunction { common, variant, p, t_max, function } => {
            let mut o = Overrides::new(common)?;
            if let Some(v) = variant {
                let names: Vec<String> = list(v, "variant")?;
                o.set("variants", Some(json!(names)));
            }
            if let Some(p) = p {
                o.set("p", Some(json!(list::<f64>(p, "p")?)));
            }
            o.set("t_max", t_max.map(|v| json!(v)));
            o.json("f", function)?;
            (Verb::SquareFunction, o.0)
        }
        Cmd::ComputeSymbol { common, phi } => {
            let mut o = Overrides::new(common)?;
            o.json("phi", phi)?;
            (Verb::ComputeSymbol, o.0)
        }
        Cmd::ApplyMultiplier { common, phi, input, function } => {
            let mut o = Overrides::new(common)?;
            o.json("phi", phi)?;
            o.json("f", function)?;
            o.set("f", input.as_ref().map(|p| json!({ "kind": "file", "path": p })));
            (Verb::ApplyMultiplier, o.0)
        }
        Cmd::AdjointCheck { common, phi, t_max, f, g } => {
            let mut o = Overrides::new(common)?;
            o.json("phi", phi)?;
            o.set("t_max", t_max.map(|v| json!(v)));
            o.json("f", f)?;
            o.json("g", g)?;
            (Verb::AdjointCheck, o.0)
        }
        Cmd::Simulate { common, spec, p, paths, seed, t_horizon, delta } => {
            let mut o = Overrides::new(common)?;
            if let Some(s) = spec {
                // a bare integrand template is accepted as the spec
                let v = json_arg(s)?;
                let v = if v.get("kind").is_some() { json!({ "h": v }) } else { v };
                o.set("spec", Some(v));
            }
            o.set("p", p.map(|v| json!(v)));
            o.set("paths", paths.map(|v| json!(v)));
            o.set("seed", seed.map(|v| json!(v)));
            o.set("t_horizon", t_horizon.map(|v| json!(v)));
            o.set("delta", delta.map(|v| json!(v)));
            (Verb::Simulate, o.0)
        }
        Cmd::Symmetrize { common, points } => {
            let mut o = Overrides::new(common)?;
            if let Some(p) = points {
                o.set("points", Some(json!(list::<f64>(p, "point")?)));
            }
            (Verb::Symmetrize, o.0)
        }
        Cmd::HwProfile { common, radii } => {
            let mut o = Overrides::new(common)?;
            if let Some(r) = radii {
                o.set("radii", Some(json!(list::<f64>(r, "radius")?)));
            }
            (Verb::HwProfile, o.0)
        }
        Cmd::Run { .. } | Cmd::Campaign { .. } => unreachable!("handled by the caller"),
    };
    Ok(verb_obj)
}

/// `--grid-n` / `--grid-l` go to the verb's grid.
fn apply_grid_flags(cli: &Cli, verb: Verb, obj: &mut Map<String, Value>) -> Result<(), CliError> {
    if cli.grid_n.is_none() && cli.grid_l.is_none() {
        return Ok(());
    }
    let prefix = if verb.has_grid() {
        "grid"
    } else if verb == Verb::Simulate && obj.contains_key("semigroup_check") {
        "semigroup_check.grid"
    } else {
        return Err(CliError::Config(format!("{verb} has no grid")));
    };
    if let Some(n) = cli.grid_n {
        campaign::set_path(obj, &format!("{prefix}.n"), json!(n))?;
    }
    if let Some(l) = cli.grid_l {
        campaign::set_path(obj, &format!("{prefix}.l"), json!(l))?;
    }
    Ok(())
}

fn timing(entries: &[(String, f64)], threads: usize) -> Vec<u8> {
    let runs: Vec<Value> = entries.iter().map(|(n, s)| json!({ "run": n, "wall_seconds": s })).collect();
    pretty(&json!({ "threads": threads, "runs": runs }))
}

fn emit(out: Option<&Path>, artifacts: Artifacts, report_name: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => write_atomic(dir, &artifacts),
        None => {
            let report = artifacts.get(report_name).expect("report produced");
            std::io::stdout()
                .write_all(report)
                .map_err(|e| CliError::Output(format!("stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let threads = rayon::current_num_threads();

    if let Cmd::Campaign { config } = &cli.cmd {
        if cli.grid_n.is_some() || cli.grid_l.is_some() {
            return Err(CliError::Config("set grids in the campaign's command configs".into()));
        }
        let (c, dir) = campaign::load(config, cli.out.as_deref())?;
        let (mut artifacts, times) = campaign::run(&c, config)?;
        artifacts.add("timing.json", timing(&times, threads));
        return write_atomic(&dir, &artifacts);
    }

    let (verb, mut obj) = match &cli.cmd {
        Cmd::Run { verb, config } => {
            let verb: Verb = verb.parse().map_err(CliError::Config)?;
            (verb, base_object(Some(config))?)
        }
        cmd => resolve(cmd)?,
    };
    apply_grid_flags(&cli, verb, &mut obj)?;

    let start = std::time::Instant::now();
    let outcome = execute(verb, obj)?;
    let env = Envelope {
        tool: TOOL,
        version: VERSION,
        verb: verb.name(),
        input_hash: input_hash(&outcome.config, &outcome.inputs)?,
        config: &outcome.config,
        result: outcome.result,
    };
    let mut artifacts = Artifacts::default();
    artifacts.add("report.json", pretty(&env));
    artifacts.files.extend(outcome.plots.files);
    artifacts.add("timing.json", timing(&[(verb.name().into(), start.elapsed().as_secs_f64())], threads));
    emit(cli.out.as_deref(), artifacts, "report.json")
}

fn usage_exit(msg: &str) -> ExitCode {
    let verbs: Vec<&str> = Verb::ALL.iter().map(|v| v.name()).collect();
    eprintln!("error: {msg}\n\nverbs: {}, run, campaign\n", verbs.join(", "));
    eprintln!("{}", Cli::command().render_usage());
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    ExitCode::from(EXIT_USAGE)
                }
                _ => {
                    let _ = e.print();
                    ExitCode::from(2)
                }
            };
        }
    };
    if let Cmd::Run { verb, .. } = &cli.cmd {
        if verb.parse::<Verb>().is_err() {
            return usage_exit(&format!("unknown verb `{verb}`"));
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
