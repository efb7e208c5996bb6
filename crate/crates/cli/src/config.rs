//! Per-verb JSON configs. Every config is read with unknown fields rejected,
//! completed with defaults, and embedded back into the report.

use std::path::{Path, PathBuf};

use hardy_stein::sim::MartingaleSpec;
use hardy_stein::square::SquareVariant;
use hardy_stein::testfns::{gaussian_bump, random_smooth, remove_mean, zero_mean_family};
use hardy_stein::{Grid, GridFunction, LevyMeasure, MeasureSpec, PhiTemplate, QuadSpec};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;
use crate::formats::read_grid_function;

/// Grid sizes; missing entries fall back to the per-dimension defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub l: Option<f64>,
}

impl GridSpec {
    pub fn resolve(self, dim: usize) -> Self {
        let (n, l) = if dim == 1 { (4096, 40.0) } else { (256, 20.0) };
        GridSpec {
            n: Some(self.n.unwrap_or(n)),
            l: Some(self.l.unwrap_or(l)),
        }
    }

    pub fn build(&self, dim: usize) -> Result<Grid, CliError> {
        let r = self.resolve(dim);
        Ok(Grid::new(dim, r.n.unwrap(), r.l.unwrap())?)
    }
}

/// Test functions available from configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Gaussian {
        #[serde(default = "unit")]
        s: f64,
    },
    RandomSmooth { terms: usize, seed: u64 },
    /// Member `index` of the five-function zero-mean family, or all of it.
    Family {
        #[serde(default)]
        index: Option<usize>,
    },
    /// Binary grid function; its grid must match the configured one.
    File { path: PathBuf },
}

fn unit() -> f64 {
    1.0
}

impl Default for FunctionSpec {
    fn default() -> Self {
        FunctionSpec::Gaussian { s: 1.0 }
    }
}

impl FunctionSpec {
    pub fn build_all(&self, grid: &Grid, zero_mean: bool) -> Result<Vec<GridFunction>, CliError> {
        let out = match self {
            FunctionSpec::Gaussian { s } => {
                if !(*s > 0.0) {
                    return Err(CliError::Config(format!("gaussian width {s} must be > 0")));
                }
                vec![gaussian_bump(grid, *s)]
            }
            FunctionSpec::RandomSmooth { terms, seed } => {
                if *terms == 0 {
                    return Err(CliError::Config("random_smooth needs at least one term".into()));
                }
                vec![random_smooth(grid, *terms, *seed)]
            }
            FunctionSpec::Family { index: None } => zero_mean_family(grid),
            FunctionSpec::Family { index: Some(i) } => {
                let fam = zero_mean_family(grid);
                match fam.get(*i) {
                    Some(f) => vec![f.clone()],
                    None => return Err(CliError::Config(format!("family index {i} not in 0..{}", fam.len()))),
                }
            }
            FunctionSpec::File { path } => {
                let f = read_grid_function(path)?;
                if f.grid() != grid {
                    return Err(CliError::Config(format!(
                        "{} is on a different grid than configured",
                        path.display()
                    )));
                }
                vec![f]
            }
        };
        Ok(if zero_mean { out.iter().map(remove_mean).collect() } else { out })
    }

    pub fn build(&self, grid: &Grid, zero_mean: bool) -> Result<GridFunction, CliError> {
        let mut all = self.build_all(grid, zero_mean)?;
        if all.len() != 1 {
            return Err(CliError::Config("this verb takes a single function; give a family index".into()));
        }
        Ok(all.remove(0))
    }

    /// Files whose bytes enter the input hash.
    pub fn files(&self) -> Vec<PathBuf> {
        match self {
            FunctionSpec::File { path } => vec![path.clone()],
            _ => vec![],
        }
    }
}

pub fn build_measure(spec: &MeasureSpec) -> Result<LevyMeasure, CliError> {
    Ok(spec.build()?)
}

fn default_horizon() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub measure: MeasureSpec,
    pub p: f64,
    #[serde(default = "default_horizon")]
    pub t_horizon: f64,
    /// `eps > 0` switches to the regularized remainder.
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub f: FunctionSpec,
    #[serde(default)]
    pub zero_mean: bool,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub quad: QuadSpec,
}

fn default_variants() -> Vec<SquareVariant> {
    vec![SquareVariant::Full, SquareVariant::Starred]
}

fn default_ps() -> Vec<f64> {
    vec![1.5, 2.0, 3.0]
}

fn family_all() -> FunctionSpec {
    FunctionSpec::Family { index: None }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareConfig {
    pub measure: MeasureSpec,
    #[serde(default = "default_variants")]
    pub variants: Vec<SquareVariant>,
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "family_all")]
    pub f: FunctionSpec,
    #[serde(default = "yes")]
    pub zero_mean: bool,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub quad: QuadSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub measure: MeasureSpec,
    pub phi: PhiTemplate,
    #[serde(default)]
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplyConfig {
    pub measure: MeasureSpec,
    pub phi: PhiTemplate,
    #[serde(default)]
    pub f: FunctionSpec,
    #[serde(default)]
    pub zero_mean: bool,
    #[serde(default)]
    pub grid: GridSpec,
}

fn default_g() -> FunctionSpec {
    FunctionSpec::RandomSmooth { terms: 4, seed: 2 }
}

fn default_f() -> FunctionSpec {
    FunctionSpec::RandomSmooth { terms: 4, seed: 1 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjointConfig {
    pub measure: MeasureSpec,
    pub phi: PhiTemplate,
    #[serde(default = "default_f")]
    pub f: FunctionSpec,
    #[serde(default = "default_g")]
    pub g: FunctionSpec,
    #[serde(default = "yes")]
    pub zero_mean: bool,
    #[serde(default)]
    pub t_max: Option<f64>,
    /// Also evaluate the form of the symmetrized measure with `eta = phi (1 + r)`.
    #[serde(default = "yes")]
    pub symmetrized: bool,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub quad: QuadSpec,
}

fn default_paths() -> usize {
    100_000
}

/// Optional check of `E f(x + X_t)` against the spectral semigroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupCheck {
    pub t: f64,
    pub xs: Vec<f64>,
    #[serde(default)]
    pub f: FunctionSpec,
    #[serde(default)]
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub measure: MeasureSpec,
    pub spec: MartingaleSpec,
    pub p: f64,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub t_horizon: f64,
    /// Small-jump cutoff; 0 keeps every jump of a finite measure.
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub semigroup_check: Option<SemigroupCheck>,
}

fn default_points() -> Vec<f64> {
    vec![-4.0, -2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0, 4.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrizeConfig {
    pub measure: MeasureSpec,
    /// Points on the first axis.
    #[serde(default = "default_points")]
    pub points: Vec<f64>,
}

fn default_radii() -> Vec<f64> {
    (0..=12).map(|k| 10f64.powf(0.5 * k as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HwConfig {
    pub measure: MeasureSpec,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
}

/// Reads a JSON file as a value.
pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Starting object for a verb: the `--config` file or `{}`.
pub fn base_object(config: Option<&Path>) -> Result<Map<String, Value>, CliError> {
    match config {
        None => Ok(Map::new()),
        Some(p) => match read_json(p)? {
            Value::Object(m) => Ok(m),
            _ => Err(CliError::Config(format!("{}: config must be a JSON object", p.display()))),
        },
    }
}

/// Deserializes a completed object into a typed config.
pub fn typed<T: for<'de> Deserialize<'de>>(obj: Map<String, Value>, verb: &str) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::Config(format!("{verb}: {e}")))
}
