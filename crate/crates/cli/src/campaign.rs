//! Campaigns: several verb runs written into one output directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{base_object, read_json};
use crate::error::CliError;
use crate::output::{input_hash, pretty, Artifacts, Envelope};
use crate::verbs::{execute, Verb};
use crate::{TOOL, VERSION};

/// A command's config: a path (relative to the campaign file) or an inline object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigRef {
    Path(PathBuf),
    Inline(Map<String, Value>),
}

/// Repeats a command once per value of a dotted config field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub field: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Command {
    pub verb: String,
    pub config: ConfigRef,
    #[serde(default)]
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    pub output_dir: PathBuf,
    /// Seed for simulation commands that do not set their own.
    #[serde(default)]
    pub seed: u64,
    /// Refinement levels for quadrature commands that do not set their own.
    #[serde(default)]
    pub refine_levels: Option<usize>,
    pub commands: Vec<Command>,
}

/// Sets `a.b.c` in `obj`, creating intermediate objects.
pub fn set_path(obj: &mut Map<String, Value>, field: &str, value: Value) -> Result<(), CliError> {
    let mut parts: Vec<&str> = field.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty());
    let last = last.ok_or_else(|| CliError::Config(format!("empty field name `{field}`")))?;
    let mut cur = obj;
    for p in parts {
        let next = cur.entry(p.to_string()).or_insert_with(|| Value::Object(Map::new()));
        cur = next
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("`{p}` in `{field}` is not an object")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

struct Job {
    verb: Verb,
    obj: Map<String, Value>,
}

fn expand(c: &Campaign, base_dir: &Path) -> Result<Vec<Job>, CliError> {
    let mut jobs = Vec::new();
    for (i, cmd) in c.commands.iter().enumerate() {
        let verb: Verb = cmd
            .verb
            .parse()
            .map_err(|e| CliError::Config(format!("command {i}: {e}")))?;
        let mut obj = match &cmd.config {
            ConfigRef::Inline(m) => m.clone(),
            ConfigRef::Path(p) => base_object(Some(&base_dir.join(p)))?,
        };
        if verb == Verb::Simulate && !obj.contains_key("seed") {
            obj.insert("seed".into(), json!(c.seed));
        }
        if let (true, Some(levels)) = (verb.has_quad(), c.refine_levels) {
            let quad = obj.entry("quad").or_insert_with(|| json!({}));
            if let Some(q) = quad.as_object_mut() {
                q.entry("refine_levels").or_insert(json!(levels));
            }
        }
        match &cmd.sweep {
            None => jobs.push(Job { verb, obj }),
            Some(s) => {
                for v in &s.values {
                    let mut o = obj.clone();
                    set_path(&mut o, &s.field, v.clone())?;
                    jobs.push(Job { verb, obj: o });
                }
            }
        }
    }
    if jobs.is_empty() {
        return Err(CliError::Config("campaign has no commands".into()));
    }
    Ok(jobs)
}

/// Reads the campaign file; `out` overrides its `output_dir`.
pub fn load(path: &Path, out: Option<&Path>) -> Result<(Campaign, PathBuf), CliError> {
    let mut c: Campaign =
        serde_json::from_value(read_json(path)?).map_err(|e| CliError::Config(format!("campaign: {e}")))?;
    if let Some(o) = out {
        c.output_dir = o.to_path_buf();
    }
    let dir = c.output_dir.clone();
    Ok((c, dir))
}

/// Runs every command and returns the artifacts of the whole directory.
pub fn run(c: &Campaign, campaign_file: &Path) -> Result<(Artifacts, Vec<(String, f64)>), CliError> {
    let base_dir = campaign_file.parent().unwrap_or(Path::new("."));
    let jobs = expand(c, base_dir)?;
    let mut all = Artifacts::default();
    let mut index = Vec::new();
    let mut timing = Vec::new();
    for (i, job) in jobs.into_iter().enumerate() {
        let dir = format!("{:02}-{}", i, job.verb);
        let start = std::time::Instant::now();
        let outcome = execute(job.verb, job.obj)?;
        let hash = input_hash(&outcome.config, &outcome.inputs)?;
        let env = Envelope {
            tool: TOOL,
            version: VERSION,
            verb: job.verb.name(),
            input_hash: hash.clone(),
            config: &outcome.config,
            result: outcome.result,
        };
        all.add(format!("{dir}/report.json"), pretty(&env));
        for (name, bytes) in outcome.plots.files {
            all.add(format!("{dir}/{name}"), bytes);
        }
        timing.push((dir.clone(), start.elapsed().as_secs_f64()));
        index.push(json!({ "dir": dir, "verb": job.verb.name(), "input_hash": hash, "config": outcome.config }));
    }
    let config = serde_json::to_value(c).expect("campaign serializes");
    let hash = input_hash(&json!({ "campaign": config, "commands": index }), &[])?;
    let env = Envelope {
        tool: TOOL,
        version: VERSION,
        verb: "campaign",
        input_hash: hash,
        config: &config,
        result: json!({ "commands": index }),
    };
    all.files.insert(0, ("report.json".into(), pretty(&env)));
    Ok((all, timing))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dotted_paths() {
        let mut m = Map::new();
        set_path(&mut m, "quad.refine_levels", json!(3)).unwrap();
        set_path(&mut m, "p", json!(1.5)).unwrap();
        assert_eq!(Value::Object(m.clone()), json!({"quad": {"refine_levels": 3}, "p": 1.5}));
        assert!(set_path(&mut m, "p.x", json!(1)).is_err());
        assert!(set_path(&mut m, "", json!(1)).is_err());
    }
}
