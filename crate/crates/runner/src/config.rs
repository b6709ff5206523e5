//! Spec files: TOML with a few top-level keys plus `[run]` and `[params]`.
//!
//! ```toml
//! experiment = "momentum"
//! seed = 7                 # master seed, default 0
//! out = "out/momentum"     # optional artifact directory
//! strict_threshold = 1e3   # ratio above which --strict fails a ratio check
//!
//! [run]                    # merged over the experiment's base RunConfig
//! n = 8
//! [run.output]
//! interval = 0.01
//!
//! [params]                 # experiment-specific, see `burgers3d list`
//! runs = 10
//! ```
//!
//! Tables in `[run]` merge key by key, except a table carrying `kind`
//! (initial data), which replaces the base value whole.

use std::path::{Path, PathBuf};

use burgers3d::dynamics::RunConfig;
use serde::{Deserialize, Serialize};

use crate::experiment::{DynExperiment, ExperimentRegistry};
use crate::RunnerError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    experiment: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    strict_threshold: Option<f64>,
    #[serde(default)]
    run: toml::Table,
    #[serde(default)]
    params: toml::Table,
}

/// A spec with every default filled in; this is what the manifest echoes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: String,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub strict_threshold: f64,
    pub run: RunConfig,
    pub params: toml::Table,
}

pub const DEFAULT_EXPERIMENT: &str = "max_principle";
pub const DEFAULT_STRICT_THRESHOLD: f64 = 1e3;

fn merge(base: &mut toml::Table, over: &toml::Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if !o.contains_key("kind") => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

/// The merged run config (if it deserializes) and any problems found on the way.
fn resolve_run(exp: &dyn DynExperiment, raw: &toml::Table) -> (Option<RunConfig>, Vec<String>) {
    let mut errs = Vec::new();
    if raw.contains_key("seed") {
        errs.push("run.seed is derived from the master seed; set the top-level `seed` instead".into());
    }
    let mut table = match toml::Value::try_from(exp.default_run()) {
        Ok(toml::Value::Table(t)) => t,
        _ => unreachable!("RunConfig serializes to a table"),
    };
    merge(&mut table, raw);
    table.remove("seed");
    match RunConfig::deserialize(toml::Value::Table(table)) {
        Ok(run) => (Some(run), errs),
        Err(e) => {
            errs.push(format!("run: {e}"));
            (None, errs)
        }
    }
}

/// Parses spec text and fills defaults. Every problem is reported, each as
/// its own message.
pub fn resolve_spec(text: &str, registry: &ExperimentRegistry) -> Result<ExperimentSpec, RunnerError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| RunnerError::Config(vec![e.to_string()]))?;
    let name = raw.experiment.unwrap_or_else(|| DEFAULT_EXPERIMENT.into());
    let exp = registry.get(&name).map_err(|e| RunnerError::Config(vec![e.to_string()]))?;
    let (run, mut errs) = resolve_run(exp.as_ref(), &raw.run);
    let params = exp.resolve_params(&raw.params).map_err(|e| errs.extend(e)).ok();
    let strict_threshold = raw.strict_threshold.unwrap_or(DEFAULT_STRICT_THRESHOLD);
    if !(strict_threshold > 1.0) {
        errs.push(format!("strict_threshold must exceed 1, got {strict_threshold}"));
    }
    if let Some(run) = &run {
        errs.extend(run.problems());
        if let Some(p) = &params {
            errs.extend(exp.problems(run, p));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    errs.retain(|m| seen.insert(m.clone()));
    match (run, params) {
        (Some(run), Some(params)) if errs.is_empty() => Ok(ExperimentSpec {
            experiment: name,
            seed: raw.seed.unwrap_or(0),
            out: raw.out,
            strict_threshold,
            run,
            params,
        }),
        _ => Err(RunnerError::Config(errs)),
    }
}

/// Reads and resolves a spec file.
pub fn validate_config(path: &Path) -> Result<ExperimentSpec, RunnerError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunnerError::Io { path: path.to_owned(), source: e })?;
    resolve_spec(&text, &ExperimentRegistry::builtin())
}

impl ExperimentSpec {
    /// The resolved spec as spec-file text. `run.seed` is left out since
    /// member seeds derive from the master seed.
    pub fn to_toml(&self) -> String {
        let mut value = toml::Value::try_from(self).expect("resolved specs serialize");
        if let Some(run) = value.get_mut("run").and_then(toml::Value::as_table_mut) {
            run.remove("seed");
        }
        toml::to_string(&value).expect("resolved specs serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<ExperimentSpec, RunnerError> {
        resolve_spec(text, &ExperimentRegistry::builtin())
    }

    fn messages(text: &str) -> Vec<String> {
        match resolve(text) {
            Err(RunnerError::Config(m)) => m,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_gives_the_defaults() {
        let spec = resolve("").unwrap();
        assert_eq!(spec.experiment, DEFAULT_EXPERIMENT);
        assert_eq!(spec.seed, 0);
        let echoed = resolve(&spec.to_toml()).unwrap();
        assert_eq!(echoed, spec);
    }

    #[test]
    fn nonpositive_dt_is_one_message() {
        let m = messages("[run]\ndt = -0.5\n");
        assert_eq!(m.len(), 1, "{m:?}");
        assert!(m[0].contains("dt"));
    }

    #[test]
    fn every_problem_is_listed() {
        let m = messages("strict_threshold = 0.5\n[run]\nn = 8\ndealias_points = 12\nnu = -1\n[run.output]\ninterval = 0.0015\n");
        assert_eq!(m.len(), 4, "{m:?}");
    }

    #[test]
    fn partial_tables_merge() {
        let spec = resolve("[run.output]\nsnapshot_interval = 0.1\n").unwrap();
        assert_eq!(spec.run.output.snapshot_interval, Some(0.1));
        assert_eq!(spec.run.output.interval, Some(0.01));
        let spec = resolve("[run.initial_data]\nkind = \"taylor_green_like\"\namplitude = 1.0\n").unwrap();
        assert!(matches!(spec.run.initial_data, burgers3d::dynamics::InitialDataSpec::TaylorGreenLike { .. }));
    }

    #[test]
    fn oracle_viscosity_floor() {
        let text = "experiment = \"colehopf_convergence\"\n[run]\nnu = 0.001\n\
                    [[params.potential]]\nk = [1, 0, 0]\na = 1.0\n";
        let m = messages(text);
        assert_eq!(m.len(), 1, "{m:?}");
        assert!(m[0].contains("floor"), "{m:?}");
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(messages("experiment = \"nope\"")[0].contains("max_principle"));
        assert!(!messages("[params]\nbogus = 1\n").is_empty());
        assert!(!messages("[run]\nseed = 3\n").is_empty());
    }
}
