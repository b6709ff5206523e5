use std::collections::BTreeMap;
use std::sync::Arc;

use burgers3d::dynamics::RunConfig;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::artifacts::Artifacts;
use crate::RunnerError;

/// One verification experiment with typed parameters.
///
/// `Params` is read from the `[params]` table of a spec file, with unset keys
/// taken from `Default`.
pub trait Experiment: Send + Sync {
    type Params: Serialize + DeserializeOwned + Default + Send + Sync;

    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;

    /// Base run the `[run]` table is merged into.
    fn default_run(&self) -> RunConfig;

    /// Experiment-specific consistency problems, one message each.
    fn problems(&self, _run: &RunConfig, _params: &Self::Params) -> Vec<String> {
        Vec::new()
    }

    fn execute(&self, run: &RunConfig, params: &Self::Params, seed: u64, out: &mut Artifacts)
        -> Result<(), RunnerError>;
}

/// Object-safe face of [`Experiment`]; parameters travel as TOML tables.
pub trait DynExperiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn default_run(&self) -> RunConfig;
    /// Fills defaults into `raw`, or lists what is wrong with it.
    fn resolve_params(&self, raw: &toml::Table) -> Result<toml::Table, Vec<String>>;
    fn problems(&self, run: &RunConfig, params: &toml::Table) -> Vec<String>;
    fn execute(&self, run: &RunConfig, params: &toml::Table, seed: u64, out: &mut Artifacts)
        -> Result<(), RunnerError>;
}

fn parse<P: DeserializeOwned>(raw: &toml::Table) -> Result<P, Vec<String>> {
    P::deserialize(toml::Value::Table(raw.clone())).map_err(|e| vec![format!("params: {e}")])
}

impl<E: Experiment> DynExperiment for E {
    fn name(&self) -> &'static str {
        Experiment::name(self)
    }

    fn description(&self) -> &'static str {
        Experiment::description(self)
    }

    fn default_run(&self) -> RunConfig {
        Experiment::default_run(self)
    }

    fn resolve_params(&self, raw: &toml::Table) -> Result<toml::Table, Vec<String>> {
        let p: E::Params = parse(raw)?;
        match toml::Value::try_from(&p) {
            Ok(toml::Value::Table(t)) => Ok(t),
            Ok(_) => Err(vec!["params must be a table".into()]),
            Err(e) => Err(vec![format!("params: {e}")]),
        }
    }

    fn problems(&self, run: &RunConfig, params: &toml::Table) -> Vec<String> {
        match parse::<E::Params>(params) {
            Ok(p) => Experiment::problems(self, run, &p),
            Err(e) => e,
        }
    }

    fn execute(&self, run: &RunConfig, params: &toml::Table, seed: u64, out: &mut Artifacts)
        -> Result<(), RunnerError> {
        let p = parse::<E::Params>(params).map_err(RunnerError::Config)?;
        Experiment::execute(self, run, &p, seed, out)
    }
}

/// Experiments by name.
#[derive(Clone, Default)]
pub struct ExperimentRegistry {
    entries: BTreeMap<&'static str, Arc<dyn DynExperiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn register<E: Experiment + 'static>(&mut self, e: E) {
        self.entries.insert(Experiment::name(&e), Arc::new(e));
    }

    /// The nine built-in experiments.
    pub fn builtin() -> Self {
        use crate::experiments::*;
        let mut r = Self::empty();
        r.register(MaxPrinciple);
        r.register(Momentum);
        r.register(ExistenceTime);
        r.register(H1Bound);
        r.register(Splitting);
        r.register(Stability);
        r.register(ColeHopfConvergence);
        r.register(Smoothing);
        r.register(Scaling);
        r
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn DynExperiment>, RunnerError> {
        self.entries.get(name).cloned().ok_or_else(|| RunnerError::UnknownExperiment {
            name: name.to_owned(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn DynExperiment>> {
        self.entries.values()
    }
}
