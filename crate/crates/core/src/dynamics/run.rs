use std::sync::Arc;

use ndarray::Array3;

use super::config::RunConfig;
use super::heat::heat_propagate;
use super::initial::initial_field;
use super::integrator::{IntegratorRegistry, Stepper};
use super::trajectory::{Snapshot, TrajectoryHandle};
use crate::analysis::{measure, DiagnosticsAccumulator};
use crate::spectral::{nonlinear_term, SpectralVectorField, WavenumberGrid};
use crate::{Error, Result};

/// `−P_n[(u·∇)u]` with the Euclidean ball projection.
pub fn galerkin_nonlinear(u: &SpectralVectorField) -> Result<SpectralVectorField> {
    let mask = negative_ball_mask(u.grid());
    Ok(SpectralVectorField::combine(&[(&mask, &nonlinear_term(u)?)]))
}

/// `−P_n[(u·∇)u] + νΔu`.
pub fn galerkin_rhs(u: &SpectralVectorField, nu: f64) -> Result<SpectralVectorField> {
    let mask = negative_ball_mask(u.grid());
    let diffusion = u.grid().radial_table(|k2| -nu * k2);
    Ok(SpectralVectorField::combine(&[(&mask, &nonlinear_term(u)?), (&diffusion, u)]))
}

fn negative_ball_mask(grid: &Arc<WavenumberGrid>) -> Array3<f64> {
    let cutoff = (grid.n() * grid.n()) as f64;
    grid.radial_table(|k2| if k2 <= cutoff { -1.0 } else { 0.0 })
}

/// Advances `P_n u₀` (built from the configured recipe) to `t_end`.
pub fn integrate(config: &RunConfig) -> Result<TrajectoryHandle> {
    config.validate()?;
    integrate_from(config, initial_field(config)?)
}

/// As [`integrate`] with explicit initial data (projected onto the ball).
pub fn integrate_from(config: &RunConfig, u0: SpectralVectorField) -> Result<TrajectoryHandle> {
    config.validate()?;
    let grid = config.grid()?;
    let u0 = u0.retruncate(&grid).project_ball();
    let mut rec = Recorder::new(config);
    let driver = Driver::new(config, &grid)?;
    let mask = negative_ball_mask(&grid);
    let enabled = config.nonlinear;
    let mut nonlinear = |u: &SpectralVectorField, _t: f64| {
        if enabled {
            Ok(SpectralVectorField::combine(&[(&mask, &nonlinear_term(u)?)]))
        } else {
            Ok(SpectralVectorField::zeros(u.grid()))
        }
    };
    driver.run(&u0, &mut nonlinear, &mut |i, t, u| rec.observe(i, t, u))?;
    rec.finish(config)
}

/// Heat part `v = e^{νtΔ}P_n u₀` and nonlinear part `w` with `w(0) = 0`,
/// `∂_t w − νΔw = −P_n[((v+w)·∇)(v+w)]`.
pub fn split_evolve(config: &RunConfig) -> Result<(TrajectoryHandle, TrajectoryHandle)> {
    config.validate()?;
    split_evolve_from(config, initial_field(config)?)
}

pub fn split_evolve_from(
    config: &RunConfig,
    u0: SpectralVectorField,
) -> Result<(TrajectoryHandle, TrajectoryHandle)> {
    config.validate()?;
    let grid = config.grid()?;
    let v0 = u0.retruncate(&grid).project_ball();
    let driver = Driver::new(config, &grid)?;
    let mask = negative_ball_mask(&grid);
    let enabled = config.nonlinear;
    // Heat part in the integrator's own variables.
    let v0_eff = v0.scaled(1.0 / driver.scale);
    let nu_eff = driver.nu_eff;
    let mut nonlinear = |w: &SpectralVectorField, tau: f64| {
        if enabled {
            let u = &heat_propagate(&v0_eff, nu_eff, tau)? + w;
            Ok(SpectralVectorField::combine(&[(&mask, &nonlinear_term(&u)?)]))
        } else {
            Ok(SpectralVectorField::zeros(w.grid()))
        }
    };
    let mut rec_v = Recorder::new(config);
    let mut rec_w = Recorder::new(config);
    let w0 = SpectralVectorField::zeros(&grid);
    driver.run(&w0, &mut nonlinear, &mut |i, t, w| {
        rec_v.observe(i, t, &heat_propagate(&v0, config.nu, t)?)?;
        rec_w.observe(i, t, w)
    })?;
    Ok((rec_v.finish(config)?, rec_w.finish(config)?))
}

/// Shared stepping loop. With `normalize_viscosity` the loop advances
/// `U = u/ν` at unit viscosity in time `τ = νt`, since `u(x,t) = νU(x,νt)`.
struct Driver<'c> {
    config: &'c RunConfig,
    regular: Box<dyn Stepper>,
    last: Option<Box<dyn Stepper>>,
    scale: f64,
    nu_eff: f64,
}

impl<'c> Driver<'c> {
    fn new(config: &'c RunConfig, grid: &Arc<WavenumberGrid>) -> Result<Self> {
        let integrator = IntegratorRegistry::builtin().get(&config.integrator)?;
        let (scale, nu_eff) = if config.normalize_viscosity { (config.nu, 1.0) } else { (1.0, config.nu) };
        let steps = config.step_count();
        let regular = integrator.stepper(grid, nu_eff, scale * config.dt);
        let last = (steps > 0).then(|| {
            let h = config.time_at(steps) - config.time_at(steps - 1);
            ((h - config.dt).abs() > 1e-12 * config.dt).then(|| integrator.stepper(grid, nu_eff, scale * h))
        });
        Ok(Self { config, regular, last: last.flatten(), scale, nu_eff })
    }

    /// Calls `observe(step, t, u)` for the initial state and after each step,
    /// in physical variables.
    fn run(
        &self,
        u0: &SpectralVectorField,
        nonlinear: &mut super::integrator::NonlinearFn<'_>,
        observe: &mut dyn FnMut(usize, f64, &SpectralVectorField) -> Result<()>,
    ) -> Result<()> {
        let cfg = self.config;
        let steps = cfg.step_count();
        let to_physical = |u: &SpectralVectorField| {
            if self.scale == 1.0 {
                u.clone()
            } else {
                u.scaled(self.scale)
            }
        };
        let mut state = if self.scale == 1.0 { u0.clone() } else { u0.scaled(1.0 / self.scale) };
        observe(0, 0.0, u0)?;
        let initial_l2 = state.l2_norm();
        for i in 0..steps {
            let t = cfg.time_at(i);
            let stepper = match (&self.last, i + 1 == steps) {
                (Some(last), true) => last,
                _ => &self.regular,
            };
            let next = stepper.step(&state, self.scale * t, nonlinear)?;
            if !next.is_finite() {
                return Err(Error::Blowup { last_valid_time: t, reason: "non-finite coefficient".into() });
            }
            let l2 = next.l2_norm();
            if initial_l2 > 0.0 && l2 > cfg.blowup_factor * initial_l2 {
                return Err(Error::Blowup {
                    last_valid_time: t,
                    reason: format!("L2 norm {l2:e} exceeds {} times its initial value", cfg.blowup_factor),
                });
            }
            state = next;
            observe(i + 1, cfg.time_at(i + 1), &to_physical(&state))?;
        }
        Ok(())
    }
}

/// Collects diagnostics and snapshots on the configured cadence.
struct Recorder {
    acc: DiagnosticsAccumulator,
    snapshots: Vec<Snapshot>,
    steps: usize,
    record_stride: usize,
    snapshot_stride: Option<usize>,
    opts: crate::analysis::NormOptions,
}

impl Recorder {
    fn new(config: &RunConfig) -> Self {
        Self {
            acc: DiagnosticsAccumulator::new(),
            snapshots: Vec::new(),
            steps: config.step_count(),
            record_stride: config.record_stride(),
            snapshot_stride: config.snapshot_stride(),
            opts: config.output.norm_options(),
        }
    }

    fn observe(&mut self, i: usize, t: f64, u: &SpectralVectorField) -> Result<()> {
        let endpoint = i == 0 || i == self.steps;
        if endpoint || i.is_multiple_of(self.record_stride) {
            self.acc.push(measure(u, t, self.opts)?);
        }
        if endpoint || self.snapshot_stride.is_some_and(|s| i.is_multiple_of(s)) {
            self.snapshots.push(Snapshot { t, field: u.clone() });
        }
        Ok(())
    }

    fn finish(self, config: &RunConfig) -> Result<TrajectoryHandle> {
        Ok(TrajectoryHandle {
            config: config.clone(),
            snapshots: self.snapshots,
            diagnostics: self.acc.into_records(),
        })
    }
}
