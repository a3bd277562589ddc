use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use mclm_core::flows::{convergence_study, cross_validate, ConvergenceReport, Solver, Termination};

use crate::config::{FormulationName, RunConfig};
use crate::manifest::{self, RunManifest, SeriesRow, Summary, MANIFEST_FILE, SERIES_FILE};
use crate::HarnessError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BLOWUP: i32 = 2;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub output_dir: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.manifest.termination {
            Termination::TEnd => EXIT_OK,
            Termination::Blowup { .. } => EXIT_BLOWUP,
            Termination::StepRejected { .. } => EXIT_ERROR,
        }
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn core_err(e: mclm_core::Error) -> HarnessError {
    match e {
        mclm_core::Error::Config(msg) => HarnessError::Config(msg),
        other => HarnessError::Numerical(other.to_string()),
    }
}

/// Integrates the configured run and writes `manifest.json` and `series.csv`
/// into the output directory (resolved against `output_root` when relative).
pub fn run(cfg: &RunConfig, output_root: Option<&Path>) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let started_at = unix_now();
    let solver = Solver::new(cfg.formulation(), cfg.model_params()?, cfg.solver_config()).map_err(core_err)?;
    let state0 = solver.initial_state(&cfg.initial_velocity()?).map_err(core_err)?;
    let traj = solver.integrate(state0).map_err(core_err)?;

    let rows: Vec<SeriesRow> = traj.rows.iter().map(SeriesRow::from).collect();
    let lagrangian = cfg.formulation().is_lagrangian();
    let output_dir = cfg.resolve_output_dir(output_root);
    std::fs::create_dir_all(&output_dir)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", output_dir.display())))?;
    manifest::write_series(&output_dir.join(SERIES_FILE), &rows, lagrangian)?;

    let manifest = RunManifest {
        config: cfg.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        finished_at: unix_now(),
        termination: traj.termination,
        steps: traj.steps,
        columns: manifest::columns(lagrangian),
        series_file: SERIES_FILE.to_string(),
        summary: Summary::from_series(&rows),
    };
    manifest::write_manifest(&output_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(RunOutcome { manifest, output_dir })
}

/// Convergence study of the configured run over `dts`.
pub fn convergence(cfg: &RunConfig, dts: &[f64]) -> Result<ConvergenceReport, HarnessError> {
    cfg.validate()?;
    convergence_study(
        cfg.formulation(),
        &cfg.model_params()?,
        &cfg.solver_config(),
        &cfg.initial_velocity()?,
        dts,
    )
    .map_err(core_err)
}

/// Largest Eulerian/Lagrangian velocity deviation for the configured data.
/// The formulation key is ignored; both formulations are always integrated.
pub fn cross_validation(cfg: &RunConfig) -> Result<f64, HarnessError> {
    cfg.validate()?;
    if cfg.formulation == FormulationName::ClmAlpha0 {
        return Err(HarnessError::Config(
            "formulation: clm-alpha0 has no Lagrangian counterpart to cross-validate".into(),
        ));
    }
    cross_validate(&cfg.initial_velocity()?, &cfg.model_params()?, &cfg.solver_config()).map_err(core_err)
}
