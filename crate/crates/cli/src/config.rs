use std::path::{Path, PathBuf};

use mclm_core::flows::{
    initial_velocity, Formulation, Inertia, ModeSpec, ModelParams, SolverConfig, DEFAULT_AMPLITUDE_CAP,
    DEFAULT_BLOWUP_SUP_UX, DEFAULT_BLOWUP_TAIL,
};
use mclm_core::SpectralFunction;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Environment variable that overrides the root of relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "MCLM_OUTPUT_ROOT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulationName {
    EulerianU,
    EulerianOmega,
    Lagrangian,
    ClmAlpha0,
}

fn default_stride() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_sup_ux() -> f64 {
    DEFAULT_BLOWUP_SUP_UX
}
fn default_tail() -> f64 {
    DEFAULT_BLOWUP_TAIL
}
fn default_cap() -> f64 {
    DEFAULT_AMPLITUDE_CAP
}
fn default_inertia() -> Inertia {
    Inertia::Hd
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("mclm-output")
}

/// A run description. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub formulation: FormulationName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_inertia")]
    pub inertia: Inertia,
    pub n_modes: usize,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub output_stride: usize,
    pub initial_data: Vec<ModeSpec>,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default = "default_sup_ux")]
    pub blowup_sup_ux: f64,
    #[serde(default = "default_tail")]
    pub blowup_tail: f64,
    /// Cap on `‖u_0‖_{H²}`.
    #[serde(default = "default_cap")]
    pub amplitude_cap: f64,
    #[serde(default = "default_true")]
    pub enforce_amplitude_cap: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.model_params()?;
        self.solver_config().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if !(self.amplitude_cap > 0.0 && self.amplitude_cap.is_finite()) {
            return Err(HarnessError::Config(format!(
                "amplitude_cap must be positive, got {}",
                self.amplitude_cap
            )));
        }
        for (i, m) in self.initial_data.iter().enumerate() {
            if m.k == 0 {
                return Err(HarnessError::Config(format!("initial_data[{i}].k must be nonzero")));
            }
            if !m.amplitude.is_finite() {
                return Err(HarnessError::Config(format!("initial_data[{i}].amplitude must be finite")));
            }
            if !m.phase.is_finite() {
                return Err(HarnessError::Config(format!("initial_data[{i}].phase must be finite")));
            }
        }
        Ok(())
    }

    pub fn formulation(&self) -> Formulation {
        match self.formulation {
            FormulationName::EulerianU => Formulation::EulerianU,
            FormulationName::EulerianOmega => Formulation::EulerianOmega,
            FormulationName::Lagrangian => Formulation::Lagrangian,
            FormulationName::ClmAlpha0 => Formulation::GeneralizedOmega { alpha: 0.0 },
        }
    }

    /// Model parameters. For `clm-alpha0` the value of `a` is not used by the
    /// equations and is reported as 0.
    pub fn model_params(&self) -> Result<ModelParams, HarnessError> {
        let cfg_err = |e: mclm_core::Error| HarnessError::Config(e.to_string());
        match (self.formulation, self.a, self.alpha) {
            (FormulationName::ClmAlpha0, None, Some(alpha)) if alpha == 0.0 => {
                ModelParams::new(0.0, self.inertia).map_err(cfg_err)
            }
            (FormulationName::ClmAlpha0, _, _) => Err(HarnessError::Config(
                "alpha: formulation clm-alpha0 requires alpha = 0 and no a".into(),
            )),
            (_, Some(a), None) => ModelParams::new(a, self.inertia).map_err(cfg_err),
            (_, None, Some(alpha)) => ModelParams::from_alpha(alpha, self.inertia).map_err(cfg_err),
            (_, Some(_), Some(_)) => Err(HarnessError::Config("a/alpha: give exactly one of a and alpha, not both".into())),
            (_, None, None) => Err(HarnessError::Config("a/alpha: one of a and alpha is required".into())),
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            n_modes: self.n_modes,
            dt: self.dt,
            t_end: self.t_end,
            dealias: self.dealias,
            blowup_sup_ux: self.blowup_sup_ux,
            blowup_tail: self.blowup_tail,
            output_stride: self.output_stride,
            amplitude_cap: self.enforce_amplitude_cap.then_some(self.amplitude_cap),
        }
    }

    pub fn initial_velocity(&self) -> Result<SpectralFunction, HarnessError> {
        initial_velocity(self.n_modes, &self.initial_data).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Output directory, joined onto `root` when relative.
    pub fn resolve_output_dir(&self, root: Option<&Path>) -> PathBuf {
        match root {
            Some(r) if self.output_dir.is_relative() => r.join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }
}
