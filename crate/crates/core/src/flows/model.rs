use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::MultiplierSymbol;
use crate::spectral::{dealias_cutoff, max_wavenumber, SpectralFunction, TWO_PI};

/// Inertia operator of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inertia {
    /// `Λ = H∘D`.
    Hd,
    /// `-D² = Λ²`.
    D2,
}

impl Inertia {
    pub fn symbol(self) -> MultiplierSymbol {
        match self {
            Inertia::Hd => MultiplierSymbol::lambda(),
            Inertia::D2 => MultiplierSymbol::neg_laplacian(),
        }
    }

    /// Symbol whose quadratic form is the conserved energy in the metric case
    /// (`Σ|k||û|²` for `Λ`, `Σ(2πk)²|û|²` for `-D²`).
    pub fn energy_symbol(self) -> MultiplierSymbol {
        match self {
            Inertia::Hd => MultiplierSymbol::lambda_normalized(),
            Inertia::D2 => MultiplierSymbol::neg_laplacian(),
        }
    }

    /// Energy of a velocity field under [`Inertia::energy_symbol`].
    pub fn energy(self, u: &SpectralFunction) -> f64 {
        let symbol = self.energy_symbol();
        let kmax = max_wavenumber(u.n_modes());
        (-kmax..=kmax)
            .map(|k| symbol.eval(k).re * u.coeff(k).norm_sqr())
            .sum()
    }
}

/// Parameter `a` of `ω_t + u ω_x + a u_x ω = 0, ω = A u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    a: f64,
    inertia: Inertia,
    alpha: Option<f64>,
}

impl ModelParams {
    pub fn new(a: f64, inertia: Inertia) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Config(format!("parameter a must be finite, got {a}")));
        }
        Ok(Self { a, inertia, alpha: None })
    }

    /// From the generalized-model parameter: `a = -1/α`, `α ≠ 0`.
    pub fn from_alpha(alpha: f64, inertia: Inertia) -> Result<Self> {
        if !alpha.is_finite() || alpha == 0.0 {
            return Err(Error::Config(format!(
                "alpha must be finite and nonzero to define a = -1/alpha, got {alpha}"
            )));
        }
        Ok(Self {
            a: -1.0 / alpha,
            inertia,
            alpha: Some(alpha),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }
}

/// Which equations are integrated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Formulation {
    /// `u_t = -A⁻¹[u (Au)_x + a (Au) u_x]`.
    EulerianU,
    /// `ω_t = -(u ω_x + a u_x ω)`, `u = A⁻¹ω`.
    EulerianOmega,
    /// `φ_t = v`, `v_t = S_φ(v)` on the diffeomorphism chart.
    Lagrangian,
    /// `ω_t + α u ω_x = Hω ω`, `u_x = Hω`. `α = 0` is the original model.
    GeneralizedOmega { alpha: f64 },
}

impl Formulation {
    pub fn is_lagrangian(&self) -> bool {
        matches!(self, Formulation::Lagrangian)
    }
}

/// Fixed-step solver settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_modes: usize,
    pub dt: f64,
    pub t_end: f64,
    /// 2/3-rule dealiasing of quadratic products.
    pub dealias: bool,
    /// Blow-up trigger on `sup |u_x|`.
    pub blowup_sup_ux: f64,
    /// Blow-up trigger on the spectral tail ratio of `ω`.
    pub blowup_tail: f64,
    /// Emit a diagnostic row every this many steps.
    pub output_stride: usize,
    /// Upper bound on `‖u_0‖_{H²}`; `None` disables the check.
    pub amplitude_cap: Option<f64>,
}

pub const DEFAULT_BLOWUP_SUP_UX: f64 = 50.0;
pub const DEFAULT_BLOWUP_TAIL: f64 = 1e-3;
pub const DEFAULT_AMPLITUDE_CAP: f64 = 0.5;

impl SolverConfig {
    pub fn new(n_modes: usize, dt: f64, t_end: f64) -> Self {
        Self {
            n_modes,
            dt,
            t_end,
            dealias: true,
            blowup_sup_ux: DEFAULT_BLOWUP_SUP_UX,
            blowup_tail: DEFAULT_BLOWUP_TAIL,
            output_stride: 1,
            amplitude_cap: Some(DEFAULT_AMPLITUDE_CAP),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_modes;
        if n < 32 || !n.is_power_of_two() {
            return Err(Error::Config(format!("n_modes must be a power of two >= 32, got {n}")));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.output_stride == 0 {
            return Err(Error::Config("output_stride must be at least 1".into()));
        }
        if !(self.blowup_sup_ux > 0.0) || !(self.blowup_tail > 0.0) {
            return Err(Error::Config("blow-up thresholds must be positive".into()));
        }
        if let Some(cap) = self.amplitude_cap {
            if !(cap > 0.0) {
                return Err(Error::Config(format!("amplitude_cap must be positive, got {cap}")));
            }
        }
        Ok(())
    }

    /// Highest wavenumber the solver resolves.
    pub fn resolved_cutoff(&self) -> i64 {
        if self.dealias {
            dealias_cutoff(self.n_modes)
        } else {
            max_wavenumber(self.n_modes)
        }
    }

    /// Number of steps to reach `t_end`; the last one may be shortened.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// One term `amplitude · sin(2πk x + phase)` of the initial velocity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: i64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Sums the modes and shifts the result into the chart (`u(0) = 0`).
pub fn initial_velocity(n: usize, modes: &[ModeSpec]) -> Result<SpectralFunction> {
    for (i, m) in modes.iter().enumerate() {
        if m.k == 0 {
            return Err(Error::Config(format!("initial_data[{i}].k must be nonzero")));
        }
        if m.k.abs() > max_wavenumber(n) {
            return Err(Error::Config(format!(
                "initial_data[{i}].k = {} is not representable on {n} points",
                m.k
            )));
        }
        if !m.amplitude.is_finite() || !m.phase.is_finite() {
            return Err(Error::Config(format!("initial_data[{i}] has a non-finite amplitude or phase")));
        }
    }
    let u = SpectralFunction::from_fn(n, |x| {
        modes
            .iter()
            .map(|m| m.amplitude * (TWO_PI * m.k as f64 * x + m.phase).sin())
            .sum()
    })?;
    Ok(u.to_chart())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_maps_to_a() {
        let p = ModelParams::from_alpha(-0.5, Inertia::Hd).unwrap();
        assert_eq!(p.a(), 2.0);
        assert_eq!(p.alpha(), Some(-0.5));
        assert_eq!(ModelParams::from_alpha(-1.0, Inertia::Hd).unwrap().a(), 1.0);
        assert!(ModelParams::from_alpha(0.0, Inertia::Hd).is_err());
        assert!(ModelParams::new(f64::NAN, Inertia::Hd).is_err());
    }

    #[test]
    fn solver_config_validation() {
        assert!(SolverConfig::new(128, 1e-3, 1.0).validate().is_ok());
        assert!(SolverConfig::new(96, 1e-3, 1.0).validate().is_err());
        assert!(SolverConfig::new(16, 1e-3, 1.0).validate().is_err());
        assert!(SolverConfig::new(128, 0.0, 1.0).validate().is_err());
        assert_eq!(SolverConfig::new(128, 1e-3, 1.0).n_steps(), 1000);
        assert_eq!(SolverConfig::new(128, 0.3, 1.0).n_steps(), 4);
        assert_eq!(SolverConfig::new(128, 0.1, 0.0).n_steps(), 0);
    }

    #[test]
    fn initial_velocity_lands_in_chart() {
        let u = initial_velocity(
            64,
            &[ModeSpec { k: 1, amplitude: 0.1, phase: 0.7 }, ModeSpec { k: 3, amplitude: 0.02, phase: 0.0 }],
        )
        .unwrap();
        assert!(u.value_at_origin().abs() < 1e-15);
        assert!(initial_velocity(64, &[ModeSpec { k: 0, amplitude: 1.0, phase: 0.0 }]).is_err());
        assert!(initial_velocity(64, &[ModeSpec { k: 40, amplitude: 1.0, phase: 0.0 }]).is_err());
    }

    #[test]
    fn d2_energy_is_gradient_energy() {
        let u = SpectralFunction::from_fn(64, |x| (TWO_PI * x).sin()).unwrap();
        // ∫ u_x² = 4π² · 1/2
        assert!((Inertia::D2.energy(&u) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }
}
