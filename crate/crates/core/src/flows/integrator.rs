use serde::{Deserialize, Serialize};

use crate::diffeo::{compose, inner_product, invert, make_diffeo, Diffeo, TangentVector};
use crate::error::{Error, Result};
use crate::spectral::{same_grid, SobolevIndex, SpectralFunction};

use super::model::{Formulation, ModelParams, SolverConfig};
use super::rhs::{
    eulerian_rhs, generalized_omega_rhs, generalized_velocity, omega_rhs, spray_with_inverse, OMEGA_MEAN_TOL,
};

/// Drift of a chart or mean invariant that is silently re-projected.
pub const DRIFT_TOL: f64 = 1e-6;

/// Eulerian state; `u` and `ω` are kept consistent with each other.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerianState {
    pub t: f64,
    omega: SpectralFunction,
    u: SpectralFunction,
}

impl EulerianState {
    pub fn velocity(&self) -> &SpectralFunction {
        &self.u
    }

    pub fn vorticity(&self) -> &SpectralFunction {
        &self.omega
    }
}

/// Lagrangian state: the flow map and its velocity `v = u ∘ φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianState {
    pub t: f64,
    pub phi: Diffeo,
    pub v: TangentVector,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlowState {
    Eulerian(EulerianState),
    Lagrangian(LagrangianState),
}

impl FlowState {
    pub fn t(&self) -> f64 {
        match self {
            FlowState::Eulerian(s) => s.t,
            FlowState::Lagrangian(s) => s.t,
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            FlowState::Eulerian(s) => s.u.n_modes(),
            FlowState::Lagrangian(s) => s.phi.n_modes(),
        }
    }
}

/// One sample of the diagnostic time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub t: f64,
    /// `Σ|k||û(k)|²`.
    pub h_half_sq: f64,
    /// `Σ(1+k²)|û(k)|²`.
    pub h1_sq: f64,
    /// `Σ(1+k²)²|û(k)|²`.
    pub h2_sq: f64,
    pub sup_ux: f64,
    pub omega_mean: f64,
    pub linf_omega: f64,
    /// Fraction of the vorticity energy in the top eighth of resolved modes.
    pub tail_ratio: f64,
    /// `⟨v, v⟩_φ` for the Lagrangian formulation.
    pub energy_lagrangian: Option<f64>,
}

/// Which blow-up threshold fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupTrigger {
    SupUx,
    Tail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "cause")]
pub enum Termination {
    TEnd,
    Blowup { trigger: BlowupTrigger, t: f64 },
    StepRejected { t: f64, reason: String },
}

impl Termination {
    pub fn cause(&self) -> &'static str {
        match self {
            Termination::TEnd => "t_end",
            Termination::Blowup { .. } => "blowup",
            Termination::StepRejected { .. } => "step_rejected",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub rows: Vec<DiagnosticRow>,
    pub termination: Termination,
    pub final_state: FlowState,
    pub steps: usize,
}

/// Fraction of `Σ|ω̂(k)|²` carried by `|k| > 7·kmax/8`.
pub fn tail_ratio(omega: &SpectralFunction, kmax: i64) -> f64 {
    let threshold = 7.0 * kmax as f64 / 8.0;
    let (mut tail, mut total) = (0.0, 0.0);
    for k in -kmax..=kmax {
        let e = omega.coeff(k).norm_sqr();
        total += e;
        if k.abs() as f64 > threshold {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

fn rk4<F>(y: &SpectralFunction, dt: f64, f: F) -> Result<SpectralFunction>
where
    F: Fn(&SpectralFunction) -> Result<SpectralFunction>,
{
    let k1 = f(y)?;
    let k2 = f(&y.axpy(dt / 2.0, &k1))?;
    let k3 = f(&y.axpy(dt / 2.0, &k2))?;
    let k4 = f(&y.axpy(dt, &k3))?;
    let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
    Ok(y.axpy(dt / 6.0, &incr))
}

fn reject(t: f64, reason: impl Into<String>) -> Error {
    Error::StepRejected { t, reason: reason.into() }
}

fn check_finite(w: &SpectralFunction, t: f64, what: &str) -> Result<()> {
    if w.samples().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(reject(t, format!("{what} is not finite")))
    }
}

/// Removes a drift of `u(0)` below [`DRIFT_TOL`].
fn reproject_chart(w: SpectralFunction, t: f64, what: &str) -> Result<SpectralFunction> {
    check_finite(&w, t, what)?;
    let drift = w.value_at_origin();
    if drift.abs() > DRIFT_TOL {
        return Err(reject(t, format!("{what}(0) drifted to {drift:e}")));
    }
    Ok(w.to_chart())
}

/// Removes a drift of the mean below [`DRIFT_TOL`].
fn reproject_mean(w: SpectralFunction, t: f64, what: &str) -> Result<SpectralFunction> {
    check_finite(&w, t, what)?;
    let drift = w.mean();
    if drift.abs() > DRIFT_TOL {
        return Err(reject(t, format!("mean of {what} drifted to {drift:e}")));
    }
    Ok(w.mean_free())
}

/// Fixed-step RK4 integrator for one formulation and parameter set.
#[derive(Clone, Debug)]
pub struct Solver {
    formulation: Formulation,
    params: ModelParams,
    cfg: SolverConfig,
}

impl Solver {
    pub fn new(formulation: Formulation, params: ModelParams, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if let Formulation::GeneralizedOmega { alpha } = formulation {
            if !alpha.is_finite() {
                return Err(Error::Config(format!("alpha must be finite, got {alpha}")));
            }
        }
        Ok(Self { formulation, params, cfg })
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn check_amplitude(&self, u: &SpectralFunction) -> Result<()> {
        if let Some(cap) = self.cfg.amplitude_cap {
            let norm = u.sobolev_norm_sq(SobolevIndex::Integer(2)).sqrt();
            if norm > cap {
                return Err(Error::Config(format!(
                    "initial data has H2 norm {norm:.6} above amplitude_cap = {cap}"
                )));
            }
        }
        Ok(())
    }

    fn eulerian_from_vorticity(&self, t: f64, omega: SpectralFunction) -> Result<EulerianState> {
        let u = match self.formulation {
            Formulation::GeneralizedOmega { .. } => generalized_velocity(&omega)?,
            _ => self.params.inertia().symbol().invert_to_chart(&omega, OMEGA_MEAN_TOL)?,
        };
        Ok(EulerianState { t, omega, u })
    }

    fn eulerian_from_velocity(&self, t: f64, u: SpectralFunction) -> Result<EulerianState> {
        let omega = match self.formulation {
            // u_x = Hω  ⇔  ω = -Λu
            Formulation::GeneralizedOmega { .. } => -&u.lambda_apply(),
            _ => self.params.inertia().symbol().apply(&u)?,
        };
        Ok(EulerianState { t, omega, u })
    }

    /// State at `t = 0` with velocity `u0` (Lagrangian: `(id, u0)`).
    pub fn initial_state(&self, u0: &SpectralFunction) -> Result<FlowState> {
        same_grid(self.cfg.n_modes, u0.n_modes())?;
        if u0.value_at_origin().abs() > 1e-10 {
            return Err(Error::Chart(format!(
                "initial velocity must vanish at x = 0, got {:e}",
                u0.value_at_origin()
            )));
        }
        let u0 = u0.to_chart();
        self.check_amplitude(&u0)?;
        match self.formulation {
            Formulation::Lagrangian => Ok(FlowState::Lagrangian(LagrangianState {
                t: 0.0,
                phi: Diffeo::identity(self.cfg.n_modes)?,
                v: TangentVector::new(u0)?,
            })),
            _ => Ok(FlowState::Eulerian(self.eulerian_from_velocity(0.0, u0)?)),
        }
    }

    /// State at `t = 0` from a mean-zero vorticity (Eulerian formulations only).
    pub fn initial_state_from_vorticity(&self, omega0: &SpectralFunction) -> Result<FlowState> {
        same_grid(self.cfg.n_modes, omega0.n_modes())?;
        if self.formulation.is_lagrangian() {
            return Err(Error::Config("the Lagrangian formulation starts from a velocity".into()));
        }
        let state = self.eulerian_from_vorticity(0.0, omega0.mean_free())?;
        if omega0.mean().abs() > OMEGA_MEAN_TOL {
            return Err(Error::Domain(format!("initial vorticity has mean {:e}", omega0.mean())));
        }
        self.check_amplitude(&state.u)?;
        Ok(FlowState::Eulerian(state))
    }

    /// One RK4 step of size `dt`.
    pub fn step(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let dealias = self.cfg.dealias;
        let p = &self.params;
        match (self.formulation, state) {
            (Formulation::EulerianU, FlowState::Eulerian(s)) => {
                let t = s.t + dt;
                let u = rk4(&s.u, dt, |u| eulerian_rhs(u, p, dealias))?;
                let u = reproject_chart(u, t, "u")?;
                Ok(FlowState::Eulerian(self.eulerian_from_velocity(t, u)?))
            }
            (Formulation::EulerianOmega, FlowState::Eulerian(s)) => {
                let t = s.t + dt;
                let omega = rk4(&s.omega, dt, |w| omega_rhs(w, p, dealias))?;
                let omega = reproject_mean(omega, t, "omega")?;
                Ok(FlowState::Eulerian(self.eulerian_from_vorticity(t, omega)?))
            }
            (Formulation::GeneralizedOmega { alpha }, FlowState::Eulerian(s)) => {
                let t = s.t + dt;
                let omega = rk4(&s.omega, dt, |w| generalized_omega_rhs(w, alpha, dealias))?;
                let omega = reproject_mean(omega, t, "omega")?;
                Ok(FlowState::Eulerian(self.eulerian_from_vorticity(t, omega)?))
            }
            (Formulation::Lagrangian, FlowState::Lagrangian(s)) => self.lagrangian_step(s, dt).map(FlowState::Lagrangian),
            _ => Err(Error::Config("state does not match the solver formulation".into())),
        }
    }

    fn stage_map(&self, f: SpectralFunction, t: f64) -> Result<Diffeo> {
        check_finite(&f, t, "displacement")?;
        make_diffeo(f.to_chart()).map_err(|e| reject(t, e.to_string()))
    }

    fn accel(&self, phi: &Diffeo, v: &SpectralFunction) -> Result<SpectralFunction> {
        let inv = invert(phi)?;
        let v = TangentVector::new(v.to_chart())?;
        Ok(spray_with_inverse(phi, &inv, &v, &self.params, self.cfg.dealias)?.into_function())
    }

    fn lagrangian_step(&self, s: &LagrangianState, dt: f64) -> Result<LagrangianState> {
        let t = s.t + dt;
        let f = s.phi.displacement();
        let v = s.v.function();
        let h = dt / 2.0;

        let a1 = self.accel(&s.phi, v)?;
        let (f2, v2) = (f.axpy(h, v), v.axpy(h, &a1));
        let a2 = self.accel(&self.stage_map(f2, t)?, &v2)?;
        let (f3, v3) = (f.axpy(h, &v2), v.axpy(h, &a2));
        let a3 = self.accel(&self.stage_map(f3, t)?, &v3)?;
        let (f4, v4) = (f.axpy(dt, &v3), v.axpy(dt, &a3));
        let a4 = self.accel(&self.stage_map(f4, t)?, &v4)?;

        let df = v.axpy(2.0, &v2).axpy(2.0, &v3).axpy(1.0, &v4);
        let dv = a1.axpy(2.0, &a2).axpy(2.0, &a3).axpy(1.0, &a4);
        let f_new = reproject_chart(f.axpy(dt / 6.0, &df), t, "phi - id")?;
        let v_new = reproject_chart(v.axpy(dt / 6.0, &dv), t, "v")?;
        Ok(LagrangianState {
            t,
            phi: make_diffeo(f_new).map_err(|e| reject(t, e.to_string()))?,
            v: TangentVector::new(v_new)?,
        })
    }

    /// Eulerian velocity of any state (`v ∘ φ⁻¹` for Lagrangian states).
    pub fn velocity(&self, state: &FlowState) -> Result<SpectralFunction> {
        match state {
            FlowState::Eulerian(s) => Ok(s.u.clone()),
            FlowState::Lagrangian(s) => Ok(compose(s.v.function(), &invert(&s.phi)?)?.to_chart()),
        }
    }

    pub fn vorticity(&self, state: &FlowState) -> Result<SpectralFunction> {
        match state {
            FlowState::Eulerian(s) => Ok(s.omega.clone()),
            FlowState::Lagrangian(_) => self.params.inertia().symbol().apply(&self.velocity(state)?),
        }
    }

    pub fn diagnostics(&self, state: &FlowState) -> Result<DiagnosticRow> {
        let u = self.velocity(state)?;
        let omega = self.vorticity(state)?;
        let (sup_ux, energy_lagrangian) = match state {
            FlowState::Eulerian(_) => (u.derivative().sup_norm(), None),
            // u_x ∘ φ = v_x / φ_x, sampled on the moving points φ(x_j)
            FlowState::Lagrangian(s) => {
                let vx = s.v.function().derivative();
                let sup = vx
                    .samples()
                    .iter()
                    .zip(s.phi.jacobian())
                    .map(|(a, j)| (a / j).abs())
                    .fold(0.0, f64::max);
                let e = inner_product(&s.phi, &s.v, &s.v, &self.params.inertia().energy_symbol())?;
                (sup, Some(e))
            }
        };
        Ok(DiagnosticRow {
            t: state.t(),
            h_half_sq: u.h_half_norm_sq(),
            h1_sq: u.sobolev_norm_sq(SobolevIndex::Integer(1)),
            h2_sq: u.sobolev_norm_sq(SobolevIndex::Integer(2)),
            sup_ux,
            omega_mean: omega.mean(),
            linf_omega: omega.sup_norm(),
            tail_ratio: tail_ratio(&omega, self.cfg.resolved_cutoff()),
            energy_lagrangian,
        })
    }

    fn blowup(&self, row: &DiagnosticRow) -> Option<BlowupTrigger> {
        if !(row.sup_ux <= self.cfg.blowup_sup_ux) {
            Some(BlowupTrigger::SupUx)
        } else if !(row.tail_ratio <= self.cfg.blowup_tail) {
            Some(BlowupTrigger::Tail)
        } else {
            None
        }
    }

    /// Integrates to `t_end` or until a blow-up trigger fires or a step is
    /// rejected. Rows are recorded every `output_stride` steps and at the end.
    pub fn integrate(&self, state0: FlowState) -> Result<Trajectory> {
        same_grid(self.cfg.n_modes, state0.n_modes())?;
        let n_steps = self.cfg.n_steps();
        let t0 = state0.t();
        let mut state = state0;
        let mut row = self.diagnostics(&state)?;
        let mut rows = vec![row];
        let mut termination = Termination::TEnd;
        if let Some(trigger) = self.blowup(&row) {
            termination = Termination::Blowup { trigger, t: row.t };
            return Ok(Trajectory { rows, termination, final_state: state, steps: 0 });
        }
        let mut steps = 0;
        for i in 0..n_steps {
            let t_next = if i + 1 == n_steps {
                t0 + self.cfg.t_end
            } else {
                t0 + (i + 1) as f64 * self.cfg.dt
            };
            let dt = t_next - state.t();
            let next = self.step(&state, dt).and_then(|s| {
                let r = self.diagnostics(&s)?;
                Ok((s, r))
            });
            match next {
                Ok((s, r)) => {
                    state = s;
                    row = r;
                    steps += 1;
                }
                Err(e) => {
                    let reason = match e {
                        Error::StepRejected { reason, .. } => reason,
                        other => other.to_string(),
                    };
                    termination = Termination::StepRejected { t: t_next, reason };
                    break;
                }
            }
            let trigger = self.blowup(&row);
            if (i + 1) % self.cfg.output_stride == 0 || i + 1 == n_steps || trigger.is_some() {
                rows.push(row);
            }
            if let Some(trigger) = trigger {
                termination = Termination::Blowup { trigger, t: row.t };
                break;
            }
        }
        Ok(Trajectory { rows, termination, final_state: state, steps })
    }
}

/// Integrates the Eulerian `u`-form and the Lagrangian form side by side from
/// `u0` and returns the largest `‖u_E - v ∘ φ⁻¹‖_∞` over the output times.
pub fn cross_validate(u0: &SpectralFunction, params: &ModelParams, cfg: &SolverConfig) -> Result<f64> {
    let eulerian = Solver::new(Formulation::EulerianU, *params, cfg.clone())?;
    let lagrangian = Solver::new(Formulation::Lagrangian, *params, cfg.clone())?;
    let mut se = eulerian.initial_state(u0)?;
    let mut sl = lagrangian.initial_state(u0)?;
    let n_steps = cfg.n_steps();
    let mut worst = 0.0_f64;
    for i in 0..n_steps {
        let t_next = if i + 1 == n_steps { cfg.t_end } else { (i + 1) as f64 * cfg.dt };
        se = eulerian.step(&se, t_next - se.t())?;
        sl = lagrangian.step(&sl, t_next - sl.t())?;
        if (i + 1) % cfg.output_stride == 0 || i + 1 == n_steps {
            let ue = eulerian.velocity(&se)?;
            let ul = lagrangian.velocity(&sl)?;
            worst = worst.max(ue.max_abs_diff(&ul));
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum OrderEstimate {
    /// Every error vanished.
    Exact,
    Fitted(f64),
    NotMeasurable(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub reference_dt: f64,
    pub order: OrderEstimate,
}

/// Least-squares slope of `log err` against `log dt`.
pub fn fit_order(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Errors below this fraction of `max(1, sup|u_ref|)` are treated as roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-14;

fn reference_scale(reference: &std::result::Result<SpectralFunction, String>) -> f64 {
    reference.as_ref().map_or(1.0, |r| r.sup_norm().max(1.0))
}

/// Global error at `t_end` for each `dt` against a run with `min(dts)/4`,
/// with the fitted order. `dts` must hold at least three steps in ratio 2.
pub fn convergence_study(
    formulation: Formulation,
    params: &ModelParams,
    cfg: &SolverConfig,
    u0: &SpectralFunction,
    dts: &[f64],
) -> Result<ConvergenceReport> {
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    if dts.len() < 3 {
        return Err(Error::Config(format!("convergence needs at least 3 step sizes, got {}", dts.len())));
    }
    for w in dts.windows(2) {
        if !(w[1] > 0.0) || ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::Config(format!("step sizes must be in ratio 2, got {} and {}", w[0], w[1])));
        }
    }
    let reference_dt = dts[dts.len() - 1] / 4.0;
    let run = |dt: f64| -> Result<std::result::Result<SpectralFunction, String>> {
        let solver = Solver::new(formulation, *params, SolverConfig { dt, ..cfg.clone() })?;
        let traj = solver.integrate(solver.initial_state(u0)?)?;
        match traj.termination {
            Termination::TEnd => Ok(Ok(solver.velocity(&traj.final_state)?)),
            other => Ok(Err(format!("run with dt = {dt} ended with cause {}", other.cause()))),
        }
    };
    let reference = run(reference_dt)?;
    let mut errors = Vec::with_capacity(dts.len());
    let mut failure = reference.as_ref().err().cloned();
    for &dt in &dts {
        match (run(dt)?, &reference) {
            (Ok(u), Ok(r)) => errors.push(u.max_abs_diff(r)),
            (Err(msg), _) => {
                failure.get_or_insert(msg);
                errors.push(f64::NAN);
            }
            (Ok(_), Err(_)) => errors.push(f64::NAN),
        }
    }
    let order = if let Some(msg) = failure {
        OrderEstimate::NotMeasurable(msg)
    } else if errors.iter().all(|&e| e == 0.0) {
        OrderEstimate::Exact
    } else if errors.iter().any(|&e| !(e > 0.0)) {
        OrderEstimate::NotMeasurable("some errors vanish while others do not".into())
    } else if let Some(&e) = errors.iter().find(|&&e| e < ROUNDOFF_FLOOR * reference_scale(&reference)) {
        OrderEstimate::NotMeasurable(format!("error {e:.2e} is at roundoff level"))
    } else {
        OrderEstimate::Fitted(fit_order(&dts, &errors))
    };
    Ok(ConvergenceReport { dts, errors, reference_dt, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::model::Inertia;
    use crate::spectral::TWO_PI;

    fn sine(n: usize, amp: f64) -> SpectralFunction {
        SpectralFunction::from_fn(n, |x| amp * (TWO_PI * x).sin()).unwrap()
    }

    fn solver(formulation: Formulation, a: f64, n: usize, dt: f64, t_end: f64) -> Solver {
        Solver::new(formulation, ModelParams::new(a, Inertia::Hd).unwrap(), SolverConfig::new(n, dt, t_end)).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        for f in [Formulation::EulerianU, Formulation::EulerianOmega, Formulation::Lagrangian] {
            let s = solver(f, 2.0, 32, 1e-2, 0.1);
            let traj = s.integrate(s.initial_state(&SpectralFunction::zero(32).unwrap()).unwrap()).unwrap();
            assert_eq!(traj.termination, Termination::TEnd);
            assert_eq!(traj.rows.len(), 11);
            for r in &traj.rows {
                assert_eq!(
                    [r.h_half_sq, r.h1_sq, r.h2_sq, r.sup_ux, r.omega_mean, r.linf_omega],
                    [0.0; 6]
                );
            }
        }
    }

    #[test]
    fn lagrangian_first_step_is_euler_to_leading_order() {
        let n = 64;
        let u0 = sine(n, 0.05);
        for dt in [1e-2, 5e-3] {
            let s = solver(Formulation::Lagrangian, 2.0, n, dt, dt);
            let FlowState::Lagrangian(next) = s.step(&s.initial_state(&u0).unwrap(), dt).unwrap() else {
                panic!()
            };
            let err = next.phi.displacement().max_abs_diff(&u0.scale(dt));
            assert!(err < 0.1 * dt * dt, "dt = {dt}: {err:e}");
        }
    }

    #[test]
    fn one_step_error_is_fifth_order() {
        let n = 64;
        let u0 = SpectralFunction::from_fn(n, |x| 0.3 * (TWO_PI * x).sin() + 0.05 * (2.0 * TWO_PI * x).sin()).unwrap();
        for f in [Formulation::EulerianU, Formulation::EulerianOmega] {
            let s = solver(f, 2.0, n, 1.0, 1.0);
            let s0 = s.initial_state(&u0).unwrap();
            let one_step_error = |h: f64| {
                let coarse = s.velocity(&s.step(&s0, h).unwrap()).unwrap();
                let mut fine = s0.clone();
                for _ in 0..16 {
                    fine = s.step(&fine, h / 16.0).unwrap();
                }
                coarse.max_abs_diff(&s.velocity(&fine).unwrap())
            };
            let ratio = one_step_error(0.04) / one_step_error(0.02);
            assert!((20.0..45.0).contains(&ratio), "{f:?}: ratio {ratio}");
        }
    }

    #[test]
    fn stationary_single_mode_at_a_minus_one() {
        let s = solver(Formulation::EulerianU, -1.0, 64, 1e-2, 1.0);
        let u0 = sine(64, 0.2);
        let traj = s.integrate(s.initial_state(&u0).unwrap()).unwrap();
        assert!(s.velocity(&traj.final_state).unwrap().max_abs_diff(&u0) < 1e-12);
    }

    #[test]
    fn cross_validation_of_zero_is_zero() {
        let p = ModelParams::new(2.0, Inertia::Hd).unwrap();
        let d = cross_validate(&SpectralFunction::zero(32).unwrap(), &p, &SolverConfig::new(32, 1e-2, 0.05)).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn convergence_of_zero_data_is_exact() {
        let p = ModelParams::new(2.0, Inertia::Hd).unwrap();
        let report = convergence_study(
            Formulation::EulerianU,
            &p,
            &SolverConfig::new(32, 1e-2, 0.05),
            &SpectralFunction::zero(32).unwrap(),
            &[1e-2, 2e-2, 4e-2],
        )
        .unwrap();
        assert_eq!(report.order, OrderEstimate::Exact);
        assert_eq!(report.dts, vec![4e-2, 2e-2, 1e-2]);
        assert!(convergence_study(
            Formulation::EulerianU,
            &p,
            &SolverConfig::new(32, 1e-2, 0.05),
            &SpectralFunction::zero(32).unwrap(),
            &[1e-2, 3e-2, 4e-2],
        )
        .is_err());
    }

    #[test]
    fn roundoff_errors_do_not_give_an_order() {
        let p = ModelParams::new(2.0, Inertia::Hd).unwrap();
        let report = convergence_study(
            Formulation::EulerianU,
            &p,
            &SolverConfig::new(32, 1e-2, 0.04),
            &sine(32, 1e-4),
            &[1e-2, 2e-2, 4e-2],
        )
        .unwrap();
        assert!(matches!(report.order, OrderEstimate::NotMeasurable(_)), "{report:?}");
    }

    #[test]
    fn amplitude_cap_is_enforced() {
        let s = solver(Formulation::EulerianU, 2.0, 32, 1e-2, 0.1);
        assert!(matches!(s.initial_state(&sine(32, 1.0)), Err(Error::Config(_))));
        let mut cfg = SolverConfig::new(32, 1e-2, 0.1);
        cfg.amplitude_cap = None;
        let s = Solver::new(Formulation::EulerianU, *s.params(), cfg).unwrap();
        assert!(s.initial_state(&sine(32, 1.0)).is_ok());
    }

    #[test]
    fn tail_ratio_counts_top_eighth() {
        let w = SpectralFunction::from_fn(64, |x| (TWO_PI * x).cos() + (TWO_PI * 20.0 * x).cos()).unwrap();
        assert!((tail_ratio(&w, 21) - 0.5).abs() < 1e-14);
        assert!(tail_ratio(&w, 31) < 1e-28);
    }
}
