use crate::diffeo::{compose, invert, Diffeo, TangentVector};
use crate::error::{Error, Result};
use crate::spectral::SpectralFunction;

use super::model::ModelParams;

/// Relative tolerance on the mean of quantities that vanish identically.
pub const BRACKET_MEAN_RTOL: f64 = 1e-6;

/// Tolerance on the mean of a vorticity before `A⁻¹` is applied.
pub const OMEGA_MEAN_TOL: f64 = 1e-10;

/// Checks that `b` has (relatively) zero mean and removes the round-off residue.
fn project_mean(b: SpectralFunction, what: &str) -> Result<SpectralFunction> {
    let mean = b.mean();
    let scale = b.sup_norm().max(1.0);
    if !mean.is_finite() || mean.abs() > BRACKET_MEAN_RTOL * scale {
        return Err(Error::Integrity(format!(
            "{what} should have zero mean, got {mean:e} (sup {:e})",
            b.sup_norm()
        )));
    }
    Ok(b.add_constant(-mean))
}

/// `u_t = -A⁻¹[u (Au)_x + a (Au) u_x]`, returned in the chart.
pub fn eulerian_rhs(u: &SpectralFunction, p: &ModelParams, dealias: bool) -> Result<SpectralFunction> {
    let a_op = p.inertia().symbol();
    let au = a_op.apply(u)?;
    let ux = u.derivative();
    let transport = u.product(&au.derivative(), dealias)?;
    let stretch = au.product(&ux, dealias)?;
    let bracket = project_mean(transport.axpy(p.a(), &stretch), "u (Au)_x + a (Au) u_x")?;
    Ok(-&a_op.invert_to_chart(&bracket, f64::INFINITY)?)
}

/// `ω_t = -(u ω_x + a u_x ω)` with `u = A⁻¹ω` in the chart.
pub fn omega_rhs(omega: &SpectralFunction, p: &ModelParams, dealias: bool) -> Result<SpectralFunction> {
    let u = p.inertia().symbol().invert_to_chart(omega, OMEGA_MEAN_TOL)?;
    let transport = u.product(&omega.derivative(), dealias)?;
    let stretch = u.derivative().product(omega, dealias)?;
    let rhs = project_mean(transport.axpy(p.a(), &stretch), "u ω_x + a u_x ω")?;
    Ok(-&rhs)
}

/// Velocity of the generalized model: `u_x = Hω`, `u(0) = 0`.
pub fn generalized_velocity(omega: &SpectralFunction) -> Result<SpectralFunction> {
    omega.hilbert().antiderivative()
}

/// `ω_t = -α u ω_x + (Hω) ω` with `u_x = Hω`.
pub fn generalized_omega_rhs(omega: &SpectralFunction, alpha: f64, dealias: bool) -> Result<SpectralFunction> {
    let h_omega = omega.hilbert();
    let u = h_omega.antiderivative()?;
    let transport = u.product(&omega.derivative(), dealias)?;
    let stretch = h_omega.product(omega, dealias)?;
    project_mean(stretch.axpy(-alpha, &transport), "-α u ω_x + Hω ω")
}

/// Spray at the identity: `S(u) = A⁻¹{[A, u] u_x - a (Au) u_x}`.
pub fn spray_at_identity(u: &SpectralFunction, p: &ModelParams, dealias: bool) -> Result<SpectralFunction> {
    let a_op = p.inertia().symbol();
    let ux = u.derivative();
    let commutator = &a_op.apply(&u.product(&ux, dealias)?)? - &u.product(&a_op.apply(&ux)?, dealias)?;
    let stretch = a_op.apply(u)?.product(&ux, dealias)?;
    let bracket = project_mean(commutator.axpy(-p.a(), &stretch), "[A, u] u_x - a (Au) u_x")?;
    a_op.invert_to_chart(&bracket, f64::INFINITY)
}

/// Right-translated spray `S_φ(v) = S(v ∘ φ⁻¹) ∘ φ`.
pub fn spray(phi: &Diffeo, v: &TangentVector, p: &ModelParams, dealias: bool) -> Result<TangentVector> {
    let inv = invert(phi)?;
    spray_with_inverse(phi, &inv, v, p, dealias)
}

pub(crate) fn spray_with_inverse(
    phi: &Diffeo,
    phi_inv: &Diffeo,
    v: &TangentVector,
    p: &ModelParams,
    dealias: bool,
) -> Result<TangentVector> {
    let u = compose(v.function(), phi_inv)?;
    let s = spray_at_identity(&u, p, dealias)?;
    TangentVector::new(compose(&s, phi)?.to_chart())
}
