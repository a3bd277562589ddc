//! Basepoint-fixing diffeomorphisms of the circle in the global chart
//! `φ = id + f`, with `f` periodic, `f(0) = 0` and `1 + f' > 0`.
//!
//! Composition `v ∘ φ` sums the Fourier series of `v` at the points `φ(x_j)`,
//! so it is exact for band-limited `v`. Inversion solves `y + f(y) = x_j` on
//! the monotone lift by Newton's method, falling back to bisection.

use crate::error::{Error, Result};
use crate::multiplier::MultiplierSymbol;
use crate::spectral::{grid_points, max_wavenumber, same_grid, SpectralFunction};

/// Tolerance on `|f(0)|` and `|w(0)|` in the chart.
pub const CHART_TOL: f64 = 1e-10;

/// `1 + f'` must exceed this on every grid point.
pub const ORIENTATION_MARGIN: f64 = 1e-8;

/// Residual accepted from [`invert`]: `max_j |φ(ψ(x_j)) - x_j|`.
pub const INVERSE_RESIDUAL_TOL: f64 = 1e-10;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 50;
const BISECTION_MAX_ITER: usize = 200;

/// An element `φ = id + f` of the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Diffeo {
    f: SpectralFunction,
    /// `φ(x_j) = x_j + f(x_j)`.
    points: Vec<f64>,
    /// `φ_x(x_j) = 1 + f'(x_j)`.
    jacobian: Vec<f64>,
}

/// Validates a displacement and wraps it as a diffeomorphism.
pub fn make_diffeo(f: SpectralFunction) -> Result<Diffeo> {
    let f0 = f.value_at_origin();
    if f0.abs() > CHART_TOL {
        return Err(Error::Chart(format!("displacement has f(0) = {f0:e}")));
    }
    let fx = f.derivative();
    let jacobian: Vec<f64> = fx.samples().iter().map(|d| 1.0 + d).collect();
    let (at, &min_jacobian) = jacobian
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    if !(min_jacobian > ORIENTATION_MARGIN) {
        return Err(Error::Orientation {
            min_jacobian,
            at: at as f64 / f.n_modes() as f64,
        });
    }
    let points = grid_points(f.n_modes())
        .iter()
        .zip(f.samples())
        .map(|(x, d)| x + d)
        .collect();
    Ok(Diffeo { f, points, jacobian })
}

impl Diffeo {
    pub fn identity(n: usize) -> Result<Self> {
        make_diffeo(SpectralFunction::zero(n)?)
    }

    pub fn n_modes(&self) -> usize {
        self.f.n_modes()
    }

    /// The displacement `f = φ - id`.
    pub fn displacement(&self) -> &SpectralFunction {
        &self.f
    }

    /// Grid images `φ(x_j)` (not reduced modulo 1).
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Samples of `φ_x = 1 + f'`.
    pub fn jacobian(&self) -> &[f64] {
        &self.jacobian
    }

    pub fn min_jacobian(&self) -> f64 {
        self.jacobian.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Evaluates `φ` at arbitrary points.
    pub fn eval(&self, xs: &[f64]) -> Vec<f64> {
        self.f.evaluate_at(xs).iter().zip(xs).map(|(d, x)| x + d).collect()
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &Diffeo) -> Result<Diffeo> {
        same_grid(self.n_modes(), other.n_modes())?;
        let f_at = self.f.evaluate_at(&other.points);
        let g = other.f.samples();
        let samples: Vec<f64> = f_at.iter().zip(g).map(|(a, b)| a + b).collect();
        // dropping the Nyquist mode moves the basepoint by a sub-resolution amount
        make_diffeo(SpectralFunction::analyze(&samples)?.to_chart())
    }
}

/// A tangent vector in the chart: `w(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    w: SpectralFunction,
}

impl TangentVector {
    /// Projects `|w(0)| ≤ 1e-10` onto `w(0) = 0`; rejects anything larger.
    pub fn new(w: SpectralFunction) -> Result<Self> {
        let w0 = w.value_at_origin();
        if w0.abs() > CHART_TOL {
            return Err(Error::Chart(format!("tangent vector has w(0) = {w0:e}")));
        }
        Ok(Self { w: w.to_chart() })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Ok(Self {
            w: SpectralFunction::zero(n)?,
        })
    }

    pub fn function(&self) -> &SpectralFunction {
        &self.w
    }

    pub fn into_function(self) -> SpectralFunction {
        self.w
    }
}

/// `v ∘ φ` on the grid.
pub fn compose(v: &SpectralFunction, phi: &Diffeo) -> Result<SpectralFunction> {
    same_grid(v.n_modes(), phi.n_modes())?;
    SpectralFunction::analyze(&v.evaluate_at(phi.points()))
}

/// `φ⁻¹`, returned in the chart.
pub fn invert(phi: &Diffeo) -> Result<Diffeo> {
    let n = phi.n_modes();
    let xs = grid_points(n);
    let f = phi.displacement();
    let fsup = f.sup_norm();
    let solve_point = |x: f64, guess: f64| -> Result<f64> {
        let residual = |y: f64| -> (f64, f64) {
            let (v, d) = f.evaluate_with_derivative(&[y]);
            (y + v[0] - x, 1.0 + d[0])
        };
        let mut y = guess;
        for _ in 0..NEWTON_MAX_ITER {
            let (g, dg) = residual(y);
            if !(dg > 0.0) || !g.is_finite() {
                break;
            }
            let step = g / dg;
            y -= step;
            if step.abs() <= NEWTON_TOL {
                return Ok(y);
            }
        }
        bisect(x, fsup, |y| residual(y).0)
    };
    let roots = xs
        .iter()
        .zip(f.samples())
        .map(|(&x, &fx)| solve_point(x, x - fx))
        .collect::<Result<Vec<f64>>>()?;

    let images = phi.eval(&roots);
    let worst = images
        .iter()
        .zip(&xs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if worst > INVERSE_RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "inverse residual {worst:e} exceeds {INVERSE_RESIDUAL_TOL:e} (min φ_x = {:e})",
            phi.min_jacobian()
        )));
    }
    let g: Vec<f64> = roots.iter().zip(&xs).map(|(y, x)| y - x).collect();
    make_diffeo(SpectralFunction::analyze(&g)?.to_chart())
}

fn bisect<F: Fn(f64) -> f64>(x: f64, fsup: f64, g: F) -> Result<f64> {
    let mut width = fsup + 1e-3;
    let (mut lo, mut hi) = (x - width, x + width);
    let mut tries = 0;
    while !(g(lo) <= 0.0 && g(hi) >= 0.0) {
        tries += 1;
        if tries > 20 {
            return Err(Error::Numerical(format!(
                "could not bracket the preimage of x = {x}: map is not monotone"
            )));
        }
        width *= 2.0;
        lo = x - width;
        hi = x + width;
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_real(a: &MultiplierSymbol, n: usize) -> Result<()> {
    if !a.preserves_reality(max_wavenumber(n)) {
        return Err(Error::Representation(format!(
            "symbol {} does not map real functions to real functions",
            a.name()
        )));
    }
    Ok(())
}

/// `A_φ(v) = (A(v ∘ φ⁻¹)) ∘ φ` given a precomputed inverse.
pub fn conjugate_with_inverse(
    a: &MultiplierSymbol,
    phi: &Diffeo,
    phi_inv: &Diffeo,
    v: &SpectralFunction,
) -> Result<SpectralFunction> {
    let w = compose(v, phi_inv)?;
    compose(&a.apply(&w)?, phi)
}

/// `A_φ(v) = R_φ A R_φ⁻¹ v`.
pub fn conjugate(a: &MultiplierSymbol, phi: &Diffeo, v: &SpectralFunction) -> Result<SpectralFunction> {
    check_real(a, phi.n_modes())?;
    let inv = invert(phi)?;
    conjugate_with_inverse(a, phi, &inv, v)
}

/// Gâteaux derivative `∂_φ A_φ(v)[δφ] = R_φ ([u, A] D) R_φ⁻¹ v` with `u = δφ ∘ φ⁻¹`.
pub fn conjugation_derivative(
    a: &MultiplierSymbol,
    phi: &Diffeo,
    v: &SpectralFunction,
    dphi: &TangentVector,
) -> Result<SpectralFunction> {
    check_real(a, phi.n_modes())?;
    let inv = invert(phi)?;
    let u = compose(dphi.function(), &inv)?;
    let wx = compose(v, &inv)?.derivative();
    let r = &u.product(&a.apply(&wx)?, false)? - &a.apply(&u.product(&wx, false)?)?;
    compose(&r, phi)
}

/// Right-invariant inner product `⟨η, ξ⟩_φ = ∫ η · A_φ ξ · φ_x dx`.
pub fn inner_product(
    phi: &Diffeo,
    eta: &TangentVector,
    xi: &TangentVector,
    a: &MultiplierSymbol,
) -> Result<f64> {
    let n = phi.n_modes();
    same_grid(n, eta.function().n_modes())?;
    same_grid(n, xi.function().n_modes())?;
    if !a.is_symmetric(max_wavenumber(n)) {
        return Err(Error::Domain(format!(
            "inner product needs a real even symbol, {} is not",
            a.name()
        )));
    }
    let a_xi = conjugate(a, phi, xi.function())?;
    let sum: f64 = eta
        .function()
        .samples()
        .iter()
        .zip(a_xi.samples())
        .zip(phi.jacobian())
        .map(|((e, x), j)| e * x * j)
        .sum();
    Ok(sum / n as f64)
}
