//! Periodic functions on the unit circle ℝ/ℤ held on a uniform grid.
//!
//! Two layers live here:
//!
//! * [`Spectrum`]: complex Fourier coefficients on an `N`-point grid, with no
//!   realness assumption. The multilinear operator calculus needs complex
//!   exponentials `e_k(x) = exp(2πikx)` as inputs, so this type is public.
//! * [`SpectralFunction`]: a real function carrying both its grid samples and
//!   its (Hermitian) coefficients, kept consistent at construction.
//!
//! Coefficient convention: `û(k) = (1/N) Σ_j u(x_j) exp(-2πik x_j)` with
//! `x_j = j/N`, which agrees with `∫ u e_{-k} dx` for band-limited `u`. Only
//! `k ∈ {-N/2+1, …, N/2-1}` is carried; the Nyquist coefficient is always zero.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Absolute tolerance on `|m̂(0)|` below which an input counts as mean-zero.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-12;

/// Powers of `exp(2πiy)` are reseeded this often during point evaluation.
const RESEED_EVERY: usize = 32;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
}

/// Accepts even grid sizes `N ≥ 8`.
pub fn check_grid(n: usize) -> Result<()> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::Config(format!(
            "grid size must be even and at least 8, got {n}"
        )));
    }
    Ok(())
}

/// Wavenumber carried by storage slot `i` (FFT ordering). Slot `N/2` is the
/// (always zero) Nyquist slot and reports `N/2`.
#[inline]
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Storage slot of wavenumber `k`, if `|k| < N/2`.
#[inline]
pub fn slot(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k.abs() >= half {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + n as i64) as usize)
    }
}

/// Largest wavenumber kept by the 2/3 rule: products of two functions
/// supported in `|k| ≤ K` alias only into `|k| > K` when `3K < N`.
#[inline]
pub fn dealias_cutoff(n: usize) -> i64 {
    (n as i64 - 1) / 3
}

/// Largest wavenumber representable on the grid.
#[inline]
pub fn max_wavenumber(n: usize) -> i64 {
    (n / 2) as i64 - 1
}

/// Grid abscissae `x_j = j/N`.
pub fn grid_points(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

/// Complex Fourier coefficients on an `N`-point grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(n: usize) -> Result<Self> {
        check_grid(n)?;
        Ok(Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    /// Analyzes complex grid samples; the Nyquist coefficient is dropped.
    pub fn from_samples(samples: &[Complex64]) -> Result<Self> {
        let n = samples.len();
        check_grid(n)?;
        let mut buf = samples.to_vec();
        fft_forward(&mut buf);
        let scale = 1.0 / n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
        buf[n / 2] = Complex64::new(0.0, 0.0);
        Ok(Self { coeffs: buf })
    }

    /// Builds a spectrum from `(k, coefficient)` pairs; repeated `k` accumulate.
    pub fn from_modes(n: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        for &(k, c) in modes {
            let i = slot(k, n).ok_or_else(|| {
                Error::Domain(format!("wavenumber {k} not representable on {n} points"))
            })?;
            s.coeffs[i] += c;
        }
        Ok(s)
    }

    /// The exponential `e_k(x) = exp(2πikx)`.
    pub fn exponential(n: usize, k: i64) -> Result<Self> {
        Self::from_modes(n, &[(k, Complex64::new(1.0, 0.0))])
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of wavenumber `k` (zero when not carried).
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        match slot(k, self.n_modes()) {
            Some(i) => self.coeffs[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Raw coefficients in FFT ordering.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn to_samples(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        fft_inverse(&mut buf);
        buf
    }

    /// Diagonal action `û(k) ↦ p(k) û(k)`.
    pub fn apply_symbol<F: Fn(i64) -> Complex64>(&self, p: F) -> Self {
        let n = self.n_modes();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if i == n / 2 || c == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    p(wavenumber(i, n)) * c
                }
            })
            .collect();
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        self.apply_symbol(|k| Complex64::new(0.0, TWO_PI * k as f64))
    }

    /// Zeroes every mode with `|k| > kmax`.
    pub fn truncated(&self, kmax: i64) -> Self {
        let n = self.n_modes();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if wavenumber(i, n).abs() > kmax {
                    Complex64::new(0.0, 0.0)
                } else {
                    c
                }
            })
            .collect();
        Self { coeffs }
    }

    /// Pointwise product. With `dealias`, both factors and the result are
    /// restricted to `|k| ≤ dealias_cutoff(N)`, which makes the retained
    /// modes of the product exact.
    pub fn product(&self, other: &Self, dealias: bool) -> Result<Self> {
        same_grid(self.n_modes(), other.n_modes())?;
        let n = self.n_modes();
        let (a, b) = if dealias {
            let k = dealias_cutoff(n);
            (self.truncated(k).to_samples(), other.truncated(k).to_samples())
        } else {
            (self.to_samples(), other.to_samples())
        };
        let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let s = Self::from_samples(&prod)?;
        Ok(if dealias {
            s.truncated(dealias_cutoff(n))
        } else {
            s
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Max-norm over grid samples.
    pub fn sup_norm(&self) -> f64 {
        self.to_samples().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sums the Fourier series at an arbitrary point.
    pub fn eval_at(&self, x: f64) -> Complex64 {
        let n = self.n_modes();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != n / 2)
            .map(|(i, &c)| c * Complex64::from_polar(1.0, TWO_PI * wavenumber(i, n) as f64 * x))
            .sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.n_modes();
        let scale = self.max_coeff().max(1.0);
        let kmax = max_wavenumber(n);
        (0..=kmax).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol * scale)
    }

    fn add_scaled(&self, other: &Self, s: f64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * s)
                .collect(),
        }
    }
}

impl Add for &Spectrum {
    type Output = Spectrum;
    fn add(self, rhs: &Spectrum) -> Spectrum {
        assert_eq!(self.n_modes(), rhs.n_modes(), "grid mismatch in Spectrum addition");
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &Spectrum {
    type Output = Spectrum;
    fn sub(self, rhs: &Spectrum) -> Spectrum {
        assert_eq!(self.n_modes(), rhs.n_modes(), "grid mismatch in Spectrum subtraction");
        self.add_scaled(rhs, -1.0)
    }
}

pub(crate) fn same_grid(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::GridMismatch { left, right });
    }
    Ok(())
}

/// Index of a Sobolev norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SobolevIndex {
    /// Inhomogeneous `H^k` with weight `(1 + j²)^k` on the integer wavenumber `j`.
    Integer(u32),
    /// Homogeneous `Ḣ^{1/2}` with weight `|j|`.
    HomogeneousHalf,
}

/// A real periodic function on ℝ/ℤ: grid samples plus Hermitian coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    samples: Vec<f64>,
    spectrum: Spectrum,
}

/// Forward transform of real samples. Requires `N` even, `N ≥ 8`.
pub fn analyze(samples: &[f64]) -> Result<SpectralFunction> {
    SpectralFunction::analyze(samples)
}

/// Inverse transform; rejects coefficient sets without Hermitian symmetry.
pub fn synthesize(spectrum: &Spectrum) -> Result<Vec<f64>> {
    Ok(SpectralFunction::from_spectrum(spectrum.clone())?.samples)
}

impl SpectralFunction {
    pub fn analyze(samples: &[f64]) -> Result<Self> {
        check_grid(samples.len())?;
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Representation(format!("non-finite sample at index {j}")));
        }
        let buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(Self::from_hermitian(Spectrum::from_samples(&buf)?))
    }

    /// Samples `f` on the grid and analyzes the result.
    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self> {
        check_grid(n)?;
        let samples: Vec<f64> = grid_points(n).into_iter().map(f).collect();
        Self::analyze(&samples)
    }

    /// Validates Hermitian symmetry, then synthesizes real samples.
    pub fn from_spectrum(spectrum: Spectrum) -> Result<Self> {
        if !spectrum.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Representation(
                "coefficients are not Hermitian symmetric; the function would not be real".into(),
            ));
        }
        Ok(Self::from_hermitian(spectrum))
    }

    /// Symmetrizes and synthesizes. Callers guarantee near-Hermitian input.
    pub(crate) fn from_hermitian(spectrum: Spectrum) -> Self {
        let n = spectrum.n_modes();
        let mut coeffs = spectrum.coeffs;
        coeffs[0] = Complex64::new(coeffs[0].re, 0.0);
        coeffs[n / 2] = Complex64::new(0.0, 0.0);
        for i in 1..n / 2 {
            let avg = 0.5 * (coeffs[i] + coeffs[n - i].conj());
            coeffs[i] = avg;
            coeffs[n - i] = avg.conj();
        }
        let spectrum = Spectrum { coeffs };
        let samples = spectrum.to_samples().into_iter().map(|z| z.re).collect();
        Self { samples, spectrum }
    }

    pub fn zero(n: usize) -> Result<Self> {
        Ok(Self::from_hermitian(Spectrum::zeros(n)?))
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_spectrum(Spectrum::from_modes(n, &[(0, Complex64::new(c, 0.0))])?)
    }

    pub fn n_modes(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn synthesize(&self) -> Vec<f64> {
        self.samples.clone()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.spectrum.coeff(k)
    }

    pub fn mean(&self) -> f64 {
        self.spectrum.coeff(0).re
    }

    /// Value at the basepoint `x = 0` (exact grid sample).
    pub fn value_at_origin(&self) -> f64 {
        self.samples[0]
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Applies a symbol that maps real functions to real functions.
    pub(crate) fn map_symbol<F: Fn(i64) -> Complex64>(&self, p: F) -> Self {
        Self::from_hermitian(self.spectrum.apply_symbol(p))
    }

    /// `(Hu)^(k) = -i sgn(k) û(k)` with `sgn(0) = 0`.
    pub fn hilbert(&self) -> Self {
        self.map_symbol(hilbert_symbol)
    }

    /// `(Du)^(k) = 2πik û(k)`.
    pub fn derivative(&self) -> Self {
        self.map_symbol(|k| Complex64::new(0.0, TWO_PI * k as f64))
    }

    /// `Λ = H∘D`, symbol `2π|k|`.
    pub fn lambda_apply(&self) -> Self {
        self.map_symbol(|k| Complex64::new(TWO_PI * k.abs() as f64, 0.0))
    }

    /// Returns `u` with `Du = m` and `u(0) = 0`. Requires `|m̂(0)| ≤ 1e-12`.
    pub fn antiderivative(&self) -> Result<Self> {
        self.require_mean_zero("antiderivative")?;
        let u = self.map_symbol(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / (TWO_PI * k as f64))
            }
        });
        Ok(u.to_chart())
    }

    /// Returns `u` with `Λu = m` and `u(0) = 0`. Requires `|m̂(0)| ≤ 1e-12`.
    pub fn lambda_invert(&self) -> Result<Self> {
        self.require_mean_zero("lambda_invert")?;
        let u = self.map_symbol(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 / (TWO_PI * k.abs() as f64), 0.0)
            }
        });
        Ok(u.to_chart())
    }

    /// `Σ_k |k| |û(k)|²`.
    pub fn h_half_norm_sq(&self) -> f64 {
        self.sobolev_norm_sq(SobolevIndex::HomogeneousHalf)
    }

    pub fn sobolev_norm_sq(&self, index: SobolevIndex) -> f64 {
        let n = self.n_modes();
        let weight = |k: i64| -> f64 {
            match index {
                SobolevIndex::Integer(s) => (1.0 + (k * k) as f64).powi(s as i32),
                SobolevIndex::HomogeneousHalf => k.abs() as f64,
            }
        };
        (-max_wavenumber(n)..=max_wavenumber(n))
            .map(|k| weight(k) * self.coeff(k).norm_sqr())
            .sum()
    }

    /// Pointwise product; see [`Spectrum::product`] for the dealiased variant.
    pub fn product(&self, other: &Self, dealias: bool) -> Result<Self> {
        same_grid(self.n_modes(), other.n_modes())?;
        if !dealias {
            let prod: Vec<f64> = self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect();
            return Self::analyze(&prod);
        }
        Ok(Self::from_hermitian(self.spectrum.product(&other.spectrum, true)?))
    }

    pub fn truncated(&self, kmax: i64) -> Self {
        Self::from_hermitian(self.spectrum.truncated(kmax))
    }

    /// Cyclic shift: `(S u)(x_i) = u(x_{i+j})`, i.e. translation by `j/N`.
    pub fn shifted(&self, j: usize) -> Self {
        let n = self.n_modes();
        let samples: Vec<f64> = (0..n).map(|i| self.samples[(i + j) % n]).collect();
        let spectrum = self
            .spectrum
            .apply_symbol(|k| Complex64::from_polar(1.0, TWO_PI * k as f64 * j as f64 / n as f64));
        Self { samples, spectrum }
    }

    /// Subtracts the value at the basepoint so that `u(0) = 0`.
    pub fn to_chart(&self) -> Self {
        self.add_constant(-self.samples[0])
    }

    /// Subtracts the mean.
    pub fn mean_free(&self) -> Self {
        self.add_constant(-self.mean())
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut coeffs = self.spectrum.coeffs.clone();
        coeffs[0] += c;
        Self {
            samples: self.samples.iter().map(|v| v + c).collect(),
            spectrum: Spectrum { coeffs },
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * s).collect(),
            spectrum: self.spectrum.scale(Complex64::new(s, 0.0)),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.n_modes(), other.n_modes(), "grid mismatch in axpy");
        Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + s * b)
                .collect(),
            spectrum: self.spectrum.add_scaled(&other.spectrum, s),
        }
    }

    /// Trapezoidal quadrature of `∫ u dx` (equals the mean coefficient).
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n_modes() as f64
    }

    /// Sums the Fourier series at arbitrary points.
    pub fn evaluate_at(&self, points: &[f64]) -> Vec<f64> {
        self.evaluate_series(points, false).0
    }

    /// Values and first derivatives of the Fourier series at arbitrary points.
    pub fn evaluate_with_derivative(&self, points: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (v, d) = self.evaluate_series(points, true);
        (v, d.expect("derivative requested"))
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.evaluate_at(&[x])[0]
    }

    fn evaluate_series(&self, points: &[f64], with_derivative: bool) -> (Vec<f64>, Option<Vec<f64>>) {
        let kmax = max_wavenumber(self.n_modes());
        let c0 = self.coeff(0).re;
        let positive: Vec<Complex64> = (1..=kmax).map(|k| self.coeff(k)).collect();
        let mut values = Vec::with_capacity(points.len());
        let mut derivs = with_derivative.then(|| Vec::with_capacity(points.len()));
        for &y in points {
            let z = Complex64::from_polar(1.0, TWO_PI * y);
            let mut zk = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut dacc = Complex64::new(0.0, 0.0);
            for (idx, &c) in positive.iter().enumerate() {
                let k = idx + 1;
                if k % RESEED_EVERY == 0 {
                    zk = Complex64::from_polar(1.0, TWO_PI * k as f64 * y);
                } else {
                    zk *= z;
                }
                let term = c * zk;
                acc += term;
                if with_derivative {
                    dacc += term * k as f64;
                }
            }
            values.push(c0 + 2.0 * acc.re);
            if let Some(d) = derivs.as_mut() {
                // d/dx of 2 Re(c e^{2πikx}) = 2 Re(2πik c e^{2πikx}) = -4π k Im(c e^{2πikx})
                d.push(-2.0 * TWO_PI * dacc.im);
            }
        }
        (values, derivs)
    }

    fn require_mean_zero(&self, op: &str) -> Result<()> {
        let m = self.coeff(0).norm();
        if m > MEAN_ZERO_TOL {
            return Err(Error::Domain(format!(
                "{op}: input has mean {m:e}, not in the image of the operator (mean-zero functions)"
            )));
        }
        Ok(())
    }
}

impl Add for &SpectralFunction {
    type Output = SpectralFunction;
    fn add(self, rhs: &SpectralFunction) -> SpectralFunction {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralFunction {
    type Output = SpectralFunction;
    fn sub(self, rhs: &SpectralFunction) -> SpectralFunction {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &SpectralFunction {
    type Output = SpectralFunction;
    fn neg(self) -> SpectralFunction {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &SpectralFunction {
    type Output = SpectralFunction;
    fn mul(self, s: f64) -> SpectralFunction {
        self.scale(s)
    }
}

/// Symbol of the Hilbert transform, `-i sgn(k)`.
#[inline]
pub fn hilbert_symbol(k: i64) -> Complex64 {
    Complex64::new(0.0, -(k.signum() as f64))
}
