//! Fourier multipliers and the derivative operators of their conjugations.
//!
//! A Fourier multiplier `P` acts diagonally, `P e_k = p(k) e_k`. For a path of
//! diffeomorphisms the conjugation `P_φ = R_φ P R_φ⁻¹` has Gâteaux derivatives
//! `R_φ P_n(u_1, …, u_n) R_φ⁻¹`, where the multilinear operators obey
//!
//! ```text
//! P_0 = P
//! P_{n+1}(u_1, …, u_{n+1}) = [u_{n+1} D, P_n(u_1, …, u_n)]
//!                            - Σ_i P_n(u_1, …, u_{i,x} u_{n+1}, …, u_n)
//! ```
//!
//! On exponentials `P_n(e_{m_1}, …, e_{m_n}) e_{m_0} = p_n(m_0, …, m_n) e_{m_0+…+m_n}`
//! with the symbol recurrence
//!
//! ```text
//! p_{n+1}(m_0, …, m_{n+1}) = 2πi [ (m_0 + … + m_n) p_n(m_0, …, m_n)
//!                                  - Σ_{j=0..n} m_j p_n(m_0, …, m_j + m_{n+1}, …, m_n) ]
//! ```
//!
//! For `p_0(m) = |m|` the stripped symbols `q_n = p_n / (2πi)^n` are integers
//! and have the closed form
//! `q_n = m_0 Σ_{I ⊂ {1..n}} (-1)^{|I|} f_n(m_0 + Σ_{j∈I} m_j)` with
//! `f_n(t) = t^{n-1}|t|`. Both routes are provided in exact arithmetic.
//!
//! Physical operators use `Λ` with symbol `2π|k|`; the stripped integer
//! symbols use `|k|`. Since the recurrence is linear in `p_n`, the physical
//! symbols are `2π` times the normalized ones.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{max_wavenumber, same_grid, SpectralFunction, Spectrum, TWO_PI};

type SymbolFn = dyn Fn(i64) -> Complex64 + Send + Sync;

#[derive(Clone)]
enum SymbolKind {
    Identity,
    Hilbert,
    Derivative,
    /// `Λ = H∘D`, symbol `2π|k|`.
    Lambda,
    /// `|k|`, the normalized `Λ`.
    LambdaNormalized,
    /// `-D² = Λ²`, symbol `(2πk)²`.
    NegLaplacian,
    Custom(Arc<SymbolFn>),
}

/// A Fourier multiplier: symbol, declared order `s` and bound constant `C`
/// with `|p(m)| ≤ C |m|^s` for `m ≠ 0`.
#[derive(Clone)]
pub struct MultiplierSymbol {
    name: String,
    kind: SymbolKind,
    order: u32,
    bound_const: f64,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("bound_const", &self.bound_const)
            .finish()
    }
}

impl MultiplierSymbol {
    pub fn identity() -> Self {
        Self::shipped("identity", SymbolKind::Identity, 0, 1.0)
    }

    pub fn hilbert() -> Self {
        Self::shipped("hilbert", SymbolKind::Hilbert, 0, 1.0)
    }

    pub fn derivative() -> Self {
        Self::shipped("derivative", SymbolKind::Derivative, 1, TWO_PI)
    }

    /// `Λ = H∘D` in physical units, symbol `2π|k|`.
    pub fn lambda() -> Self {
        Self::shipped("lambda", SymbolKind::Lambda, 1, TWO_PI)
    }

    /// `Λ` with the normalized symbol `|k|`; its quadratic form is the `Ḣ^{1/2}` sum.
    pub fn lambda_normalized() -> Self {
        Self::shipped("lambda_normalized", SymbolKind::LambdaNormalized, 1, 1.0)
    }

    /// `-D²`, symbol `(2πk)²`.
    pub fn neg_laplacian() -> Self {
        Self::shipped("neg_laplacian", SymbolKind::NegLaplacian, 2, TWO_PI * TWO_PI)
    }

    /// A user-supplied symbol. The declared order and constant are checked by
    /// [`MultiplierSymbol::verify_order`], not here.
    pub fn custom<F>(name: &str, order: u32, bound_const: f64, eval: F) -> Result<Self>
    where
        F: Fn(i64) -> Complex64 + Send + Sync + 'static,
    {
        if !(bound_const > 0.0) {
            return Err(Error::Config(format!(
                "symbol {name}: bound constant must be positive, got {bound_const}"
            )));
        }
        Ok(Self::shipped(name, SymbolKind::Custom(Arc::new(eval)), order, bound_const))
    }

    fn shipped(name: &str, kind: SymbolKind, order: u32, bound_const: f64) -> Self {
        Self {
            name: name.to_string(),
            kind,
            order,
            bound_const,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bound_const(&self) -> f64 {
        self.bound_const
    }

    #[inline]
    pub fn eval(&self, k: i64) -> Complex64 {
        let kf = k as f64;
        match &self.kind {
            SymbolKind::Identity => Complex64::new(1.0, 0.0),
            SymbolKind::Hilbert => Complex64::new(0.0, -(k.signum() as f64)),
            SymbolKind::Derivative => Complex64::new(0.0, TWO_PI * kf),
            SymbolKind::Lambda => Complex64::new(TWO_PI * kf.abs(), 0.0),
            SymbolKind::LambdaNormalized => Complex64::new(kf.abs(), 0.0),
            SymbolKind::NegLaplacian => Complex64::new(TWO_PI * TWO_PI * kf * kf, 0.0),
            SymbolKind::Custom(f) => f(k),
        }
    }

    /// `eval(-k) = conj(eval(k))` for `|k| ≤ kmax`: the operator maps real
    /// functions to real functions.
    pub fn preserves_reality(&self, kmax: i64) -> bool {
        (0..=kmax).all(|k| (self.eval(-k) - self.eval(k).conj()).norm() <= 1e-12 * self.eval(k).norm().max(1.0))
    }

    /// Real and even symbol: the operator is `L²`-symmetric.
    pub fn is_symmetric(&self, kmax: i64) -> bool {
        (0..=kmax).all(|k| {
            let p = self.eval(k);
            let scale = p.norm().max(1.0);
            p.im.abs() <= 1e-12 * scale && (self.eval(-k) - p).norm() <= 1e-12 * scale
        })
    }

    /// Checks `|p(m)| ≤ C |m|^s` for `1 ≤ |m| ≤ kmax`.
    pub fn verify_order(&self, kmax: i64) -> bool {
        (1..=kmax).flat_map(|m| [m, -m]).all(|m| {
            self.eval(m).norm() <= self.bound_const * (m.abs() as f64).powi(self.order as i32) * (1.0 + 1e-12)
        })
    }

    /// Applies the multiplier to a complex spectrum.
    pub fn apply_spectrum(&self, u: &Spectrum) -> Spectrum {
        u.apply_symbol(|k| self.eval(k))
    }

    /// `(Pu)^(k) = p(k) û(k)` on a real function. Fails if the symbol would
    /// produce a non-real result.
    pub fn apply(&self, u: &SpectralFunction) -> Result<SpectralFunction> {
        if !self.preserves_reality(max_wavenumber(u.n_modes())) {
            return Err(Error::Representation(format!(
                "symbol {} does not map real functions to real functions",
                self.name
            )));
        }
        Ok(u.map_symbol(|k| self.eval(k)))
    }

    /// Solves `P u = m` on mean-zero `m` with the chart normalization `u(0) = 0`.
    /// Requires `p(k) ≠ 0` for `k ≠ 0` and `|m̂(0)| ≤ tol`.
    pub fn invert_to_chart(&self, m: &SpectralFunction, tol: f64) -> Result<SpectralFunction> {
        let mean = m.coeff(0).norm();
        if mean > tol {
            return Err(Error::Domain(format!(
                "{}: inverse needs a mean-zero input, got mean {mean:e}",
                self.name
            )));
        }
        let kmax = max_wavenumber(m.n_modes());
        if let Some(k) = (1..=kmax).flat_map(|k| [k, -k]).find(|&k| self.eval(k).norm() == 0.0) {
            return Err(Error::Domain(format!("{}: symbol vanishes at k = {k}", self.name)));
        }
        let u = m.map_symbol(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                1.0 / self.eval(k)
            }
        });
        Ok(u.to_chart())
    }
}

/// Free-function form of [`MultiplierSymbol::apply`].
pub fn apply_multiplier(p: &MultiplierSymbol, u: &SpectralFunction) -> Result<SpectralFunction> {
    p.apply(u)
}

#[derive(Clone)]
enum MultilinearKind {
    Base(MultiplierSymbol),
    Next(Arc<MultilinearSymbol>),
}

/// Symbol `p_n(m_0, …, m_n)` of the multilinear operator `P_n`, evaluated
/// lazily through the recurrence.
#[derive(Clone)]
pub struct MultilinearSymbol {
    arity: usize,
    kind: MultilinearKind,
}

impl fmt::Debug for MultilinearSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultilinearSymbol(n = {})", self.arity)
    }
}

impl MultilinearSymbol {
    /// `p_0 = p`.
    pub fn base(p: MultiplierSymbol) -> Self {
        Self {
            arity: 0,
            kind: MultilinearKind::Base(p),
        }
    }

    /// `n`: the symbol takes `n + 1` wavenumbers.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates at `(m_0, …, m_n)`; rejects `m_j = 0` for `j ≥ 1`.
    pub fn eval(&self, m: &[i64]) -> Result<Complex64> {
        if m.len() != self.arity + 1 {
            return Err(Error::Domain(format!(
                "symbol of arity {} expects {} wavenumbers, got {}",
                self.arity,
                self.arity + 1,
                m.len()
            )));
        }
        if let Some(j) = m.iter().skip(1).position(|&x| x == 0) {
            return Err(Error::Domain(format!("m_{} = 0: wavenumbers must be nonzero", j + 1)));
        }
        Ok(self.eval_unchecked(m))
    }

    // Inner calls shift wavenumbers and may legitimately hit zero.
    fn eval_unchecked(&self, m: &[i64]) -> Complex64 {
        match &self.kind {
            MultilinearKind::Base(p) => p.eval(m[0]),
            MultilinearKind::Next(prev) => {
                let n = prev.arity;
                let last = m[n + 1];
                let head = &m[..=n];
                let total: i64 = head.iter().sum();
                let mut acc = prev.eval_unchecked(head) * total as f64;
                let mut shifted = head.to_vec();
                for j in 0..=n {
                    shifted[j] += last;
                    acc -= prev.eval_unchecked(&shifted) * m[j] as f64;
                    shifted[j] -= last;
                }
                Complex64::new(0.0, TWO_PI) * acc
            }
        }
    }
}

/// One step of the symbol recurrence: `p_n ↦ p_{n+1}`.
pub fn symbol_p_next(p_n: &MultilinearSymbol) -> MultilinearSymbol {
    MultilinearSymbol {
        arity: p_n.arity + 1,
        kind: MultilinearKind::Next(Arc::new(p_n.clone())),
    }
}

/// Iterates [`symbol_p_next`] `n` times from `p_0 = p`.
pub fn symbol_p_n(p: MultiplierSymbol, n: usize) -> MultilinearSymbol {
    (0..n).fold(MultilinearSymbol::base(p), |acc, _| symbol_p_next(&acc))
}

fn check_tuple(n: usize, m: &[i64]) -> Result<()> {
    if m.len() != n + 1 {
        return Err(Error::Domain(format!(
            "arity {n} expects {} wavenumbers, got {}",
            n + 1,
            m.len()
        )));
    }
    if let Some(j) = m.iter().skip(1).position(|&x| x == 0) {
        return Err(Error::Domain(format!("m_{} = 0: wavenumbers must be nonzero", j + 1)));
    }
    Ok(())
}

/// `(2πi)^n`.
pub fn two_pi_i_pow(n: usize) -> Complex64 {
    Complex64::new(0.0, TWO_PI).powu(n as u32)
}

/// Closed form of `p_n` for `p_0(m) = |m|`, `n ≥ 1`.
pub fn symbol_p_closed(n: usize, m: &[i64]) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("closed form starts at n = 1; use p_0(m) = |m| directly".into()));
    }
    Ok(two_pi_i_pow(n) * stripped_closed(n, m)? as f64)
}

/// `f_n(t) = t^{n-1} |t|`.
#[inline]
pub fn f_n(n: usize, t: i128) -> i128 {
    t.pow(n as u32 - 1) * t.abs()
}

/// Integer part `q_n = p_n / (2πi)^n` of the closed form, for `p_0(m) = |m|`.
pub fn stripped_closed(n: usize, m: &[i64]) -> Result<i128> {
    if n == 0 {
        return Err(Error::Domain("closed form starts at n = 1".into()));
    }
    check_tuple(n, m)?;
    let m0 = m[0] as i128;
    let mut acc: i128 = 0;
    for subset in 0u32..(1u32 << n) {
        let mut t = m0;
        for (j, &mj) in m[1..].iter().enumerate() {
            if subset & (1 << j) != 0 {
                t += mj as i128;
            }
        }
        let term = f_n(n, t);
        if subset.count_ones() % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(m0 * acc)
}

/// Integer part `q_n` by the recurrence from an integer base symbol `q_0`.
pub fn stripped_recurrence(base: fn(i64) -> i128, m: &[i64]) -> Result<i128> {
    if m.is_empty() {
        return Err(Error::Domain("need at least one wavenumber".into()));
    }
    check_tuple(m.len() - 1, m)?;
    Ok(stripped_recurrence_unchecked(base, m))
}

fn stripped_recurrence_unchecked(base: fn(i64) -> i128, m: &[i64]) -> i128 {
    if m.len() == 1 {
        return base(m[0]);
    }
    let n = m.len() - 2;
    let last = m[n + 1];
    let head = &m[..=n];
    let total: i128 = head.iter().map(|&x| x as i128).sum();
    let mut acc = total * stripped_recurrence_unchecked(base, head);
    let mut shifted = head.to_vec();
    for j in 0..=n {
        shifted[j] += last;
        acc -= m[j] as i128 * stripped_recurrence_unchecked(base, &shifted);
        shifted[j] -= last;
    }
    acc
}

/// `q_0(m) = |m|`, the normalized symbol of `Λ`.
pub fn abs_symbol(m: i64) -> i128 {
    (m as i128).abs()
}

/// Applies `P_n(u_1, …, u_n)` to `v` on complex spectra by the operator
/// recurrence. Every product is taken with the 2/3 rule when `dealias` is set.
pub fn apply_p_n_spectrum(
    p: &MultiplierSymbol,
    directions: &[Spectrum],
    v: &Spectrum,
    dealias: bool,
) -> Result<Spectrum> {
    for d in directions {
        same_grid(v.n_modes(), d.n_modes())?;
    }
    p_n_recursive(p, directions, v, dealias)
}

fn p_n_recursive(p: &MultiplierSymbol, dirs: &[Spectrum], v: &Spectrum, dealias: bool) -> Result<Spectrum> {
    let Some((last, head)) = dirs.split_last() else {
        return Ok(p.apply_spectrum(v));
    };
    // [u D, P_{n-1}] v = u D(P_{n-1} v) - P_{n-1}(u D v)
    let inner = p_n_recursive(p, head, v, dealias)?;
    let mut out = last.product(&inner.derivative(), dealias)?;
    let u_dv = last.product(&v.derivative(), dealias)?;
    out = &out - &p_n_recursive(p, head, &u_dv, dealias)?;
    for i in 0..head.len() {
        let mut replaced = head.to_vec();
        replaced[i] = head[i].derivative().product(last, dealias)?;
        out = &out - &p_n_recursive(p, &replaced, v, dealias)?;
    }
    Ok(out)
}

/// Real-valued `P_n(u_1, …, u_n) v`.
pub fn apply_p_n(
    p: &MultiplierSymbol,
    directions: &[SpectralFunction],
    v: &SpectralFunction,
    dealias: bool,
) -> Result<SpectralFunction> {
    let dirs: Vec<Spectrum> = directions.iter().map(|d| d.spectrum().clone()).collect();
    let out = apply_p_n_spectrum(p, &dirs, v.spectrum(), dealias)?;
    SpectralFunction::from_spectrum(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn shipped_symbols_are_real_preserving_and_bounded() {
        for p in [
            MultiplierSymbol::identity(),
            MultiplierSymbol::hilbert(),
            MultiplierSymbol::derivative(),
            MultiplierSymbol::lambda(),
            MultiplierSymbol::lambda_normalized(),
            MultiplierSymbol::neg_laplacian(),
        ] {
            assert!(p.preserves_reality(256), "{}", p.name());
            assert!(p.verify_order(256), "{}", p.name());
        }
        assert!(MultiplierSymbol::lambda().is_symmetric(64));
        assert!(!MultiplierSymbol::hilbert().is_symmetric(64));
    }

    #[test]
    fn mis_declared_order_is_caught() {
        let p = MultiplierSymbol::custom("k^2 as order 1", 1, 1.0, |k| Complex64::new((k * k) as f64, 0.0))
            .unwrap();
        assert!(!p.verify_order(8));
        assert!(MultiplierSymbol::custom("bad", 0, 0.0, |_| Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn apply_multiplier_examples() {
        let n = 32;
        let cos = SpectralFunction::from_fn(n, |x| (TWO_PI * x).cos()).unwrap();
        let sin = SpectralFunction::from_fn(n, |x| (TWO_PI * x).sin()).unwrap();
        let h = apply_multiplier(&MultiplierSymbol::hilbert(), &cos).unwrap();
        assert!(h.max_abs_diff(&sin) < 1e-14);
        let id = apply_multiplier(&MultiplierSymbol::identity(), &cos).unwrap();
        assert!(id.max_abs_diff(&cos) < 1e-15);
        let l = apply_multiplier(&MultiplierSymbol::lambda(), &sin).unwrap();
        assert!(l.max_abs_diff(&sin.lambda_apply()) < 1e-14);
        assert!(l.max_abs_diff(&sin.scale(TWO_PI)) < 1e-13);
    }

    #[test]
    fn non_real_symbol_is_rejected_on_real_data() {
        let p = MultiplierSymbol::custom("shift-ish", 0, 1.0, |_| Complex64::new(0.0, 1.0)).unwrap();
        let cos = SpectralFunction::from_fn(16, |x| (TWO_PI * x).cos()).unwrap();
        assert!(matches!(p.apply(&cos), Err(Error::Representation(_))));
    }

    #[test]
    fn recurrence_examples() {
        let p1 = symbol_p_n(MultiplierSymbol::lambda_normalized(), 1);
        let v = p1.eval(&[1, 1]).unwrap();
        assert!((v - Complex64::new(0.0, -TWO_PI)).norm() < 1e-12);
        let v = p1.eval(&[2, -1]).unwrap();
        assert!((v - Complex64::new(0.0, 4.0 * PI)).norm() < 1e-12);
        let p2 = symbol_p_next(&p1);
        let v = p2.eval(&[1, 1, 1]).unwrap();
        assert!((v - Complex64::new(-8.0 * PI * PI, 0.0)).norm() < 1e-10);
        assert!(matches!(p2.eval(&[1, 0, 1]), Err(Error::Domain(_))));
        assert!(matches!(p2.eval(&[1, 1]), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_examples() {
        let v = symbol_p_closed(1, &[1, 1]).unwrap();
        assert!((v - Complex64::new(0.0, -TWO_PI)).norm() < 1e-12);
        assert_eq!(stripped_closed(1, &[3, -6]).unwrap(), 0);
        assert_eq!(symbol_p_closed(1, &[3, -6]).unwrap().norm(), 0.0);
        let v = symbol_p_closed(2, &[1, 1, 1]).unwrap();
        assert!((v - Complex64::new(-8.0 * PI * PI, 0.0)).norm() < 1e-10);
        assert!(symbol_p_closed(0, &[3]).is_err());
        assert!(stripped_closed(2, &[1, 2, 0]).is_err());
    }

    #[test]
    fn stripped_routes_agree_on_small_box() {
        let vals: Vec<i64> = (-4..=4).filter(|&x| x != 0).collect();
        for n in 1..=3usize {
            let mut idx = vec![0usize; n];
            for m0 in -4..=4i64 {
                loop {
                    let mut m = vec![m0];
                    m.extend(idx.iter().map(|&i| vals[i]));
                    assert_eq!(
                        stripped_recurrence(abs_symbol, &m).unwrap(),
                        stripped_closed(n, &m).unwrap(),
                        "{m:?}"
                    );
                    let mut carry = true;
                    for d in idx.iter_mut() {
                        if carry {
                            *d += 1;
                            carry = *d == vals.len();
                            if carry {
                                *d = 0;
                            }
                        }
                    }
                    if carry {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn float_recurrence_matches_integer_recurrence() {
        let p3 = symbol_p_n(MultiplierSymbol::lambda_normalized(), 3);
        let m = [3, -2, 5, 1];
        let exact = stripped_recurrence(abs_symbol, &m).unwrap() as f64;
        let got = p3.eval(&m).unwrap() / two_pi_i_pow(3);
        assert!((got - Complex64::new(exact, 0.0)).norm() < 1e-9 * exact.abs().max(1.0));
    }

    #[test]
    fn p_0_is_the_multiplier() {
        let n = 32;
        let v = SpectralFunction::from_fn(n, |x| (TWO_PI * x).sin() + (3.0 * TWO_PI * x).cos()).unwrap();
        let got = apply_p_n(&MultiplierSymbol::lambda(), &[], &v, true).unwrap();
        assert!(got.max_abs_diff(&v.lambda_apply()) < 1e-13);
    }

    #[test]
    fn p_1_on_exponentials() {
        let n = 64;
        let e1 = Spectrum::exponential(n, 1).unwrap();
        let out = apply_p_n_spectrum(&MultiplierSymbol::lambda(), &[e1.clone()], &e1, true).unwrap();
        let want = Spectrum::exponential(n, 2)
            .unwrap()
            .scale(Complex64::new(0.0, -4.0 * PI * PI));
        assert!((&out - &want).max_coeff() < 1e-11);
    }

    #[test]
    fn p_1_is_commutator_with_multiplication() {
        // P_1(u) = [u, P] D for a multiplier P
        let n = 64;
        let u = SpectralFunction::from_fn(n, |x| 0.3 * (TWO_PI * x).sin() + 0.1 * (2.0 * TWO_PI * x).cos())
            .unwrap();
        let v = SpectralFunction::from_fn(n, |x| (3.0 * TWO_PI * x).cos()).unwrap();
        let lam = MultiplierSymbol::lambda();
        let got = apply_p_n(&lam, &[u.clone()], &v, true).unwrap();
        let vx = v.derivative();
        let want = &u.product(&lam.apply(&vx).unwrap(), true).unwrap()
            - &lam.apply(&u.product(&vx, true).unwrap()).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn p_2_on_exponentials() {
        let n = 64;
        let e1 = Spectrum::exponential(n, 1).unwrap();
        let out =
            apply_p_n_spectrum(&MultiplierSymbol::lambda(), &[e1.clone(), e1.clone()], &e1, true).unwrap();
        let want = Spectrum::exponential(n, 3)
            .unwrap()
            .scale(Complex64::new(-16.0 * PI * PI * PI, 0.0));
        assert!((&out - &want).max_coeff() < 1e-9);
    }

    #[test]
    fn p_2_matches_expanded_commutator_form() {
        // P_2(u1,u2) = [u1,[u2,P]]D² + [u1,P][u2,D]D + [u2,P][u1,D]D
        let n = 128;
        let u1 = SpectralFunction::from_fn(n, |x| 0.2 * (TWO_PI * x).sin()).unwrap();
        let u2 = SpectralFunction::from_fn(n, |x| 0.1 * (2.0 * TWO_PI * x).cos() + 0.05 * (TWO_PI * x).sin())
            .unwrap();
        let v = SpectralFunction::from_fn(n, |x| (3.0 * TWO_PI * x).sin()).unwrap();
        let lam = MultiplierSymbol::lambda();
        let p = |f: &SpectralFunction| lam.apply(f).unwrap();
        let mul = |a: &SpectralFunction, b: &SpectralFunction| a.product(b, false).unwrap();
        let comm_p = |u: &SpectralFunction, w: &SpectralFunction| &mul(u, &p(w)) - &p(&mul(u, w));

        let vxx = v.derivative().derivative();
        // [u1,[u2,P]] w = u1 [u2,P] w - [u2,P](u1 w)
        let t1 = &mul(&u1, &comm_p(&u2, &vxx)) - &comm_p(&u2, &mul(&u1, &vxx));
        // [u2, D] w = -u2_x w
        let vx = v.derivative();
        let t2 = comm_p(&u1, &mul(&u2.derivative(), &vx)).scale(-1.0);
        let t3 = comm_p(&u2, &mul(&u1.derivative(), &vx)).scale(-1.0);
        let want = &(&t1 + &t2) + &t3;
        let got = apply_p_n(&lam, &[u1, u2], &v, false).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-9 * want.sup_norm().max(1.0));
    }
}
