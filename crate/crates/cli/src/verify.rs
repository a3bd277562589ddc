use std::fmt::Write as _;
use std::str::FromStr;

use mclm_core::flows::{cross_validate, Formulation, Inertia, ModelParams, Solver, SolverConfig};
use mclm_core::multiplier::{abs_symbol, apply_p_n_spectrum, stripped_closed, stripped_recurrence, symbol_p_n};
use mclm_core::spectral::TWO_PI;
use mclm_core::{
    conjugate, conjugation_derivative, make_diffeo, Diffeo, MultiplierSymbol, SpectralFunction, Spectrum,
    TangentVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Symbols,
    Operators,
    Geodesic,
    All,
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbols" => Ok(Suite::Symbols),
            "operators" => Ok(Suite::Operators),
            "geodesic" => Ok(Suite::Geodesic),
            "all" => Ok(Suite::All),
            other => Err(HarnessError::Config(format!(
                "suite: unknown suite {other:?}; expected symbols, operators, geodesic or all"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &str, passed: bool, detail: String) -> Check {
    Check { suite, name: name.to_string(), passed, detail }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Symbols => symbols(),
        Suite::Operators => operators(seed),
        Suite::Geodesic => geodesic(),
        Suite::All => {
            let mut all = symbols();
            all.extend(operators(seed));
            all.extend(geodesic());
            all
        }
    }
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:<width$} {:<6} detail", "suite", "check", "result");
    for c in checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:<10} {:<width$} {:<6} {}", c.suite, c.name, verdict, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed);
    out
}

/// Visits every `(m_0, m_1, …, m_n)` with `|m_0| ≤ r` and `0 < |m_j| ≤ r`;
/// returns the number of tuples.
pub fn for_each_tuple<F: FnMut(&[i64])>(n: usize, r: i64, mut f: F) -> usize {
    fn fill<F: FnMut(&[i64])>(buf: &mut Vec<i64>, n: usize, r: i64, f: &mut F, count: &mut usize) {
        if buf.len() == n + 1 {
            f(buf);
            *count += 1;
            return;
        }
        for m in -r..=r {
            if m == 0 && !buf.is_empty() {
                continue;
            }
            buf.push(m);
            fill(buf, n, r, f, count);
            buf.pop();
        }
    }
    let mut count = 0;
    fill(&mut Vec::with_capacity(n + 1), n, r, &mut f, &mut count);
    count
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Checks `|q_n| ≤ n! |m_0| ∏|m_j|` on every tuple with `|m_j| ≤ r`.
/// Returns (violations, largest ratio, tuples).
pub fn lipschitz_scan(n: usize, r: i64) -> (usize, f64, usize) {
    let mut worst = 0.0_f64;
    let mut bad = 0usize;
    let count = for_each_tuple(n, r, |m| {
        let q = stripped_closed(n, m).expect("tuples avoid zeros");
        let bound = factorial(n) * m.iter().map(|&x| (x as i128).abs()).product::<i128>();
        if q.abs() > bound {
            bad += 1;
        }
        if bound > 0 {
            worst = worst.max(q.abs() as f64 / bound as f64);
        }
    });
    (bad, worst, count)
}

fn symbols() -> Vec<Check> {
    let mut out = Vec::new();
    for n in 1..=4 {
        let mut bad = 0usize;
        let count = for_each_tuple(n, 8, |m| {
            if stripped_closed(n, m).ok() != stripped_recurrence(abs_symbol, m).ok() {
                bad += 1;
            }
        });
        out.push(check(
            "symbols",
            &format!("p_{n} recurrence = closed form (|m| <= 8)"),
            bad == 0,
            format!("{count} tuples, {bad} mismatches"),
        ));
    }
    for n in 1..=4 {
        let r = if n == 4 { 10 } else { 16 };
        let (bad, worst, count) = lipschitz_scan(n, r);
        out.push(check(
            "symbols",
            &format!("|p_{n}| <= (2pi)^{n} {n}! |m_0| prod |m_j| (|m| <= {r})"),
            bad == 0,
            format!("{count} tuples, max ratio {worst:.4}"),
        ));
    }
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        let p = symbol_p_n(MultiplierSymbol::lambda(), n);
        for_each_tuple(n, 4, |m| {
            let q = stripped_closed(n, m).expect("tuples avoid zeros") as f64;
            let expect = mclm_core::multiplier::two_pi_i_pow(n) * q * TWO_PI;
            let got = p.eval(m).expect("tuples avoid zeros");
            // Cancellation in the recurrence scales with the size bound, not the value.
            let scale = TWO_PI.powi(n as i32 + 1) * m.iter().map(|&k| k.unsigned_abs() as f64).product::<f64>();
            worst = worst.max((got - expect).norm() / scale);
        });
    }
    out.push(check(
        "symbols",
        "float recurrence for 2pi|k| = 2pi (2pi i)^n q_n",
        worst <= 1e-12,
        format!("max err / bound scale {worst:.2e}"),
    ));
    out
}

/// Smooth random real function with modes `1..=modes` and decaying amplitudes.
pub fn random_trig(rng: &mut ChaCha8Rng, n: usize, modes: usize, scale: f64) -> SpectralFunction {
    let coeffs: Vec<(f64, f64)> = (0..modes)
        .map(|i| {
            let w = scale * 0.5f64.powi(i as i32);
            (w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0))
        })
        .collect();
    SpectralFunction::from_fn(n, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (c, s))| {
                let k = TWO_PI * (i + 1) as f64 * x;
                c * k.cos() + s * k.sin()
            })
            .sum()
    })
    .expect("grid size is valid")
}

/// Random diffeomorphism with `|f'| ≤ 0.25`.
pub fn random_diffeo(rng: &mut ChaCha8Rng, n: usize) -> Diffeo {
    make_diffeo(random_trig(rng, n, 3, 0.02).to_chart()).expect("small displacement is a diffeomorphism")
}

/// Observed order of the central difference of `φ ↦ Λ_φ(v)` against the
/// Gâteaux derivative at steps `1e-3` and `1e-4`.
pub fn gateaux_order(phi: &Diffeo, v: &SpectralFunction, dphi: &SpectralFunction) -> Result<f64, mclm_core::Error> {
    let a = MultiplierSymbol::lambda();
    let exact = conjugation_derivative(&a, phi, v, &TangentVector::new(dphi.clone())?)?;
    let err = |eps: f64| -> Result<f64, mclm_core::Error> {
        let plus = make_diffeo(phi.displacement().axpy(eps, dphi))?;
        let minus = make_diffeo(phi.displacement().axpy(-eps, dphi))?;
        let fd = (&conjugate(&a, &plus, v)? - &conjugate(&a, &minus, v)?).scale(0.5 / eps);
        Ok((&fd - &exact).sup_norm())
    };
    Ok((err(1e-3)? / err(1e-4)?).log10())
}

/// Largest relative deviation of `P_n(e_{m_1}, …) e_{m_0}` from
/// `p_n(m) e_{m_0+…+m_n}` over all tuples with `|m_j| ≤ r`.
pub fn eigenrelation_error(n: usize, r: i64, n_modes: usize) -> Result<f64, mclm_core::Error> {
    let p = MultiplierSymbol::lambda();
    let sym = symbol_p_n(p.clone(), n);
    let mut worst = 0.0_f64;
    let mut failure = None;
    for_each_tuple(n, r, |m| {
        if failure.is_some() {
            return;
        }
        match eigen_one(&p, &sym, m, n_modes) {
            Ok(e) => worst = worst.max(e),
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

fn eigen_one(
    p: &MultiplierSymbol,
    sym: &mclm_core::MultilinearSymbol,
    m: &[i64],
    n_modes: usize,
) -> Result<f64, mclm_core::Error> {
    let dirs: Vec<Spectrum> = m[1..].iter().map(|&k| Spectrum::exponential(n_modes, k)).collect::<Result<_, _>>()?;
    let v = Spectrum::exponential(n_modes, m[0])?;
    let got = apply_p_n_spectrum(p, &dirs, &v, true)?;
    let expect = sym.eval(m)?;
    let total: i64 = m.iter().sum();
    let scale = expect.norm().max(1.0);
    let mut err = (got.coeff(total) - expect).norm();
    for (i, c) in got.coeffs().iter().enumerate() {
        if mclm_core::spectral::wavenumber(i, n_modes) != total {
            err = err.max(c.norm());
        }
    }
    Ok(err / scale)
}

fn operators(seed: u64) -> Vec<Check> {
    let n = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let samples: Vec<SpectralFunction> = (0..20).map(|_| random_trig(&mut rng, n, 12, 1.0)).collect();

    let worst = samples
        .iter()
        .map(|u| {
            let u = u.mean_free();
            (&u.hilbert().hilbert() + &u).sup_norm()
        })
        .fold(0.0, f64::max);
    out.push(check("operators", "H^2 = -Id on mean-zero", worst <= 1e-12, format!("max err {worst:.2e}")));

    let worst = samples
        .iter()
        .map(|u| {
            let a = u.derivative().lambda_apply();
            (&a - &u.lambda_apply().derivative()).sup_norm() / a.sup_norm().max(1.0)
        })
        .fold(0.0, f64::max);
    out.push(check("operators", "[Lambda, D] = 0", worst <= 1e-10, format!("max rel err {worst:.2e}")));

    let worst = samples
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let j = (7 * i + 3) % n;
            let a = u.shifted(j).lambda_apply();
            (&a - &u.lambda_apply().shifted(j)).sup_norm() / a.sup_norm().max(1.0)
        })
        .fold(0.0, f64::max);
    out.push(check(
        "operators",
        "grid shifts commute with Lambda",
        worst <= 1e-12,
        format!("max rel err {worst:.2e}"),
    ));

    let worst = samples
        .iter()
        .map(|u| {
            let u = u.to_chart();
            let back = u.lambda_apply().lambda_invert().expect("Lambda u has mean zero");
            (&back - &u).sup_norm()
        })
        .fold(0.0, f64::max);
    out.push(check("operators", "Lambda^-1 Lambda = id on the chart", worst <= 1e-11, format!("max err {worst:.2e}")));

    for order in [1, 2] {
        match eigenrelation_error(order, 8, n) {
            Ok(e) => out.push(check(
                "operators",
                &format!("P_{order} on exponentials = p_{order}"),
                e <= 1e-9,
                format!("max rel err {e:.2e}"),
            )),
            Err(e) => out.push(check("operators", &format!("P_{order} on exponentials"), false, e.to_string())),
        }
    }

    let mut orders = Vec::new();
    let mut failure = None;
    for _ in 0..20 {
        let phi = random_diffeo(&mut rng, n);
        let v = random_trig(&mut rng, n, 4, 1.0);
        let dphi = random_trig(&mut rng, n, 4, 0.5).to_chart();
        match gateaux_order(&phi, &v, &dphi) {
            Ok(o) => orders.push(o),
            Err(e) => failure = Some(e.to_string()),
        }
    }
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    out.push(check(
        "operators",
        "Gateaux derivative vs central differences",
        failure.is_none() && min_order >= 1.9,
        failure.unwrap_or_else(|| format!("20 instances, min observed order {min_order:.3}")),
    ));
    out
}

fn geodesic() -> Vec<Check> {
    let n = 128;
    let mut out = Vec::new();
    let mut cfg = SolverConfig::new(n, 1e-3, 0.5);
    cfg.output_stride = 10;
    let single = SpectralFunction::from_fn(n, |x| 0.05 * (TWO_PI * x).sin()).expect("valid grid");
    let pair = SpectralFunction::from_fn(n, |x| 0.05 * (TWO_PI * x).sin() + 0.02 * (2.0 * TWO_PI * x).sin())
        .expect("valid grid");
    for a in [1.0, 2.0] {
        for (label, u0) in [("single mode", &single), ("two modes", &pair)] {
            let p = ModelParams::new(a, Inertia::Hd).expect("finite a");
            let name = format!("Eulerian = Lagrangian, a = {a}, {label}");
            match cross_validate(u0, &p, &cfg) {
                Ok(d) => out.push(check("geodesic", &name, d <= 1e-6, format!("max deviation {d:.2e}"))),
                Err(e) => out.push(check("geodesic", &name, false, e.to_string())),
            }
        }
    }
    let mut cfg = SolverConfig::new(n, 1e-3, 1.0);
    cfg.output_stride = 50;
    for f in [Formulation::EulerianU, Formulation::Lagrangian] {
        let name = format!("energy conservation at a = 2, {f:?}");
        let p = ModelParams::new(2.0, Inertia::Hd).expect("finite a");
        let result = Solver::new(f, p, cfg.clone()).and_then(|s| s.integrate(s.initial_state(&pair)?));
        match result {
            Ok(traj) => {
                let drift = |get: &dyn Fn(&mclm_core::flows::DiagnosticRow) -> f64| {
                    let e0 = get(&traj.rows[0]);
                    traj.rows.iter().map(|r| (get(r) - e0).abs() / e0).fold(0.0, f64::max)
                };
                let mut d = drift(&|r| r.h_half_sq);
                if f.is_lagrangian() {
                    d = d.max(drift(&|r| r.energy_lagrangian.unwrap_or(f64::NAN)));
                }
                out.push(check("geodesic", &name, d <= 1e-6, format!("max relative drift {d:.2e}")));
            }
            Err(e) => out.push(check("geodesic", &name, false, e.to_string())),
        }
    }
    out
}
