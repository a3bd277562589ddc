#![allow(dead_code)]

use mclm_core::{Diffeo, SpectralFunction, make_diffeo};
use proptest::prelude::*;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Real trigonometric polynomial with modes `1..=coeffs.len()` and the given
/// (cos, sin) amplitudes.
pub fn trig(n: usize, coeffs: &[(f64, f64)]) -> SpectralFunction {
    SpectralFunction::from_fn(n, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (c, s))| {
                let k = (i + 1) as f64;
                c * (TWO_PI * k * x).cos() + s * (TWO_PI * k * x).sin()
            })
            .sum()
    })
    .unwrap()
}

/// Amplitudes with geometric decay so derivatives stay moderate.
pub fn smooth_coeffs(max_mode: usize, scale: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), max_mode).prop_map(move |v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (c, s))| {
                let w = scale * 0.5f64.powi(i as i32);
                (c * w, s * w)
            })
            .collect()
    })
}

pub fn smooth_function(n: usize, max_mode: usize, scale: f64) -> impl Strategy<Value = SpectralFunction> {
    smooth_coeffs(max_mode, scale).prop_map(move |c| trig(n, &c))
}

pub fn chart_function(n: usize, max_mode: usize, scale: f64) -> impl Strategy<Value = SpectralFunction> {
    smooth_function(n, max_mode, scale).prop_map(|f| f.to_chart())
}

/// Diffeomorphism with `sup|f'|` at most about 0.2.
pub fn small_diffeo(n: usize) -> impl Strategy<Value = Diffeo> {
    chart_function(n, 4, 0.01).prop_map(|f| make_diffeo(f).unwrap())
}
