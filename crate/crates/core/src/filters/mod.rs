//! Recursive and FIR filtering: first-order exponential smoothing and its
//! derived trend / spread / deviation estimators, Butterworth design, and a
//! Morlet band filter.

pub mod butterworth;
pub mod morlet;

pub use butterworth::{
    butterworth_filter, ButterworthFilter, ButterworthSpec, FilterType, InitMode,
};
pub use morlet::{morlet_filter, MorletSpec};

use crate::error::{Error, Result};

fn check_smoothing(name: &str, a: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Parameter {
            name: name.into(),
            message: format!("smoothing factor {a} outside [0, 1)"),
        });
    }
    Ok(())
}

fn check_trend_params(a_fast: f64, a_slow: f64) -> Result<()> {
    check_smoothing("aFast", a_fast)?;
    check_smoothing("aSlow", a_slow)?;
    if a_slow <= a_fast {
        return Err(Error::Parameter {
            name: "aSlow".into(),
            message: format!("aSlow ({a_slow}) must be greater than aFast ({a_fast})"),
        });
    }
    Ok(())
}

/// First-order exponential smoothing:
/// y[1] = x[1], y[k+1] = a * y[k] + (1 - a) * x[k].
/// Toward 0: no smoothing; toward 1: strong smoothing.
pub fn iir_first_order(x: &[f64], a: f64) -> Result<Vec<f64>> {
    check_smoothing("a", a)?;
    if x.is_empty() {
        return Err(Error::EmptyData("smoothing of an empty vector".into()));
    }
    let mut out = Vec::with_capacity(x.len());
    out.push(x[0]);
    for k in 1..x.len() {
        out.push(a * out[k - 1] + (1.0 - a) * x[k - 1]);
    }
    Ok(out)
}

/// Difference of a fast and a slow smoother; positive while the signal rises.
pub fn trend_estimate(x: &[f64], a_fast: f64, a_slow: f64) -> Result<Vec<f64>> {
    check_trend_params(a_fast, a_slow)?;
    let fast = iir_first_order(x, a_fast)?;
    let slow = iir_first_order(x, a_slow)?;
    Ok(fast.iter().zip(slow.iter()).map(|(f, s)| f - s).collect())
}

/// Running spread estimate: the squared fast/slow residual is smoothed with
/// aSigma and square-rooted. v[1] = 0 (cold start).
pub fn std_estimate(x: &[f64], a_fast: f64, a_slow: f64, a_sigma: f64) -> Result<Vec<f64>> {
    check_trend_params(a_fast, a_slow)?;
    check_smoothing("aSigma", a_sigma)?;
    let fast = iir_first_order(x, a_fast)?;
    let slow = iir_first_order(x, a_slow)?;
    let mut out = Vec::with_capacity(x.len());
    let mut v = 0.0f64;
    out.push(0.0);
    for k in 1..x.len() {
        let d = fast[k - 1] - slow[k - 1];
        v = a_sigma * v + (1.0 - a_sigma) * d * d;
        out.push(v.sqrt());
    }
    Ok(out)
}

/// Normalized deviation of the signal from its own smoothed baseline, scaled
/// by the running spread (floored to stay finite).
pub fn individual_norm_deviation(
    x: &[f64],
    a_fast: f64,
    a_slow: f64,
    a_sigma: f64,
) -> Result<Vec<f64>> {
    let fast = iir_first_order(x, a_fast)?;
    let sigma = std_estimate(x, a_fast, a_slow, a_sigma)?;
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let rom = max - min;
    let eps = 1e-9 * if rom == 0.0 { 1.0 } else { rom };
    Ok((0..x.len())
        .map(|k| (x[k] - fast[k]) / sigma[k].max(eps))
        .collect())
}
