//! Sliding-window statistics, forgetting envelopes, and discrete derivatives.

use crate::error::{Error, Result};
use crate::sf::{basic_sf, BasicStatKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowStatKind {
    Max,
    Mean,
    Median,
    Min,
    Rom,
    /// Median over a window centered on the output sample.
    MedianAcausal,
}

/// Sliding statistic with windows truncated at the record boundary. All kinds
/// except `MedianAcausal` look back over the `window` most recent samples.
pub fn window_stat(x: &[f64], window: usize, kind: WindowStatKind) -> Result<Vec<f64>> {
    if window < 1 || window > x.len() {
        return Err(Error::Parameter {
            name: "window".into(),
            message: format!("length {window} outside [1, {}]", x.len()),
        });
    }
    let stat = |slice: &[f64]| -> Result<f64> {
        let kind = match kind {
            WindowStatKind::Max => BasicStatKind::Max,
            WindowStatKind::Mean => BasicStatKind::Mean,
            WindowStatKind::Median | WindowStatKind::MedianAcausal => BasicStatKind::Median,
            WindowStatKind::Min => BasicStatKind::Min,
            WindowStatKind::Rom => BasicStatKind::Rom,
        };
        basic_sf(slice, kind)
    };
    let mut out = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let (lo, hi) = if kind == WindowStatKind::MedianAcausal {
            let h = window / 2;
            (k.saturating_sub(h), (k + h).min(x.len() - 1))
        } else {
            (k.saturating_sub(window - 1), k)
        };
        out.push(stat(&x[lo..=hi])?);
    }
    Ok(out)
}

/// Peak-following envelope: y[1] = x[1] and
/// y[k] = max(x[k], lambda * y[k-1] + (1 - lambda) * x[k]) for a maximum
/// envelope (min for a minimum one).
pub fn forgetting_envelope(x: &[f64], lambda: f64, want_max: bool) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptyData("envelope of an empty vector".into()));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Parameter {
            name: "lambda".into(),
            message: format!("forgetting factor {lambda} outside [0, 1)"),
        });
    }
    let mut out = Vec::with_capacity(x.len());
    out.push(x[0]);
    for k in 1..x.len() {
        let faded = lambda * out[k - 1] + (1.0 - lambda) * x[k];
        out.push(if want_max {
            x[k].max(faded)
        } else {
            x[k].min(faded)
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    /// Central difference (x[k+1] - x[k-1]) / 2 with one-sided edges.
    Velocity,
    /// Backward difference x[k] - x[k-1] with the first value copied from
    /// the second.
    VelocityCausal,
    /// Central-difference velocity applied twice.
    Acceleration,
    /// Central-difference velocity applied three times.
    Jerk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    /// Differences per sample step.
    Samples,
    /// Each difference stage is scaled by the sample rate.
    PerSecond,
}

fn central_difference(x: &[f64], scale: f64) -> Vec<f64> {
    let k = x.len();
    let mut out = Vec::with_capacity(k);
    out.push(scale * (x[1] - x[0]));
    for i in 1..k - 1 {
        out.push(scale * (x[i + 1] - x[i - 1]) / 2.0);
    }
    out.push(scale * (x[k - 1] - x[k - 2]));
    out
}

pub fn derivative(
    x: &[f64],
    kind: DerivativeKind,
    unit: TimeUnit,
    sample_rate: f64,
) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::EmptyData(
            "derivative needs at least two samples".into(),
        ));
    }
    let scale = match unit {
        TimeUnit::Samples => 1.0,
        TimeUnit::PerSecond => sample_rate,
    };
    let passes = match kind {
        DerivativeKind::Velocity | DerivativeKind::VelocityCausal => 1,
        DerivativeKind::Acceleration => 2,
        DerivativeKind::Jerk => 3,
    };
    if kind == DerivativeKind::VelocityCausal {
        let mut out = Vec::with_capacity(x.len());
        out.push(scale * (x[1] - x[0]));
        for i in 1..x.len() {
            out.push(scale * (x[i] - x[i - 1]));
        }
        return Ok(out);
    }
    let mut out = central_difference(x, scale);
    for _ in 1..passes {
        out = central_difference(&out, scale);
    }
    Ok(out)
}
