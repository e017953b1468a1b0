//! Band filtering by convolution with a real Morlet-shaped kernel.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ratio between the oscillation described by the eigenfrequency and the
/// Gaussian envelope width.
const SHAPE_FACTOR: f64 = 5.0;

/// Envelope values below this fraction of the peak are truncated away.
const TRUNCATION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorletSpec {
    /// Center of the undamped frequency region, in the unit of the sample
    /// rate.
    pub center_freq: f64,
    /// Eigenfrequency of the wavelet; controls the width of the region.
    pub eigen_freq: f64,
    /// Causal kernels only look at past samples.
    pub causal: bool,
}

/// Discretized kernel plus the sample lag of its first weight.
#[derive(Debug, Clone)]
pub struct MorletKernel {
    weights: Vec<f64>,
    min_lag: i64,
}

impl MorletKernel {
    pub fn design(spec: &MorletSpec, sample_rate: f64) -> Result<Self> {
        let nyquist = sample_rate / 2.0;
        if !(spec.center_freq > 0.0 && spec.center_freq < nyquist) {
            return Err(Error::Parameter {
                name: "center_freq".into(),
                message: format!(
                    "center frequency {} outside (0, {nyquist})",
                    spec.center_freq
                ),
            });
        }
        if spec.eigen_freq <= 0.0 {
            return Err(Error::Parameter {
                name: "eigen_freq".into(),
                message: format!("eigenfrequency {} must be positive", spec.eigen_freq),
            });
        }
        let dt = 1.0 / sample_rate;
        let width = 2.0 * PI * spec.eigen_freq * dt / SHAPE_FACTOR;
        // Largest lag whose envelope still reaches the truncation threshold.
        let reach = (-2.0 * TRUNCATION.ln()).sqrt() / width;
        let half = reach.floor() as i64;
        let min_lag = if spec.causal { 0 } else { -half };
        let mut weights: Vec<f64> = (min_lag..=half)
            .map(|n| {
                let t = n as f64;
                (-0.5 * (t * width) * (t * width)).exp() * (2.0 * PI * spec.center_freq * t * dt).cos()
            })
            .collect();
        let mean = weights.iter().sum::<f64>() / weights.len() as f64;
        for w in &mut weights {
            *w -= mean;
        }
        // Unit gain for a cosine at the center frequency.
        let omega = 2.0 * PI * spec.center_freq * dt;
        let gain = weights
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, &w)| {
                let lag = (min_lag + i as i64) as f64;
                acc + w * Complex64::from_polar(1.0, -omega * lag)
            })
            .norm();
        if gain < 1e-12 {
            return Err(Error::Parameter {
                name: "center_freq".into(),
                message: "kernel has no gain at the center frequency".into(),
            });
        }
        for w in &mut weights {
            *w /= gain;
        }
        Ok(MorletKernel { weights, min_lag })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Convolution with edge replication beyond the record boundary.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.len() > x.len() {
            return Err(Error::Parameter {
                name: "eigen_freq".into(),
                message: format!(
                    "kernel of {} samples exceeds the record length {}",
                    self.len(),
                    x.len()
                ),
            });
        }
        let k_count = x.len() as i64;
        let mut out = Vec::with_capacity(x.len());
        for k in 0..k_count {
            let mut acc = 0.0;
            for (i, &w) in self.weights.iter().enumerate() {
                let idx = (k - (self.min_lag + i as i64)).clamp(0, k_count - 1);
                acc += w * x[idx as usize];
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Designs and applies in one call.
pub fn morlet_filter(x: &[f64], spec: &MorletSpec, sample_rate: f64) -> Result<Vec<f64>> {
    MorletKernel::design(spec, sample_rate)?.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(center: f64, eigen: f64, causal: bool) -> MorletSpec {
        MorletSpec {
            center_freq: center,
            eigen_freq: eigen,
            causal,
        }
    }

    fn amplitude(y: &[f64]) -> f64 {
        // RMS amplitude estimate over the central half of the signal.
        let lo = y.len() / 4;
        let hi = y.len() - y.len() / 4;
        let mid = &y[lo..hi];
        (2.0 * mid.iter().map(|v| v * v).sum::<f64>() / mid.len() as f64).sqrt()
    }

    #[test]
    fn constant_input_is_rejected() {
        let x = [3.0; 1024];
        for causal in [false, true] {
            let y = morlet_filter(&x, &spec(10.0, 10.0, causal), 100.0).unwrap();
            for v in &y {
                assert!(v.abs() < 1e-6 * 3.0, "causal {causal}: {v}");
            }
        }
    }

    #[test]
    fn unit_cosine_at_center_keeps_unit_amplitude() {
        let fs = 100.0;
        for causal in [false, true] {
            let x: Vec<f64> = (0..2048)
                .map(|k| (2.0 * PI * 10.0 * k as f64 / fs).cos())
                .collect();
            let y = morlet_filter(&x, &spec(10.0, 10.0, causal), fs).unwrap();
            let amp = amplitude(&y);
            assert!((amp - 1.0).abs() < 0.05, "causal {causal}: amplitude {amp}");
        }
    }

    #[test]
    fn far_out_of_band_cosine_is_attenuated() {
        let fs = 100.0;
        // Bandwidth is eigen_freq / shape factor = 2 Hz; 40 Hz is 15 sigma
        // off center.
        let x: Vec<f64> = (0..2048)
            .map(|k| (2.0 * PI * 40.0 * k as f64 / fs).cos())
            .collect();
        let y = morlet_filter(&x, &spec(10.0, 10.0, false), fs).unwrap();
        assert!(amplitude(&y) < 0.1);
    }

    #[test]
    fn causal_kernel_does_not_look_ahead() {
        let mut x = vec![0.0; 512];
        x[300] = 1.0;
        let y = morlet_filter(&x, &spec(10.0, 10.0, true), 100.0).unwrap();
        for (k, v) in y.iter().enumerate().take(300) {
            assert_eq!(*v, 0.0, "position {k}");
        }
        assert!(y[300..].iter().any(|v| v.abs() > 1e-6));
        // The symmetric kernel responds before the impulse.
        let ya = morlet_filter(&x, &spec(10.0, 10.0, false), 100.0).unwrap();
        assert!(ya[..300].iter().any(|v| v.abs() > 1e-6));
    }

    #[test]
    fn kernel_longer_than_record_is_an_error() {
        let x = [0.0; 10];
        assert!(matches!(
            morlet_filter(&x, &spec(10.0, 10.0, false), 100.0),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn invalid_frequencies_rejected() {
        assert!(MorletKernel::design(&spec(60.0, 10.0, false), 100.0).is_err());
        assert!(MorletKernel::design(&spec(0.0, 10.0, false), 100.0).is_err());
        assert!(MorletKernel::design(&spec(10.0, 0.0, false), 100.0).is_err());
    }
}
