//! Butterworth filter design via the bilinear transform, realized as a
//! cascade of second-order sections.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterType {
    Lowpass,
    Highpass,
    Bandpass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Internal state starts at zero.
    Zero,
    /// State preset as if the input had been x[1] forever, so constant
    /// inputs produce no startup transient.
    SteadyState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ButterworthSpec {
    pub filter_type: FilterType,
    /// First critical frequency in the unit of the sample rate (e.g. Hz).
    pub f1: f64,
    /// Second critical frequency; only used for bandpass filters.
    pub f2: Option<f64>,
    pub order: usize,
    pub init: InitMode,
}

/// One biquad: b and a hold up to three coefficients; `order` is 1 or 2 and
/// tells how many trailing coefficients are structurally zero.
#[derive(Debug, Clone, Copy)]
struct Section {
    b: [f64; 3],
    a: [f64; 3],
    order: usize,
}

impl Section {
    fn response(&self, omega: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -omega);
        let z2 = z1 * z1;
        let num = Complex64::new(self.b[0], 0.0) + self.b[1] * z1 + self.b[2] * z2;
        let den = Complex64::new(self.a[0], 0.0) + self.a[1] * z1 + self.a[2] * z2;
        num / den
    }
}

#[derive(Debug, Clone)]
pub struct ButterworthFilter {
    sections: Vec<Section>,
    total_order: usize,
}

/// Normalized analog prototype poles with positive imaginary part first;
/// the optional real pole (odd orders) comes last.
fn prototype_poles(order: usize) -> Vec<Complex64> {
    (0..order)
        .map(|k| {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            Complex64::from_polar(1.0, theta)
        })
        .collect()
}

fn bilinear(pole: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) + pole) / (Complex64::new(1.0, 0.0) - pole)
}

impl ButterworthFilter {
    pub fn design(spec: &ButterworthSpec, sample_rate: f64) -> Result<Self> {
        let nyquist = sample_rate / 2.0;
        if !(1..=8).contains(&spec.order) {
            return Err(Error::Parameter {
                name: "order".into(),
                message: format!("order {} outside [1, 8]", spec.order),
            });
        }
        if !(spec.f1 > 0.0 && spec.f1 < nyquist) {
            return Err(Error::Parameter {
                name: "frequencies".into(),
                message: format!(
                    "critical frequency {} outside (0, {nyquist}) for sample rate {sample_rate}",
                    spec.f1
                ),
            });
        }
        let mut filter = match spec.filter_type {
            FilterType::Lowpass => Self::one_sided(spec.order, spec.f1, sample_rate, true),
            FilterType::Highpass => Self::one_sided(spec.order, spec.f1, sample_rate, false),
            FilterType::Bandpass => {
                let f2 = spec.f2.ok_or_else(|| Error::Parameter {
                    name: "frequencies".into(),
                    message: "bandpass needs a second critical frequency".into(),
                })?;
                if !(spec.f1 < f2 && f2 < nyquist) {
                    return Err(Error::Parameter {
                        name: "frequencies".into(),
                        message: format!(
                            "bandpass needs f1 < f2 < {nyquist}, got ({}, {f2})",
                            spec.f1
                        ),
                    });
                }
                Self::bandpass(spec.order, spec.f1, f2, sample_rate)
            }
        };
        filter.normalize_gain(spec, sample_rate);
        Ok(filter)
    }

    fn one_sided(order: usize, f1: f64, sample_rate: f64, lowpass: bool) -> Self {
        let wc = (PI * f1 / sample_rate).tan();
        let protos = prototype_poles(order);
        let mut sections = Vec::new();
        // Conjugate pairs sit at indices (k, order-1-k); odd orders leave a
        // real pole in the middle.
        for k in 0..order / 2 {
            let analog = if lowpass { wc * protos[k] } else { wc / protos[k] };
            let zd = bilinear(analog);
            let zero = if lowpass { 1.0 } else { -1.0 }; // sign of -2*z_zero
            sections.push(Section {
                b: [1.0, 2.0 * zero, 1.0],
                a: [1.0, -2.0 * zd.re, zd.norm_sqr()],
                order: 2,
            });
        }
        if order % 2 == 1 {
            // The middle prototype pole is -1, so lowpass (-wc * 1) and
            // highpass (wc / -1) coincide.
            let zd = bilinear(Complex64::new(-wc, 0.0)).re;
            let zero = if lowpass { 1.0 } else { -1.0 };
            sections.push(Section {
                b: [1.0, zero, 0.0],
                a: [1.0, -zd, 0.0],
                order: 1,
            });
        }
        ButterworthFilter {
            sections,
            total_order: order,
        }
    }

    fn bandpass(order: usize, f1: f64, f2: f64, sample_rate: f64) -> Self {
        let w1 = (PI * f1 / sample_rate).tan();
        let w2 = (PI * f2 / sample_rate).tan();
        let bw = w2 - w1;
        let w0sq = w1 * w2;
        // Lowpass-to-bandpass transform doubles the order: every prototype
        // pole p yields the two roots of s^2 - p*bw*s + w0sq.
        let mut digital: Vec<Complex64> = Vec::with_capacity(2 * order);
        for p in prototype_poles(order) {
            let pb = p * bw;
            let disc = (pb * pb - 4.0 * w0sq).sqrt();
            digital.push(bilinear((pb + disc) / 2.0));
            digital.push(bilinear((pb - disc) / 2.0));
        }
        // Re-group into conjugate-closed pairs.
        let mut sections = Vec::new();
        while let Some(p) = digital.pop() {
            let partner = if p.im.abs() > 1e-9 {
                let conj = p.conj();
                let (idx, _) = digital
                    .iter()
                    .enumerate()
                    .min_by(|(_, x), (_, y)| {
                        (*x - conj)
                            .norm_sqr()
                            .partial_cmp(&(*y - conj).norm_sqr())
                            .unwrap()
                    })
                    .expect("conjugate pole missing");
                digital.swap_remove(idx)
            } else {
                let (idx, _) = digital
                    .iter()
                    .enumerate()
                    .min_by(|(_, x), (_, y)| x.im.abs().partial_cmp(&y.im.abs()).unwrap())
                    .expect("real pole partner missing");
                digital.swap_remove(idx)
            };
            sections.push(Section {
                b: [1.0, 0.0, -1.0], // one zero at z=1, one at z=-1
                a: [1.0, -(p.re + partner.re), (p * partner).re],
                order: 2,
            });
        }
        ButterworthFilter {
            sections,
            total_order: 2 * order,
        }
    }

    /// Scales the first section so the passband reference frequency has
    /// unit gain: DC for lowpass, Nyquist for highpass, the geometric band
    /// center for bandpass.
    fn normalize_gain(&mut self, spec: &ButterworthSpec, sample_rate: f64) {
        let omega_ref = match spec.filter_type {
            FilterType::Lowpass => 0.0,
            FilterType::Highpass => PI,
            FilterType::Bandpass => {
                let w1 = (PI * spec.f1 / sample_rate).tan();
                let w2 = (PI * spec.f2.unwrap() / sample_rate).tan();
                2.0 * (w1 * w2).sqrt().atan()
            }
        };
        let gain = self.response(omega_ref).norm();
        for b in &mut self.sections[0].b {
            *b /= gain;
        }
    }

    /// Complex frequency response at `omega` radians per sample.
    pub fn response(&self, omega: f64) -> Complex64 {
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(omega))
    }

    pub fn magnitude_at(&self, freq: f64, sample_rate: f64) -> f64 {
        self.response(2.0 * PI * freq / sample_rate).norm()
    }

    /// Expands the cascade into single numerator/denominator coefficient
    /// vectors of length total_order + 1.
    pub fn transfer_function(&self) -> (Vec<f64>, Vec<f64>) {
        let mut b = vec![1.0];
        let mut a = vec![1.0];
        for s in &self.sections {
            b = poly_mul(&b, &s.b[..=s.order]);
            a = poly_mul(&a, &s.a[..=s.order]);
        }
        (b, a)
    }

    pub fn total_order(&self) -> usize {
        self.total_order
    }

    /// Runs the cascade over a signal, each section in direct form II
    /// transposed.
    pub fn apply(&self, x: &[f64], init: InitMode) -> Vec<f64> {
        let mut signal = x.to_vec();
        for s in &self.sections {
            let [b0, b1, b2] = s.b;
            let [_, a1, a2] = s.a;
            let (mut s1, mut s2) = match init {
                InitMode::Zero => (0.0, 0.0),
                InitMode::SteadyState => {
                    let xbar = *signal.first().unwrap_or(&0.0);
                    let ybar = xbar * (b0 + b1 + b2) / (1.0 + a1 + a2);
                    (ybar - b0 * xbar, b2 * xbar - a2 * ybar)
                }
            };
            for v in &mut signal {
                let xin = *v;
                let y = b0 * xin + s1;
                s1 = b1 * xin - a1 * y + s2;
                s2 = b2 * xin - a2 * y;
                *v = y;
            }
        }
        signal
    }
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            out[i + j] += pi * qj;
        }
    }
    out
}

/// Designs and applies in one call.
pub fn butterworth_filter(x: &[f64], spec: &ButterworthSpec, sample_rate: f64) -> Result<Vec<f64>> {
    let filter = ButterworthFilter::design(spec, sample_rate)?;
    Ok(filter.apply(x, spec.init))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(filter_type: FilterType, f1: f64, f2: Option<f64>, order: usize) -> ButterworthSpec {
        ButterworthSpec {
            filter_type,
            f1,
            f2,
            order,
            init: InitMode::SteadyState,
        }
    }

    #[test]
    fn order_one_lowpass_at_quarter_rate_has_half_half_coefficients() {
        // Analytic bilinear transform of 1/(s+1) with prewarp tan(pi/4) = 1.
        let f = ButterworthFilter::design(&spec(FilterType::Lowpass, 25.0, None, 1), 100.0)
            .unwrap();
        let (b, a) = f.transfer_function();
        assert_eq!(b.len(), 2);
        assert_eq!(a.len(), 2);
        assert!((b[0] - 0.5).abs() < 1e-12, "b0 {}", b[0]);
        assert!((b[1] - 0.5).abs() < 1e-12, "b1 {}", b[1]);
        assert!((a[0] - 1.0).abs() < 1e-12);
        assert!(a[1].abs() < 1e-12, "a1 {}", a[1]);
    }

    #[test]
    fn lowpass_dc_gain_is_unity_for_all_orders() {
        for order in 1..=8 {
            let f = ButterworthFilter::design(&spec(FilterType::Lowpass, 10.0, None, order), 100.0)
                .unwrap();
            assert!((f.response(0.0).norm() - 1.0).abs() < 1e-9, "order {order}");
        }
    }

    #[test]
    fn steady_state_constant_input_has_no_transient() {
        let x = [3.5; 64];
        for order in 1..=8 {
            let y = butterworth_filter(&x, &spec(FilterType::Lowpass, 10.0, None, order), 100.0)
                .unwrap();
            for v in &y {
                assert!((v - 3.5).abs() < 1e-10 * 3.5, "order {order}: {v}");
            }
        }
    }

    #[test]
    fn highpass_rejects_constants() {
        let x = [2.0; 64];
        let y =
            butterworth_filter(&x, &spec(FilterType::Highpass, 10.0, None, 3), 100.0).unwrap();
        for v in &y {
            assert!(v.abs() < 1e-10, "{v}");
        }
        let f = ButterworthFilter::design(&spec(FilterType::Highpass, 10.0, None, 3), 100.0)
            .unwrap();
        assert!(f.response(0.0).norm() < 1e-12);
        assert!((f.response(PI).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cutoff_attenuation_is_three_decibels() {
        for order in 1..=8 {
            for (ft, f1) in [(FilterType::Lowpass, 12.0), (FilterType::Highpass, 18.0)] {
                let f = ButterworthFilter::design(&spec(ft, f1, None, order), 100.0).unwrap();
                let mag = f.magnitude_at(f1, 100.0);
                let target = std::f64::consts::FRAC_1_SQRT_2;
                assert!(
                    (mag - target).abs() / target < 0.02,
                    "{ft:?} order {order}: {mag}"
                );
            }
        }
    }

    #[test]
    fn cutoff_attenuation_measured_on_sine_wave() {
        let fs = 1000.0;
        let f1 = 50.0;
        let f = ButterworthFilter::design(&spec(FilterType::Lowpass, f1, None, 4), fs).unwrap();
        let x: Vec<f64> = (0..4096)
            .map(|k| (2.0 * PI * f1 * k as f64 / fs).sin())
            .collect();
        let y = f.apply(&x, InitMode::Zero);
        // Amplitude from the settled second half via RMS.
        let tail = &y[2048..];
        let rms = (tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64).sqrt();
        let amp = rms * std::f64::consts::SQRT_2;
        let target = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amp - target).abs() / target < 0.02, "amplitude {amp}");
    }

    #[test]
    fn bandpass_peak_and_skirts() {
        for order in 1..=4 {
            let f = ButterworthFilter::design(
                &spec(FilterType::Bandpass, 5.0, Some(15.0), order),
                100.0,
            )
            .unwrap();
            assert_eq!(f.total_order(), 2 * order);
            // Unit gain at the geometric band center; -3 dB at both edges;
            // deep rejection at DC and Nyquist.
            let w1 = (PI * 5.0 / 100.0).tan();
            let w2 = (PI * 15.0 / 100.0).tan();
            let center = 2.0 * (w1 * w2).sqrt().atan();
            assert!((f.response(center).norm() - 1.0).abs() < 1e-9, "order {order}");
            let target = std::f64::consts::FRAC_1_SQRT_2;
            for edge in [5.0, 15.0] {
                let mag = f.magnitude_at(edge, 100.0);
                assert!(
                    (mag - target).abs() / target < 0.02,
                    "order {order} edge {edge}: {mag}"
                );
            }
            assert!(f.response(0.0).norm() < 1e-9);
            assert!(f.response(PI).norm() < 1e-9);
        }
    }

    #[test]
    fn transfer_function_matches_cascade_response() {
        let f = ButterworthFilter::design(
            &spec(FilterType::Bandpass, 8.0, Some(20.0), 3),
            100.0,
        )
        .unwrap();
        let (b, a) = f.transfer_function();
        assert_eq!(b.len(), f.total_order() + 1);
        assert_eq!(a.len(), f.total_order() + 1);
        for i in 0..16 {
            let omega = PI * i as f64 / 16.0;
            let z1 = Complex64::from_polar(1.0, -omega);
            // Horner in z^-1.
            let horner = |poly: &[f64]| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in poly.iter().rev() {
                    acc = acc * z1 + Complex64::new(c, 0.0);
                }
                acc
            };
            let expanded = horner(&b) / horner(&a);
            let cascade = f.response(omega);
            assert!((expanded - cascade).norm() < 1e-9, "omega {omega}");
        }
    }

    #[test]
    fn zero_init_lowpass_settles_to_constant() {
        let x = [1.0; 512];
        let y =
            butterworth_filter(&x, &spec(FilterType::Lowpass, 10.0, None, 2), 100.0).unwrap();
        let mut y0 = ButterworthFilter::design(&spec(FilterType::Lowpass, 10.0, None, 2), 100.0)
            .unwrap()
            .apply(&x, InitMode::Zero);
        assert!((y[0] - 1.0).abs() < 1e-12);
        assert!(y0[0].abs() < 0.5); // visible transient
        assert!((y0.pop().unwrap() - 1.0).abs() < 1e-6); // settles
    }

    #[test]
    fn bounded_input_bounded_output_across_parameter_grid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let x: Vec<f64> = (0..640).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for order in [1, 2, 5, 8] {
            for (ft, f1, f2) in [
                (FilterType::Lowpass, 2.0, None),
                (FilterType::Lowpass, 45.0, None),
                (FilterType::Highpass, 2.0, None),
                (FilterType::Highpass, 45.0, None),
                (FilterType::Bandpass, 3.0, Some(40.0)),
                (FilterType::Bandpass, 20.0, Some(22.0)),
            ] {
                for init in [InitMode::Zero, InitMode::SteadyState] {
                    let mut s = spec(ft, f1, f2, order);
                    s.init = init;
                    let y = butterworth_filter(&x, &s, 100.0).unwrap();
                    for v in &y {
                        assert!(v.abs() < 10.0, "{ft:?} order {order}: {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let fs = 100.0;
        assert!(ButterworthFilter::design(&spec(FilterType::Lowpass, 50.0, None, 2), fs).is_err());
        assert!(ButterworthFilter::design(&spec(FilterType::Lowpass, 0.0, None, 2), fs).is_err());
        assert!(ButterworthFilter::design(&spec(FilterType::Lowpass, 10.0, None, 0), fs).is_err());
        assert!(ButterworthFilter::design(&spec(FilterType::Lowpass, 10.0, None, 9), fs).is_err());
        assert!(
            ButterworthFilter::design(&spec(FilterType::Bandpass, 10.0, None, 2), fs).is_err()
        );
        assert!(
            ButterworthFilter::design(&spec(FilterType::Bandpass, 20.0, Some(10.0), 2), fs)
                .is_err()
        );
        assert!(
            ButterworthFilter::design(&spec(FilterType::Bandpass, 20.0, Some(60.0), 2), fs)
                .is_err()
        );
    }
}
