//! Multilevel discrete wavelet decomposition with band reconstructions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveletFamily {
    /// db1.
    Haar,
    Db2,
    Db4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Half-sample symmetric extension; works for any record length.
    Symmetric,
    /// Periodized transform; orthogonal (energy-preserving) for even
    /// lengths at every level.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    pub levels: usize,
    pub boundary: Boundary,
}

struct FilterBank {
    dec_lo: Vec<f64>,
    dec_hi: Vec<f64>,
    rec_lo: Vec<f64>,
    rec_hi: Vec<f64>,
}

/// Synthesis lowpass (scaling) coefficients per family; the other three
/// filters follow from the quadrature-mirror construction.
fn scaling_filter(family: WaveletFamily) -> Vec<f64> {
    match family {
        WaveletFamily::Haar => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![s, s]
        }
        WaveletFamily::Db2 => {
            let s3 = 3f64.sqrt();
            let d = 4.0 * 2f64.sqrt();
            vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
        }
        WaveletFamily::Db4 => vec![
            0.230_377_813_308_855_23,
            0.714_846_570_552_541_5,
            0.630_880_767_929_590_4,
            -0.027_983_769_416_983_85,
            -0.187_034_811_718_881_14,
            0.030_841_381_835_986_965,
            0.032_883_011_666_982_945,
            -0.010_597_401_784_997_278,
        ],
    }
}

fn filter_bank(family: WaveletFamily) -> FilterBank {
    let rec_lo = scaling_filter(family);
    let f = rec_lo.len();
    let dec_lo: Vec<f64> = rec_lo.iter().rev().copied().collect();
    let rec_hi: Vec<f64> = (0..f)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * rec_lo[f - 1 - k]
        })
        .collect();
    let dec_hi: Vec<f64> = rec_hi.iter().rev().copied().collect();
    FilterBank {
        dec_lo,
        dec_hi,
        rec_lo,
        rec_hi,
    }
}

/// Half-sample symmetric index folding: ... x2 x1 x0 | x0 x1 ... xN | xN ...
fn fold_symmetric(mut i: i64, n: i64) -> usize {
    loop {
        if i < 0 {
            i = -1 - i;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// One analysis channel with symmetric extension: convolve and keep every
/// second sample.
fn analyze_symmetric(x: &[f64], dec: &[f64]) -> Vec<f64> {
    let n = x.len() as i64;
    let f = dec.len() as i64;
    let valid = n + f - 1;
    let mut out = Vec::with_capacity((valid / 2) as usize);
    let mut k = 1i64;
    while k < valid {
        let mut acc = 0.0;
        for (j, &h) in dec.iter().enumerate() {
            acc += h * x[fold_symmetric(k - j as i64, n)];
        }
        out.push(acc);
        k += 2;
    }
    out
}

/// One synthesis channel: upsample, convolve, and crop centrally to the
/// parent length.
fn synthesize_symmetric(coeffs: &[f64], rec: &[f64], parent_len: usize) -> Vec<f64> {
    let la = coeffs.len();
    let f = rec.len();
    let up_len = 2 * la - 1;
    let full_len = up_len + f - 1;
    let mut full = vec![0.0; full_len];
    for (i, &c) in coeffs.iter().enumerate() {
        let pos = 2 * i;
        for (j, &r) in rec.iter().enumerate() {
            full[pos + j] += c * r;
        }
    }
    let start = (full_len - parent_len) / 2;
    full[start..start + parent_len].to_vec()
}

/// Periodized analysis; odd lengths are padded by repeating the last
/// sample.
fn analyze_periodic(x: &[f64], dec: &[f64]) -> Vec<f64> {
    let mut padded;
    let xe: &[f64] = if x.len() % 2 == 1 {
        padded = x.to_vec();
        padded.push(*x.last().unwrap());
        &padded
    } else {
        x
    };
    let n = xe.len() as i64;
    (0..n / 2)
        .map(|kp| {
            let k = 2 * kp + 1;
            dec.iter()
                .enumerate()
                .map(|(j, &h)| h * xe[(k - j as i64).rem_euclid(n) as usize])
                .sum()
        })
        .collect()
}

/// Adjoint of `analyze_periodic`; for even lengths this is the exact
/// inverse channel of the orthogonal transform.
fn synthesize_periodic(coeffs: &[f64], dec: &[f64], parent_len: usize) -> Vec<f64> {
    let n = parent_len + parent_len % 2;
    let mut out = vec![0.0; n];
    for (kp, &c) in coeffs.iter().enumerate() {
        let k = 2 * kp as i64 + 1;
        for (j, &h) in dec.iter().enumerate() {
            out[(k - j as i64).rem_euclid(n as i64) as usize] += h * c;
        }
    }
    out.truncate(parent_len);
    out
}

/// Multilevel coefficients: the approximation at the deepest level plus
/// one detail vector per level (index 0 = level 1).
pub struct WaveletCoefficients {
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    /// Length of the approximation entering each level (index 0 = the
    /// original signal).
    parent_lens: Vec<usize>,
}

fn validate(x: &[f64], spec: &WaveletSpec) -> Result<()> {
    if !(1..=4).contains(&spec.levels) {
        return Err(Error::Parameter {
            name: "levels".into(),
            message: format!("level count {} outside [1, 4]", spec.levels),
        });
    }
    let needed = 1usize << spec.levels;
    if x.len() < needed {
        return Err(Error::Parameter {
            name: "levels".into(),
            message: format!(
                "{} levels need at least {needed} samples, record has {}",
                spec.levels,
                x.len()
            ),
        });
    }
    Ok(())
}

pub fn wavedec_coeffs(x: &[f64], spec: &WaveletSpec) -> Result<WaveletCoefficients> {
    validate(x, spec)?;
    let bank = filter_bank(spec.family);
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(spec.levels);
    let mut parent_lens = Vec::with_capacity(spec.levels);
    for _ in 0..spec.levels {
        parent_lens.push(approx.len());
        let (a, d) = match spec.boundary {
            Boundary::Symmetric => (
                analyze_symmetric(&approx, &bank.dec_lo),
                analyze_symmetric(&approx, &bank.dec_hi),
            ),
            Boundary::Periodic => (
                analyze_periodic(&approx, &bank.dec_lo),
                analyze_periodic(&approx, &bank.dec_hi),
            ),
        };
        details.push(d);
        approx = a;
    }
    Ok(WaveletCoefficients {
        approx,
        details,
        parent_lens,
    })
}

impl WaveletCoefficients {
    /// Reconstructs one band (approximation or a single detail level) back
    /// to the original signal length.
    fn reconstruct_band(&self, spec: &WaveletSpec, band_level: Option<usize>) -> Vec<f64> {
        let bank = filter_bank(spec.family);
        let synth = |c: &[f64], filt: &[f64], len: usize| match spec.boundary {
            Boundary::Symmetric => synthesize_symmetric(c, filt, len),
            // The periodized synthesis is the adjoint, so it uses the
            // analysis filters.
            Boundary::Periodic => synthesize_periodic(c, filt, len),
        };
        let (lo, hi) = match spec.boundary {
            Boundary::Symmetric => (&bank.rec_lo, &bank.rec_hi),
            Boundary::Periodic => (&bank.dec_lo, &bank.dec_hi),
        };
        let (mut v, mut level) = match band_level {
            None => (
                synth(&self.approx, lo, self.parent_lens[spec.levels - 1]),
                spec.levels - 1,
            ),
            Some(l) => (
                synth(&self.details[l - 1], hi, self.parent_lens[l - 1]),
                l - 1,
            ),
        };
        while level > 0 {
            v = synth(&v, lo, self.parent_lens[level - 1]);
            level -= 1;
        }
        v
    }
}

/// Decomposes into an approximation band and per-level detail bands, each
/// reconstructed to the input length. Always five outputs; slots beyond
/// the level count are zero.
pub fn wavedec_bands(x: &[f64], spec: &WaveletSpec) -> Result<[Vec<f64>; 5]> {
    let coeffs = wavedec_coeffs(x, spec)?;
    let zero = vec![0.0; x.len()];
    let mut out = [zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero];
    out[0] = coeffs.reconstruct_band(spec, None);
    for l in 1..=spec.levels {
        out[l] = coeffs.reconstruct_band(spec, Some(l));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const FAMILIES: [WaveletFamily; 3] =
        [WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Db4];

    #[test]
    fn filters_are_orthonormal_quadrature_pairs() {
        for family in FAMILIES {
            let bank = filter_bank(family);
            let f = bank.dec_lo.len();
            let sum: f64 = bank.dec_lo.iter().sum();
            assert!((sum - 2f64.sqrt()).abs() < 1e-10, "{family:?}");
            let energy: f64 = bank.dec_lo.iter().map(|h| h * h).sum();
            assert!((energy - 1.0).abs() < 1e-10, "{family:?}");
            // Orthogonality under even shifts, within and across channels.
            for shift in (2..f).step_by(2) {
                let lo_lo: f64 = (0..f - shift)
                    .map(|j| bank.dec_lo[j] * bank.dec_lo[j + shift])
                    .sum();
                assert!(lo_lo.abs() < 1e-10, "{family:?} shift {shift}");
            }
            for shift in (0..f).step_by(2) {
                let lo_hi: f64 = (0..f - shift)
                    .map(|j| bank.dec_lo[j] * bank.dec_hi[j + shift])
                    .sum();
                assert!(lo_hi.abs() < 1e-10, "{family:?} shift {shift}");
            }
            let hi_sum: f64 = bank.dec_hi.iter().sum();
            assert!(hi_sum.abs() < 1e-10, "{family:?}");
            assert_eq!(bank.rec_lo.len(), f);
            assert_eq!(bank.rec_hi.len(), f);
        }
    }

    #[test]
    fn constant_signal_lands_entirely_in_the_approximation() {
        let x = [3.0; 16];
        for family in FAMILIES {
            let spec = WaveletSpec {
                family,
                levels: 1,
                boundary: Boundary::Symmetric,
            };
            let bands = wavedec_bands(&x, &spec).unwrap();
            for (k, v) in bands[0].iter().enumerate() {
                assert!((v - 3.0).abs() < 1e-10, "{family:?} approx[{k}] = {v}");
            }
            for v in &bands[1] {
                assert!(v.abs() < 1e-10, "{family:?}");
            }
        }
    }

    #[test]
    fn alternating_signal_is_pure_detail_under_haar() {
        // Analysis pairs: sums vanish, differences carry everything.
        let x = [1.0, -1.0, 1.0, -1.0];
        let spec = WaveletSpec {
            family: WaveletFamily::Haar,
            levels: 1,
            boundary: Boundary::Symmetric,
        };
        let coeffs = wavedec_coeffs(&x, &spec).unwrap();
        // Hand analysis: interior approx coefficients (x0+x1)/sqrt(2) = 0.
        assert!((coeffs.approx[0]).abs() < 1e-12);
        assert!((coeffs.approx[1]).abs() < 1e-12);
        let bands = wavedec_bands(&x, &spec).unwrap();
        for (k, v) in bands[0].iter().enumerate() {
            assert!(v.abs() < 1e-10, "approx[{k}] = {v}");
        }
        for k in 0..4 {
            assert!((bands[1][k] - x[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn bands_sum_to_the_signal_under_symmetric_extension() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(83);
        for &len in &[16usize, 37, 64, 101] {
            for family in FAMILIES {
                for levels in 1..=4 {
                    let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let spec = WaveletSpec {
                        family,
                        levels,
                        boundary: Boundary::Symmetric,
                    };
                    let bands = wavedec_bands(&x, &spec).unwrap();
                    for k in 0..len {
                        let sum: f64 = bands.iter().map(|b| b[k]).sum();
                        assert!(
                            (sum - x[k]).abs() < 1e-8,
                            "{family:?} len {len} levels {levels} k {k}: {sum} vs {}",
                            x[k]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bands_sum_to_the_signal_under_periodization() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(89);
        for &len in &[16usize, 64, 128] {
            for family in FAMILIES {
                for levels in 1..=4 {
                    let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let spec = WaveletSpec {
                        family,
                        levels,
                        boundary: Boundary::Periodic,
                    };
                    let bands = wavedec_bands(&x, &spec).unwrap();
                    for k in 0..len {
                        let sum: f64 = bands.iter().map(|b| b[k]).sum();
                        assert!(
                            (sum - x[k]).abs() < 1e-8,
                            "{family:?} len {len} levels {levels} k {k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn periodized_transform_conserves_energy() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        let x: Vec<f64> = (0..256).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let signal_energy: f64 = x.iter().map(|v| v * v).sum();
        for family in FAMILIES {
            for levels in 1..=4 {
                let spec = WaveletSpec {
                    family,
                    levels,
                    boundary: Boundary::Periodic,
                };
                let coeffs = wavedec_coeffs(&x, &spec).unwrap();
                let mut coeff_energy: f64 = coeffs.approx.iter().map(|v| v * v).sum();
                for d in &coeffs.details {
                    coeff_energy += d.iter().map(|v| v * v).sum::<f64>();
                }
                assert!(
                    ((coeff_energy - signal_energy) / signal_energy).abs() < 1e-8,
                    "{family:?} levels {levels}: {coeff_energy} vs {signal_energy}"
                );
            }
        }
    }

    #[test]
    fn unused_band_slots_are_zero_filled() {
        let x: Vec<f64> = (0..32).map(|k| (k as f64).sin()).collect();
        let spec = WaveletSpec {
            family: WaveletFamily::Db2,
            levels: 2,
            boundary: Boundary::Symmetric,
        };
        let bands = wavedec_bands(&x, &spec).unwrap();
        assert_eq!(bands[3], vec![0.0; 32]);
        assert_eq!(bands[4], vec![0.0; 32]);
        assert!(bands[1].iter().any(|v| v.abs() > 1e-12));
    }

    #[test]
    fn coefficient_counts_follow_dyadic_decimation() {
        let x = vec![0.0; 37];
        for family in FAMILIES {
            let f = scaling_filter(family).len();
            let spec = WaveletSpec {
                family,
                levels: 3,
                boundary: Boundary::Symmetric,
            };
            let coeffs = wavedec_coeffs(&x, &spec).unwrap();
            let mut expect = 37usize;
            for l in 0..3 {
                expect = (expect + f - 1) / 2;
                if l < 2 {
                    assert_eq!(coeffs.details[l].len(), expect, "{family:?} level {}", l + 1);
                }
            }
            assert_eq!(coeffs.approx.len(), expect);
        }
    }

    #[test]
    fn record_too_short_for_levels_is_an_error() {
        let x = vec![0.0; 8];
        let spec = WaveletSpec {
            family: WaveletFamily::Haar,
            levels: 4,
            boundary: Boundary::Symmetric,
        };
        assert!(matches!(
            wavedec_bands(&x, &spec),
            Err(Error::Parameter { .. })
        ));
        let spec0 = WaveletSpec {
            family: WaveletFamily::Haar,
            levels: 0,
            boundary: Boundary::Symmetric,
        };
        assert!(wavedec_bands(&x, &spec0).is_err());
    }
}
