//! Elementwise and whole-vector transforms that need no fitted state.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnaryOp {
    Abs,
    /// Multiplication by -1.
    SignChange,
    /// Square root; negative inputs are a domain error.
    Sqrt,
    /// Decadic logarithm; non-positive inputs are a domain error.
    Log10,
    Sqr,
    /// Multiplication by a constant gain.
    ConstGain(f64),
}

pub fn unary(x: &[f64], op: UnaryOp) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(x.len());
    for (i, &v) in x.iter().enumerate() {
        let y = match op {
            UnaryOp::Abs => v.abs(),
            UnaryOp::SignChange => -v,
            UnaryOp::Sqrt => {
                if v < 0.0 {
                    return Err(Error::Domain {
                        index: i + 1,
                        message: format!("square root of negative value {v}"),
                    });
                }
                v.sqrt()
            }
            UnaryOp::Log10 => {
                if v <= 0.0 {
                    return Err(Error::Domain {
                        index: i + 1,
                        message: format!("logarithm of non-positive value {v}"),
                    });
                }
                v.log10()
            }
            UnaryOp::Sqr => v * v,
            UnaryOp::ConstGain(g) => g * v,
        };
        out.push(y);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Max,
    Mean,
    Min,
    Mult,
}

/// Elementwise reduction across one or more equal-length series.
pub fn combine(inputs: &[&[f64]], op: CombineOp) -> Result<Vec<f64>> {
    let first = inputs
        .first()
        .ok_or_else(|| Error::EmptyData("combination of zero series".into()))?;
    for s in inputs {
        if s.len() != first.len() {
            return Err(Error::ShapeMismatch {
                what: "combined series".into(),
                expected: first.len(),
                actual: s.len(),
            });
        }
    }
    let mut out = first.to_vec();
    for s in &inputs[1..] {
        for (acc, &v) in out.iter_mut().zip(s.iter()) {
            *acc = match op {
                CombineOp::Add | CombineOp::Mean => *acc + v,
                CombineOp::Mult => *acc * v,
                // NaN must survive the reduction, so avoid the NaN-ignoring
                // float max/min intrinsics.
                CombineOp::Max => {
                    if acc.is_nan() || v.is_nan() {
                        f64::NAN
                    } else if v > *acc {
                        v
                    } else {
                        *acc
                    }
                }
                CombineOp::Min => {
                    if acc.is_nan() || v.is_nan() {
                        f64::NAN
                    } else if v < *acc {
                        v
                    } else {
                        *acc
                    }
                }
            };
        }
    }
    if op == CombineOp::Mean {
        let n = inputs.len() as f64;
        for acc in &mut out {
            *acc /= n;
        }
    }
    Ok(out)
}

/// Pointwise difference a - b.
pub fn diff_pair(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            what: "difference series".into(),
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x - y).collect())
}

/// Pointwise share a / (a + b); the all-zero case resolves to an even split.
pub fn relative_ratio(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            what: "ratio series".into(),
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| {
            if x == 0.0 && y == 0.0 {
                0.5
            } else {
                x / (x + y)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinarizeMode {
    /// 1 where x strictly exceeds the threshold.
    Threshold(f64),
    /// 1 where lower <= x <= upper.
    Region { lower: f64, upper: f64 },
}

pub fn binarize(x: &[f64], mode: BinarizeMode) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let inside = match mode {
                BinarizeMode::Threshold(t) => v > t,
                BinarizeMode::Region { lower, upper } => lower <= v && v <= upper,
            };
            if inside {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Marks transitions into zero: y[1] = 0 and y[i] = 1 exactly when
/// x[i-1] != 0 and x[i] == 0.
pub fn zero_jump(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        if x[i - 1] != 0.0 && x[i] == 0.0 {
            out[i] = 1.0;
        }
    }
    out
}

/// Shifts by `d` samples (positive: later in time), replicating the edge
/// value into the vacated positions. |d| must be smaller than the length.
pub fn shift(x: &[f64], d: i64) -> Result<Vec<f64>> {
    let k = x.len() as i64;
    if d.abs() >= k {
        return Err(Error::Parameter {
            name: "shift".into(),
            message: format!("magnitude of {d} must be below the series length {k}"),
        });
    }
    Ok((0..k)
        .map(|i| x[(i - d).clamp(0, k - 1) as usize])
        .collect())
}

/// Ascending stable sort with NaN collected at the end.
pub fn sort_values(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    out.sort_by(|a, b| match (a.is_nan(), b.is_nan()) {
        (true, true) => std::cmp::Ordering::Equal,
        (true, false) => std::cmp::Ordering::Greater,
        (false, true) => std::cmp::Ordering::Less,
        (false, false) => a.partial_cmp(b).unwrap(),
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeKind {
    /// (x - min) / (max - min).
    MinMax,
    /// (x - mean) / std, divisor-K standard deviation.
    ZScore,
    /// x / max(|x|).
    MaxAbs,
    /// x / mean(x).
    Mean,
}

pub fn normalize(x: &[f64], kind: NormalizeKind) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptyData("normalization of an empty vector".into()));
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let degenerate = |what: &str| Error::Degenerate(format!("normalization by zero {what}"));
    match kind {
        NormalizeKind::MinMax => {
            let min = x.iter().copied().fold(f64::INFINITY, f64::min);
            let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let range = max - min;
            if range == 0.0 {
                return Err(degenerate("range"));
            }
            Ok(x.iter().map(|v| (v - min) / range).collect())
        }
        NormalizeKind::ZScore => {
            let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x.len() as f64;
            let std = var.sqrt();
            if std == 0.0 {
                return Err(degenerate("standard deviation"));
            }
            Ok(x.iter().map(|v| (v - mean) / std).collect())
        }
        NormalizeKind::MaxAbs => {
            let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if scale == 0.0 {
                return Err(degenerate("peak magnitude"));
            }
            Ok(x.iter().map(|v| v / scale).collect())
        }
        NormalizeKind::Mean => {
            if mean == 0.0 {
                return Err(degenerate("mean"));
            }
            Ok(x.iter().map(|v| v / mean).collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetrendMethod {
    /// Subtract the least-squares line.
    Linear,
    /// Subtract the mean.
    Constant,
}

pub fn detrend(x: &[f64], method: DetrendMethod) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptyData("detrending of an empty vector".into()));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    match method {
        DetrendMethod::Constant => Ok(x.iter().map(|v| v - mean_x).collect()),
        DetrendMethod::Linear => {
            if x.len() == 1 {
                return Ok(vec![0.0]);
            }
            // Least squares on (i, x[i]), i = 1..=L.
            let mean_t = (n + 1.0) / 2.0;
            let mut stt = 0.0;
            let mut stx = 0.0;
            for (i, &v) in x.iter().enumerate() {
                let t = (i + 1) as f64 - mean_t;
                stt += t * t;
                stx += t * (v - mean_x);
            }
            let slope = stx / stt;
            Ok(x.iter()
                .enumerate()
                .map(|(i, &v)| v - (mean_x + slope * ((i + 1) as f64 - mean_t)))
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unary_basics() {
        assert_eq!(unary(&[-2.0, 3.0], UnaryOp::Abs).unwrap(), vec![2.0, 3.0]);
        assert_eq!(
            unary(&[-2.0, 3.0], UnaryOp::SignChange).unwrap(),
            vec![2.0, -3.0]
        );
        assert_eq!(unary(&[4.0, 9.0], UnaryOp::Sqrt).unwrap(), vec![2.0, 3.0]);
        assert_eq!(
            unary(&[1.0, 100.0], UnaryOp::Log10).unwrap(),
            vec![0.0, 2.0]
        );
        assert_eq!(unary(&[-3.0, 2.0], UnaryOp::Sqr).unwrap(), vec![9.0, 4.0]);
        assert_eq!(
            unary(&[1.0, -2.0], UnaryOp::ConstGain(2.5)).unwrap(),
            vec![2.5, -5.0]
        );
    }

    #[test]
    fn domain_errors_carry_one_based_position() {
        match unary(&[1.0, -4.0], UnaryOp::Sqrt) {
            Err(Error::Domain { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected domain error, got {other:?}"),
        }
        match unary(&[0.0, 1.0], UnaryOp::Log10) {
            Err(Error::Domain { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn combine_matches_scalar_reduction() {
        let a = [1.0, 5.0, -2.0];
        let b = [4.0, 1.0, -2.0];
        let c = [0.0, 3.0, 7.0];
        let inputs: Vec<&[f64]> = vec![&a, &b, &c];
        assert_eq!(combine(&inputs, CombineOp::Add).unwrap(), vec![5.0, 9.0, 3.0]);
        assert_eq!(
            combine(&inputs, CombineOp::Mult).unwrap(),
            vec![0.0, 15.0, 28.0]
        );
        assert_eq!(combine(&inputs, CombineOp::Max).unwrap(), vec![4.0, 5.0, 7.0]);
        assert_eq!(
            combine(&inputs, CombineOp::Min).unwrap(),
            vec![0.0, 1.0, -2.0]
        );
        let mean = combine(&inputs, CombineOp::Mean).unwrap();
        for (i, m) in mean.iter().enumerate() {
            assert!((m - (a[i] + b[i] + c[i]) / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn combine_single_input_is_identity() {
        let a = [1.0, 2.0];
        for op in [
            CombineOp::Add,
            CombineOp::Max,
            CombineOp::Mean,
            CombineOp::Min,
            CombineOp::Mult,
        ] {
            assert_eq!(combine(&[&a], op).unwrap(), a.to_vec());
        }
    }

    #[test]
    fn combine_propagates_nan_through_max_min() {
        let a = [1.0, f64::NAN];
        let b = [2.0, 3.0];
        let out = combine(&[&a[..], &b[..]], CombineOp::Max).unwrap();
        assert_eq!(out[0], 2.0);
        assert!(out[1].is_nan());
        let out = combine(&[&a[..], &b[..]], CombineOp::Min).unwrap();
        assert!(out[1].is_nan());
    }

    #[test]
    fn diff_and_ratio() {
        assert_eq!(
            diff_pair(&[5.0, 1.0], &[2.0, 4.0]).unwrap(),
            vec![3.0, -3.0]
        );
        assert_eq!(
            relative_ratio(&[1.0, 0.0, 3.0], &[3.0, 0.0, 1.0]).unwrap(),
            vec![0.25, 0.5, 0.75]
        );
    }

    #[test]
    fn binarize_threshold_is_strict_region_is_inclusive() {
        assert_eq!(
            binarize(&[1.0, 2.0, 3.0], BinarizeMode::Threshold(2.0)),
            vec![0.0, 0.0, 1.0]
        );
        assert_eq!(
            binarize(
                &[0.5, 1.0, 2.0, 2.5],
                BinarizeMode::Region {
                    lower: 1.0,
                    upper: 2.0
                }
            ),
            vec![0.0, 1.0, 1.0, 0.0]
        );
    }

    #[test]
    fn zero_jump_marks_transitions_into_zero() {
        assert_eq!(
            zero_jump(&[0.0, 3.0, 0.0, 0.0, 5.0, 0.0]),
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(zero_jump(&[1.0]), vec![0.0]);
    }

    #[test]
    fn shift_replicates_edges() {
        assert_eq!(shift(&[1.0, 2.0, 3.0], 1).unwrap(), vec![1.0, 1.0, 2.0]);
        assert_eq!(shift(&[1.0, 2.0, 3.0], -1).unwrap(), vec![2.0, 3.0, 3.0]);
        assert_eq!(shift(&[1.0, 2.0, 3.0], 0).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(shift(&[1.0, 2.0, 3.0], 2).unwrap(), vec![1.0, 1.0, 1.0]);
        assert!(shift(&[1.0, 2.0, 3.0], 3).is_err());
        assert!(shift(&[1.0, 2.0, 3.0], -3).is_err());
    }

    #[test]
    fn sort_is_ascending_with_nan_last() {
        let out = sort_values(&[3.0, f64::NAN, 1.0, 2.0]);
        assert_eq!(&out[..3], &[1.0, 2.0, 3.0]);
        assert!(out[3].is_nan());
    }

    #[test]
    fn normalize_kinds() {
        assert_eq!(
            normalize(&[2.0, 4.0], NormalizeKind::MinMax).unwrap(),
            vec![0.0, 1.0]
        );
        // std over divisor K of [1,3] is 1.
        assert_eq!(
            normalize(&[1.0, 3.0], NormalizeKind::ZScore).unwrap(),
            vec![-1.0, 1.0]
        );
        assert_eq!(
            normalize(&[-4.0, 2.0], NormalizeKind::MaxAbs).unwrap(),
            vec![-1.0, 0.5]
        );
        assert_eq!(
            normalize(&[2.0, 6.0], NormalizeKind::Mean).unwrap(),
            vec![0.5, 1.5]
        );
    }

    #[test]
    fn normalize_degenerate_inputs() {
        assert!(matches!(
            normalize(&[5.0, 5.0], NormalizeKind::MinMax),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            normalize(&[5.0, 5.0], NormalizeKind::ZScore),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            normalize(&[0.0, 0.0], NormalizeKind::MaxAbs),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            normalize(&[-1.0, 1.0], NormalizeKind::Mean),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn detrend_removes_exact_line() {
        let x: Vec<f64> = (1..=6).map(|i| 2.0 * i as f64 + 5.0).collect();
        let out = detrend(&x, DetrendMethod::Linear).unwrap();
        for v in out {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn detrend_residual_is_orthogonal_to_line() {
        let x = [3.0, -1.0, 4.0, 1.0, 5.0, 9.0, 2.0];
        let out = detrend(&x, DetrendMethod::Linear).unwrap();
        let sum: f64 = out.iter().sum();
        let slope_proj: f64 = out.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
        assert!(sum.abs() < 1e-12);
        assert!(slope_proj.abs() < 1e-10);
    }

    #[test]
    fn detrend_constant_subtracts_mean() {
        let out = detrend(&[1.0, 2.0, 6.0], DetrendMethod::Constant).unwrap();
        assert_eq!(out, vec![-2.0, -1.0, 3.0]);
    }
}
