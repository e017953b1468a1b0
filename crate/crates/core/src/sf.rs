//! Single-feature extractors: per record, map a (possibly segment-restricted)
//! sample vector to one or more scalars.

use crate::error::{Error, Result};
use crate::models::membership::MembershipModel;
use crate::models::pca::PcaModel;

/// The parameter-free per-record statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicStatKind {
    Max,
    Min,
    Mean,
    MeanNan,
    Median,
    MedianNan,
    Sum,
    /// Standard deviation normalized to K instead of K-1.
    StdK,
    /// Range of motion: max minus min.
    Rom,
    /// 1-based position of the first maximum.
    Mapo,
    /// 1-based position of the first minimum.
    Mipo,
    /// Center of gravity: sum(i * x[i]) / sum(x[i]), i 1-based.
    Cog,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn std_k(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn median(x: &[f64]) -> f64 {
    if x.iter().any(|v| v.is_nan()) {
        return f64::NAN;
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    median_of_sorted(&sorted)
}

/// First maximum / minimum with value and 1-based position; NaN anywhere
/// makes the result NaN.
fn extremum(x: &[f64], want_max: bool) -> (f64, f64) {
    let mut best = x[0];
    let mut pos = 1usize;
    for (i, &v) in x.iter().enumerate() {
        if v.is_nan() {
            return (f64::NAN, f64::NAN);
        }
        let better = if want_max { v > best } else { v < best };
        if better {
            best = v;
            pos = i + 1;
        }
    }
    (best, pos as f64)
}

pub fn basic_sf(x: &[f64], kind: BasicStatKind) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyData("statistic of an empty vector".into()));
    }
    let value = match kind {
        BasicStatKind::Mean => mean(x),
        BasicStatKind::Sum => x.iter().sum::<f64>(),
        BasicStatKind::StdK => std_k(x),
        BasicStatKind::Median => median(x),
        BasicStatKind::Max => extremum(x, true).0,
        BasicStatKind::Min => extremum(x, false).0,
        BasicStatKind::Mapo => extremum(x, true).1,
        BasicStatKind::Mipo => extremum(x, false).1,
        BasicStatKind::Rom => {
            let (max, _) = extremum(x, true);
            let (min, _) = extremum(x, false);
            max - min
        }
        BasicStatKind::MeanNan | BasicStatKind::MedianNan => {
            let kept: Vec<f64> = x.iter().copied().filter(|v| !v.is_nan()).collect();
            if kept.is_empty() {
                return Err(Error::EmptyData(
                    "all samples are NaN in a NaN-tolerant statistic".into(),
                ));
            }
            if kind == BasicStatKind::MeanNan {
                mean(&kept)
            } else {
                median(&kept)
            }
        }
        BasicStatKind::Cog => {
            let total: f64 = x.iter().sum();
            let weighted: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
            let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if total.abs() <= 1e-12 * x.len() as f64 * scale {
                return Err(Error::Degenerate(
                    "center of gravity has a near-zero denominator".into(),
                ));
            }
            weighted / total
        }
    };
    Ok(value)
}

/// Extracts the value at one sample point, 1-based.
pub fn sample_at(x: &[f64], n: usize) -> Result<f64> {
    if n < 1 || n > x.len() {
        return Err(Error::IndexOutOfRange {
            what: "sample point",
            index: n,
            max: x.len(),
        });
    }
    Ok(x[n - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormDeviationKind {
    /// Mean of |x - mu| / sigma.
    Abs,
    /// Mean of (x - mu) / sigma.
    Dir,
    /// Mean of sign(x - mu), in [-1, 1].
    Sign,
}

fn sign(d: f64) -> f64 {
    if d.is_nan() {
        f64::NAN
    } else if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean deviation of a sample vector from a norm curve, per sample scaled by
/// the norm's pointwise spread. `sigma` values are assumed pre-floored.
pub fn norm_deviation_sf(
    x: &[f64],
    mu: &[f64],
    sigma: &[f64],
    kind: NormDeviationKind,
) -> Result<f64> {
    if x.len() != mu.len() || x.len() != sigma.len() {
        return Err(Error::ShapeMismatch {
            what: "norm deviation vectors".into(),
            expected: x.len(),
            actual: mu.len().min(sigma.len()),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyData("norm deviation of an empty vector".into()));
    }
    let mut acc = 0.0;
    for i in 0..x.len() {
        let d = (x[i] - mu[i]) / sigma[i];
        acc += match kind {
            NormDeviationKind::Abs => d.abs(),
            NormDeviationKind::Dir => d,
            NormDeviationKind::Sign => sign(x[i] - mu[i]),
        };
    }
    Ok(acc / x.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscretizationMode {
    /// Fraction of samples whose maximal membership is term t.
    Crisp,
    /// Mean membership of term t over all samples.
    Fuzzy,
}

/// Term frequencies of a (fuzzily) discretized sample vector. Always returns
/// five slots; slots beyond the model's term count stay zero.
pub fn discretization_frequencies(
    x: &[f64],
    model: &MembershipModel,
    mode: DiscretizationMode,
) -> Result<[f64; 5]> {
    if x.is_empty() {
        return Err(Error::EmptyData("discretization of an empty vector".into()));
    }
    let m = model.term_count();
    let mut out = [0.0f64; 5];
    if x.iter().any(|v| v.is_nan()) {
        for slot in out.iter_mut().take(m) {
            *slot = f64::NAN;
        }
        return Ok(out);
    }
    match mode {
        DiscretizationMode::Crisp => {
            let mut counts = [0usize; 5];
            for &v in x {
                counts[model.winning_term(v)] += 1;
            }
            for t in 0..m {
                out[t] = counts[t] as f64 / x.len() as f64;
            }
        }
        DiscretizationMode::Fuzzy => {
            for &v in x {
                let mu = model.memberships(v);
                for t in 0..m {
                    out[t] += mu[t];
                }
            }
            for slot in out.iter_mut().take(m) {
                *slot /= x.len() as f64;
            }
        }
    }
    Ok(out)
}

/// Principal-component scores of one record. Two slots; slot 2 is zero when
/// only one component is requested.
pub fn pca_scores_sf(x: &[f64], model: &PcaModel, s_d: usize) -> Result<[f64; 2]> {
    if s_d < 1 || s_d > 2 {
        return Err(Error::Parameter {
            name: "components".into(),
            message: format!("count {s_d} outside [1,2]"),
        });
    }
    if s_d > model.components() {
        return Err(Error::Model(format!(
            "model holds {} component(s), {s_d} requested",
            model.components()
        )));
    }
    let scores = model.transform(x)?;
    let mut out = [0.0f64; 2];
    for (slot, s) in out.iter_mut().zip(scores.iter()).take(s_d) {
        *slot = *s;
    }
    Ok(out)
}
