//! Piecewise-linear membership functions for discretization and
//! fuzzification, with four breakpoint design methods.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seed for the clustering design; fixed so refits are reproducible.
const CLUSTER_SEED: u64 = 42;
const KMEANS_MAX_ITERS: usize = 100;
const KMEANS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignMethod {
    /// Breakpoints at quantiles, giving approximately equal term
    /// frequencies.
    Median,
    /// Breakpoints equally spaced between the data minimum and maximum.
    EqualDistribution,
    /// Breakpoints at 1-D k-means cluster centers.
    Clustering,
    /// Breakpoints supplied by the caller.
    Fix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipModel {
    /// Strictly ascending term peaks c_1 < ... < c_m, m in [2, 5].
    breakpoints: Vec<f64>,
}

/// Linear-interpolation quantile of pre-sorted values, q in [0, 1].
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Rounds to two significant digits (half away from zero).
fn round_two_significant(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let digits = v.abs().log10().ceil();
    let scale = 10f64.powf(2.0 - digits);
    (v * scale).round() / scale
}

fn kmeans_1d(values: &[f64], k: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(CLUSTER_SEED);
    // k-means++ seeding.
    let mut centers = Vec::with_capacity(k);
    centers.push(values[rng.gen_range(0..values.len())]);
    while centers.len() < k {
        let dists: Vec<f64> = values
            .iter()
            .map(|&v| {
                centers
                    .iter()
                    .map(|&c| (v - c) * (v - c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = dists.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = values.len() - 1;
            for (i, d) in dists.iter().enumerate() {
                if target < *d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            values[chosen]
        } else {
            values[rng.gen_range(0..values.len())]
        };
        centers.push(next);
    }
    let mut assignment = vec![0usize; values.len()];
    for _ in 0..KMEANS_MAX_ITERS {
        for (slot, &v) in assignment.iter_mut().zip(values.iter()) {
            let mut best = 0;
            for (j, &c) in centers.iter().enumerate() {
                if (v - c).abs() < (v - centers[best]).abs() {
                    best = j;
                }
            }
            *slot = best;
        }
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&cluster, &v) in assignment.iter().zip(values.iter()) {
            sums[cluster] += v;
            counts[cluster] += 1;
        }
        let mut shift = 0.0f64;
        for j in 0..k {
            let new = if counts[j] > 0 {
                sums[j] / counts[j] as f64
            } else {
                // Revive an empty cluster at the value farthest from every
                // current center (first occurrence on ties).
                let mut best_idx = 0;
                let mut best_dist = -1.0;
                for (i, &v) in values.iter().enumerate() {
                    let d = centers
                        .iter()
                        .map(|&c| (v - c).abs())
                        .fold(f64::INFINITY, f64::min);
                    if d > best_dist {
                        best_dist = d;
                        best_idx = i;
                    }
                }
                values[best_idx]
            };
            shift = shift.max((new - centers[j]).abs());
            centers[j] = new;
        }
        if shift < KMEANS_TOLERANCE {
            break;
        }
    }
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    centers
}

impl MembershipModel {
    pub fn fit(
        values: &[f64],
        m: usize,
        design: DesignMethod,
        fix_params: Option<&[f64]>,
        interpretable_rounding: bool,
    ) -> Result<MembershipModel> {
        if !(2..=5).contains(&m) {
            return Err(Error::Parameter {
                name: "terms".into(),
                message: format!("term count {m} outside [2, 5]"),
            });
        }
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        let mut breakpoints = match design {
            DesignMethod::Fix => {
                let params = fix_params.ok_or_else(|| Error::Parameter {
                    name: "fix_params".into(),
                    message: "fixed design needs explicit breakpoints".into(),
                })?;
                if params.len() != m {
                    return Err(Error::Parameter {
                        name: "fix_params".into(),
                        message: format!("expected {m} breakpoints, got {}", params.len()),
                    });
                }
                params.to_vec()
            }
            DesignMethod::EqualDistribution => {
                if finite.is_empty() {
                    return Err(Error::EmptyData("no finite training values".into()));
                }
                let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
                let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (0..m)
                    .map(|t| min + t as f64 * (max - min) / (m - 1) as f64)
                    .collect()
            }
            DesignMethod::Median => {
                let mut sorted = finite.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if sorted.is_empty() {
                    return Err(Error::EmptyData("no finite training values".into()));
                }
                (1..=m)
                    .map(|t| quantile_sorted(&sorted, (t as f64 - 0.5) / m as f64))
                    .collect()
            }
            DesignMethod::Clustering => {
                let mut distinct = finite.clone();
                distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
                distinct.dedup();
                if distinct.len() < m {
                    return Err(Error::EmptyData(format!(
                        "clustering into {m} terms needs {m} distinct values, found {}",
                        distinct.len()
                    )));
                }
                kmeans_1d(&finite, m)
            }
        };
        if interpretable_rounding {
            for b in &mut breakpoints {
                *b = round_two_significant(*b);
            }
            breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        for w in breakpoints.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Degenerate(format!(
                    "breakpoints must be strictly ascending, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(MembershipModel { breakpoints })
    }

    pub fn term_count(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Triangular partition of unity; outermost terms keep membership 1
    /// beyond their peaks. Slots past the term count stay zero.
    pub fn memberships(&self, v: f64) -> [f64; 5] {
        let c = &self.breakpoints;
        let m = c.len();
        let mut out = [0.0f64; 5];
        if v.is_nan() {
            for slot in out.iter_mut().take(m) {
                *slot = f64::NAN;
            }
            return out;
        }
        if v <= c[0] {
            out[0] = 1.0;
            return out;
        }
        if v >= c[m - 1] {
            out[m - 1] = 1.0;
            return out;
        }
        for t in 0..m - 1 {
            if v <= c[t + 1] {
                let alpha = (v - c[t]) / (c[t + 1] - c[t]);
                out[t] = 1.0 - alpha;
                out[t + 1] = alpha;
                return out;
            }
        }
        unreachable!("breakpoints are ascending and v is interior");
    }

    /// 0-based index of the maximal membership; ties resolve to the lower
    /// term.
    pub fn winning_term(&self, v: f64) -> usize {
        let mu = self.memberships(v);
        let mut best = 0;
        for t in 1..self.term_count() {
            if mu[t] > mu[best] {
                best = t;
            }
        }
        best
    }

    /// Replaces every sample by the peak value of its winning term.
    pub fn discretize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .map(|&v| {
                if v.is_nan() {
                    f64::NAN
                } else {
                    self.breakpoints[self.winning_term(v)]
                }
            })
            .collect()
    }
}
