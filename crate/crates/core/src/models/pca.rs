//! Principal component analysis with a deterministic cyclic Jacobi
//! eigensolver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaModel {
    mean: Vec<f64>,
    /// Columnwise scale divisors; all 1 when unnormalized.
    scales: Vec<f64>,
    /// One orthonormal row per retained component, sign-fixed so the
    /// largest-magnitude entry is positive.
    loadings: Vec<Vec<f64>>,
    normalized: bool,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues, eigenvectors as rows), sorted by descending
/// eigenvalue. Deterministic: fixed sweep order, no randomization.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    // v holds the accumulated rotations; eigenvector j is column j.
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&j| a[j][j]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i][j]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

impl PcaModel {
    /// Fits on a training matrix, one observation per row. Covariance uses
    /// divisor n (matching the divisor-K standard deviation elsewhere).
    pub fn fit(rows: &[&[f64]], s_d: usize, normalize: bool) -> Result<PcaModel> {
        let n_rows = rows.len();
        if n_rows < 2 {
            return Err(Error::EmptyData(
                "component analysis needs at least two observations".into(),
            ));
        }
        let dim = rows[0].len();
        for r in rows {
            if r.len() != dim {
                return Err(Error::ShapeMismatch {
                    what: "training rows".into(),
                    expected: dim,
                    actual: r.len(),
                });
            }
        }
        if s_d < 1 || s_d > dim.min(n_rows - 1) {
            return Err(Error::Model(format!(
                "cannot retain {s_d} component(s) from {n_rows} observations of dimension {dim}"
            )));
        }
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, &x) in mean.iter_mut().zip(r.iter()) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n_rows as f64;
        }
        let mut scales = vec![1.0; dim];
        if normalize {
            for j in 0..dim {
                let var = rows
                    .iter()
                    .map(|r| (r[j] - mean[j]) * (r[j] - mean[j]))
                    .sum::<f64>()
                    / n_rows as f64;
                let s = var.sqrt();
                if s == 0.0 {
                    return Err(Error::Degenerate(format!(
                        "column {} is constant; cannot normalize its variance",
                        j + 1
                    )));
                }
                scales[j] = s;
            }
        }
        let mut cov = vec![vec![0.0; dim]; dim];
        for r in rows {
            let z: Vec<f64> = (0..dim).map(|j| (r[j] - mean[j]) / scales[j]).collect();
            for i in 0..dim {
                for j in i..dim {
                    cov[i][j] += z[i] * z[j];
                }
            }
        }
        for i in 0..dim {
            for j in i..dim {
                cov[i][j] /= n_rows as f64;
                cov[j][i] = cov[i][j];
            }
        }
        let (_, vectors) = jacobi_eigen(cov);
        let mut loadings: Vec<Vec<f64>> = vectors.into_iter().take(s_d).collect();
        for row in &mut loadings {
            let mut best = 0usize;
            for (i, v) in row.iter().enumerate() {
                if v.abs() > row[best].abs() {
                    best = i;
                }
            }
            if row[best] < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
        }
        Ok(PcaModel {
            mean,
            scales,
            loadings,
            normalized: normalize,
        })
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn components(&self) -> usize {
        self.loadings.len()
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn loadings(&self) -> &[Vec<f64>] {
        &self.loadings
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Projects one observation onto the retained components.
    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension() {
            return Err(Error::ShapeMismatch {
                what: "observation".into(),
                expected: self.dimension(),
                actual: x.len(),
            });
        }
        Ok(self
            .loadings
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &l)| l * (x[j] - self.mean[j]) / self.scales[j])
                    .sum()
            })
            .collect())
    }

    /// Maps scores back to the original space (for reconstruction-error
    /// checks).
    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        (0..self.dimension())
            .map(|j| {
                let z: f64 = self
                    .loadings
                    .iter()
                    .zip(scores.iter())
                    .map(|(row, &s)| row[j] * s)
                    .sum();
                z * self.scales[j] + self.mean[j]
            })
            .collect()
    }
}

/// Channel-wise projection: at each sample position the S channel values
/// form one observation; always emits two output series, the second all
/// zero when only one component is retained.
pub fn pca_transform_channels(channels: &[&[f64]], model: &PcaModel) -> Result<[Vec<f64>; 2]> {
    if channels.len() != model.dimension() {
        return Err(Error::ShapeMismatch {
            what: "channel count".into(),
            expected: model.dimension(),
            actual: channels.len(),
        });
    }
    let k_count = channels.first().map_or(0, |c| c.len());
    for c in channels {
        if c.len() != k_count {
            return Err(Error::ShapeMismatch {
                what: "channel length".into(),
                expected: k_count,
                actual: c.len(),
            });
        }
    }
    let mut out = [vec![0.0; k_count], vec![0.0; k_count]];
    let mut observation = vec![0.0; channels.len()];
    for k in 0..k_count {
        for (j, c) in channels.iter().enumerate() {
            observation[j] = c[k];
        }
        let scores = model.transform(&observation)?;
        for (slot, s) in out.iter_mut().zip(scores.iter()) {
            slot[k] = *s;
        }
    }
    Ok(out)
}
