//! Norm reference curves: pointwise mean and floored pointwise spread over
//! a group of reference records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormModel {
    mu: Vec<f64>,
    /// Pointwise divisor-n standard deviation, floored away from zero.
    sigma: Vec<f64>,
    /// The floor applied to `sigma`.
    floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationKind {
    Signed,
    Abs,
}

impl NormModel {
    pub fn fit(reference_rows: &[&[f64]]) -> Result<NormModel> {
        let n = reference_rows.len();
        if n < 2 {
            return Err(Error::EmptyData(
                "a norm curve needs at least two reference records".into(),
            ));
        }
        let k_count = reference_rows[0].len();
        for r in reference_rows {
            if r.len() != k_count {
                return Err(Error::ShapeMismatch {
                    what: "reference records".into(),
                    expected: k_count,
                    actual: r.len(),
                });
            }
        }
        let mut mu = vec![0.0; k_count];
        for r in reference_rows {
            for (m, &x) in mu.iter_mut().zip(r.iter()) {
                *m += x;
            }
        }
        for m in &mut mu {
            *m /= n as f64;
        }
        let mut sigma = vec![0.0; k_count];
        for (k, s) in sigma.iter_mut().enumerate() {
            let var = reference_rows
                .iter()
                .map(|r| (r[k] - mu[k]) * (r[k] - mu[k]))
                .sum::<f64>()
                / n as f64;
            *s = var.sqrt();
        }
        // Floor relative to the overall spread of the reference values so
        // flat sample points cannot blow up the deviations.
        let count = (n * k_count) as f64;
        let grand_mean = reference_rows
            .iter()
            .flat_map(|r| r.iter())
            .sum::<f64>()
            / count;
        let grand_var = reference_rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|&x| (x - grand_mean) * (x - grand_mean))
            .sum::<f64>()
            / count;
        let grand_std = grand_var.sqrt();
        let eps = 1e-9 * if grand_std == 0.0 { 1.0 } else { grand_std };
        for s in &mut sigma {
            if *s < eps {
                *s = eps;
            }
        }
        Ok(NormModel {
            mu,
            sigma,
            floor: eps,
        })
    }

    /// Number of sample points whose spread sits at the floor.
    pub fn floored_points(&self) -> usize {
        self.sigma.iter().filter(|s| **s == self.floor).count()
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Per-sample deviation from the norm curve, scaled by the pointwise
    /// spread.
    pub fn deviation_series(&self, x: &[f64], kind: DeviationKind) -> Result<Vec<f64>> {
        if x.len() != self.len() {
            return Err(Error::ShapeMismatch {
                what: "deviation input".into(),
                expected: self.len(),
                actual: x.len(),
            });
        }
        Ok((0..x.len())
            .map(|k| {
                let d = (x[k] - self.mu[k]) / self.sigma[k];
                match kind {
                    DeviationKind::Signed => d,
                    DeviationKind::Abs => d.abs(),
                }
            })
            .collect())
    }
}
