//! Small sample-statistics helpers shared by the Monte Carlo checks.

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl MeanEstimate {
    /// Mean and standard error (unbiased variance) of `values`.
    ///
    /// Panics on fewer than two values.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 2, "need at least two values for a standard error");
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        Self {
            mean,
            stderr: (var / nf).sqrt(),
            count: n,
        }
    }

    /// `|mean − expected|` in units of the standard error.
    pub fn z_score(&self, expected: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.mean == expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - expected).abs() / self.stderr
        }
    }
}

/// Sample covariance matrix (row-major, `dim × dim`) of the given rows.
#[allow(clippy::needless_range_loop)]
pub fn sample_covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    assert!(n >= 2);
    let dim = rows[0].len();
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = vec![vec![0.0; dim]; dim];
    for r in rows {
        for i in 0..dim {
            let di = r[i] - mean[i];
            for j in i..dim {
                cov[i][j] += di * (r[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}
