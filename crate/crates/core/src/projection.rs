//! Principal component analysis fitted on reference samples.
//!
//! Features are z-scored with the reference statistics, the covariance of the
//! standardised data is diagonalised with cyclic Jacobi rotations, and the
//! eigenvectors are ordered by decreasing eigenvalue. Any other sample (a
//! syntonet, say) is projected with the same statistics and never influences
//! the fit.

use crate::error::{domain, Error, Result};

const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// Length of the raw input vectors.
    pub input_dim: usize,
    /// Input coordinates used by the fit.
    pub kept: Vec<usize>,
    /// Input coordinates dropped for having zero variance.
    pub dropped: Vec<usize>,
    /// Per kept coordinate.
    pub feature_means: Vec<f64>,
    /// Per kept coordinate; sample standard deviation.
    pub feature_stds: Vec<f64>,
    /// Orthonormal eigenvectors over the kept coordinates, strongest first.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Eigen-decomposition of a symmetric matrix (row-major, `n x n`) by cyclic
/// Jacobi rotations. Returns unsorted eigenvalues and the eigenvectors as
/// columns of a row-major matrix.
pub fn jacobi_eigen(matrix: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: matrix.len(),
        });
    }
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) >= JACOBI_TOLERANCE {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numeric(format!("Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J, touching rows and columns p and q.
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[i * n + i]).collect(), v))
}

/// Fits the projection on `samples` (rows of equal length).
pub fn fit<R: AsRef<[f64]>>(samples: &[R]) -> Result<PcaModel> {
    let m = samples.len();
    if m < 2 {
        return domain(format!("PCA needs at least 2 samples, got {m}"));
    }
    let dim = samples[0].as_ref().len();
    if let Some(bad) = samples.iter().find(|r| r.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.as_ref().len(),
        });
    }
    if samples.iter().flat_map(|r| r.as_ref()).any(|x| !x.is_finite()) {
        return domain("PCA input has non-finite entries");
    }
    let mut warnings = Vec::new();
    if m <= dim {
        warnings.push(format!("{m} samples for {dim} features: covariance is rank deficient"));
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut means = Vec::new();
    let mut stds = Vec::new();
    for c in 0..dim {
        let mean = samples.iter().map(|r| r.as_ref()[c]).sum::<f64>() / m as f64;
        let var = samples.iter().map(|r| (r.as_ref()[c] - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let std = var.sqrt();
        if std <= 1e-12 * mean.abs().max(1.0) {
            dropped.push(c);
        } else {
            kept.push(c);
            means.push(mean);
            stds.push(std);
        }
    }
    if !dropped.is_empty() {
        warnings.push(format!("dropped {} zero-variance features: {dropped:?}", dropped.len()));
    }
    let d = kept.len();
    if d == 0 {
        return domain("every feature is constant");
    }
    let z: Vec<Vec<f64>> = samples
        .iter()
        .map(|r| {
            let r = r.as_ref();
            kept.iter()
                .enumerate()
                .map(|(k, &c)| (r[c] - means[k]) / stds[k])
                .collect()
        })
        .collect();
    let mut cov = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let s = z.iter().map(|row| row[i] * row[j]).sum::<f64>() / (m - 1) as f64;
            cov[i * d + j] = s;
            cov[j * d + i] = s;
        }
    }
    let (values, vectors) = jacobi_eigen(&cov, d)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let components: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..d).map(|i| vectors[i * d + k]).collect();
            let lead = col
                .iter()
                .copied()
                .reduce(|best, x| if x.abs() > best.abs() { x } else { best })
                .unwrap_or(1.0);
            if lead < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let total: f64 = eigenvalues.iter().map(|v| v.max(0.0)).sum();
    let explained_variance_ratio = eigenvalues.iter().map(|v| v.max(0.0) / total).collect();
    Ok(PcaModel {
        input_dim: dim,
        kept,
        dropped,
        feature_means: means,
        feature_stds: stds,
        components,
        eigenvalues,
        explained_variance_ratio,
        warnings,
    })
}

impl PcaModel {
    /// The kept coordinates of `f`, z-scored.
    pub fn standardize(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: f.len(),
            });
        }
        Ok(self
            .kept
            .iter()
            .enumerate()
            .map(|(k, &c)| (f[c] - self.feature_means[k]) / self.feature_stds[k])
            .collect())
    }

    /// Coordinates of `f` along every component.
    pub fn project_all(&self, f: &[f64]) -> Result<Vec<f64>> {
        let z = self.standardize(f)?;
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(&z).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// First two principal coordinates of `f`. A one-component model reports 0
/// for the second.
pub fn project(model: &PcaModel, f: &[f64]) -> Result<(f64, f64)> {
    let all = model.project_all(f)?;
    Ok((all[0], all.get(1).copied().unwrap_or(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_on_known_matrix() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1.
        let (mut vals, _) = jacobi_eigen(&[2.0, 1.0, 1.0, 2.0], 2).unwrap();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        assert!(jacobi_eigen(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn line_data_is_rank_one() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 0.3, 2.0 * i as f64 * 0.3]).collect();
        let m = fit(&rows).unwrap();
        assert!(m.explained_variance_ratio[0] >= 0.999);
    }

    #[test]
    fn centering_and_unit_step() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                vec![t.sin() * 3.0 + 1.0, (t * 0.7).cos() * 0.2, t % 7.0, 5.0]
            })
            .collect();
        let m = fit(&rows).unwrap();
        assert_eq!(m.dropped, vec![3]);
        assert_eq!(m.kept, vec![0, 1, 2]);
        let mut at_mean = vec![0.0; 4];
        for (k, &c) in m.kept.iter().enumerate() {
            at_mean[c] = m.feature_means[k];
        }
        let (a, b) = project(&m, &at_mean).unwrap();
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        let mut step = at_mean.clone();
        for (k, &c) in m.kept.iter().enumerate() {
            step[c] += m.feature_stds[k] * m.components[0][k];
        }
        let (a, b) = project(&m, &step).unwrap();
        assert!((a - 1.0).abs() < 1e-9 && b.abs() < 1e-9);
        assert!(project(&m, &[1.0, 2.0]).is_err());
        assert!(!m.warnings.is_empty());
    }

    #[test]
    fn sign_convention() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![-(i as f64), (i as f64).sqrt(), (i % 4) as f64]).collect();
        let m = fit(&rows).unwrap();
        for c in &m.components {
            let lead = c.iter().copied().reduce(|a, b| if b.abs() > a.abs() { b } else { a }).unwrap();
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(fit(&[vec![1.0, 2.0]]).is_err());
        assert!(fit(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(fit(&[vec![1.0, 2.0], vec![1.0, 2.0]]).is_err());
        assert!(fit(&[vec![1.0, f64::NAN], vec![2.0, 1.0]]).is_err());
    }
}
