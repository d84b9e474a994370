use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Eigenpairs sorted by ascending eigenvalue; columns of `vectors` are orthonormal.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn dense(h: &DMatrix<f64>) -> Result<Self> {
        if h.nrows() == 0 || h.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigensolverFailure("empty or non-finite matrix".into()));
        }
        let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::EigensolverFailure("symmetric QR did not converge".into()))?;
        let mut order: Vec<usize> = (0..h.nrows()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(h.nrows(), h.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `max_n ||H v_n - E_n v_n||`.
    pub fn max_residual(&self, h: &DMatrix<f64>) -> f64 {
        let hv = h * &self.vectors;
        (0..self.dim())
            .map(|n| (hv.column(n) - self.vectors.column(n) * self.values[n]).norm())
            .fold(0.0, f64::max)
    }

    /// `max |V^T V - 1|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        (g - DMatrix::identity(self.dim(), self.dim())).amax()
    }

    /// Spectral measure `p_n = <n|v>^2` of `v`.
    pub fn measure(&self, v: &DVector<f64>) -> SpectralMeasure {
        let c = self.vectors.tr_mul(v);
        SpectralMeasure { energies: self.values.clone(), weights: c.iter().map(|x| x * x).collect() }
    }
}

/// Discrete measure `sum_n p_n delta_{E_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralMeasure {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_n p_n exp(-i t E_n)`.
    pub fn amplitude(&self, t: f64) -> Complex<f64> {
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(&e, &p)| Complex::from_polar(p, -t * e))
            .sum()
    }

    pub fn amplitudes(&self, times: &[f64]) -> Vec<Complex<f64>> {
        times.par_iter().map(|&t| self.amplitude(t)).collect()
    }
}

/// Lanczos recursion with full reorthogonalization.
#[derive(Debug, Clone)]
pub struct Lanczos {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub basis: Vec<DVector<f64>>,
    pub start_norm: f64,
}

impl Lanczos {
    pub fn run<F>(apply: F, start: &DVector<f64>, max_steps: usize) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let start_norm = start.norm();
        if !(start_norm > 0.0) || !start_norm.is_finite() {
            return Err(Error::EigensolverFailure("Lanczos start vector is zero".into()));
        }
        let mut q = start / start_norm;
        let mut out = Self { alpha: vec![], beta: vec![], basis: vec![], start_norm };
        let steps = max_steps.min(start.len()).max(1);
        for k in 0..steps {
            let mut w = apply(&q);
            let a = q.dot(&w);
            w.axpy(-a, &q, 1.0);
            if let (Some(prev), Some(&b)) = (out.basis.last(), out.beta.last()) {
                w.axpy(-b, prev, 1.0);
            }
            out.basis.push(q.clone());
            for _ in 0..2 {
                for v in &out.basis {
                    let c = v.dot(&w);
                    w.axpy(-c, v, 1.0);
                }
            }
            out.alpha.push(a);
            let b = w.norm();
            if k + 1 == steps || b <= 1e-12 * (a.abs() + out.beta.last().copied().unwrap_or(0.0) + 1.0) {
                break;
            }
            out.beta.push(b);
            q = w / b;
        }
        Ok(out)
    }

    pub fn steps(&self) -> usize {
        self.alpha.len()
    }

    fn tridiagonal(&self) -> Result<EigenDecomposition> {
        let k = self.steps();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                self.alpha[i]
            } else if i == j + 1 {
                self.beta[j]
            } else if j == i + 1 {
                self.beta[i]
            } else {
                0.0
            }
        });
        EigenDecomposition::dense(&t)
    }

    /// Gauss quadrature for the spectral measure of the start vector.
    pub fn measure(&self) -> Result<SpectralMeasure> {
        let eig = self.tridiagonal()?;
        let n2 = self.start_norm * self.start_norm;
        Ok(SpectralMeasure {
            energies: eig.values.clone(),
            weights: (0..eig.dim()).map(|i| n2 * eig.vectors[(0, i)].powi(2)).collect(),
        })
    }

    /// Lowest Ritz pair `(theta, y)` and its residual `beta_k |e_k^T s|`.
    pub fn lowest_ritz(&self) -> Result<(f64, DVector<f64>, f64)> {
        let eig = self.tridiagonal()?;
        let s = eig.vectors.column(0);
        let mut y = DVector::zeros(self.basis[0].len());
        for (c, v) in s.iter().zip(&self.basis) {
            y.axpy(*c, v, 1.0);
        }
        let last = s[self.steps() - 1].abs();
        let residual = if self.beta.len() >= self.steps() { self.beta[self.steps() - 1] * last } else { 0.0 };
        Ok((eig.values[0], y, residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (i as f64).sqrt()
            } else {
                0.1 / (1.0 + (i as f64 - j as f64).abs()).powi(2)
            }
        })
    }

    #[test]
    fn dense_residuals() {
        let h = test_matrix(60);
        let e = EigenDecomposition::dense(&h).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let norm = h.norm();
        assert!(e.max_residual(&h) <= 1e-10 * norm);
        assert!(e.orthonormality_defect() <= 1e-10);
        let v = DVector::from_fn(60, |i, _| (i as f64 * 0.3).cos());
        assert!((e.measure(&v).total() - v.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense() {
        let h = test_matrix(80);
        let e = EigenDecomposition::dense(&h).unwrap();
        let mut v = DVector::zeros(80);
        v[0] = 1.0;
        let l = Lanczos::run(|x| &h * x, &v, 80).unwrap();
        let (theta, y, res) = l.lowest_ritz().unwrap();
        assert!((theta - e.values[0]).abs() < 1e-10);
        assert!(res < 1e-8);
        assert!((y.dot(&e.vectors.column(0)).abs() - 1.0).abs() < 1e-10);
        let lm = l.measure().unwrap();
        let dm = e.measure(&v);
        for t in [0.0, 0.7, 3.0, 11.0] {
            assert!((lm.amplitude(t) - dm.amplitude(t)).norm() < 1e-9);
        }
    }

    #[test]
    fn measure_of_eigenvector_is_a_point_mass() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let e = EigenDecomposition::dense(&h).unwrap();
        let v = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let a = e.measure(&v).amplitude(2.0);
        assert!((a - Complex::from_polar(1.0, -4.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        let h = DMatrix::from_element(2, 2, f64::NAN);
        assert!(matches!(EigenDecomposition::dense(&h), Err(Error::EigensolverFailure(_))));
    }
}
