//! Riesz projector `P = (-2 pi i)^{-1} oint (H - z)^{-1} dz` on a circle,
//! trapezoidal in the angle.

use nalgebra::{DMatrix, DVector};
use nalgebra::linalg::SymmetricTridiagonal;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};

type C = Complex<f64>;

/// Condition estimate above which a shifted solve is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Circle `center + radius e^{i theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: f64,
    pub radius: f64,
}

impl Circle {
    /// `z_k = center + radius exp(2 pi i (k + 1/2) / n)`; the offset keeps nodes off the real axis for even `n`.
    pub fn nodes(&self, n: usize) -> Vec<C> {
        (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                Complex::new(self.center, 0.0) + Complex::from_polar(self.radius, th)
            })
            .collect()
    }
}

/// `P v ~ -(1/n) sum_k (z_k - c) (H - z_k)^{-1} v` given a shifted solver.
fn trapezoid<S>(circle: Circle, n: usize, rhs_len: usize, solve: S) -> Result<DVector<f64>>
where
    S: Fn(C) -> Result<Vec<C>> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n_nodes", value: n as f64, reason: "must be >= 2" });
    }
    let parts = circle
        .nodes(n)
        .into_par_iter()
        .map(|z| {
            let x = solve(z)?;
            let w = z - circle.center;
            Ok(x.into_iter().map(|v| (w * v).re).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = DVector::zeros(rhs_len);
    for p in parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a -= v / n as f64;
        }
    }
    Ok(acc)
}

/// Dense path: one Householder tridiagonalization, then a pivoted complex
/// tridiagonal solve per node.
pub fn project_dense(h: &DMatrix<f64>, v: &DVector<f64>, circle: Circle, n: usize) -> Result<DVector<f64>> {
    let (q, diag, off) = SymmetricTridiagonal::new(h.clone()).unpack();
    let rhs: Vec<C> = q.tr_mul(v).iter().map(|&x| Complex::new(x, 0.0)).collect();
    let off: Vec<C> = off.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let t_norm = (0..diag.len())
        .map(|i| {
            diag[i].abs() + if i > 0 { off[i - 1].re.abs() } else { 0.0 } + off.get(i).map_or(0.0, |o| o.re.abs())
        })
        .fold(0.0, f64::max);
    let y = trapezoid(circle, n, diag.len(), |z| {
        let d: Vec<C> = diag.iter().map(|&x| Complex::new(x, 0.0) - z).collect();
        shifted_solve(&off, &d, &rhs, z, t_norm)
    })?;
    Ok(q * y)
}

fn shifted_solve(off: &[C], d: &[C], rhs: &[C], z: C, t_norm: f64) -> Result<Vec<C>> {
    let fail = |cond: f64| Error::ContourCrossesSpectrum { re: z.re, im: z.im, cond };
    let n = d.len();
    let x = tridiagonal_solve(off, d, off, rhs).ok_or_else(|| fail(f64::INFINITY))?;
    let ones = vec![Complex::new(1.0, 0.0); n];
    let y = tridiagonal_solve(off, d, off, &ones).ok_or_else(|| fail(f64::INFINITY))?;
    let l1 = |v: &[C]| v.iter().map(|c| c.norm()).sum::<f64>();
    let inv = (l1(&x) / l1(rhs).max(f64::MIN_POSITIVE)).max(l1(&y) / n as f64);
    let cond = (t_norm + z.norm()) * inv;
    if !(cond <= CONDITION_LIMIT) {
        return Err(fail(cond));
    }
    Ok(x)
}

/// Gaussian elimination with partial pivoting on a tridiagonal system
/// (sub-diagonal `dl`, diagonal `d`, super-diagonal `du`). `None` if singular.
pub fn tridiagonal_solve(dl: &[C], d: &[C], du: &[C], b: &[C]) -> Option<Vec<C>> {
    let n = d.len();
    if n == 0 {
        return Some(vec![]);
    }
    let (mut dl, mut d, mut du, mut b) = (dl.to_vec(), d.to_vec(), du.to_vec(), b.to_vec());
    let zero = Complex::new(0.0, 0.0);
    // dl[k] is reused as the second super-diagonal after a row swap.
    for k in 0..n - 1 {
        if dl[k] == zero {
            if d[k] == zero {
                return None;
            }
        } else if d[k].l1_norm() >= dl[k].l1_norm() {
            let mult = dl[k] / d[k];
            d[k + 1] = d[k + 1] - mult * du[k];
            b[k + 1] = b[k + 1] - mult * b[k];
            if k + 2 < n {
                dl[k] = zero;
            }
        } else {
            let mult = d[k] / dl[k];
            d[k] = dl[k];
            let tmp = d[k + 1];
            d[k + 1] = du[k] - mult * tmp;
            if k + 2 < n {
                dl[k] = du[k + 1];
                du[k + 1] = -mult * dl[k];
            }
            du[k] = tmp;
            let tb = b[k];
            b[k] = b[k + 1];
            b[k + 1] = tb - mult * b[k + 1];
        }
    }
    if d[n - 1] == zero {
        return None;
    }
    b[n - 1] = b[n - 1] / d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for k in (0..n.saturating_sub(2)).rev() {
        b[k] = (b[k] - du[k] * b[k + 1] - dl[k] * b[k + 2]) / d[k];
    }
    if b.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return None;
    }
    Some(b)
}

/// Conjugate orthogonal conjugate gradient for complex symmetric `(H - z) x = b`.
pub fn cocg<F>(apply: F, z: C, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<C>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let op = |x: &[C]| -> Vec<C> {
        let re = apply(&DVector::from_iterator(x.len(), x.iter().map(|c| c.re)));
        let im = apply(&DVector::from_iterator(x.len(), x.iter().map(|c| c.im)));
        x.iter().enumerate().map(|(i, &xi)| Complex::new(re[i], im[i]) - z * xi).collect()
    };
    let dot = |a: &[C], b: &[C]| a.iter().zip(b).map(|(x, y)| x * y).sum::<C>();
    let norm = |a: &[C]| a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let n = b.len();
    let bn = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut x = vec![Complex::new(0.0, 0.0); n];
    let mut r: Vec<C> = b.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut p = r.clone();
    let mut rho = dot(&r, &r);
    for _ in 0..max_iter {
        if norm(&r) <= tol * bn {
            return Ok(x);
        }
        let q = op(&p);
        let pq = dot(&p, &q);
        if pq.norm() == 0.0 {
            break;
        }
        let alpha = rho / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        let rho_new = dot(&r, &r);
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if norm(&r) <= tol * bn {
        return Ok(x);
    }
    Err(Error::ContourCrossesSpectrum { re: z.re, im: z.im, cond: norm(&x) / bn.max(f64::MIN_POSITIVE) / tol })
}

/// Sparse path: one COCG solve per node.
pub fn project_iterative<F>(apply: F, v: &DVector<f64>, circle: Circle, n: usize, tol: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64> + Sync,
{
    let b: Vec<f64> = v.iter().copied().collect();
    trapezoid(circle, n, v.len(), |z| cocg(&apply, z, &b, tol, 20 * v.len().max(50)))
}
