//! Dilation generator on the s-wave line, the commutator `[omega, iD] = xi`,
//! the compressed Mourre constant and a weighted resolvent probe.
//!
//! With `u(r) = sqrt(4 pi) r psi(r)`, the 3D dilation generator
//! `D = (i/2)(k.grad + grad.k)` acts on `L^2(dr)` as `D = i (r d/dr + 1/2)`,
//! so `D = i S` with `S` real and antisymmetric. On a grid, `S` is the
//! antisymmetric part of `W^{1/2} R W^{-1/2}` where `R` is the central
//! difference form of `r d/dr + 1/2` and `W` holds the quadrature weights.
//! `[omega, iD] = S Omega - Omega S`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::chi_cutoff;
use crate::error::{Error, Result};
use crate::fockoracle::basis::FockBasis;
use crate::fockoracle::hamiltonian::{assemble_rows, spin_energy};
use crate::fockoracle::{build_grid, DiscretizedField, EigenDecomposition, GridScheme, OracleConfig, RadialGrid};
use crate::model::ModelParams;

/// Rank cut on the spectral cutoff `chi(H_Pbar)`.
pub const CHI_RANK_CUT: f64 = 1e-8;

/// `D = i S` in the mode basis of a radial grid.
#[derive(Debug, Clone)]
pub struct DilationMatrix {
    s: DMatrix<f64>,
    nodes: Vec<f64>,
}

impl DilationMatrix {
    pub fn new(grid: &RadialGrid) -> Self {
        let k = grid.nodes();
        let w = grid.weights();
        let n = k.len();
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            let (lo, hi) = (j.saturating_sub(1), (j + 1).min(n - 1));
            let step = k[hi] - k[lo];
            a[(j, hi)] += k[j] / step * (w[j] / w[hi]).sqrt();
            a[(j, lo)] -= k[j] / step * (w[j] / w[lo]).sqrt();
        }
        let s = (&a - a.transpose()) * 0.5;
        Self { s, nodes: k.to_vec() }
    }

    /// Real antisymmetric `S` with `D = i S`.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// `max |S + S^T|`, zero by construction.
    pub fn skew_defect(&self) -> f64 {
        (&self.s + self.s.transpose()).amax()
    }

    /// `rho = (D^2 + 1)^{-1/2} = (S^T S + 1)^{-1/2}`.
    pub fn weight(&self) -> DMatrix<f64> {
        let m = self.s.transpose() * &self.s + DMatrix::identity(self.dim(), self.dim());
        let eig = SymmetricEigen::new(m);
        let d = eig.eigenvalues.map(|x| x.sqrt().recip());
        &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
    }

    /// `(S Omega - Omega S) v` for `Omega = diag(omega)`.
    pub fn commutator_apply(&self, omega: &[f64], v: &DVector<f64>) -> DVector<f64> {
        let wv = DVector::from_iterator(v.len(), omega.iter().zip(v.iter()).map(|(w, x)| w * x));
        let swv = &self.s * wv;
        let sv = &self.s * v;
        DVector::from_iterator(v.len(), (0..v.len()).map(|j| swv[j] - omega[j] * sv[j]))
    }
}

/// Discrete `L^2` norm of `[omega, iD] phi - xi phi` for a radial test function.
pub fn commutator_check<F>(test_fn: F, grid: &RadialGrid, params: &ModelParams<f64>) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let k = grid.nodes();
    let n = k.len();
    let phi: Vec<f64> = k.iter().map(|&r| test_fn(r)).collect();
    let peak = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let edge = [0, 1, n - 2, n - 1].iter().map(|&j| phi[j].abs()).fold(0.0, f64::max);
    if !(peak > 0.0) || edge > 1e-10 * peak {
        return Err(Error::SupportTouchesBoundary(edge));
    }
    let v = DVector::from_iterator(n, phi.iter().zip(grid.weights()).map(|(p, w)| p * w.sqrt()));
    let omega: Vec<f64> = k.iter().map(|&r| params.omega_raw(r)).collect();
    let lhs = DilationMatrix::new(grid).commutator_apply(&omega, &v);
    let err: f64 = (0..n).map(|j| (lhs[j] - params.xi_raw(k[j]) * v[j]).powi(2)).sum();
    Ok(err.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MourreReport {
    pub g: f64,
    /// Best `alpha` with `chi A chi >= alpha chi^2` on the truncated space.
    pub alpha_num: f64,
    /// Smallest eigenvalue of `chi A chi` itself on the range of `chi`.
    pub compressed_min: f64,
    /// `(e1 - 3 delta/4, e1 + 3 delta/4)`.
    pub chi_window: [f64; 2],
    pub range_dim: usize,
    /// `|| sigma_1 Phi(s) ||` on the truncated space.
    pub coupling_norm: f64,
    /// `delta / 10 - g * coupling_norm`.
    pub reference_bound: f64,
    pub modes: usize,
    pub n_max: usize,
    pub k_max: f64,
    pub scheme: GridScheme,
}

/// Sector matrices with the `phi_1 Omega` row and column removed from sector 1.
struct Compressed {
    h: DMatrix<f64>,
    a: DMatrix<f64>,
}

fn compressed_sectors(params: &ModelParams<f64>, config: &OracleConfig) -> Result<(Vec<Compressed>, DiscretizedField, RadialGrid)> {
    if config.n_max != 1 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: config.n_max as f64,
            reason: "the Mourre checks run on the one-boson truncation",
        });
    }
    let grid = build_grid(config.modes, config.k_max, config.scheme)?;
    let field = DiscretizedField::new(params, &grid);
    let g = params.g();
    let mut out = Vec::with_capacity(2);
    for parity in 0..2 {
        let basis = FockBasis::sector(config.modes, config.n_max, parity, config.basis_cap)?;
        let h_diag = |i: usize| {
            let s = basis.state(i);
            spin_energy(params, s.spin) + s.modes.iter().map(|&j| field.omega[j as usize]).sum::<f64>()
        };
        let a_diag = |i: usize| basis.state(i).modes.iter().map(|&j| field.xi[j as usize]).sum::<f64>();
        let to_dense = |m: nalgebra_sparse::CsrMatrix<f64>| {
            let mut d = DMatrix::zeros(m.nrows(), m.ncols());
            for (i, j, v) in m.triplet_iter() {
                d[(i, j)] = *v;
            }
            d
        };
        let mut h = to_dense(assemble_rows(&basis, &field.coupling, g, h_diag)?);
        let mut a = to_dense(assemble_rows(&basis, &field.dilation_coupling, g, a_diag)?);
        if parity == 1 {
            let v = basis.vacuum_index();
            h = h.remove_row(v).remove_column(v);
            a = a.remove_row(v).remove_column(v);
        }
        out.push(Compressed { h, a });
    }
    Ok((out, field, grid))
}

/// `chi(H_Pbar) (dGamma(xi) + g sigma_1 Phi(s)) chi(H_Pbar)` on the one-boson truncation.
pub fn mourre_constant(params: &ModelParams<f64>, config: &OracleConfig) -> Result<MourreReport> {
    let (sectors, field, _) = compressed_sectors(params, config)?;
    let mut alpha = f64::INFINITY;
    let mut compressed_min = f64::INFINITY;
    let mut range_dim = 0;
    for sec in &sectors {
        let eig = EigenDecomposition::dense(&sec.h)?;
        let keep: Vec<usize> =
            (0..eig.dim()).filter(|&n| chi_cutoff(eig.values[n], 1.0, params) > CHI_RANK_CUT).collect();
        if keep.is_empty() {
            continue;
        }
        range_dim += keep.len();
        let v = eig.vectors.select_columns(&keep);
        let c = DMatrix::from_diagonal(&DVector::from_iterator(
            keep.len(),
            keep.iter().map(|&n| chi_cutoff(eig.values[n], 1.0, params)),
        ));
        let va = v.transpose() * &sec.a * &v;
        alpha = alpha.min(SymmetricEigen::new(va.clone()).eigenvalues.min());
        compressed_min = compressed_min.min(SymmetricEigen::new(&c * va * &c).eigenvalues.min());
    }
    if range_dim == 0 {
        return Err(Error::EmptyCutoffRange);
    }
    let delta = params.delta_gap();
    let coupling_norm = field.dilation_coupling.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(MourreReport {
        g: params.g(),
        alpha_num: alpha,
        compressed_min,
        chi_window: [params.e1() - 0.75 * delta, params.e1() + 0.75 * delta],
        range_dim,
        coupling_norm,
        reference_bound: delta / 10.0 - params.g() * coupling_norm,
        modes: config.modes,
        n_max: config.n_max,
        k_max: config.k_max,
        scheme: config.scheme,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub eps: f64,
    /// `|| rho (H_Pbar - z - i eps)^{-1} rho ||`.
    pub weighted: f64,
    /// `|| (H_Pbar - z - i eps)^{-1} ||`.
    pub unweighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub g: f64,
    pub z: f64,
    pub spacing: f64,
    pub eps_floor: f64,
    pub modes: usize,
    pub rows: Vec<ProbeRow>,
}

impl ProbeReport {
    /// `norm(eps_{k+1}) / norm(eps_k)` for consecutive rows, weighted and unweighted.
    pub fn growth(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .map(|w| (w[1].weighted / w[0].weighted, w[1].unweighted / w[0].unweighted))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,weighted,unweighted\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.eps, r.weighted, r.unweighted));
        }
        out
    }
}

/// Weighted and unweighted resolvent norms on the one-boson block of the
/// `phi_1` sector of `H_Pbar`, with `rho = (dGamma(D)^2 + 1)^{-1/2}`.
pub fn weighted_resolvent_probe(
    params: &ModelParams<f64>,
    config: &OracleConfig,
    z: f64,
    eps_list: &[f64],
) -> Result<ProbeReport> {
    let (e1, delta) = (params.e1(), params.delta_gap());
    if !((z - e1).abs() <= delta / 4.0) {
        return Err(Error::InvalidParameter { name: "z", value: z, reason: "must lie in [e1 - delta/4, e1 + delta/4]" });
    }
    let (sectors, field, grid) = compressed_sectors(params, config)?;
    let inside: Vec<f64> = field.omega.iter().copied().filter(|&w| (w - e1).abs() <= delta / 2.0).collect();
    if inside.len() < 2 {
        return Err(Error::InvalidGrid("fewer than two modes near e1".into()));
    }
    let spacing = (inside[inside.len() - 1] - inside[0]) / (inside.len() - 1) as f64;
    let floor = 2.0 * spacing;
    if let Some(&eps) = eps_list.iter().find(|&&e| !(e >= floor)) {
        return Err(Error::EpsBelowSpacingFloor { eps, floor });
    }
    let eig = EigenDecomposition::dense(&sectors[1].h)?;
    let rho = DilationMatrix::new(&grid).weight();
    let u = eig.vectors.map(|x| Complex::new(x, 0.0));
    let rho_c = rho.map(|x| Complex::new(x, 0.0));
    let left = &rho_c * &u;
    let right = u.transpose() * &rho_c;
    let rows = eps_list
        .iter()
        .map(|&eps| {
            let d: Vec<Complex<f64>> =
                eig.values.iter().map(|&e| Complex::new(1.0, 0.0) / Complex::new(e - z, -eps)).collect();
            let unweighted = d.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let scaled = DMatrix::from_fn(left.nrows(), left.ncols(), |i, j| left[(i, j)] * d[j]);
            let m = scaled * &right;
            let weighted = m.singular_values().max();
            ProbeRow { eps, weighted, unweighted }
        })
        .collect();
    Ok(ProbeReport { g: params.g(), z, spacing, eps_floor: floor, modes: config.modes, rows })
}
