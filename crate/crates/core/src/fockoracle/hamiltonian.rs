use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::basis::{FockBasis, Spin};
use super::field::DiscretizedField;

/// `H = K + sum omega_j n_j + g sigma_1 sum c_j (a_j + a_j^*)` on one parity sector.
#[derive(Debug, Clone)]
pub struct AssembledHamiltonian {
    pub matrix: CsrMatrix<f64>,
    pub params: ModelParams<f64>,
    pub n_max: usize,
    pub parity: usize,
}

impl AssembledHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (i, j, v) in self.matrix.triplet_iter() {
            m[(i, j)] = *v;
        }
        m
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        csr_apply(&self.matrix, x)
    }

    /// `max_i sum_j |H_ij|`.
    pub fn norm_inf(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.values().iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn csr_apply(m: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let out: Vec<f64> = (0..m.nrows())
        .into_par_iter()
        .map(|i| {
            let row = m.row(i);
            row.col_indices().iter().zip(row.values()).map(|(&j, &v)| v * x[j]).sum()
        })
        .collect();
    DVector::from_vec(out)
}

pub(crate) fn spin_energy(params: &ModelParams<f64>, s: Spin) -> f64 {
    match s {
        Spin::Down => params.e0(),
        Spin::Up => params.e1(),
    }
}

/// Row `i` of the matrix with off-diagonal weights `coupling` scaled by `g`:
/// diagonal `diag(i)`, plus `g c_j sqrt(n_j + 1)` to every raised and lowered neighbour.
pub(crate) fn assemble_rows<D>(basis: &FockBasis, coupling: &[f64], g: f64, diag: D) -> Result<CsrMatrix<f64>>
where
    D: Fn(usize) -> f64 + Sync,
{
    let dim = basis.dim();
    let rows: Vec<Vec<(usize, f64)>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            let s = basis.state(i);
            let mut row = vec![(i, diag(i))];
            if g != 0.0 {
                if s.number() < basis.n_max() {
                    for (j, &c) in coupling.iter().enumerate() {
                        let up = s.raised_flipped(j as u32);
                        let occ = up.occupation(j as u32) as f64;
                        if let Some(k) = basis.index_of(&up) {
                            row.push((k, g * c * occ.sqrt()));
                        }
                    }
                }
                let mut prev = None;
                for (pos, &j) in s.modes.iter().enumerate() {
                    if prev == Some(j) {
                        continue;
                    }
                    prev = Some(j);
                    let occ = s.occupation(j) as f64;
                    let mut modes = s.modes.clone();
                    modes.remove(pos);
                    let down = super::basis::FockState { spin: s.spin.flip(), modes };
                    if let Some(k) = basis.index_of(&down) {
                        row.push((k, g * coupling[j as usize] * occ.sqrt()));
                    }
                }
            }
            row.sort_unstable_by_key(|e| e.0);
            row
        })
        .collect();
    let mut offsets = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    offsets.push(0);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        offsets.push(cols.len());
    }
    CsrMatrix::try_from_csr_data(dim, dim, offsets, cols, vals)
        .map_err(|e| Error::EigensolverFailure(format!("CSR assembly: {e}")))
}

pub fn assemble(params: &ModelParams<f64>, field: &DiscretizedField, basis: &FockBasis) -> Result<AssembledHamiltonian> {
    if field.modes() != basis.modes() {
        return Err(Error::InvalidGrid(format!(
            "field has {} modes, basis has {}",
            field.modes(),
            basis.modes()
        )));
    }
    let diag = |i: usize| {
        let s = basis.state(i);
        spin_energy(params, s.spin) + s.modes.iter().map(|&j| field.omega[j as usize]).sum::<f64>()
    };
    let matrix = assemble_rows(basis, &field.coupling, params.g(), diag)?;
    Ok(AssembledHamiltonian { matrix, params: *params, n_max: basis.n_max(), parity: basis.parity() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockoracle::basis::{FockState, DEFAULT_BASIS_CAP};
    use crate::fockoracle::grid::{build_grid, GridScheme};

    fn setup(m: usize, n_max: usize, g: f64, parity: usize) -> (DiscretizedField, FockBasis, AssembledHamiltonian) {
        let p = ModelParams::reference(g).unwrap();
        let grid = build_grid(m.max(2), 6.0, GridScheme::GaussLegendre).unwrap();
        let mut field = DiscretizedField::new(&p, &grid);
        field.omega.truncate(m);
        field.coupling.truncate(m);
        let basis = FockBasis::sector(m, n_max, parity, DEFAULT_BASIS_CAP).unwrap();
        let h = assemble(&p, &field, &basis).unwrap();
        (field, basis, h)
    }

    #[test]
    fn one_mode_by_hand() {
        let g = 0.3;
        let mut full = DMatrix::<f64>::zeros(4, 4);
        // order: up Omega, down Omega, up a^*Omega, down a^*Omega
        let (field, _, _) = setup(1, 1, g, 0);
        let (w, c) = (field.omega[0], field.coupling[0]);
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[2.5, 0.0, 0.0, g * c, 0.0, 0.0, g * c, 0.0, 0.0, g * c, 2.5 + w, 0.0, g * c, 0.0, 0.0, w],
        );
        let index = |s: &FockState| match (s.spin, s.modes.len()) {
            (Spin::Up, 0) => 0,
            (Spin::Down, 0) => 1,
            (Spin::Up, _) => 2,
            (Spin::Down, _) => 3,
        };
        for parity in 0..2 {
            let (_, basis, h) = setup(1, 1, g, parity);
            let dense = h.to_dense();
            for a in 0..basis.dim() {
                for b in 0..basis.dim() {
                    full[(index(basis.state(a)), index(basis.state(b)))] = dense[(a, b)];
                }
            }
        }
        assert!((full - expect).amax() < 1e-15);
    }

    #[test]
    fn symmetric_and_structured() {
        for parity in 0..2 {
            let (field, basis, h) = setup(6, 3, 0.2, parity);
            let d = h.to_dense();
            assert_eq!((&d - d.transpose()).amax(), 0.0);
            for (i, j, v) in h.matrix.triplet_iter() {
                let (a, b) = (basis.state(i), basis.state(j));
                if i == j {
                    let e = spin_energy(&h.params, a.spin) + a.modes.iter().map(|&m| field.omega[m as usize]).sum::<f64>();
                    assert_eq!(*v, e);
                } else {
                    assert_ne!(a.spin, b.spin);
                    assert_eq!(a.number().abs_diff(b.number()), 1);
                }
            }
        }
    }

    #[test]
    fn zero_coupling_is_diagonal() {
        let (_, basis, h) = setup(5, 2, 0.0, 1);
        assert_eq!(h.nnz(), basis.dim());
    }

    #[test]
    fn sqrt_occupation_factor() {
        let g = 0.1;
        let (field, basis, h) = setup(3, 2, g, 0);
        let one = basis.index_of(&FockState { spin: Spin::Up, modes: vec![1] }).unwrap();
        let two = basis.index_of(&FockState { spin: Spin::Down, modes: vec![1, 1] }).unwrap();
        let d = h.to_dense();
        assert!((d[(one, two)] - g * field.coupling[1] * 2f64.sqrt()).abs() < 1e-15);
    }
}
