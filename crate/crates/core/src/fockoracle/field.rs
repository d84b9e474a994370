//! s-wave discretization of the field: mode `j` carries the normalized radial
//! function concentrated at `k_j`, so `Phi(f)` couples to it with weight
//! `sqrt(4 pi w_j) k_j f(k_j)`.

use std::f64::consts::PI;

use crate::model::ModelParams;

use super::grid::RadialGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedField {
    /// `omega(k_j)`.
    pub omega: Vec<f64>,
    /// `sqrt(4 pi w_j) k_j f(k_j)`.
    pub coupling: Vec<f64>,
    /// Couplings of `(r d/dr + 3/2) f`, the form factor moved along the dilation flow.
    pub dilation_coupling: Vec<f64>,
    /// `xi(k_j) = k_j^2 / omega(k_j)`.
    pub xi: Vec<f64>,
}

impl DiscretizedField {
    pub fn new(params: &ModelParams<f64>, grid: &RadialGrid) -> Self {
        let lam2 = params.lambda_uv() * params.lambda_uv();
        let mut out = Self { omega: vec![], coupling: vec![], dilation_coupling: vec![], xi: vec![] };
        for (&k, &w) in grid.nodes().iter().zip(grid.weights()) {
            let om = params.omega_raw(k);
            let f = params.form_factor_raw(k);
            let scale = (4.0 * PI * w).sqrt() * k;
            let flow = 1.5 - 2.0 * k * k / lam2 - k * k / (2.0 * om * om);
            out.omega.push(om);
            out.coupling.push(scale * f);
            out.dilation_coupling.push(scale * f * flow);
            out.xi.push(params.xi_raw(k));
        }
        out
    }

    pub fn modes(&self) -> usize {
        self.omega.len()
    }

    /// `sum_j coupling_j^2`, the discrete `||f||^2`.
    pub fn coupling_norm_sq(&self) -> f64 {
        self.coupling.iter().map(|c| c * c).sum()
    }
}
