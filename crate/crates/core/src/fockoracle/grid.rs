use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    GaussLegendre,
    /// Midpoint rule, nodes `(j + 1/2) h`.
    Uniform,
}

/// Radial quadrature on `(0, k_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    k_max: f64,
    scheme: GridScheme,
}

impl RadialGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

pub fn build_grid(modes: usize, k_max: f64, scheme: GridScheme) -> Result<RadialGrid> {
    if modes < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 modes, got {modes}")));
    }
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(Error::InvalidGrid(format!("k_max must be positive and finite, got {k_max}")));
    }
    let (nodes, weights) = match scheme {
        GridScheme::GaussLegendre => gauss_legendre::<f64>(modes)
            .into_iter()
            .map(|(x, w)| (0.5 * k_max * (x + 1.0), 0.5 * k_max * w))
            .unzip(),
        GridScheme::Uniform => {
            let h = k_max / modes as f64;
            ((0..modes).map(|j| (j as f64 + 0.5) * h).collect(), vec![h; modes])
        }
    };
    Ok(RadialGrid { nodes, weights, k_max, scheme })
}
