use serde::{Deserialize, Serialize};

use sblab_core::fockoracle::{OracleConfig, Profile};
use sblab_core::model::ParamsSpec;
use sblab_core::quadrature::QuadratureConfig;
use sblab_core::scattering::PacketSpec;

/// Top-level run configuration. Unknown keys are rejected at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSpec,
    #[serde(default)]
    pub profile: Option<Profile>,
    /// Overrides applied on top of the profile defaults.
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub quadrature: QuadSpec,
    #[serde(default)]
    pub packets: PacketsSpec,
    #[serde(default)]
    pub survival: SurvivalSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub groundstate: GroundStateSpec,
    #[serde(default)]
    pub mourre: MourreSpec,
    #[serde(default)]
    pub tmatrix: TMatrixSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        let d = QuadratureConfig::<f64>::default();
        Self { abs_tol: d.abs_tol, rel_tol: d.rel_tol, max_subdivisions: d.max_subdivisions }
    }
}

impl QuadSpec {
    pub fn build(&self) -> QuadratureConfig<f64> {
        QuadratureConfig { abs_tol: self.abs_tol, rel_tol: self.rel_tol, max_subdivisions: self.max_subdivisions, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketsSpec {
    pub h: PacketSpec,
    pub l: PacketSpec,
    /// Extra packets paired with themselves for the off-resonance comparison.
    pub off_resonance: Vec<PacketSpec>,
}

impl Default for PacketsSpec {
    fn default() -> Self {
        let on = PacketSpec::Bump { support: [2.0, 2.6], amplitude: 1.0 };
        Self { h: on, l: on, off_resonance: vec![PacketSpec::Bump { support: [0.5, 0.9], amplitude: 1.0 }] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyticMethod {
    Residue,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurvivalSpec {
    pub t_max: f64,
    pub dt: f64,
    pub analytic: AnalyticMethod,
    /// Run the oracle when a profile is selected.
    pub oracle: bool,
}

impl Default for SurvivalSpec {
    fn default() -> Self {
        Self { t_max: 30.0, dt: 0.1, analytic: AnalyticMethod::Residue, oracle: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self { r_min: 0.05, r_max: 4.0, points: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundStateSpec {
    pub g_values: Vec<f64>,
}

impl Default for GroundStateSpec {
    fn default() -> Self {
        Self { g_values: vec![0.02, 0.04, 0.08] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MourreSpec {
    /// Defaults to `e1`.
    pub z: Option<f64>,
    pub eps: Vec<f64>,
    /// Mode count of the grid used by the resolvent probe.
    pub probe_modes: usize,
}

impl Default for MourreSpec {
    fn default() -> Self {
        Self { z: None, eps: vec![0.2, 0.1, 0.05], probe_modes: 600 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct TMatrixSpec {
    /// Finite regularization; `null` takes the `eta -> 0+` limit.
    pub eta: Option<f64>,
}

impl RunConfig {
    /// Oracle settings: profile defaults, then explicit overrides.
    pub fn oracle_config(&self, profile: Profile) -> OracleConfig {
        self.oracle.unwrap_or_else(|| profile.config())
    }
}
