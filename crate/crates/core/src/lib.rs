pub mod dynamics;
pub mod error;
pub mod fockoracle;
pub mod levelshift;
pub mod model;
pub mod mourre;
pub mod quadrature;
pub mod scalar;
pub mod scattering;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Params64 = model::ModelParams<f64>;
pub type QuadConfig64 = quadrature::QuadratureConfig<f64>;
pub type SpectralDensity64 = levelshift::SpectralDensity<f64>;
pub type LevelShift64 = levelshift::LevelShift<f64>;
pub type Resonance64 = levelshift::Resonance<f64>;
pub type WavePacket64 = scattering::WavePacket<f64>;
pub type PairKernel64 = scattering::PairKernel<f64>;
pub type KernelProfile64 = scattering::KernelProfile<f64>;
pub type SurvivalCurve64 = dynamics::SurvivalCurve<f64>;
