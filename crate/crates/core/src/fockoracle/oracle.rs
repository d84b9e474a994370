use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{SurvivalCurve, SurvivalMethod};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ParamsSpec};
use crate::quadrature::{principal_value, PVIntegrand, QuadratureConfig};
use crate::scattering::{pair_kernel, PairKernel, WavePacket};

use super::basis::{FockBasis, FockState};
use super::contour::{project_dense, project_iterative, Circle};
use super::field::DiscretizedField;
use super::grid::{build_grid, GridScheme, RadialGrid};
use super::hamiltonian::{assemble, AssembledHamiltonian};
use super::spectrum::{EigenDecomposition, Lanczos, SpectralMeasure};

pub const DEFAULT_DENSE_LIMIT: usize = 4000;
pub const DEFAULT_CONTOUR_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `M = 40, N_max = 2, k_max = 6`.
    Static,
    /// `M = 200, N_max = 1, k_max = 6`.
    Dynamic,
}

impl Profile {
    pub fn config(self) -> OracleConfig {
        match self {
            Profile::Static => OracleConfig { modes: 40, n_max: 2, ..OracleConfig::default() },
            Profile::Dynamic => OracleConfig { modes: 200, n_max: 1, ..OracleConfig::default() },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Static => "static",
            Profile::Dynamic => "dynamic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub modes: usize,
    pub n_max: usize,
    pub k_max: f64,
    pub scheme: GridScheme,
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_limit: usize,
    pub basis_cap: usize,
    pub krylov_steps: usize,
    pub contour_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            modes: 200,
            n_max: 1,
            k_max: 6.0,
            scheme: GridScheme::GaussLegendre,
            dense_limit: DEFAULT_DENSE_LIMIT,
            basis_cap: super::basis::DEFAULT_BASIS_CAP,
            krylov_steps: 400,
            contour_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
struct Sector {
    basis: FockBasis,
    hamiltonian: AssembledHamiltonian,
    eigen: Option<EigenDecomposition>,
}

/// Lowest eigenpair, normalized with `<phi_0 Omega, Psi> >= 0`.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// Coefficients in the sector-0 basis.
    pub vector: DVector<f64>,
    pub residual: f64,
    /// `<phi_0 Omega, Psi>`.
    pub bare_overlap: f64,
}

impl GroundState {
    /// `|| Psi - phi_0 Omega ||`.
    pub fn distance_to_bare(&self) -> f64 {
        (2.0 - 2.0 * self.bare_overlap).max(0.0).sqrt()
    }

    /// `|| P_0 (phi_0 Omega) ||^2 = <phi_0 Omega, Psi>^2`.
    pub fn contour_norm_sq(&self) -> f64 {
        self.bare_overlap * self.bare_overlap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelatorSign {
    /// `e^{-itH}`.
    Minus,
    /// `e^{+itH}`.
    Plus,
}

/// How the time integral in the oracle T-matrix is closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    /// `eta -> 0+`: principal value plus `-i pi` times the density, per eigenvalue.
    Limit,
    /// Finite `+i eta`, at least three level spacings.
    Eta(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TMatrixOracle {
    pub value: Complex<f64>,
    pub lambda0: f64,
    /// `||P_0 phi_0 Omega||^2` of the unnormalized contour state.
    pub gs_norm_sq: f64,
    pub spacing: f64,
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleManifest {
    pub params: ParamsSpec,
    pub profile: Option<Profile>,
    pub config: OracleConfig,
    pub sector_dims: [usize; 2],
    pub nnz: [usize; 2],
    pub dense: [bool; 2],
    pub level_spacing: f64,
}

#[derive(Debug, Clone)]
pub struct FockOracle {
    params: ModelParams<f64>,
    config: OracleConfig,
    profile: Option<Profile>,
    grid: RadialGrid,
    field: DiscretizedField,
    sectors: [Sector; 2],
}

impl FockOracle {
    pub fn new(params: &ModelParams<f64>, config: &OracleConfig) -> Result<Self> {
        let grid = build_grid(config.modes, config.k_max, config.scheme)?;
        let field = DiscretizedField::new(params, &grid);
        let build = |parity: usize| -> Result<Sector> {
            let basis = FockBasis::sector(config.modes, config.n_max, parity, config.basis_cap)?;
            let hamiltonian = assemble(params, &field, &basis)?;
            let eigen = if basis.dim() <= config.dense_limit {
                Some(EigenDecomposition::dense(&hamiltonian.to_dense())?)
            } else {
                None
            };
            Ok(Sector { basis, hamiltonian, eigen })
        };
        let (s0, s1) = rayon::join(|| build(0), || build(1));
        Ok(Self { params: *params, config: *config, profile: None, grid, field, sectors: [s0?, s1?] })
    }

    pub fn with_profile(params: &ModelParams<f64>, profile: Profile) -> Result<Self> {
        let mut o = Self::new(params, &profile.config())?;
        o.profile = Some(profile);
        Ok(o)
    }

    pub fn params(&self) -> &ModelParams<f64> {
        &self.params
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn field(&self) -> &DiscretizedField {
        &self.field
    }

    pub fn basis(&self, parity: usize) -> &FockBasis {
        &self.sectors[parity % 2].basis
    }

    pub fn hamiltonian(&self, parity: usize) -> &AssembledHamiltonian {
        &self.sectors[parity % 2].hamiltonian
    }

    /// Dense eigendecomposition, when the sector is below the dense limit.
    pub fn eigen(&self, parity: usize) -> Option<&EigenDecomposition> {
        self.sectors[parity % 2].eigen.as_ref()
    }

    pub fn manifest(&self) -> OracleManifest {
        OracleManifest {
            params: self.params.to_spec(),
            profile: self.profile,
            config: self.config,
            sector_dims: [self.basis(0).dim(), self.basis(1).dim()],
            nnz: [self.hamiltonian(0).nnz(), self.hamiltonian(1).nnz()],
            dense: [self.eigen(0).is_some(), self.eigen(1).is_some()],
            level_spacing: self.level_spacing(),
        }
    }

    /// Spectral measure of `v` with respect to the sector Hamiltonian.
    pub fn measure(&self, parity: usize, v: &DVector<f64>) -> Result<SpectralMeasure> {
        let s = &self.sectors[parity % 2];
        match &s.eigen {
            Some(e) => Ok(e.measure(v)),
            None => Lanczos::run(|x| s.hamiltonian.apply(x), v, self.config.krylov_steps)?.measure(),
        }
    }

    fn unit(&self, parity: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.basis(parity).dim());
        v[i] = 1.0;
        v
    }

    /// `phi_0 Omega` in sector 0.
    pub fn bare_ground(&self) -> DVector<f64> {
        self.unit(0, self.basis(0).vacuum_index())
    }

    /// `Phi_1 = phi_1 Omega` in sector 1.
    pub fn bare_excited(&self) -> DVector<f64> {
        self.unit(1, self.basis(1).vacuum_index())
    }

    /// `sigma_1` from sector `parity` to the other sector.
    pub fn sigma1(&self, parity: usize, v: &DVector<f64>) -> DVector<f64> {
        let (from, to) = (self.basis(parity), self.basis(parity + 1));
        let mut out = DVector::zeros(to.dim());
        for (i, s) in from.states().iter().enumerate() {
            let flipped = FockState { spin: s.spin.flip(), modes: s.modes.clone() };
            if let Some(j) = to.index_of(&flipped) {
                out[j] = v[i];
            }
        }
        out
    }

    pub fn ground_state(&self) -> Result<GroundState> {
        let s = &self.sectors[0];
        let (energy, mut vector) = match &s.eigen {
            Some(e) => (e.values[0], e.vectors.column(0).into_owned()),
            None => {
                let l = Lanczos::run(|x| s.hamiltonian.apply(x), &self.bare_ground(), self.config.krylov_steps)?;
                let (theta, y, _) = l.lowest_ritz()?;
                (theta, y)
            }
        };
        if let Some(other) = self.sectors[1].eigen.as_ref().map(|e| e.values[0]) {
            if other < energy {
                return Err(Error::EigensolverFailure(format!(
                    "lowest level {other} lies outside the phi_0 Omega sector (sector minimum {energy})"
                )));
            }
        }
        vector /= vector.norm();
        let mut overlap = vector[s.basis.vacuum_index()];
        if overlap < 0.0 {
            vector.neg_mut();
            overlap = -overlap;
        }
        let residual = (s.hamiltonian.apply(&vector) - &vector * energy).norm();
        let scale = s.hamiltonian.norm_inf().max(1.0);
        if !(residual <= 1e-8 * scale) {
            return Err(Error::EigensolverFailure(format!("ground state residual {residual:e}")));
        }
        Ok(GroundState { energy, vector, residual, bare_overlap: overlap })
    }

    /// `P_0 (phi_0 Omega)` by the trapezoidal rule on the circle of radius `m/4` about `e0`.
    pub fn ground_projector_contour(&self, n_nodes: usize) -> Result<DVector<f64>> {
        let circle = Circle { center: self.params.e0(), radius: self.params.m() / 4.0 };
        let s = &self.sectors[0];
        let v = self.bare_ground();
        if s.basis.dim() <= self.config.dense_limit {
            project_dense(&s.hamiltonian.to_dense(), &v, circle, n_nodes)
        } else {
            project_iterative(|x| s.hamiltonian.apply(x), &v, circle, n_nodes, self.config.contour_tol)
        }
    }

    /// Mean gap of the one-boson energies `omega_j` in `[e1 - delta/2, e1 + delta/2]`.
    pub fn level_spacing(&self) -> f64 {
        let (e1, d) = (self.params.e1(), self.params.delta_gap());
        let inside: Vec<f64> =
            self.field.omega.iter().copied().filter(|&w| (w - e1).abs() <= d / 2.0).collect();
        if inside.len() < 2 {
            let max_gap = self.field.omega.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            return max_gap.max(d);
        }
        (inside[inside.len() - 1] - inside[0]) / (inside.len() - 1) as f64
    }

    /// `pi / spacing`, half the revival time of the discrete continuum.
    pub fn revival_horizon(&self) -> f64 {
        PI / self.level_spacing()
    }

    fn check_times(&self, times: &[f64]) -> Result<()> {
        let horizon = self.revival_horizon();
        for &t in times {
            if !(t >= 0.0) {
                return Err(Error::NegativeTime(t));
            }
            if t > horizon {
                return Err(Error::InvalidParameter { name: "t", value: t, reason: "beyond the revival horizon pi/spacing" });
            }
        }
        Ok(())
    }

    /// Spectral measure of `Phi_1`.
    pub fn survival_measure(&self) -> Result<SpectralMeasure> {
        self.measure(1, &self.bare_excited())
    }

    /// `a(t) = <Phi_1, e^{-itH} Phi_1>`.
    pub fn survival_oracle(&self, times: &[f64]) -> Result<SurvivalCurve<f64>> {
        self.check_times(times)?;
        let m = self.survival_measure()?;
        Ok(SurvivalCurve { times: times.to_vec(), amplitudes: m.amplitudes(times), method: SurvivalMethod::Oracle })
    }

    /// Spectral measure of `sigma_1 Psi_0`.
    pub fn correlator_measure(&self, ground: &GroundState) -> Result<SpectralMeasure> {
        self.measure(1, &self.sigma1(0, &ground.vector))
    }

    /// `<sigma_1 Psi_0, e^{-+itH} sigma_1 Psi_0>`.
    pub fn correlator(&self, ground: &GroundState, t: f64, sign: CorrelatorSign) -> Result<Complex<f64>> {
        if (ground.vector.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(ground.vector.norm()));
        }
        let m = self.correlator_measure(ground)?;
        Ok(match sign {
            CorrelatorSign::Minus => m.amplitude(t),
            CorrelatorSign::Plus => m.amplitude(-t),
        })
    }

    /// `T(h, l) = 2 pi ||Psi||^{-2} (T1 - T2)` with, for `p_n = |<n|sigma_1 Psi>|^2`,
    /// `T1 = i g^2 sum_n p_n int G / (omega + lambda0 - E_n + i eta) dr` and
    /// `T2 = i g^2 sum_n p_n int G / (omega - lambda0 + E_n + i eta) dr`.
    pub fn tmatrix_oracle(
        &self,
        h: &WavePacket<f64>,
        l: &WavePacket<f64>,
        reg: Regularization,
        cfg: &QuadratureConfig<f64>,
    ) -> Result<TMatrixOracle> {
        let spacing = self.level_spacing();
        let eta = match reg {
            Regularization::Limit => None,
            Regularization::Eta(eta) => {
                if !(eta >= 3.0 * spacing) {
                    return Err(Error::EtaTooSmall { eta, floor: 3.0 * spacing, spacing });
                }
                Some(eta)
            }
        };
        let ground = self.ground_state()?;
        let lambda0 = ground.energy;
        let out = |value| TMatrixOracle { value, lambda0, gs_norm_sq: ground.contour_norm_sq(), spacing, eta };
        let g = self.params.g();
        let kernel = pair_kernel(h, l, &self.params)?;
        if g == 0.0 || kernel.is_empty() {
            return Ok(out(Complex::new(0.0, 0.0)));
        }
        let m = self.correlator_measure(&ground)?;
        let norm = m.total();
        let terms = m
            .energies
            .par_iter()
            .zip(&m.weights)
            .filter(|(_, &p)| p > 1e-300)
            .map(|(&e, &p)| {
                let x = e - lambda0;
                let (t1, t2) = match eta {
                    None => (resolvent_limit(&kernel, x, cfg)?, shifted_integral(&kernel, -x, 0.0, cfg)?),
                    Some(eta) => (shifted_integral(&kernel, x, eta, cfg)?, shifted_integral(&kernel, -x, eta, cfg)?),
                };
                Ok((t1 - t2) * p)
            })
            .collect::<Result<Vec<_>>>()?;
        let sum: Complex<f64> = terms.into_iter().sum();
        let value = Complex::new(0.0, 2.0 * PI * g * g) * sum / norm;
        Ok(out(value))
    }

    /// `T` on the analytic default: `eta -> 0+`.
    pub fn tmatrix_default(&self, h: &WavePacket<f64>, l: &WavePacket<f64>, cfg: &QuadratureConfig<f64>) -> Result<TMatrixOracle> {
        self.tmatrix_oracle(h, l, Regularization::Limit, cfg)
    }
}

/// `int G(r) / (omega(r) - x + i eta) dr` for `eta > 0`, or a pole-free `x`.
fn shifted_integral(kernel: &PairKernel<f64>, x: f64, eta: f64, cfg: &QuadratureConfig<f64>) -> Result<Complex<f64>> {
    let p = *kernel.params();
    kernel.integrate_against(|r| Complex::new(1.0, 0.0) / Complex::new(p.omega_raw(r) - x, eta), cfg)
}

/// `lim_{eta -> 0+} int G(r) / (omega(r) - x + i eta) dr = P int q / (w - x) dw - i pi q(x)`
/// with `q(w) = G(r(w)) w / r(w)` in the energy variable.
fn resolvent_limit(kernel: &PairKernel<f64>, x: f64, cfg: &QuadratureConfig<f64>) -> Result<Complex<f64>> {
    let p = *kernel.params();
    let m = p.m();
    let (lo, hi) = kernel.support();
    let dom = (p.omega_raw(lo), p.omega_raw(hi));
    let q = |w: f64| {
        let r = (w * w - m * m).max(0.0).sqrt();
        if r > 0.0 {
            kernel.eval(r) * (w / r)
        } else {
            Complex::new(0.0, 0.0)
        }
    };
    if !(x > dom.0 && x < dom.1) {
        return shifted_integral(kernel, x, 0.0, cfg);
    }
    let re = principal_value(&PVIntegrand { numerator: |w: f64| q(w).re, pole: x, domain: dom }, cfg)?;
    let im = principal_value(&PVIntegrand { numerator: |w: f64| q(w).im, pole: x, domain: dom }, cfg)?;
    let qx = q(x);
    Ok(Complex::new(re, im) - Complex::new(0.0, PI) * qx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelshift::{gamma0_groundshift, LevelShift};
    use crate::quadrature::{epsilon_regularized, integrate, Branch};
    use crate::scattering::transition_lorentzian;

    fn small(g: f64, n_max: usize) -> FockOracle {
        let p = ModelParams::reference(g).unwrap();
        FockOracle::new(&p, &OracleConfig { modes: 12, n_max, ..OracleConfig::default() }).unwrap()
    }

    #[test]
    fn free_spectrum_is_exact() {
        let o = small(0.0, 2);
        for parity in 0..2 {
            let mut expect: Vec<f64> = o
                .basis(parity)
                .states()
                .iter()
                .map(|s| {
                    super::super::hamiltonian::spin_energy(o.params(), s.spin)
                        + s.modes.iter().map(|&j| o.field().omega[j as usize]).sum::<f64>()
                })
                .collect();
            expect.sort_by(f64::total_cmp);
            let got = &o.eigen(parity).unwrap().values;
            assert!(expect.iter().zip(got).all(|(a, b)| (a - b).abs() <= 1e-12));
        }
        let gs = o.ground_state().unwrap();
        assert_eq!(gs.energy, 0.0);
        assert!((gs.bare_overlap - 1.0).abs() < 1e-15);
        let a = o.survival_oracle(&[0.0, 1.0, 3.0]).unwrap();
        for (t, a) in a.times.iter().zip(&a.amplitudes) {
            assert!((a - Complex::from_polar(1.0, -2.5 * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn parity_blocks_do_not_couple() {
        let o = small(0.3, 2);
        for parity in 0..2 {
            let (this, other) = (o.basis(parity), o.basis(parity + 1));
            for s in this.states() {
                assert!(other.index_of(s).is_none());
                if s.number() < 2 {
                    for j in 0..12u32 {
                        let up = s.raised_flipped(j);
                        assert_eq!(up.parity(), parity);
                        assert!(this.index_of(&up).is_some());
                    }
                }
            }
        }
        assert_eq!(o.basis(0).dim() + o.basis(1).dim(), super::super::basis::total_dimension(12, 2));
    }

    #[test]
    fn survival_unitarity_and_bounds() {
        let o = small(0.2, 1);
        let m = o.survival_measure().unwrap();
        assert!((m.total() - 1.0).abs() < 1e-12);
        let horizon = o.revival_horizon();
        let times: Vec<f64> = (0..40).map(|k| k as f64 * horizon / 39.0).collect();
        let c = o.survival_oracle(&times).unwrap();
        assert!((c.amplitudes[0] - Complex::new(1.0, 0.0)).norm() < 1e-12);
        assert!(c.amplitudes.iter().all(|a| a.norm() <= 1.0 + 1e-12));
        assert!(o.survival_oracle(&[-1.0]).is_err());
        assert!(o.survival_oracle(&[horizon * 1.01]).is_err());
    }

    #[test]
    fn correlator_at_zero_and_weak_coupling() {
        let o = small(0.1, 2);
        let gs = o.ground_state().unwrap();
        let c0 = o.correlator(&gs, 0.0, CorrelatorSign::Minus).unwrap();
        assert!((c0 - Complex::new(1.0, 0.0)).norm() < 1e-12);
        let weak = small(1e-4, 2);
        let gs = weak.ground_state().unwrap();
        for t in [0.5, 2.0] {
            let c = weak.correlator(&gs, t, CorrelatorSign::Plus).unwrap();
            assert!((c - Complex::from_polar(1.0, 2.5 * t)).norm() < 1e-5);
        }
    }

    #[test]
    fn contour_matches_eigenvector() {
        let o = small(0.05, 2);
        let gs = o.ground_state().unwrap();
        let psi = o.ground_projector_contour(64).unwrap();
        let cos = psi.dot(&gs.vector) / psi.norm();
        assert!(cos > 1.0 - 1e-14);
        assert!((psi.norm_squared() - gs.contour_norm_sq()).abs() < 1e-12);
        let free = small(0.0, 2).ground_projector_contour(16).unwrap();
        assert!((free - small(0.0, 2).bare_ground()).amax() < 1e-14);
    }

    #[test]
    fn contour_trapezoid_converges_geometrically() {
        let o = small(0.05, 2);
        let gs = o.ground_state().unwrap();
        let exact = gs.vector.clone() * gs.bare_overlap;
        let err: Vec<f64> =
            [4, 8, 16, 32, 64].iter().map(|&n| (o.ground_projector_contour(n).unwrap() - &exact).amax()).collect();
        assert!(err[0] > 1e-8 && err[1] < 1e-3 * err[0], "{err:?}");
        assert!(err[2..].iter().all(|&e| e < 1e-14), "{err:?}");
    }

    #[test]
    fn iterative_path_agrees_with_dense() {
        let p = ModelParams::reference(0.1).unwrap();
        let cfg = OracleConfig { modes: 10, n_max: 2, ..OracleConfig::default() };
        let dense = FockOracle::new(&p, &cfg).unwrap();
        let sparse = FockOracle::new(&p, &OracleConfig { dense_limit: 0, ..cfg }).unwrap();
        assert!(sparse.eigen(0).is_none());
        let (a, b) = (dense.ground_state().unwrap(), sparse.ground_state().unwrap());
        assert!((a.energy - b.energy).abs() < 1e-12);
        assert!((a.vector.clone() - b.vector.clone()).amax() < 1e-9);
        let ca = dense.ground_projector_contour(32).unwrap();
        let cb = sparse.ground_projector_contour(32).unwrap();
        assert!((ca - cb).amax() < 1e-9);
        let t = [0.0, 1.0, 0.9 * dense.revival_horizon()];
        let (sa, sb) = (dense.survival_oracle(&t).unwrap(), sparse.survival_oracle(&t).unwrap());
        for (x, y) in sa.amplitudes.iter().zip(&sb.amplitudes) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn ground_energy_below_bare_and_decreasing() {
        let mut prev = 0.0;
        for g in [0.02, 0.05, 0.1] {
            let e = small(g, 2).ground_state().unwrap().energy;
            assert!(e <= 0.0 && e < prev);
            prev = e;
        }
        let p = ModelParams::reference(0.05).unwrap();
        let g0 = gamma0_groundshift(&p, &QuadratureConfig::default()).unwrap();
        let o = FockOracle::new(&p, &OracleConfig { modes: 40, n_max: 1, ..OracleConfig::default() }).unwrap();
        let e = o.ground_state().unwrap().energy;
        assert!((e + 0.05f64.powi(2) * g0).abs() < 1e-5, "{e} vs {}", -0.0025 * g0);
    }

    #[test]
    fn resolvent_limit_matches_small_eta() {
        let p = ModelParams::reference(0.1).unwrap();
        let h = WavePacket::bump(2.0, 2.6, 1.0).unwrap();
        let k = pair_kernel(&h, &h, &p).unwrap();
        let cfg = QuadratureConfig::default();
        let q = |w: f64| {
            let r = (w * w - 1.0).sqrt();
            k.eval(r).re * w / r
        };
        let dom = (p.omega_raw(2.0), p.omega_raw(2.6));
        for x in [2.3, 2.5, 2.7] {
            let lim = resolvent_limit(&k, x, &cfg).unwrap();
            let at = |eps: f64| epsilon_regularized(q, x, eps, Branch::Plus, dom, &cfg).unwrap();
            let extrap = at(1e-4) * 2.0 - at(2e-4);
            assert!((lim - extrap).norm() < 1e-5 * (1.0 + lim.norm()), "x={x}: {lim} vs {extrap}");
        }
        let outside = resolvent_limit(&k, 3.5, &cfg).unwrap();
        let direct: f64 = integrate(|w: f64| q(w) / (w - 3.5), dom, &cfg).unwrap();
        assert!((outside - Complex::new(direct, 0.0)).norm() < 1e-10 * direct.abs());
    }

    #[test]
    fn tmatrix_guards() {
        let o = small(0.1, 1);
        let h = WavePacket::bump(2.0, 2.6, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let s = o.level_spacing();
        assert!(matches!(
            o.tmatrix_oracle(&h, &h, Regularization::Eta(s), &cfg),
            Err(Error::EtaTooSmall { .. })
        ));
        assert_eq!(small(0.0, 1).tmatrix_default(&h, &h, &cfg).unwrap().value, Complex::new(0.0, 0.0));
        assert!(o.tmatrix_oracle(&h, &h, Regularization::Eta(5.0 * s), &cfg).unwrap().value.norm() > 0.0);
    }

    #[test]
    fn tmatrix_tracks_lorentzian_formula() {
        let p = ModelParams::reference(0.1).unwrap();
        let cfg = QuadratureConfig::default();
        let o = FockOracle::with_profile(&p, Profile::Dynamic).unwrap();
        let h = WavePacket::bump(2.0, 2.6, 1.0).unwrap();
        let t = o.tmatrix_default(&h, &h, &cfg).unwrap();
        let shift = LevelShift::compute(&p, &cfg).unwrap();
        let tp = transition_lorentzian(&h, &h, &shift, t.lambda0, t.gs_norm_sq, &p, &cfg).unwrap();
        assert!((t.value - tp).norm() / tp.norm() < 0.2, "{} vs {tp}", t.value);
    }
}
