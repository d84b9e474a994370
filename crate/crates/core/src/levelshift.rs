//! Level-shift function `Gamma_{+-eps}`, its boundary values and the
//! perturbative resonance / ground-state energies.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quadrature::{epsilon_regularized, integrate, principal_value, Branch, PVIntegrand, QuadratureConfig};
use crate::scalar::{lit, Real};

/// Spectral density `theta(tau)` of the field seen from the excited level.
#[derive(Debug, Clone, Copy)]
pub struct SpectralDensity<T> {
    params: ModelParams<T>,
}

impl<T: Real> SpectralDensity<T> {
    pub fn new(params: ModelParams<T>) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    /// Lower end `m - e1` of the support.
    pub fn threshold(&self) -> T {
        self.params.m() - self.params.e1()
    }

    pub fn eval(&self, tau: T) -> Result<T> {
        let th = self.threshold();
        if !(tau > th) {
            return Err(Error::BelowThreshold { tau: tau.as_f64(), threshold: th.as_f64() });
        }
        Ok(self.eval_raw(tau))
    }

    /// `theta` extended by zero at and below the threshold.
    pub(crate) fn eval_raw(&self, tau: T) -> T {
        let e = self.params.e1() + tau;
        let m = self.params.m();
        let r2 = e * e - m * m;
        if !(r2 > T::zero()) {
            return T::zero();
        }
        let r = r2.sqrt();
        lit::<T>(4.0) * T::PI() * e * r * self.params.form_factor_sq_raw(r)
    }
}

/// `theta(tau) = 4 pi (e1 + tau) r f(r)^2` with `r = sqrt((e1 + tau)^2 - m^2)`.
pub fn theta<T: Real>(tau: T, params: &ModelParams<T>) -> Result<T> {
    SpectralDensity::new(*params).eval(tau)
}

/// `Gamma_{+-eps} = int_{m - e1}^inf theta(tau) / (tau +- i eps) d tau`.
pub fn gamma_eps<T: Real>(
    eps: T,
    branch: Branch,
    params: &ModelParams<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<Complex<T>> {
    let rho = SpectralDensity::new(*params);
    epsilon_regularized(|t| rho.eval_raw(t), T::zero(), eps, branch, (rho.threshold(), T::infinity()), cfg)
}

/// `Gamma_{+-0} = -+ i pi theta(0) + P int theta(x) / x dx`.
pub fn gamma_boundary<T: Real>(branch: Branch, params: &ModelParams<T>, cfg: &QuadratureConfig<T>) -> Result<Complex<T>> {
    let rho = SpectralDensity::new(*params);
    let pv = PVIntegrand {
        numerator: |t: T| rho.eval_raw(t),
        pole: T::zero(),
        domain: (rho.threshold(), T::infinity()),
    };
    let re = principal_value(&pv, cfg)?;
    let im = -branch.sign::<T>() * T::PI() * rho.eval_raw(T::zero());
    Ok(Complex::new(re, im))
}

/// Ground-state shift `Gamma_0 = 4 pi int_0^inf r^2 f(r)^2 / (e1 + omega(r)) dr`.
pub fn gamma0_groundshift<T: Real>(params: &ModelParams<T>, cfg: &QuadratureConfig<T>) -> Result<T> {
    let four_pi = lit::<T>(4.0) * T::PI();
    let e1 = params.e1();
    integrate(
        |r: T| four_pi * r * r * params.form_factor_sq_raw(r) / (e1 + params.omega_raw(r)),
        (T::zero(), T::infinity()),
        cfg,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelShift<T> {
    pub gamma_minus0: Complex<T>,
    pub gamma_plus0: Complex<T>,
    pub theta0: T,
    pub gamma0_gs: T,
}

impl<T: Real> LevelShift<T> {
    pub fn compute(params: &ModelParams<T>, cfg: &QuadratureConfig<T>) -> Result<Self> {
        let gamma_minus0 = gamma_boundary(Branch::Minus, params, cfg)?;
        let theta0 = theta(T::zero(), params)?;
        let gamma0_gs = gamma0_groundshift(params, cfg)?;
        Ok(Self { gamma_minus0, gamma_plus0: gamma_minus0.conj(), theta0, gamma0_gs })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance<T> {
    pub lambda1_tilde: Complex<T>,
    pub lambda0_approx: T,
    pub decay_rate: T,
}

impl<T: Real> Resonance<T> {
    pub fn from_level_shift(shift: &LevelShift<T>, params: &ModelParams<T>) -> Self {
        let g2 = params.g() * params.g();
        Self {
            lambda1_tilde: Complex::new(params.e1(), T::zero()) - shift.gamma_minus0 * g2,
            lambda0_approx: params.e0() - g2 * shift.gamma0_gs,
            decay_rate: lit::<T>(2.0) * g2 * shift.gamma_minus0.im,
        }
    }
}

/// Leading-order resonance `lambda1~ = e1 - g^2 Gamma_{-0}` and `lambda0 ~ e0 - g^2 Gamma_0`.
pub fn resonance<T: Real>(params: &ModelParams<T>, cfg: &QuadratureConfig<T>) -> Result<Resonance<T>> {
    Ok(Resonance::from_level_shift(&LevelShift::compute(params, cfg)?, params))
}

/// JSON form of a level shift together with its resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub gamma_minus0: [f64; 2],
    pub theta0: f64,
    pub gamma0: f64,
    pub lambda1_tilde: [f64; 2],
    pub lambda0: f64,
    pub decay_rate: f64,
}

impl ResonanceReport {
    pub fn new<T: Real>(shift: &LevelShift<T>, res: &Resonance<T>) -> Self {
        Self {
            gamma_minus0: [shift.gamma_minus0.re.as_f64(), shift.gamma_minus0.im.as_f64()],
            theta0: shift.theta0.as_f64(),
            gamma0: shift.gamma0_gs.as_f64(),
            lambda1_tilde: [res.lambda1_tilde.re.as_f64(), res.lambda1_tilde.im.as_f64()],
            lambda0: res.lambda0_approx.as_f64(),
            decay_rate: res.decay_rate.as_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params(g: f64) -> ModelParams<f64> {
        ModelParams::reference(g).unwrap()
    }

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    // Hand evaluation at e1 = 2.5, m = 1, Lambda = 2.
    fn theta0_by_hand() -> f64 {
        let r = (2.5f64 * 2.5 - 1.0).sqrt();
        4.0 * PI * 2.5 * r * (-2.0 * r * r / 4.0).exp() / 2.5
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    // P int 4 pi r^2 f^2 / (omega - e1) dr in the momentum variable, with the
    // pole at r0 removed by subtraction.
    fn re_gamma_oracle() -> f64 {
        let p = params(0.0);
        let r0 = p.resonant_momentum();
        let q = |r: f64| {
            4.0 * PI * r * r * p.form_factor_sq_raw(r) * (p.omega_raw(r) + 2.5) / (r + r0)
        };
        let q0 = q(r0);
        let dq0 = (q(r0 + 1e-5) - q(r0 - 1e-5)) / 2e-5;
        let near = simpson(
            |r| if (r - r0).abs() < 1e-12 { dq0 } else { (q(r) - q0) / (r - r0) },
            0.0,
            2.0 * r0,
            200_000,
        );
        let far = simpson(|r| q(r) / (r - r0), 2.0 * r0, 2.0 * r0 + 30.0, 200_000);
        near + far
    }

    #[test]
    fn theta_examples() {
        let p = params(0.1);
        assert_relative_eq!(theta(0.0, &p).unwrap(), theta0_by_hand(), max_relative = 1e-14);
        assert!((theta(0.0, &p).unwrap() - 2.0857).abs() < 1e-4);
        assert!(theta(-1.5 + 1e-14, &p).unwrap() < 1e-5);
        assert!(matches!(theta(-1.5, &p), Err(Error::BelowThreshold { .. })));
        assert!(matches!(theta(-2.0, &p), Err(Error::BelowThreshold { .. })));
        for i in 1..400 {
            let tau = -1.5 + i as f64 * 0.025;
            assert!(theta(tau, &p).unwrap() > 0.0, "tau = {tau}");
        }
    }

    #[test]
    fn theta_threshold_is_square_root() {
        let p = params(0.1);
        let xs: Vec<f64> = (0..20).map(|k| 1e-8 * 1.5f64.powi(k)).collect();
        let pts: Vec<(f64, f64)> = xs.iter().map(|&d| (d.ln(), theta(-1.5 + d, &p).unwrap().ln())).collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let num: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
        assert!((num / den - 0.5).abs() < 0.05, "slope {}", num / den);
    }

    #[test]
    fn boundary_values() {
        let p = params(0.1);
        let gm = gamma_boundary(Branch::Minus, &p, &cfg()).unwrap();
        let gp = gamma_boundary(Branch::Plus, &p, &cfg()).unwrap();
        assert_eq!(gp, gm.conj());
        assert_relative_eq!(gm.im, PI * theta0_by_hand(), max_relative = 1e-14);
        assert!((gm.im - 6.552).abs() < 1e-3);
        assert_relative_eq!(gm.re, re_gamma_oracle(), max_relative = 1e-7);
    }

    #[test]
    fn epsilon_conjugation_and_sign() {
        let p = params(0.1);
        for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
            let m = gamma_eps(eps, Branch::Minus, &p, &cfg()).unwrap();
            let pl = gamma_eps(eps, Branch::Plus, &p, &cfg()).unwrap();
            assert!((pl - m.conj()).norm() <= 1e-12 * m.norm());
            assert!(m.im > 0.0);
        }
    }

    #[test]
    fn sokhotski_convergence() {
        let p = params(0.1);
        let b = gamma_boundary(Branch::Minus, &p, &cfg()).unwrap();
        let d: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| (gamma_eps(e, Branch::Minus, &p, &cfg()).unwrap() - b).norm())
            .collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }

    #[test]
    fn epsilon_sweep_extrapolates_to_boundary() {
        let p = params(0.1);
        let b = gamma_boundary(Branch::Minus, &p, &cfg()).unwrap();
        let eps = 1e-3;
        let g1 = gamma_eps(eps, Branch::Minus, &p, &cfg()).unwrap();
        let g2 = gamma_eps(2.0 * eps, Branch::Minus, &p, &cfg()).unwrap();
        // Linear Richardson step in eps.
        let extrapolated = g1 * 2.0 - g2;
        assert!((extrapolated - b).norm() < 50.0 * eps * eps);
        assert!((g1 - b).norm() < 2e-2);
    }

    #[test]
    fn epsilon_rejects_non_positive() {
        let p = params(0.1);
        assert!(matches!(gamma_eps(0.0, Branch::Minus, &p, &cfg()), Err(Error::NonPositiveEpsilon(_))));
    }

    #[test]
    fn ground_shift_matches_trapezoid() {
        let p = params(0.1);
        let n = 1_000_000;
        let (a, b) = (0.0, 20.0);
        let h = (b - a) / n as f64;
        let f = |r: f64| {
            let w = (r * r + 1.0).sqrt();
            4.0 * PI * r * r * (-r * r / 2.0).exp() / w / (2.5 + w)
        };
        let trap = h * ((f(a) + f(b)) / 2.0 + (1..n).map(|i| f(a + i as f64 * h)).sum::<f64>());
        let g0 = gamma0_groundshift(&p, &cfg()).unwrap();
        assert!(g0 > 0.0);
        assert!((g0 - trap).abs() < 1e-8, "{g0} vs {trap}");
    }

    #[test]
    fn ground_shift_grows_with_cutoff() {
        let a = gamma0_groundshift(&params(0.1), &cfg()).unwrap();
        let p2 = ModelParams::new(2.5, 1.0, 4.0, 0.1).unwrap();
        assert!(gamma0_groundshift(&p2, &cfg()).unwrap() > a);
    }

    #[test]
    fn resonance_examples() {
        let r0 = resonance(&params(0.0), &cfg()).unwrap();
        assert_eq!(r0.lambda1_tilde, Complex::new(2.5, 0.0));
        assert_eq!(r0.lambda0_approx, 0.0);
        assert_eq!(r0.decay_rate, 0.0);

        let r = resonance(&params(0.1), &cfg()).unwrap();
        assert_relative_eq!(r.lambda1_tilde.im, -0.01 * PI * theta0_by_hand(), max_relative = 1e-13);
        assert_relative_eq!(r.decay_rate, 0.02 * PI * theta0_by_hand(), max_relative = 1e-13);
        assert!((r.decay_rate - 0.131).abs() < 1e-3);
        assert!(r.lambda0_approx < 0.0);
    }

    #[test]
    fn gamma_is_independent_of_coupling() {
        let a = LevelShift::compute(&params(0.01), &cfg()).unwrap();
        let b = LevelShift::compute(&params(0.1), &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_json_shape() {
        let p = params(0.1);
        let s = LevelShift::compute(&p, &cfg()).unwrap();
        let rep = ResonanceReport::new(&s, &Resonance::from_level_shift(&s, &p));
        let v = serde_json::to_value(rep).unwrap();
        for key in ["gamma_minus0", "theta0", "gamma0", "lambda1_tilde", "lambda0", "decay_rate"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["gamma_minus0"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn single_precision() {
        let p = ModelParams::<f32>::reference(0.1).unwrap();
        let c = QuadratureConfig::<f32>::default().with_tolerances(1e-5, 1e-5);
        let c = QuadratureConfig { truncation_threshold: 1e-12, ..c };
        let s = LevelShift::compute(&p, &c).unwrap();
        let d = LevelShift::compute(&params(0.1), &cfg()).unwrap();
        assert!((s.gamma_minus0.re as f64 - d.gamma_minus0.re).abs() < 1e-3);
        assert!((s.theta0 as f64 - d.theta0).abs() < 1e-5);
    }
}
