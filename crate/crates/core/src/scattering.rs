//! One-boson test functions, the pair kernel `G_{h,l}` and the Lorentzian
//! transition amplitude `T_P`.
//!
//! Radial measure convention: `d^3k = r^2 dr dSigma`, so spherically symmetric
//! packets have angular average `H(r) = 4 pi h(r)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelshift::LevelShift;
use crate::model::ModelParams;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::scalar::{lit, Real};

type Profile<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothness {
    /// Compactly supported and `C^inf`.
    CompactSmooth,
    /// Caller-supplied profile with no further guarantee.
    Custom,
}

/// Test function `h(r, Sigma)` represented by its angular average `H(r)`.
#[derive(Clone)]
pub struct WavePacket<T> {
    support: (T, T),
    average: Profile<T>,
    smoothness: Smoothness,
}

impl<T: fmt::Debug> fmt::Debug for WavePacket<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WavePacket")
            .field("support", &self.support)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

fn check_support<T: Real>(lo: T, hi: T) -> Result<()> {
    if lo > T::zero() && lo < hi && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::SupportAtOrigin { lo: lo.as_f64(), hi: hi.as_f64() })
    }
}

/// `exp(-1 / (1 - x^2))` on `(-1, 1)`, zero elsewhere.
pub fn bump<T: Real>(x: T) -> T {
    let y = T::one() - x * x;
    if y > T::zero() {
        (-y.recip()).exp()
    } else {
        T::zero()
    }
}

impl<T: Real> WavePacket<T> {
    /// Spherically symmetric `h(r) = amplitude * bump` rescaled to `[lo, hi]`.
    pub fn bump(lo: T, hi: T, amplitude: T) -> Result<Self> {
        check_support(lo, hi)?;
        let mid = (lo + hi) * lit(0.5);
        let half = (hi - lo) * lit(0.5);
        let scale = lit::<T>(4.0) * T::PI() * amplitude;
        Ok(Self {
            support: (lo, hi),
            average: Arc::new(move |r: T| Complex::new(scale * bump((r - mid) / half), T::zero())),
            smoothness: Smoothness::CompactSmooth,
        })
    }

    /// Packet from a closed-form angular average; values outside `support` are ignored.
    pub fn from_average<F>(lo: T, hi: T, average: F) -> Result<Self>
    where
        F: Fn(T) -> Complex<T> + Send + Sync + 'static,
    {
        check_support(lo, hi)?;
        Ok(Self { support: (lo, hi), average: Arc::new(average), smoothness: Smoothness::Custom })
    }

    /// `a h + b l`.
    pub fn combine(a: Complex<T>, h: &Self, b: Complex<T>, l: &Self) -> Self {
        let (hh, ll) = (h.clone(), l.clone());
        let smoothness = if h.smoothness == l.smoothness { h.smoothness } else { Smoothness::Custom };
        Self {
            support: (h.support.0.min(l.support.0), h.support.1.max(l.support.1)),
            average: Arc::new(move |r: T| hh.angular_average(r) * a + ll.angular_average(r) * b),
            smoothness,
        }
    }

    pub fn support(&self) -> (T, T) {
        self.support
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// `H(r) = int dSigma h(r, Sigma)`, zero off the support.
    pub fn angular_average(&self, r: T) -> Complex<T> {
        if r > self.support.0 && r < self.support.1 {
            (self.average)(r)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }
}

/// Wire form of a packet: `{"type": "bump", "support": [a, b], "amplitude": c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PacketSpec {
    Bump { support: [f64; 2], amplitude: f64 },
}

impl PacketSpec {
    pub fn build(&self) -> Result<WavePacket<f64>> {
        match *self {
            PacketSpec::Bump { support, amplitude } => WavePacket::bump(support[0], support[1], amplitude),
        }
    }
}

/// `G_{h,l}(r) = r^4 f(r)^2 conj(H_h(r)) H_l(r)`.
#[derive(Debug, Clone)]
pub struct PairKernel<T> {
    h: WavePacket<T>,
    l: WavePacket<T>,
    params: ModelParams<T>,
    support: (T, T),
}

impl<T: Real> PairKernel<T> {
    pub fn eval(&self, r: T) -> Complex<T> {
        if !(r > self.support.0 && r < self.support.1) {
            return Complex::new(T::zero(), T::zero());
        }
        let r2 = r * r;
        let weight = r2 * r2 * self.params.form_factor_sq_raw(r);
        self.h.angular_average(r).conj() * self.l.angular_average(r) * weight
    }

    /// Overlap of the two radial supports; empty when `lo >= hi`.
    pub fn support(&self) -> (T, T) {
        self.support
    }

    pub fn is_empty(&self) -> bool {
        self.support.0 >= self.support.1
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    /// `int_supp phi(r) G(r) dr`.
    pub fn integrate_against<F>(&self, phi: F, cfg: &QuadratureConfig<T>) -> Result<Complex<T>>
    where
        F: Fn(T) -> Complex<T>,
    {
        if self.is_empty() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        integrate(|r: T| self.eval(r) * phi(r), self.support, cfg)
    }
}

pub fn pair_kernel<T: Real>(h: &WavePacket<T>, l: &WavePacket<T>, params: &ModelParams<T>) -> Result<PairKernel<T>> {
    check_support(h.support.0, h.support.1)?;
    check_support(l.support.0, l.support.1)?;
    Ok(PairKernel {
        h: h.clone(),
        l: l.clone(),
        params: *params,
        support: (h.support.0.max(l.support.0), h.support.1.min(l.support.1)),
    })
}

/// `W(k) = |k|^2 l(k) f(|k|) conj(H_h(|k|))`, with `l(k) = H_l(|k|) / (4 pi)` the
/// spherical part of `l`.
pub fn w_function<T: Real>(h: &WavePacket<T>, l: &WavePacket<T>, k: T, params: &ModelParams<T>) -> Complex<T> {
    let k = k.abs();
    let l_val = l.angular_average(k) / (lit::<T>(4.0) * T::PI());
    l_val * h.angular_average(k).conj() * (k * k * params.form_factor_raw(k))
}

/// `zeta(t) = int_0^inf G(r) exp(i t (omega(r) + lambda0)) dr`.
pub fn zeta<T: Real>(t: T, kernel: &PairKernel<T>, lambda0: T, cfg: &QuadratureConfig<T>) -> Result<Complex<T>> {
    let p = kernel.params;
    kernel.integrate_against(
        |r: T| {
            let ph = t * (p.omega_raw(r) + lambda0);
            Complex::new(ph.cos(), ph.sin())
        },
        cfg,
    )
}

/// `lambda1~ = e1 - g^2 Gamma_{-0}`.
pub fn lambda1_tilde<T: Real>(shift: &LevelShift<T>, params: &ModelParams<T>) -> Complex<T> {
    Complex::new(params.e1(), T::zero()) - shift.gamma_minus0 * (params.g() * params.g())
}

/// `(Re lambda1~ - lambda0) / ((w + lambda0 - lambda1~)(w - lambda0 + conj lambda1~))`.
pub fn lorentzian_factor<T: Real>(w: T, lambda1: Complex<T>, lambda0: T) -> Complex<T> {
    let a = Complex::new(w + lambda0, T::zero()) - lambda1;
    let b = Complex::new(w - lambda0, T::zero()) + lambda1.conj();
    Complex::new(lambda1.re - lambda0, T::zero()) / (a * b)
}

fn prefactor<T: Real>(params: &ModelParams<T>, gs_norm_sq: T) -> Result<Complex<T>> {
    if !(gs_norm_sq > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "gs_norm_sq",
            value: gs_norm_sq.as_f64(),
            reason: "must be > 0",
        });
    }
    let g = params.g();
    Ok(Complex::new(T::zero(), lit::<T>(4.0) * T::PI() * g * g / gs_norm_sq))
}

/// Integrand of `T_P` over `r` (without the `4 pi i g^2 / ||Psi||^2` prefactor).
pub fn transition_integrand<T: Real>(r: T, kernel: &PairKernel<T>, shift: &LevelShift<T>, lambda0: T) -> Complex<T> {
    let p = &kernel.params;
    kernel.eval(r) * lorentzian_factor(p.omega_raw(r), lambda1_tilde(shift, p), lambda0)
}

/// `T_P(h, l)` on a prebuilt pair kernel.
pub fn transition_lorentzian_kernel<T: Real>(
    kernel: &PairKernel<T>,
    shift: &LevelShift<T>,
    lambda0: T,
    gs_norm_sq: T,
    cfg: &QuadratureConfig<T>,
) -> Result<Complex<T>> {
    let pre = prefactor(&kernel.params, gs_norm_sq)?;
    let p = kernel.params;
    if p.g() == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let l1 = lambda1_tilde(shift, &p);
    let body = kernel.integrate_against(|r: T| lorentzian_factor(p.omega_raw(r), l1, lambda0), cfg)?;
    Ok(pre * body)
}

/// `T_P(h, l) = 4 pi i g^2 ||Psi||^{-2} int G(r) (Re lambda1~ - lambda0) / (...) dr`.
pub fn transition_lorentzian<T: Real>(
    h: &WavePacket<T>,
    l: &WavePacket<T>,
    shift: &LevelShift<T>,
    lambda0: T,
    gs_norm_sq: T,
    params: &ModelParams<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<Complex<T>> {
    transition_lorentzian_kernel(&pair_kernel(h, l, params)?, shift, lambda0, gs_norm_sq, cfg)
}

/// Smooth on-shell factor of the kernel form of `T_P`, multiplying
/// `delta(omega(k) - omega(k'))`. The resonant denominators are evaluated at
/// `omega(r)`.
pub fn onshell_kernel<T: Real>(
    r: T,
    shift: &LevelShift<T>,
    lambda0: T,
    gs_norm_sq: T,
    params: &ModelParams<T>,
) -> Result<Complex<T>> {
    if !(r > T::zero()) {
        return Err(Error::NegativeMomentum(r.as_f64()));
    }
    let pre = prefactor(params, gs_norm_sq)?;
    if params.g() == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let w = params.omega_raw(r);
    let lf = lorentzian_factor(w, lambda1_tilde(shift, params), lambda0);
    Ok(pre * lf * (params.form_factor_sq_raw(r) * r / w))
}

/// Sampled `onshell_kernel` on a radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile<T> {
    pub r: Vec<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> KernelProfile<T> {
    pub fn sample(
        grid: &[T],
        shift: &LevelShift<T>,
        lambda0: T,
        gs_norm_sq: T,
        params: &ModelParams<T>,
    ) -> Result<Self> {
        let values = grid
            .iter()
            .map(|&r| onshell_kernel(r, shift, lambda0, gs_norm_sq, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { r: grid.to_vec(), values })
    }

    /// Grid point of largest modulus.
    pub fn argmax(&self) -> Option<T> {
        self.r
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(T, T)>, (&r, v)| match best {
                Some((_, m)) if m >= v.norm() => best,
                _ => Some((r, v.norm())),
            })
            .map(|(r, _)| r)
    }

    /// Interior local maximum of the modulus closest to `r0`.
    pub fn local_peak_near(&self, r0: T) -> Option<T> {
        let a: Vec<T> = self.values.iter().map(|v| v.norm()).collect();
        (1..a.len().saturating_sub(1))
            .filter(|&i| a[i] > T::zero() && a[i] >= a[i - 1] && a[i] >= a[i + 1])
            .map(|i| self.r[i])
            .fold(None, |best: Option<T>, r| match best {
                Some(b) if (b - r0).abs() <= (r - r0).abs() => Some(b),
                _ => Some(r),
            })
    }

    /// Rows `r,re,im,abs` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,re,im,abs\n");
        for (r, v) in self.r.iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.as_f64() + 0.0,
                v.re.as_f64() + 0.0,
                v.im.as_f64() + 0.0,
                v.norm().as_f64()
            ));
        }
        out
    }
}
