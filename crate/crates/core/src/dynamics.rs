//! Survival amplitude of the bare excited state and the spectral cutoff `chi`.
//!
//! The amplitude is `pi^{-1} int e^{-itz} Im (e1 - z - g^2 Gamma_{-0})^{-1} dz`,
//! a Lorentzian of centre `c = Re lambda1~` and half-width `gamma = -Im lambda1~`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelshift::Resonance;
use crate::model::ModelParams;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::scalar::{lit, Real};
use crate::special::sici;

/// Half-width of the default z-window in units of `g^2 |Gamma_{-0}|`.
pub const DEFAULT_WINDOW_WIDTHS: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurvivalMethod {
    Quadrature,
    Residue,
    Oracle,
}

impl SurvivalMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SurvivalMethod::Quadrature => "quadrature",
            SurvivalMethod::Residue => "residue",
            SurvivalMethod::Oracle => "oracle",
        }
    }
}

/// `a(t) = exp(-i t lambda1~)`.
pub fn survival_residue<T: Real>(t: T, res: &Resonance<T>) -> Complex<T> {
    let phase = Complex::new(T::zero(), -t) * res.lambda1_tilde;
    phase.exp()
}

/// `e1 +- 200 g^2 |Gamma_{-0}|`, with `g^2 |Gamma_{-0}| = |e1 - lambda1~|`.
pub fn default_window<T: Real>(params: &ModelParams<T>, res: &Resonance<T>) -> (T, T) {
    let e1 = params.e1();
    let half = lit::<T>(DEFAULT_WINDOW_WIDTHS) * (Complex::new(e1, T::zero()) - res.lambda1_tilde).norm();
    (e1 - half, e1 + half)
}

/// `int_W^inf cos(tu) / u^n du` and `int_W^inf sin(tu) / u^n du` for `n = 1..=4`,
/// by integration by parts down to `Si`/`Ci`. Index 0 is unused.
fn oscillatory_tails<T: Real>(t: T, w: T) -> ([T; 5], [T; 5]) {
    let mut c = [T::zero(); 5];
    let mut s = [T::zero(); 5];
    if t == T::zero() {
        for n in 2..5 {
            let k = lit::<T>((n - 1) as f64);
            c[n] = T::one() / (k * w.powi(n as i32 - 1));
        }
        return (c, s);
    }
    let x = t * w;
    let (si, ci) = sici(x);
    c[1] = -ci;
    s[1] = T::FRAC_PI_2() - si;
    let (cx, sx) = (x.cos(), x.sin());
    for n in 2..5 {
        let k = lit::<T>((n - 1) as f64);
        let wk = w.powi(n as i32 - 1);
        c[n] = cx / (k * wk) - t / k * s[n - 1];
        s[n] = sx / (k * wk) + t / k * c[n - 1];
    }
    (c, s)
}

/// `(gamma / pi) int_W^inf e^{-+itu} (u^{-2} - gamma^2 u^{-4}) du`, sign `-` for the
/// right tail and `+` for the left.
fn tail_asymptote<T: Real>(t: T, w: T, gamma: T, right: bool) -> Complex<T> {
    let (c, s) = oscillatory_tails(t, w);
    let sgn = if right { -T::one() } else { T::one() };
    let g2 = gamma * gamma;
    let v = Complex::new(c[2], sgn * s[2]) - Complex::new(c[4], sgn * s[4]) * g2;
    v * (gamma / T::PI())
}

/// Bound on what the two-term tail asymptote leaves out.
pub fn tail_remainder_bound<T: Real>(gamma: T, w_minus: T, w_plus: T) -> T {
    gamma / T::PI() * gamma.powi(4) / lit(5.0) * (w_plus.powi(-5) + w_minus.powi(-5))
}

/// The z-integral on `window`, plus the analytic correction for both tails.
pub fn survival_quadrature<T: Real>(
    t: T,
    res: &Resonance<T>,
    window: (T, T),
    cfg: &QuadratureConfig<T>,
) -> Result<Complex<T>> {
    if !(t >= T::zero()) {
        return Err(Error::NegativeTime(t.as_f64()));
    }
    let c = res.lambda1_tilde.re;
    let gamma = -res.lambda1_tilde.im;
    if !(gamma > T::zero()) {
        return Err(Error::ZeroWidth(gamma.as_f64()));
    }
    let (lo, hi) = window;
    if !(lo < c && c < hi) {
        return Err(Error::InvalidInterval { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let (w_minus, w_plus) = (c - lo, hi - c);
    let bound = tail_remainder_bound(gamma, w_minus, w_plus);
    let limit = cfg.abs_tol * lit(10.0);
    if bound > limit {
        return Err(Error::WindowTooNarrow { bound: bound.as_f64(), limit: limit.as_f64() });
    }
    let lorentz = |u: T| {
        let weight = gamma / (T::PI() * (u * u + gamma * gamma));
        Complex::new((t * u).cos(), -(t * u).sin()) * weight
    };
    // Centred variable u = z - c, split at the peak and again a few widths out.
    let knee = (gamma * lit(20.0)).min(w_minus.min(w_plus) * lit(0.5));
    let mut core = Complex::new(T::zero(), T::zero());
    for (a, b) in [(-w_minus, -knee), (-knee, T::zero()), (T::zero(), knee), (knee, w_plus)] {
        core = core + integrate(lorentz, (a, b), cfg)?;
    }
    let tails = tail_asymptote(t, w_plus, gamma, true) + tail_asymptote(t, w_minus, gamma, false);
    let carrier = Complex::new(T::zero(), -t * c).exp();
    Ok(carrier * (core + tails))
}

/// Sampled survival amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve<T> {
    pub times: Vec<T>,
    pub amplitudes: Vec<Complex<T>>,
    pub method: SurvivalMethod,
}

impl<T: Real> SurvivalCurve<T> {
    pub fn residue(times: &[T], res: &Resonance<T>) -> Result<Self> {
        check_times(times)?;
        Ok(Self {
            times: times.to_vec(),
            amplitudes: times.iter().map(|&t| survival_residue(t, res)).collect(),
            method: SurvivalMethod::Residue,
        })
    }

    pub fn quadrature(times: &[T], res: &Resonance<T>, window: (T, T), cfg: &QuadratureConfig<T>) -> Result<Self> {
        check_times(times)?;
        let amplitudes = times
            .par_iter()
            .map(|&t| survival_quadrature(t, res, window, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { times: times.to_vec(), amplitudes, method: SurvivalMethod::Quadrature })
    }

    pub fn abs2(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Least-squares slope of `log |a(t)|^2` against `t` over `[t_lo, t_hi]`.
    pub fn log_decay_slope(&self, t_lo: T, t_hi: T) -> Option<T> {
        let pts: Vec<(T, T)> = self
            .times
            .iter()
            .zip(&self.amplitudes)
            .filter(|(&t, _)| t >= t_lo && t <= t_hi)
            .map(|(&t, a)| (t, a.norm_sqr().ln()))
            .collect();
        linear_slope(&pts)
    }

    /// Rows `t,re_a,im_a,abs2_a,method` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_a,im_a,abs2_a,method\n");
        for (t, a) in self.times.iter().zip(&self.amplitudes) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.as_f64() + 0.0,
                a.re.as_f64() + 0.0,
                a.im.as_f64() + 0.0,
                a.norm_sqr().as_f64(),
                self.method.as_str()
            ));
        }
        out
    }
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    match times.iter().find(|t| !(**t >= T::zero())) {
        Some(t) => Err(Error::NegativeTime(t.as_f64())),
        None => Ok(()),
    }
}

/// Ordinary least-squares slope; `None` for fewer than two distinct abscissae.
pub fn linear_slope<T: Real>(pts: &[(T, T)]) -> Option<T> {
    if pts.len() < 2 {
        return None;
    }
    let n = lit::<T>(pts.len() as f64);
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: T = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    if sxx > T::zero() {
        Some(sxy / sxx)
    } else {
        None
    }
}

/// Default cutoff scale `s = g^{2/3}`.
pub fn default_scale<T: Real>(g: T) -> T {
    g.powf(lit(2.0 / 3.0))
}

/// `exp(-1/x)` smoothed step from 0 at `x <= 0` to 1 at `x >= 1`.
pub fn smooth_step<T: Real>(x: T) -> T {
    let h = |y: T| if y > T::zero() { (-y.recip()).exp() } else { T::zero() };
    if x <= T::zero() {
        T::zero()
    } else if x >= T::one() {
        T::one()
    } else {
        let a = h(x);
        a / (a + h(T::one() - x))
    }
}

/// `chi_s(r) = chi(e1 + (r - e1) / s)`, where `chi = 1` on `[e1 - delta/2, e1 + delta/2]`
/// and vanishes outside `(e1 - 3 delta/4, e1 + 3 delta/4)`.
pub fn chi_cutoff<T: Real>(r: T, s: T, params: &ModelParams<T>) -> T {
    let delta = params.delta_gap();
    let d = ((r - params.e1()) / s).abs();
    let quarter = delta * lit(0.25);
    smooth_step((delta * lit(0.75) - d) / quarter)
}
