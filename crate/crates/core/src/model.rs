//! Physical constants of the massive spin-boson model.
//!
//! The two-level atom has levels `e0 = 0 < e1` and couples through `sigma_1`
//! to a scalar field with dispersion `omega(k) = sqrt(k^2 + m^2)` and the
//! Gaussian form factor `f(k) = exp(-k^2 / Lambda^2) omega(k)^{-1/2}`.
//! The normalization constant `2^{-1/2} (2 pi)^{-3/2}` is absorbed into `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Absolute tolerance for deciding `e1 - e0 in m N`.
pub const GAP_TOLERANCE: f64 = 1e-12;

/// Validated model parameters. Construct with [`ModelParams::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    e0: T,
    e1: T,
    m: T,
    lambda_uv: T,
    g: T,
    gap: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(e1: T, m: T, lambda_uv: T, g: T) -> Result<Self> {
        let finite = |name: &'static str, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v.as_f64(), reason: "must be finite" })
            }
        };
        finite("e1", e1)?;
        finite("m", m)?;
        finite("lambda_uv", lambda_uv)?;
        finite("g", g)?;
        if m <= T::zero() {
            return Err(Error::InvalidParameter { name: "m", value: m.as_f64(), reason: "must be > 0" });
        }
        if lambda_uv <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "lambda_uv",
                value: lambda_uv.as_f64(),
                reason: "must be > 0",
            });
        }
        if g < T::zero() {
            return Err(Error::InvalidParameter { name: "g", value: g.as_f64(), reason: "must be >= 0" });
        }
        let gap = gap_to_mass_multiples(e1, m)?;
        Ok(Self { e0: T::zero(), e1, m, lambda_uv, g, gap })
    }

    /// Desk-scale instance `e1 = 2.5, m = 1, Lambda = 2` (gap 0.5). The
    /// canonical coupling range is `g in [0.01, 0.1]`.
    pub fn reference(g: T) -> Result<Self> {
        Self::new(lit(2.5), T::one(), lit(2.0), g)
    }

    /// Same physical constants with a different coupling.
    pub fn with_coupling(&self, g: T) -> Result<Self> {
        Self::new(self.e1, self.m, self.lambda_uv, g)
    }

    pub fn e0(&self) -> T {
        self.e0
    }
    pub fn e1(&self) -> T {
        self.e1
    }
    pub fn m(&self) -> T {
        self.m
    }
    pub fn lambda_uv(&self) -> T {
        self.lambda_uv
    }
    pub fn g(&self) -> T {
        self.g
    }

    /// `dist(e1 - e0, m N)`; strictly positive for every constructed value.
    pub fn delta_gap(&self) -> T {
        self.gap
    }

    /// On-shell momentum `sqrt(e1^2 - m^2)`.
    pub fn resonant_momentum(&self) -> T {
        (self.e1 * self.e1 - self.m * self.m).sqrt()
    }

    pub fn omega(&self, r: T) -> Result<T> {
        check_radial(r)?;
        Ok(self.omega_raw(r))
    }

    pub fn form_factor(&self, r: T) -> Result<T> {
        check_radial(r)?;
        Ok(self.form_factor_raw(r))
    }

    /// `xi(r) = r^2 / omega(r)`, the symbol of the commutator `[omega, iD]`.
    pub fn xi(&self, r: T) -> Result<T> {
        check_radial(r)?;
        Ok(self.xi_raw(r))
    }

    #[inline]
    pub(crate) fn omega_raw(&self, r: T) -> T {
        (r * r + self.m * self.m).sqrt()
    }

    #[inline]
    pub(crate) fn form_factor_raw(&self, r: T) -> T {
        let q = r / self.lambda_uv;
        (-(q * q)).exp() / self.omega_raw(r).sqrt()
    }

    /// `f(r)^2`, computed without the intermediate square root.
    #[inline]
    pub(crate) fn form_factor_sq_raw(&self, r: T) -> T {
        let q = r / self.lambda_uv;
        (-(q * q + q * q)).exp() / self.omega_raw(r)
    }

    #[inline]
    pub(crate) fn xi_raw(&self, r: T) -> T {
        r * r / self.omega_raw(r)
    }
}

impl ModelParams<f64> {
    pub fn to_spec(&self) -> ParamsSpec {
        ParamsSpec { e1: self.e1, m: self.m, lambda_uv: self.lambda_uv, g: self.g }
    }
}

/// Checked free-function form of [`ModelParams::delta_gap`] on raw numbers.
pub fn delta_gap<T: Real>(e1: T, m: T) -> Result<T> {
    gap_to_mass_multiples(e1, m)
}

fn gap_to_mass_multiples<T: Real>(e1: T, m: T) -> Result<T> {
    if m >= e1 {
        return Err(Error::MassOrderViolation { e1: e1.as_f64(), m: m.as_f64() });
    }
    // e0 = 0, so the distance is taken from e1 itself.
    let nearest = (e1 / m).round().max(T::one());
    let mut best = T::infinity();
    for n in [nearest - T::one(), nearest, nearest + T::one()] {
        if n >= T::one() {
            best = best.min((e1 - n * m).abs());
        }
    }
    if best <= lit(GAP_TOLERANCE) {
        return Err(Error::GapViolation { e1: e1.as_f64(), m: m.as_f64() });
    }
    Ok(best)
}

fn check_radial<T: Real>(r: T) -> Result<()> {
    if r < T::zero() || r.is_nan() {
        Err(Error::NegativeMomentum(r.as_f64()))
    } else {
        Ok(())
    }
}

/// Wire form of the parameters: `{"e1", "m", "lambda_uv", "g"}` with `e0 = 0` implicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub e1: f64,
    pub m: f64,
    pub lambda_uv: f64,
    pub g: f64,
}

impl TryFrom<ParamsSpec> for ModelParams<f64> {
    type Error = Error;

    fn try_from(spec: ParamsSpec) -> Result<Self> {
        ModelParams::new(spec.e1, spec.m, spec.lambda_uv, spec.g)
    }
}
