//! One-dimensional quadrature: globally adaptive Gauss-Kronrod (10/21) on
//! finite and effectively finite intervals, Cauchy principal values by
//! symmetric subtraction, and `+- i eps` regularized pole integrals.
//!
//! Semi-infinite intervals are written `(a, T::infinity())`. They are
//! truncated where the integrand has fallen below
//! [`QuadratureConfig::truncation_threshold`]; every integrand in this crate
//! carries Gaussian damping so the cut is safe.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Gauss-Kronrod 21-point abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_643_474_262,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Embedded 10-point Gauss weights for `XGK[1], XGK[3], ..., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    /// Integrand-magnitude floor used to cut semi-infinite domains.
    pub truncation_threshold: T,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol: lit(1e-10),
            rel_tol: lit(1e-10),
            max_subdivisions: 1 << 14,
            truncation_threshold: lit(1e-16),
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: T| Error::InvalidParameter { name, value: value.as_f64(), reason: "must be > 0" };
        if !(self.abs_tol > T::zero()) {
            return Err(bad("abs_tol", self.abs_tol));
        }
        if !(self.rel_tol > T::zero()) {
            return Err(bad("rel_tol", self.rel_tol));
        }
        if !(self.truncation_threshold > T::zero()) {
            return Err(bad("truncation_threshold", self.truncation_threshold));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        Ok(())
    }

    /// Same limits with different tolerances.
    pub fn with_tolerances(mut self, abs_tol: T, rel_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

/// Values the integrator can accumulate: real scalars and complex numbers.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> T;
    fn is_finite_value(self) -> bool;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Result of an adaptive integration. `converged == false` means the
/// subdivision budget ran out and `value` is the best available estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<V, T> {
    pub value: V,
    pub error: T,
    pub subdivisions: usize,
    pub converged: bool,
}

impl<V: QuadValue<T>, T: Real> QuadResult<V, T> {
    /// Turns a non-converged result into [`Error::ToleranceNotMet`].
    pub fn strict(self) -> Result<V> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::ToleranceNotMet {
                estimate: self.value.magnitude().as_f64(),
                error: self.error.as_f64(),
            })
        }
    }
}

/// Signs of the `+- i eps` shift in `1 / ((x - p) +- i eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<V, T> {
    lo: T,
    hi: T,
    value: V,
    error: T,
}

struct Queued<T>(T, usize);

impl<T: Real> PartialEq for Queued<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Queued<T> {}
impl<T: Real> PartialOrd for Queued<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Queued<T> {
    // Largest error first; ties broken by the older segment.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.1.cmp(&self.1))
    }
}

fn kronrod21<V, T, F>(f: &F, lo: T, hi: T) -> (V, T)
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    let center = (lo + hi) * lit(0.5);
    let half = (hi - lo) * lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * lit::<T>(WGK[10]);
    let mut gauss = V::zero();
    for j in 0..10 {
        let dx = half * lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * lit::<T>(WG[j / 2]);
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).magnitude())
}

/// Pairwise summation over a slice in fixed order.
fn pairwise_sum<V: QuadValue<T>, T: Real>(items: &[V]) -> V {
    match items.len() {
        0 => V::zero(),
        1 => items[0],
        n => {
            let (a, b) = items.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn adaptive_finite<V, T, F>(f: &F, lo: T, hi: T, cfg: &QuadratureConfig<T>) -> QuadResult<V, T>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    let (v0, e0) = kronrod21(f, lo, hi);
    let mut segments = vec![Segment { lo, hi, value: v0, error: e0 }];
    let mut heap = BinaryHeap::new();
    heap.push(Queued(e0, 0));
    let mut total = v0;
    let mut total_err = e0;
    let min_width = (hi - lo).abs() * lit(64.0) * T::epsilon();
    let mut subdivisions = 1usize;
    let mut converged = false;

    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if total_err <= target {
            converged = true;
            break;
        }
        if subdivisions >= cfg.max_subdivisions {
            break;
        }
        let Some(Queued(_, idx)) = heap.pop() else {
            // every remaining segment is at round-off width
            converged = total_err <= target * lit(1e3) || total_err.is_nan();
            break;
        };
        let seg = segments[idx];
        let mid = (seg.lo + seg.hi) * lit(0.5);
        if seg.hi - seg.lo <= min_width || mid <= seg.lo || mid >= seg.hi {
            continue;
        }
        let (vl, el) = kronrod21(f, seg.lo, mid);
        let (vr, er) = kronrod21(f, mid, seg.hi);
        total = total - seg.value + vl + vr;
        total_err = total_err - seg.error + el + er;
        segments[idx] = Segment { lo: seg.lo, hi: mid, value: vl, error: el };
        segments.push(Segment { lo: mid, hi: seg.hi, value: vr, error: er });
        heap.push(Queued(el, idx));
        heap.push(Queued(er, segments.len() - 1));
        subdivisions += 1;
    }

    // Recompute the total in a fixed left-to-right pairwise order so the
    // result does not depend on the refinement history's running sums.
    segments.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
    let values: Vec<V> = segments.iter().map(|s| s.value).collect();
    let errors: Vec<T> = segments.iter().map(|s| s.error).collect();
    let value = pairwise_sum(&values);
    let error = pairwise_sum(&errors);
    QuadResult { value, error, subdivisions, converged: converged && value.is_finite_value() }
}

/// Upper cut for `[a, inf)`: the smallest `a + L` (with `L` a power of two)
/// past which every sampled octave `[a + 2^j, a + 2^{j+1}]` stays below the
/// truncation threshold.
pub fn truncation_point<V, T, F>(f: &F, a: T, cfg: &QuadratureConfig<T>) -> T
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    const OCTAVES: usize = 48;
    const SAMPLES: usize = 32;
    let quiet: Vec<bool> = (0..OCTAVES)
        .map(|j| {
            let lo = a + lit::<T>(2f64.powi(j as i32 - 4));
            let width = lo - a;
            (0..=SAMPLES).all(|s| {
                let x = lo + width * lit::<T>(s as f64 / SAMPLES as f64);
                let v = f(x);
                v.magnitude() < cfg.truncation_threshold
            })
        })
        .collect();
    let mut first = OCTAVES;
    for j in (0..OCTAVES).rev() {
        if quiet[j] {
            first = j;
        } else {
            break;
        }
    }
    a + lit::<T>(2f64.powi(first.min(OCTAVES - 1) as i32 - 4))
}

/// Adaptive Gauss-Kronrod integration of `f` over `[lo, hi]`; `hi` may be `+inf`.
pub fn integrate_adaptive<V, T, F>(f: F, interval: (T, T), cfg: &QuadratureConfig<T>) -> Result<QuadResult<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    cfg.validate()?;
    let (lo, hi) = interval;
    if !lo.is_finite() || hi.is_nan() || !(lo < hi) {
        return Err(Error::InvalidInterval { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let hi = if hi.is_infinite() { truncation_point(&f, lo, cfg) } else { hi };
    Ok(adaptive_finite(&f, lo, hi, cfg))
}

/// Shorthand for strict integration (fails with `ToleranceNotMet`).
pub fn integrate<V, T, F>(f: F, interval: (T, T), cfg: &QuadratureConfig<T>) -> Result<V>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    integrate_adaptive(f, interval, cfg)?.strict()
}

/// Cauchy principal value problem `P int_domain numerator(x) / (x - pole) dx`.
#[derive(Debug, Clone, Copy)]
pub struct PVIntegrand<T, F> {
    pub numerator: F,
    pub pole: T,
    pub domain: (T, T),
}

/// Half-width of the symmetric subtraction window around `pole`.
fn pole_window<T: Real>(pole: T, domain: (T, T)) -> Result<T> {
    let (lo, hi) = domain;
    if !lo.is_finite() || hi.is_nan() || !(lo < hi) {
        return Err(Error::InvalidInterval { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    if !(pole > lo && pole < hi) {
        return Err(Error::PoleOnBoundary { pole: pole.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
    }
    Ok((pole - lo).min(hi - pole).min(T::one()) * lit(0.5))
}

fn check_continuity<T: Real, F: Fn(T) -> T>(num: &F, pole: T, w: T) -> Result<()> {
    let jump = |h: T| (num(pole + h) - num(pole - h)).abs();
    let coarse = jump(w * lit(1e-4));
    let fine = jump(w * lit(1e-7));
    let scale = num(pole).abs() + num(pole + w).abs() + num(pole - w).abs();
    if fine > coarse * lit(0.5) && fine > scale * lit(1e-9) {
        return Err(Error::NumeratorDiscontinuous { pole: pole.as_f64(), jump: fine.as_f64() });
    }
    Ok(())
}

/// Sum of `int f(x) / (x - pole) dx` over the parts of `domain` outside the window.
fn outer_parts<V, T, F>(f: &F, pole: T, w: T, domain: (T, T), cfg: &QuadratureConfig<T>) -> Result<V>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    let (lo, hi) = domain;
    let mut acc = V::zero();
    if pole - w > lo {
        acc = acc + integrate(|x| f(x), (lo, pole - w), cfg)?;
    }
    if pole + w < hi {
        acc = acc + integrate(|x| f(x), (pole + w, hi), cfg)?;
    }
    Ok(acc)
}

/// `P int numerator(x) / (x - pole) dx` by symmetric subtraction on a window
/// of half-width `min(distance to boundary, 1) / 2`.
pub fn principal_value<T, F>(pv: &PVIntegrand<T, F>, cfg: &QuadratureConfig<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    let p = pv.pole;
    let w = pole_window(p, pv.domain)?;
    let num = &pv.numerator;
    check_continuity(num, p, w)?;
    // (theta(p+u) - theta(p-u)) / u is regular; the theta(p)/u part cancels.
    let near: T = integrate(|u: T| (num(p + u) - num(p - u)) / u, (T::zero(), w), cfg)?;
    let outer: T = outer_parts(&|x: T| num(x) / (x - p), p, w, pv.domain, cfg)?;
    Ok(near + outer)
}

/// `int f(x) / ((x - pole) +- i eps) dx` over `interval`. If the pole lies
/// inside, the `f(pole)` part on the window is taken in closed form.
pub fn epsilon_regularized<T, F>(
    f: F,
    pole: T,
    eps: T,
    branch: Branch,
    interval: (T, T),
    cfg: &QuadratureConfig<T>,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    if !(eps > T::zero()) {
        return Err(Error::NonPositiveEpsilon(eps.as_f64()));
    }
    let s: T = branch.sign();
    let shift = Complex::new(T::zero(), s * eps);
    let kernel = |x: T| Complex::new(x - pole, T::zero()) + shift;
    let (lo, hi) = interval;
    if !(pole > lo && pole < hi) {
        return integrate(|x: T| Complex::new(f(x), T::zero()) / kernel(x), interval, cfg);
    }
    let w = pole_window(pole, interval)?;
    let fp = f(pole);
    let regular = |x: T| Complex::new(f(x) - fp, T::zero()) / kernel(x);
    let left: Complex<T> = integrate(regular, (pole - w, pole), cfg)?;
    let right: Complex<T> = integrate(regular, (pole, pole + w), cfg)?;
    // int_{-w}^{w} du / (u +- i eps) = -+ 2 i atan(w / eps)
    let window = Complex::new(T::zero(), -s * lit::<T>(2.0) * (w / eps).atan()) * fp;
    let outer: Complex<T> = outer_parts(&|x: T| Complex::new(f(x), T::zero()) / kernel(x), pole, w, interval, cfg)?;
    Ok(left + right + window + outer)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (ascending nodes), by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    assert!(n >= 1, "need at least one node");
    let mut out = vec![(T::zero(), T::zero()); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (lit(-x), lit(w));
        out[n - 1 - i] = (lit(x), lit(w));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    fn brute_trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    }

    #[test]
    fn kronrod_tables_are_consistent() {
        let kronrod: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let gauss: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_relative_eq!(kronrod, 2.0, epsilon = 1e-15);
        assert_relative_eq!(gauss, 2.0, epsilon = 1e-15);
        // Kronrod exact to degree 31, Gauss to 19.
        for deg in (0..=30).step_by(2) {
            let exact = 2.0 / (deg as f64 + 1.0);
            let mut k = WGK[10] * if deg == 0 { 1.0 } else { 0.0 };
            for j in 0..10 {
                k += 2.0 * WGK[j] * XGK[j].powi(deg);
            }
            assert_relative_eq!(k, exact, epsilon = 1e-14);
            if deg <= 18 {
                let g: f64 = (0..5).map(|j| 2.0 * WG[j] * XGK[2 * j + 1].powi(deg)).sum();
                assert_relative_eq!(g, exact, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn linear_and_gaussian() {
        let r = integrate_adaptive(|x: f64| x, (0.0, 1.0), &cfg()).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, 0.5, epsilon = 1e-15);
        let g: f64 = integrate(|x: f64| (-x * x).exp(), (0.0, f64::INFINITY), &cfg()).unwrap();
        assert_relative_eq!(g, PI.sqrt() / 2.0, epsilon = 1e-12);
        assert!((g - 0.88622693).abs() < 1e-8);
    }

    #[test]
    fn radial_norm_matches_trapezoid_oracle() {
        let p = crate::model::ModelParams::<f64>::reference(0.1).unwrap();
        let integrand = |r: f64| 4.0 * PI * r * r * p.form_factor_sq_raw(r);
        let adaptive: f64 = integrate(integrand, (0.0, f64::INFINITY), &cfg()).unwrap();
        // integrand < 1e-30 beyond r = 12
        let oracle = brute_trapezoid(integrand, 0.0, 12.0, 1_000_000);
        assert!((adaptive - oracle).abs() < 1e-9, "{adaptive} vs {oracle}");
    }

    #[test]
    fn tolerance_not_met_is_flagged() {
        let tight = QuadratureConfig { max_subdivisions: 1, ..cfg() };
        let r = integrate_adaptive(|x: f64| (50.0 * x).sin().abs(), (0.0, 3.0), &tight).unwrap();
        assert!(!r.converged);
        assert!(matches!(r.strict(), Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(integrate_adaptive(|x: f64| x, (1.0, 0.0), &cfg()).is_err());
        let bad = QuadratureConfig { abs_tol: 0.0, ..cfg() };
        assert!(integrate_adaptive(|x: f64| x, (0.0, 1.0), &bad).is_err());
    }

    #[test]
    fn principal_value_examples() {
        let one = PVIntegrand { numerator: |_: f64| 1.0, pole: 0.0, domain: (-1.0, 2.0) };
        assert_relative_eq!(principal_value(&one, &cfg()).unwrap(), 2f64.ln(), epsilon = 1e-12);

        let lin = PVIntegrand { numerator: |x: f64| x, pole: 0.0, domain: (-1.0, 1.0) };
        assert_relative_eq!(principal_value(&lin, &cfg()).unwrap(), 2.0, epsilon = 1e-12);

        // Oracle: P int_{-1}^{1} e^x / x dx = 2 sum_{k odd} 1 / (k k!)
        let mut series = 0.0;
        let mut fact = 1.0;
        for k in 1..40 {
            fact *= k as f64;
            if k % 2 == 1 {
                series += 2.0 / (k as f64 * fact);
            }
        }
        let exp = PVIntegrand { numerator: |x: f64| x.exp(), pole: 0.0, domain: (-1.0, 1.0) };
        let v = principal_value(&exp, &cfg()).unwrap();
        assert_relative_eq!(v, series, epsilon = 1e-11);
        assert!((v - 2.11450175).abs() < 1e-8);
    }

    #[test]
    fn principal_value_errors() {
        let edge = PVIntegrand { numerator: |_: f64| 1.0, pole: -1.0, domain: (-1.0, 1.0) };
        assert!(matches!(principal_value(&edge, &cfg()), Err(Error::PoleOnBoundary { .. })));
        let step = PVIntegrand {
            numerator: |x: f64| if x < 0.3 { 1.0 } else { 2.0 },
            pole: 0.3,
            domain: (-1.0, 1.0),
        };
        assert!(matches!(principal_value(&step, &cfg()), Err(Error::NumeratorDiscontinuous { .. })));
    }

    #[test]
    fn principal_value_semi_infinite() {
        // P int_{-1}^{inf} e^{-x^2} / x dx against a brute symmetric-limit oracle.
        let pv = PVIntegrand { numerator: |x: f64| (-x * x).exp(), pole: 0.0, domain: (-1.0, f64::INFINITY) };
        let v = principal_value(&pv, &cfg()).unwrap();
        // The odd part cancels on [-1, 1]; what remains is int_1^inf e^{-x^2}/x dx = E1(1)/2.
        let e1_of_1 = 0.219_383_934_395_520_3;
        assert_relative_eq!(v, 0.5 * e1_of_1, epsilon = 1e-10);
    }

    #[test]
    fn epsilon_regularized_examples() {
        let eps = 1e-3;
        let v = epsilon_regularized(|_: f64| 1.0, 0.0, eps, Branch::Plus, (-1.0, 1.0), &cfg()).unwrap();
        let exact_im = -(2.0 * (1.0 / eps).atan());
        assert!(v.re.abs() < 1e-12);
        assert_relative_eq!(v.im, exact_im, epsilon = 1e-12);
        assert!((v.im + (PI - 2e-3)).abs() < 1e-8);

        let far = epsilon_regularized(|x: f64| x.exp(), 5.0, 0.1, Branch::Plus, (-1.0, 1.0), &cfg()).unwrap();
        let oracle: f64 = integrate(|x: f64| x.exp() * (x - 5.0) / ((x - 5.0).powi(2) + 0.01), (-1.0, 1.0), &cfg()).unwrap();
        assert_relative_eq!(far.re, oracle, epsilon = 1e-12);
        assert!(matches!(
            epsilon_regularized(|_: f64| 1.0, 0.0, 0.0, Branch::Plus, (-1.0, 1.0), &cfg()),
            Err(Error::NonPositiveEpsilon(_))
        ));
    }

    #[test]
    fn sokhotski_plemelj_sweep() {
        let f = |x: f64| (-(x - 0.2).powi(2)).exp();
        let dom = (-2.0, 3.0);
        let pv = principal_value(&PVIntegrand { numerator: f, pole: 0.0, domain: dom }, &cfg()).unwrap();
        let limit = Complex::new(pv, -PI * f(0.0));
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
            let v = epsilon_regularized(f, 0.0, eps, Branch::Plus, dom, &cfg()).unwrap();
            let err = (v - limit).norm();
            assert!(err < prev, "eps {eps}: {err} !< {prev}");
            assert!(err <= 10.0 * eps * eps.ln().abs());
            prev = err;
        }
    }

    #[test]
    fn gauss_legendre_rules() {
        let two: Vec<(f64, f64)> = gauss_legendre(2);
        assert_relative_eq!(two[0].0, -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(two[1].1, 1.0, epsilon = 1e-15);
        for n in [1usize, 5, 40, 200] {
            let rule: Vec<(f64, f64)> = gauss_legendre(n);
            let w: f64 = rule.iter().map(|p| p.1).sum();
            assert_relative_eq!(w, 2.0, epsilon = 1e-13);
            assert!(rule.windows(2).all(|p| p[0].0 < p[1].0));
            let d = (2 * n - 2).min(20) as i32;
            let m: f64 = rule.iter().map(|&(x, w)| w * x.powi(d)).sum();
            assert!((m - 2.0 / (d as f64 + 1.0)).abs() < 1e-13, "n={n} d={d}");
        }
    }

    #[test]
    fn single_precision_integrates() {
        let cfg32 = QuadratureConfig::<f32>::default().with_tolerances(1e-6, 1e-6);
        let g: f32 = integrate(|x: f32| (-x * x).exp(), (0.0, f32::INFINITY), &cfg32).unwrap();
        assert!((g - 0.886_226_9).abs() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, eps in 1e-4f64..1e-1) {
            let f = |x: f64| (-(x * x)).exp();
            let h = |x: f64| (x + 0.3).cos() * (-(x * x) / 2.0).exp();
            let comb = |x: f64| a * f(x) + b * h(x);
            let dom = (-2.0, 2.5);
            let c = cfg();
            let i = |g: &dyn Fn(f64) -> f64| integrate(|x| g(x), dom, &c).unwrap();
            prop_assert!((i(&comb) - a * i(&f) - b * i(&h)).abs() < 1e-9);

            let p = |g: &dyn Fn(f64) -> f64| principal_value(&PVIntegrand { numerator: |x| g(x), pole: 0.1, domain: dom }, &c).unwrap();
            prop_assert!((p(&comb) - a * p(&f) - b * p(&h)).abs() < 1e-9);

            let e = |g: &dyn Fn(f64) -> f64| epsilon_regularized(|x| g(x), 0.1, eps, Branch::Plus, dom, &c).unwrap();
            prop_assert!((e(&comb) - e(&f) * a - e(&h) * b).norm() < 1e-8);
        }

        #[test]
        fn conjugation_is_exact(eps in 1e-5f64..1.0, pole in -1.5f64..2.0) {
            let f = |x: f64| (x + 0.5).sin() * (-(x * x)).exp();
            let c = cfg();
            let plus = epsilon_regularized(f, pole, eps, Branch::Plus, (-2.0, 2.5), &c).unwrap();
            let minus = epsilon_regularized(f, pole, eps, Branch::Minus, (-2.0, 2.5), &c).unwrap();
            prop_assert!((plus.conj() - minus).norm() <= 1e-14 * plus.norm().max(1.0));
        }
    }
}
