//! Sine and cosine integrals.

use num_complex::Complex;

use crate::scalar::{lit, Real};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
const MAX_TERMS: usize = 200;

/// `(Si(x), Ci(x))` for `x > 0`; `Ci` is `-inf` at zero.
pub fn sici<T: Real>(x: T) -> (T, T) {
    assert!(x >= T::zero(), "sici needs x >= 0");
    if x == T::zero() {
        return (T::zero(), T::neg_infinity());
    }
    if x <= lit(SERIES_LIMIT) {
        series(x)
    } else {
        continued_fraction(x)
    }
}

pub fn sine_integral<T: Real>(x: T) -> T {
    if x < T::zero() {
        -sici(-x).0
    } else {
        sici(x).0
    }
}

pub fn cosine_integral<T: Real>(x: T) -> T {
    sici(x).1
}

fn series<T: Real>(x: T) -> (T, T) {
    let mut si = T::zero();
    let mut ci = T::zero();
    // term = x^n / n!; odd n feed Si, even n feed Ci.
    let mut term = T::one();
    let mut sign = T::one();
    for n in 1..MAX_TERMS {
        let nf = lit::<T>(n as f64);
        term = term * x / nf;
        if n % 2 == 1 {
            si = si + sign * term / nf;
        } else {
            sign = -sign;
            ci = ci + sign * term / nf;
        }
        if term.abs() < T::epsilon() * (si.abs() + ci.abs() + T::min_positive_value()) {
            break;
        }
    }
    (si, lit::<T>(EULER_GAMMA) + x.ln() + ci)
}

// Modified Lentz evaluation of E1(ix) = -Ci(x) + i (Si(x) - pi/2).
fn continued_fraction<T: Real>(x: T) -> (T, T) {
    let tiny = T::min_positive_value() * lit(4.0);
    let two = lit::<T>(2.0);
    let mut b = Complex::new(T::one(), x);
    let mut c = Complex::new(T::one() / tiny, T::zero());
    let mut d = b.inv();
    let mut h = d;
    for i in 1..MAX_TERMS {
        let a = -lit::<T>((i * i) as f64);
        b = b + two;
        d = (d * a + b).inv();
        c = b + Complex::new(a, T::zero()) / c;
        let del = c * d;
        h = h * del;
        if (del.re - T::one()).abs() + del.im.abs() < T::epsilon() {
            break;
        }
    }
    let h = Complex::new(x.cos(), -x.sin()) * h;
    (T::FRAC_PI_2() + h.im, -h.re)
}
