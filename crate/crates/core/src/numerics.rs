//! Gaussian tail, binary entropy and the composition `Hb(Q(sqrt(x)))` that every
//! capacity expression in the crate reduces to.
//!
//! `Q` is evaluated through `erfc`, so the upper tail keeps full relative
//! precision until it leaves the representable range. `hbq` switches to a
//! log-domain expansion once `Q(sqrt(x))` drops below [`HBQ_CROSSOVER`], which
//! lets it follow the tail past the point where `Q` itself underflows.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tail probability below which [`hbq`] uses the small-`p` expansion.
pub const HBQ_CROSSOVER: f64 = 1e-15;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability<T>(T);

impl<T: Real> Probability<T> {
    /// Validates `value`. Values at most one ulp outside `[0, 1]` are clamped,
    /// anything further out is rejected.
    pub fn new(value: T) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::ProbabilityOutOfRange(f64::NAN));
        }
        let one = T::one();
        if value > one {
            if value - one <= T::epsilon() {
                return Ok(Self(one));
            }
            return Err(Error::ProbabilityOutOfRange(value.as_f64()));
        }
        if value < T::zero() {
            if -value <= T::min_positive_value() {
                return Ok(Self(T::zero()));
            }
            return Err(Error::ProbabilityOutOfRange(value.as_f64()));
        }
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// `1 - p`.
    #[inline]
    pub fn complement(self) -> Self {
        Self(T::one() - self.0)
    }
}

/// The argument `x` of `Hb(Q(sqrt(x)))`: a finite, non-negative SNR-like quantity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EffectiveSnr<T>(T);

impl<T: Real> EffectiveSnr<T> {
    pub fn new(value: T) -> Result<Self> {
        if !value.is_finite() || value < T::zero() {
            return Err(Error::NegativeSnr(value.as_f64()));
        }
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

#[inline]
pub(crate) fn q_raw<T: Real>(x: T) -> T {
    T::lit(0.5) * (x / T::SQRT_2()).erfc()
}

/// Gaussian tail probability `Q(x) = P[N(0,1) > x] = erfc(x / sqrt 2) / 2`.
pub fn q_function<T: Real>(x: T) -> Result<Probability<T>> {
    if !x.is_finite() {
        return Err(Error::NonFinite("q_function argument"));
    }
    Probability::new(q_raw(x))
}

/// Natural log of `Q(x)`, finite for every finite `x` even where `Q(x)` itself
/// underflows.
pub fn ln_q_function<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::NonFinite("ln_q_function argument"));
    }
    Ok(ln_q_raw(x))
}

pub(crate) fn ln_q_raw<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return (-q_raw(-x)).ln_1p();
    }
    let q = q_raw(x);
    // keep well clear of subnormals so ln(q) retains full precision
    if q > T::min_positive_value() * T::lit(1.0737e9) {
        return q.ln();
    }
    // Q(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...), x >= ~12 here
    let inv2 = (x * x).recip();
    let mut term = T::one();
    let mut series = T::one();
    for k in 1..=7 {
        term = -term * T::lit((2 * k - 1) as f64) * inv2;
        series = series + term;
    }
    let ln_sqrt_2pi = T::lit(0.918_938_533_204_672_8);
    -x * x * T::lit(0.5) - x.ln() - ln_sqrt_2pi + series.ln()
}

/// `Hb(p) = -p log2 p - (1-p) log2(1-p)`, with `Hb(0) = Hb(1) = 0`.
pub fn binary_entropy<T: Real>(p: Probability<T>) -> T {
    binary_entropy_raw(p.value())
}

#[inline]
pub(crate) fn binary_entropy_raw<T: Real>(p: T) -> T {
    // evaluate on the smaller side; 1 - p is exact for p in [0.5, 1]
    let p = if p > T::lit(0.5) { T::one() - p } else { p };
    if p <= T::zero() {
        return T::zero();
    }
    (-p * p.ln() - (T::one() - p) * (-p).ln_1p()) * T::LOG2_E()
}

/// `Hb(Q(sqrt(x)))`, monotone non-increasing and convex on `x >= 0`.
pub fn hbq<T: Real>(x: EffectiveSnr<T>) -> T {
    hbq_raw(x.value())
}

/// [`hbq`] on a raw value; callers guarantee `x >= 0`.
pub(crate) fn hbq_raw<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    let s = x.sqrt();
    let p = q_raw(s);
    if p >= T::lit(HBQ_CROSSOVER) {
        return binary_entropy_raw(p);
    }
    // Hb(p) = (p ln(1/p) + p - p^2/2 + O(p^3)) / ln 2 with ln p from the tail expansion
    let ln_p = ln_q_raw(s);
    let p = ln_p.exp();
    (p * (T::one() - ln_p) - p * p * T::lit(0.5)) * T::LOG2_E()
}

/// Solves `hbq(delta) = epsilon` for `delta` by bisection.
///
/// The upper end of the bracket starts at 1 and doubles until `hbq` falls
/// below `epsilon`; bisection then runs until the bracket cannot shrink further.
pub fn solve_hbq_threshold<T: Real>(epsilon: T) -> Result<EffectiveSnr<T>> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon.as_f64(),
            range: "(0, 1)",
        });
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    while hbq_raw(hi) >= epsilon {
        lo = hi;
        hi = hi + hi;
        if !hi.is_finite() {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: epsilon.as_f64(),
                range: "above the smallest representable hbq value",
            });
        }
    }
    // invariant: hbq(lo) >= epsilon > hbq(hi)
    for _ in 0..2000 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if hbq_raw(mid) >= epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pick = if (hbq_raw(lo) - epsilon).abs() <= (hbq_raw(hi) - epsilon).abs() {
        lo
    } else {
        hi
    };
    EffectiveSnr::new(pick)
}
