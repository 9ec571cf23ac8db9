//! Exact rational numbers over `i64`.
//!
//! Marginals and load bounds in this crate are compared exactly; the appendix
//! counterexample counts depend on exact tie detection, so no floating-point
//! arithmetic is used anywhere on the comparison paths.

use core::cmp::Ordering as CmpOrdering;
use core::fmt;

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frac {
    num: i64,
    den: i64,
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: i64, b: i64) -> Option<i64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

impl Frac {
    /// Builds `num / den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Frac {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Frac {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub const ZERO: Frac = Frac { num: 0, den: 1 };
    pub const ONE: Frac = Frac { num: 1, den: 1 };

    pub fn from_int(n: i64) -> Frac {
        Frac { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(self, other: Frac) -> Option<Frac> {
        let den = lcm(self.den, other.den)?;
        let a = self.num.checked_mul(den / self.den)?;
        let b = other.num.checked_mul(den / other.den)?;
        Some(Frac::new(a.checked_add(b)?, den))
    }

    pub fn checked_mul(self, other: Frac) -> Option<Frac> {
        // Cross-reduce first to keep intermediates small.
        let g1 = gcd(self.num, other.den).max(1);
        let g2 = gcd(other.num, self.den).max(1);
        let num = (self.num / g1).checked_mul(other.num / g2)?;
        let den = (self.den / g2).checked_mul(other.den / g1)?;
        Some(Frac::new(num, den))
    }

    /// Best rational approximation of `x` with bounded denominator, accepted
    /// only if it reproduces `x` to within `1e-9`.
    ///
    /// Decimal-looking inputs such as `0.1` or `0.333333` recover the intended
    /// fraction; an `f64` that is not close to any small rational is rejected.
    pub fn approx_f64(x: f64) -> Option<Frac> {
        const MAX_DEN: i64 = 1_000_000_000;
        const TOL: f64 = 1e-9;
        // f64::abs and f64::floor live in std, not core.
        fn fabs(x: f64) -> f64 {
            if x < 0.0 {
                -x
            } else {
                x
            }
        }
        if !x.is_finite() || fabs(x) > i64::MAX as f64 / 2.0 {
            return None;
        }
        let neg = x < 0.0;
        let mut v = fabs(x);
        // Continued-fraction convergents p/q of |x|.
        let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
        for _ in 0..64 {
            // Truncation equals floor for nonnegative values.
            let a = v as u64 as f64;
            if a > i64::MAX as f64 {
                return None;
            }
            let ai = a as i64;
            let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
            let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
            if q2 > MAX_DEN {
                break;
            }
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            let approx = p1 as f64 / q1 as f64;
            if fabs(approx - fabs(x)) <= TOL {
                let num = if neg { -p1 } else { p1 };
                return Some(Frac::new(num, q1));
            }
            let frac = v - a;
            if frac <= 1e-15 {
                break;
            }
            v = 1.0 / frac;
        }
        None
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Frac) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Frac) -> CmpOrdering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Prefer a short decimal rendering when the denominator divides 10^6.
        if 1_000_000 % self.den == 0 {
            let scaled = self.num * (1_000_000 / self.den);
            let (int, mut rem) = (scaled / 1_000_000, (scaled % 1_000_000).abs());
            let sign = if self.num < 0 && int == 0 { "-" } else { "" };
            if rem == 0 {
                return write!(f, "{}{}.0", sign, int);
            }
            let mut digits = 6;
            while rem % 10 == 0 {
                rem /= 10;
                digits -= 1;
            }
            write!(f, "{}{}.{:0width$}", sign, int, rem, width = digits)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
