//! Exact rationals and the extended number line `ℚ ∪ {+∞}`.
//!
//! [`Rational`] keeps small values as a reduced `i64` fraction and switches to
//! a boxed [`BigRational`] only when an intermediate result overflows, so the
//! common case of small integer and half-integer matrix entries never
//! allocates. Both representations are canonical: a value that fits in the
//! small form is always stored in it, which makes derived equality and hashing
//! structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseNumberError(pub String);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced fraction with positive denominator.
    Small(i64, i64),
    /// Only used when the value does not fit `Small`.
    Big(Box<BigRational>),
}

/// An exact rational number in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

impl Rational {
    pub const ZERO: Rational = Rational(Repr::Small(0, 1));
    pub const ONE: Rational = Rational(Repr::Small(1, 1));

    pub const fn integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// Builds `num / den`. Panics if `den` is zero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(BigRational::new(n.into(), d.into())))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational keeps itself reduced with a positive denominator.
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(r))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational::integer(Integer::div_floor(n, d)),
            Repr::Big(b) => Self::from_big(b.floor()),
        }
    }

    pub fn ceil(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => {
                Self::from_i128(Integer::div_ceil(&(*n as i128), &(*d as i128)), 1)
            }
            Repr::Big(b) => Self::from_big(b.ceil()),
        }
    }

    /// Exact `self / 2`.
    pub fn half(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) if n % 2 == 0 => Rational(Repr::Small(n / 2, *d)),
            Repr::Small(n, d) => Self::from_i128(*n as i128, 2 * *d as i128),
            Repr::Big(b) => Self::from_big((**b).clone() / BigInt::from(2)),
        }
    }

    /// Exact division; `None` for a zero divisor.
    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Self::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Self::from_big(self.to_big() / rhs.to_big()),
        })
    }

    pub fn recip(&self) -> Option<Rational> {
        Rational::ONE.checked_div(self)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::integer(n as i64)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn add(self, rhs: &'a Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, 1), Repr::Small(c, 1)) => match a.checked_add(*c) {
                Some(s) => Rational::integer(s),
                None => Rational::from_i128(*a as i128 + *c as i128, 1),
            },
            (Repr::Small(a, b), Repr::Small(c, d)) if b == d => {
                Rational::from_i128(*a as i128 + *c as i128, *b as i128)
            }
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let lhs = *a as i128 * *d as i128;
                let rhs_n = *c as i128 * *b as i128;
                match lhs.checked_add(rhs_n) {
                    Some(n) => Rational::from_i128(n, *b as i128 * *d as i128),
                    None => Rational::from_big(self.to_big() + rhs.to_big()),
                }
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn sub(self, rhs: &'a Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn mul(self, rhs: &'a Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational(Repr::Small(m, *d)),
                None => Rational::from_i128(-(*n as i128), *d as i128),
            },
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        -&self
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseNumberError;

    /// Accepts `p`, `-p` and `p/q` with decimal integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseNumberError(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = match den {
            Some(d) => d.parse().map_err(|_| err())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

/// An element of `ℚ ∪ {+∞}`. There is no `-∞`: an absent constraint is `+∞`.
///
/// The derived order puts every finite value strictly below `PlusInfinity`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(Rational),
    PlusInfinity,
}

impl Bound {
    pub const ZERO: Bound = Bound::Finite(Rational::ZERO);

    pub fn int(n: i64) -> Bound {
        Bound::Finite(Rational::integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Bound {
        Bound::Finite(Rational::new(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Bound::PlusInfinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(r) => Some(r),
            Bound::PlusInfinity => None,
        }
    }

    #[inline]
    pub fn add(&self, other: &Bound) -> Bound {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a + b),
            _ => Bound::PlusInfinity,
        }
    }

    pub fn add_rational(&self, c: &Rational) -> Bound {
        match self {
            Bound::Finite(a) => Bound::Finite(a + c),
            Bound::PlusInfinity => Bound::PlusInfinity,
        }
    }

    pub fn min(&self, other: &Bound) -> Bound {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn max(&self, other: &Bound) -> Bound {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn half(&self) -> Bound {
        match self {
            Bound::Finite(a) => Bound::Finite(a.half()),
            Bound::PlusInfinity => Bound::PlusInfinity,
        }
    }

    pub fn double(&self) -> Bound {
        match self {
            Bound::Finite(a) => Bound::Finite(a + a),
            Bound::PlusInfinity => Bound::PlusInfinity,
        }
    }
}

impl From<Rational> for Bound {
    fn from(r: Rational) -> Self {
        Bound::Finite(r)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(r) => write!(f, "{r}"),
            Bound::PlusInfinity => f.write_str("+oo"),
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Bound {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+oo" | "oo" => Ok(Bound::PlusInfinity),
            t => t.parse().map(Bound::Finite),
        }
    }
}

/// A closed interval whose endpoints may be unbounded; `lo == None` is `-∞`.
///
/// Used for projections and interval arithmetic only, hence the separate
/// representation of the lower end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Interval {
    pub fn top() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn point(c: Rational) -> Self {
        Interval {
            lo: Some(c.clone()),
            hi: Some(c),
        }
    }

    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| l <= x) && self.hi.as_ref().is_none_or(|h| x <= h)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let sum = |a: &Option<Rational>, b: &Option<Rational>| match (a, b) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Interval {
            lo: sum(&self.lo, &other.lo),
            hi: sum(&self.hi, &other.hi),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.as_ref().map(|h| -h),
            hi: self.lo.as_ref().map(|l| -l),
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        if c.is_zero() {
            return Interval::point(Rational::ZERO);
        }
        let lo = self.lo.as_ref().map(|l| l * c);
        let hi = self.hi.as_ref().map(|h| h * c);
        if c.is_negative() {
            Interval { lo: hi, hi: lo }
        } else {
            Interval { lo, hi }
        }
    }

    /// Upper end as a [`Bound`].
    pub fn upper(&self) -> Bound {
        self.hi.clone().map_or(Bound::PlusInfinity, Bound::Finite)
    }

    /// Negated lower end as a [`Bound`], i.e. the bound on `-x`.
    pub fn neg_lower(&self) -> Bound {
        self.lo
            .as_ref()
            .map_or(Bound::PlusInfinity, |l| Bound::Finite(-l))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            Some(l) => write!(f, "[{l}, ")?,
            None => f.write_str("[-oo, ")?,
        }
        match &self.hi {
            Some(h) => write!(f, "{h}]"),
            None => f.write_str("+oo]"),
        }
    }
}
