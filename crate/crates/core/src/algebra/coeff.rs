//! Exact rational coefficients with an inline fast path for machine integers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A rational number.
///
/// Integers that fit in an `i64` are always stored inline, everything else
/// is boxed. The representation is canonical, so derived equality and
/// hashing agree with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Q {
    Small(i64),
    Big(Box<BigRational>),
}

impl Q {
    pub const ZERO: Q = Q::Small(0);
    pub const ONE: Q = Q::Small(1);

    pub fn int(n: i64) -> Q {
        Q::Small(n)
    }

    /// `n / d`, panicking on `d == 0`.
    pub fn frac(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        if n % d == 0 {
            if let Some(v) = n.checked_div(d) {
                return Q::Small(v);
            }
        }
        Q::from_big(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(r: BigRational) -> Q {
        if r.is_integer() {
            if let Some(v) = r.numer().to_i64() {
                return Q::Small(v);
            }
        }
        Q::Big(Box::new(r))
    }

    pub fn from_bigint(n: BigInt) -> Q {
        match n.to_i64() {
            Some(v) => Q::Small(v),
            None => Q::Big(Box::new(BigRational::from_integer(n))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(v) => BigRational::from_integer(BigInt::from(*v)),
            Q::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(1))
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Q::Small(_)) || matches!(self, Q::Big(b) if b.is_integer())
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Q::Small(v) => Some(*v),
            Q::Big(_) => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(v) => *v < 0,
            Q::Big(b) => b.is_negative(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::Small(v) => BigInt::from(*v),
            Q::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::Small(_) => BigInt::one(),
            Q::Big(b) => b.denom().clone(),
        }
    }

    pub fn add(&self, o: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, o) {
            if let Some(v) = a.checked_add(*b) {
                return Q::Small(v);
            }
        }
        Q::from_big(self.to_big() + o.to_big())
    }

    pub fn sub(&self, o: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, o) {
            if let Some(v) = a.checked_sub(*b) {
                return Q::Small(v);
            }
        }
        Q::from_big(self.to_big() - o.to_big())
    }

    pub fn mul(&self, o: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, o) {
            if let Some(v) = a.checked_mul(*b) {
                return Q::Small(v);
            }
        }
        Q::from_big(self.to_big() * o.to_big())
    }

    /// Exact quotient; `None` when `o` is zero.
    pub fn div(&self, o: &Q) -> Option<Q> {
        if o.is_zero() {
            return None;
        }
        if let (Q::Small(a), Q::Small(b)) = (self, o) {
            if a % b == 0 {
                if let Some(v) = a.checked_div(*b) {
                    return Some(Q::Small(v));
                }
            }
        }
        Some(Q::from_big(self.to_big() / o.to_big()))
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::Small(v) => match v.checked_neg() {
                Some(n) => Q::Small(n),
                None => Q::from_big(-self.to_big()),
            },
            Q::Big(b) => Q::from_big(-(**b).clone()),
        }
    }

    pub fn inv(&self) -> Option<Q> {
        Q::ONE.div(self)
    }

    pub fn add_assign(&mut self, o: &Q) {
        *self = Q::add(self, o);
    }

    pub fn pow(&self, e: u32) -> Q {
        let mut acc = Q::ONE;
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn from_i128(n: i128) -> Q {
        match i64::try_from(n) {
            Ok(v) => Q::Small(v),
            Err(_) => Q::from_bigint(BigInt::from(n)),
        }
    }

    /// Binomial coefficient `C(n, k)` for any integer `n` and `k >= 0`.
    pub fn binomial(n: i64, k: i64) -> Q {
        if k < 0 {
            return Q::ZERO;
        }
        let mut acc = BigRational::one();
        for i in 0..k {
            acc *= BigRational::new(BigInt::from(n - i), BigInt::from(i + 1));
        }
        Q::from_big(acc)
    }

    pub fn factorial(n: u32) -> Q {
        let mut acc = BigInt::one();
        for i in 2..=n {
            acc *= BigInt::from(i);
        }
        Q::from_bigint(acc)
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
        a.gcd(b)
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::ZERO
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Q::Small(a), Q::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Self {
        Q::Small(v)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(v) => write!(f, "{v}"),
            Q::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseQError(pub String);

impl fmt::Display for ParseQError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational `{}`", self.0)
    }
}

impl std::error::Error for ParseQError {}

impl FromStr for Q {
    type Err = ParseQError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseQError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            None => s.parse::<BigInt>().map(Q::from_bigint).map_err(|_| err()),
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Q::from_big(BigRational::new(n, d)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overflow_promotes_to_big() {
        let a = Q::int(i64::MAX);
        let b = a.add(&Q::ONE);
        assert!(matches!(b, Q::Big(_)));
        assert_eq!(b.sub(&Q::ONE), a);
        assert!(matches!(b.sub(&Q::ONE), Q::Small(_)));
    }

    #[test]
    fn frac_normalises() {
        assert_eq!(Q::frac(4, 2), Q::int(2));
        assert_eq!(Q::frac(2, -4).to_string(), "-1/2");
        assert_eq!("6/-4".parse::<Q>().unwrap(), Q::frac(-3, 2));
    }

    #[test]
    fn binomials() {
        assert_eq!(Q::binomial(4, 2), Q::int(6));
        assert_eq!(Q::binomial(-1, 3), Q::int(-1));
        assert_eq!(Q::binomial(2, 3), Q::ZERO);
    }

    proptest! {
        #[test]
        fn field_laws(a in -1000i64..1000, b in 1i64..50, c in -1000i64..1000, d in 1i64..50) {
            let x = Q::frac(a, b);
            let y = Q::frac(c, d);
            prop_assert_eq!(x.add(&y).sub(&y), x.clone());
            if !y.is_zero() {
                prop_assert_eq!(x.mul(&y).div(&y).unwrap(), x.clone());
            }
            prop_assert_eq!(x.to_string().parse::<Q>().unwrap(), x);
        }
    }
}
