//! Truncated Laurent series over a commutative coefficient ring.
//!
//! A series is known exactly for exponents below its precision; `None`
//! precision means the series is an exact Laurent polynomial.

use std::collections::BTreeMap;
use std::fmt;

use super::coeff::Q;
use super::ratfrac::RatFrac;
use crate::error::{Error, Result};

/// Coefficient ring for [`Laurent`].
pub trait Ring: Clone + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact test for the zero element.
    fn is_zero(&self) -> bool;
    /// Inverse when `self` is a unit.
    fn try_inv(&self) -> Option<Self>;
    fn is_nilpotent(&self) -> bool {
        self.is_zero()
    }
    /// Any product of this many nilpotent elements vanishes.
    fn nilpotency_bound(&self) -> u32 {
        1
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    /// Hook to bring a coefficient to a tidier form; identity by default.
    fn tidy(self) -> Self {
        self
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Q::ZERO
    }
    fn one() -> Self {
        Q::ONE
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        Q::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Q::mul(self, o)
    }
    fn neg(&self) -> Self {
        Q::neg(self)
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv()
    }
}

impl Ring for RatFrac {
    fn zero() -> Self {
        RatFrac::zero()
    }
    fn one() -> Self {
        RatFrac::one()
    }
    fn from_q(q: &Q) -> Self {
        RatFrac::constant(q.clone())
    }
    fn add(&self, o: &Self) -> Self {
        RatFrac::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFrac::mul(self, o)
    }
    fn neg(&self) -> Self {
        RatFrac::neg(self)
    }
    fn is_zero(&self) -> bool {
        RatFrac::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn tidy(self) -> Self {
        self.cancelled()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<R: Ring> {
    coeffs: BTreeMap<i32, R>,
    prec: Option<i32>,
}

impl<R: Ring> Laurent<R> {
    pub fn zero() -> Self {
        Laurent { coeffs: BTreeMap::new(), prec: None }
    }

    pub fn one() -> Self {
        Laurent::monomial(R::one(), 0)
    }

    /// `c · x^k`.
    pub fn monomial(c: R, k: i32) -> Self {
        let mut s = Laurent::zero();
        if !c.is_zero() {
            s.coeffs.insert(k, c);
        }
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, R)>>(it: I) -> Self {
        let mut s = Laurent::zero();
        for (k, c) in it {
            s.add_term(k, c);
        }
        s
    }

    /// Series of `exp(c x)` known below `x^prec`.
    pub fn exp_linear(c: &Q, prec: i32) -> Self {
        let mut s = Laurent::zero();
        let mut term = Q::ONE;
        for j in 0..prec.max(0) {
            if j > 0 {
                term = term.mul(c).mul(&Q::frac(1, j as i64));
            }
            s.add_term(j, R::from_q(&term));
        }
        s.prec = Some(prec);
        s
    }

    fn add_term(&mut self, k: i32, c: R) {
        if self.prec.is_some_and(|p| k >= p) || c.is_zero() {
            return;
        }
        let merged = match self.coeffs.remove(&k) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.coeffs.insert(k, merged);
        }
    }

    pub fn prec(&self) -> Option<i32> {
        self.prec
    }

    /// Forgets everything at or above `x^p`.
    pub fn truncate(mut self, p: i32) -> Self {
        self.coeffs.retain(|k, _| *k < p);
        self.prec = Some(self.prec.map_or(p, |q| q.min(p)));
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &R)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i32) -> Result<R> {
        if self.prec.is_some_and(|p| k >= p) {
            return Err(Error::Precision(format!("coefficient of x^{k} requested, series known below x^{}", self.prec.unwrap())));
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_else(R::zero))
    }

    /// Coefficient of `x^{-1}`.
    pub fn residue(&self) -> Result<R> {
        self.coeff(-1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = min_prec(self.prec, o.prec);
        let mut s = Laurent { coeffs: BTreeMap::new(), prec };
        for (k, c) in self.coeffs.iter().chain(o.coeffs.iter()) {
            s.add_term(*k, c.clone());
        }
        s.tidy()
    }

    pub fn neg(&self) -> Self {
        Laurent { coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.neg())).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut s = Laurent { coeffs: BTreeMap::new(), prec: self.prec };
        for (k, x) in &self.coeffs {
            s.add_term(*k, x.mul(c));
        }
        s
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i32) -> Self {
        Laurent {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            prec: self.prec.map(|p| p + k),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if (self.is_zero() && self.prec.is_none()) || (o.is_zero() && o.prec.is_none()) {
            return Laurent::zero();
        }
        let va = self.valuation().unwrap_or_else(|| self.prec.unwrap_or(0));
        let vb = o.valuation().unwrap_or_else(|| o.prec.unwrap_or(0));
        let prec = min_prec(self.prec.map(|p| p + vb), o.prec.map(|p| p + va));
        let mut acc: BTreeMap<i32, Vec<R>> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &o.coeffs {
                let k = i + j;
                if prec.is_some_and(|p| k >= p) {
                    continue;
                }
                acc.entry(k).or_default().push(a.mul(b));
            }
        }
        let mut s = Laurent { coeffs: BTreeMap::new(), prec };
        for (k, parts) in acc {
            let mut c = R::zero();
            for p in &parts {
                c = c.add(p);
            }
            s.add_term(k, c.tidy());
        }
        s
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Laurent::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn tidy(mut self) -> Self {
        let coeffs = std::mem::take(&mut self.coeffs);
        for (k, c) in coeffs {
            let c = c.tidy();
            if !c.is_zero() {
                self.coeffs.insert(k, c);
            }
        }
        self
    }

    /// Multiplicative inverse, known below `x^target` (or exact when possible).
    ///
    /// The pivot is the lowest term with a unit coefficient; all lower terms
    /// must have nilpotent coefficients.
    pub fn inv(&self, target: i32) -> Result<Self> {
        let (m, um) = self
            .coeffs
            .iter()
            .find(|(_, c)| c.try_inv().is_some())
            .map(|(k, c)| (*k, c.clone()))
            .ok_or_else(|| Error::NotInvertible("no unit coefficient".into()))?;
        let mut depth = 0;
        let mut bound = 1;
        let mut lower = Laurent::zero();
        for (k, c) in self.coeffs.range(..m) {
            if !c.is_nilpotent() {
                return Err(Error::NotInvertible(format!("non-nilpotent coefficient below the pivot at x^{k}")));
            }
            depth = depth.max(m - k);
            bound = bound.max(c.nilpotency_bound());
            lower.add_term(*k, c.clone());
        }
        let slack = (bound as i32 - 1) * depth;
        let mut upper = Laurent { coeffs: self.coeffs.range(m..).map(|(k, c)| (*k, c.clone())).collect(), prec: self.prec };
        upper.coeffs.insert(m, um);
        let u_inv = upper.inv_unit_led(m, target + slack)?;
        if lower.is_zero() {
            return Ok(u_inv);
        }
        // (U + L)^{-1} = U^{-1} Σ_k (-L U^{-1})^k, finite since L is nilpotent.
        let t = lower.mul(&u_inv).neg();
        let mut acc = Laurent::one();
        let mut power = Laurent::one();
        for _ in 0..bound {
            power = power.mul(&t);
            if power.coeffs.is_empty() {
                break;
            }
            acc = acc.add(&power);
        }
        if !power.coeffs.is_empty() {
            return Err(Error::NotInvertible("nilpotent part did not vanish".into()));
        }
        let out = u_inv.mul(&acc);
        Ok(match out.prec {
            Some(_) => out.truncate(target),
            None => out,
        })
    }

    /// Inverse of `u x^m (1 + N)` with `N` of positive valuation.
    fn inv_unit_led(&self, m: i32, target: i32) -> Result<Self> {
        let um_inv = self.coeffs[&m].try_inv().expect("unit pivot");
        let mut n_terms = Laurent::zero();
        for (k, c) in self.coeffs.range(m + 1..) {
            n_terms.add_term(k - m, c.mul(&um_inv));
        }
        if n_terms.coeffs.is_empty() && self.prec.is_none() {
            return Ok(Laurent::monomial(um_inv, -m));
        }
        // (1 + N)^{-1} must be known below x^{target + m}.
        let mut inner = target + m;
        if let Some(p) = self.prec {
            inner = inner.min(p - m);
        }
        let minus_n = n_terms.truncate(inner).neg();
        let mut acc = Laurent::one().truncate(inner);
        let mut power = Laurent::one();
        for _ in 0..inner.max(0) {
            power = power.mul(&minus_n).truncate(inner);
            if power.coeffs.is_empty() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.scale(&um_inv).shift(-m))
    }

    /// `f(g)` for `g` of valuation exactly one, known below `x^target`.
    pub fn compose(&self, g: &Self, target: i32) -> Result<Self> {
        if g.valuation() != Some(1) {
            return Err(Error::InvalidInput("inner series must have valuation 1".into()));
        }
        let lo = self.valuation().unwrap_or(0).min(0);
        let g = g.clone().truncate(target - lo + 2);
        let ginv = g.inv(target - lo + 2)?;
        let mut acc = Laurent::zero().truncate(target.min(self.prec.unwrap_or(i32::MAX)));
        for (k, c) in &self.coeffs {
            let base = if *k >= 0 { g.pow(*k as u32) } else { ginv.pow((-k) as u32) };
            acc = acc.add(&base.scale(c).truncate(target));
        }
        Ok(acc)
    }
}

fn min_prec(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Laurent<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*x^{k}")?;
        }
        if let Some(p) = self.prec {
            write!(f, " + O(x^{p})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::frac(n, d)
    }

    #[test]
    fn geometric_inverse() {
        // 1/(1 - x) = 1 + x + x^2 + …
        let s: Laurent<Q> = Laurent::from_terms([(0, Q::ONE), (1, Q::int(-1))]);
        let t = s.inv(5).unwrap();
        for k in 0..5 {
            assert_eq!(t.coeff(k).unwrap(), Q::ONE);
        }
        assert!(t.coeff(5).is_err());
    }

    #[test]
    fn inverse_with_pole() {
        // 1/(e^{-x} - 1) = -1/x - 1/2 - x/12 + …
        let e = Laurent::<Q>::exp_linear(&Q::int(-1), 6).sub(&Laurent::one());
        let t = e.inv(2).unwrap();
        assert_eq!(t.residue().unwrap(), Q::int(-1));
        assert_eq!(t.coeff(0).unwrap(), q(-1, 2));
        assert_eq!(t.coeff(1).unwrap(), q(-1, 12));
    }

    #[test]
    fn composition_matches_direct_expansion() {
        // f(x) = 1/x, g = e^{-h} - 1: f(g) = 1/(e^{-h}-1).
        let f: Laurent<Q> = Laurent::monomial(Q::ONE, -1);
        let g = Laurent::<Q>::exp_linear(&Q::int(-1), 8).sub(&Laurent::one());
        let a = f.compose(&g, 3).unwrap();
        let b = g.inv(3).unwrap();
        for k in -1..3 {
            assert_eq!(a.coeff(k).unwrap(), b.coeff(k).unwrap(), "k = {k}");
        }
    }
}
