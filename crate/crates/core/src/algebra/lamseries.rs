//! Truncated power series in `Λ`, graded by monomials in the insertion variables.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coeff::Q;
use super::exppoly::ExpPoly;
use super::ratfrac::RatFrac;
use super::subst::LinearMap;
use crate::error::{Error, Result};

/// Insertion variable: the class `τ_p` or its exceptional counterpart `t_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum InsVar {
    Tau(i32),
    T(i32),
}

impl fmt::Display for InsVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InsVar::Tau(p) => write!(f, "tau{p}"),
            InsVar::T(p) => write!(f, "t{p}"),
        }
    }
}

/// Monomial in insertion variables, sorted with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Monomial(Vec<(InsVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: InsVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers<I: IntoIterator<Item = (InsVar, u32)>>(it: I) -> Self {
        let mut m = Monomial::one();
        for (v, k) in it {
            for _ in 0..k {
                m = m.mul(&Monomial::var(v));
            }
        }
        m
    }

    pub fn powers(&self) -> &[(InsVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut map: BTreeMap<InsVar, u32> = self.0.iter().cloned().collect();
        for (v, k) in &o.0 {
            *map.entry(*v).or_insert(0) += k;
        }
        Monomial(map.into_iter().collect())
    }

    /// `Π k_v!`, the symmetry factor in `exp(Σ v x_v)`.
    pub fn factorial(&self) -> Q {
        let mut acc = Q::ONE;
        for (_, k) in &self.0 {
            acc = acc.mul(&Q::factorial(*k));
        }
        acc
    }

    pub fn parse(s: &str) -> Result<Monomial> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Monomial::one());
        }
        let mut m = Monomial::one();
        for part in s.split('*') {
            let (name, pow) = match part.split_once('^') {
                Some((n, p)) => (n, p.parse::<u32>().map_err(|_| Error::Parse(part.into()))?),
                None => (part, 1),
            };
            let v = if let Some(p) = name.strip_prefix("tau") {
                InsVar::Tau(p.parse().map_err(|_| Error::Parse(part.into()))?)
            } else if let Some(p) = name.strip_prefix('t') {
                InsVar::T(p.parse().map_err(|_| Error::Parse(part.into()))?)
            } else {
                return Err(Error::Parse(format!("unknown insertion `{part}`")));
            };
            m = m.mul(&Monomial::from_powers([(v, pow)]));
        }
        Ok(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, k)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *k == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{k}")?;
            }
        }
        Ok(())
    }
}

/// Power series in `Λ` truncated at `order`, graded by insertion monomials
/// of total degree at most `degree`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LamSeries {
    order: u32,
    degree: u32,
    coeffs: BTreeMap<(u32, Monomial), RatFrac>,
}

impl LamSeries {
    pub fn new(order: u32, degree: u32) -> Self {
        LamSeries { order, degree, coeffs: BTreeMap::new() }
    }

    pub fn one(order: u32, degree: u32) -> Self {
        let mut s = LamSeries::new(order, degree);
        s.set(0, Monomial::one(), RatFrac::one());
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Stores a coefficient, dropping zeros and terms beyond the truncation.
    pub fn set(&mut self, n: u32, m: Monomial, c: RatFrac) {
        if n > self.order || m.degree() > self.degree {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&(n, m));
        } else {
            self.coeffs.insert((n, m), c);
        }
    }

    pub fn get(&self, n: u32, m: &Monomial) -> Option<&RatFrac> {
        self.coeffs.get(&(n, m.clone()))
    }

    /// Coefficient of `Λ^n` in the insertion-free grade.
    pub fn coeff(&self, n: u32) -> RatFrac {
        self.get(n, &Monomial::one()).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, Monomial), &RatFrac)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = self.coeffs.keys().map(|(_, m)| m.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Keeps only the given insertion grade, relabelled as the trivial grade.
    pub fn grade(&self, m: &Monomial) -> LamSeries {
        let mut s = LamSeries::new(self.order, 0);
        for ((n, k), c) in &self.coeffs {
            if k == m {
                s.set(*n, Monomial::one(), c.clone());
            }
        }
        s
    }

    pub fn truncate(&self, order: u32, degree: u32) -> LamSeries {
        let mut s = LamSeries::new(order, degree);
        for ((n, m), c) in &self.coeffs {
            s.set(*n, m.clone(), c.clone());
        }
        s
    }

    /// Sums series term by term, cancelling each coefficient.
    pub fn sum<'a, I: IntoIterator<Item = &'a LamSeries>>(order: u32, degree: u32, it: I) -> LamSeries {
        let mut groups: BTreeMap<(u32, Monomial), Vec<&RatFrac>> = BTreeMap::new();
        for s in it {
            for ((n, m), c) in &s.coeffs {
                if *n <= order && m.degree() <= degree {
                    groups.entry((*n, m.clone())).or_default().push(c);
                }
            }
        }
        LamSeries::from_groups(order, degree, groups)
    }

    fn from_groups(order: u32, degree: u32, groups: BTreeMap<(u32, Monomial), Vec<&RatFrac>>) -> LamSeries {
        let summed: Vec<((u32, Monomial), RatFrac)> = groups
            .into_par_iter()
            .map(|(k, v)| (k, RatFrac::sum(v).cancelled()))
            .collect();
        let mut s = LamSeries::new(order, degree);
        for ((n, m), c) in summed {
            s.set(n, m, c);
        }
        s
    }

    pub fn add(&self, o: &LamSeries) -> LamSeries {
        LamSeries::sum(self.order.min(o.order), self.degree.min(o.degree), [self, o])
    }

    pub fn sub(&self, o: &LamSeries) -> LamSeries {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> LamSeries {
        self.map(|c| c.neg())
    }

    /// Applies `f` to every coefficient.
    pub fn map<F: Fn(&RatFrac) -> RatFrac + Sync>(&self, f: F) -> LamSeries {
        self.try_map(|c| Ok(f(c))).expect("infallible map")
    }

    pub fn try_map<F: Fn(&RatFrac) -> Result<RatFrac> + Sync>(&self, f: F) -> Result<LamSeries> {
        let mapped: Vec<((u32, Monomial), RatFrac)> = self
            .coeffs
            .par_iter()
            .map(|(k, c)| f(c).map(|v| (k.clone(), v)))
            .collect::<Result<_>>()?;
        let mut s = LamSeries::new(self.order, self.degree);
        for ((n, m), c) in mapped {
            s.set(n, m, c);
        }
        Ok(s)
    }

    /// Applies `f(n, c)` to the `Λ^n` coefficients.
    pub fn try_map_indexed<F>(&self, f: F) -> Result<LamSeries>
    where
        F: Fn(u32, &RatFrac) -> Result<RatFrac> + Sync,
    {
        let mapped: Vec<((u32, Monomial), RatFrac)> = self
            .coeffs
            .par_iter()
            .map(|(k, c)| f(k.0, c).map(|v| (k.clone(), v)))
            .collect::<Result<_>>()?;
        let mut s = LamSeries::new(self.order, self.degree);
        for ((n, m), c) in mapped {
            s.set(n, m, c);
        }
        Ok(s)
    }

    pub fn scale(&self, c: &RatFrac) -> LamSeries {
        self.map(|x| x.mul(c))
    }

    pub fn substitute(&self, map: &LinearMap) -> Result<LamSeries> {
        self.try_map(|c| c.substitute(map))
    }

    /// Multiplies by `Λ^k`; the truncation order moves up by `k`.
    pub fn shift_lambda(&self, k: u32) -> LamSeries {
        let mut s = LamSeries::new(self.order + k, self.degree);
        for ((n, m), c) in &self.coeffs {
            s.set(n + k, m.clone(), c.clone());
        }
        s
    }

    /// Rewrites insertion monomials through `rule`, which maps a monomial to
    /// a combination of monomials with polynomial coefficients.
    pub fn map_insertions<F>(&self, degree: u32, rule: F) -> LamSeries
    where
        F: Fn(&Monomial) -> Vec<(Monomial, ExpPoly)>,
    {
        let mut cache: BTreeMap<Monomial, Vec<(Monomial, ExpPoly)>> = BTreeMap::new();
        let mut groups: BTreeMap<(u32, Monomial), Vec<RatFrac>> = BTreeMap::new();
        for ((n, m), c) in &self.coeffs {
            let images = cache.entry(m.clone()).or_insert_with(|| rule(m));
            for (m2, p) in images.iter() {
                if m2.degree() <= degree {
                    groups.entry((*n, m2.clone())).or_default().push(c.mul_poly(p));
                }
            }
        }
        let refs: BTreeMap<(u32, Monomial), Vec<&RatFrac>> =
            groups.iter().map(|(k, v)| (k.clone(), v.iter().collect())).collect();
        LamSeries::from_groups(self.order, degree, refs)
    }

    /// Truncated product.
    pub fn mul(&self, o: &LamSeries) -> LamSeries {
        let order = self.order.min(o.order);
        let degree = self.degree.min(o.degree);
        let mut pairs: BTreeMap<(u32, Monomial), Vec<(&RatFrac, &RatFrac)>> = BTreeMap::new();
        for ((n1, m1), c1) in &self.coeffs {
            for ((n2, m2), c2) in &o.coeffs {
                let n = n1 + n2;
                if n > order || m1.degree() + m2.degree() > degree {
                    continue;
                }
                pairs.entry((n, m1.mul(m2))).or_default().push((c1, c2));
            }
        }
        let summed: Vec<((u32, Monomial), RatFrac)> = pairs
            .into_par_iter()
            .map(|(k, v)| {
                let prods: Vec<RatFrac> = v.iter().map(|(a, b)| a.mul(b)).collect();
                (k, RatFrac::sum(prods.iter()).cancelled())
            })
            .collect();
        let mut s = LamSeries::new(order, degree);
        for ((n, m), c) in summed {
            s.set(n, m, c);
        }
        s
    }

    /// `self / o` for an insertion-free divisor with constant term `1`.
    pub fn div(&self, o: &LamSeries) -> Result<LamSeries> {
        if !o.coeff(0).is_one() || o.coeffs.keys().any(|(_, m)| !m.is_one()) {
            return Err(Error::InvalidInput("series divisor must be insertion-free with constant term 1".into()));
        }
        let order = self.order.min(o.order);
        let mut out = LamSeries::new(order, self.degree);
        for m in self.monomials() {
            let mut q: BTreeMap<u32, RatFrac> = BTreeMap::new();
            for n in 0..=order {
                let mut terms = vec![self.get(n, &m).cloned().unwrap_or_default()];
                for (k, qk) in &q {
                    if *k < n {
                        let b = o.coeff(n - k);
                        if !b.is_zero() {
                            terms.push(qk.mul(&b).neg());
                        }
                    }
                }
                let v = RatFrac::sum(terms.iter()).cancelled();
                if !v.is_zero() {
                    q.insert(n, v);
                }
            }
            for (n, c) in q {
                out.set(n, m.clone(), c);
            }
        }
        Ok(out)
    }

    /// Coefficientwise exact equality up to the smaller truncation.
    pub fn equals(&self, o: &LamSeries) -> bool {
        self.mismatches(o).is_empty()
    }

    /// Keys at which the two series differ.
    pub fn mismatches(&self, o: &LamSeries) -> Vec<(u32, Monomial)> {
        let order = self.order.min(o.order);
        let degree = self.degree.min(o.degree);
        let mut keys: Vec<(u32, Monomial)> = self.coeffs.keys().chain(o.coeffs.keys()).cloned().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|(n, m)| *n <= order && m.degree() <= degree)
            .filter(|k| {
                let z = RatFrac::zero();
                let a = self.coeffs.get(k).unwrap_or(&z);
                let b = o.coeffs.get(k).unwrap_or(&z);
                !a.equals(b)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exppoly::Exp;

    fn geometric(order: u32) -> LamSeries {
        let mut s = LamSeries::new(order, 0);
        for n in 0..=order {
            s.set(n, Monomial::one(), RatFrac::one());
        }
        s
    }

    #[test]
    fn division_inverts_product() {
        let a = geometric(6);
        let mut b = LamSeries::one(6, 0);
        b.set(2, Monomial::one(), RatFrac::new(ExpPoly::one(), &ExpPoly::one_minus(Exp::eps(1, 0))).unwrap());
        let p = a.mul(&b);
        assert!(p.div(&b).unwrap().equals(&a));
    }

    #[test]
    fn graded_product_truncates_degree() {
        let mut a = LamSeries::one(2, 1);
        a.set(0, Monomial::var(InsVar::Tau(1)), RatFrac::one());
        let sq = a.mul(&a);
        assert!(sq.get(0, &Monomial::var(InsVar::Tau(1))).unwrap().equals(&RatFrac::constant(Q::int(2))));
        assert_eq!(sq.len(), 2);
    }

    #[test]
    fn monomial_text() {
        let m = Monomial::from_powers([(InsVar::Tau(1), 2), (InsVar::T(-1), 1)]);
        assert_eq!(m.to_string(), "tau1^2*t-1");
        assert_eq!(Monomial::parse(&m.to_string()).unwrap(), m);
        assert_eq!(m.factorial(), Q::int(2));
    }
}
