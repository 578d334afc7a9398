//! Laurent polynomials in `e^{ε1}, e^{ε2}, e^{a_1}, …` with quarter-rational exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::coeff::Q;
use crate::error::Error;

/// Maximum number of basis symbols: `ε1`, `ε2` and up to six Coulomb parameters.
pub const MAX_VARS: usize = 8;
pub const EPS1: usize = 0;
pub const EPS2: usize = 1;
/// Largest supported gauge rank.
pub const MAX_RANK: usize = MAX_VARS - 2;

/// Exponent-vector index of the Coulomb parameter `a_α` (0-based `α`).
pub const fn a_var(alpha: usize) -> usize {
    2 + alpha
}

/// Exponent vector in quarter units.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exp(pub [i32; MAX_VARS]);

impl Exp {
    pub const ZERO: Exp = Exp([0; MAX_VARS]);

    /// Exponent of `e^{s}` for basis symbol `s`.
    pub fn unit(var: usize) -> Exp {
        Exp::quarters(var, 4)
    }

    pub fn quarters(var: usize, n: i32) -> Exp {
        let mut e = [0; MAX_VARS];
        e[var] = n;
        Exp(e)
    }

    /// `x1 ε1 + x2 ε2` with integer coefficients.
    pub fn eps(x1: i32, x2: i32) -> Exp {
        let mut e = [0; MAX_VARS];
        e[EPS1] = 4 * x1;
        e[EPS2] = 4 * x2;
        Exp(e)
    }

    /// Builds an exponent from rational coordinates, failing off the quarter lattice.
    pub fn from_rationals(coords: &[(usize, Q)]) -> Result<Exp, Error> {
        let mut e = [0i32; MAX_VARS];
        for (var, q) in coords {
            let v = q.mul(&Q::int(4));
            let v = v
                .as_i64()
                .and_then(|x| i32::try_from(x).ok())
                .ok_or_else(|| Error::LatticeOverflow(format!("{q} is not a quarter-integer")))?;
            e[*var] = e[*var]
                .checked_add(v)
                .ok_or_else(|| Error::LatticeOverflow("exponent overflow".into()))?;
        }
        Ok(Exp(e))
    }

    pub fn add(&self, o: &Exp) -> Exp {
        let mut e = self.0;
        for (x, y) in e.iter_mut().zip(o.0.iter()) {
            *x += *y;
        }
        Exp(e)
    }

    pub fn sub(&self, o: &Exp) -> Exp {
        let mut e = self.0;
        for (x, y) in e.iter_mut().zip(o.0.iter()) {
            *x -= *y;
        }
        Exp(e)
    }

    pub fn neg(&self) -> Exp {
        let mut e = self.0;
        for x in e.iter_mut() {
            *x = -*x;
        }
        Exp(e)
    }

    pub fn scale(&self, k: i32) -> Exp {
        let mut e = self.0;
        for x in e.iter_mut() {
            *x *= k;
        }
        Exp(e)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// True when the ε-coordinates vanish.
    pub fn is_eps_free(&self) -> bool {
        self.0[EPS1] == 0 && self.0[EPS2] == 0
    }

    /// True when every Coulomb coordinate vanishes.
    pub fn is_a_free(&self) -> bool {
        self.0[2..].iter().all(|&x| x == 0)
    }

    /// Coordinate of `var` as a rational number.
    pub fn coord(&self, var: usize) -> Q {
        Q::frac(self.0[var] as i64, 4)
    }

    /// Positive when the first nonzero coordinate is positive.
    pub fn lex_sign(&self) -> i32 {
        for &x in &self.0 {
            if x != 0 {
                return x.signum();
            }
        }
        0
    }
}

impl fmt::Debug for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Display name of basis symbol `var`.
pub fn var_name(var: usize) -> String {
    match var {
        EPS1 => "ε1".to_string(),
        EPS2 => "ε2".to_string(),
        v => format!("a{}", v - 1),
    }
}

fn var_index(name: &str) -> Option<usize> {
    match name {
        "ε1" | "eps1" => Some(EPS1),
        "ε2" | "eps2" => Some(EPS2),
        _ => {
            let n: usize = name.strip_prefix('a')?.parse().ok()?;
            (1..=MAX_RANK).contains(&n).then_some(n + 1)
        }
    }
}

/// A finite sum of `coeff · e^{exp}` kept sorted by exponent with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExpPoly {
    terms: Vec<(Exp, Q)>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        ExpPoly::constant(Q::ONE)
    }

    pub fn constant(c: Q) -> Self {
        ExpPoly::monomial(Exp::ZERO, c)
    }

    pub fn monomial(e: Exp, c: Q) -> Self {
        if c.is_zero() {
            ExpPoly::zero()
        } else {
            ExpPoly { terms: vec![(e, c)] }
        }
    }

    /// `e^{e}` with unit coefficient.
    pub fn exp(e: Exp) -> Self {
        ExpPoly::monomial(e, Q::ONE)
    }

    /// `1 - e^{w}`.
    pub fn one_minus(w: Exp) -> Self {
        ExpPoly::one().sub(&ExpPoly::exp(w))
    }

    /// Collects arbitrary terms, summing duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Exp, Q)>>(it: I) -> Self {
        let mut map: FxHashMap<Exp, Q> = FxHashMap::default();
        for (e, c) in it {
            accumulate(&mut map, e, c);
        }
        ExpPoly::from_map(map)
    }

    fn from_map(map: FxHashMap<Exp, Q>) -> Self {
        let mut terms: Vec<(Exp, Q)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|a| a.0);
        ExpPoly { terms }
    }

    /// Builds from terms already sorted with unique exponents.
    fn from_sorted(terms: Vec<(Exp, Q)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        ExpPoly {
            terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(Exp, Q)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    /// Returns the single term if this is a monomial.
    pub fn as_monomial(&self) -> Option<(Exp, &Q)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((*e, c)),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::ZERO),
            [(e, c)] if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn coeff(&self, e: &Exp) -> Q {
        match self.terms.binary_search_by(|t| t.0.cmp(e)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Q::ZERO,
        }
    }

    /// Lexicographically largest term.
    pub fn leading(&self) -> Option<&(Exp, Q)> {
        self.terms.last()
    }

    /// Lexicographically smallest term.
    pub fn trailing(&self) -> Option<&(Exp, Q)> {
        self.terms.first()
    }

    pub fn add(&self, o: &ExpPoly) -> ExpPoly {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &ExpPoly) -> ExpPoly {
        self.merge(o, true)
    }

    fn merge(&self, o: &ExpPoly, negate: bool) -> ExpPoly {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &o.terms;
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i].clone());
                i += 1;
            } else if take_b {
                let c = if negate { b[j].1.neg() } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let c = if negate { a[i].1.sub(&b[j].1) } else { a[i].1.add(&b[j].1) };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        ExpPoly { terms: out }
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> ExpPoly {
        if k.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.mul(k))).collect(),
        }
    }

    /// Multiplies by `c · e^{shift}`.
    pub fn mul_term(&self, shift: &Exp, c: &Q) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: self.terms.iter().map(|(e, x)| (e.add(shift), x.mul(c))).collect(),
        }
    }

    pub fn shift(&self, by: &Exp) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|(e, c)| (e.add(by), c.clone())).collect(),
        }
    }

    pub fn mul(&self, o: &ExpPoly) -> ExpPoly {
        if self.is_zero() || o.is_zero() {
            return ExpPoly::zero();
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return o.mul_term(e, c);
        }
        if o.terms.len() == 1 {
            let (e, c) = &o.terms[0];
            return self.mul_term(e, c);
        }
        let mut map: FxHashMap<Exp, Q> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * o.terms.len() / 2, Default::default());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                accumulate(&mut map, ea.add(eb), ca.mul(cb));
            }
        }
        ExpPoly::from_map(map)
    }

    pub fn pow(&self, n: u32) -> ExpPoly {
        let mut acc = ExpPoly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Product of many polynomials, multiplied smallest first.
    pub fn product<'a, I: IntoIterator<Item = &'a ExpPoly>>(it: I) -> ExpPoly {
        let mut items: Vec<&ExpPoly> = it.into_iter().collect();
        items.sort_by_key(|p| p.len());
        let mut acc = ExpPoly::one();
        for p in items {
            acc = acc.mul(p);
        }
        acc
    }

    /// Character dual: `e^{w} ↦ e^{-w}`.
    pub fn dual(&self) -> ExpPoly {
        self.map_exp(|e| e.neg())
    }

    /// Applies `f` to every exponent, combining collisions.
    pub fn map_exp<F: Fn(&Exp) -> Exp>(&self, f: F) -> ExpPoly {
        ExpPoly::from_terms(self.terms.iter().map(|(e, c)| (f(e), c.clone())))
    }

    /// Fallible version of [`ExpPoly::map_exp`].
    pub fn try_map_exp<F, E>(&self, f: F) -> Result<ExpPoly, E>
    where
        F: Fn(&Exp) -> Result<Exp, E>,
    {
        let mut map: FxHashMap<Exp, Q> = FxHashMap::default();
        for (e, c) in &self.terms {
            accumulate(&mut map, f(e)?, c.clone());
        }
        Ok(ExpPoly::from_map(map))
    }

    /// Adams operation `ψ^p`: `e^{w} ↦ e^{p w}`.
    pub fn adams(&self, p: i32) -> ExpPoly {
        self.map_exp(|e| e.scale(p))
    }

    /// Sum of coefficients, i.e. the rank of a virtual character.
    pub fn rank(&self) -> Q {
        let mut acc = Q::ZERO;
        for (_, c) in &self.terms {
            acc.add_assign(c);
        }
        acc
    }

    /// Per-coordinate minimum and maximum of the exponents.
    pub fn bounds(&self) -> Option<([i32; MAX_VARS], [i32; MAX_VARS])> {
        let first = self.terms.first()?;
        let mut lo = first.0 .0;
        let mut hi = first.0 .0;
        for (e, _) in &self.terms {
            for k in 0..MAX_VARS {
                lo[k] = lo[k].min(e.0[k]);
                hi[k] = hi[k].max(e.0[k]);
            }
        }
        Some((lo, hi))
    }

    /// Restricts to the terms satisfying `pred`.
    pub fn filter<F: Fn(&Exp) -> bool>(&self, pred: F) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().filter(|(e, _)| pred(e)).cloned().collect(),
        }
    }

    /// Exact division, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &ExpPoly) -> Option<ExpPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ExpPoly::zero());
        }
        if let Some((e, c)) = d.as_monomial() {
            let inv = c.inv()?;
            return Some(self.mul_term(&e.neg(), &inv));
        }
        let (nlo, nhi) = self.bounds()?;
        let (dlo, dhi) = d.bounds()?;
        let mut qlo = [0i32; MAX_VARS];
        let mut qhi = [0i32; MAX_VARS];
        for k in 0..MAX_VARS {
            qlo[k] = nlo[k] - dlo[k];
            qhi[k] = nhi[k] - dhi[k];
            if qlo[k] > qhi[k] {
                return None;
            }
        }
        let (dlead, dcoef) = d.leading()?.clone();
        let dinv = dcoef.inv()?;
        let mut rem: BTreeMap<Exp, Q> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(Exp, Q)> = Vec::new();
        while let Some((&e, c)) = rem.iter().next_back() {
            let qe = e.sub(&dlead);
            if (0..MAX_VARS).any(|k| qe.0[k] < qlo[k] || qe.0[k] > qhi[k]) {
                return None;
            }
            let qc = c.mul(&dinv);
            for (de, dc) in &d.terms {
                let key = de.add(&qe);
                let delta = dc.mul(&qc);
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v = v.sub(&delta);
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, delta.neg());
                    }
                }
            }
            quot.push((qe, qc));
        }
        quot.reverse();
        Some(ExpPoly::from_sorted(quot))
    }

    /// Evaluates at `y_k = e^{s_k/4}` for the given exact values `y_k`.
    pub fn eval(&self, point: &[BigRational; MAX_VARS]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut v = c.to_big();
            for k in 0..MAX_VARS {
                let p = e.0[k];
                if p != 0 {
                    v *= pow_signed(&point[k], p);
                }
            }
            acc += v;
        }
        acc
    }

    /// Renders the canonical text form.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the canonical text form.
    pub fn parse(s: &str) -> Result<ExpPoly, Error> {
        let bad = |m: &str| Error::Parse(format!("{m}: `{s}`"));
        let s = s.trim();
        if s == "0" {
            return Ok(ExpPoly::zero());
        }
        let mut terms = Vec::new();
        for raw in s.split(" + ") {
            let (coef, rest) = match raw.split_once(" * ") {
                Some((c, r)) => (c, r),
                None => (raw, ""),
            };
            let c: Q = coef.parse().map_err(|_| bad("bad coefficient"))?;
            let mut e = [0i32; MAX_VARS];
            for fac in rest.split_whitespace() {
                let inner = fac.strip_prefix("e[").ok_or_else(|| bad("bad factor"))?;
                let (name, pow) = inner.split_once("]^(").ok_or_else(|| bad("bad factor"))?;
                let pow = pow.strip_suffix(')').ok_or_else(|| bad("bad exponent"))?;
                let var = var_index(name).ok_or_else(|| bad("unknown symbol"))?;
                let q: Q = pow.parse().map_err(|_| bad("bad exponent"))?;
                let ex = Exp::from_rationals(&[(var, q)])?;
                e[var] += ex.0[var];
            }
            terms.push((Exp(e), c));
        }
        Ok(ExpPoly::from_terms(terms))
    }
}

fn accumulate(map: &mut FxHashMap<Exp, Q>, e: Exp, c: Q) {
    match map.entry(e) {
        std::collections::hash_map::Entry::Occupied(mut o) => {
            let v = o.get().add(&c);
            *o.get_mut() = v;
        }
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

fn pow_signed(base: &BigRational, p: i32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..p.unsigned_abs() {
        acc *= base;
    }
    if p < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Writes `n/4` as a reduced fraction.
fn quarter_text(n: i32) -> String {
    let g = num_integer::gcd(n.unsigned_abs(), 4) as i32;
    let (p, q) = (n / g, 4 / g);
    if q == 1 {
        format!("{p}")
    } else {
        format!("{p}/{q}")
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            let mut first = true;
            for k in 0..MAX_VARS {
                if e.0[k] != 0 {
                    write!(f, "{}e[{}]^({})", if first { " * " } else { " " }, var_name(k), quarter_text(e.0[k]))?;
                    first = false;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
