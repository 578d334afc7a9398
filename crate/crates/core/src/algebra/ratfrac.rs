//! Formal quotients of exponential polynomials.
//!
//! The denominator is held as a multiset of normalized factors. Sums use
//! the least common multiple of the factor multisets, and common factors are
//! removed only when [`RatFrac::cancel`] is called.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::coeff::Q;
use super::exppoly::{Exp, ExpPoly, MAX_VARS};
use super::factor::{factorize, Factor};
use crate::error::{Error, Result};

/// Product of normalized factors with positive multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Denominator {
    factors: Vec<(Factor, u32)>,
}

impl Denominator {
    pub fn one() -> Self {
        Denominator { factors: Vec::new() }
    }

    pub fn from_factors<I: IntoIterator<Item = (Factor, u32)>>(it: I) -> Self {
        let mut v: Vec<(Factor, u32)> = it.into_iter().filter(|(_, m)| *m > 0).collect();
        v.sort();
        let mut out: Vec<(Factor, u32)> = Vec::with_capacity(v.len());
        for (f, m) in v {
            match out.last_mut() {
                Some((g, k)) if *g == f => *k += m,
                _ => out.push((f, m)),
            }
        }
        Denominator { factors: out }
    }

    pub fn factors(&self) -> &[(Factor, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total number of factors counted with multiplicity.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    pub fn mul(&self, o: &Denominator) -> Denominator {
        self.combine(o, |a, b| a + b)
    }

    pub fn lcm(&self, o: &Denominator) -> Denominator {
        self.combine(o, |a, b| a.max(b))
    }

    fn combine(&self, o: &Denominator, op: impl Fn(u32, u32) -> u32) -> Denominator {
        let mut out = Vec::with_capacity(self.factors.len() + o.factors.len());
        let (a, b) = (&self.factors, &o.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push((a[i].0.clone(), op(a[i].1, 0)));
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0.clone(), op(0, b[j].1)));
                j += 1;
            } else {
                out.push((a[i].0.clone(), op(a[i].1, b[j].1)));
                i += 1;
                j += 1;
            }
        }
        Denominator { factors: out }
    }

    /// `self / sub` as an expanded polynomial; `sub` must divide `self`.
    pub fn cofactor(&self, sub: &Denominator) -> ExpPoly {
        let mut parts = Vec::new();
        let mut j = 0;
        for (f, m) in &self.factors {
            let mut k = *m;
            while j < sub.factors.len() && sub.factors[j].0 < *f {
                j += 1;
            }
            if j < sub.factors.len() && sub.factors[j].0 == *f {
                k -= sub.factors[j].1.min(k);
            }
            if k > 0 {
                parts.push(f.expand().pow(k));
            }
        }
        ExpPoly::product(parts.iter())
    }

    pub fn expand(&self) -> ExpPoly {
        let parts: Vec<ExpPoly> = self.factors.iter().map(|(f, m)| f.expand().pow(*m)).collect();
        ExpPoly::product(parts.iter())
    }
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (fac, m)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "({})^{}", fac.expand(), m)?;
        }
        Ok(())
    }
}

/// `num / den` with a factored denominator.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatFrac {
    num: ExpPoly,
    den: Denominator,
}

impl RatFrac {
    pub fn zero() -> Self {
        RatFrac::default()
    }

    pub fn one() -> Self {
        RatFrac::from_poly(ExpPoly::one())
    }

    pub fn constant(c: Q) -> Self {
        RatFrac::from_poly(ExpPoly::constant(c))
    }

    pub fn from_poly(num: ExpPoly) -> Self {
        RatFrac { num, den: Denominator::one() }
    }

    pub fn from_parts(num: ExpPoly, den: Denominator) -> Self {
        if num.is_zero() {
            return RatFrac::zero();
        }
        RatFrac { num, den }
    }

    /// `num / den` for an arbitrary nonzero polynomial `den`.
    pub fn new(num: ExpPoly, den: &ExpPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!("{num} / 0")));
        }
        let ((ue, uc), fs) = factorize(den);
        let num = num.mul_term(&ue.neg(), &uc.inv().expect("nonzero unit"));
        Ok(RatFrac::from_parts(num, Denominator::from_factors(fs)))
    }

    /// `1 / Π dens`.
    pub fn one_over(dens: &[ExpPoly]) -> Result<Self> {
        let mut unit_e = Exp::ZERO;
        let mut unit_c = Q::ONE;
        let mut all = Vec::new();
        for d in dens {
            if d.is_zero() {
                return Err(Error::DivisionByZero("zero factor in product".into()));
            }
            let ((ue, uc), fs) = factorize(d);
            unit_e = unit_e.add(&ue);
            unit_c = unit_c.mul(&uc);
            all.extend(fs);
        }
        Ok(RatFrac {
            num: ExpPoly::monomial(unit_e.neg(), unit_c.inv().expect("nonzero unit")),
            den: Denominator::from_factors(all),
        })
    }

    pub fn num(&self) -> &ExpPoly {
        &self.num
    }

    pub fn den(&self) -> &Denominator {
        &self.den
    }

    /// Expanded denominator.
    pub fn denominator(&self) -> ExpPoly {
        self.den.expand()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// Returns the polynomial if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&ExpPoly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn neg(&self) -> RatFrac {
        RatFrac { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, k: &Q) -> RatFrac {
        RatFrac::from_parts(self.num.scale(k), self.den.clone())
    }

    pub fn mul_poly(&self, p: &ExpPoly) -> RatFrac {
        RatFrac::from_parts(self.num.mul(p), self.den.clone())
    }

    pub fn mul_term(&self, e: &Exp, c: &Q) -> RatFrac {
        RatFrac::from_parts(self.num.mul_term(e, c), self.den.clone())
    }

    pub fn mul(&self, o: &RatFrac) -> RatFrac {
        if self.is_zero() || o.is_zero() {
            return RatFrac::zero();
        }
        RatFrac { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    pub fn pow(&self, n: u32) -> RatFrac {
        let mut acc = RatFrac::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn inv(&self) -> Result<RatFrac> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of zero".into()));
        }
        let ((ue, uc), fs) = factorize(&self.num);
        let num = self.den.expand().mul_term(&ue.neg(), &uc.inv().expect("nonzero unit"));
        Ok(RatFrac { num, den: Denominator::from_factors(fs) })
    }

    pub fn div(&self, o: &RatFrac) -> Result<RatFrac> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn add(&self, o: &RatFrac) -> RatFrac {
        RatFrac::sum([self, o])
    }

    pub fn sub(&self, o: &RatFrac) -> RatFrac {
        RatFrac::sum([self, &o.neg()])
    }

    /// Sum over the common multiple of all denominators.
    pub fn sum<'a, I: IntoIterator<Item = &'a RatFrac>>(it: I) -> RatFrac {
        let items: Vec<&RatFrac> = it.into_iter().filter(|x| !x.is_zero()).collect();
        match items.len() {
            0 => return RatFrac::zero(),
            1 => return items[0].clone(),
            _ => {}
        }
        let mut l = Denominator::one();
        for x in &items {
            l = l.lcm(&x.den);
        }
        let mut num = ExpPoly::zero();
        for x in &items {
            if x.den == l {
                num = num.add(&x.num);
            } else {
                num = num.add(&x.num.mul(&l.cofactor(&x.den)));
            }
        }
        RatFrac::from_parts(num, l)
    }

    /// Divides out every denominator factor that divides the numerator.
    pub fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den = Denominator::one();
            return;
        }
        let mut kept = Vec::with_capacity(self.den.factors.len());
        for (f, m) in std::mem::take(&mut self.den.factors) {
            let fp = f.expand();
            let mut left = m;
            while left > 0 {
                match self.num.div_exact(&fp) {
                    Some(q) => {
                        self.num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                kept.push((f, left));
            }
        }
        self.den = Denominator { factors: kept };
    }

    pub fn cancelled(mut self) -> RatFrac {
        self.cancel();
        self
    }

    /// Exact equality as rational functions.
    pub fn equals(&self, o: &RatFrac) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        let l = self.den.lcm(&o.den);
        self.num.mul(&l.cofactor(&self.den)) == o.num.mul(&l.cofactor(&o.den))
    }

    /// Applies `f` to numerator exponents and re-factors each denominator factor.
    pub fn try_map_exp<F>(&self, f: F) -> Result<RatFrac>
    where
        F: Fn(&Exp) -> Result<Exp>,
    {
        let mut num = self.num.try_map_exp(&f)?;
        let mut fs = Vec::new();
        for (fac, m) in &self.den.factors {
            let p = fac.expand().try_map_exp(&f)?;
            if p.is_zero() {
                return Err(Error::DivisionByZero(format!("factor {} vanishes after substitution", fac.expand())));
            }
            let ((ue, uc), sub) = factorize(&p);
            let inv = uc.inv().expect("nonzero unit").pow(*m);
            num = num.mul_term(&ue.neg().scale(*m as i32), &inv);
            fs.extend(sub.into_iter().map(|(g, k)| (g, k * m)));
        }
        Ok(RatFrac::from_parts(num, Denominator::from_factors(fs)))
    }

    /// Character dual `e^w ↦ e^{-w}`.
    pub fn dual(&self) -> RatFrac {
        self.try_map_exp(|e| Ok(e.neg())).expect("dual is total")
    }
}

impl fmt::Display for RatFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// How [`frac_equal`] decides equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub enum EqualityMode {
    /// Expand `a.num·(L/a.den) − b.num·(L/b.den)` over the common denominator `L`.
    #[default]
    CrossMul,
    /// Evaluate both sides on a tensor grid wider than every variable's degree.
    Grid { budget: u128 },
}


/// Shifts of the grid tried before giving up on a degenerate denominator.
pub const GRID_RETRIES: u32 = 8;

/// Decides `a = b` as rational functions of the exponentials.
pub fn frac_equal(a: &RatFrac, b: &RatFrac, mode: EqualityMode) -> Result<bool> {
    match mode {
        EqualityMode::CrossMul => Ok(a.equals(b)),
        EqualityMode::Grid { budget } => grid_equal(a, b, budget),
    }
}

/// `a − b` written over the least common denominator, never reduced.
///
/// The numerator is zero exactly when the two sides agree.
pub fn cross_witness(a: &RatFrac, b: &RatFrac) -> RatFrac {
    let l = a.den.lcm(&b.den);
    let num = a.num.mul(&l.cofactor(&a.den)).sub(&b.num.mul(&l.cofactor(&b.den)));
    RatFrac::from_parts(num, l)
}

/// Exponent range of one variable.
#[derive(Clone, Copy)]
struct Span {
    lo: i64,
    hi: i64,
}

fn poly_span(p: &ExpPoly, k: usize) -> Span {
    let lo = p.terms().iter().map(|(e, _)| e.0[k] as i64).min().unwrap_or(0);
    let hi = p.terms().iter().map(|(e, _)| e.0[k] as i64).max().unwrap_or(0);
    Span { lo, hi }
}

fn product_span(num: &ExpPoly, cof: &[(ExpPoly, u32)], k: usize) -> Span {
    let mut s = poly_span(num, k);
    for (f, m) in cof {
        let t = poly_span(f, k);
        s.lo += t.lo * *m as i64;
        s.hi += t.hi * *m as i64;
    }
    s
}

fn eval_scaled(p: &ExpPoly, pt: &[BigRational; MAX_VARS], g: &[i32; MAX_VARS]) -> BigRational {
    let mut acc = BigRational::zero();
    for (e, c) in p.terms() {
        let mut v = c.to_big();
        for k in 0..MAX_VARS {
            if e.0[k] != 0 {
                v *= pt[k].pow(e.0[k] / g[k]);
            }
        }
        acc += v;
    }
    acc
}

fn grid_equal(a: &RatFrac, b: &RatFrac, budget: u128) -> Result<bool> {
    let l = a.den.lcm(&b.den);
    let parts = |x: &RatFrac| -> Vec<(ExpPoly, u32)> {
        l.factors
            .iter()
            .filter_map(|(f, m)| {
                let own = x.den.factors.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k);
                (*m > own).then(|| (f.expand(), m - own))
            })
            .collect()
    };
    let (ca, cb) = (parts(a), parts(b));
    let factors: Vec<(ExpPoly, u32)> = l.factors.iter().map(|(f, m)| (f.expand(), *m)).collect();

    let mut g = [0i32; MAX_VARS];
    let polys = [&a.num, &b.num].into_iter().chain(factors.iter().map(|(f, _)| f));
    for p in polys {
        for (e, _) in p.terms() {
            for k in 0..MAX_VARS {
                g[k] = num_integer::gcd(g[k], e.0[k]);
            }
        }
    }
    let mut sizes = [1u64; MAX_VARS];
    let mut points: u128 = 1;
    for k in 0..MAX_VARS {
        if g[k] == 0 {
            g[k] = 1;
            continue;
        }
        let (sa, sb) = (product_span(&a.num, &ca, k), product_span(&b.num, &cb, k));
        let span = (sa.hi.max(sb.hi) - sa.lo.min(sb.lo)) / g[k] as i64;
        sizes[k] = span as u64 + 1;
        points = points.saturating_mul(sizes[k] as u128);
    }
    if points > budget {
        return Err(Error::GridBudgetExceeded { points, budget });
    }

    'attempt: for attempt in 0..GRID_RETRIES {
        let axes: Vec<Vec<BigRational>> = (0..MAX_VARS)
            .map(|k| {
                let base = 2 + k as i64 * 1009 + attempt as i64 * 97;
                (0..sizes[k] as i64).map(|i| BigRational::from_integer(BigInt::from(base + i))).collect()
            })
            .collect();
        let mut idx = [0usize; MAX_VARS];
        loop {
            let pt: [BigRational; MAX_VARS] = std::array::from_fn(|k| axes[k][idx[k]].clone());
            if factors.iter().any(|(f, _)| eval_scaled(f, &pt, &g).is_zero()) {
                continue 'attempt;
            }
            let side = |x: &RatFrac, c: &[(ExpPoly, u32)]| {
                let mut v = eval_scaled(&x.num, &pt, &g);
                for (f, m) in c {
                    v *= eval_scaled(f, &pt, &g).pow(*m as i32);
                }
                v
            };
            if side(a, &ca) != side(b, &cb) {
                return Ok(false);
            }
            let mut k = 0;
            loop {
                if k == MAX_VARS {
                    return Ok(true);
                }
                idx[k] += 1;
                if idx[k] < sizes[k] as usize {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
    Err(Error::GridExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exppoly::a_var;
    use proptest::prelude::*;

    fn binom(x: i32, y: i32) -> ExpPoly {
        ExpPoly::one_minus(Exp::eps(x, y))
    }

    #[test]
    fn telescoping_sum_cancels() {
        // 1/(1-q) - q/(1-q) = 1
        let a = RatFrac::new(ExpPoly::one(), &binom(1, 0)).unwrap();
        let b = RatFrac::new(ExpPoly::exp(Exp::eps(1, 0)), &binom(1, 0)).unwrap();
        let s = a.sub(&b).cancelled();
        assert!(s.is_one());
    }

    #[test]
    fn inverse_round_trip() {
        let x = RatFrac::new(binom(0, 2), &binom(1, -1).mul(&binom(1, 0))).unwrap();
        let y = x.mul(&x.inv().unwrap()).cancelled();
        assert!(y.is_one());
    }

    #[test]
    fn sign_of_flipped_binomial() {
        // 1/(1 - e^{-w}) = -e^{w}/(1 - e^{w})
        let a = RatFrac::new(ExpPoly::one(), &binom(-1, 0)).unwrap();
        let b = RatFrac::new(ExpPoly::monomial(Exp::eps(1, 0), Q::int(-1)), &binom(1, 0)).unwrap();
        assert!(a.equals(&b));
        assert_eq!(a, b);
    }

    const GRID: EqualityMode = EqualityMode::Grid { budget: 1 << 20 };

    #[test]
    fn both_modes_on_small_examples() {
        let lhs = RatFrac::new(binom(2, 0), &ExpPoly::one().add(&ExpPoly::exp(Exp::eps(1, 0)))).unwrap();
        let rhs = RatFrac::from_poly(binom(1, 0));
        let p = RatFrac::new(ExpPoly::one(), &binom(-1, 0)).unwrap();
        let q = RatFrac::new(ExpPoly::one(), &binom(0, -1)).unwrap();
        for mode in [EqualityMode::CrossMul, GRID] {
            assert!(frac_equal(&lhs, &rhs, mode).unwrap());
            assert!(!frac_equal(&p, &q, mode).unwrap());
        }
        assert!(!cross_witness(&p, &q).is_zero());
        assert!(cross_witness(&lhs, &rhs).is_zero());
    }

    #[test]
    fn grid_budget_is_enforced() {
        let p = RatFrac::new(ExpPoly::one(), &binom(40, 40)).unwrap();
        let q = RatFrac::new(ExpPoly::one(), &binom(-40, 37)).unwrap();
        let r = frac_equal(&p, &q, EqualityMode::Grid { budget: 100 });
        assert!(matches!(r, Err(Error::GridBudgetExceeded { .. })));
    }

    fn arb_frac() -> impl Strategy<Value = RatFrac> {
        (
            prop::collection::vec(((-2i32..3, -2i32..3, -1i32..2), -3i64..4), 1..4),
            prop::collection::vec((-2i32..3, -2i32..3, -1i32..2), 0..3),
        )
            .prop_map(|(num, den)| {
                let num = ExpPoly::from_terms(num.into_iter().map(|((x, y, z), c)| {
                    let mut e = Exp::eps(x, y);
                    e.0[a_var(0)] = 4 * z;
                    (e, Q::int(c))
                }));
                let dens: Vec<ExpPoly> = den
                    .into_iter()
                    .filter_map(|(x, y, z)| {
                        let mut e = Exp::eps(x, y);
                        e.0[a_var(0)] = 4 * z;
                        (!e.is_zero()).then(|| ExpPoly::one_minus(e))
                    })
                    .collect();
                RatFrac::one_over(&dens).unwrap().mul_poly(&num)
            })
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_frac(), b in arb_frac(), c in arb_frac()) {
            prop_assert!(a.add(&b).equals(&b.add(&a)));
            prop_assert!(a.mul(&b.add(&c)).equals(&a.mul(&b).add(&a.mul(&c))));
            prop_assert!(a.add(&b).sub(&b).equals(&a));
            let mut d = a.add(&b);
            let before = d.clone();
            d.cancel();
            prop_assert!(d.equals(&before));
        }

        #[test]
        fn grid_agrees_with_cross_multiplication(a in arb_frac(), b in arb_frac(), c in arb_frac()) {
            let pairs = [(a.clone(), b.clone()), (a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c))), (a.add(&b).sub(&b), a)];
            for (x, y) in &pairs {
                prop_assert_eq!(frac_equal(x, y, GRID).unwrap(), frac_equal(x, y, EqualityMode::CrossMul).unwrap());
            }
        }

        #[test]
        fn cancel_reaches_reduced_form(a in arb_frac(), b in arb_frac()) {
            prop_assume!(!b.is_zero());
            let q = a.mul(&b).div(&b).unwrap().cancelled();
            let a2 = a.clone().cancelled();
            prop_assert!(q.equals(&a));
            prop_assert_eq!(q.den(), a2.den());
        }
    }
}
