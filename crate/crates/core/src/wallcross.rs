//! Residue kernels of the wall-crossing formulas over truncated cohomology rings.
//!
//! Rings are `Q[h]/(h^r)` with optional nilpotent symbols adjoined. Kernels are
//! finite Laurent polynomials in the `ħ_i` because every Chern class is
//! nilpotent, so all residues here are exact.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{Laurent, Ring, Q};
use crate::error::{Error, Result};

/// A nilpotent generator: `name^order = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub degree: u32,
    pub order: u32,
}

/// `Q[h]/(h^r)` with adjoined nilpotent symbols and an optional degree cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncRing {
    rank: u32,
    gens: Vec<Symbol>,
    max_degree: Option<u32>,
}

impl TruncRing {
    /// Cohomology of `P^{r-1}`.
    pub fn projective(r: u32) -> Result<Arc<Self>> {
        TruncRing::with_symbols(r, Vec::new(), None)
    }

    pub fn with_symbols(r: u32, symbols: Vec<Symbol>, max_degree: Option<u32>) -> Result<Arc<Self>> {
        if r == 0 {
            return Err(Error::InvalidInput("rank must be positive".into()));
        }
        let mut gens = vec![Symbol { name: "h".into(), degree: 1, order: r }];
        for s in symbols {
            if s.degree == 0 || s.order == 0 {
                return Err(Error::InvalidInput(format!("symbol {} needs positive degree and order", s.name)));
            }
            if gens.iter().any(|g| g.name == s.name) {
                return Err(Error::InvalidInput(format!("duplicate symbol {}", s.name)));
            }
            gens.push(s);
        }
        Ok(Arc::new(TruncRing { rank: r, gens, max_degree }))
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn gen(self: &Arc<Self>, i: usize) -> RingElem {
        let mut key = vec![0; i + 1];
        key[i] = 1;
        RingElem::from_terms(Some(self.clone()), [(key, Q::ONE)])
    }

    pub fn h(self: &Arc<Self>) -> RingElem {
        self.gen(0)
    }

    pub fn symbol(self: &Arc<Self>, name: &str) -> Result<RingElem> {
        let i = self
            .gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown symbol {name}")))?;
        Ok(self.gen(i))
    }

    pub fn constant(self: &Arc<Self>, q: Q) -> RingElem {
        RingElem::from_terms(Some(self.clone()), [(Vec::new(), q)])
    }

    fn degree_of(&self, key: &[u32]) -> u32 {
        key.iter().zip(&self.gens).map(|(e, g)| e * g.degree).sum()
    }

    fn keeps(&self, key: &[u32]) -> bool {
        key.iter().zip(&self.gens).all(|(e, g)| *e < g.order)
            && self.max_degree.is_none_or(|d| self.degree_of(key) <= d)
    }

    fn nilpotency_bound(&self) -> u32 {
        let by_orders: u32 = self.gens.iter().map(|g| g.order - 1).sum::<u32>() + 1;
        match self.max_degree {
            Some(d) => by_orders.min(d + 1),
            None => by_orders,
        }
    }
}

/// Element of a [`TruncRing`]; constants carry no ring.
#[derive(Clone, Debug)]
pub struct RingElem {
    ring: Option<Arc<TruncRing>>,
    terms: BTreeMap<Vec<u32>, Q>,
}

fn trim(mut key: Vec<u32>) -> Vec<u32> {
    while key.last() == Some(&0) {
        key.pop();
    }
    key
}

fn join(a: &Option<Arc<TruncRing>>, b: &Option<Arc<TruncRing>>) -> Option<Arc<TruncRing>> {
    match (a, b) {
        (Some(x), Some(y)) => {
            assert!(Arc::ptr_eq(x, y) || x == y, "elements of different truncated rings");
            Some(x.clone())
        }
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

impl RingElem {
    fn from_terms<I: IntoIterator<Item = (Vec<u32>, Q)>>(ring: Option<Arc<TruncRing>>, it: I) -> Self {
        let mut terms: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (k, c) in it {
            let k = trim(k);
            if let Some(r) = &ring {
                if !r.keeps(&k) {
                    continue;
                }
            } else if !k.is_empty() {
                continue;
            }
            terms.entry(k).or_insert(Q::ZERO).add_assign(&c);
        }
        terms.retain(|_, c| !c.is_zero());
        RingElem { ring, terms }
    }

    pub fn constant(&self) -> Q {
        self.terms.get(&Vec::new()).cloned().unwrap_or(Q::ZERO)
    }

    /// Coefficient of `h^k`, as an element in the remaining symbols.
    pub fn h_coefficient(&self, k: u32) -> RingElem {
        let it = self.terms.iter().filter(|(key, _)| key.first().copied().unwrap_or(0) == k).map(|(key, c)| {
            let mut key = key.clone();
            if !key.is_empty() {
                key[0] = 0;
            }
            (key, c.clone())
        });
        RingElem::from_terms(self.ring.clone(), it)
    }

    /// `true` when no adjoined symbol and no power of `h` appears.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_empty())
    }

    pub fn pow(&self, n: u32) -> RingElem {
        let mut acc = RingElem::one();
        for _ in 0..n {
            acc = Ring::mul(&acc, self);
        }
        acc
    }

    pub fn scale(&self, q: &Q) -> RingElem {
        RingElem::from_terms(self.ring.clone(), self.terms.iter().map(|(k, c)| (k.clone(), c.mul(q))))
    }

    /// `exp(x)` for nilpotent `x`.
    pub fn exp(&self) -> Result<RingElem> {
        if !self.constant().is_zero() {
            return Err(Error::InvalidInput("exponential of a non-nilpotent element".into()));
        }
        let mut acc = RingElem::one();
        let mut term = RingElem::one();
        for k in 1.. {
            term = Ring::mul(&term, self).scale(&Q::frac(1, k));
            if term.is_zero() {
                break;
            }
            acc = Ring::add(&acc, &term);
        }
        Ok(acc)
    }

    /// Part of total degree `d`.
    pub fn homogeneous(&self, d: u32) -> RingElem {
        let Some(r) = &self.ring else {
            return if d == 0 { self.clone() } else { RingElem::zero() };
        };
        let it = self.terms.iter().filter(|(k, _)| r.degree_of(k) == d).map(|(k, c)| (k.clone(), c.clone()));
        RingElem::from_terms(self.ring.clone(), it)
    }

    fn top_degree(&self) -> u32 {
        match &self.ring {
            Some(r) => self.terms.keys().map(|k| r.degree_of(k)).max().unwrap_or(0),
            None => 0,
        }
    }
}

impl PartialEq for RingElem {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl Ring for RingElem {
    fn zero() -> Self {
        RingElem { ring: None, terms: BTreeMap::new() }
    }
    fn one() -> Self {
        RingElem::from_q(&Q::ONE)
    }
    fn from_q(q: &Q) -> Self {
        RingElem::from_terms(None, [(Vec::new(), q.clone())])
    }
    fn add(&self, o: &Self) -> Self {
        let it = self.terms.iter().chain(&o.terms).map(|(k, c)| (k.clone(), c.clone()));
        RingElem::from_terms(join(&self.ring, &o.ring), it)
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let n = a.len().max(b.len());
                let key = (0..n).map(|i| a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)).collect();
                out.push((key, x.mul(y)));
            }
        }
        RingElem::from_terms(join(&self.ring, &o.ring), out)
    }
    fn neg(&self) -> Self {
        self.scale(&Q::int(-1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_inv(&self) -> Option<Self> {
        let c = self.constant().inv()?;
        let n = Ring::sub(&self.scale(&c), &RingElem::one());
        let minus_n = n.neg();
        let mut acc = RingElem::one();
        let mut power = RingElem::one();
        loop {
            power = Ring::mul(&power, &minus_n);
            if power.is_zero() {
                break;
            }
            acc = Ring::add(&acc, &power);
        }
        Some(acc.scale(&c))
    }
    fn is_nilpotent(&self) -> bool {
        self.constant().is_zero()
    }
    fn nilpotency_bound(&self) -> u32 {
        self.ring.as_ref().map_or(1, |r| r.nilpotency_bound())
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = k
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(j, e)| {
                    let name = self.ring.as_ref().map_or("?", |r| r.gens[j].name.as_str());
                    if *e == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            match (vars.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Virtual rank and Chern classes `c_1, c_2, …` of a class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassData {
    pub rank: i32,
    pub chern: Vec<RingElem>,
}

impl ClassData {
    pub fn trivial(rank: i32) -> Self {
        ClassData { rank, chern: Vec::new() }
    }

    /// Line bundle with first Chern class `c1`.
    pub fn line(c1: RingElem) -> Self {
        ClassData { rank: 1, chern: vec![c1] }
    }

    /// `c_i`, with `c_0 = 1`.
    pub fn c(&self, i: usize) -> RingElem {
        match i {
            0 => RingElem::one(),
            _ => self.chern.get(i - 1).cloned().unwrap_or_else(RingElem::zero),
        }
    }

    pub fn total(&self) -> RingElem {
        (0..=self.chern.len()).fold(RingElem::zero(), |acc, i| Ring::add(&acc, &self.c(i)))
    }

    fn from_total(rank: i32, total: &RingElem) -> Self {
        let top = total.top_degree() as usize;
        let mut chern: Vec<RingElem> = (1..=top).map(|d| total.homogeneous(d as u32)).collect();
        while chern.last().is_some_and(|c| c.is_zero()) {
            chern.pop();
        }
        ClassData { rank, chern }
    }

    pub fn direct_sum(&self, o: &ClassData) -> Self {
        ClassData::from_total(self.rank + o.rank, &Ring::mul(&self.total(), &o.total()))
    }

    /// `self - o` in K-theory.
    pub fn difference(&self, o: &ClassData) -> Result<Self> {
        let inv = o.total().try_inv().ok_or_else(|| Error::NotInvertible("total Chern class".into()))?;
        Ok(ClassData::from_total(self.rank - o.rank, &Ring::mul(&self.total(), &inv)))
    }
}

/// `e(α ⊗ I_n) = Σ_i c_i(α) (nħ)^{r(α) - i}`.
pub fn euler_twist(alpha: &ClassData, n: &Q) -> Result<Laurent<RingElem>> {
    let rho = alpha.rank;
    let mut terms = Vec::new();
    for i in 0..=alpha.chern.len() {
        let c = alpha.c(i);
        if c.is_zero() {
            continue;
        }
        let e = rho - i as i32;
        let w = if e >= 0 {
            n.pow(e as u32)
        } else {
            n.inv().ok_or_else(|| Error::NotInvertible("zero weight with a negative power of ħ".into()))?.pow((-e) as u32)
        };
        terms.push((e, c.scale(&w)));
    }
    Ok(Laurent::from_terms(terms))
}

/// Laurent polynomial in `ħ_1, …, ħ_j` over a truncated ring.
#[derive(Clone, Debug, PartialEq)]
pub struct HbarPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, RingElem>,
}

impl HbarPoly {
    pub fn zero(nvars: usize) -> Self {
        HbarPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: RingElem) -> Self {
        let mut p = HbarPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `ħ_i` (zero-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut key = vec![0; nvars];
        key[i] = 1;
        let mut p = HbarPoly::zero(nvars);
        p.add_term(key, RingElem::one());
        p
    }

    /// Embeds an exact one-variable series as a series in `ħ_i`.
    pub fn from_laurent(nvars: usize, i: usize, s: &Laurent<RingElem>) -> Result<Self> {
        if s.prec().is_some() {
            return Err(Error::Precision("kernel factor is not a finite Laurent polynomial".into()));
        }
        let mut p = HbarPoly::zero(nvars);
        for (k, c) in s.terms() {
            let mut key = vec![0; nvars];
            key[i] = k;
            p.add_term(key, c.clone());
        }
        Ok(p)
    }

    fn add_term(&mut self, key: Vec<i32>, c: RingElem) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&key) {
            Some(old) => Ring::add(&old, &c),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (k, c) in &o.terms {
            s.add_term(k.clone(), c.clone());
        }
        s
    }

    pub fn neg(&self) -> Self {
        HbarPoly { nvars: self.nvars, terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &RingElem) -> Self {
        let mut s = HbarPoly::zero(self.nvars);
        for (k, x) in &self.terms {
            s.add_term(k.clone(), Ring::mul(x, c));
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = HbarPoly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let key = a.iter().zip(b).map(|(i, j)| i + j).collect();
                s.add_term(key, Ring::mul(x, y));
            }
        }
        s
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = HbarPoly::constant(self.nvars, RingElem::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exchanges `ħ_i` and `ħ_k`.
    pub fn swap(&self, i: usize, k: usize) -> Self {
        let mut s = HbarPoly::zero(self.nvars);
        for (key, c) in &self.terms {
            let mut key = key.clone();
            key.swap(i, k);
            s.add_term(key, c.clone());
        }
        s
    }

    pub fn coeff(&self, key: &[i32]) -> RingElem {
        self.terms.get(key).cloned().unwrap_or_else(RingElem::zero)
    }

    /// `Res_{ħ_j} … Res_{ħ_1}`: the coefficient of `Π ħ_i^{-1}`.
    pub fn iterated_residue(&self) -> RingElem {
        self.coeff(&vec![-1; self.nvars])
    }
}

fn euler_inverse(alpha: &ClassData, n: i64, nvars: usize, i: usize) -> Result<HbarPoly> {
    let e = euler_twist(alpha, &Q::int(n))?;
    if e.is_zero() {
        return Err(Error::NotInvertible("Euler class vanishes".into()));
    }
    HbarPoly::from_laurent(nvars, i, &e.inv(0)?)
}

/// The kernel `Ψ^j · Φ` before taking residues.
///
/// `minus` and `plus` are the data of `𝔑(•, C_m)` and `𝔑(C_m, •)`; `phi`
/// receives the variables `ħ_1, …, ħ_j`.
pub fn psi_integrand<F>(j: usize, minus: &ClassData, plus: &ClassData, phi: F) -> Result<HbarPoly>
where
    F: Fn(&[HbarPoly]) -> Result<HbarPoly>,
{
    if j == 0 {
        return Err(Error::InvalidInput("at least one residue variable".into()));
    }
    let vars: Vec<HbarPoly> = (0..j).map(|i| HbarPoly::var(j, i)).collect();
    let mut acc = HbarPoly::constant(j, RingElem::from_q(&Q::factorial(j as u32).inv().expect("nonzero")));
    for a in 0..j {
        for b in 0..j {
            if a != b {
                acc = acc.mul(&vars[b].sub(&vars[a]));
            }
        }
    }
    for i in 0..j {
        acc = acc.mul(&euler_inverse(minus, -1, j, i)?).mul(&euler_inverse(plus, 1, j, i)?);
    }
    Ok(acc.mul(&phi(&vars)?))
}

/// Iterated residue of [`psi_integrand`].
pub fn psi_kernel<F>(j: usize, minus: &ClassData, plus: &ClassData, phi: F) -> Result<RingElem>
where
    F: Fn(&[HbarPoly]) -> Result<HbarPoly>,
{
    Ok(psi_integrand(j, minus, plus, phi)?.iterated_residue())
}

/// Pushforward to a point from `P^{r-1}`: the coefficient of `h^{r-1}`.
pub fn integrate_proj(r: u32, x: &RingElem) -> RingElem {
    x.h_coefficient(r.saturating_sub(1))
}

/// Normal data at the exceptional stratum of the worked rank `r` example.
pub fn example_data(ring: &Arc<TruncRing>) -> Result<(ClassData, ClassData)> {
    let h = ring.h();
    let minus = ClassData::line(h.neg());
    let o1 = ClassData::line(h);
    let s = ClassData::trivial(ring.rank() as i32).difference(&o1)?;
    let plus = o1.direct_sum(&o1).direct_sum(&s);
    Ok((minus, plus))
}

fn check_example_range(r: u32, nf: u32) -> Result<()> {
    if r == 0 || 2 * r < nf + 1 {
        return Err(Error::RangeViolation(format!("need 2r - N_f >= 1 and r >= 1, got r = {r}, N_f = {nf}")));
    }
    Ok(())
}

/// Kernel of the worked example with all equivariant parameters and masses at zero.
pub fn example_integrand(r: u32, nf: u32) -> Result<HbarPoly> {
    check_example_range(r, nf)?;
    let ring = TruncRing::projective(r)?;
    let (minus, plus) = example_data(&ring)?;
    let h = ring.h();
    psi_integrand(1, &minus, &plus, |v| {
        let hbar = &v[0];
        let mu = HbarPoly::constant(1, h.neg()).sub(hbar);
        Ok(mu.pow(2 * r - nf).mul(&hbar.neg().pow(nf)))
    })
}

/// `∫_{P^{r-1}} Res_ħ` of the worked example kernel.
pub fn example_blowup_coeff(r: u32, nf: u32) -> Result<Q> {
    let res = example_integrand(r, nf)?.iterated_residue();
    let v = integrate_proj(r, &res);
    if !v.is_constant() {
        return Err(Error::Inconsistent(format!("pushforward left {v}")));
    }
    Ok(v.constant())
}

/// K-theoretic kernel of the worked example in `x = e^{-ħ} - 1`, known below `x^target`.
///
/// The insertion is `(1+x)^a e^{b h}`; the result still needs the factor
/// `-1/(1+x)` before its residue is taken.
pub fn k_kernel_x(r: u32, a: i32, b: i64, target: i32) -> Result<Laurent<RingElem>> {
    let ring = TruncRing::projective(r)?;
    let h = ring.h();
    let eh = h.exp()?;
    let emh = h.neg().exp()?;
    let one = RingElem::one();
    let y = Laurent::from_terms([(0, one.clone()), (1, one.clone())]);
    let slack = target + 2 * r as i32 + 4;
    let ya = if a >= 0 { y.pow(a as u32) } else { y.inv(slack)?.pow((-a) as u32) };
    let insertion = ya.scale(&h.scale(&Q::int(b)).exp()?);
    // 1 - e^{h}/(1+x) = (x + 1 - e^{h})/(1+x)
    let minus = Laurent::from_terms([(1, one.clone()), (0, Ring::sub(&one, &eh))]);
    // (1 - e^{-h}(1+x)) (-x)^r
    let plus = Laurent::from_terms([(0, Ring::sub(&one, &emh)), (1, emh.neg())])
        .mul(&Laurent::monomial(RingElem::from_q(&Q::int(-1).pow(r)), r as i32));
    let den = minus.mul(&plus);
    Ok(insertion.mul(&y).mul(&den.inv(slack)?).truncate(target))
}

/// The same kernel written directly in `ħ`, known below `ħ^target`.
pub fn k_kernel_hbar(r: u32, a: i32, b: i64, target: i32) -> Result<Laurent<RingElem>> {
    let ring = TruncRing::projective(r)?;
    let h = ring.h();
    let m = r as i32 + 2;
    let prec = target + m * m + 2 * m + 4;
    let one = Laurent::<RingElem>::one();
    let e_minus = Laurent::<RingElem>::exp_linear(&Q::int(-1), prec);
    let e_plus = Laurent::<RingElem>::exp_linear(&Q::ONE, prec);
    let insertion = Laurent::<RingElem>::exp_linear(&Q::int(-(a as i64)), prec).scale(&h.scale(&Q::int(b)).exp()?);
    let minus = one.sub(&e_plus.scale(&h.exp()?));
    let plus = one.sub(&e_minus.scale(&h.neg().exp()?)).mul(&one.sub(&e_minus).pow(r));
    Ok(insertion.mul(&minus.mul(&plus).inv(target)?).truncate(target))
}

/// `(Res_ħ, -Res_x · /(1+x))` of the K-theoretic example kernel, pushed to a point.
pub fn k_kernel_residues(r: u32, a: i32, b: i64) -> Result<(RingElem, RingElem)> {
    let via_hbar = k_kernel_hbar(r, a, b, 0)?.residue()?;
    let via_x = crate::algebra::x_transform(&k_kernel_x(r, a, b, 0)?, 0)?.residue()?;
    Ok((integrate_proj(r, &via_hbar), integrate_proj(r, &via_x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{hbar_minus_pow, residue_hbar};
    use proptest::prelude::*;

    fn hb(r: &Arc<TruncRing>) -> (RingElem, Laurent<RingElem>) {
        (r.h(), Laurent::monomial(RingElem::one(), 1))
    }

    #[test]
    fn truncation_and_inverse() {
        let ring = TruncRing::projective(3).unwrap();
        let h = ring.h();
        assert!(h.pow(3).is_zero());
        assert!(!h.pow(2).is_zero());
        let u = Ring::add(&RingElem::one(), &h);
        let inv = u.try_inv().unwrap();
        assert_eq!(Ring::mul(&u, &inv), RingElem::one());
        assert!(h.try_inv().is_none());
        assert_eq!(h.to_string(), "h");
    }

    #[test]
    fn euler_twist_examples() {
        let ring = TruncRing::with_symbols(1, vec![Symbol { name: "x".into(), degree: 1, order: 3 }], None).unwrap();
        let x = ring.symbol("x").unwrap();
        let a = ClassData::line(x.clone());
        let plus = euler_twist(&a, &Q::ONE).unwrap();
        assert_eq!(plus, Laurent::from_terms([(1, RingElem::one()), (0, x.clone())]));
        let minus = euler_twist(&a, &Q::int(-1)).unwrap();
        assert_eq!(minus, Laurent::from_terms([(1, RingElem::from_q(&Q::int(-1))), (0, x)]));
        assert_eq!(euler_twist(&ClassData::trivial(0), &Q::int(7)).unwrap(), Laurent::one());
    }

    #[test]
    fn zero_weight_cannot_be_inverted() {
        let ring = TruncRing::projective(2).unwrap();
        let e = euler_twist(&ClassData::line(ring.h()), &Q::ZERO).unwrap();
        assert!(matches!(e.inv(0), Err(Error::NotInvertible(_))));
        let virt = ClassData::trivial(0).difference(&ClassData::line(ring.h())).unwrap();
        assert!(matches!(euler_twist(&virt, &Q::ZERO), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn residues_of_shifted_poles() {
        let ring = TruncRing::with_symbols(2, vec![Symbol { name: "w".into(), degree: 1, order: 6 }], None).unwrap();
        let w = Ring::add(&ring.symbol("w").unwrap(), &ring.h());
        for j in -6..=6 {
            let res = residue_hbar(&hbar_minus_pow(&w, j).unwrap()).unwrap();
            let want = if j == -1 { RingElem::one() } else { RingElem::zero() };
            assert_eq!(res, want, "j = {j}");
        }
    }

    #[test]
    fn binomial_residue_in_rank_two() {
        let ring = TruncRing::projective(2).unwrap();
        let (h, hbar) = hb(&ring);
        let f = Laurent::monomial(RingElem::one(), -2).mul(&Laurent::monomial(h.clone(), 0).add(&hbar).pow(2));
        assert_eq!(residue_hbar(&f).unwrap(), h.scale(&Q::int(2)));
    }

    #[test]
    fn projective_pushforward() {
        for r in 1..5 {
            let ring = TruncRing::projective(r).unwrap();
            assert_eq!(integrate_proj(r, &ring.h().pow(r - 1)), RingElem::one());
            if r >= 2 {
                assert!(integrate_proj(r, &RingElem::one()).is_zero());
            }
        }
        let ring = TruncRing::projective(2).unwrap();
        let x = Ring::add(&ring.h(), &RingElem::one()).pow(3);
        assert_eq!(integrate_proj(2, &x), RingElem::from_q(&Q::int(3)));
    }

    #[test]
    fn example_integrand_matches_closed_form() {
        // (-h-ħ)^{2r-N_f} (-ħ)^{N_f} / (-ħ^r (h+ħ)^2)
        for r in 1..=4u32 {
            for nf in 0..2 * r {
                let ring = TruncRing::projective(r).unwrap();
                let h = ring.h();
                let hbar = HbarPoly::var(1, 0);
                let hp = HbarPoly::constant(1, h.clone()).add(&hbar);
                let num = hp.neg().pow(2 * r - nf).mul(&hbar.neg().pow(nf));
                let mut inv_hp = HbarPoly::zero(1);
                for k in 0..r as i32 {
                    let c = h.neg().pow(k as u32);
                    inv_hp = inv_hp.add(&HbarPoly::from_laurent(1, 0, &Laurent::monomial(c, -1 - k)).unwrap());
                }
                let den_inv = inv_hp
                    .pow(2)
                    .mul(&HbarPoly::from_laurent(1, 0, &Laurent::monomial(RingElem::from_q(&Q::int(-1)), -(r as i32))).unwrap());
                let want = num.mul(&den_inv);
                assert_eq!(example_integrand(r, nf).unwrap(), want, "r = {r}, N_f = {nf}");
            }
        }
    }

    #[test]
    fn worked_example_values() {
        assert_eq!(example_blowup_coeff(2, 0).unwrap(), Q::int(-2));
        assert_eq!(example_blowup_coeff(3, 0).unwrap(), Q::int(-6));
        assert_eq!(example_blowup_coeff(2, 1).unwrap(), Q::int(-1));
        assert!(matches!(example_blowup_coeff(2, 4), Err(Error::RangeViolation(_))));
    }

    #[test]
    fn even_pole_has_no_residue() {
        let line = ClassData::trivial(1);
        let res = psi_kernel(1, &line, &line, |v| Ok(HbarPoly::constant(v.len(), RingElem::one()))).unwrap();
        assert!(res.is_zero());
    }

    #[test]
    fn two_variable_kernel_is_symmetric() {
        let ring = TruncRing::projective(3).unwrap();
        let (minus, plus) = example_data(&ring).unwrap();
        let h = ring.h();
        let k = psi_integrand(2, &minus, &plus, |v| {
            let s = v[0].add(&v[1]);
            Ok(HbarPoly::constant(2, h.clone()).add(&s).pow(3))
        })
        .unwrap();
        assert_eq!(k.swap(0, 1), k);
    }

    #[test]
    fn k_kernel_parameterizations_agree() {
        for r in 1..=3 {
            for a in -2..=2 {
                for b in -1..=1 {
                    let (x, y) = k_kernel_residues(r, a, b).unwrap();
                    assert_eq!(x, y, "r = {r}, a = {a}, b = {b}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn euler_twist_degree_and_leading(rank in 0i32..5, n in -4i64..5, c1 in -3i64..4) {
            prop_assume!(n != 0);
            let ring = TruncRing::projective(3).unwrap();
            let alpha = ClassData { rank, chern: vec![ring.h().scale(&Q::int(c1))] };
            let e = euler_twist(&alpha, &Q::int(n)).unwrap();
            let top = e.terms().map(|(k, _)| k).max().unwrap();
            prop_assert_eq!(top, rank);
            prop_assert_eq!(e.coeff(rank).unwrap(), RingElem::from_q(&Q::int(n).pow(rank as u32)));
        }
    }
}
