//! Fixed-point data on the framed moduli space and the K-theoretic partition function.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{a_var, Exp, ExpPoly, InsVar, LamSeries, Monomial, RatFrac, Q, EPS1, EPS2, MAX_RANK};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_tuples, YoungTuple};

/// `W = Σ_α e^{a_α}`.
pub fn w_char(r: usize) -> ExpPoly {
    ExpPoly::from_terms((0..r).map(|a| (Exp::unit(a_var(a)), Q::ONE)))
}

/// `e^{a_α} Σ_{s ∈ Y_α} e^{-l'(s) ε1 - a'(s) ε2}` for a single diagram.
fn v_block(t: &YoungTuple, alpha: usize) -> ExpPoly {
    let y = &t.0[alpha];
    ExpPoly::from_terms(y.cells().map(|(i, j)| {
        let mut e = Exp::eps(-(i as i32 - 1), -(j as i32 - 1));
        e.0[a_var(alpha)] = 4;
        (e, Q::ONE)
    }))
}

/// Character of the tautological bundle `V` at the fixed point.
pub fn v_char(t: &YoungTuple) -> ExpPoly {
    (0..t.rank()).fold(ExpPoly::zero(), |acc, a| acc.add(&v_block(t, a)))
}

fn check_rank(r: usize) -> Result<()> {
    if r == 0 || r > MAX_RANK {
        return Err(Error::InvalidInput(format!("rank {r} outside 1..={MAX_RANK}")));
    }
    Ok(())
}

fn ensure_honest(ch: &ExpPoly, what: &str) -> Result<()> {
    if let Some((e, c)) = ch.terms().iter().find(|(_, c)| c.is_negative() || !c.is_integer()) {
        return Err(Error::CancellationFailure(format!("{what}: multiplicity {c} at {e:?}")));
    }
    Ok(())
}

/// Tangent space blocks `T_{αβ}` from the monad description
/// `W^∨V + e^{ε1+ε2} V^∨W - (1-e^{ε1})(1-e^{ε2}) V^∨V`.
pub fn tangent_blocks_adhm(t: &YoungTuple) -> Result<Vec<((usize, usize), ExpPoly)>> {
    let r = t.rank();
    check_rank(r)?;
    let q12 = ExpPoly::one_minus(Exp::eps(1, 0)).mul(&ExpPoly::one_minus(Exp::eps(0, 1)));
    let vs: Vec<ExpPoly> = (0..r).map(|a| v_block(t, a)).collect();
    let mut out = Vec::with_capacity(r * r);
    for a in 0..r {
        let va_dual = vs[a].dual();
        for b in 0..r {
            let wa_dual = ExpPoly::exp(Exp::unit(a_var(a)).neg());
            let wb = ExpPoly::exp(Exp::unit(a_var(b)));
            let block = wa_dual
                .mul(&vs[b])
                .add(&va_dual.mul(&wb).shift(&Exp::eps(1, 1)))
                .sub(&q12.mul(&va_dual.mul(&vs[b])));
            ensure_honest(&block, &format!("block ({a},{b}) at {t}"))?;
            out.push(((a, b), block));
        }
    }
    Ok(out)
}

pub fn tangent_char_adhm(t: &YoungTuple) -> Result<ExpPoly> {
    Ok(tangent_blocks_adhm(t)?.iter().fold(ExpPoly::zero(), |acc, (_, b)| acc.add(b)))
}

/// Tangent space blocks from arm and leg lengths.
pub fn tangent_blocks_armleg(t: &YoungTuple) -> Vec<((usize, usize), ExpPoly)> {
    let r = t.rank();
    let mut out = Vec::with_capacity(r * r);
    for a in 0..r {
        for b in 0..r {
            let (ya, yb) = (&t.0[a], &t.0[b]);
            let mut shift = Exp::unit(a_var(b));
            shift.0[a_var(a)] -= 4;
            let mut terms = Vec::new();
            for s in ya.cells() {
                terms.push((Exp::eps(-yb.leg(s) as i32, ya.arm(s) as i32 + 1).add(&shift), Q::ONE));
            }
            for s in yb.cells() {
                terms.push((Exp::eps(ya.leg(s) as i32 + 1, -yb.arm(s) as i32).add(&shift), Q::ONE));
            }
            out.push(((a, b), ExpPoly::from_terms(terms)));
        }
    }
    out
}

pub fn tangent_char_armleg(t: &YoungTuple) -> ExpPoly {
    tangent_blocks_armleg(t).iter().fold(ExpPoly::zero(), |acc, (_, b)| acc.add(b))
}

fn weight_factors(ch: &ExpPoly) -> Result<(Vec<ExpPoly>, Vec<ExpPoly>)> {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (w, m) in ch.terms() {
        if w.is_zero() {
            return Err(Error::ZeroWeight(format!("{ch}")));
        }
        let k = m.as_i64().ok_or_else(|| Error::InvalidInput(format!("multiplicity {m} is not an integer")))?;
        let f = ExpPoly::one_minus(w.neg());
        let target = if k > 0 { &mut num } else { &mut den };
        for _ in 0..k.unsigned_abs() {
            target.push(f.clone());
        }
    }
    Ok((num, den))
}

/// K-theoretic Euler class `Π (1 - e^{-w})^{m_w}`.
pub fn ek_euler(ch: &ExpPoly) -> Result<RatFrac> {
    let (num, den) = weight_factors(ch)?;
    Ok(RatFrac::one_over(&den)?.mul_poly(&ExpPoly::product(num.iter())))
}

/// `1 / e^K(ch)`.
pub fn inverse_euler(ch: &ExpPoly) -> Result<RatFrac> {
    let (num, den) = weight_factors(ch)?;
    Ok(RatFrac::one_over(&num)?.mul_poly(&ExpPoly::product(den.iter())))
}

/// `exp[l Σ_α Σ_{s ∈ Y_α} (a_α - l'ε1 - a'ε2 - (ε1+ε2)/2)]`.
pub fn cs_factor(t: &YoungTuple, l: i32) -> ExpPoly {
    let mut e = Exp::ZERO;
    for (a, y) in t.0.iter().enumerate() {
        for (i, j) in y.cells() {
            e.0[a_var(a)] += 4 * l;
            e.0[EPS1] -= l * (4 * (i as i32 - 1) + 2);
            e.0[EPS2] -= l * (4 * (j as i32 - 1) + 2);
        }
    }
    ExpPoly::exp(e)
}

/// Character of the universal sheaf restricted to the origin:
/// `W - (1-e^{-ε1})(1-e^{-ε2}) V`.
pub fn origin_class(t: &YoungTuple) -> ExpPoly {
    let q12 = ExpPoly::one_minus(Exp::eps(-1, 0)).mul(&ExpPoly::one_minus(Exp::eps(0, -1)));
    w_char(t.rank()).sub(&q12.mul(&v_char(t)))
}

/// `(e^{ε1/2} - e^{-ε1/2})(e^{ε2/2} - e^{-ε2/2})` as a fraction's reciprocal.
pub fn inverse_hat_measure() -> RatFrac {
    let d = ExpPoly::one_minus(Exp::eps(1, 0)).mul(&ExpPoly::one_minus(Exp::eps(0, 1)));
    RatFrac::new(ExpPoly::exp(Exp::quarters(EPS1, 2).add(&Exp::quarters(EPS2, 2))), &d)
        .expect("nonzero denominator")
}

/// `ch ψ^p(E/[0]) / ((e^{ε1/2}-e^{-ε1/2})(e^{ε2/2}-e^{-ε2/2}))`.
pub fn tau_factor(t: &YoungTuple, p: i32) -> RatFrac {
    inverse_hat_measure().mul_poly(&origin_class(t).adams(p))
}

/// Exterior power `Λ^p` of a virtual character, via `λ_t(A - B) = λ_t(A) / λ_t(B)`.
pub fn wedge(ch: &ExpPoly, p: u32) -> Result<ExpPoly> {
    let p = p as usize;
    let mut series: Vec<ExpPoly> = vec![ExpPoly::zero(); p + 1];
    series[0] = ExpPoly::one();
    for (w, m) in ch.terms() {
        let k = m.as_i64().ok_or_else(|| Error::InvalidInput(format!("multiplicity {m} is not an integer")))?;
        // (1 + x t)^k with x = e^w, expanded to t^p.
        let mut factor = vec![ExpPoly::zero(); p + 1];
        for (j, slot) in factor.iter_mut().enumerate() {
            let c = Q::binomial(k, j as i64);
            if !c.is_zero() {
                *slot = ExpPoly::monomial(w.scale(j as i32), c);
            }
        }
        let mut next = vec![ExpPoly::zero(); p + 1];
        for i in 0..=p {
            if series[i].is_zero() {
                continue;
            }
            for j in 0..=p - i {
                if !factor[j].is_zero() {
                    next[i + j] = next[i + j].add(&series[i].mul(&factor[j]));
                }
            }
        }
        series = next;
    }
    Ok(series.swap_remove(p))
}

/// Additional per-fixed-point class multiplied into the summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtraClass {
    /// `ch Λ^p(E/[0])`.
    Wedge(u32),
    /// `ch Λ^p((E/[0])^∨)`.
    DualWedge(u32),
}

impl ExtraClass {
    pub fn evaluate(&self, t: &YoungTuple) -> Result<ExpPoly> {
        match self {
            ExtraClass::Wedge(p) => wedge(&origin_class(t), *p),
            ExtraClass::DualWedge(p) => wedge(&origin_class(t).dual(), *p),
        }
    }
}

/// Which insertions enter the partition function.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InsertionSpec {
    pub rank: usize,
    /// Chern–Simons level `l`.
    pub cs: i32,
    /// Indices `p` of the `τ_p` variables kept.
    pub taus: Vec<i32>,
    /// Maximal total degree in the `τ_p`.
    pub degree: u32,
    pub extra: Option<ExtraClass>,
}

impl InsertionSpec {
    pub fn plain(rank: usize, cs: i32) -> Self {
        InsertionSpec { rank, cs, taus: Vec::new(), degree: 0, extra: None }
    }

    pub fn with_taus(rank: usize, cs: i32, taus: Vec<i32>, degree: u32) -> Self {
        InsertionSpec { rank, cs, taus, degree, extra: None }
    }

    pub fn validate(&self) -> Result<()> {
        check_rank(self.rank)?;
        if self.taus.contains(&0) {
            return Err(Error::InvalidInput("τ_0 is not an insertion".into()));
        }
        if self.degree > 2 {
            return Err(Error::InvalidInput(format!("insertion degree {} exceeds 2", self.degree)));
        }
        Ok(())
    }

    /// All monomials in the chosen `τ_p` up to the chosen degree.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut taus = self.taus.clone();
        taus.sort();
        taus.dedup();
        let mut out = vec![Monomial::one()];
        let mut frontier = vec![(Monomial::one(), 0usize)];
        for _ in 0..self.degree {
            let mut next = Vec::new();
            for (m, start) in &frontier {
                for (i, p) in taus.iter().enumerate().skip(*start) {
                    let m2 = m.mul(&Monomial::var(InsVar::Tau(*p)));
                    out.push(m2.clone());
                    next.push((m2, i));
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }
}

/// Summand of the partition function at one fixed point, without the `Λ` power,
/// split by insertion monomial.
pub fn fixed_point_summand(t: &YoungTuple, spec: &InsertionSpec) -> Result<Vec<(Monomial, RatFrac)>> {
    let r = t.rank() as i32;
    let n = t.size() as i32;
    let pref = Exp::quarters(EPS1, -2 * r * n).add(&Exp::quarters(EPS2, -2 * r * n));
    let mut base_num = cs_factor(t, spec.cs).shift(&pref);
    if let Some(extra) = &spec.extra {
        base_num = base_num.mul(&extra.evaluate(t)?);
    }
    let base = inverse_euler(&tangent_char_armleg(t))?.mul_poly(&base_num);
    let mut taus: BTreeMap<i32, RatFrac> = BTreeMap::new();
    for &p in &spec.taus {
        taus.entry(p).or_insert_with(|| tau_factor(t, p));
    }
    let mut out = Vec::new();
    for m in spec.monomials() {
        let mut c = base.clone();
        for (v, k) in m.powers() {
            if let InsVar::Tau(p) = v {
                c = c.mul(&taus[p].pow(*k));
            }
        }
        let f = m.factorial();
        if !f.is_one() {
            c = c.scale(&f.inv().expect("nonzero factorial"));
        }
        out.push((m, c));
    }
    Ok(out)
}

/// `Z^inst` through `Λ^order`.
pub fn z_inst(spec: &InsertionSpec, order: u32) -> Result<LamSeries> {
    spec.validate()?;
    let r = spec.rank;
    let mut out = LamSeries::new(order, spec.degree);
    let step = 2 * r as u32;
    for n in 0..=order / step {
        let tuples = enumerate_tuples(r, n);
        let parts: Vec<Vec<(Monomial, RatFrac)>> = tuples
            .par_iter()
            .map(|t| fixed_point_summand(t, spec))
            .collect::<Result<_>>()?;
        let mut groups: BTreeMap<Monomial, Vec<&RatFrac>> = BTreeMap::new();
        for part in &parts {
            for (m, c) in part {
                groups.entry(m.clone()).or_default().push(c);
            }
        }
        let summed: Vec<(Monomial, RatFrac)> = groups
            .into_par_iter()
            .map(|(m, cs)| (m, RatFrac::sum(cs).cancelled()))
            .collect();
        for (m, c) in summed {
            out.set(step * n, m, c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_tuples;

    fn tuple(s: &str) -> YoungTuple {
        s.parse().unwrap()
    }

    #[test]
    fn single_box_tangent_space() {
        let t = tuple("1");
        let expect = ExpPoly::exp(Exp::eps(1, 0)).add(&ExpPoly::exp(Exp::eps(0, 1)));
        assert_eq!(tangent_char_adhm(&t).unwrap(), expect);
        assert_eq!(tangent_char_armleg(&t), expect);
    }

    #[test]
    fn two_box_row_tangent_space() {
        let t = tuple("2");
        let expect = ExpPoly::from_terms([
            (Exp::eps(1, 0), Q::ONE),
            (Exp::eps(0, 1), Q::ONE),
            (Exp::eps(0, 2), Q::ONE),
            (Exp::eps(1, -1), Q::ONE),
        ]);
        assert_eq!(tangent_char_adhm(&t).unwrap(), expect);
        assert_eq!(tangent_char_armleg(&t), expect);
    }

    #[test]
    fn blocks_agree_for_rank_two() {
        for n in 0..4 {
            for t in enumerate_tuples(2, n) {
                let a = tangent_blocks_adhm(&t).unwrap();
                let b = tangent_blocks_armleg(&t);
                assert_eq!(a, b, "{t}");
            }
        }
    }

    #[test]
    fn euler_class_signs() {
        let ch = ExpPoly::exp(Exp::eps(1, 0)).sub(&ExpPoly::exp(Exp::eps(0, 1)));
        let e = ek_euler(&ch).unwrap();
        let expect = RatFrac::new(ExpPoly::one_minus(Exp::eps(-1, 0)), &ExpPoly::one_minus(Exp::eps(0, -1))).unwrap();
        assert!(e.equals(&expect));
        assert!(matches!(ek_euler(&ExpPoly::one()), Err(Error::ZeroWeight(_))));
    }

    #[test]
    fn rank_one_first_coefficient() {
        let z = z_inst(&InsertionSpec::plain(1, 0), 2).unwrap();
        let half = Exp::quarters(EPS1, 2).add(&Exp::quarters(EPS2, 2));
        let d = ExpPoly::one_minus(Exp::eps(1, 0)).mul(&ExpPoly::one_minus(Exp::eps(0, 1)));
        let expect = RatFrac::new(ExpPoly::exp(half), &d).unwrap();
        assert!(z.coeff(2).equals(&expect));
    }

    #[test]
    fn wedge_of_honest_character() {
        let ch = w_char(3);
        let e2 = wedge(&ch, 2).unwrap();
        assert_eq!(e2.len(), 3);
        assert_eq!(wedge(&ch, 4).unwrap(), ExpPoly::zero());
        let virt = ch.sub(&ExpPoly::exp(Exp::unit(a_var(0))));
        assert_eq!(wedge(&virt, 2).unwrap(), wedge(&w_char(3).sub(&ExpPoly::exp(Exp::unit(a_var(0)))), 2).unwrap());
    }

    #[test]
    fn origin_class_of_empty_is_framing() {
        assert_eq!(origin_class(&YoungTuple::empty(2)), w_char(2));
        assert_eq!(origin_class(&tuple("1;-")).rank(), Q::int(2));
    }
}
