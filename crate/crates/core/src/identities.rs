//! Executable blow-up equations, vanishing statements, symmetry, the
//! recursive solver and the `ε → 0` extractions.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::ratfrac::cross_witness;
use crate::algebra::{
    a_var, expand_eps_series, Exp, ExpPoly, InsVar, LamSeries, LinearMap, Monomial, RatFrac, EPS1, EPS2, Q,
};
use crate::blowup::{zhat_from_base, BlowupParams, TauConvention};
use crate::error::{Error, Result};
use crate::format::den_text;
use crate::instanton::{z_inst, ExtraClass, InsertionSpec};

/// Directions `ε2 = c ε1` used for limits unless the caller supplies others.
pub fn default_directions() -> Vec<Q> {
    vec![Q::int(-2), Q::frac(-1, 2), Q::int(3)]
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    pub r: usize,
    pub l: i32,
    pub d: Option<i32>,
    pub k: Option<i64>,
    pub p: Option<i32>,
    pub order: u32,
}

impl std::fmt::Display for CheckParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "r={} l={}", self.r, self.l)?;
        if let Some(d) = self.d {
            write!(f, " d={d}")?;
        }
        if let Some(k) = self.k {
            write!(f, " k={k}")?;
        }
        if let Some(p) = self.p {
            write!(f, " p={p}")?;
        }
        write!(f, " order={}", self.order)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The difference of the two sides over their common denominator.
    Fails { witness: RatFrac },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderVerdict {
    pub lambda: u32,
    pub monomial: Monomial,
    pub verdict: Verdict,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub identity: String,
    pub params: CheckParams,
    pub verdicts: Vec<OrderVerdict>,
    /// Free-form remark, e.g. which sign of `k` vanished.
    pub note: Option<String>,
}

impl CheckReport {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict == Verdict::Holds)
    }

    /// Human-readable table with timings.
    pub fn table(&self) -> String {
        let mut s = format!("{} [{}]\n", self.identity, self.params);
        for v in &self.verdicts {
            let status = match &v.verdict {
                Verdict::Holds => "holds".to_string(),
                Verdict::Fails { witness } => format!("FAILS  witness numerator has {} terms", witness.num().len()),
            };
            let _ = writeln!(s, "  Λ^{:<3} {:<12} {:<8} {} ms", v.lambda, v.monomial.to_string(), status, v.millis);
        }
        if let Some(n) = &self.note {
            let _ = writeln!(s, "  note: {n}");
        }
        let _ = writeln!(s, "  result: {}", if self.holds() { "holds" } else { "FAILS" });
        s
    }

    /// Machine record without timings, so identical runs give identical bytes.
    pub fn machine(&self) -> String {
        let p = &self.params;
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        let mut s = format!(
            "identity={}\tr={}\tl={}\td={}\tk={}\tp={}\torder={}\n",
            self.identity,
            p.r,
            p.l,
            opt(p.d.map(|x| x.to_string())),
            opt(p.k.map(|x| x.to_string())),
            opt(p.p.map(|x| x.to_string())),
            p.order
        );
        for v in &self.verdicts {
            match &v.verdict {
                Verdict::Holds => {
                    let _ = writeln!(s, "lambda={}\tins={}\tverdict=holds", v.lambda, v.monomial);
                }
                Verdict::Fails { witness } => {
                    let _ = writeln!(
                        s,
                        "lambda={}\tins={}\tverdict=fails\tnum={}\tden={}",
                        v.lambda,
                        v.monomial,
                        witness.num(),
                        den_text(witness.den())
                    );
                }
            }
        }
        if let Some(n) = &self.note {
            let _ = writeln!(s, "note={n}");
        }
        s
    }
}

fn keys_of(series: &[&LamSeries], step: u32, order: u32, monomials: &[Monomial]) -> BTreeSet<(u32, Monomial)> {
    let mut keys: BTreeSet<(u32, Monomial)> = BTreeSet::new();
    for s in series {
        for ((n, m), _) in s.iter() {
            if *n <= order && monomials.contains(m) {
                keys.insert((*n, m.clone()));
            }
        }
    }
    for m in monomials {
        for n in (0..=order).step_by(step.max(1) as usize) {
            keys.insert((n, m.clone()));
        }
    }
    keys
}

/// Compares two series on the given insertion grades.
fn compare(lhs: &LamSeries, rhs: &LamSeries, step: u32, order: u32, monomials: &[Monomial]) -> Vec<OrderVerdict> {
    let zero = RatFrac::zero();
    keys_of(&[lhs, rhs], step, order, monomials)
        .into_iter()
        .map(|(n, m)| {
            let t = Instant::now();
            let a = lhs.get(n, &m).unwrap_or(&zero);
            let b = rhs.get(n, &m).unwrap_or(&zero);
            let w = cross_witness(a, b);
            let verdict = if w.is_zero() { Verdict::Holds } else { Verdict::Fails { witness: w } };
            OrderVerdict { lambda: n, monomial: m, verdict, millis: t.elapsed().as_millis() }
        })
        .collect()
}

fn check_range(r: usize, l: i32, d: i32) -> Result<()> {
    if l < 0 || l > r as i32 || d < 0 || d > r as i32 {
        return Err(Error::RangeViolation(format!("need 0 ≤ l ≤ r and 0 ≤ d ≤ r, got r={r} l={l} d={d}")));
    }
    Ok(())
}

/// `Ẑ_{l,0,d} = Z_l` coefficientwise through `Λ^order`.
pub fn check_blowup_eq(r: usize, l: i32, d: i32, order: u32) -> Result<CheckReport> {
    check_range(r, l, d)?;
    let spec = InsertionSpec::plain(r, l);
    let base = z_inst(&spec, order)?;
    let params = BlowupParams { spec, k: 0, d, order, convention: TauConvention::Scalar };
    let zh = zhat_from_base(&base, &params)?;
    Ok(CheckReport {
        identity: "blowup".into(),
        params: CheckParams { r, l, d: Some(d), k: None, p: None, order },
        verdicts: compare(&zh, &base, 2 * r as u32, order, &[Monomial::one()]),
        note: None,
    })
}

/// The `t_p` grade of `Ẑ_{l,0,d}` vanishes through `Λ^order`.
pub fn check_vanish_t(r: usize, l: i32, d: i32, p: i32, order: u32, convention: TauConvention) -> Result<CheckReport> {
    check_range(r, l, d)?;
    let ok = match p {
        0 => false,
        p if p > 0 => d <= r as i32 - p,
        p => -p <= d,
    };
    if !ok {
        return Err(Error::RangeViolation(format!(
            "(d, p) = ({d}, {p}) outside 0 ≤ d ≤ r - p (p > 0) or |p| ≤ d ≤ r (p < 0) for r = {r}"
        )));
    }
    let spec = InsertionSpec::with_taus(r, l, vec![p], 1);
    let base = z_inst(&spec, order)?;
    let params = BlowupParams { spec, k: 0, d, order, convention };
    let zh = zhat_from_base(&base, &params)?;
    let zero = LamSeries::new(order, 1);
    Ok(CheckReport {
        identity: "vanish-t".into(),
        params: CheckParams { r, l, d: Some(d), k: None, p: Some(p), order },
        verdicts: compare(&zh, &zero, 2 * r as u32, order, &[Monomial::var(InsVar::T(p))]),
        note: None,
    })
}

/// `Ẑ_{l,k,d}` for a nonzero `k` as a plain series.
pub fn zhat_k(r: usize, l: i32, d: i32, k: i64, order: u32) -> Result<LamSeries> {
    let spec = InsertionSpec::plain(r, l);
    let base = z_inst(&spec, order)?;
    zhat_from_base(&base, &BlowupParams { spec, k, d, order, convention: TauConvention::Scalar })
}

/// `Ẑ_{l,k,d} = 0` through `Λ^order`. The note records which of `±|k|` vanish.
pub fn check_vanish_k(r: usize, l: i32, d: i32, k: i64, order: u32) -> Result<CheckReport> {
    check_range(r, l, d)?;
    if k == 0 || k.unsigned_abs() as usize >= r {
        return Err(Error::RangeViolation(format!("need 0 < |k| < r, got k={k} r={r}")));
    }
    let zero = LamSeries::new(order, 0);
    let mut vanishing = Vec::new();
    let mut verdicts = Vec::new();
    for s in [k, -k] {
        let zh = zhat_k(r, l, d, s, order)?;
        let v = compare(&zh, &zero, 1, order, &[Monomial::one()]);
        if v.iter().all(|x| x.verdict == Verdict::Holds) {
            vanishing.push(s);
        }
        if s == k {
            verdicts = v;
        }
    }
    let note = match vanishing.as_slice() {
        [] => "neither sign vanishes".to_string(),
        [s] => format!("vanishes for k={s} only"),
        _ => "both signs vanish".to_string(),
    };
    Ok(CheckReport {
        identity: "vanish-k".into(),
        params: CheckParams { r, l, d: Some(d), k: Some(k), p: None, order },
        verdicts,
        note: Some(note),
    })
}

/// `Z_l(ε1, -2ε1) = Z_l(2ε1, -ε1)` through `Λ^order`.
pub fn check_sym(r: usize, l: i32, order: u32) -> Result<CheckReport> {
    if l == r as i32 {
        return Err(Error::RangeViolation(format!("symmetry is only claimed for l ≠ r, got l = r = {r}")));
    }
    let z = z_inst(&InsertionSpec::plain(r, l), order)?;
    let lhs = z.substitute(&LinearMap::eps_line(Q::ONE, Q::int(-2)))?;
    let rhs = z.substitute(&LinearMap::eps_line(Q::int(2), Q::int(-1)))?;
    Ok(CheckReport {
        identity: "sym".into(),
        params: CheckParams { r, l, d: None, k: None, p: None, order },
        verdicts: compare(&lhs, &rhs, 2 * r as u32, order, &[Monomial::one()]),
        note: None,
    })
}

fn eps_exp(var: usize, q: &Q) -> Result<ExpPoly> {
    Ok(ExpPoly::exp(Exp::from_rationals(&[(var, q.clone())])?))
}

/// One blow-up relation at `Λ^{2rN}`: `Z_N = rest + A·X + B·Y`.
struct Relation {
    delta: Q,
    rest: RatFrac,
    a: ExpPoly,
    b: ExpPoly,
}

/// Rebuilds `Z` order by order from the blow-up equations for the levels `ds`.
///
/// At `Λ^{2rN}` the equation for `d` reads
/// `Z_N = R_d + e^{Nδε1} Z_N(ε1, ε2-ε1, a) + e^{Nδε2} Z_N(ε1-ε2, ε2, a)`
/// with `δ = d - (r+l)/2` and `R_d` built from lower orders. For `l = 0`,
/// `Z` is even under `(ε, a) ↦ (-ε, -a)`, so each relation also holds with
/// `δ ↦ -δ` and `R_d` reflected. Three distinct `δ` eliminate `Z_N` and leave a
/// 2×2 system for the two chart values; `Z_N` is the first one with `ε2 ↦ ε2 + ε1`.
pub fn solve_recursive(r: usize, l: i32, ds: &[i32], order: u32) -> Result<LamSeries> {
    if ds.len() < 2 {
        return Err(Error::InvalidInput("need at least two levels d".into()));
    }
    for &d in ds {
        check_range(r, l, d)?;
    }
    let distinct: BTreeSet<i32> = ds.iter().copied().collect();
    if distinct.len() != ds.len() {
        return Err(Error::InvalidInput(format!("levels {ds:?} are not distinct")));
    }
    let mut deltas: BTreeSet<Q> = BTreeSet::new();
    for &d in ds {
        let delta = Q::frac(2 * d as i64 - r as i64 - l as i64, 2);
        if l == 0 {
            deltas.insert(delta.neg());
        }
        deltas.insert(delta);
    }
    if deltas.len() < 3 {
        return Err(Error::SingularSystem(format!(
            "levels {ds:?} give only {} distinct shifts d - (r+l)/2; the chart values are not determined",
            deltas.len()
        )));
    }
    let spec = InsertionSpec::plain(r, l);
    let step = 2 * r as u32;
    let unshift1 = LinearMap::identity().with_image(EPS2, &[(EPS2, Q::ONE), (EPS1, Q::ONE)]);
    let unshift2 = LinearMap::identity().with_image(EPS1, &[(EPS1, Q::ONE), (EPS2, Q::ONE)]);
    let mut z = LamSeries::one(order, 0);
    for big_n in 1..=order / step {
        let target = step * big_n;
        let lower = z.truncate(target, 0);
        let mut rels: Vec<Relation> = Vec::new();
        for &d in ds {
            let params = BlowupParams { spec: spec.clone(), k: 0, d, order: target, convention: TauConvention::Scalar };
            let rest = zhat_from_base(&lower, &params)?.coeff(target);
            let delta = Q::frac(2 * d as i64 - r as i64 - l as i64, 2);
            let reflected = if l == 0 { Some(rest.substitute(&LinearMap::negation())?) } else { None };
            let nd = delta.mul(&Q::int(big_n as i64));
            rels.push(Relation { delta: delta.clone(), rest, a: eps_exp(EPS1, &nd)?, b: eps_exp(EPS2, &nd)? });
            if let Some(rest) = reflected {
                let nd = nd.neg();
                rels.push(Relation { delta: delta.neg(), rest, a: eps_exp(EPS1, &nd)?, b: eps_exp(EPS2, &nd)? });
            }
        }
        rels.sort_by(|x, y| x.delta.cmp(&y.delta));
        rels.dedup_by(|x, y| x.delta == y.delta);
        let (r1, r2, r3) = (&rels[0], &rels[1], &rels[2]);
        let a2 = r2.a.sub(&r1.a);
        let b2 = r2.b.sub(&r1.b);
        let a3 = r3.a.sub(&r1.a);
        let b3 = r3.b.sub(&r1.b);
        let det = a2.mul(&b3).sub(&a3.mul(&b2));
        if det.is_zero() {
            return Err(Error::SingularSystem(format!("determinant vanishes at Λ^{target}")));
        }
        let c2 = r1.rest.sub(&r2.rest);
        let c3 = r1.rest.sub(&r3.rest);
        let det_inv = RatFrac::new(ExpPoly::one(), &det)?;
        let x = c2.mul_poly(&b3).sub(&c3.mul_poly(&b2)).mul(&det_inv).cancelled();
        let y = c3.mul_poly(&a2).sub(&c2.mul_poly(&a3)).mul(&det_inv).cancelled();
        let zn = x.substitute(&unshift1)?.cancelled();
        if !zn.equals(&y.substitute(&unshift2)?) {
            return Err(Error::Inconsistent(format!("the two chart values disagree at Λ^{target}")));
        }
        for rel in &rels {
            let rhs = rel.rest.add(&x.mul_poly(&rel.a)).add(&y.mul_poly(&rel.b));
            if !rhs.equals(&zn) {
                return Err(Error::Inconsistent(format!("relation with δ = {} fails at Λ^{target}", rel.delta)));
            }
        }
        z.set(target, Monomial::one(), zn);
    }
    Ok(z)
}

/// Limit at `ε = 0` of `ε1 ε2 · x` along each direction; they must agree.
pub fn eps_product_limit(x: &RatFrac, directions: &[Q]) -> Result<RatFrac> {
    let mut out: Option<RatFrac> = None;
    for c in directions {
        let s = expand_eps_series(x, c, -2)?;
        if let Some(v) = s.valuation() {
            if v < -2 {
                return Err(Error::PoleDetected { order: (-2 - v) as i64, context: format!("ε1 ε2 · x along c = {c}") });
            }
        }
        let lim = s.coeff(-2)?.scale(c).cancelled();
        match &out {
            None => out = Some(lim),
            Some(prev) if prev.equals(&lim) => {}
            Some(prev) => {
                return Err(Error::Inconsistent(format!("limits differ between directions: {prev} vs {lim} at c = {c}")))
            }
        }
    }
    out.ok_or_else(|| Error::InvalidInput("no directions given".into()))
}

/// Limit at `ε = 0` of `x` along each direction; they must agree.
pub fn eps_value_limit(x: &RatFrac, directions: &[Q]) -> Result<RatFrac> {
    let mut out: Option<RatFrac> = None;
    for c in directions {
        let lim = crate::algebra::eps_limit(x, c)?.cancelled();
        match &out {
            None => out = Some(lim),
            Some(prev) if prev.equals(&lim) => {}
            Some(prev) => {
                return Err(Error::Inconsistent(format!("limits differ between directions: {prev} vs {lim} at c = {c}")))
            }
        }
    }
    out.ok_or_else(|| Error::InvalidInput("no directions given".into()))
}

/// `lim ε1 ε2 ∂ log Z / ∂τ_p` as `(Λ exponent, value)` pairs.
pub fn f0_tau_derivative(r: usize, l: i32, p: i32, order: u32, directions: &[Q]) -> Result<Vec<(u32, RatFrac)>> {
    let spec = InsertionSpec::with_taus(r, l, vec![p], 1);
    let z = z_inst(&spec, order)?;
    let plain = z.grade(&Monomial::one());
    let ratio = z.grade(&Monomial::var(InsVar::Tau(p))).div(&plain)?;
    (0..=order)
        .step_by(2 * r)
        .map(|n| Ok((n, eps_product_limit(&ratio.coeff(n), directions)?)))
        .collect()
}

/// The Seiberg–Witten coefficient `U_p` as `(Λ exponent, value)` pairs.
///
/// For `p ≤ (r-l)/2` the insertion is `Λ^p` of the restriction to the origin.
/// Above that the dual insertion `Λ^{r-p}` of the dual restriction is used and
/// the result is expressed with `a_r = -(a_1 + … + a_{r-1})`.
pub fn extract_up(r: usize, l: i32, p: u32, order: u32, directions: &[Q]) -> Result<Vec<(u32, RatFrac)>> {
    let (p_i, r_i) = (p as i32, r as i32);
    let (extra, traceless) = if p >= 1 && 2 * p_i <= r_i - l {
        (ExtraClass::Wedge(p), false)
    } else if p >= 1 && p_i < r_i && 2 * p_i >= r_i - l {
        (ExtraClass::DualWedge(r as u32 - p), true)
    } else {
        return Err(Error::RangeViolation(format!("p = {p} outside 0 < p < r for r = {r}, l = {l}")));
    };
    let mut plain = InsertionSpec::plain(r, l);
    let mut z = z_inst(&plain, order)?;
    plain.extra = Some(extra);
    let mut zx = z_inst(&plain, order)?;
    if traceless {
        let t = LinearMap::traceless(r);
        z = z.substitute(&t)?;
        zx = zx.substitute(&t)?;
    }
    let ratio = zx.div(&z)?;
    let sign = if p.is_multiple_of(2) { Q::ONE } else { Q::int(-1) };
    (0..=order)
        .step_by(2 * r)
        .map(|n| Ok((n, eps_value_limit(&ratio.coeff(n), directions)?.scale(&sign))))
        .collect()
}

/// `(-1)^p e_p(e^{a_1}, …, e^{a_r})`.
pub fn signed_elementary(r: usize, p: u32) -> ExpPoly {
    let mut e: Vec<ExpPoly> = vec![ExpPoly::zero(); p as usize + 1];
    e[0] = ExpPoly::one();
    for a in 0..r {
        let x = ExpPoly::exp(Exp::unit(a_var(a)));
        for j in (1..=p as usize).rev() {
            e[j] = e[j].add(&e[j - 1].mul(&x));
        }
    }
    let v = e.swap_remove(p as usize);
    if p.is_multiple_of(2) {
        v
    } else {
        v.neg()
    }
}

/// `Σ_α e^{p a_α}`.
pub fn power_sum(r: usize, p: i32) -> ExpPoly {
    ExpPoly::from_terms((0..r).map(|a| (Exp::unit(a_var(a)).scale(p), Q::ONE)))
}

fn value_at(v: &[(u32, RatFrac)], n: u32) -> RatFrac {
    v.iter().find(|(m, _)| *m == n).map(|(_, c)| c.clone()).unwrap_or_default()
}

/// Newton identities between `U_p` and the `τ_p` derivatives at `Λ^0` and `Λ^{2r}`.
///
/// Rank 2: `U_1 = -P_1`. Rank 3: `U_1 = -P_1` and `U_2 = P_{-1}`, the latter
/// through `e_2 = e_3 p_{-1}` with `e_3 = 1`. Both sides are taken with
/// `a_r = -(a_1 + … + a_{r-1})`.
pub fn newton_check(r: usize, l: i32, directions: &[Q]) -> Result<CheckReport> {
    let order = 2 * r as u32;
    let t = LinearMap::traceless(r);
    let tl = |v: Vec<(u32, RatFrac)>| -> Result<Vec<(u32, RatFrac)>> {
        v.into_iter().map(|(n, c)| Ok((n, c.substitute(&t)?.cancelled()))).collect()
    };
    let u1 = tl(extract_up(r, l, 1, order, directions)?)?;
    let p1 = tl(f0_tau_derivative(r, l, 1, order, directions)?)?;
    let mut pairs: Vec<(String, Vec<(u32, RatFrac)>, Vec<(u32, RatFrac)>)> = Vec::new();
    pairs.push(("U1 = -P1".into(), u1, p1.iter().map(|(n, c)| (*n, c.neg())).collect()));
    match r {
        2 => {}
        3 => {
            let u2 = tl(extract_up(r, l, 2, order, directions)?)?;
            let pm1 = tl(f0_tau_derivative(r, l, -1, order, directions)?)?;
            pairs.push(("U2 = P-1".into(), u2, pm1));
        }
        _ => return Err(Error::RangeViolation(format!("Newton check is implemented for r = 2, 3, got {r}"))),
    }
    let mut verdicts = Vec::new();
    let mut names = Vec::new();
    for (name, lhs, rhs) in &pairs {
        names.push(name.clone());
        for n in [0, order] {
            let tm = Instant::now();
            let w = cross_witness(&value_at(lhs, n), &value_at(rhs, n));
            let verdict = if w.is_zero() { Verdict::Holds } else { Verdict::Fails { witness: w } };
            verdicts.push(OrderVerdict { lambda: n, monomial: Monomial::one(), verdict, millis: tm.elapsed().as_millis() });
        }
    }
    Ok(CheckReport {
        identity: "newton".into(),
        params: CheckParams { r, l, d: None, k: None, p: None, order },
        verdicts,
        note: Some(format!("pairs in order: {}", names.join(", "))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_blowup_holds() {
        let rep = check_blowup_eq(1, 0, 0, 6).unwrap();
        assert!(rep.holds(), "{}", rep.table());
        assert!(rep.machine().starts_with("identity=blowup\tr=1\tl=0\td=0"));
    }

    #[test]
    fn range_errors() {
        assert!(matches!(check_vanish_t(2, 0, 2, 1, 4, TauConvention::Scalar), Err(Error::RangeViolation(_))));
        assert!(matches!(check_vanish_t(2, 0, 0, -1, 4, TauConvention::Scalar), Err(Error::RangeViolation(_))));
        assert!(matches!(check_sym(2, 2, 4), Err(Error::RangeViolation(_))));
        assert!(extract_up(3, 0, 2, 0, &default_directions()).is_ok());
        assert!(matches!(extract_up(2, 0, 2, 0, &default_directions()), Err(Error::RangeViolation(_))));
    }

    #[test]
    fn failing_verdict_carries_witness() {
        let mut a = LamSeries::one(2, 0);
        a.set(2, Monomial::one(), RatFrac::one());
        let b = LamSeries::one(2, 0);
        let v = compare(&a, &b, 2, 2, &[Monomial::one()]);
        assert_eq!(v[0].verdict, Verdict::Holds);
        match &v[1].verdict {
            Verdict::Fails { witness } => assert!(witness.is_one()),
            Verdict::Holds => panic!("expected a failure"),
        }
    }

    #[test]
    fn constant_term_of_tau_derivative() {
        for p in [1, -1, 2] {
            let v = f0_tau_derivative(2, 0, p, 0, &default_directions()).unwrap();
            assert!(v[0].1.equals(&RatFrac::from_poly(power_sum(2, p))), "p = {p}");
        }
    }

    #[test]
    fn rank_one_first_derivative_limit() {
        // ε1ε2 e^{a}(1 - (1-e^{-ε1})(1-e^{-ε2})) · Z_1 / s(ε1)s(ε2) minus the Λ^0 part times Z_1.
        let v = f0_tau_derivative(1, 0, 1, 2, &default_directions()).unwrap();
        let expect = RatFrac::from_poly(ExpPoly::monomial(Exp::unit(a_var(0)), Q::int(-1)));
        assert!(v[1].1.equals(&expect), "{}", v[1].1);
    }

    #[test]
    fn symmetric_pairs_are_singular() {
        // d1 + d2 = r + l in both cases.
        assert!(matches!(solve_recursive(2, 0, &[0, 2], 4), Err(Error::SingularSystem(_))));
        assert!(matches!(solve_recursive(1, 0, &[0, 1], 4), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn rank_two_solver_first_order() {
        let z = solve_recursive(2, 0, &[0, 1], 4).unwrap();
        let direct = z_inst(&InsertionSpec::plain(2, 0), 4).unwrap();
        assert!(z.equals(&direct));
    }

    #[test]
    fn level_zero_duality_exchanges_signs_of_k() {
        let neg = LinearMap::negation();
        let a = zhat_k(2, 0, 0, 1, 6).unwrap().substitute(&neg).unwrap();
        let b = zhat_k(2, 0, 2, -1, 6).unwrap();
        // Equal up to the overall factor -e^{a1+a2}.
        let det = RatFrac::from_poly(ExpPoly::monomial(Exp::unit(a_var(0)).add(&Exp::unit(a_var(1))), Q::int(-1)));
        assert!(!a.is_empty());
        assert!(a.equals(&b.scale(&det)));
    }

    #[test]
    fn signed_elementary_small() {
        let e = signed_elementary(2, 2);
        assert_eq!(e, ExpPoly::exp(Exp::unit(a_var(0)).add(&Exp::unit(a_var(1)))));
        assert_eq!(signed_elementary(3, 1), power_sum(3, 1).neg());
    }
}
