//! Partition function on the blow-up, assembled from the two torus charts.

use serde::{Deserialize, Serialize};

use crate::algebra::{a_var, Exp, ExpPoly, InsVar, LamSeries, LinearMap, Monomial, RatFrac, Q, EPS1, EPS2};
use crate::error::{Error, Result};
use crate::instanton::{inverse_euler, z_inst, InsertionSpec};

/// How `τ_p` is carried into the charts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TauConvention {
    /// `τ_p ↦ e^{-ε/2}(τ_p + (e^{ε} - 1) t_p)` for every `p`.
    #[default]
    Scalar,
    /// `τ_p ↦ e^{-pε/2}(τ_p + (e^{pε} - 1) t_p)`.
    Adams,
}

/// Character of `H^1(Ô, O(mC))` computed from the Čech complex for `m > 0`
/// and from the restriction sequences to the exceptional curve for `m < 0`.
pub fn h1_line_bundle_character(m: i64) -> ExpPoly {
    let mut terms = Vec::new();
    if m > 0 {
        // Chart (s, t) with weights (ε1, ε2 - ε1); basis s^a t^b s^{-m}.
        for b in -(m - 1)..=-1 {
            for a in 0..=(m - 1 + b) {
                let x1 = a - b - m;
                let x2 = b;
                terms.push((Exp::eps(x1 as i32, x2 as i32), Q::ONE));
            }
        }
    } else {
        // 0 → O(nC) → O((n+1)C) → O_C((n+1)C) → 0 for n = m, …, -1.
        for n in m..=-1 {
            let k = -(n + 1);
            let fiber = Exp::eps(k as i32, 0);
            for j in 0..=k {
                terms.push((fiber.add(&Exp::eps(-j as i32, j as i32)), Q::ONE));
            }
        }
    }
    ExpPoly::from_terms(terms)
}

/// `Σ_{α≠β} e^{a_β - a_α} H^1(O((k_β - k_α) C))`, with `ε` weights written
/// as characters of functions (a coordinate of weight `w` contributes `e^{-w}`),
/// matching the tangent characters of the instanton moduli.
pub fn l_factor_char(k: &[i64]) -> ExpPoly {
    let mut acc = ExpPoly::zero();
    for (a, ka) in k.iter().enumerate() {
        for (b, kb) in k.iter().enumerate() {
            if a == b {
                continue;
            }
            let mut shift = Exp::unit(a_var(b));
            shift.0[a_var(a)] -= 4;
            let h1 = h1_line_bundle_character(kb - ka).map_exp(|e| {
                let mut x = *e;
                x.0[EPS1] = -x.0[EPS1];
                x.0[EPS2] = -x.0[EPS2];
                x
            });
            acc = acc.add(&h1.shift(&shift));
        }
    }
    acc
}

/// Euler class of the obstruction-type bundle weighting the chart product.
pub fn l_factor(k: &[i64]) -> Result<RatFrac> {
    crate::instanton::ek_euler(&l_factor_char(k))
}

/// `r Σ k_α² - (Σ k_α)²`.
pub fn l_factor_rank(k: &[i64]) -> i64 {
    let r = k.len() as i64;
    let s: i64 = k.iter().sum();
    r * k.iter().map(|x| x * x).sum::<i64>() - s * s
}

/// Integer vectors with the given sum and `r Σ k² ≤ bound`, ordered by norm then lexicographically.
pub fn k_vectors(r: usize, total: i64, bound: u32) -> Vec<Vec<i64>> {
    let lim = ((bound as f64 / r as f64).sqrt().floor() as i64).max(0);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn go(r: usize, total: i64, lim: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == r {
            if cur.iter().sum::<i64>() == total {
                out.push(cur.clone());
            }
            return;
        }
        for v in -lim..=lim {
            cur.push(v);
            go(r, total, lim, cur, out);
            cur.pop();
        }
    }
    go(r, total, lim, &mut cur, &mut out);
    out.retain(|k| r as i64 * k.iter().map(|x| x * x).sum::<i64>() <= bound as i64);
    out.sort_by_key(|k| (k.iter().map(|x| x * x).sum::<i64>(), k.clone()));
    out
}

/// Rewrites `τ_p` in chart coordinates with weight `var`.
fn chart_insertion_rule(var: usize, conv: TauConvention) -> impl Fn(&Monomial) -> Vec<(Monomial, ExpPoly)> {
    move |m: &Monomial| {
        let mut acc: Vec<(Monomial, ExpPoly)> = vec![(Monomial::one(), ExpPoly::one())];
        for (v, k) in m.powers() {
            let InsVar::Tau(p) = *v else {
                panic!("chart substitution expects τ monomials");
            };
            let scale = match conv {
                TauConvention::Scalar => 1,
                TauConvention::Adams => p,
            };
            let a = ExpPoly::exp(Exp::quarters(var, -2 * scale));
            let b = a.mul(&ExpPoly::exp(Exp::quarters(var, 4 * scale)).sub(&ExpPoly::one()));
            for _ in 0..*k {
                let mut next = Vec::new();
                for (mono, c) in &acc {
                    next.push((mono.mul(&Monomial::var(InsVar::Tau(p))), c.mul(&a)));
                    next.push((mono.mul(&Monomial::var(InsVar::T(p))), c.mul(&b)));
                }
                acc = next;
            }
        }
        let mut merged: std::collections::BTreeMap<Monomial, ExpPoly> = Default::default();
        for (mono, c) in acc {
            let e = merged.entry(mono).or_default();
            *e = e.add(&c);
        }
        merged.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

/// One chart factor: coefficients substituted, `Λ` rescaled and insertions rewritten.
fn chart_series(
    base: &LamSeries,
    chart: usize,
    k: &[i64],
    delta: &Q,
    order: u32,
    conv: TauConvention,
) -> Result<LamSeries> {
    let r = k.len() as u32;
    let (map, var) = match chart {
        1 => (LinearMap::patch1(k), EPS1),
        _ => (LinearMap::patch2(k), EPS2),
    };
    let trimmed = base.truncate(order, base.degree());
    let scaled = trimmed.try_map_indexed(|n, c| {
        let inst = Q::frac(n as i64, 2 * r as i64);
        let shift = Exp::from_rationals(&[(var, inst.mul(delta))])?;
        Ok(c.substitute(&map)?.mul_term(&shift, &Q::ONE))
    })?;
    if base.degree() == 0 {
        return Ok(scaled);
    }
    Ok(scaled.map_insertions(base.degree(), chart_insertion_rule(var, conv)))
}

/// Prefactor `(e^{(ε1+ε2)δ})^{(k,k)/2} e^{(d-l/2)(k,a)} exp[l((ε1+ε2)Σk³/6 + Σ k² a/2)]`
/// where `δ = d - (r+l)/2`.
fn k_prefactor(k: &[i64], l: i32, d: i32) -> Result<Exp> {
    let r = k.len() as i64;
    let kk: i64 = k.iter().map(|x| x * x).sum();
    let k3: i64 = k.iter().map(|x| x * x * x).sum();
    let delta = Q::frac(2 * d as i64 - r - l as i64, 2);
    let eps = delta.mul(&Q::frac(kk, 2)).add(&Q::frac(l as i64 * k3, 6));
    let mut coords = vec![(EPS1, eps.clone()), (EPS2, eps)];
    let dl = Q::frac(2 * d as i64 - l as i64, 2);
    for (a, ka) in k.iter().enumerate() {
        let c = dl.mul(&Q::int(*ka)).add(&Q::frac(l as i64 * ka * ka, 2));
        coords.push((a_var(a), c));
    }
    Exp::from_rationals(&coords)
}

/// Parameters of the blown-up partition function.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlowupParams {
    pub spec: InsertionSpec,
    /// `Σ k_α`, minus the pairing of the first Chern class with the exceptional curve.
    pub k: i64,
    /// Power of the exceptional determinant line insertion.
    pub d: i32,
    pub order: u32,
    pub convention: TauConvention,
}

/// `Ẑ_{l,k,d}` through `Λ^order` from a precomputed `Z`.
pub fn zhat_from_base(base: &LamSeries, params: &BlowupParams) -> Result<LamSeries> {
    let spec = &params.spec;
    let r = spec.rank;
    let l = spec.cs;
    let d = params.d;
    let order = params.order;
    let delta = Q::frac(2 * d as i64 - r as i64 - l as i64, 2);
    let mut pieces = Vec::new();
    for k in k_vectors(r, params.k, order) {
        let lam: u32 = (r as i64 * k.iter().map(|x| x * x).sum::<i64>()) as u32;
        let rest = order - lam;
        let weight = inverse_euler(&l_factor_char(&k))?.mul_term(&k_prefactor(&k, l, d)?, &Q::ONE);
        let c1 = chart_series(base, 1, &k, &delta, rest, params.convention)?;
        let c2 = chart_series(base, 2, &k, &delta, rest, params.convention)?;
        let prod = c1.mul(&c2).scale(&weight).truncate(rest, spec.degree);
        pieces.push(prod.shift_lambda(lam).truncate(order, spec.degree));
    }
    Ok(LamSeries::sum(order, spec.degree, pieces.iter()))
}

/// `Ẑ_{l,k,d}` through `Λ^order`.
pub fn zhat_inst(params: &BlowupParams) -> Result<LamSeries> {
    params.spec.validate()?;
    if params.d < 0 {
        return Err(Error::InvalidInput(format!("d = {} must be nonnegative", params.d)));
    }
    let base = z_inst(&params.spec, params.order)?;
    zhat_from_base(&base, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form(m: i64) -> ExpPoly {
        let mut terms = Vec::new();
        if m > 0 {
            for i in 1..m {
                for j in 1..=(m - i) {
                    terms.push((Exp::eps(-i as i32, -j as i32), Q::ONE));
                }
            }
        } else {
            for i in 0..=(-m - 1) {
                for j in 0..=(-m - 1 - i) {
                    terms.push((Exp::eps(i as i32, j as i32), Q::ONE));
                }
            }
        }
        ExpPoly::from_terms(terms)
    }

    #[test]
    fn h1_small_values() {
        assert!(h1_line_bundle_character(0).is_zero());
        assert!(h1_line_bundle_character(1).is_zero());
        assert_eq!(h1_line_bundle_character(2), ExpPoly::exp(Exp::eps(-1, -1)));
        let m2 = ExpPoly::from_terms([(Exp::eps(0, 0), Q::ONE), (Exp::eps(1, 0), Q::ONE), (Exp::eps(0, 1), Q::ONE)]);
        assert_eq!(h1_line_bundle_character(-2), m2);
    }

    #[test]
    fn h1_matches_closed_form() {
        for m in -6..=6 {
            assert_eq!(h1_line_bundle_character(m), closed_form(m), "m = {m}");
        }
    }

    #[test]
    fn k_vector_enumeration() {
        let ks = k_vectors(2, 0, 8);
        assert_eq!(ks, vec![vec![0, 0], vec![-1, 1], vec![1, -1]]);
        assert_eq!(k_vectors(2, 1, 8), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn l_factor_rank_formula() {
        for k in [vec![1, -1], vec![2, -1, -1], vec![3, 0, -2, 1]] {
            assert_eq!(l_factor_char(&k).rank(), Q::int(l_factor_rank(&k)));
        }
    }

    #[test]
    fn blowup_identity_low_orders() {
        for (r, order) in [(1usize, 6u32), (2, 8)] {
            for l in 0..=r as i32 {
                let spec = InsertionSpec::plain(r, l);
                let base = z_inst(&spec, order).unwrap();
                for d in 0..=r as i32 {
                    let p = BlowupParams { spec: spec.clone(), k: 0, d, order, convention: TauConvention::Scalar };
                    let zh = zhat_from_base(&base, &p).unwrap();
                    assert!(zh.equals(&base), "r={r} l={l} d={d}: {:?}", zh.mismatches(&base));
                }
            }
        }
    }
}
