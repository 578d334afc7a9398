//! Normalized denominator factors.
//!
//! A polynomial supported on a single ray `{e0 + t·u}` is split into
//! cyclotomic pieces `Φ_n(e^u)`; anything else is kept whole. Every factor is
//! scaled so that its lexicographically largest term is `1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;

use super::coeff::Q;
use super::exppoly::{Exp, ExpPoly, MAX_VARS};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Factor {
    /// `y^{-φ(n)} Φ_n(y)` with `y = e^{dir}`, `dir` primitive and lex-positive.
    Cyclotomic { dir: Exp, order: u32 },
    /// A polynomial whose leading term is `1`.
    Poly(ExpPoly),
}

impl Factor {
    pub fn expand(&self) -> ExpPoly {
        match self {
            Factor::Cyclotomic { dir, order } => {
                let c = cyclotomic(*order);
                let phi = (c.len() - 1) as i32;
                ExpPoly::from_terms(
                    c.iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0)
                        .map(|(j, v)| (dir.scale(j as i32 - phi), Q::int(*v))),
                )
            }
            Factor::Poly(p) => p.clone(),
        }
    }

    /// True when the factor involves no Coulomb parameter.
    pub fn is_eps_only(&self) -> bool {
        match self {
            Factor::Cyclotomic { dir, .. } => dir.is_a_free(),
            Factor::Poly(p) => p.terms().iter().all(|(e, _)| e.is_a_free()),
        }
    }

    /// True when the factor involves no ε.
    pub fn is_a_only(&self) -> bool {
        match self {
            Factor::Cyclotomic { dir, .. } => dir.is_eps_free(),
            Factor::Poly(p) => p.terms().iter().all(|(e, _)| e.is_eps_free()),
        }
    }
}

/// Coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return c.clone();
    }
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let q = cyclotomic(d);
            p = div_int_poly(&p, &q).expect("cyclotomic divisor");
        }
    }
    let arc = Arc::new(p);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

fn div_int_poly(p: &[i64], d: &[i64]) -> Option<Vec<i64>> {
    let dl = *d.last()?;
    let mut rem = p.to_vec();
    let dn = d.len() - 1;
    if rem.len() < d.len() {
        return rem.iter().all(|&x| x == 0).then(Vec::new);
    }
    let mut q = vec![0i64; rem.len() - dn];
    for i in (0..q.len()).rev() {
        let c = rem[i + dn];
        if c % dl != 0 {
            return None;
        }
        let f = c / dl;
        q[i] = f;
        for (k, &dv) in d.iter().enumerate() {
            rem[i + k] -= f * dv;
        }
    }
    rem.iter().all(|&x| x == 0).then_some(q)
}

fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Rational univariate polynomial division; `None` if inexact.
fn div_q_poly(p: &[Q], d: &[i64]) -> Option<Vec<Q>> {
    let dn = d.len() - 1;
    if p.len() < d.len() {
        return None;
    }
    let dl = Q::int(*d.last()?);
    let mut rem = p.to_vec();
    let mut q = vec![Q::ZERO; p.len() - dn];
    for i in (0..q.len()).rev() {
        let f = rem[i + dn].div(&dl)?;
        if !f.is_zero() {
            for (k, &dv) in d.iter().enumerate() {
                if dv != 0 {
                    rem[i + k] = rem[i + k].sub(&f.mul(&Q::int(dv)));
                }
            }
        }
        q[i] = f;
    }
    rem.iter().all(Q::is_zero).then_some(q)
}

fn content(e: &Exp) -> i32 {
    e.0.iter().fold(0i32, |g, &x| g.gcd(&x))
}

/// Direction and integer positions of a ray-supported polynomial.
fn ray_of(p: &ExpPoly) -> Option<(Exp, Exp, Vec<(i32, Q)>)> {
    let terms = p.terms();
    let base = terms[0].0;
    let first = terms.iter().map(|(e, _)| e.sub(&base)).find(|d| !d.is_zero())?;
    let g = content(&first);
    let mut prim = Exp(first.0.map(|x| x / g));
    if prim.lex_sign() < 0 {
        prim = prim.neg();
    }
    let k = (0..MAX_VARS).find(|&k| prim.0[k] != 0)?;
    let mut pos = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        let d = e.sub(&base);
        if d.0[k] % prim.0[k] != 0 {
            return None;
        }
        let t = d.0[k] / prim.0[k];
        if prim.scale(t) != d {
            return None;
        }
        pos.push((t, c.clone()));
    }
    // Prefer the integral step `4·prim` whenever every position allows it.
    if pos.iter().all(|(t, _)| t % 4 == 0) {
        prim = prim.scale(4);
        for (t, _) in pos.iter_mut() {
            *t /= 4;
        }
    }
    Some((base, prim, pos))
}

/// Factors a nonzero polynomial as `unit · Π factor^mult`.
///
/// The unit is the leading term of `p`.
pub fn factorize(p: &ExpPoly) -> ((Exp, Q), Vec<(Factor, u32)>) {
    let (lead_e, lead_c) = p.leading().expect("factorize of zero").clone();
    if p.len() == 1 {
        return ((lead_e, lead_c), Vec::new());
    }
    let unit = (lead_e, lead_c.clone());
    let Some((_, dir, pos)) = ray_of(p) else {
        let normalized = p.mul_term(&lead_e.neg(), &lead_c.inv().expect("nonzero"));
        return (unit, vec![(Factor::Poly(normalized), 1)]);
    };
    let tmin = pos.iter().map(|(t, _)| *t).min().unwrap();
    let tmax = pos.iter().map(|(t, _)| *t).max().unwrap();
    let mut poly = vec![Q::ZERO; (tmax - tmin) as usize + 1];
    for (t, c) in pos {
        poly[(t - tmin) as usize] = c;
    }
    let mut factors: Vec<(Factor, u32)> = Vec::new();
    let mut try_order = |n: u32, poly: &mut Vec<Q>| {
        let c = cyclotomic(n);
        let mut mult = 0;
        while poly.len() >= c.len() {
            match div_q_poly(poly, &c) {
                Some(q) => {
                    *poly = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            factors.push((Factor::Cyclotomic { dir, order: n }, mult));
        }
    };
    let deg = (poly.len() - 1) as u32;
    let binomial = poly.iter().skip(1).take(poly.len() - 2).all(Q::is_zero);
    if binomial && poly[0] == poly[deg as usize].neg() {
        for n in 1..=deg {
            if deg.is_multiple_of(n) {
                try_order(n, &mut poly);
            }
        }
    } else if binomial && poly[0] == poly[deg as usize] {
        for n in 1..=2 * deg {
            if (2 * deg).is_multiple_of(n) && !deg.is_multiple_of(n) {
                try_order(n, &mut poly);
            }
        }
    } else {
        let bound = 2 * deg * deg + 2;
        for n in 1..=bound {
            if poly.len() <= 1 {
                break;
            }
            if (euler_phi(n) as usize) < poly.len() {
                try_order(n, &mut poly);
            }
        }
    }
    if poly.len() > 1 {
        let rest = ExpPoly::from_terms(
            poly.iter().enumerate().map(|(j, c)| (dir.scale(j as i32), c.clone())),
        );
        let (le, lc) = rest.leading().unwrap().clone();
        let normalized = rest.mul_term(&le.neg(), &lc.inv().expect("nonzero"));
        factors.push((Factor::Poly(normalized), 1));
    }
    factors.sort();
    (unit, factors)
}
