//! Expansion in `ε1` along the line `ε2 = c ε1`.
//!
//! Every `e^{x ε1 + y ε2 + A}` becomes `e^A · exp((x + c y) ε1)` expanded as a
//! power series; coefficients are fractions in the Coulomb exponentials only.

use std::collections::BTreeMap;

use super::coeff::Q;
use super::exppoly::{Exp, ExpPoly, EPS1, EPS2};
use super::ratfrac::RatFrac;
use super::series::Laurent;
use crate::error::{Error, Result};

fn strip_eps(e: &Exp) -> Exp {
    let mut out = *e;
    out.0[EPS1] = 0;
    out.0[EPS2] = 0;
    out
}

/// Slope of `e^{x ε1 + y ε2}` in `ε1` after `ε2 = c ε1`.
fn slope(e: &Exp, c: &Q) -> Q {
    e.coord(EPS1).add(&c.mul(&e.coord(EPS2)))
}

/// Power series of an exponential polynomial, known below `ε1^prec`.
fn poly_series(p: &ExpPoly, c: &Q, prec: i32) -> Laurent<RatFrac> {
    let mut by_power: BTreeMap<i32, Vec<(Exp, Q)>> = BTreeMap::new();
    for (e, coeff) in p.terms() {
        let s = slope(e, c);
        let a = strip_eps(e);
        let mut term = coeff.clone();
        for j in 0..prec.max(0) {
            if j > 0 {
                term = term.mul(&s).mul(&Q::frac(1, j as i64));
            }
            if term.is_zero() {
                break;
            }
            by_power.entry(j).or_default().push((a, term.clone()));
        }
    }
    let terms = by_power
        .into_iter()
        .map(|(j, ts)| (j, RatFrac::from_poly(ExpPoly::from_terms(ts))));
    Laurent::from_terms(terms).truncate(prec)
}

/// Valuation of an exponential polynomial along the line, or `None` if it
/// vanishes identically there.
fn poly_valuation(p: &ExpPoly, c: &Q) -> Option<i32> {
    let bound = p.len() as i32;
    let s = poly_series(p, c, bound + 1);
    s.valuation()
}

/// Laurent expansion of `x` in `ε1` with `ε2 = c ε1`, known through `ε1^order`.
pub fn expand_eps_series(x: &RatFrac, c: &Q, order: i32) -> Result<Laurent<RatFrac>> {
    if c.is_zero() {
        return Err(Error::InvalidInput("direction c must be nonzero".into()));
    }
    let mut vd = 0;
    let mut factors = Vec::new();
    for (f, m) in x.den().factors() {
        let fp = f.expand();
        let v = poly_valuation(&fp, c).ok_or_else(|| {
            Error::DivisionByZero(format!("factor {fp} vanishes on the line ε2 = {c} ε1"))
        })?;
        vd += v * *m as i32;
        factors.push((fp, v, *m));
    }
    let width = order + vd + 1;
    let num = poly_series(x.num(), c, width + vd);
    let mut den: Laurent<RatFrac> = Laurent::one();
    for (fp, v, m) in &factors {
        let fs = poly_series(fp, c, width + v);
        for _ in 0..*m {
            den = den.mul(&fs);
        }
    }
    let inv = den.inv(order + 1)?;
    Ok(num.mul(&inv).truncate(order + 1))
}

/// Value at `ε1 = ε2 = 0` along `ε2 = c ε1`; any negative power is a pole.
pub fn eps_limit(x: &RatFrac, c: &Q) -> Result<RatFrac> {
    let s = expand_eps_series(x, c, 0)?;
    if let Some(v) = s.valuation() {
        if v < 0 {
            return Err(Error::PoleDetected { order: -v as i64, context: format!("direction c = {c}") });
        }
    }
    s.coeff(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exppoly::a_var;

    #[test]
    fn geometric_pole() {
        let x = RatFrac::new(ExpPoly::one(), &ExpPoly::one_minus(Exp::eps(-1, 0))).unwrap();
        let s = expand_eps_series(&x, &Q::int(-2), 1).unwrap();
        assert_eq!(s.valuation(), Some(-1));
        assert!(s.coeff(-1).unwrap().equals(&RatFrac::one()));
        assert!(s.coeff(0).unwrap().equals(&RatFrac::constant(Q::frac(1, 2))));
        assert!(matches!(eps_limit(&x, &Q::int(3)), Err(Error::PoleDetected { order: 1, .. })));
    }

    #[test]
    fn coulomb_part_is_kept() {
        let x = RatFrac::from_poly(ExpPoly::exp(Exp::unit(a_var(0)).add(&Exp::eps(1, 0))));
        let s = expand_eps_series(&x, &Q::int(5), 1).unwrap();
        let ea = RatFrac::from_poly(ExpPoly::exp(Exp::unit(a_var(0))));
        assert!(s.coeff(0).unwrap().equals(&ea));
        assert!(s.coeff(1).unwrap().equals(&ea));
    }

    #[test]
    fn one_instanton_measure_limit() {
        // ε1 ε2 e^{-(ε1+ε2)/2} / ((1-e^{-ε1})(1-e^{-ε2})) → 1.
        let d = ExpPoly::one_minus(Exp::eps(-1, 0)).mul(&ExpPoly::one_minus(Exp::eps(0, -1)));
        let x = RatFrac::new(ExpPoly::exp(Exp::quarters(EPS1, -2).add(&Exp::quarters(EPS2, -2))), &d).unwrap();
        for c in [Q::int(-2), Q::frac(-1, 2), Q::int(3)] {
            let s = expand_eps_series(&x, &c, 2).unwrap().shift(2).scale(&RatFrac::constant(c.clone()));
            assert!(s.coeff(0).unwrap().equals(&RatFrac::one()), "c = {c}");
        }
    }
}
