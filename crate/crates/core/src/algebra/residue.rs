//! Residues in a single variable `ħ` and the change of variables `x = e^{-ħ} - 1`.

use super::coeff::Q;
use super::series::{Laurent, Ring};
use crate::error::Result;

/// Coefficient of `ħ^{-1}`.
pub fn residue_hbar<R: Ring>(x: &Laurent<R>) -> Result<R> {
    x.residue()
}

/// `(ħ - ω)^j` for nilpotent `ω`; exact for every integer `j`.
pub fn hbar_minus_pow<R: Ring>(omega: &R, j: i32) -> Result<Laurent<R>> {
    let base = Laurent::from_terms([(1, R::one()), (0, omega.neg())]);
    if j >= 0 {
        return Ok(base.pow(j as u32));
    }
    Ok(base.inv(0)?.pow((-j) as u32))
}

/// `f(e^{-ħ} - 1)` for `f` given as a series in `u = e^{-ħ} - 1`, known below `ħ^target`.
pub fn hbar_substitute<R: Ring>(f: &Laurent<R>, target: i32) -> Result<Laurent<R>> {
    let lo = f.valuation().unwrap_or(0).min(0);
    let g = Laurent::<R>::exp_linear(&Q::int(-1), target - lo + 3).sub(&Laurent::one());
    f.compose(&g, target)
}

/// `-f(x)/(1 + x)`, known below `x^target`.
///
/// Its `x`-residue equals the `ħ`-residue of `f(e^{-ħ} - 1)`.
pub fn x_transform<R: Ring>(f: &Laurent<R>, target: i32) -> Result<Laurent<R>> {
    let lo = f.valuation().unwrap_or(0).min(0);
    let geo = Laurent::from_terms((0..(target - lo).max(0)).map(|k| (k, R::from_q(&Q::int(if k % 2 == 0 { -1 } else { 1 })))))
        .truncate(target - lo);
    Ok(f.mul(&geo).truncate(target))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn via_hbar(f: &Laurent<Q>) -> Q {
        residue_hbar(&hbar_substitute(f, 1).unwrap()).unwrap()
    }

    fn via_x(f: &Laurent<Q>) -> Q {
        residue_hbar(&x_transform(f, 1).unwrap()).unwrap()
    }

    #[test]
    fn simple_residues() {
        assert_eq!(residue_hbar(&Laurent::monomial(Q::ONE, -1)).unwrap(), Q::ONE);
        assert_eq!(residue_hbar(&hbar_minus_pow(&Q::ZERO, -1).unwrap()).unwrap(), Q::ONE);
        assert_eq!(residue_hbar(&hbar_minus_pow(&Q::ZERO, -3).unwrap()).unwrap(), Q::ZERO);
    }

    #[test]
    fn both_parameterizations_agree() {
        let inv_u: Laurent<Q> = Laurent::monomial(Q::ONE, -1);
        assert_eq!(via_hbar(&inv_u), Q::int(-1));
        assert_eq!(via_x(&inv_u), Q::int(-1));
        for f in [Laurent::one(), Laurent::monomial(Q::ONE, 1)] {
            assert_eq!(via_hbar(&f), Q::ZERO);
            assert_eq!(via_x(&f), Q::ZERO);
        }
        let g: Laurent<Q> = Laurent::from_terms([(-3, Q::int(2)), (-2, Q::frac(-1, 3)), (-1, Q::int(5)), (2, Q::int(7))]);
        assert_eq!(via_hbar(&g), via_x(&g));
    }
}
