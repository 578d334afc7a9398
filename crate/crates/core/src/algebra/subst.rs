//! Linear changes of the exponent basis.

use super::coeff::Q;
use super::exppoly::{a_var, Exp, ExpPoly, EPS1, EPS2, MAX_VARS};
use super::ratfrac::RatFrac;
use crate::error::{Error, Result};

/// A linear endomorphism of the symbol space, given by the image of each symbol.
///
/// Entries are rational; the image of every exponent must stay on the
/// quarter lattice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMap {
    /// `cols[j]` is the image of symbol `j` as rational coordinates.
    cols: [[Q; MAX_VARS]; MAX_VARS],
    den: i64,
    int: [[i64; MAX_VARS]; MAX_VARS],
}

impl Default for LinearMap {
    fn default() -> Self {
        LinearMap::identity()
    }
}

impl LinearMap {
    pub fn identity() -> Self {
        let mut cols: [[Q; MAX_VARS]; MAX_VARS] = Default::default();
        for (j, col) in cols.iter_mut().enumerate() {
            col[j] = Q::ONE;
        }
        let mut m = LinearMap { cols, den: 1, int: [[0; MAX_VARS]; MAX_VARS] };
        m.refresh();
        m
    }

    /// Sets the image of symbol `var` to `Σ q · symbol`.
    pub fn with_image(mut self, var: usize, image: &[(usize, Q)]) -> Self {
        let mut col: [Q; MAX_VARS] = Default::default();
        for (v, q) in image {
            col[*v] = col[*v].add(q);
        }
        self.cols[var] = col;
        self.refresh();
        self
    }

    fn refresh(&mut self) {
        let mut den = num_bigint::BigInt::from(1);
        for col in &self.cols {
            for q in col {
                let d = q.denom();
                den = num_integer::Integer::lcm(&den, &d);
            }
        }
        self.den = num_traits::ToPrimitive::to_i64(&den).expect("small denominators");
        let dq = Q::int(self.den);
        for j in 0..MAX_VARS {
            for i in 0..MAX_VARS {
                self.int[i][j] = self.cols[j][i].mul(&dq).as_i64().expect("integral after scaling");
            }
        }
    }

    pub fn apply(&self, e: &Exp) -> Result<Exp> {
        let mut out = [0i32; MAX_VARS];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc: i64 = 0;
            for j in 0..MAX_VARS {
                if e.0[j] != 0 {
                    acc += self.int[i][j] * e.0[j] as i64;
                }
            }
            if acc % self.den != 0 {
                return Err(Error::LatticeOverflow(format!("image of {e:?} under substitution")));
            }
            *slot = i32::try_from(acc / self.den)
                .map_err(|_| Error::LatticeOverflow("exponent out of range".into()))?;
        }
        Ok(Exp(out))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let mut m = LinearMap::identity();
        for j in 0..MAX_VARS {
            let mut col: [Q; MAX_VARS] = Default::default();
            for k in 0..MAX_VARS {
                let c = &other.cols[j][k];
                if c.is_zero() {
                    continue;
                }
                for (i, slot) in col.iter_mut().enumerate() {
                    *slot = slot.add(&c.mul(&self.cols[k][i]));
                }
            }
            m.cols[j] = col;
        }
        m.refresh();
        m
    }

    /// Blow-up chart `(ε1, ε2, a) ↦ (ε1, ε2 - ε1, a + k ε1)`.
    pub fn patch1(k: &[i64]) -> LinearMap {
        let mut m = LinearMap::identity().with_image(EPS2, &[(EPS2, Q::ONE), (EPS1, Q::int(-1))]);
        for (alpha, &ka) in k.iter().enumerate() {
            m = m.with_image(a_var(alpha), &[(a_var(alpha), Q::ONE), (EPS1, Q::int(ka))]);
        }
        m
    }

    /// Blow-up chart `(ε1, ε2, a) ↦ (ε1 - ε2, ε2, a + k ε2)`.
    pub fn patch2(k: &[i64]) -> LinearMap {
        let mut m = LinearMap::identity().with_image(EPS1, &[(EPS1, Q::ONE), (EPS2, Q::int(-1))]);
        for (alpha, &ka) in k.iter().enumerate() {
            m = m.with_image(a_var(alpha), &[(a_var(alpha), Q::ONE), (EPS2, Q::int(ka))]);
        }
        m
    }

    /// `(ε1, ε2) ↦ (x1 ε1, x2 ε1)`, Coulomb parameters fixed.
    pub fn eps_line(x1: Q, x2: Q) -> LinearMap {
        LinearMap::identity()
            .with_image(EPS1, &[(EPS1, x1)])
            .with_image(EPS2, &[(EPS1, x2)])
    }

    /// `a_r ↦ -(a_1 + … + a_{r-1})`.
    pub fn traceless(rank: usize) -> LinearMap {
        let image: Vec<(usize, Q)> = (0..rank - 1).map(|b| (a_var(b), Q::int(-1))).collect();
        LinearMap::identity().with_image(a_var(rank - 1), &image)
    }

    /// `w ↦ -w` on every symbol.
    pub fn negation() -> LinearMap {
        let mut m = LinearMap::identity();
        for v in 0..MAX_VARS {
            m = m.with_image(v, &[(v, Q::int(-1))]);
        }
        m
    }
}

impl ExpPoly {
    pub fn substitute(&self, map: &LinearMap) -> Result<ExpPoly> {
        self.try_map_exp(|e| map.apply(e))
    }
}

impl RatFrac {
    pub fn substitute(&self, map: &LinearMap) -> Result<RatFrac> {
        self.try_map_exp(|e| map.apply(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patch_maps_compose_to_identity_on_eps() {
        let inv = LinearMap::identity().with_image(EPS2, &[(EPS2, Q::ONE), (EPS1, Q::ONE)]);
        let m = inv.compose(&LinearMap::patch1(&[0, 0]));
        let e = Exp::eps(3, -2);
        assert_eq!(m.apply(&e).unwrap(), e);
    }

    #[test]
    fn patch_shifts_coulomb() {
        let m = LinearMap::patch1(&[1, -1]);
        let e = Exp::unit(a_var(0));
        assert_eq!(m.apply(&e).unwrap(), Exp::unit(a_var(0)).add(&Exp::eps(1, 0)));
        let f = Exp::eps(0, 1);
        assert_eq!(m.apply(&f).unwrap(), Exp::eps(-1, 1));
    }

    #[test]
    fn off_lattice_is_reported() {
        let m = LinearMap::eps_line(Q::ONE, Q::frac(1, 8));
        assert!(matches!(m.apply(&Exp::eps(0, 1)), Err(Error::LatticeOverflow(_))));
        assert_eq!(m.apply(&Exp::eps(0, 2)).unwrap(), Exp::quarters(EPS1, 1));
    }

    #[test]
    fn substitution_into_fraction() {
        let x = RatFrac::new(ExpPoly::one(), &ExpPoly::one_minus(Exp::eps(1, 1))).unwrap();
        let y = x.substitute(&LinearMap::eps_line(Q::int(2), Q::int(-1))).unwrap();
        let z = RatFrac::new(ExpPoly::one(), &ExpPoly::one_minus(Exp::eps(1, 0))).unwrap();
        assert!(y.equals(&z));
        let bad = LinearMap::eps_line(Q::ONE, Q::int(-1));
        assert!(matches!(x.substitute(&bad), Err(Error::DivisionByZero(_))));
    }
}
