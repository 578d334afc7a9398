//! Text and JSON records for fractions and series.
//!
//! A machine line reads `lambda=<n>\tins=<monomial>\tnum=<poly>\tden=<factors>`
//! where `<factors>` is `1` or `(<poly>)^<m>` items joined by ` ; `.

use serde::{Deserialize, Serialize};

use crate::algebra::{Denominator, Exp, ExpPoly, LamSeries, Monomial, RatFrac, MAX_VARS, Q};
use crate::error::{Error, Result};

const FACTOR_SEP: &str = " ; ";

pub fn den_text(d: &Denominator) -> String {
    if d.is_one() {
        return "1".into();
    }
    let parts: Vec<String> = d.factors().iter().map(|(f, m)| format!("({})^{m}", f.expand())).collect();
    parts.join(FACTOR_SEP)
}

pub fn parse_den(s: &str) -> Result<Vec<(ExpPoly, u32)>> {
    let s = s.trim();
    if s == "1" {
        return Ok(Vec::new());
    }
    s.split(FACTOR_SEP)
        .map(|item| {
            let item = item.trim();
            let cut = item.rfind(")^").ok_or_else(|| Error::Parse(format!("bad factor `{item}`")))?;
            let body = item
                .get(1..cut)
                .filter(|_| item.starts_with('('))
                .ok_or_else(|| Error::Parse(format!("bad factor `{item}`")))?;
            let m = item[cut + 2..].parse::<u32>().map_err(|_| Error::Parse(format!("bad multiplicity in `{item}`")))?;
            Ok((ExpPoly::parse(body)?, m))
        })
        .collect()
}

/// Rebuilds a fraction from its numerator and its denominator factors.
pub fn frac_from_factors(num: ExpPoly, factors: &[(ExpPoly, u32)]) -> Result<RatFrac> {
    let mut dens = Vec::new();
    for (f, m) in factors {
        for _ in 0..*m {
            dens.push(f.clone());
        }
    }
    Ok(RatFrac::one_over(&dens)?.mul_poly(&num))
}

pub fn parse_frac(num: &str, den: &str) -> Result<RatFrac> {
    frac_from_factors(ExpPoly::parse(num)?, &parse_den(den)?)
}

pub fn machine_line(n: u32, m: &Monomial, c: &RatFrac) -> String {
    format!("lambda={n}\tins={m}\tnum={}\tden={}", c.num(), den_text(c.den()))
}

/// One machine line per stored coefficient, in key order.
pub fn series_lines(s: &LamSeries) -> Vec<String> {
    s.iter().map(|((n, m), c)| machine_line(*n, m, c)).collect()
}

pub fn parse_machine_line(line: &str) -> Result<(u32, Monomial, RatFrac)> {
    let mut fields = [None; 4];
    for part in line.split('\t') {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("bad field `{part}`")))?;
        let slot = match k {
            "lambda" => 0,
            "ins" => 1,
            "num" => 2,
            "den" => 3,
            _ => return Err(Error::Parse(format!("unknown field `{k}`"))),
        };
        fields[slot] = Some(v);
    }
    let get = |i: usize| fields[i].ok_or_else(|| Error::Parse(format!("missing field in `{line}`")));
    let n = get(0)?.parse::<u32>().map_err(|_| Error::Parse(format!("bad Λ exponent in `{line}`")))?;
    let m = Monomial::parse(get(1)?)?;
    Ok((n, m, parse_frac(get(2)?, get(3)?)?))
}

pub fn parse_series(order: u32, degree: u32, lines: &[&str]) -> Result<LamSeries> {
    let mut s = LamSeries::new(order, degree);
    for line in lines.iter().filter(|l| !l.trim().is_empty()) {
        let (n, m, c) = parse_machine_line(line)?;
        s.set(n, m, c);
    }
    Ok(s)
}

/// `(exponent tuple, coefficient)` with exponents as reduced fractions.
pub type TermRecord = (Vec<String>, String);

fn terms_record(p: &ExpPoly) -> Vec<TermRecord> {
    p.terms()
        .iter()
        .map(|(e, c)| ((0..MAX_VARS).map(|k| e.coord(k).to_string()).collect(), c.to_string()))
        .collect()
}

fn poly_from_record(terms: &[TermRecord]) -> Result<ExpPoly> {
    let mut out = Vec::with_capacity(terms.len());
    for (coords, c) in terms {
        if coords.len() != MAX_VARS {
            return Err(Error::Parse(format!("exponent tuple of length {}", coords.len())));
        }
        let parsed = coords
            .iter()
            .enumerate()
            .map(|(k, x)| x.parse::<Q>().map(|q| (k, q)).map_err(|e| Error::Parse(e.0)))
            .collect::<Result<Vec<_>>>()?;
        let coeff = c.parse::<Q>().map_err(|e| Error::Parse(e.0))?;
        out.push((Exp::from_rationals(&parsed)?, coeff));
    }
    Ok(ExpPoly::from_terms(out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FracRecord {
    pub num_terms: Vec<TermRecord>,
    /// Expanded denominator.
    pub den_terms: Vec<TermRecord>,
    pub den_factors: Vec<(Vec<TermRecord>, u32)>,
}

impl FracRecord {
    pub fn from_frac(x: &RatFrac) -> Self {
        FracRecord {
            num_terms: terms_record(x.num()),
            den_terms: terms_record(&x.denominator()),
            den_factors: x.den().factors().iter().map(|(f, m)| (terms_record(&f.expand()), *m)).collect(),
        }
    }

    /// Rebuilds the fraction and checks the factors against the expanded denominator.
    pub fn to_frac(&self) -> Result<RatFrac> {
        let factors = self
            .den_factors
            .iter()
            .map(|(t, m)| poly_from_record(t).map(|p| (p, *m)))
            .collect::<Result<Vec<_>>>()?;
        let expanded = ExpPoly::product(factors.iter().map(|(p, m)| p.pow(*m)).collect::<Vec<_>>().iter());
        if expanded != poly_from_record(&self.den_terms)? {
            return Err(Error::Parse("denominator factors disagree with den_terms".into()));
        }
        frac_from_factors(poly_from_record(&self.num_terms)?, &factors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub order: u32,
    pub degree: u32,
    pub coeffs: Vec<(u32, String, FracRecord)>,
}

impl SeriesRecord {
    pub fn from_series(s: &LamSeries) -> Self {
        SeriesRecord {
            order: s.order(),
            degree: s.degree(),
            coeffs: s.iter().map(|((n, m), c)| (*n, m.to_string(), FracRecord::from_frac(c))).collect(),
        }
    }

    pub fn to_series(&self) -> Result<LamSeries> {
        let mut s = LamSeries::new(self.order, self.degree);
        for (n, m, c) in &self.coeffs {
            s.set(*n, Monomial::parse(m)?, c.to_frac()?);
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instanton::{z_inst, InsertionSpec};

    #[test]
    fn machine_lines_round_trip() {
        let z = z_inst(&InsertionSpec::with_taus(2, 1, vec![1, -1], 1), 4).unwrap();
        let lines = series_lines(&z);
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let back = parse_series(4, 1, &refs).unwrap();
        assert_eq!(back, z);
        assert_eq!(series_lines(&back), lines);
    }

    #[test]
    fn json_round_trip() {
        let z = z_inst(&InsertionSpec::plain(1, 0), 4).unwrap();
        let rec = SeriesRecord::from_series(&z);
        let back = SeriesRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_series().unwrap(), z);
    }

    #[test]
    fn inconsistent_record_is_rejected() {
        let x = RatFrac::new(ExpPoly::one(), &ExpPoly::one_minus(Exp::eps(1, 0))).unwrap();
        let mut rec = FracRecord::from_frac(&x);
        rec.den_terms.pop();
        assert!(rec.to_frac().is_err());
    }
}
