//! Young diagrams, tuples of diagrams and cell statistics.
//!
//! Cells are `(i, j)` with 1-based row `i` and column `j`. Arm and leg
//! lengths may be taken relative to any diagram, in which case they can be
//! negative.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct YoungDiagram {
    rows: Vec<u32>,
}

/// Arm, leg, co-arm and co-leg of a cell.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CellStats {
    pub arm: i64,
    pub leg: i64,
    pub arm_co: i64,
    pub leg_co: i64,
}

impl YoungDiagram {
    pub fn empty() -> Self {
        YoungDiagram { rows: Vec::new() }
    }

    /// Builds from row lengths; they must be weakly decreasing. Trailing zeros are dropped.
    pub fn new(rows: Vec<u32>) -> Result<Self> {
        let mut rows = rows;
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("rows {rows:?} are not weakly decreasing")));
        }
        Ok(YoungDiagram { rows })
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn size(&self) -> u32 {
        self.rows.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `λ_i`, zero past the last row.
    pub fn row_len(&self, i: i64) -> i64 {
        if i >= 1 && (i as usize) <= self.rows.len() {
            self.rows[i as usize - 1] as i64
        } else {
            0
        }
    }

    /// `λ'_j`, the length of column `j`.
    pub fn col_len(&self, j: i64) -> i64 {
        if j < 1 {
            return 0;
        }
        self.rows.iter().take_while(|&&r| r as i64 >= j).count() as i64
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        i >= 1 && j >= 1 && j <= self.row_len(i)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (1..=len as i64).map(move |j| (i as i64 + 1, j)))
    }

    /// Arm of cell `s` measured in this diagram: `λ_i - j`.
    pub fn arm(&self, s: (i64, i64)) -> i64 {
        self.row_len(s.0) - s.1
    }

    /// Leg of cell `s` measured in this diagram: `λ'_j - i`.
    pub fn leg(&self, s: (i64, i64)) -> i64 {
        self.col_len(s.1) - s.0
    }

    pub fn cell_stats(&self, s: (i64, i64)) -> Result<CellStats> {
        if !self.contains(s.0, s.1) {
            return Err(Error::CellOutOfDiagram(s));
        }
        Ok(self.cell_stats_in(self, s))
    }

    /// Statistics of a cell of `self` with arm and leg measured in `other`.
    pub fn cell_stats_in(&self, other: &YoungDiagram, s: (i64, i64)) -> CellStats {
        CellStats { arm: other.arm(s), leg: other.leg(s), arm_co: s.1 - 1, leg_co: s.0 - 1 }
    }

    pub fn conjugate(&self) -> YoungDiagram {
        let width = self.rows.first().copied().unwrap_or(0) as i64;
        YoungDiagram { rows: (1..=width).map(|j| self.col_len(j) as u32).collect() }
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for YoungDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(YoungDiagram::empty());
        }
        let rows = s
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad row `{x}`"))))
            .collect::<Result<Vec<_>>>()?;
        if rows.contains(&0) {
            return Err(Error::Parse(format!("zero row in `{s}`")));
        }
        YoungDiagram::new(rows)
    }
}

/// An `r`-tuple of Young diagrams labelling a torus fixed point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YoungTuple(pub Vec<YoungDiagram>);

impl YoungTuple {
    pub fn empty(r: usize) -> Self {
        YoungTuple(vec![YoungDiagram::empty(); r])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().map(YoungDiagram::size).sum()
    }

    pub fn diagrams(&self) -> &[YoungDiagram] {
        &self.0
    }
}

impl fmt::Display for YoungTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|y| y.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl fmt::Debug for YoungTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for YoungTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(YoungTuple(s.split(';').map(str::parse).collect::<Result<Vec<_>>>()?))
    }
}

/// Partitions of `n` in lexicographic order of their row vectors.
pub fn partitions(n: u32) -> Vec<YoungDiagram> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<YoungDiagram>) {
        if n == 0 {
            out.push(YoungDiagram { rows: prefix.clone() });
            return;
        }
        for part in 1..=max.min(n) {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Weak compositions of `n` into `r` parts, lexicographically ordered.
pub fn compositions(n: u32, r: usize) -> Vec<Vec<u32>> {
    if r == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, r - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All `r`-tuples with total size `n`: compositions first, then partitions per part.
pub fn enumerate_tuples(r: usize, n: u32) -> Vec<YoungTuple> {
    let mut out = Vec::new();
    for comp in compositions(n, r) {
        let mut acc: Vec<Vec<YoungDiagram>> = vec![Vec::new()];
        for &k in &comp {
            let ps = partitions(k);
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    ps.iter().map(move |p| {
                        let mut v = prefix.clone();
                        v.push(p.clone());
                        v
                    })
                })
                .collect();
        }
        out.extend(acc.into_iter().map(YoungTuple));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_counts() {
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(enumerate_tuples(2, 2).len(), 5);
        assert_eq!(enumerate_tuples(3, 0), vec![YoungTuple::empty(3)]);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let p: Vec<String> = partitions(3).iter().map(|y| y.to_string()).collect();
        assert_eq!(p, vec!["1,1,1", "2,1", "3"]);
        let t: Vec<String> = enumerate_tuples(2, 1).iter().map(|y| y.to_string()).collect();
        assert_eq!(t, vec!["-;1", "1;-"]);
    }

    #[test]
    fn relative_arm_leg_can_be_negative() {
        let y = YoungDiagram::empty();
        let s = (1, 1);
        assert_eq!((y.arm(s), y.leg(s)), (-1, -1));
        let z: YoungDiagram = "3,1".parse().unwrap();
        assert_eq!(z.cell_stats((1, 2)).unwrap(), CellStats { arm: 1, leg: 0, arm_co: 1, leg_co: 0 });
        assert_eq!(z.cell_stats((2, 1)).unwrap(), CellStats { arm: 0, leg: 0, arm_co: 0, leg_co: 1 });
        let one: YoungDiagram = "1".parse().unwrap();
        let st = one.cell_stats_in(&y, s);
        assert_eq!((st.arm, st.leg), (-1, -1));
    }

    #[test]
    fn unrelativized_stats_need_a_cell() {
        let y: YoungDiagram = "2,1".parse().unwrap();
        assert_eq!(y.cell_stats((1, 1)).unwrap(), CellStats { arm: 1, leg: 1, arm_co: 0, leg_co: 0 });
        assert_eq!(y.cell_stats((2, 2)), Err(Error::CellOutOfDiagram((2, 2))));
        assert!(YoungDiagram::empty().cell_stats((1, 1)).is_err());
    }

    /// Coefficients of `Π_k (1 - q^k)^{-r}` by direct series multiplication.
    fn colored_counts(r: usize, max: usize) -> Vec<u64> {
        let mut c = vec![0u64; max + 1];
        c[0] = 1;
        for _ in 0..r {
            for k in 1..=max {
                for n in k..=max {
                    c[n] += c[n - k];
                }
            }
        }
        c
    }

    #[test]
    fn tuple_counts_match_generating_function() {
        for r in 1..=3 {
            let want = colored_counts(r, 6);
            for n in 0..=6u32 {
                let tuples = enumerate_tuples(r, n);
                assert_eq!(tuples.len() as u64, want[n as usize], "r = {r}, n = {n}");
                let mut sorted = tuples.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), tuples.len());
                assert!(tuples.iter().all(|t| t.size() == n && t.rank() == r));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let t: YoungTuple = "2,1;-;1".parse().unwrap();
        assert_eq!(t.to_string(), "2,1;-;1");
        assert_eq!(t.size(), 4);
        assert!("1,2".parse::<YoungDiagram>().is_err());
    }

    proptest! {
        #[test]
        fn hooks_and_conjugation(n in 0u32..9, pick in 0usize..1000) {
            let ps = partitions(n);
            let y = &ps[pick % ps.len()];
            prop_assert_eq!(y.conjugate().conjugate(), y.clone());
            prop_assert_eq!(y.cells().count() as u32, n);
            for s in y.cells() {
                let st = y.cell_stats(s).unwrap();
                prop_assert!(st.arm >= 0 && st.leg >= 0);
                prop_assert_eq!(st.arm + st.arm_co + 1, y.row_len(s.0));
                prop_assert_eq!(st.leg + st.leg_co + 1, y.col_len(s.1));
                let t = (s.1, s.0);
                prop_assert_eq!(y.conjugate().arm(t), st.leg);
            }
        }
    }
}
