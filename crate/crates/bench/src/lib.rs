//! Fixed workloads shared by the benchmarks.

use nekrasov_core::identities::{check_blowup_eq, CheckReport};
use nekrasov_core::instanton::z_inst;
use nekrasov_core::wallcross::example_blowup_coeff;
use nekrasov_core::{InsertionSpec, LamSeries, Q, Result};

pub fn plane_series(r: usize, l: i32, order: u32) -> Result<LamSeries> {
    z_inst(&InsertionSpec::plain(r, l), order)
}

pub fn plane_series_with_tau(r: usize, p: i32, order: u32) -> Result<LamSeries> {
    z_inst(&InsertionSpec::with_taus(r, 0, vec![p], 1), order)
}

pub fn blowup_check(r: usize, l: i32, d: i32, order: u32) -> Result<CheckReport> {
    check_blowup_eq(r, l, d, order)
}

/// All values of the worked wall-crossing example up to rank `max_r`.
pub fn wallcross_sweep(max_r: u32) -> Result<Vec<Q>> {
    let mut out = Vec::new();
    for r in 1..=max_r {
        for nf in 0..2 * r {
            out.push(example_blowup_coeff(r, nf)?);
        }
    }
    Ok(out)
}
