pub mod coeff;
pub mod epsexp;
pub mod exppoly;
pub mod factor;
pub mod lamseries;
pub mod ratfrac;
pub mod residue;
pub mod series;
mod subst;

pub use coeff::Q;
pub use epsexp::{eps_limit, expand_eps_series};
pub use exppoly::{a_var, Exp, ExpPoly, EPS1, EPS2, MAX_RANK, MAX_VARS};
pub use lamseries::{InsVar, LamSeries, Monomial};
pub use ratfrac::{frac_equal, Denominator, EqualityMode, RatFrac};
pub use residue::{hbar_minus_pow, hbar_substitute, residue_hbar, x_transform};
pub use series::{Laurent, Ring};
pub use subst::LinearMap;
