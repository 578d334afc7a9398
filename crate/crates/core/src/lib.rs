//! Exact K-theoretic instanton partition functions on the plane and its
//! blow-up, with executable blow-up equations and wall-crossing kernels.

pub mod algebra;
pub mod blowup;
pub mod error;
pub mod format;
pub mod identities;
pub mod instanton;
pub mod partitions;
pub mod wallcross;

pub use algebra::{Exp, ExpPoly, InsVar, LamSeries, Monomial, RatFrac, Q};
pub use blowup::{BlowupParams, TauConvention};
pub use error::{Error, Result};
pub use identities::{CheckParams, CheckReport, Verdict};
pub use instanton::{ExtraClass, InsertionSpec};
pub use partitions::{YoungDiagram, YoungTuple};
pub use wallcross::{ClassData, RingElem, TruncRing};
