//! Graded and bigraded commutative algebra over exact fields.
//!
//! The crate computes Castelnuovo–Mumford regularity three ways (minimal free resolutions,
//! Koszul homology, and graded duality against `S(-n)`), studies the regularity of powers
//! `reg(I^v M)` and tests the linear-powers criterion through Rees algebras.

pub mod asymptotics;
pub mod error;
pub mod field;
pub mod gb;
pub mod koszul;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod rees;
pub mod resolve;
pub mod slices;

pub use error::{AlgebraError, Result};
pub use field::{FieldOp, FieldSpec, FieldValue};
pub use par::Exec;
pub use poly::{FreeModuleSpec, ModuleVector, Monomial, MonomialOrder, Multidegree, Polynomial, RingSpec};

/// Seed for randomized checks, read from `REGKIT_SEED` (default 20241015).
pub fn seed_from_env() -> u64 {
    std::env::var("REGKIT_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20241015)
}

/// An integer or `-inf`; used for regularities of zero modules and for `rho`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
}

impl ExtInt {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(v) => Some(v),
            ExtInt::NegInf => None,
        }
    }

    pub fn add(self, k: i64) -> ExtInt {
        match self {
            ExtInt::Finite(v) => ExtInt::Finite(v + k),
            ExtInt::NegInf => ExtInt::NegInf,
        }
    }
}

impl std::fmt::Display for ExtInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtInt::Finite(v) => write!(f, "{v}"),
            ExtInt::NegInf => write!(f, "-inf"),
        }
    }
}

impl serde::Serialize for ExtInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtInt::Finite(v) => s.serialize_i64(*v),
            ExtInt::NegInf => s.serialize_str("-inf"),
        }
    }
}
