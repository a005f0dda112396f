//! Plane trinomial curves: closed-form Hilbert-Kunz data, the two refinement
//! counterexamples, and a brute-force colength oracle.

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::hn::HnError;

pub mod examples;
pub mod oracle;
pub mod trinomial;

pub use examples::{monsky_w_generate, raynaud_generate, MonskyWExample, RaynaudExample, RaynaudInstance};
pub use oracle::{estimate_ehk, hk_colength, EhkFit, HkTable, OracleError, Polynomial};
pub use trinomial::{
    deg_l1, ehk_from_s1_l1, monsky_prime_check, s1_l1_from_ehk, Inversion, TrinomialInstance, Variant,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("unknown variant `{0}` (expected fermat or cyclic)")]
    UnknownVariant(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("degree {d} is below the minimum {min}")]
    DegreeTooSmall { d: u64, min: u64 },
    #[error("degree {0} is odd")]
    OddDegree(u64),
    #[error("s1 must be at least 1")]
    ZeroS1,
    #[error("l1 = {l1} must have the parity of p·d = {p}·{d}")]
    ParityViolation { l1: u64, p: u64, d: u64 },
    #[error("l1 = {l1} exceeds d(d-3) = {max}")]
    RangeViolation { l1: u64, max: i64 },
    #[error("no (s1, l1) produces e_HK = {0}")]
    NoSolution(String),
    #[error("several (s1, l1) produce the same e_HK: {0:?}")]
    AmbiguousSolution(Vec<(u32, u64)>),
    #[error("p = {p} fails the {variant} congruence for d = {d}: p mod {modulus} = {residue}")]
    CongruenceFail {
        d: u64,
        p: u64,
        variant: trinomial::Variant,
        modulus: u64,
        residue: u64,
    },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("delta = {delta} out of range: need 1 <= delta and delta·{p} <= {max}")]
    DeltaOutOfRange { delta: u64, p: u64, max: i64 },
    #[error(transparent)]
    Hn(#[from] HnError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}
