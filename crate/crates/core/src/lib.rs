//! Harder-Narasimhan profiles under Frobenius pullback.
//!
//! A vector bundle is represented only through its HN profile: the ranks and
//! degrees of the graded pieces. On top of that the crate provides instability
//! bounds for `F*E` and for Frobenius towers, the characteristic thresholds
//! derived from them, and closed-form Hilbert-Kunz data for plane trinomial
//! curves together with a brute-force colength oracle.
//!
//! Profile arithmetic is generic over an exact [`Scalar`]; the aliases below
//! fix the usual choices.

pub mod bounds;
pub mod curves;
pub mod hn;
pub mod primes;
pub mod scalar;
pub mod tower;

pub use bounds::{BoundReport, BoundsError, GeometryContext, PullbackCase};
pub use hn::{DescentMarking, FrobeniusData, GradedPiece, HnError, HnProfile};
pub use scalar::Scalar;
pub use tower::{TowerError, TowerSpec};

/// Arbitrary-precision rational; used wherever `p^k` can grow without bound.
pub type Rational = num_rational::BigRational;
/// Machine-word rational for small profiles.
pub type SmallRational = num_rational::Ratio<i64>;

pub type Profile = HnProfile<Rational>;
pub type SmallProfile = HnProfile<SmallRational>;
pub type Tower = TowerSpec<Rational>;
