//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use hnlab_core::hn::{GradedPiece, HnProfile};
use hnlab_core::tower::TowerLevel;
use hnlab_core::{FrobeniusData, Profile, Rational, Scalar, Tower};
use rand::Rng;

pub const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Integer-degree profile with total rank at most `max_rank`.
pub fn random_profile<R: Rng>(rng: &mut R, max_rank: u64) -> Profile {
    let mut budget = rng.gen_range(1..=max_rank);
    let mut pieces: Vec<GradedPiece<Rational>> = Vec::new();
    while budget > 0 {
        let rank = rng.gen_range(1..=budget.min(4));
        budget -= rank;
        pieces.push(next_piece(rng, pieces.last(), rank));
    }
    HnProfile::new(pieces).expect("generator keeps slopes decreasing")
}

/// Same, but with rank-1 first and last pieces.
pub fn random_endpoint_profile<R: Rng>(rng: &mut R, max_rank: u64) -> Profile {
    let inner = rng.gen_range(0..=max_rank.saturating_sub(2));
    let mut ranks = vec![1];
    let mut left = inner;
    while left > 0 {
        let r = rng.gen_range(1..=left.min(3));
        ranks.push(r);
        left -= r;
    }
    // A lone rank-1 piece is a valid (semistable) endpoint case.
    if inner > 0 || rng.gen_bool(0.9) {
        ranks.push(1);
    }
    let mut pieces: Vec<GradedPiece<Rational>> = Vec::new();
    for r in ranks {
        pieces.push(next_piece(rng, pieces.last(), r));
    }
    HnProfile::new(pieces).expect("generator keeps slopes decreasing")
}

fn next_piece<R: Rng>(rng: &mut R, prev: Option<&GradedPiece<Rational>>, rank: u64) -> GradedPiece<Rational> {
    let degree = match prev {
        None => rng.gen_range(-20..=20),
        Some(prev) => {
            // Largest integer strictly below prev.slope() * rank, minus a random step.
            let cap = prev.slope() * Rational::from_uint(rank);
            let ceil = cap.ceil_i64().expect("small values");
            ceil - 1 - rng.gen_range(0..4)
        }
    };
    GradedPiece::int(rank, degree)
}

/// Splits pieces of `pulled` at random, keeping slopes strictly decreasing,
/// so that the result refines `pulled`.
pub fn random_refinement<R: Rng>(rng: &mut R, pulled: &Profile) -> Profile {
    let src = pulled.pieces();
    let mut out: Vec<GradedPiece<Rational>> = Vec::new();
    for (i, piece) in src.iter().enumerate() {
        let upper = out.last().map(GradedPiece::slope);
        let lower = src.get(i + 1).map(GradedPiece::slope);
        match try_split(rng, piece, upper.as_ref(), lower.as_ref()) {
            Some((a, b)) => {
                out.push(a);
                out.push(b);
            }
            None => out.push(piece.clone()),
        }
    }
    HnProfile::new(out).expect("splits stay inside neighbouring slopes")
}

fn try_split<R: Rng>(
    rng: &mut R,
    piece: &GradedPiece<Rational>,
    upper: Option<&Rational>,
    lower: Option<&Rational>,
) -> Option<(GradedPiece<Rational>, GradedPiece<Rational>)> {
    if piece.rank < 2 || !rng.gen_bool(0.6) {
        return None;
    }
    let r1 = rng.gen_range(1..piece.rank);
    let r2 = piece.rank - r1;
    let total = piece.degree.ceil_i64()?;
    let mu = piece.slope();
    // Smallest d1 with d1/r1 > mu, then a random bump.
    let base = (mu.clone() * Rational::from_uint(r1)).ceil_i64()?;
    let base = if Rational::from_int(base) / Rational::from_uint(r1) > mu { base } else { base + 1 };
    let d1 = base + rng.gen_range(0..3);
    let a = GradedPiece::int(r1, d1);
    let b = GradedPiece::int(r2, total - d1);
    let ok_upper = upper.is_none_or(|u| a.slope() < *u);
    let ok_lower = lower.is_none_or(|l| b.slope() > *l);
    (ok_upper && ok_lower).then_some((a, b))
}

/// Valid refinement tower over a rank-1-endpoint base.
pub fn random_refinement_tower<R: Rng>(rng: &mut R, max_rank: u64) -> Tower {
    let base = random_endpoint_profile(rng, max_rank);
    let p = PRIMES[rng.gen_range(0..PRIMES.len())];
    let frob = FrobeniusData::single(p).unwrap();
    let height = rng.gen_range(1..=3);
    let mut levels = Vec::with_capacity(height);
    let mut current = base.clone();
    for _ in 0..height {
        current = random_refinement(rng, &current.strong_pullback(&frob));
        levels.push(TowerLevel {
            profile: current.clone(),
            descent: None,
        });
    }
    Tower::new(base, p, levels, None).expect("generated tower is consistent")
}
