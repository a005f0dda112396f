//! Formal Harder-Narasimhan profiles.
//!
//! A profile is the list of graded pieces `E_i / E_{i-1}` of an HN filtration,
//! each recorded as `(rank, degree)`. Slopes are derived from those two
//! numbers and must strictly decrease along the list. Cumulative members
//! `E_1 ⊂ E_2 ⊂ … ⊂ E` are derived on demand.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::primes::is_prime;
use crate::scalar::{FractionParseError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnError {
    #[error("profile has no pieces")]
    EmptyProfile,
    #[error("piece {0} has rank zero")]
    ZeroRank(usize),
    #[error("slopes do not strictly decrease between pieces {0} and {next}", next = .0 + 1)]
    NonDecreasingSlopes(usize),
    #[error("totals differ: coarse (rank {coarse_rank}, degree {coarse_degree}) vs fine (rank {fine_rank}, degree {fine_degree})")]
    TotalsMismatch {
        coarse_rank: u64,
        coarse_degree: String,
        fine_rank: u64,
        fine_degree: String,
    },
    #[error("piece {0} has a non-integer degree")]
    NonIntegerDegree(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid descent marking: {0}")]
    InvalidMarking(String),
}

/// One graded piece `E_i / E_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct GradedPiece<S> {
    pub rank: u64,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub degree: S,
}

impl<S: Scalar> GradedPiece<S> {
    pub fn new(rank: u64, degree: S) -> Self {
        Self { rank, degree }
    }

    pub fn int(rank: u64, degree: i64) -> Self {
        Self::new(rank, S::from_int(degree))
    }

    pub fn slope(&self) -> S {
        self.degree.clone() / S::from_uint(self.rank)
    }
}

impl<S: Scalar> fmt::Display for GradedPiece<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rank, self.degree)
    }
}

/// A cumulative member `E_k` of a filtration, recorded by total rank and degree.
pub type Member<S> = GradedPiece<S>;

/// Cumulative members of a raw piece list, ending with the whole sheaf.
pub fn cumulative_members<S: Scalar>(pieces: &[GradedPiece<S>]) -> Vec<Member<S>> {
    let mut rank = 0u64;
    let mut degree = S::zero();
    pieces
        .iter()
        .map(|piece| {
            rank += piece.rank;
            degree = degree.clone() + piece.degree.clone();
            Member::new(rank, degree.clone())
        })
        .collect()
}

/// Validated HN profile: non-empty, positive ranks, strictly decreasing slopes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct HnProfile<S> {
    pieces: Vec<GradedPiece<S>>,
}

/// Checks the HN invariants and reports the first offending piece or pair.
pub fn validate_profile<S: Scalar>(pieces: Vec<GradedPiece<S>>) -> Result<HnProfile<S>, HnError> {
    if pieces.is_empty() {
        return Err(HnError::EmptyProfile);
    }
    for (i, piece) in pieces.iter().enumerate() {
        if piece.rank == 0 {
            return Err(HnError::ZeroRank(i));
        }
        if i > 0 && pieces[i - 1].slope() <= piece.slope() {
            return Err(HnError::NonDecreasingSlopes(i - 1));
        }
    }
    Ok(HnProfile { pieces })
}

impl<S: Scalar> HnProfile<S> {
    pub fn new(pieces: Vec<GradedPiece<S>>) -> Result<Self, HnError> {
        validate_profile(pieces)
    }

    /// Convenience constructor from integer `(rank, degree)` pairs.
    pub fn from_ints(pairs: &[(u64, i64)]) -> Result<Self, HnError> {
        Self::new(pairs.iter().map(|&(r, d)| GradedPiece::int(r, d)).collect())
    }

    /// A single semistable piece.
    pub fn semistable(rank: u64, degree: S) -> Result<Self, HnError> {
        Self::new(vec![GradedPiece::new(rank, degree)])
    }

    pub fn pieces(&self) -> &[GradedPiece<S>] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// `l(E)`: number of nontrivial proper subsheaves in the filtration.
    pub fn hn_length(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn is_semistable(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn total_rank(&self) -> u64 {
        self.pieces.iter().map(|p| p.rank).sum()
    }

    pub fn total_degree(&self) -> S {
        self.pieces
            .iter()
            .fold(S::zero(), |acc, p| acc + p.degree.clone())
    }

    /// Slope of the whole sheaf.
    pub fn slope(&self) -> S {
        self.total_degree() / S::from_uint(self.total_rank())
    }

    /// `μ_i`, zero-based.
    pub fn piece_slope(&self, i: usize) -> S {
        self.pieces[i].slope()
    }

    pub fn slopes(&self) -> Vec<S> {
        self.pieces.iter().map(GradedPiece::slope).collect()
    }

    pub fn mu_max(&self) -> S {
        self.pieces[0].slope()
    }

    pub fn mu_min(&self) -> S {
        self.pieces[self.pieces.len() - 1].slope()
    }

    pub fn first_piece(&self) -> &GradedPiece<S> {
        &self.pieces[0]
    }

    pub fn last_piece(&self) -> &GradedPiece<S> {
        &self.pieces[self.pieces.len() - 1]
    }

    /// All cumulative members `E_1, …, E_l, E`.
    pub fn cumulative_members(&self) -> Vec<Member<S>> {
        cumulative_members(&self.pieces)
    }

    /// Cumulative members `E_1, …, E_l`, excluding the sheaf itself.
    pub fn proper_members(&self) -> Vec<Member<S>> {
        let mut members = self.cumulative_members();
        members.pop();
        members
    }

    pub fn instability_degree(&self) -> S {
        instability_degree(self)
    }

    pub fn strong_pullback(&self, frob: &FrobeniusData) -> Self {
        frobenius_pullback_strong(self, frob)
    }
}

impl<S: Scalar> fmt::Display for HnProfile<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// `I(E) = μ_max(E) − μ_min(E)`.
pub fn instability_degree<S: Scalar>(profile: &HnProfile<S>) -> S {
    profile.mu_max() - profile.mu_min()
}

/// Prime characteristic together with a number of Frobenius iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusData {
    p: u64,
    iterations: u32,
}

impl FrobeniusData {
    pub fn new(p: u64, iterations: u32) -> Result<Self, HnError> {
        if !is_prime(p) {
            return Err(HnError::NotPrime(p));
        }
        Ok(Self { p, iterations })
    }

    /// One Frobenius pullback in characteristic `p`.
    pub fn single(p: u64) -> Result<Self, HnError> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    pub fn with_iterations(&self, iterations: u32) -> Self {
        Self { p: self.p, iterations }
    }

    /// `p^s`.
    pub fn scale<S: Scalar>(&self) -> S {
        S::power_of(self.p, self.iterations)
    }
}

/// Pullback when every graded piece is strongly semistable: degrees scale by
/// `p^s` and the pieces remain the HN pieces.
pub fn frobenius_pullback_strong<S: Scalar>(
    profile: &HnProfile<S>,
    frob: &FrobeniusData,
) -> HnProfile<S> {
    let scale: S = frob.scale();
    HnProfile {
        pieces: profile
            .pieces
            .iter()
            .map(|p| GradedPiece::new(p.rank, p.degree.clone() * scale.clone()))
            .collect(),
    }
}

/// HN profile of a direct sum of semistable summands: sort by slope and merge
/// equal slopes.
pub fn direct_sum_hn<S: Scalar>(summands: &[GradedPiece<S>]) -> Result<HnProfile<S>, HnError> {
    if summands.is_empty() {
        return Err(HnError::EmptyProfile);
    }
    if let Some(i) = summands.iter().position(|s| s.rank == 0) {
        return Err(HnError::ZeroRank(i));
    }
    let mut sorted: Vec<(S, &GradedPiece<S>)> = summands.iter().map(|s| (s.slope(), s)).collect();
    sorted.sort_by(|a, b| b.0.cmp(&a.0));

    let mut pieces: Vec<GradedPiece<S>> = Vec::with_capacity(sorted.len());
    let mut last_slope: Option<S> = None;
    for (slope, summand) in sorted {
        match (&last_slope, pieces.last_mut()) {
            (Some(prev), Some(top)) if *prev == slope => {
                top.rank += summand.rank;
                top.degree = top.degree.clone() + summand.degree.clone();
            }
            _ => pieces.push(summand.clone()),
        }
        last_slope = Some(slope);
    }
    validate_profile(pieces)
}

/// Outcome of a subfiltration test; `witness` is the first coarse member
/// missing from the fine filtration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct Subfiltration<S> {
    pub holds: bool,
    pub witness: Option<Member<S>>,
}

/// Whether every proper cumulative member of `coarse` occurs among the
/// cumulative members of `fine`.
pub fn is_subfiltration<S: Scalar>(
    coarse: &HnProfile<S>,
    fine: &HnProfile<S>,
) -> Result<Subfiltration<S>, HnError> {
    members_subfiltration(&coarse.pieces, &fine.pieces)
}

/// Same as [`is_subfiltration`] on raw piece lists, for filtrations that are
/// not (or not yet known to be) valid HN profiles.
pub fn members_subfiltration<S: Scalar>(
    coarse: &[GradedPiece<S>],
    fine: &[GradedPiece<S>],
) -> Result<Subfiltration<S>, HnError> {
    let coarse_members = cumulative_members(coarse);
    let fine_members = cumulative_members(fine);
    let (c_total, f_total) = match (coarse_members.last(), fine_members.last()) {
        (Some(c), Some(f)) => (c, f),
        _ => return Err(HnError::EmptyProfile),
    };
    if c_total != f_total {
        return Err(HnError::TotalsMismatch {
            coarse_rank: c_total.rank,
            coarse_degree: c_total.degree.to_fraction_string(),
            fine_rank: f_total.rank,
            fine_degree: f_total.degree.to_fraction_string(),
        });
    }
    let witness = coarse_members[..coarse_members.len() - 1]
        .iter()
        .find(|m| !fine_members.contains(m))
        .cloned();
    Ok(Subfiltration {
        holds: witness.is_none(),
        witness,
    })
}

/// One adjacent pair in a slope-gap report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct GapEntry<S> {
    pub index: usize,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub gap: S,
    /// `1 / (r_i r_{i+1})`
    #[serde(with = "crate::scalar::fraction_serde")]
    pub pair_bound: S,
    /// `4 / (r_i + r_{i+1})^2`
    #[serde(with = "crate::scalar::fraction_serde")]
    pub sum_bound: S,
    /// `4 / r^2`
    #[serde(with = "crate::scalar::fraction_serde")]
    pub rank_bound: S,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct GapReport<S> {
    pub total_rank: u64,
    pub entries: Vec<GapEntry<S>>,
}

impl<S: Scalar> GapReport<S> {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }
}

/// Adjacent-slope gaps of an integer-degree profile against the chain
/// `gap >= 1/(r_i r_{i+1}) >= 4/(r_i + r_{i+1})^2 >= 4/r^2`.
pub fn slope_gap_check<S: Scalar>(profile: &HnProfile<S>) -> Result<GapReport<S>, HnError> {
    if let Some(i) = profile.pieces.iter().position(|p| !p.degree.is_integral()) {
        return Err(HnError::NonIntegerDegree(i));
    }
    let r = profile.total_rank();
    let four = S::from_int(4);
    let rank_bound = four.clone() / S::from_uint(r * r);
    let entries = profile
        .pieces
        .windows(2)
        .enumerate()
        .map(|(index, w)| {
            let (a, b) = (&w[0], &w[1]);
            let gap = a.slope() - b.slope();
            let pair_bound = S::one() / S::from_uint(a.rank * b.rank);
            let sum = a.rank + b.rank;
            let sum_bound = four.clone() / S::from_uint(sum * sum);
            let holds = gap >= pair_bound && pair_bound >= sum_bound && sum_bound >= rank_bound;
            GapEntry {
                index,
                gap,
                pair_bound,
                sum_bound,
                rank_bound: rank_bound.clone(),
                holds,
            }
        })
        .collect();
    Ok(GapReport {
        total_rank: r,
        entries,
    })
}

/// Which proper members `F_i` (1-based, `1..=l`) of a pulled-back HN
/// filtration descend, and to which member `E_j` of the base filtration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DescentMarking {
    descending: BTreeMap<usize, usize>,
}

impl DescentMarking {
    /// The empty marking, `s = 0`.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, HnError> {
        let mut descending = BTreeMap::new();
        for (i, j) in pairs {
            if i == 0 || j == 0 {
                return Err(HnError::InvalidMarking("indices are 1-based".into()));
            }
            if descending.insert(i, j).is_some() {
                return Err(HnError::InvalidMarking(format!("index {i} marked twice")));
            }
        }
        let marking = Self { descending };
        marking.check_increasing()?;
        Ok(marking)
    }

    fn check_increasing(&self) -> Result<(), HnError> {
        let targets: Vec<usize> = self.descending.values().copied().collect();
        if targets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HnError::InvalidMarking(
                "descent targets must strictly increase".into(),
            ));
        }
        Ok(())
    }

    /// Checks the marking against `l = l(F*E)`.
    pub fn validate_for(&self, l: usize) -> Result<(), HnError> {
        self.check_increasing()?;
        if let Some(&i) = self.descending.keys().find(|&&i| i == 0 || i > l) {
            return Err(HnError::InvalidMarking(format!(
                "index {i} outside 1..={l}"
            )));
        }
        Ok(())
    }

    /// `s(X, E)`.
    pub fn s(&self) -> usize {
        self.descending.len()
    }

    /// `ε = min{1, s}`.
    pub fn epsilon(&self) -> u64 {
        self.s().min(1) as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.descending.iter().map(|(&i, &j)| (i, j))
    }
}

/// Per-piece almost-descent targets: piece `j` of a level profile (1-based)
/// almost descends to piece `targets[j-1]` of the base profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlmostDescent {
    targets: Vec<usize>,
}

impl AlmostDescent {
    pub fn new(targets: Vec<usize>) -> Result<Self, HnError> {
        if targets.contains(&0) {
            return Err(HnError::InvalidMarking("indices are 1-based".into()));
        }
        if targets.windows(2).any(|w| w[0] > w[1]) {
            return Err(HnError::InvalidMarking(
                "almost-descent targets must not decrease".into(),
            ));
        }
        Ok(Self { targets })
    }

    /// Identity map, as for a strong pullback.
    pub fn identity(pieces: usize) -> Self {
        Self {
            targets: (1..=pieces).collect(),
        }
    }

    /// Targets for a level that refines the pullback of `base`: member `F_j`
    /// lies in the smallest `F*E_i` whose rank is at least `rank(F_j)`.
    pub fn by_rank<S: Scalar>(level: &HnProfile<S>, base: &HnProfile<S>) -> Result<Self, HnError> {
        if level.total_rank() != base.total_rank() {
            return Err(HnError::InvalidMarking("total ranks differ".into()));
        }
        let base_ranks: Vec<u64> = base.cumulative_members().iter().map(|m| m.rank).collect();
        let targets = level
            .cumulative_members()
            .iter()
            .map(|m| base_ranks.iter().position(|&r| r >= m.rank).unwrap() + 1)
            .collect();
        Self::new(targets)
    }

    /// Target of piece `j` (1-based), if any.
    pub fn target(&self, j: usize) -> Option<usize> {
        j.checked_sub(1).and_then(|k| self.targets.get(k)).copied()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

/// Raw, unvalidated profile document: `{"pieces":[{"rank":…,"degree":"n/d"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ProfileDoc<S> {
    pub pieces: Vec<GradedPiece<S>>,
}

#[derive(Debug, Error)]
pub enum ProfileLoadError {
    #[error("malformed profile document: {0}")]
    Format(String),
    #[error(transparent)]
    Invariant(#[from] HnError),
}

impl From<FractionParseError> for ProfileLoadError {
    fn from(e: FractionParseError) -> Self {
        Self::Format(e.to_string())
    }
}

impl<S: Scalar> HnProfile<S> {
    pub fn from_json(text: &str) -> Result<Self, ProfileLoadError> {
        let doc: ProfileDoc<S> =
            serde_json::from_str(text).map_err(|e| ProfileLoadError::Format(e.to_string()))?;
        Ok(Self::new(doc.pieces)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serialization is infallible")
    }
}

impl<S: Scalar> TryFrom<ProfileDoc<S>> for HnProfile<S> {
    type Error = HnError;

    fn try_from(doc: ProfileDoc<S>) -> Result<Self, HnError> {
        Self::new(doc.pieces)
    }
}
