//! Instability bounds and characteristic thresholds.
//!
//! Each checker evaluates one inequality on exact data and returns a
//! [`BoundReport`]. A violated inequality is reported (`holds == false`), never
//! rejected: several of the interesting instances live below the
//! characteristic threshold, and `hypothesis_ok` records that separately.

use serde::Serialize;
use thiserror::Error;

use crate::hn::{AlmostDescent, DescentMarking, FrobeniusData, HnError, HnProfile};
use crate::primes::next_prime_at_least;
use crate::scalar::Scalar;
use crate::tower::TowerSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Hn(#[from] HnError),
    #[error("descent marking has s = {s} entries but l = {l}")]
    MarkingExceedsLength { s: usize, l: usize },
    #[error("genus must be at least 1")]
    GenusZero,
    #[error("tower has no strongly semistable level")]
    TowerNotStabilized,
    #[error("level {0} does not refine the pullback of the level below")]
    RefinementViolation(usize),
    #[error("piece {0} has no almost-descent target")]
    NoDescentTarget(usize),
    #[error("geometry field `{0}` is required")]
    MissingGeometryField(&'static str),
    #[error("rank {rank} must lie in 1..={n}")]
    RankOutOfRange { rank: u64, n: u32 },
    #[error("`{0}` must be positive")]
    NonPositive(&'static str),
    #[error("inconsistent geometry: {0}")]
    GeometryMismatch(String),
}

/// Ambient invariants of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometryContext<S> {
    pub dim_n: u32,
    /// `μ_max(Ω¹_X)`; may be zero or negative.
    pub mu_max_omega: S,
    pub genus: Option<u64>,
    /// HN profile of `Ω¹_X`, i.e. the filtration `M_j`.
    pub omega_profile: Option<HnProfile<S>>,
    /// `deg O_X(2)` for the embedding bound.
    pub deg_o2: Option<S>,
    /// `μ(Ω¹_X)`.
    pub mu_omega: Option<S>,
    /// `L_max(Ω¹_X)` when known; otherwise `μ_max(Ω¹_X)` stands in.
    pub l_max_omega: Option<S>,
}

impl<S: Scalar> GeometryContext<S> {
    pub fn new(dim_n: u32, mu_max_omega: S) -> Self {
        Self {
            dim_n,
            mu_max_omega,
            genus: None,
            omega_profile: None,
            deg_o2: None,
            mu_omega: None,
            l_max_omega: None,
        }
    }

    /// A smooth curve of genus `g`: `Ω¹_X` is a line bundle of degree `2g − 2`.
    pub fn curve(genus: u64) -> Self {
        let canonical = S::from_int(2 * genus as i64 - 2);
        Self {
            genus: Some(genus),
            mu_omega: Some(canonical.clone()),
            ..Self::new(1, canonical)
        }
    }

    pub fn with_omega_profile(mut self, profile: HnProfile<S>) -> Self {
        self.omega_profile = Some(profile);
        self
    }

    pub fn with_embedding(mut self, mu_omega: S, deg_o2: S) -> Self {
        self.mu_omega = Some(mu_omega);
        self.deg_o2 = Some(deg_o2);
        self
    }

    pub fn with_l_max_omega(mut self, l_max: S) -> Self {
        self.l_max_omega = Some(l_max);
        self
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        if self.dim_n == 0 {
            return Err(BoundsError::NonPositive("dim_n"));
        }
        if let (Some(g), 1) = (self.genus, self.dim_n) {
            let canonical = S::from_int(2 * g as i64 - 2);
            if self.mu_max_omega != canonical {
                return Err(BoundsError::GeometryMismatch(format!(
                    "curve of genus {g} needs mu_max_omega = {canonical}, got {}",
                    self.mu_max_omega
                )));
            }
        }
        if let Some(omega) = &self.omega_profile {
            if omega.mu_max() != self.mu_max_omega {
                return Err(BoundsError::GeometryMismatch(format!(
                    "omega profile has mu_max {}, context says {}",
                    omega.mu_max(),
                    self.mu_max_omega
                )));
            }
            if omega.total_rank() != u64::from(self.dim_n) {
                return Err(BoundsError::GeometryMismatch(format!(
                    "omega profile has rank {}, dimension is {}",
                    omega.total_rank(),
                    self.dim_n
                )));
            }
        }
        Ok(())
    }

    /// `L_max(Ω¹_X)` if supplied, else `μ_max(Ω¹_X)`.
    pub fn omega_l_max(&self) -> (S, OmegaSource) {
        match &self.l_max_omega {
            Some(v) => (v.clone(), OmegaSource::Supplied),
            None => (self.mu_max_omega.clone(), OmegaSource::MuMaxApproximation),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaSource {
    Supplied,
    MuMaxApproximation,
}

/// Outcome of one inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct BoundReport<S> {
    #[serde(with = "crate::scalar::fraction_serde")]
    pub lhs: S,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub rhs: S,
    pub holds: bool,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub slack: S,
    pub hypothesis_ok: bool,
    pub name: String,
}

impl<S: Scalar> BoundReport<S> {
    pub fn new(name: impl Into<String>, lhs: S, rhs: S, hypothesis_ok: bool) -> Self {
        let slack = rhs.clone() - lhs.clone();
        Self {
            holds: !slack.is_negative(),
            lhs,
            rhs,
            slack,
            hypothesis_ok,
            name: name.into(),
        }
    }

    /// Equality of both sides.
    pub fn is_tight(&self) -> bool {
        self.slack.is_zero()
    }
}

/// Data shared by the single-pullback bounds: the HN profile of `F*E`, the
/// descending members, and `I(E)`, `rank E`.
#[derive(Debug, Clone)]
pub struct PullbackCase<'a, S> {
    pub fe_profile: &'a HnProfile<S>,
    pub marking: &'a DescentMarking,
    pub frob: FrobeniusData,
    pub base_instability: S,
    pub base_rank: u64,
}

impl<S: Scalar> PullbackCase<'_, S> {
    fn l_and_s(&self) -> Result<(usize, usize), BoundsError> {
        let l = self.fe_profile.hn_length();
        let s = self.marking.s();
        if s > l {
            return Err(BoundsError::MarkingExceedsLength { s, l });
        }
        self.marking.validate_for(l)?;
        Ok((l, s))
    }

    fn p(&self) -> S {
        S::from_uint(self.frob.p())
    }

    /// `p >= r + n − (s + 2)`.
    fn characteristic_ok(&self, n: u32, s: usize) -> bool {
        self.frob.p() as i64 >= self.base_rank as i64 + i64::from(n) - (s as i64 + 2)
    }
}

fn int<S: Scalar>(v: i64) -> S {
    S::from_int(v)
}

/// `I(F*E) <= (l − s)·μ_max(Ω¹_X) + ε·p·I(E)` with `ε = min{1, s}`.
pub fn instability_bound<S: Scalar>(
    case: &PullbackCase<'_, S>,
    geom: &GeometryContext<S>,
) -> Result<BoundReport<S>, BoundsError> {
    geom.validate()?;
    let (l, s) = case.l_and_s()?;
    let eps = int::<S>(case.marking.epsilon() as i64);
    let rhs = int::<S>(l as i64 - s as i64) * geom.mu_max_omega.clone()
        + eps * case.p() * case.base_instability.clone();
    Ok(BoundReport::new(
        "lemma1",
        case.fe_profile.instability_degree(),
        rhs,
        case.characteristic_ok(geom.dim_n, s),
    ))
}

/// `I(F*E) <= (l − s)·μ_max(Ω¹_X) + p·s·I(E)`.
pub fn sun_conjecture_bound<S: Scalar>(
    case: &PullbackCase<'_, S>,
    geom: &GeometryContext<S>,
) -> Result<BoundReport<S>, BoundsError> {
    geom.validate()?;
    let (l, s) = case.l_and_s()?;
    let rhs = int::<S>(l as i64 - s as i64) * geom.mu_max_omega.clone()
        + case.p() * int::<S>(s as i64) * case.base_instability.clone();
    Ok(BoundReport::new(
        "sun",
        case.fe_profile.instability_degree(),
        rhs,
        case.characteristic_ok(geom.dim_n, s),
    ))
}

/// Semistable `E`: `I(F*E) <= (r − 1)·μ_max(Ω¹_X)`.
pub fn shepherd_barron_bound<S: Scalar>(
    fe_profile: &HnProfile<S>,
    geom: &GeometryContext<S>,
    rank: u64,
    frob: &FrobeniusData,
) -> Result<BoundReport<S>, BoundsError> {
    geom.validate()?;
    let rhs = int::<S>(rank as i64 - 1) * geom.mu_max_omega.clone();
    let hypothesis_ok = frob.p() as i64 >= rank as i64 + i64::from(geom.dim_n) - 2;
    Ok(BoundReport::new(
        "sb",
        fe_profile.instability_degree(),
        rhs,
        hypothesis_ok,
    ))
}

/// Curves of genus `g >= 1`, any `p`:
/// `I(F*E) <= (l − s)(2g − 2) + ε·p·I(E)`.
pub fn curve_bound<S: Scalar>(
    case: &PullbackCase<'_, S>,
    genus: u64,
) -> Result<BoundReport<S>, BoundsError> {
    if genus == 0 {
        return Err(BoundsError::GenusZero);
    }
    let (l, s) = case.l_and_s()?;
    let eps = int::<S>(case.marking.epsilon() as i64);
    let rhs = int::<S>((l as i64 - s as i64) * (2 * genus as i64 - 2))
        + eps * case.p() * case.base_instability.clone();
    Ok(BoundReport::new(
        "curve",
        case.fe_profile.instability_degree(),
        rhs,
        true,
    ))
}

/// Comparison of `I(F*E)` with `I(E)` when `μ_max(Ω¹_X) <= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityCheck {
    /// `I(F*E) = I(E)` as written.
    pub literal: bool,
    /// `I(F*E) / p = I(E)`.
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct SpreadReport<S> {
    pub main: BoundReport<S>,
    pub omega_source: OmegaSource,
    /// `I(F*E) <= (r − 1)·L_max(Ω¹_X) + I(E)`, evaluated when `μ_max(Ω¹_X) > 0`.
    pub pullback: Option<BoundReport<S>>,
    /// Evaluated when `μ_max(Ω¹_X) <= 0`.
    pub stability: Option<StabilityCheck>,
}

/// `L_max(E) − L_min(E) <= ((l − s)/p)·L_max(Ω¹_X) + I(E)`.
///
/// `l` and `s` are taken as given; they are not derived from the tower.
pub fn limit_spread_bound<S: Scalar>(
    tower: &TowerSpec<S>,
    geom: &GeometryContext<S>,
    l: i64,
    s: i64,
) -> Result<SpreadReport<S>, BoundsError> {
    geom.validate()?;
    let (l_max, l_min) = match (tower.l_max(), tower.l_min()) {
        (Some(hi), Some(lo)) => (hi, lo),
        _ => return Err(BoundsError::TowerNotStabilized),
    };
    let p = S::from_uint(tower.p());
    let base_i = tower.base().instability_degree();
    let (omega, omega_source) = geom.omega_l_max();
    let rhs = int::<S>(l - s) / p.clone() * omega.clone() + base_i.clone();
    let main = BoundReport::new("t5", l_max - l_min, rhs, true);

    let first = tower.profile_at(1).instability_degree();
    let (pullback, stability) = if geom.mu_max_omega.is_positive() {
        let r = tower.base().total_rank() as i64;
        let rhs = int::<S>(r - 1) * omega + base_i;
        (Some(BoundReport::new("t5-pullback", first, rhs, true)), None)
    } else {
        let check = StabilityCheck {
            literal: first == base_i,
            normalized: first / p == base_i,
        };
        (None, Some(check))
    };
    Ok(SpreadReport {
        main,
        omega_source,
        pullback,
        stability,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct LevelEquality<S> {
    pub level: usize,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub observed: S,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub expected: S,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct EndpointRankReport<S> {
    pub rank_one_endpoints: bool,
    /// `I(F^{k*}E) = p^k·I(E)` per level; empty unless both endpoint pieces have rank 1.
    pub equalities: Vec<LevelEquality<S>>,
    /// `I(F*E) <= μ_max(Ω¹_X)(rank(E/E_l) + rank(E_1) − 2) + p·I(E)`.
    pub inequality: BoundReport<S>,
}

impl<S: Scalar> EndpointRankReport<S> {
    pub fn holds(&self) -> bool {
        self.inequality.holds && self.equalities.iter().all(|e| e.holds)
    }
}

/// Endpoint-rank consequences of the refinement property along a tower.
pub fn endpoint_rank_check<S: Scalar>(
    tower: &TowerSpec<S>,
    geom: &GeometryContext<S>,
) -> Result<EndpointRankReport<S>, BoundsError> {
    geom.validate()?;
    if let Some(level) = tower.first_refinement_violation() {
        return Err(BoundsError::RefinementViolation(level));
    }
    let base = tower.base();
    let base_i = base.instability_degree();
    let p = tower.p();
    let rank_one_endpoints = base.first_piece().rank == 1 && base.last_piece().rank == 1;

    let equalities = if rank_one_endpoints {
        (1..=tower.height().max(1))
            .map(|k| {
                let observed = tower.profile_at(k).instability_degree();
                let expected = S::power_of(p, k as u32) * base_i.clone();
                LevelEquality {
                    level: k,
                    holds: observed == expected,
                    observed,
                    expected,
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let r = base.total_rank();
    let endpoint_ranks = base.last_piece().rank as i64 + base.first_piece().rank as i64 - 2;
    let rhs = geom.mu_max_omega.clone() * int::<S>(endpoint_ranks) + S::from_uint(p) * base_i;
    let hypothesis_ok = refinement_threshold(r, geom.dim_n, &geom.mu_max_omega).admits(p);
    let inequality = BoundReport::new(
        "cc1",
        tower.profile_at(1).instability_degree(),
        rhs,
        hypothesis_ok,
    );
    Ok(EndpointRankReport {
        rank_one_endpoints,
        equalities,
        inequality,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct DriftEntry<S> {
    pub piece: usize,
    pub base_piece: usize,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub c: S,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub bound: S,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct DriftReport<S> {
    pub entries: Vec<DriftEntry<S>>,
    /// `p >= max{r + n − 2, μ_max(Ω¹_X)·r³/4}`.
    pub hypothesis_ok: bool,
}

impl<S: Scalar> DriftReport<S> {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }
}

/// A level `F^{s*}E` together with how its pieces almost descend to `E`.
#[derive(Debug, Clone)]
pub struct DriftCase<'a, S> {
    pub level: &'a HnProfile<S>,
    pub descent: &'a AlmostDescent,
    pub base: &'a HnProfile<S>,
    /// `p` and the level index `s`.
    pub frob: FrobeniusData,
    pub rank: u64,
}

impl<S: Scalar> DriftCase<'_, S> {
    /// `(j, i, a_j, μ_i)` for every piece of the level.
    fn pairs(&self) -> Result<Vec<(usize, usize, S, S)>, BoundsError> {
        let scale: S = self.frob.scale();
        (1..=self.level.num_pieces())
            .map(|j| {
                let i = self
                    .descent
                    .target(j)
                    .filter(|&i| i <= self.base.num_pieces())
                    .ok_or(BoundsError::NoDescentTarget(j))?;
                let a_j = self.level.piece_slope(j - 1) / scale.clone();
                Ok((j, i, a_j, self.base.piece_slope(i - 1)))
            })
            .collect()
    }

    fn hypothesis_ok(&self, geom: &GeometryContext<S>) -> bool {
        refinement_threshold(self.rank, geom.dim_n, &geom.mu_max_omega).admits(self.frob.p())
    }
}

/// `μ_j(F^{s*}E)/p^s = μ_i(E) + C/p` with `|C| <= 2|μ_max(Ω¹_X)|(r − 1)`.
pub fn drift_check_linear<S: Scalar>(
    case: &DriftCase<'_, S>,
    geom: &GeometryContext<S>,
) -> Result<DriftReport<S>, BoundsError> {
    drift_check_power(case, geom, 1).map(|mut report| {
        for entry in &mut report.entries {
            entry.bound = entry.bound.clone() / int::<S>(2);
            entry.ok = entry.c.abs() <= entry.bound;
        }
        report
    })
}

/// `a_j^m = μ_i^m + C/p` with
/// `|C| <= 4|μ_max(Ω¹_X)|(r − 1)·max{2|μ_1|, …, 2|μ_{l+1}|, 2}^{m−1}`.
pub fn drift_check_power<S: Scalar>(
    case: &DriftCase<'_, S>,
    geom: &GeometryContext<S>,
    m: u32,
) -> Result<DriftReport<S>, BoundsError> {
    geom.validate()?;
    if m == 0 {
        return Err(BoundsError::NonPositive("m"));
    }
    let p = S::from_uint(case.frob.p());
    let two = int::<S>(2);
    let envelope = case
        .base
        .slopes()
        .into_iter()
        .map(|mu| two.clone() * mu.abs())
        .chain(std::iter::once(two.clone()))
        .max()
        .unwrap();
    let bound = int::<S>(4)
        * geom.mu_max_omega.abs()
        * int::<S>(case.rank as i64 - 1)
        * envelope.pow_u32(m - 1);
    let entries = case
        .pairs()?
        .into_iter()
        .map(|(piece, base_piece, a_j, mu_i)| {
            let c = p.clone() * (a_j.pow_u32(m) - mu_i.pow_u32(m));
            DriftEntry {
                piece,
                base_piece,
                ok: c.abs() <= bound,
                c,
                bound: bound.clone(),
            }
        })
        .collect();
    Ok(DriftReport {
        entries,
        hypothesis_ok: case.hypothesis_ok(geom),
    })
}

/// `max{r + n − 2, μ_max(Ω¹_X)·r³/4}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct CharThreshold<S> {
    #[serde(with = "crate::scalar::fraction_serde")]
    pub value: S,
}

impl<S: Scalar> CharThreshold<S> {
    pub fn admits(&self, p: u64) -> bool {
        S::from_uint(p) >= self.value
    }

    /// Least prime admitted by the threshold.
    pub fn smallest_admissible_prime(&self) -> u64 {
        let floor = self.value.ceil_i64().unwrap_or(i64::MAX).max(2) as u64;
        next_prime_at_least(floor)
    }

    /// Informational report: `lhs` is the threshold, `rhs` is `p`.
    pub fn report(&self, name: &str, p: u64) -> BoundReport<S> {
        BoundReport::new(name, self.value.clone(), S::from_uint(p), self.admits(p))
    }
}

pub fn refinement_threshold<S: Scalar>(rank: u64, dim_n: u32, mu_max_omega: &S) -> CharThreshold<S> {
    let linear = int::<S>(rank as i64 + i64::from(dim_n) - 2);
    let cubic = mu_max_omega.clone() * S::from_uint(rank).pow_u32(3) / int::<S>(4);
    CharThreshold {
        value: linear.max(cubic),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct BehrendInput<S> {
    pub rank_g: u64,
    /// `dim G/Z(G)`
    pub dim_adjoint: u64,
    /// Coxeter number `h(G)`
    pub coxeter_h: u64,
    pub dim_x: u32,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub mu_max_omega: S,
}

/// `max{rank 𝔤 + dim X − 2, μ_max(Ω¹_X)(rank 𝔤)³/4, 2 dim(G/Z(G)), 4h(G)}`.
pub fn char_threshold_behrend<S: Scalar>(inp: &BehrendInput<S>) -> Result<S, BoundsError> {
    for (name, v) in [
        ("rank_g", inp.rank_g),
        ("dim_adjoint", inp.dim_adjoint),
        ("coxeter_h", inp.coxeter_h),
        ("dim_x", u64::from(inp.dim_x)),
    ] {
        if v == 0 {
            return Err(BoundsError::NonPositive(name));
        }
    }
    let t1 = refinement_threshold(inp.rank_g, inp.dim_x, &inp.mu_max_omega).value;
    let group = S::from_uint((2 * inp.dim_adjoint).max(4 * inp.coxeter_h));
    Ok(t1.max(group))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct EmbeddingBound<S> {
    #[serde(with = "crate::scalar::fraction_serde")]
    pub bound: S,
    /// `μ_max(Ω¹_X) <= bound`, when the HN profile of `Ω¹_X` is known.
    pub mu_max_within: Option<bool>,
}

/// Upper bound on `μ(M_1)` from an embedding:
/// `(n / rk M_1)·μ(Ω¹_X) + deg O_X(2)·(n − rk M_1)/rk M_1`.
pub fn embedding_slope_bound<S: Scalar>(
    geom: &GeometryContext<S>,
    rank_m1: u64,
) -> Result<EmbeddingBound<S>, BoundsError> {
    geom.validate()?;
    let n = geom.dim_n;
    if rank_m1 == 0 || rank_m1 > u64::from(n) {
        return Err(BoundsError::RankOutOfRange { rank: rank_m1, n });
    }
    let mu_omega = geom
        .mu_omega
        .clone()
        .ok_or(BoundsError::MissingGeometryField("mu_omega"))?;
    let rk = S::from_uint(rank_m1);
    let mut bound = S::from_uint(u64::from(n)) / rk.clone() * mu_omega;
    let corank = u64::from(n) - rank_m1;
    if corank > 0 {
        let deg_o2 = geom
            .deg_o2
            .clone()
            .ok_or(BoundsError::MissingGeometryField("deg_o2"))?;
        bound = bound + deg_o2 * S::from_uint(corank) / rk;
    }
    let mu_max_within = geom
        .omega_profile
        .as_ref()
        .map(|_| geom.mu_max_omega <= bound);
    Ok(EmbeddingBound {
        bound,
        mu_max_within,
    })
}
