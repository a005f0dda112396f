//! Frobenius towers `E, F*E, F^{2*}E, …` given as explicit HN profiles.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hn::{is_subfiltration, AlmostDescent, FrobeniusData, HnError, HnProfile, ProfileDoc};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("level {level}: {source}")]
    Level { level: usize, source: HnError },
    #[error("level {level}: total rank {found}, expected {expected}")]
    RankDrift { level: usize, found: u64, expected: u64 },
    #[error("level {level}: total degree {found}, expected {expected}")]
    DegreeDrift {
        level: usize,
        found: String,
        expected: String,
    },
    #[error("stabilization index {index} exceeds the {levels} stored levels")]
    StabilizationOutOfRange { index: usize, levels: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct TowerLevel<S> {
    pub profile: HnProfile<S>,
    /// Almost-descent targets of this level's pieces into the base profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descent: Option<AlmostDescent>,
}

/// Stored HN profiles of `F^{k*}E` for `k = 1..=levels.len()`.
///
/// Totals are hard invariants. Whether each level refines the strong pullback
/// of the one below is recorded, not enforced, so that counterexamples can be
/// represented; checks that need refinement test [`TowerSpec::refines`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct TowerSpec<S> {
    base: HnProfile<S>,
    p: u64,
    levels: Vec<TowerLevel<S>>,
    strongly_semistable_at: Option<usize>,
    refines: Vec<bool>,
}

impl<S: Scalar> TowerSpec<S> {
    pub fn new(
        base: HnProfile<S>,
        p: u64,
        levels: Vec<TowerLevel<S>>,
        strongly_semistable_at: Option<usize>,
    ) -> Result<Self, TowerError> {
        FrobeniusData::single(p).map_err(|source| TowerError::Level { level: 0, source })?;
        if let Some(index) = strongly_semistable_at {
            if index > levels.len() {
                return Err(TowerError::StabilizationOutOfRange {
                    index,
                    levels: levels.len(),
                });
            }
        }
        let rank = base.total_rank();
        let degree = base.total_degree();
        let mut refines = Vec::with_capacity(levels.len());
        for (k, level) in levels.iter().enumerate() {
            let k = k + 1;
            let found = level.profile.total_rank();
            if found != rank {
                return Err(TowerError::RankDrift {
                    level: k,
                    found,
                    expected: rank,
                });
            }
            let expected = degree.clone() * S::power_of(p, k as u32);
            let found = level.profile.total_degree();
            if found != expected {
                return Err(TowerError::DegreeDrift {
                    level: k,
                    found: found.to_fraction_string(),
                    expected: expected.to_fraction_string(),
                });
            }
            let below = if k == 1 { &base } else { &levels[k - 2].profile };
            let pulled = below.strong_pullback(&FrobeniusData::single(p).unwrap());
            let sub = is_subfiltration(&pulled, &level.profile)
                .map_err(|source| TowerError::Level { level: k, source })?;
            refines.push(sub.holds);
        }
        Ok(Self {
            base,
            p,
            levels,
            strongly_semistable_at,
            refines,
        })
    }

    /// Tower whose every level is the strong pullback of the base.
    pub fn strong(base: HnProfile<S>, p: u64, height: usize) -> Result<Self, TowerError> {
        let frob = FrobeniusData::single(p).map_err(|source| TowerError::Level { level: 0, source })?;
        let mut levels = Vec::with_capacity(height);
        let mut current = base.clone();
        for _ in 0..height {
            current = current.strong_pullback(&frob);
            levels.push(TowerLevel {
                profile: current.clone(),
                descent: Some(AlmostDescent::identity(current.num_pieces())),
            });
        }
        Self::new(base, p, levels, Some(0))
    }

    pub fn base(&self) -> &HnProfile<S> {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[TowerLevel<S>] {
        &self.levels
    }

    pub fn strongly_semistable_at(&self) -> Option<usize> {
        self.strongly_semistable_at
    }

    /// Whether stored level `k >= 1` refines the strong pullback of level `k-1`.
    pub fn refines(&self, k: usize) -> bool {
        self.refines.get(k.wrapping_sub(1)).copied().unwrap_or(true)
    }

    pub fn first_refinement_violation(&self) -> Option<usize> {
        self.refines.iter().position(|ok| !ok).map(|i| i + 1)
    }

    /// Profile of `F^{k*}E`. Levels beyond the stored ones are strong
    /// pullbacks of the highest stored level.
    pub fn profile_at(&self, k: usize) -> Cow<'_, HnProfile<S>> {
        let top = self.levels.len();
        let stored = |i: usize| if i == 0 { &self.base } else { &self.levels[i - 1].profile };
        if k <= top {
            Cow::Borrowed(stored(k))
        } else {
            let frob = FrobeniusData::new(self.p, (k - top) as u32).unwrap();
            Cow::Owned(stored(top).strong_pullback(&frob))
        }
    }

    /// Normalized slopes `a_i(F^{k*}E) = μ_i(F^{k*}E) / p^k`.
    pub fn normalized_slopes(&self, k: usize) -> Vec<S> {
        let scale = S::power_of(self.p, k as u32);
        self.profile_at(k)
            .slopes()
            .into_iter()
            .map(|s| s / scale.clone())
            .collect()
    }

    /// Ranks `r_i(F^{k*}E)`.
    pub fn ranks(&self, k: usize) -> Vec<u64> {
        self.profile_at(k).pieces().iter().map(|p| p.rank).collect()
    }

    /// `(ã_i, r̃_i)` at the strongly semistable level.
    pub fn stable_data(&self) -> Option<(Vec<S>, Vec<u64>)> {
        self.strongly_semistable_at
            .map(|k| (self.normalized_slopes(k), self.ranks(k)))
    }

    /// `L_max(E)`, exact once the tower has stabilized.
    pub fn l_max(&self) -> Option<S> {
        self.stable_data().map(|(a, _)| a[0].clone())
    }

    /// `L_min(E)`, exact once the tower has stabilized.
    pub fn l_min(&self) -> Option<S> {
        self.stable_data().map(|(a, _)| a[a.len() - 1].clone())
    }
}

/// JSON form of a tower:
/// `{"base":{…},"p":3,"levels":[{"profile":{…},"descent":[1,2]}],"strongly_semistable_at":1}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TowerDoc<S> {
    pub base: ProfileDoc<S>,
    pub p: u64,
    #[serde(default)]
    pub levels: Vec<TowerLevelDoc<S>>,
    #[serde(default)]
    pub strongly_semistable_at: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TowerLevelDoc<S> {
    pub profile: ProfileDoc<S>,
    #[serde(default)]
    pub descent: Option<Vec<usize>>,
}

impl<S: Scalar> TryFrom<TowerDoc<S>> for TowerSpec<S> {
    type Error = TowerError;

    fn try_from(doc: TowerDoc<S>) -> Result<Self, TowerError> {
        let base = HnProfile::try_from(doc.base).map_err(|source| TowerError::Level { level: 0, source })?;
        let levels = doc
            .levels
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                let wrap = |source| TowerError::Level { level: i + 1, source };
                Ok(TowerLevel {
                    profile: HnProfile::try_from(l.profile).map_err(wrap)?,
                    descent: l.descent.map(AlmostDescent::new).transpose().map_err(wrap)?,
                })
            })
            .collect::<Result<Vec<_>, TowerError>>()?;
        TowerSpec::new(base, doc.p, levels, doc.strongly_semistable_at)
    }
}
