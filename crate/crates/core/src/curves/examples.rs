//! Instance generators for the two low-characteristic counterexamples to the
//! refinement property.

use serde::Serialize;

use super::trinomial::{canonical_degree, monsky_prime_check, Variant};
use super::CurveError;
use crate::bounds::{refinement_threshold, instability_bound, BoundReport, CharThreshold, GeometryContext, PullbackCase};
use crate::hn::{
    cumulative_members, direct_sum_hn, is_subfiltration, members_subfiltration, DescentMarking,
    FrobeniusData, GradedPiece, Member, Subfiltration,
};
use crate::scalar::Scalar;
use crate::{Profile, Rational};

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

/// Curve of genus `g = pk + 1` with `B = F_*O_X / O_X` and a line bundle `L`
/// of degree `2k(p − 1)`; `V = L ⊕ B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RaynaudInstance {
    pub p: u64,
    pub k: u64,
    pub genus: u64,
    /// `(p − 1, (g − 1)(p − 1))`
    pub b: GradedPiece<Rational>,
    /// `(1, 2k(p − 1))`
    pub l: GradedPiece<Rational>,
    /// `Ω^{⊗i}` for `i = 1..p−1`: `(1, i(2g − 2))`.
    pub fb_pieces: Vec<GradedPiece<Rational>>,
}

impl RaynaudInstance {
    pub fn new(p: u64, k: u64) -> Result<Self, CurveError> {
        if p == 2 {
            return Err(CurveError::EvenPrime);
        }
        FrobeniusData::single(p).map_err(|_| CurveError::NotPrime(p))?;
        if k == 0 {
            return Err(CurveError::NonPositive("k"));
        }
        let genus = p * k + 1;
        let canonical = 2 * genus as i64 - 2;
        Ok(Self {
            p,
            k,
            genus,
            b: GradedPiece::int(p - 1, (genus as i64 - 1) * (p as i64 - 1)),
            l: GradedPiece::int(1, 2 * k as i64 * (p as i64 - 1)),
            fb_pieces: (1..p as i64).map(|i| GradedPiece::int(1, i * canonical)).collect(),
        })
    }

    pub fn geometry(&self) -> GeometryContext<Rational> {
        GeometryContext::curve(self.genus)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RaynaudExample {
    pub instance: RaynaudInstance,
    pub v_profile: Profile,
    pub fv_profile: Profile,
    /// `F*(HN V)` against `HN(F*V)`.
    pub refinement: Subfiltration<Rational>,
    pub threshold: CharThreshold<Rational>,
    pub threshold_admits_p: bool,
    /// Main instability bound with `s = 0`.
    pub pullback_bound: BoundReport<Rational>,
}

pub fn raynaud_generate(p: u64, k: u64) -> Result<RaynaudExample, CurveError> {
    let instance = RaynaudInstance::new(p, k)?;
    let frob = FrobeniusData::single(p).expect("checked prime");
    let v_profile = direct_sum_hn(&[instance.l.clone(), instance.b.clone()])?;

    let pulled_l = GradedPiece::new(1, instance.l.degree.clone() * q(p as i64));
    let mut summands = vec![pulled_l];
    summands.extend(instance.fb_pieces.iter().cloned());
    let fv_profile = direct_sum_hn(&summands)?;

    let refinement = is_subfiltration(&v_profile.strong_pullback(&frob), &fv_profile)?;
    let geom = instance.geometry();
    let rank = v_profile.total_rank();
    let threshold = refinement_threshold(rank, 1, &geom.mu_max_omega);
    let threshold_admits_p = threshold.admits(p);
    let none = DescentMarking::none();
    let pullback_bound = instability_bound(
        &PullbackCase {
            fe_profile: &fv_profile,
            marking: &none,
            frob,
            base_instability: v_profile.instability_degree(),
            base_rank: rank,
        },
        &geom,
    )?;
    Ok(RaynaudExample {
        instance,
        v_profile,
        fv_profile,
        refinement,
        threshold,
        threshold_admits_p,
        pullback_bound,
    })
}

/// Whether a stored filtration has strictly decreasing graded slopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeConsistency {
    #[serde(serialize_with = "serialize_fractions")]
    pub slopes: Vec<Rational>,
    pub strictly_decreasing: bool,
    /// First adjacent pair (zero-based) whose slopes fail to decrease.
    pub first_violation: Option<usize>,
    pub warning: Option<String>,
}

fn serialize_fractions<Ser: serde::Serializer>(values: &[Rational], ser: Ser) -> Result<Ser::Ok, Ser::Error> {
    ser.collect_seq(values.iter().map(Scalar::to_fraction_string))
}

impl SlopeConsistency {
    fn of(pieces: &[GradedPiece<Rational>], labels: &[&str]) -> Self {
        let slopes: Vec<Rational> = pieces.iter().map(GradedPiece::slope).collect();
        let first_violation = slopes.windows(2).position(|w| w[0] <= w[1]);
        let warning = first_violation.map(|i| {
            format!(
                "stated filtration is not slope-decreasing: μ({}) = {} vs μ({}) = {}",
                labels[i],
                slopes[i].to_fraction_string(),
                labels[i + 1],
                slopes[i + 1].to_fraction_string()
            )
        });
        Self {
            strictly_decreasing: first_violation.is_none(),
            slopes,
            first_violation,
            warning,
        }
    }
}

/// `W = L₀ ⊕ V` on the Fermat curve of degree `d`, with
/// `deg L₀ = d/2 + δ`, `V` of rank 2 and slope `−d/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonskyWExample {
    pub d: u64,
    pub p: u64,
    pub delta: u64,
    pub w_profile: Profile,
    /// Graded pieces of `0 ⊂ L₁ ⊂ L₁ ⊕ F*L₀ ⊂ F*W` with the displayed degrees:
    /// `L₁`, `F*L₀`, `F*V / L₁`.
    pub fw_stated: Vec<GradedPiece<Rational>>,
    pub fw_members: Vec<Member<Rational>>,
    /// Whether `F*L₀` (the pullback of the first HN member of `W`) occurs
    /// among the stated members.
    pub refinement: Subfiltration<Rational>,
    pub consistency: SlopeConsistency,
}

pub fn monsky_w_generate(d: u64, p: u64, delta: u64) -> Result<MonskyWExample, CurveError> {
    let check = monsky_prime_check(d, p, Variant::Fermat)?;
    if !check.holds {
        return Err(CurveError::CongruenceFail {
            d,
            p,
            variant: Variant::Fermat,
            modulus: check.modulus,
            residue: check.residue,
        });
    }
    let half_canonical = canonical_degree(d) / 2;
    if delta == 0 || (delta * p) as i64 > half_canonical {
        return Err(CurveError::DeltaOutOfRange {
            delta,
            p,
            max: half_canonical,
        });
    }
    let (d_i, p_i) = (d as i64, p as i64);
    let deg_l0 = d_i / 2 + delta as i64;
    let l0 = GradedPiece::int(1, deg_l0);
    let v = GradedPiece::int(2, -d_i);
    let w_profile = direct_sum_hn(&[l0, v])?;

    let deg_l1 = -(d_i * p_i) / 2 + canonical_degree(d) / 2;
    let pulled_l0 = GradedPiece::int(1, p_i * deg_l0);
    let quotient = GradedPiece::int(1, -(d_i * p_i) - deg_l1);
    let fw_stated = vec![GradedPiece::int(1, deg_l1), pulled_l0, quotient];
    let fw_members = cumulative_members(&fw_stated);

    let frob = FrobeniusData::single(p).expect("checked prime");
    let refinement = members_subfiltration(w_profile.strong_pullback(&frob).pieces(), &fw_stated)?;
    let consistency = SlopeConsistency::of(&fw_stated, &["L1", "F*L0", "F*V/L1"]);
    Ok(MonskyWExample {
        d,
        p,
        delta,
        w_profile,
        fw_stated,
        fw_members,
        refinement,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raynaud_three_one() {
        let ex = raynaud_generate(3, 1).unwrap();
        assert_eq!(ex.v_profile, Profile::from_ints(&[(1, 4), (2, 6)]).unwrap());
        assert_eq!(ex.fv_profile, Profile::from_ints(&[(2, 24), (1, 6)]).unwrap());
        assert!(!ex.refinement.holds);
        assert_eq!(ex.refinement.witness, Some(GradedPiece::int(1, 12)));
        assert_eq!(ex.threshold.value, Rational::from_ratio(81, 2));
        assert!(!ex.threshold_admits_p);
        assert_eq!((ex.pullback_bound.lhs.clone(), ex.pullback_bound.rhs.clone()), (q(6), q(6)));
        assert!(ex.pullback_bound.holds && ex.pullback_bound.hypothesis_ok);
    }

    #[test]
    fn raynaud_sweep_conservation_and_top_merge() {
        for p in [3u64, 5, 7, 11, 13] {
            for k in 1..=4 {
                let ex = raynaud_generate(p, k).unwrap();
                let inst = &ex.instance;
                let fb_total: Rational = inst.fb_pieces.iter().map(|x| x.degree.clone()).sum();
                assert_eq!(fb_total, inst.b.degree.clone() * q(p as i64));
                assert!(inst.l.slope() > inst.b.slope());
                assert_eq!(ex.fv_profile.total_degree(), ex.v_profile.total_degree() * q(p as i64));
                // F*L and Ω^{⊗(p−1)} share a slope, so the top piece has rank 2.
                assert_eq!(ex.fv_profile.first_piece().rank, 2);
                assert_eq!(
                    inst.l.degree.clone() * q(p as i64),
                    inst.fb_pieces.last().unwrap().degree
                );
                assert!(!ex.refinement.holds);
                assert!(!ex.threshold_admits_p);
            }
        }
    }

    #[test]
    fn raynaud_rejects_bad_parameters() {
        assert!(matches!(raynaud_generate(2, 1), Err(CurveError::EvenPrime)));
        assert!(matches!(raynaud_generate(9, 1), Err(CurveError::NotPrime(9))));
        assert!(matches!(raynaud_generate(3, 0), Err(CurveError::NonPositive("k"))));
    }

    #[test]
    fn monsky_w_eight_seven() {
        let ex = monsky_w_generate(8, 7, 1).unwrap();
        assert_eq!(ex.w_profile, Profile::from_ints(&[(1, 5), (2, -8)]).unwrap());
        assert_eq!(
            ex.fw_stated,
            vec![GradedPiece::int(1, -8), GradedPiece::int(1, 35), GradedPiece::int(1, -48)]
        );
        assert!(!ex.refinement.holds);
        assert_eq!(ex.refinement.witness, Some(GradedPiece::int(1, 35)));
        assert!(!ex.consistency.strictly_decreasing);
        assert_eq!(ex.consistency.first_violation, Some(0));
        assert!(ex.consistency.warning.is_some());
    }

    #[test]
    fn monsky_w_rejects_bad_parameters() {
        assert!(matches!(monsky_w_generate(8, 7, 3), Err(CurveError::DeltaOutOfRange { .. })));
        assert!(matches!(monsky_w_generate(8, 7, 0), Err(CurveError::DeltaOutOfRange { .. })));
        assert!(matches!(monsky_w_generate(8, 5, 1), Err(CurveError::CongruenceFail { .. })));
    }
}
