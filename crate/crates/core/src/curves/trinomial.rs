//! Hilbert-Kunz data of plane trinomial curves and the syzygy bundle `V`.
//!
//! For a smooth plane curve of degree `d` in characteristic `p`, let `s₁` be
//! the first Frobenius power at which `V` destabilizes and `l₁ = I(F^{s₁*}V)`.
//! Then `e_HK = 3d/4 + l₁²/(4 d p^{2 s₁})` with `l₁ ≡ pd (mod 2)` and
//! `0 <= l₁ <= d(d − 3)`.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::CurveError;
use crate::hn::{GradedPiece, HnProfile};
use crate::primes::{is_prime, primes_up_to};
use crate::scalar::Scalar;
use crate::{Profile, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `x^d + y^d + z^d`
    Fermat,
    /// `x^{d−1}y + y^{d−1}z + z^{d−1}x`
    Cyclic,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Fermat => "fermat",
            Variant::Cyclic => "cyclic",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, CurveError> {
        match s {
            "fermat" => Ok(Variant::Fermat),
            "cyclic" => Ok(Variant::Cyclic),
            other => Err(CurveError::UnknownVariant(other.to_string())),
        }
    }
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn require_prime(p: u64) -> Result<(), CurveError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(CurveError::NotPrime(p))
    }
}

/// `d(d − 3)`, the upper limit for `l₁` and the value of `2g − 2`.
pub fn canonical_degree(d: u64) -> i64 {
    d as i64 * (d as i64 - 3)
}

/// Arithmetic genus `(d − 1)(d − 2)/2` of a smooth plane curve.
pub fn plane_genus(d: u64) -> u64 {
    (d - 1) * (d - 2) / 2
}

fn check_l1(d: u64, p: u64, l1: u64) -> Result<(), CurveError> {
    if (l1 % 2) != ((p * d) % 2) {
        return Err(CurveError::ParityViolation { l1, p, d });
    }
    if (l1 as i64) > canonical_degree(d) {
        return Err(CurveError::RangeViolation {
            l1,
            max: canonical_degree(d),
        });
    }
    Ok(())
}

/// `e_HK = 3d/4 + l₁²/(4 d p^{2 s₁})`.
pub fn ehk_from_s1_l1(d: u64, p: u64, s1: u32, l1: u64) -> Result<Rational, CurveError> {
    require_prime(p)?;
    if d == 0 {
        return Err(CurveError::DegreeTooSmall { d, min: 1 });
    }
    if s1 == 0 {
        return Err(CurveError::ZeroS1);
    }
    check_l1(d, p, l1)?;
    let base = Rational::from_ratio(3 * d as i64, 4);
    let l1 = q(l1 as i64);
    let denom = q(4 * d as i64) * Rational::power_of(p, 2 * s1);
    Ok(base + l1.clone() * l1 / denom)
}

/// Result of reading `(s₁, l₁)` back from `e_HK`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Inversion {
    /// `F^{(s₁−1)*}V` semistable, `F^{s₁*}V` not.
    Destabilizes { s1: u32, l1: u64 },
    /// `e_HK = 3d/4`: `l₁ = 0`, `V` never destabilizes.
    SemistableForever,
}

/// Inverts [`ehk_from_s1_l1`]. Every admissible `(s₁, l₁)` is collected; more
/// than one is reported as ambiguous rather than resolved.
pub fn s1_l1_from_ehk(d: u64, p: u64, e_hk: &Rational) -> Result<Inversion, CurveError> {
    require_prime(p)?;
    if d == 0 {
        return Err(CurveError::DegreeTooSmall { d, min: 1 });
    }
    let excess = e_hk.clone() - Rational::from_ratio(3 * d as i64, 4);
    if excess.is_negative() {
        return Err(CurveError::NoSolution(e_hk.to_fraction_string()));
    }
    if excess.is_zero() {
        return Ok(Inversion::SemistableForever);
    }
    let max_l1 = canonical_degree(d);
    let mut found = Vec::new();
    let mut s1 = 1u32;
    loop {
        // l₁² = 4 d p^{2 s₁} (e_HK − 3d/4)
        let square = q(4 * d as i64) * Rational::power_of(p, 2 * s1) * excess.clone();
        if square > q(max_l1) * q(max_l1) {
            break;
        }
        if square.is_integer() {
            let n = square.to_integer();
            let root = n.sqrt();
            if &root * &root == n {
                let l1: u64 = root.try_into().expect("l1 bounded by d(d-3)");
                if check_l1(d, p, l1).is_ok() {
                    found.push((s1, l1));
                }
            }
        }
        s1 += 1;
    }
    match found.as_slice() {
        [] => Err(CurveError::NoSolution(e_hk.to_fraction_string())),
        [(s1, l1)] => Ok(Inversion::Destabilizes { s1: *s1, l1: *l1 }),
        _ => Err(CurveError::AmbiguousSolution(found)),
    }
}

/// Degree of the destabilizing line subbundle `L₁ ⊂ F^{s₁*}V`, together with
/// `I(F^{s₁*}V) = l₁`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DestabilizingLine {
    #[serde(with = "crate::scalar::fraction_serde")]
    pub degree: Rational,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub instability: Rational,
}

/// `deg L₁ = −(d/2)p^{s₁} + l₁/2`.
pub fn deg_l1(d: u64, p: u64, s1: u32, l1: u64) -> Result<DestabilizingLine, CurveError> {
    require_prime(p)?;
    check_l1(d, p, l1)?;
    let degree = -(Rational::from_ratio(d as i64, 2) * Rational::power_of(p, s1))
        + Rational::from_ratio(l1 as i64, 2);
    Ok(DestabilizingLine {
        degree,
        instability: q(l1 as i64),
    })
}

/// HN profile of `F^{s₁*}V`: `[(1, deg L₁), (1, −d p^{s₁} − deg L₁)]`, or the
/// single rank-2 piece when `l₁ = 0`.
pub fn syzygy_pullback_profile(d: u64, p: u64, s1: u32, l1: u64) -> Result<Profile, CurveError> {
    let line = deg_l1(d, p, s1, l1)?;
    let total = -(q(d as i64) * Rational::power_of(p, s1));
    let profile = if l1 == 0 {
        HnProfile::new(vec![GradedPiece::new(2, total)])
    } else {
        HnProfile::new(vec![
            GradedPiece::new(1, line.degree.clone()),
            GradedPiece::new(1, total - line.degree),
        ])
    };
    Ok(profile?)
}

/// Profile of `V` itself: rank 2, slope `−d/2`, semistable.
pub fn syzygy_profile(d: u64) -> Profile {
    HnProfile::new(vec![GradedPiece::new(2, q(-(d as i64)))]).expect("rank 2 piece")
}

/// Residue data for the congruence classes that carry the closed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceCheck {
    pub holds: bool,
    pub modulus: u64,
    pub residue: u64,
    /// Admissible residues, in the order `+`, `−`.
    pub targets: [u64; 2],
    pub matched: Option<u64>,
}

fn check_degree(d: u64) -> Result<(), CurveError> {
    if d < 4 {
        return Err(CurveError::DegreeTooSmall { d, min: 4 });
    }
    if d % 2 == 1 {
        return Err(CurveError::OddDegree(d));
    }
    Ok(())
}

/// Fermat: `p ≡ d ± 1 (mod 2d)`. Cyclic: `p ≡ ±(d − 1) (mod 2(d² − 3d + 3))`.
pub fn monsky_prime_check(d: u64, p: u64, variant: Variant) -> Result<CongruenceCheck, CurveError> {
    check_degree(d)?;
    require_prime(p)?;
    let (modulus, targets) = match variant {
        Variant::Fermat => {
            let m = 2 * d;
            (m, [(d + 1) % m, (d - 1) % m])
        }
        Variant::Cyclic => {
            let m = 2 * (d * d - 3 * d + 3);
            (m, [(d - 1) % m, m - (d - 1) % m])
        }
    };
    let residue = p % modulus;
    let matched = targets.iter().copied().find(|&t| t == residue);
    Ok(CongruenceCheck {
        holds: matched.is_some(),
        modulus,
        residue,
        targets,
        matched,
    })
}

/// Primes `<= limit` in the admissible congruence classes, ascending.
pub fn prime_search(d: u64, variant: Variant, limit: u64) -> Result<Vec<u64>, CurveError> {
    check_degree(d)?;
    let mut out = Vec::new();
    for p in primes_up_to(limit) {
        if monsky_prime_check(d, p, variant)?.holds {
            out.push(p);
        }
    }
    Ok(out)
}

/// Plane trinomial curve datum tying `e_HK` to the instability of `V`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrinomialInstance {
    pub d: u64,
    pub p: u64,
    pub variant: Variant,
    pub s1: u32,
    pub l1: u64,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub e_hk: Rational,
    pub genus: u64,
}

impl TrinomialInstance {
    pub fn new(d: u64, p: u64, variant: Variant, s1: u32, l1: u64) -> Result<Self, CurveError> {
        if d < 4 {
            return Err(CurveError::DegreeTooSmall { d, min: 4 });
        }
        let e_hk = ehk_from_s1_l1(d, p, s1, l1)?;
        Ok(Self {
            d,
            p,
            variant,
            s1,
            l1,
            e_hk,
            genus: plane_genus(d),
        })
    }

    /// Closed-form instance for a prime in the admissible class:
    /// `s₁ = 1`, `l₁ = d(d − 3)`.
    pub fn monsky(d: u64, p: u64, variant: Variant) -> Result<Self, CurveError> {
        let check = monsky_prime_check(d, p, variant)?;
        if !check.holds {
            return Err(CurveError::CongruenceFail {
                d,
                p,
                variant,
                modulus: check.modulus,
                residue: check.residue,
            });
        }
        Self::new(d, p, variant, 1, canonical_degree(d) as u64)
    }

    /// Closed form `3d/4 + (d(d−3))²/(4 d p²)`.
    pub fn closed_form_ehk(d: u64, p: u64) -> Rational {
        let c = q(canonical_degree(d));
        Rational::from_ratio(3 * d as i64, 4) + c.clone() * c / (q(4 * d as i64) * q(p as i64 * p as i64))
    }

    pub fn destabilizing_line(&self) -> DestabilizingLine {
        deg_l1(self.d, self.p, self.s1, self.l1).expect("validated at construction")
    }

    pub fn pullback_profile(&self) -> Profile {
        syzygy_pullback_profile(self.d, self.p, self.s1, self.l1).expect("validated at construction")
    }

    /// `2g − 2`.
    pub fn canonical_degree(&self) -> i64 {
        2 * self.genus as i64 - 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn ehk_examples() {
        assert_eq!(ehk_from_s1_l1(4, 5, 1, 4).unwrap(), fr(76, 25));
        assert_eq!(ehk_from_s1_l1(4, 11, 1, 4).unwrap(), fr(364, 121));
        assert_eq!(ehk_from_s1_l1(6, 7, 2, 0).unwrap(), fr(18, 4));
        assert!(matches!(ehk_from_s1_l1(4, 5, 1, 3), Err(CurveError::ParityViolation { .. })));
        assert!(matches!(ehk_from_s1_l1(4, 5, 1, 6), Err(CurveError::RangeViolation { .. })));
        assert!(matches!(ehk_from_s1_l1(4, 6, 1, 4), Err(CurveError::NotPrime(6))));
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(
            s1_l1_from_ehk(4, 5, &fr(76, 25)).unwrap(),
            Inversion::Destabilizes { s1: 1, l1: 4 }
        );
        assert_eq!(s1_l1_from_ehk(4, 5, &fr(3, 1)).unwrap(), Inversion::SemistableForever);
        assert!(matches!(s1_l1_from_ehk(4, 5, &fr(77, 25)), Err(CurveError::NoSolution(_))));
        assert!(matches!(s1_l1_from_ehk(4, 5, &fr(2, 1)), Err(CurveError::NoSolution(_))));
        // Every (s1, l1) with l1 = 2·3^(s1−1) gives the same value for d = 10, p = 3.
        let e = ehk_from_s1_l1(10, 3, 1, 2).unwrap();
        assert_eq!(ehk_from_s1_l1(10, 3, 2, 6).unwrap(), e);
        assert_eq!(
            s1_l1_from_ehk(10, 3, &e),
            Err(CurveError::AmbiguousSolution(vec![(1, 2), (2, 6), (3, 18), (4, 54)]))
        );
    }

    #[test]
    fn destabilizing_line_examples() {
        let a = deg_l1(4, 5, 1, 4).unwrap();
        assert_eq!((a.degree, a.instability), (fr(-8, 1), fr(4, 1)));
        let b = deg_l1(4, 11, 1, 4).unwrap();
        assert_eq!(b.degree, fr(-20, 1));
        let c = deg_l1(4, 5, 1, 0).unwrap();
        assert_eq!(c.degree, fr(-10, 1));
        let fv = syzygy_pullback_profile(4, 5, 1, 4).unwrap();
        assert_eq!(fv, Profile::from_ints(&[(1, -8), (1, -12)]).unwrap());
        assert_eq!(fv.instability_degree(), fr(4, 1));
        assert!(syzygy_pullback_profile(4, 5, 1, 0).unwrap().is_semistable());
    }

    #[test]
    fn congruence_examples() {
        let c = monsky_prime_check(4, 5, Variant::Fermat).unwrap();
        assert!(c.holds);
        assert_eq!((c.modulus, c.residue, c.matched), (8, 5, Some(5)));
        assert!(!monsky_prime_check(4, 7, Variant::Fermat).unwrap().holds);
        let c = monsky_prime_check(4, 3, Variant::Cyclic).unwrap();
        assert_eq!((c.modulus, c.matched), (14, Some(3)));
        assert!(matches!(monsky_prime_check(5, 5, Variant::Fermat), Err(CurveError::OddDegree(5))));
        assert!(matches!(
            monsky_prime_check(2, 5, Variant::Cyclic),
            Err(CurveError::DegreeTooSmall { .. })
        ));
    }

    #[test]
    fn prime_search_examples() {
        assert_eq!(prime_search(4, Variant::Fermat, 30).unwrap(), vec![3, 5, 11, 13, 19, 29]);
        assert_eq!(prime_search(4, Variant::Fermat, 2).unwrap(), Vec::<u64>::new());
        assert_eq!(prime_search(4, Variant::Cyclic, 20).unwrap(), vec![3, 11, 17]);
    }

    #[test]
    fn monsky_instances() {
        let inst = TrinomialInstance::monsky(4, 5, Variant::Fermat).unwrap();
        assert_eq!(inst.e_hk, fr(76, 25));
        assert_eq!(inst.e_hk, TrinomialInstance::closed_form_ehk(4, 5));
        assert_eq!(inst.genus, 3);
        assert_eq!(inst.canonical_degree(), 4);
        assert!(matches!(
            TrinomialInstance::monsky(4, 7, Variant::Fermat),
            Err(CurveError::CongruenceFail { .. })
        ));
    }
}
