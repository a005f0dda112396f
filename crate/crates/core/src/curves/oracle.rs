//! Brute-force Hilbert-Kunz function of a ternary form over `F_p`.
//!
//! `HK(q) = dim_k k[x,y,z]/(h, x^q, y^q, z^q)` is computed as
//! `q³ − rank(·h)` where `·h` acts on the monomial basis of
//! `k[x,y,z]/(x^q, y^q, z^q)`. For homogeneous `h` of degree `D` the map splits
//! into blocks `A_k → A_{k+D}`, which are eliminated independently. A single
//! run is sequential; distinct exponents are computed in parallel by
//! [`HkTable::fill`].

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::trinomial::Variant;
use crate::primes::is_prime;
use crate::scalar::Scalar;
use crate::Rational;

/// Default ceiling on `q³`, the dimension of the ambient Artinian ring.
pub const DEFAULT_BUDGET: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("q^3 = {cells} exceeds the oracle budget {limit}")]
    BudgetExceeded { cells: u128, limit: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial has no terms")]
    EmptyPolynomial,
    #[error("need entries for two consecutive exponents, have {0:?}")]
    InsufficientData(Vec<u32>),
    #[error("no entry for e = {0}")]
    MissingEntry(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coef: i64,
    pub exps: [u32; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polynomial {
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn new(terms: Vec<Term>) -> Result<Self, OracleError> {
        if terms.is_empty() {
            return Err(OracleError::EmptyPolynomial);
        }
        Ok(Self { terms })
    }

    fn monomial(exps: [u32; 3]) -> Term {
        Term { coef: 1, exps }
    }

    /// `x^d + y^d + z^d`
    pub fn fermat(d: u32) -> Self {
        Self {
            terms: vec![
                Self::monomial([d, 0, 0]),
                Self::monomial([0, d, 0]),
                Self::monomial([0, 0, d]),
            ],
        }
    }

    /// `x^{d−1}y + y^{d−1}z + z^{d−1}x`
    pub fn cyclic(d: u32) -> Self {
        Self {
            terms: vec![
                Self::monomial([d - 1, 1, 0]),
                Self::monomial([0, d - 1, 1]),
                Self::monomial([1, 0, d - 1]),
            ],
        }
    }

    pub fn for_variant(variant: Variant, d: u32) -> Self {
        match variant {
            Variant::Fermat => Self::fermat(d),
            Variant::Cyclic => Self::cyclic(d),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Common total degree of all terms, if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let deg = |t: &Term| t.exps.iter().sum::<u32>();
        let first = deg(&self.terms[0]);
        self.terms.iter().all(|t| deg(t) == first).then_some(first)
    }
}

type SparseRow = Vec<(u32, u32)>;

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// `row − factor·pivot`, both sorted by column.
fn subtract_scaled(row: &[(u32, u32)], pivot: &[(u32, u32)], factor: u64, p: u64) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j == pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_pivot = i == row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i]);
            i += 1;
        } else if take_pivot {
            let v = (p - factor * u64::from(pivot[j].1) % p) % p;
            if v != 0 {
                out.push((pivot[j].0, v as u32));
            }
            j += 1;
        } else {
            let v = (u64::from(row[i].1) + p - factor * u64::from(pivot[j].1) % p) % p;
            if v != 0 {
                out.push((row[i].0, v as u32));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rank over `F_p` of a sparse matrix given by rows with entries in `1..p`.
pub fn sparse_rank_mod_p(rows: Vec<SparseRow>, ncols: usize, p: u64) -> usize {
    let mut pivots: Vec<Option<SparseRow>> = vec![None; ncols];
    let mut rank = 0;
    for mut row in rows {
        while let Some(&(lead, val)) = row.first() {
            match &pivots[lead as usize] {
                Some(pivot) => row = subtract_scaled(&row, pivot, u64::from(val), p),
                None => {
                    let inv = inv_mod(u64::from(val), p);
                    for entry in &mut row {
                        entry.1 = (u64::from(entry.1) * inv % p) as u32;
                    }
                    pivots[lead as usize] = Some(row);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Monomials `x^a y^b z^c` with `a, b, c < q` and `a + b + c = k`.
fn graded_basis(q: u32, k: u32) -> Vec<[u32; 3]> {
    let top = q - 1;
    let mut out = Vec::new();
    for a in k.saturating_sub(2 * top)..=k.min(top) {
        let rest = k - a;
        for b in rest.saturating_sub(top)..=rest.min(top) {
            out.push([a, b, rest - b]);
        }
    }
    out
}

fn full_basis(q: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::with_capacity((q as usize).pow(3));
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Rank of multiplication by `h` from span(`source`) into span(`target`).
fn block_rank(terms: &[(u64, [u32; 3])], source: &[[u32; 3]], target: &[[u32; 3]], q: u32, p: u64) -> usize {
    if source.is_empty() || target.is_empty() {
        return 0;
    }
    let index: HashMap<[u32; 3], u32> = target
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i as u32))
        .collect();
    let rows = source
        .iter()
        .map(|m| {
            let mut acc: BTreeMap<u32, u64> = BTreeMap::new();
            for (coef, exps) in terms {
                let n = [m[0] + exps[0], m[1] + exps[1], m[2] + exps[2]];
                if n.iter().all(|&x| x < q) {
                    let col = index[&n];
                    let v = acc.entry(col).or_insert(0);
                    *v = (*v + coef) % p;
                }
            }
            acc.into_iter()
                .filter(|&(_, v)| v != 0)
                .map(|(c, v)| (c, v as u32))
                .collect()
        })
        .collect();
    sparse_rank_mod_p(rows, target.len(), p)
}

/// `HK(p^e) = dim_{F_p} F_p[x,y,z]/(h, x^q, y^q, z^q)`.
pub fn hk_colength(poly: &Polynomial, p: u64, e: u32, budget: u64) -> Result<u64, OracleError> {
    if !is_prime(p) {
        return Err(OracleError::NotPrime(p));
    }
    let cells = u128::from(p).pow(3 * e);
    if cells > u128::from(budget) {
        return Err(OracleError::BudgetExceeded { cells, limit: budget });
    }
    let q = p.pow(e) as u32;
    let terms: Vec<(u64, [u32; 3])> = poly
        .terms
        .iter()
        .map(|t| (t.coef.rem_euclid(p as i64) as u64, t.exps))
        .filter(|(c, _)| *c != 0)
        .collect();
    let rank: usize = match poly.homogeneous_degree() {
        Some(deg) => (0..=3 * (q - 1))
            .map(|k| block_rank(&terms, &graded_basis(q, k), &graded_basis(q, k + deg), q, p))
            .sum(),
        None => {
            let basis = full_basis(q);
            block_rank(&terms, &basis, &basis, q, p)
        }
    };
    Ok(cells as u64 - rank as u64)
}

/// Persisted HK values: `{"d":…,"p":…,"variant":…,"entries":{"e":colength}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HkTable {
    pub d: u64,
    pub p: u64,
    pub variant: String,
    pub entries: BTreeMap<u32, u64>,
}

impl HkTable {
    pub fn new(d: u64, p: u64, variant: impl Into<String>) -> Self {
        Self {
            d,
            p,
            variant: variant.into(),
            entries: BTreeMap::new(),
        }
    }

    /// Computes every missing exponent in `exponents`.
    pub fn fill(&mut self, poly: &Polynomial, exponents: &[u32], budget: u64) -> Result<(), OracleError> {
        let mut missing: Vec<u32> = exponents
            .iter()
            .copied()
            .filter(|e| !self.entries.contains_key(e))
            .collect();
        missing.sort_unstable();
        missing.dedup();
        let computed = missing
            .par_iter()
            .map(|&e| hk_colength(poly, self.p, e, budget).map(|v| (e, v)))
            .collect::<Result<Vec<_>, _>>()?;
        self.entries.extend(computed);
        Ok(())
    }

    pub fn q(&self, e: u32) -> Rational {
        Rational::power_of(self.p, e)
    }

    fn value(&self, e: u32) -> Result<Rational, OracleError> {
        self.entries
            .get(&e)
            .map(|&v| Rational::from_uint(v))
            .ok_or(OracleError::MissingEntry(e))
    }
}

/// Two-point fit of `HK(q) = a·q² + b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EhkFit {
    pub e1: u32,
    pub e2: u32,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub a: Rational,
    #[serde(with = "crate::scalar::fraction_serde")]
    pub b: Rational,
}

pub fn fit_between(table: &HkTable, e1: u32, e2: u32) -> Result<EhkFit, OracleError> {
    let (h1, h2) = (table.value(e1)?, table.value(e2)?);
    let (q1, q2) = (table.q(e1), table.q(e2));
    let (s1, s2) = (q1.clone() * q1, q2.clone() * q2);
    let a = (h2 - h1.clone()) / (s2 - s1.clone());
    let b = h1 - a.clone() * s1;
    Ok(EhkFit { e1, e2, a, b })
}

/// Fit through the two largest consecutive exponents in the table.
pub fn estimate_ehk(table: &HkTable) -> Result<EhkFit, OracleError> {
    let keys: Vec<u32> = table.entries.keys().copied().collect();
    let pair = keys
        .windows(2)
        .rev()
        .find(|w| w[1] == w[0] + 1)
        .ok_or_else(|| OracleError::InsufficientData(keys.clone()))?;
    fit_between(table, pair[0], pair[1])
}

/// Oracle values against a predicted multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormComparison {
    #[serde(with = "crate::scalar::fraction_serde")]
    pub target: Rational,
    pub fit: EhkFit,
    /// `a − target`
    #[serde(with = "crate::scalar::fraction_serde")]
    pub fit_deviation: Rational,
    /// `HK(q) − target·q²` for each tabulated `e`.
    pub residuals: BTreeMap<u32, String>,
    pub residual_constant: bool,
    pub exact: bool,
}

pub fn compare_with_closed_form(fit: EhkFit, table: &HkTable, target: &Rational) -> Result<ClosedFormComparison, OracleError> {
    let mut residuals = BTreeMap::new();
    let mut values = Vec::new();
    for e in [fit.e1, fit.e2] {
        let q = table.q(e);
        let r = table.value(e)? - target.clone() * q.clone() * q;
        residuals.insert(e, r.to_fraction_string());
        values.push(r);
    }
    let fit_deviation = fit.a.clone() - target.clone();
    Ok(ClosedFormComparison {
        target: target.clone(),
        exact: fit_deviation == Rational::from_int(0),
        residual_constant: values.windows(2).all(|w| w[0] == w[1]),
        fit,
        fit_deviation,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_x() -> Polynomial {
        Polynomial::new(vec![Term { coef: 1, exps: [1, 0, 0] }]).unwrap()
    }

    #[test]
    fn anchors() {
        for p in [2u64, 3, 5, 7] {
            assert_eq!(hk_colength(&Polynomial::fermat(4), p, 0, DEFAULT_BUDGET).unwrap(), 1);
            for e in 0..3 {
                let q = p.pow(e);
                if q.pow(3) <= 20_000 {
                    assert_eq!(hk_colength(&linear_x(), p, e, DEFAULT_BUDGET).unwrap(), q * q);
                }
            }
        }
    }

    #[test]
    fn non_homogeneous_path_agrees_on_a_unit() {
        // 1 + x is a unit in the Artinian ring, so the colength is zero.
        let unit = Polynomial::new(vec![
            Term { coef: 1, exps: [0, 0, 0] },
            Term { coef: 1, exps: [1, 0, 0] },
        ])
        .unwrap();
        assert_eq!(unit.homogeneous_degree(), None);
        assert_eq!(hk_colength(&unit, 3, 1, DEFAULT_BUDGET).unwrap(), 0);
    }

    #[test]
    fn coefficients_reduce_mod_p() {
        // 5x ≡ 0 in characteristic 5: nothing is killed.
        let dead = Polynomial::new(vec![Term { coef: 5, exps: [1, 0, 0] }]).unwrap();
        assert_eq!(hk_colength(&dead, 5, 1, DEFAULT_BUDGET).unwrap(), 125);
        let neg = Polynomial::new(vec![Term { coef: -1, exps: [1, 0, 0] }]).unwrap();
        assert_eq!(hk_colength(&neg, 5, 1, DEFAULT_BUDGET).unwrap(), 25);
    }

    #[test]
    fn regression_values() {
        assert_eq!(hk_colength(&Polynomial::fermat(4), 5, 1, DEFAULT_BUDGET).unwrap(), 75);
        assert_eq!(hk_colength(&Polynomial::cyclic(4), 11, 1, DEFAULT_BUDGET).unwrap(), 363);
        assert_eq!(hk_colength(&Polynomial::fermat(4), 3, 2, DEFAULT_BUDGET).unwrap(), 252);
    }

    #[test]
    fn budget_and_primality() {
        assert_eq!(
            hk_colength(&Polynomial::fermat(4), 5, 2, 10_000),
            Err(OracleError::BudgetExceeded { cells: 15_625, limit: 10_000 })
        );
        assert_eq!(
            hk_colength(&Polynomial::fermat(4), 4, 1, DEFAULT_BUDGET),
            Err(OracleError::NotPrime(4))
        );
    }

    #[test]
    fn sparse_rank_small_cases() {
        // [[1,2],[2,4]] over F_5 has rank 1; [[1,2],[3,4]] has rank 2.
        assert_eq!(sparse_rank_mod_p(vec![vec![(0, 1), (1, 2)], vec![(0, 2), (1, 4)]], 2, 5), 1);
        assert_eq!(sparse_rank_mod_p(vec![vec![(0, 1), (1, 2)], vec![(0, 3), (1, 4)]], 2, 5), 2);
        assert_eq!(sparse_rank_mod_p(vec![vec![], vec![(1, 3)]], 2, 7), 1);
    }

    /// q³ ≈ 2·10⁶ at e = 3; run with `--release -- --ignored`.
    #[test]
    #[ignore]
    fn fermat_four_five_later_exponents() {
        let mut t = HkTable::new(4, 5, "fermat");
        t.fill(&Polynomial::fermat(4), &[1, 2, 3], DEFAULT_BUDGET).unwrap();
        assert_eq!(t.entries.values().copied().collect::<Vec<_>>(), vec![75, 1900, 47500]);
        assert_eq!(estimate_ehk(&t).unwrap().a, Rational::from_ratio(76, 25));
        assert_eq!(fit_between(&t, 1, 2).unwrap().a, Rational::from_ratio(73, 24));
    }

    #[test]
    fn synthetic_fit() {
        let mut t = HkTable::new(4, 5, "synthetic");
        t.entries.insert(1, 3 * 25 + 1);
        t.entries.insert(2, 3 * 625 + 1);
        let fit = estimate_ehk(&t).unwrap();
        assert_eq!(fit.a, Rational::from_int(3));
        assert_eq!(fit.b, Rational::from_int(1));

        let mut single = HkTable::new(4, 5, "synthetic");
        single.entries.insert(1, 76);
        assert_eq!(estimate_ehk(&single), Err(OracleError::InsufficientData(vec![1])));
        single.entries.insert(3, 100);
        assert!(matches!(estimate_ehk(&single), Err(OracleError::InsufficientData(_))));
    }

    #[test]
    fn table_json_schema() {
        let mut t = HkTable::new(4, 5, "fermat");
        t.entries.insert(1, 75);
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"d":4,"p":5,"variant":"fermat","entries":{"1":75}}"#
        );
        let back: HkTable = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
