//! Laurent-polynomial arithmetic in q over the integers: quantum integers
//! [n]_d, cyclotomic polynomials, cyclotomic factorization, the denominator
//! set S attached to a simple type, and the bad-root-of-unity predicate.
//!
//! All arithmetic is exact over Z[q, q^-1]. Roots of unity never appear as
//! complex numbers; a primitive l-th root is represented by its cyclotomic
//! index l, so every predicate depends only on the multiplicative order.

use crate::rootdata::{self, LieType, Series};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QArithError {
    #[error("a root of unity has positive multiplicative order; got 0")]
    ZeroOrder,
    #[error("not a product of cyclotomics up to sign and a power of q; residual {residual}")]
    NonCyclotomicResidual { residual: LaurentPolynomial },
}

/// An element of Z[q, q^-1] in canonical sparse form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    pub fn monomial(exponent: i64, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        LaurentPolynomial { terms }
    }

    pub fn q_power(exponent: i64) -> Self {
        Self::monomial(exponent, BigInt::one())
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in pairs {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, exponent: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponent: i64) -> BigInt {
        self.terms.get(&exponent).cloned().unwrap_or_default()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }

    /// Multiply by q^k.
    pub fn shifted(&self, k: i64) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Exact division; `None` when `other` does not divide `self` in
    /// Z[q, q^-1].
    pub fn divide_exact(&self, other: &Self) -> Option<Self> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        // Normalize to ordinary polynomials with nonzero constant terms.
        let a_shift = self.min_exponent().unwrap();
        let b_shift = other.min_exponent().unwrap();
        let mut num = self.shifted(-a_shift);
        let den = other.shifted(-b_shift);
        let den_deg = den.max_exponent().unwrap();
        let den_lead = den.coeff(den_deg);
        let mut quot = Self::zero();
        while !num.is_zero() {
            let num_deg = num.max_exponent().unwrap();
            if num_deg < den_deg {
                return None;
            }
            let lead = num.coeff(num_deg);
            if (&lead % &den_lead) != BigInt::zero() {
                return None;
            }
            let q_term = Self::monomial(num_deg - den_deg, lead / &den_lead);
            num = num.sub(&q_term.mul(&den));
            quot = quot.add(&q_term);
        }
        Some(quot.shifted(a_shift - b_shift))
    }

    /// Bare (exponent, coefficient) pairs, descending in the exponent.
    pub fn pairs_descending(&self) -> Vec<(i64, BigInt)> {
        self.terms.iter().rev().map(|(k, c)| (*k, c.clone())).collect()
    }

    /// Palindromic under q -> q^-1.
    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(k, c)| self.coeff(-k) == *c)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one();
            match (*k, unit_coeff) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{mag}*q^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPolynomial {
    /// JSON form: array of [exponent, coefficient-string] pairs, descending.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (k, c) in self.terms.iter().rev() {
            seq.serialize_element(&(k, c.to_string()))?;
        }
        seq.end()
    }
}

/// `[n]_d = (q^{nd} - q^{-nd}) / (q^d - q^{-d})`.
pub fn quantum_integer(n: i64, d: i64) -> LaurentPolynomial {
    assert!(d >= 1, "quantum integer subscript d must be positive");
    if n == 0 {
        return LaurentPolynomial::zero();
    }
    if n < 0 {
        return quantum_integer(-n, d).neg();
    }
    // q^{d(n-1)} + q^{d(n-3)} + ... + q^{-d(n-1)}.
    LaurentPolynomial::from_terms((0..n).map(|k| (d * (n - 1 - 2 * k), BigInt::one())))
}

fn cyclotomic_cache() -> &'static Mutex<BTreeMap<u64, LaurentPolynomial>> {
    static CACHE: OnceLock<Mutex<BTreeMap<u64, LaurentPolynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// The l-th cyclotomic polynomial, an ordinary monic polynomial of degree
/// phi(l), by exact recursive division `(q^l - 1) / prod_{d | l, d < l} Phi_d`.
pub fn cyclotomic(l: u64) -> LaurentPolynomial {
    assert!(l >= 1, "cyclotomic index must be positive");
    if let Some(hit) = cyclotomic_cache().lock().unwrap().get(&l) {
        return hit.clone();
    }
    // Build bottom-up over divisors so each entry lands in the cache.
    let mut result = None;
    for d in 1..=l {
        if l % d != 0 {
            continue;
        }
        if d < l && cyclotomic_cache().lock().unwrap().contains_key(&d) {
            continue;
        }
        let mut num = LaurentPolynomial::from_terms([
            (d as i64, BigInt::one()),
            (0, -BigInt::one()),
        ]);
        for e in 1..d {
            if d % e == 0 {
                let phi_e = cyclotomic_cache().lock().unwrap().get(&e).cloned();
                let phi_e = phi_e.expect("divisors processed in increasing order");
                num = num
                    .divide_exact(&phi_e)
                    .expect("cyclotomic recursion divides exactly");
            }
        }
        cyclotomic_cache().lock().unwrap().insert(d, num.clone());
        if d == l {
            result = Some(num);
        }
    }
    result.expect("loop reaches d = l")
}

/// A factorization `sign * q^unit_exponent * prod Phi_l^{multiplicity}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclotomicFactorization {
    pub unit_exponent: i64,
    /// +1 or -1.
    pub sign: i8,
    /// index -> multiplicity.
    pub factors: BTreeMap<u64, u32>,
}

impl CyclotomicFactorization {
    /// Multiply the factorization back out.
    pub fn reassemble(&self) -> LaurentPolynomial {
        let mut p = LaurentPolynomial::q_power(self.unit_exponent);
        if self.sign < 0 {
            p = p.neg();
        }
        for (&l, &mult) in &self.factors {
            let phi = cyclotomic(l);
            for _ in 0..mult {
                p = p.mul(&phi);
            }
        }
        p
    }

    pub fn indices(&self) -> BTreeSet<u64> {
        self.factors.keys().copied().collect()
    }
}

impl fmt::Display for CyclotomicFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.unit_exponent != 0 {
            parts.push(format!("q^{}", self.unit_exponent));
        }
        for (l, mult) in &self.factors {
            if *mult == 1 {
                parts.push(format!("Phi{l}"));
            } else {
                parts.push(format!("Phi{l}^{mult}"));
            }
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        if self.sign < 0 {
            write!(f, "-{}", parts.join(" * "))
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// Factor `p` as `sign * q^k * prod Phi_l`; errors with the residual when `p`
/// is not of that form.
pub fn factor_into_cyclotomics(
    p: &LaurentPolynomial,
) -> Result<CyclotomicFactorization, QArithError> {
    if p.is_zero() {
        return Err(QArithError::NonCyclotomicResidual {
            residual: p.clone(),
        });
    }
    let unit_exponent = p.min_exponent().unwrap();
    let mut rest = p.shifted(-unit_exponent);
    let degree_bound = rest.max_exponent().unwrap().max(1) as u64;
    // phi(l) >= sqrt(l/2), so any cyclotomic factor has index at most
    // 2*deg^2; the loop degree-checks each candidate anyway.
    let index_bound = 2 * degree_bound * degree_bound + 2;
    let mut factors: BTreeMap<u64, u32> = BTreeMap::new();
    for l in 1..=index_bound {
        let phi = cyclotomic(l);
        if phi.max_exponent().unwrap() > rest.max_exponent().unwrap() {
            continue;
        }
        while let Some(quot) = rest.divide_exact(&phi) {
            *factors.entry(l).or_insert(0) += 1;
            rest = quot;
            if rest.max_exponent() == Some(0) {
                break;
            }
        }
        if rest.max_exponent() == Some(0) {
            break;
        }
    }
    let constant = rest.coeff(0);
    if rest.max_exponent() != Some(0) || !constant.abs().is_one() {
        return Err(QArithError::NonCyclotomicResidual {
            residual: rest.shifted(unit_exponent),
        });
    }
    Ok(CyclotomicFactorization {
        unit_exponent,
        sign: if constant.is_negative() { -1 } else { 1 },
        factors,
    })
}

/// The cyclotomic indices generating the denominator set S of a type, plus
/// the always-bad orders {1, 2} tracked separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadRootSet {
    #[serde(rename = "type")]
    pub lie_type: LieType,
    /// Indices l with Phi_l a generator of S.
    pub indices: BTreeSet<u64>,
    /// Orders bad regardless of type (epsilon in {1, -1}).
    pub always_bad_orders: [u64; 2],
}

/// The denominator set of the type's series class: empty for ADE, {4, 8} for
/// BCF, {3, 4, 6, 9, 12, 18} for G2.
pub fn denominator_set(t: LieType) -> BadRootSet {
    let indices: BTreeSet<u64> = match t.series() {
        Series::A | Series::D | Series::E => BTreeSet::new(),
        Series::B | Series::C | Series::F => [4, 8].into_iter().collect(),
        Series::G => [3, 4, 6, 9, 12, 18].into_iter().collect(),
    };
    BadRootSet {
        lie_type: t,
        indices,
        always_bad_orders: [1, 2],
    }
}

/// Whether a primitive l-th root of unity is bad for the type: l in {1, 2}
/// or Phi_l generates the denominator set.
pub fn is_bad_root(t: LieType, l: u64) -> Result<bool, QArithError> {
    if l == 0 {
        return Err(QArithError::ZeroOrder);
    }
    Ok(l <= 2 || denominator_set(t).indices.contains(&l))
}

/// One quantum integer consulted by [`verify_s_characterization`] and its
/// factor indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SWitness {
    pub n: i64,
    pub d: i64,
    pub factor_indices: BTreeSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SCharacterization {
    #[serde(rename = "type")]
    pub lie_type: LieType,
    pub computed: BTreeSet<u64>,
    pub expected: BTreeSet<u64>,
    pub matches: bool,
    pub witnesses: Vec<SWitness>,
}

/// Checks that the denominator set equals the set of irreducible factors of
/// the quantum integers `[n]_{d_i}` for `2 <= n <= max(|a_ij|, |a_ji|)`,
/// ranging over pairs of distinct nodes. The bound is symmetric in the pair,
/// so the verdict does not depend on the Cartan-matrix orientation.
pub fn verify_s_characterization(t: LieType) -> SCharacterization {
    let rs = rootdata::build_root_system(t);
    let r = t.rank();
    let mut consulted: BTreeSet<(i64, i64)> = BTreeSet::new();
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            let bound = rs.cartan[i][j].abs().max(rs.cartan[j][i].abs());
            for n in 2..=bound {
                consulted.insert((n, rs.symmetrizers[i]));
            }
        }
    }
    let mut computed = BTreeSet::new();
    let mut witnesses = Vec::new();
    for (n, d) in consulted {
        let fact = factor_into_cyclotomics(&quantum_integer(n, d))
            .expect("quantum integers factor into cyclotomics");
        let indices = fact.indices();
        computed.extend(indices.iter().copied());
        witnesses.push(SWitness {
            n,
            d,
            factor_indices: indices,
        });
    }
    let expected = denominator_set(t).indices;
    let matches = computed == expected;
    SCharacterization {
        lie_type: t,
        computed,
        expected,
        matches,
        witnesses,
    }
}
