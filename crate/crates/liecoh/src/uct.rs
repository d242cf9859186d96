//! Universal-coefficient bookkeeping over Z: for a cochain complex K of
//! free abelian groups and coefficients A (Q or F_p) there is a short exact
//! sequence
//!
//!   0 -> Hⁿ(K) ⊗ A -> Hⁿ(K ⊗ A) -> Tor₁(Hⁿ⁺¹(K), A) -> 0,
//!
//! so the three dimensions satisfy first = second + third in every degree.
//! Tor is never resolved: against Q it vanishes, and Tor₁(Z/d, F_p) is one
//! dimensional exactly when p divides d, so invariant factors from Smith
//! normal form carry all of it.

use crate::cecohomology::CochainComplex;
use crate::linalg::{Domain, ExactMatrix, LinalgError};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UctError {
    #[error("universal-coefficient verification starts from a Z complex, got {domain}")]
    NotIntegerComplex { domain: Domain },
    #[error("coefficients must be Q or F_p, got {domain}")]
    BadCoefficients { domain: Domain },
    #[error("degree {n}: d_{n} maps into rank {nrows} but d_{next} has {ncols} columns")]
    ShapeMismatch { n: usize, nrows: usize, next: usize, ncols: usize },
    #[error("d_{next} ∘ d_{n} is nonzero; not a complex")]
    NotAComplex { n: usize, next: usize },
    #[error("b = 0 annihilates everything; the b-torsion count needs b != 0")]
    ZeroAnnihilator,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The free rank and nonunit invariant factors of one cohomology group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeEntry {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

/// Per-degree description of H•(K, Z) for an integral cochain complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralComplexData {
    pub entries: Vec<DegreeEntry>,
}

/// Count of invariant factors divisible by b, which is the dimension of the
/// b-torsion submodule {m : b·m = 0} when b is prime.
pub fn tor_b_torsion(entry: &DegreeEntry, b: &BigInt) -> Result<usize, UctError> {
    if b.is_zero() {
        return Err(UctError::ZeroAnnihilator);
    }
    Ok(entry
        .invariant_factors
        .iter()
        .filter(|d| (*d % b).is_zero())
        .count())
}

/// Tor₁ against Z/p vanishes iff no invariant factor is divisible by p;
/// when that holds at every prime the group is free.
pub fn freeness_criterion(entry: &DegreeEntry, p: u64) -> bool {
    let p = BigInt::from(p);
    entry.invariant_factors.iter().all(|d| !(d % &p).is_zero())
}

fn check_chain(differentials: &[ExactMatrix]) -> Result<(), UctError> {
    for n in 0..differentials.len().saturating_sub(1) {
        let (d, next) = (&differentials[n], &differentials[n + 1]);
        if next.ncols() != d.nrows() {
            return Err(UctError::ShapeMismatch {
                n,
                nrows: d.nrows(),
                next: n + 1,
                ncols: next.ncols(),
            });
        }
        if !next.multiply(d)?.is_zero() {
            return Err(UctError::NotAComplex { n, next: n + 1 });
        }
    }
    Ok(())
}

/// Free ranks and torsion of H•(K, Z) from Smith normal forms. Degree n is
/// the column space of differentials[n]; the last differential may map into
/// rank 0 to terminate the complex.
pub fn integral_data(differentials: &[ExactMatrix]) -> Result<IntegralComplexData, UctError> {
    for d in differentials {
        if d.domain() != Domain::Integer {
            return Err(UctError::NotIntegerComplex { domain: d.domain() });
        }
    }
    check_chain(differentials)?;
    let smith: Vec<_> = differentials
        .par_iter()
        .map(|d| d.smith_normal_form())
        .collect::<Result<Vec<_>, _>>()?;
    let entries = (0..differentials.len())
        .map(|n| {
            let below = if n == 0 { 0 } else { smith[n - 1].rank };
            DegreeEntry {
                free_rank: differentials[n].ncols() - smith[n].rank - below,
                invariant_factors: if n == 0 {
                    Vec::new()
                } else {
                    smith[n - 1].nonunit_factors()
                },
            }
        })
        .collect();
    Ok(IntegralComplexData { entries })
}

/// Per-degree dimension triple (Hⁿ(K⊗A), Hⁿ(K)⊗A, Tor₁(Hⁿ⁺¹(K), A)) and
/// the verdict of the identity first = second + third.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UctVerdict {
    pub coefficients: Domain,
    pub triples: Vec<(usize, usize, usize)>,
    pub pass: bool,
}

impl Serialize for UctVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("UctVerdict", 3)?;
        st.serialize_field(
            "coefficients",
            &crate::cecohomology::field_tag(self.coefficients),
        )?;
        st.serialize_field("triples", &self.triples)?;
        st.serialize_field("pass", &self.pass)?;
        st.end()
    }
}

/// Verify the dimension identity on a raw differential chain over Z.
pub fn verify_uct_differentials(
    differentials: &[ExactMatrix],
    coeff: Domain,
) -> Result<UctVerdict, UctError> {
    let data = integral_data(differentials)?;
    verify_uct_with_data(&data, differentials, coeff)
}

/// Same identity, but against precomputed invariant factors, so a scan over
/// many coefficient fields pays for the Smith normal forms only once. The
/// caller is responsible for `data` matching `differentials`.
pub fn verify_uct_with_data(
    data: &IntegralComplexData,
    differentials: &[ExactMatrix],
    coeff: Domain,
) -> Result<UctVerdict, UctError> {
    let p = match coeff {
        Domain::Rational => None,
        Domain::Prime(p) => {
            coeff.check()?;
            Some(BigInt::from(p))
        }
        Domain::Integer => return Err(UctError::BadCoefficients { domain: coeff }),
    };
    assert_eq!(
        data.entries.len(),
        differentials.len(),
        "invariant-factor table does not cover the chain"
    );
    let field_ranks: Vec<usize> = differentials
        .par_iter()
        .map(|d| d.with_domain(coeff).rank())
        .collect::<Result<_, _>>()?;
    let degrees = differentials.len();
    let mut triples = Vec::with_capacity(degrees);
    for n in 0..degrees {
        let below = if n == 0 { 0 } else { field_ranks[n - 1] };
        let actual = differentials[n].ncols() - field_ranks[n] - below;
        let entry = &data.entries[n];
        let (tensor, tor) = match &p {
            None => (entry.free_rank, 0),
            Some(p) => {
                let here = tor_b_torsion(entry, p)?;
                let above = if n + 1 < degrees {
                    tor_b_torsion(&data.entries[n + 1], p)?
                } else {
                    0
                };
                (entry.free_rank + here, above)
            }
        };
        triples.push((actual, tensor, tor));
    }
    let pass = triples.iter().all(|(a, b, c)| *a == b + c);
    Ok(UctVerdict {
        coefficients: coeff,
        triples,
        pass,
    })
}

/// Verify the dimension identity on an integral Chevalley–Eilenberg complex.
pub fn verify_uct(cx: &CochainComplex, coeff: Domain) -> Result<UctVerdict, UctError> {
    if cx.domain() != Domain::Integer {
        return Err(UctError::NotIntegerComplex {
            domain: cx.domain(),
        });
    }
    verify_uct_differentials(cx.differentials(), coeff)
}

/// The complex cut off after degree n: differentials below n survive and
/// degree n maps to zero. Degrees < n of any verdict are unaffected.
pub fn truncate_differentials(differentials: &[ExactMatrix], n: usize) -> Vec<ExactMatrix> {
    assert!(n < differentials.len());
    let mut out: Vec<ExactMatrix> = differentials[..n].to_vec();
    let domain = differentials[0].domain();
    out.push(ExactMatrix::zero(0, differentials[n].ncols(), domain));
    out
}
