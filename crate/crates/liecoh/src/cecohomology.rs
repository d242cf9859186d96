//! The cochain complex Λ•(𝔤*) of a Lie algebra with differential induced by
//! the bracket, and everything computed from it: Betti numbers over Q and
//! F_p, integral torsion, the invariant subalgebra, primitive generators,
//! exterior-structure certification, and characteristic-p scans.
//!
//! Degree-1 convention: (dξ)(x, y) = -ξ([x, y]), extended so that
//! (dξ)(x_0,..,x_n) = Σ_{i<j} (-1)^{i+j} ξ([x_i,x_j], x_0,..,x̂_i,..,x̂_j,..).
//! Any consistent sign gives isomorphic cohomology; this one is fixed so the
//! differential matrices are byte-stable.
//!
//! Wedge monomials are sorted index tuples in colexicographic order; the
//! rank of (i_1 < .. < i_n) is Σ_k C(i_k, k).

use crate::chevalley::ChevalleyAlgebra;
use crate::linalg::{Domain, ExactMatrix, ExactScalar, LinalgError};
use crate::rootdata::{self, LieType, RootSystem};
use num_bigint::BigInt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CeError {
    #[error("Betti numbers need field coefficients; use integral_cohomology over Z")]
    IntegerCoefficients,
    #[error("integral cohomology needs Z coefficients, got {domain}")]
    NotIntegerCoefficients { domain: Domain },
    #[error("{what} is only computed over Q; complete reducibility fails in characteristic p")]
    NeedsRationalCoefficients { what: &'static str },
    #[error("dim g = {dim} exceeds the supported cutoff {max}; pass best_effort to force")]
    TooLarge { dim: usize, max: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Chevalley(#[from] crate::chevalley::ChevalleyError),
}

/// Size gate for the heavy operations. The default cutoff keeps the largest
/// wedge space at C(16, 8) = 12870 monomials.
#[derive(Debug, Clone, Copy)]
pub struct ComplexConfig {
    pub max_dim: usize,
    pub best_effort: bool,
}

impl Default for ComplexConfig {
    fn default() -> Self {
        ComplexConfig {
            max_dim: 16,
            best_effort: false,
        }
    }
}

impl ComplexConfig {
    fn ensure(&self, dim: usize) -> Result<(), CeError> {
        if dim > self.max_dim && !self.best_effort {
            return Err(CeError::TooLarge {
                dim,
                max: self.max_dim,
            });
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All n-subsets of {0..dim-1} as sorted tuples, in colexicographic order.
fn wedge_basis(dim: usize, n: usize) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::with_capacity(binomial(dim, n));
    for last in (n - 1)..dim {
        for mut prefix in wedge_basis(last, n - 1) {
            prefix.push(last as u8);
            out.push(prefix);
        }
    }
    out
}

/// Colex rank of a sorted tuple.
fn wedge_rank(monomial: &[u8]) -> usize {
    monomial
        .iter()
        .enumerate()
        .map(|(k, &i)| binomial(i as usize, k + 1))
        .sum()
}

/// Parity sign (-1)^{#(l, r) with l > r} of merging two sorted tuples.
fn merge_sign(left: &[u8], right: &[u8]) -> i64 {
    let mut inversions = 0usize;
    for &l in left {
        inversions += right.iter().filter(|&&r| r < l).count();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An element of Λⁿ as a sparse coordinate vector over the wedge basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    pub degree: usize,
    /// (monomial rank, coefficient), sorted by rank.
    pub coords: Vec<(u32, BigInt)>,
}

/// The Chevalley–Eilenberg cochain complex of a Lie algebra over Z, Q, or
/// F_p. d² = 0 is verified at construction.
#[derive(Debug, Clone)]
pub struct CochainComplex {
    domain: Domain,
    dim_g: usize,
    bases: Vec<Vec<Vec<u8>>>,
    /// differentials[n] : Λⁿ → Λⁿ⁺¹ for n = 0..=dim_g (the top one is 0 x 1).
    differentials: Vec<ExactMatrix>,
}

impl CochainComplex {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim_g(&self) -> usize {
        self.dim_g
    }

    pub fn basis(&self, n: usize) -> &[Vec<u8>] {
        &self.bases[n]
    }

    pub fn differential(&self, n: usize) -> &ExactMatrix {
        &self.differentials[n]
    }

    /// All differentials d_0, .., d_{dim g}; entry n maps Λⁿ to Λⁿ⁺¹ and
    /// the last one is the zero map out of the top degree.
    pub fn differentials(&self) -> &[ExactMatrix] {
        &self.differentials
    }

    /// betti[n] = dim ker d_n - rank d_{n-1}, over the field of the complex.
    pub fn betti_numbers(&self) -> Result<Vec<usize>, CeError> {
        if self.domain == Domain::Integer {
            return Err(CeError::IntegerCoefficients);
        }
        let ranks: Vec<usize> = self
            .differentials
            .par_iter()
            .map(|d| d.rank())
            .collect::<Result<_, _>>()?;
        Ok((0..=self.dim_g)
            .map(|n| {
                let below = if n == 0 { 0 } else { ranks[n - 1] };
                binomial(self.dim_g, n) - ranks[n] - below
            })
            .collect())
    }

    /// Free ranks and torsion of H^n(−, Z): the free part mirrors the
    /// rational Betti numbers and the degree-n torsion is the set of
    /// nonunit invariant factors of d_{n-1}.
    pub fn integral_cohomology(&self) -> Result<IntegralCohomology, CeError> {
        if self.domain != Domain::Integer {
            return Err(CeError::NotIntegerCoefficients {
                domain: self.domain,
            });
        }
        let smith: Vec<_> = self
            .differentials
            .par_iter()
            .map(|d| d.smith_normal_form())
            .collect::<Result<Vec<_>, _>>()?;
        let free_ranks: Vec<usize> = (0..=self.dim_g)
            .map(|n| {
                let below = if n == 0 { 0 } else { smith[n - 1].rank };
                binomial(self.dim_g, n) - smith[n].rank - below
            })
            .collect();
        let torsion: Vec<Vec<BigInt>> = (0..=self.dim_g)
            .map(|n| {
                if n == 0 {
                    Vec::new()
                } else {
                    smith[n - 1].nonunit_factors()
                }
            })
            .collect();
        Ok(IntegralCohomology {
            free_ranks,
            torsion,
        })
    }
}

/// H^n(−, Z) = Z^{free_ranks[n]} ⊕ ⊕_i Z/torsion[n][i].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralCohomology {
    pub free_ranks: Vec<usize>,
    pub torsion: Vec<Vec<BigInt>>,
}

/// Boundary of one wedge monomial: ∂(x_{k_0} ∧ .. ∧ x_{k_n}) =
/// Σ_{a<b} (-1)^{a+b} [x_{k_a}, x_{k_b}] ∧ (rest), normalized onto the
/// monomial basis one degree down.
fn boundary_of_monomial(alg: &ChevalleyAlgebra, monomial: &[u8]) -> BTreeMap<usize, i64> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    let n = monomial.len();
    for a in 0..n {
        for b in a + 1..n {
            let pair_sign = if (a + b) % 2 == 0 { 1 } else { -1 };
            let rest: Vec<u8> = monomial
                .iter()
                .enumerate()
                .filter(|(pos, _)| *pos != a && *pos != b)
                .map(|(_, &i)| i)
                .collect();
            for (t, c) in alg.bracket(monomial[a] as usize, monomial[b] as usize) {
                let t = *t as u8;
                if rest.binary_search(&t).is_ok() {
                    continue;
                }
                let smaller = rest.iter().filter(|&&r| r < t).count();
                let insert_sign = if smaller % 2 == 0 { 1 } else { -1 };
                let mut target = rest.clone();
                target.insert(smaller, t);
                *acc.entry(wedge_rank(&target)).or_insert(0) +=
                    pair_sign * c * insert_sign;
            }
        }
    }
    acc.retain(|_, v| *v != 0);
    acc
}

/// Build the full complex and verify d² = 0 at every degree.
pub fn build_ce_complex(alg: &ChevalleyAlgebra, domain: Domain) -> CochainComplex {
    if let Some(p) = alg.modulus() {
        assert_eq!(
            domain,
            Domain::Prime(p),
            "an algebra over F_p only supports an F_p complex"
        );
    }
    let dim = alg.dimension();
    let bases: Vec<Vec<Vec<u8>>> = (0..=dim).map(|n| wedge_basis(dim, n)).collect();
    let differentials: Vec<ExactMatrix> = (0..=dim)
        .into_par_iter()
        .map(|n| {
            if n == dim {
                return ExactMatrix::zero(0, 1, domain);
            }
            // d_n[rank K][rank I] = coefficient of e_I in ∂(e_K).
            let mut triples = Vec::new();
            for (row, k_monomial) in bases[n + 1].iter().enumerate() {
                for (col, coeff) in boundary_of_monomial(alg, k_monomial) {
                    triples.push((row, col, coeff));
                }
            }
            ExactMatrix::from_integer_triples(
                binomial(dim, n + 1),
                binomial(dim, n),
                domain,
                triples,
            )
        })
        .collect();
    let squares_vanish = (0..dim)
        .into_par_iter()
        .all(|n| {
            differentials[n + 1]
                .multiply(&differentials[n])
                .expect("same domain")
                .is_zero()
        });
    assert!(squares_vanish, "d^2 = 0 must hold");
    CochainComplex {
        domain,
        dim_g: dim,
        bases,
        differentials,
    }
}

/// Dual action of x_t on degree 1: x_t · ε^i = -Σ_j c_{tj}^i ε^j where
/// [x_t, e_j] = Σ_i c_{tj}^i e_i. Returned as dual[i] = [(j, -c), ..].
fn dual_degree_one(alg: &ChevalleyAlgebra, t: usize) -> Vec<Vec<(u8, i64)>> {
    let dim = alg.dimension();
    let mut dual: Vec<Vec<(u8, i64)>> = vec![Vec::new(); dim];
    for j in 0..dim {
        for (i, c) in alg.bracket(t, j) {
            dual[*i].push((j as u8, -c));
        }
    }
    dual
}

/// Image of one wedge monomial under the derivation extending a degree-1
/// dual action, as (target rank, coefficient) pairs.
fn coadjoint_image(dual: &[Vec<(u8, i64)>], monomial: &[u8]) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for (pos, &ik) in monomial.iter().enumerate() {
        for &(j, coeff) in &dual[ik as usize] {
            if j != ik && monomial.binary_search(&j).is_ok() {
                continue;
            }
            // Replace slot pos by j and resort; inversions of j against the
            // untouched entries give the sign.
            let mut inversions = 0usize;
            let mut target: Vec<u8> = Vec::with_capacity(monomial.len());
            for (q, &iq) in monomial.iter().enumerate() {
                if q == pos {
                    continue;
                }
                if (q < pos && iq > j) || (q > pos && iq < j) {
                    inversions += 1;
                }
                target.push(iq);
            }
            let insert_at = target.partition_point(|&x| x < j);
            target.insert(insert_at, j);
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            out.push((wedge_rank(&target), coeff * sign));
        }
    }
    out
}

/// The coadjoint action of basis element x_t on Λⁿ(𝔤*):
/// (x·ξ)(y_1..y_n) = -Σ_k ξ(y_1,..,[x,y_k],..,y_n), a degree-0 derivation.
pub fn coadjoint_matrix(
    cx: &CochainComplex,
    alg: &ChevalleyAlgebra,
    t: usize,
    n: usize,
) -> ExactMatrix {
    let dual = dual_degree_one(alg, t);
    let mut triples = Vec::new();
    for (col, monomial) in cx.bases[n].iter().enumerate() {
        for (row, coeff) in coadjoint_image(&dual, monomial) {
            triples.push((row, col, coeff));
        }
    }
    let size = binomial(cx.dim_g, n);
    ExactMatrix::from_integer_triples(size, size, cx.domain, triples)
}

fn weight_of_basis_element(rs: &RootSystem, num_h: usize, idx: usize) -> Vec<i64> {
    let rank = rs.lie_type.rank();
    let m = rs.num_positive_roots();
    if idx < num_h {
        return vec![0; rank];
    }
    if idx < num_h + m {
        return rs.positive_roots[idx - num_h].clone();
    }
    rs.positive_roots[idx - num_h - m].iter().map(|c| -c).collect()
}

/// Root-lattice weights of all basis elements plus the simple raising and
/// lowering operators, which generate the algebra. None for an abelian
/// algebra, whose coadjoint action is trivial.
fn action_setup(alg: &ChevalleyAlgebra) -> Option<(Vec<Vec<i64>>, Vec<usize>)> {
    let lie_type = alg.lie_type()?;
    let rs = rootdata::build_root_system(lie_type);
    let weights = (0..alg.dimension())
        .map(|i| weight_of_basis_element(&rs, alg.num_h(), i))
        .collect();
    let mut operators = Vec::new();
    for i in 0..lie_type.rank() {
        let mut simple = vec![0i64; lie_type.rank()];
        simple[i] = 1;
        let idx = rs.positive_root_index(&simple).expect("simple root");
        operators.push(alg.positive_vector_index(idx));
        operators.push(alg.negative_vector_index(idx));
    }
    Some((weights, operators))
}

fn monomial_weight(weights: &[Vec<i64>], monomial: &[u8]) -> Vec<i64> {
    let rank = weights.first().map_or(0, Vec::len);
    let mut total = vec![0i64; rank];
    for &i in monomial {
        for (acc, w) in total.iter_mut().zip(&weights[i as usize]) {
            *acc += w;
        }
    }
    total
}

/// Monomial ranks in degree n grouped by total weight.
fn weight_buckets(
    cx: &CochainComplex,
    weights: &[Vec<i64>],
    n: usize,
) -> BTreeMap<Vec<i64>, Vec<usize>> {
    let mut buckets: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (rank, monomial) in cx.bases[n].iter().enumerate() {
        buckets
            .entry(monomial_weight(weights, monomial))
            .or_default()
            .push(rank);
    }
    buckets
}

/// Per-degree basis of the invariant subalgebra Λ•(𝔤*)^𝔤 over Q.
///
/// Invariant forms are supported on weight-0 monomials (the Cartan acts
/// diagonally), so only those columns enter the kernel computation; the
/// remaining conditions are the simple-root raising and lowering operators,
/// which generate the algebra.
pub fn invariant_subalgebra(
    cx: &CochainComplex,
    alg: &ChevalleyAlgebra,
) -> Result<Vec<Vec<GradedElement>>, CeError> {
    if cx.domain != Domain::Rational {
        return Err(CeError::NeedsRationalCoefficients {
            what: "the invariant subalgebra",
        });
    }
    let Some((weights, operators)) = action_setup(alg) else {
        // Trivial coadjoint action: every form is invariant.
        return Ok((0..=cx.dim_g)
            .map(|n| {
                (0..binomial(cx.dim_g, n))
                    .map(|rank| GradedElement {
                        degree: n,
                        coords: vec![(rank as u32, BigInt::one())],
                    })
                    .collect()
            })
            .collect());
    };
    let per_degree: Vec<Vec<GradedElement>> = (0..=cx.dim_g)
        .into_par_iter()
        .map(|n| invariants_at_degree(cx, alg, &weights, &operators, n))
        .collect::<Result<_, _>>()?;
    Ok(per_degree)
}

fn invariants_at_degree(
    cx: &CochainComplex,
    alg: &ChevalleyAlgebra,
    weights: &[Vec<i64>],
    operators: &[usize],
    n: usize,
) -> Result<Vec<GradedElement>, CeError> {
    let rank = weights.first().map_or(0, Vec::len);
    let buckets = weight_buckets(cx, weights, n);
    let Some(zero_weight_cols) = buckets.get(&vec![0i64; rank]) else {
        return Ok(Vec::new());
    };
    // One block of rows per operator, columns restricted to weight 0.
    let full = binomial(cx.dim_g, n);
    let mut triples: Vec<(usize, usize, i64)> = Vec::new();
    for (slot, &t) in operators.iter().enumerate() {
        let dual = dual_degree_one(alg, t);
        for (col, &monomial_rank) in zero_weight_cols.iter().enumerate() {
            for (target, coeff) in coadjoint_image(&dual, &cx.bases[n][monomial_rank]) {
                triples.push((slot * full + target, col, coeff));
            }
        }
    }
    let stacked = ExactMatrix::from_integer_triples(
        operators.len() * full,
        zero_weight_cols.len(),
        Domain::Rational,
        triples,
    );
    let kernel = stacked.kernel_basis()?;
    Ok(kernel
        .into_iter()
        .map(|vector| {
            let coords: Vec<(u32, BigInt)> = vector
                .iter()
                .enumerate()
                .filter_map(|(restricted, s)| match s {
                    ExactScalar::Rat(x) if !x.is_zero() => {
                        assert!(x.denom().is_one(), "kernel vectors are integral");
                        Some((zero_weight_cols[restricted] as u32, x.numer().clone()))
                    }
                    _ => None,
                })
                .collect();
            GradedElement { degree: n, coords }
        })
        .collect())
}

/// Basis of invariant coordinate functionals on Λⁿ: covectors annihilating
/// the images of all action operators, i.e. the trivial isotypic component
/// of the dual module. Like invariant forms they are supported on weight-0
/// monomials. Any basis of this space detects vanishing of the invariant
/// projection, which is all the primitive test needs.
fn invariant_functionals(
    cx: &CochainComplex,
    alg: &ChevalleyAlgebra,
    weights: &[Vec<i64>],
    operators: &[usize],
    n: usize,
) -> Result<Vec<Vec<(u32, BigInt)>>, CeError> {
    let rank = weights.first().map_or(0, Vec::len);
    let buckets = weight_buckets(cx, weights, n);
    let Some(zero_weight_cols) = buckets.get(&vec![0i64; rank]) else {
        return Ok(Vec::new());
    };
    let zero_index: BTreeMap<usize, usize> = zero_weight_cols
        .iter()
        .enumerate()
        .map(|(pos, &r)| (r, pos))
        .collect();
    // λ(L_t(ε_J)) = 0 for every monomial J and operator t. The image of a
    // weight-w monomial has weight w - wt(t), so only J of weight wt(t)
    // constrain the weight-0 coordinates.
    let mut triples: Vec<(usize, usize, i64)> = Vec::new();
    let mut nrows = 0usize;
    for &t in operators {
        let dual = dual_degree_one(alg, t);
        let Some(sources) = buckets.get(&weights[t]) else {
            continue;
        };
        for &source in sources {
            for (target, coeff) in coadjoint_image(&dual, &cx.bases[n][source]) {
                if let Some(&col) = zero_index.get(&target) {
                    triples.push((nrows, col, coeff));
                }
            }
            nrows += 1;
        }
    }
    let matrix = ExactMatrix::from_integer_triples(
        nrows.max(1),
        zero_weight_cols.len(),
        Domain::Rational,
        triples,
    );
    let kernel = matrix.kernel_basis()?;
    Ok(kernel
        .into_iter()
        .map(|vector| {
            vector
                .iter()
                .enumerate()
                .filter_map(|(restricted, s)| match s {
                    ExactScalar::Rat(x) if !x.is_zero() => {
                        assert!(x.denom().is_one(), "kernel vectors are integral");
                        Some((zero_weight_cols[restricted] as u32, x.numer().clone()))
                    }
                    _ => None,
                })
                .collect()
        })
        .collect())
}

/// Lexicographic step through a-subsets of {0..n-1}. Returns false once
/// the last combination has been visited.
fn next_combination(positions: &mut [usize], n: usize) -> bool {
    let a = positions.len();
    for k in (0..a).rev() {
        if positions[k] < n - (a - k) {
            positions[k] += 1;
            for j in k + 1..a {
                positions[j] = positions[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Mixed coproduct component Δ_{a, n-a} of a graded element, as a sparse
/// map (rank in Λᵃ, rank in Λⁿ⁻ᵃ) → coefficient. The sign on a split
/// S ⊔ T of a monomial is the parity of the shuffle.
fn coproduct_component(
    bases: &[Vec<Vec<u8>>],
    element: &GradedElement,
    a: usize,
) -> BTreeMap<(usize, usize), BigInt> {
    let n = element.degree;
    assert!(a >= 1 && a < n);
    let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
    for (monomial_rank, coeff) in &element.coords {
        let monomial = &bases[n][*monomial_rank as usize];
        let mut positions: Vec<usize> = (0..a).collect();
        loop {
            let left: Vec<u8> = positions.iter().map(|&p| monomial[p]).collect();
            let right: Vec<u8> = (0..n)
                .filter(|p| !positions.contains(p))
                .map(|p| monomial[p])
                .collect();
            let sign = merge_sign(&left, &right);
            let key = (wedge_rank(&left), wedge_rank(&right));
            let slot = acc.entry(key).or_insert_with(BigInt::zero);
            if sign > 0 {
                *slot += coeff;
            } else {
                *slot -= coeff;
            }
            if !next_combination(&mut positions, n) {
                break;
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// Per-degree primitive subspaces: invariants z with Δ(z) = z⊗1 + 1⊗z for
/// the coproduct the addition map induces on the invariant subalgebra.
///
/// On the full exterior algebra the coproduct is the shuffle (degree-1
/// elements primitive, extended multiplicatively), but it only descends to
/// the invariants through the canonical reductive projection onto the
/// trivial isotypic component of each tensor factor. A mixed component
/// Δ_{a,b}(z) therefore vanishes iff it is annihilated by every pair of
/// invariant coordinate functionals, which is the condition stacked here.
pub fn primitives(
    cx: &CochainComplex,
    alg: &ChevalleyAlgebra,
    invariants: &[Vec<GradedElement>],
) -> Result<Vec<Vec<GradedElement>>, CeError> {
    if cx.domain != Domain::Rational {
        return Err(CeError::NeedsRationalCoefficients {
            what: "the primitive subspace",
        });
    }
    let setup = action_setup(alg);
    // functionals[a][k] = sparse invariant covector on Λᵃ; for an abelian
    // algebra the projection is the identity, i.e. the full dual basis.
    let functionals: Vec<Vec<Vec<(u32, BigInt)>>> = match &setup {
        Some((weights, operators)) => (0..cx.dim_g)
            .into_par_iter()
            .map(|a| invariant_functionals(cx, alg, weights, operators, a))
            .collect::<Result<_, _>>()?,
        None => (0..cx.dim_g)
            .map(|a| {
                (0..binomial(cx.dim_g, a))
                    .map(|r| vec![(r as u32, BigInt::one())])
                    .collect()
            })
            .collect(),
    };
    // Inverted index: monomial rank -> [(functional index, value)].
    let indexed: Vec<BTreeMap<u32, Vec<(usize, BigInt)>>> = functionals
        .iter()
        .map(|layer| {
            let mut index: BTreeMap<u32, Vec<(usize, BigInt)>> = BTreeMap::new();
            for (k, lambda) in layer.iter().enumerate() {
                for (rank, value) in lambda {
                    index.entry(*rank).or_default().push((k, value.clone()));
                }
            }
            index
        })
        .collect();

    let mut out: Vec<Vec<GradedElement>> = vec![Vec::new(); cx.dim_g + 1];
    for n in 1..=cx.dim_g {
        let basis = &invariants[n];
        if basis.is_empty() {
            continue;
        }
        if n == 1 {
            out[1] = basis.clone();
            continue;
        }
        let mut row_ids: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        let mut entries: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (col, element) in basis.iter().enumerate() {
            for a in 1..n {
                for ((left, right), coeff) in coproduct_component(&cx.bases, element, a) {
                    let Some(left_hits) = indexed[a].get(&(left as u32)) else {
                        continue;
                    };
                    let Some(right_hits) = indexed[n - a].get(&(right as u32)) else {
                        continue;
                    };
                    for (k, lv) in left_hits {
                        for (l, rv) in right_hits {
                            let next = row_ids.len();
                            let row = *row_ids.entry((a, *k, *l)).or_insert(next);
                            let slot = entries.entry((row, col)).or_insert_with(BigInt::zero);
                            *slot += &coeff * lv * rv;
                        }
                    }
                }
            }
        }
        let matrix = ExactMatrix::from_bigint_triples(
            row_ids.len().max(1),
            basis.len(),
            Domain::Rational,
            entries.into_iter().map(|((r, c), v)| (r, c, v)),
        );
        let kernel = matrix.kernel_basis()?;
        out[n] = kernel
            .into_iter()
            .map(|combo| {
                let mut coords: BTreeMap<u32, BigInt> = BTreeMap::new();
                for (i, s) in combo.iter().enumerate() {
                    let ExactScalar::Rat(x) = s else { unreachable!() };
                    if x.is_zero() {
                        continue;
                    }
                    assert!(x.denom().is_one(), "kernel vectors are integral");
                    for (rank, c) in &basis[i].coords {
                        let slot = coords.entry(*rank).or_insert_with(BigInt::zero);
                        *slot += c * x.numer();
                    }
                }
                coords.retain(|_, v| !v.is_zero());
                GradedElement {
                    degree: n,
                    coords: coords.into_iter().collect(),
                }
            })
            .collect();
    }
    for (n, layer) in out.iter().enumerate() {
        assert!(
            layer.is_empty() || n % 2 == 1,
            "primitive elements live in odd degrees"
        );
    }
    Ok(out)
}

/// Wedge product of sparse dual-basis vectors.
fn wedge_elements(
    bases: &[Vec<Vec<u8>>],
    v: &GradedElement,
    w: &GradedElement,
) -> GradedElement {
    let degree = v.degree + w.degree;
    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (rv, cv) in &v.coords {
        let mv = &bases[v.degree][*rv as usize];
        'pairs: for (rw, cw) in &w.coords {
            let mw = &bases[w.degree][*rw as usize];
            for i in mw.iter() {
                if mv.binary_search(i).is_ok() {
                    continue 'pairs;
                }
            }
            let sign = merge_sign(mv, mw);
            let mut merged: Vec<u8> = mv.iter().chain(mw.iter()).copied().collect();
            merged.sort_unstable();
            let slot = acc.entry(wedge_rank(&merged)).or_insert_with(BigInt::zero);
            if sign > 0 {
                *slot += cv * cw;
            } else {
                *slot -= cv * cw;
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    GradedElement {
        degree,
        coords: acc.into_iter().map(|(r, c)| (r as u32, c)).collect(),
    }
}

/// One monomial in the exterior-basis certificate: which primitives were
/// wedged, the resulting degree, and a display label like "z3^z5".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExteriorWitness {
    pub degree: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExteriorCertificate {
    pub verdict: bool,
    pub primitive_degrees: Vec<usize>,
    pub witnesses: Vec<ExteriorWitness>,
}

/// Certify that the invariants form an exterior algebra on the primitive
/// basis: all 2^k square-free wedge products must be linearly independent
/// and exhaust each graded piece.
pub fn verify_exterior_structure(
    cx: &CochainComplex,
    invariants: &[Vec<GradedElement>],
    primitive_layers: &[Vec<GradedElement>],
) -> Result<ExteriorCertificate, CeError> {
    if cx.domain != Domain::Rational {
        return Err(CeError::NeedsRationalCoefficients {
            what: "exterior-structure certification",
        });
    }
    let mut generators: Vec<(&GradedElement, String)> = Vec::new();
    for layer in primitive_layers {
        for (i, z) in layer.iter().enumerate() {
            let label = if layer.len() == 1 {
                format!("z{}", z.degree)
            } else {
                let suffix = (b'a' + i as u8) as char;
                format!("z{}{}", z.degree, suffix)
            };
            generators.push((z, label));
        }
    }
    assert!(generators.len() <= 20, "witness enumeration stays desk-scale");
    let primitive_degrees: Vec<usize> = generators.iter().map(|(z, _)| z.degree).collect();

    // All square-free products, grouped by total degree.
    let mut by_degree: BTreeMap<usize, Vec<(GradedElement, String)>> = BTreeMap::new();
    let one = GradedElement {
        degree: 0,
        coords: vec![(0, BigInt::one())],
    };
    for mask in 0u32..(1 << generators.len()) {
        let mut product = one.clone();
        let mut parts: Vec<&str> = Vec::new();
        for (i, (z, label)) in generators.iter().enumerate() {
            if mask & (1 << i) != 0 {
                product = wedge_elements(&cx.bases, &product, z);
                parts.push(label);
            }
        }
        let label = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("^")
        };
        by_degree.entry(product.degree).or_default().push((product, label));
    }

    let mut verdict = true;
    let mut witnesses = Vec::new();
    for n in 0..=cx.dim_g {
        let products = by_degree.get(&n).map_or(&[][..], |v| v.as_slice());
        // Products of invariants are invariant, so matching dimension plus
        // independence certifies both spanning and the exterior relationlessness.
        if products.len() != invariants[n].len() {
            verdict = false;
        }
        if !products.is_empty() {
            let matrix = ExactMatrix::from_bigint_triples(
                binomial(cx.dim_g, n),
                products.len(),
                Domain::Rational,
                products.iter().enumerate().flat_map(|(col, (z, _))| {
                    z.coords
                        .iter()
                        .map(move |(r, c)| (*r as usize, col, c.clone()))
                        .collect::<Vec<_>>()
                }),
            );
            if matrix.rank()? != products.len() {
                verdict = false;
            }
        }
        for (z, label) in products {
            witnesses.push(ExteriorWitness {
                degree: z.degree,
                label: label.clone(),
            });
        }
    }
    Ok(ExteriorCertificate {
        verdict,
        primitive_degrees,
        witnesses,
    })
}

/// Betti numbers predicted by the generator degree table: coefficients of
/// Π_i (1 + t^{d_i}).
pub fn expected_betti(t: LieType) -> Vec<usize> {
    let rs = rootdata::build_root_system(t);
    let dim = rs.lie_algebra_dim();
    let mut coeffs = vec![0usize; dim + 1];
    coeffs[0] = 1;
    for d in rootdata::generator_degrees(t) {
        for n in (0..=dim).rev() {
            if n >= d && coeffs[n - d] > 0 {
                coeffs[n] += coeffs[n - d];
            }
        }
    }
    coeffs
}

/// One row of a characteristic-p scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeScanRow {
    pub p: u64,
    pub betti: Vec<usize>,
    pub expected: Vec<usize>,
    pub matches: bool,
    /// p > h.
    pub exceeds_coxeter: bool,
    /// p > 3(h - 1).
    pub exceeds_safe_bound: bool,
}

/// Betti numbers over F_p for each prime, compared against the generator
/// degree table. Mismatches are reported, never raised as errors.
pub fn charp_scan(
    t: LieType,
    primes: &[u64],
    config: ComplexConfig,
) -> Result<Vec<PrimeScanRow>, CeError> {
    let rs = rootdata::build_root_system(t);
    config.ensure(rs.lie_algebra_dim())?;
    for &p in primes {
        if !crate::linalg::is_prime(p) {
            return Err(CeError::NotPrime(p));
        }
    }
    let alg = crate::chevalley::build_chevalley(&rs)?;
    let cx = build_ce_complex(&alg, Domain::Integer);
    let expected = expected_betti(t);
    let (h, safe) = rootdata::coxeter_threshold(t);
    let dim = rs.lie_algebra_dim();
    primes
        .par_iter()
        .map(|&p| {
            let ranks: Vec<usize> = cx
                .differentials
                .par_iter()
                .map(|d| d.with_domain(Domain::Prime(p)).rank())
                .collect::<Result<_, _>>()?;
            let betti: Vec<usize> = (0..=dim)
                .map(|n| {
                    let below = if n == 0 { 0 } else { ranks[n - 1] };
                    binomial(dim, n) - ranks[n] - below
                })
                .collect();
            let matches = betti == expected;
            Ok(PrimeScanRow {
                p,
                betti,
                expected: expected.clone(),
                matches,
                exceeds_coxeter: p as usize > h,
                exceeds_safe_bound: p as usize > safe,
            })
        })
        .collect()
}

/// dim H³ over Q; the uniform answer for simple types is 1.
pub fn h3_dimension(t: LieType, config: ComplexConfig) -> Result<usize, CeError> {
    let rs = rootdata::build_root_system(t);
    config.ensure(rs.lie_algebra_dim())?;
    let alg = crate::chevalley::build_chevalley(&rs)?;
    let cx = build_ce_complex(&alg, Domain::Rational);
    let betti = cx.betti_numbers()?;
    Ok(betti[3])
}

/// Build the full complex for a named type, honouring the size gate and
/// validating prime coefficients. Convenience for callers that want the
/// matrices themselves rather than a summary report.
pub fn build_gated_complex(
    t: LieType,
    domain: Domain,
    config: ComplexConfig,
) -> Result<CochainComplex, CeError> {
    if let Domain::Prime(p) = domain {
        if !crate::linalg::is_prime(p) {
            return Err(CeError::NotPrime(p));
        }
    }
    let rs = rootdata::build_root_system(t);
    config.ensure(rs.lie_algebra_dim())?;
    let alg = crate::chevalley::build_chevalley(&rs)?;
    Ok(build_ce_complex(&alg, domain))
}

/// Rational pipeline ending in the exterior-structure certificate:
/// invariants, primitive layers, then the square-free wedge basis check.
pub fn ring_certificate(t: LieType, config: ComplexConfig) -> Result<ExteriorCertificate, CeError> {
    let rs = rootdata::build_root_system(t);
    config.ensure(rs.lie_algebra_dim())?;
    let alg = crate::chevalley::build_chevalley(&rs)?;
    let cx = build_ce_complex(&alg, Domain::Rational);
    let invariants = invariant_subalgebra(&cx, &alg)?;
    let primitive_layers = primitives(&cx, &alg, &invariants)?;
    verify_exterior_structure(&cx, &invariants, &primitive_layers)
}

/// JSON field tag for a domain: "Q", "Z", or "Fp:<p>".
pub fn field_tag(domain: Domain) -> String {
    match domain {
        Domain::Rational => "Q".to_string(),
        Domain::Integer => "Z".to_string(),
        Domain::Prime(p) => format!("Fp:{p}"),
    }
}

/// Summary of one cohomology computation. Over Q the primitive degrees are
/// computed and certified; over F_p and Z they are the predicted table used
/// for the comparison verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyReport {
    pub lie_type: LieType,
    pub domain: Domain,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<BigInt>>,
    pub primitive_degrees: Vec<usize>,
    pub exterior_match: bool,
}

impl Serialize for CohomologyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CohomologyReport", 6)?;
        st.serialize_field("type", &self.lie_type)?;
        st.serialize_field("field", &field_tag(self.domain))?;
        st.serialize_field("betti", &self.betti)?;
        let torsion: Vec<Vec<String>> = self
            .torsion
            .iter()
            .map(|layer| layer.iter().map(|d| d.to_string()).collect())
            .collect();
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("primitive_degrees", &self.primitive_degrees)?;
        st.serialize_field("exterior_match", &self.exterior_match)?;
        st.end()
    }
}

/// Full pipeline for one type and coefficient domain.
pub fn cohomology_report(
    t: LieType,
    domain: Domain,
    config: ComplexConfig,
) -> Result<CohomologyReport, CeError> {
    let rs = rootdata::build_root_system(t);
    config.ensure(rs.lie_algebra_dim())?;
    let alg = crate::chevalley::build_chevalley(&rs)?;
    let dim = rs.lie_algebra_dim();
    let expected = expected_betti(t);
    match domain {
        Domain::Rational => {
            let cx = build_ce_complex(&alg, domain);
            let betti = cx.betti_numbers()?;
            let invariants = invariant_subalgebra(&cx, &alg)?;
            let primitive_layers = primitives(&cx, &alg, &invariants)?;
            let certificate = verify_exterior_structure(&cx, &invariants, &primitive_layers)?;
            Ok(CohomologyReport {
                lie_type: t,
                domain,
                betti,
                torsion: vec![Vec::new(); dim + 1],
                primitive_degrees: certificate.primitive_degrees,
                exterior_match: certificate.verdict,
            })
        }
        Domain::Prime(p) => {
            if !crate::linalg::is_prime(p) {
                return Err(CeError::NotPrime(p));
            }
            let cx = build_ce_complex(&alg, domain);
            let betti = cx.betti_numbers()?;
            let exterior_match = betti == expected;
            Ok(CohomologyReport {
                lie_type: t,
                domain,
                betti,
                torsion: vec![Vec::new(); dim + 1],
                primitive_degrees: rootdata::generator_degrees(t),
                exterior_match,
            })
        }
        Domain::Integer => {
            let cx = build_ce_complex(&alg, domain);
            let integral = cx.integral_cohomology()?;
            let exterior_match = integral.free_ranks == expected;
            Ok(CohomologyReport {
                lie_type: t,
                domain,
                betti: integral.free_ranks,
                torsion: integral.torsion,
                primitive_degrees: rootdata::generator_degrees(t),
                exterior_match,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::build_chevalley;
    use crate::rootdata::build_root_system;

    fn complex(name: &str, domain: Domain) -> CochainComplex {
        let rs = build_root_system(name.parse().unwrap());
        let alg = build_chevalley(&rs).unwrap();
        build_ce_complex(&alg, domain)
    }

    #[test]
    fn colex_ranks_are_positional() {
        let basis = wedge_basis(4, 2);
        assert_eq!(
            basis,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        for (i, monomial) in basis.iter().enumerate() {
            assert_eq!(wedge_rank(monomial), i);
        }
    }

    #[test]
    fn abelian_complex_has_zero_differentials() {
        let alg = ChevalleyAlgebra::abelian(3);
        let cx = build_ce_complex(&alg, Domain::Integer);
        for n in 0..=3 {
            assert!(cx.differential(n).is_zero());
        }
    }

    #[test]
    fn abelian_rank_2_integral_cohomology_is_free() {
        let alg = ChevalleyAlgebra::abelian(2);
        let cx = build_ce_complex(&alg, Domain::Integer);
        let h = cx.integral_cohomology().unwrap();
        assert_eq!(h.free_ranks, vec![1, 2, 1]);
        assert!(h.torsion.iter().all(Vec::is_empty));
    }

    #[test]
    fn sl2_degree_one_differential_matches_hand_computation() {
        let cx = complex("A1", Domain::Integer);
        // Basis order h, e, f; Λ² rows (h∧e), (h∧f), (e∧f).
        // d(h*) = -e*∧f*, d(e*) = -2 h*∧e*, d(f*) = 2 h*∧f*.
        assert_eq!(cx.differential(1).to_text(), "3 3\n2 0 -1\n0 1 -2\n1 2 2\n");
    }

    #[test]
    fn sl2_betti_over_q_and_f2() {
        assert_eq!(
            complex("A1", Domain::Rational).betti_numbers().unwrap(),
            vec![1, 0, 0, 1]
        );
        assert_eq!(
            complex("A1", Domain::Prime(2)).betti_numbers().unwrap(),
            vec![1, 2, 2, 1]
        );
        assert_eq!(
            complex("A1", Domain::Integer).betti_numbers().unwrap_err(),
            CeError::IntegerCoefficients
        );
    }

    #[test]
    fn sl2_integral_cohomology_has_two_torsion() {
        let h = complex("A1", Domain::Integer).integral_cohomology().unwrap();
        assert_eq!(h.free_ranks, vec![1, 0, 0, 1]);
        assert_eq!(h.torsion[0], Vec::<BigInt>::new());
        assert_eq!(h.torsion[1], Vec::<BigInt>::new());
        assert_eq!(h.torsion[2], vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(h.torsion[3], Vec::<BigInt>::new());
    }

    #[test]
    fn sl3_betti_over_q_is_degree_table_expansion() {
        let betti = complex("A2", Domain::Rational).betti_numbers().unwrap();
        assert_eq!(betti, vec![1, 0, 0, 1, 0, 1, 0, 0, 1]);
        assert_eq!(betti, expected_betti("A2".parse().unwrap()));
    }

    #[test]
    fn sl3_integral_free_ranks_match_rational_betti() {
        let h = complex("A2", Domain::Integer).integral_cohomology().unwrap();
        assert_eq!(h.free_ranks, vec![1, 0, 0, 1, 0, 1, 0, 0, 1]);
        for layer in &h.torsion {
            for d in layer {
                // Record-keeping check: only 2- and 3-torsion shows up.
                let mut v = d.clone();
                for p in [2, 3] {
                    while (&v % BigInt::from(p)).is_zero() {
                        v /= BigInt::from(p);
                    }
                }
                assert!(v.is_one(), "unexpected invariant factor {d}");
            }
        }
    }

    #[test]
    fn invariant_dimensions_equal_betti() {
        for name in ["A1", "A2", "B2"] {
            let cx = complex(name, Domain::Rational);
            let rs = build_root_system(name.parse().unwrap());
            let alg = build_chevalley(&rs).unwrap();
            let invariants = invariant_subalgebra(&cx, &alg).unwrap();
            let betti = cx.betti_numbers().unwrap();
            let dims: Vec<usize> = invariants.iter().map(Vec::len).collect();
            assert_eq!(dims, betti, "{name}");
        }
    }

    #[test]
    fn sl2_invariants_in_low_degrees() {
        let cx = complex("A1", Domain::Rational);
        let rs = build_root_system("A1".parse().unwrap());
        let alg = build_chevalley(&rs).unwrap();
        let invariants = invariant_subalgebra(&cx, &alg).unwrap();
        assert!(invariants[1].is_empty());
        // Degree 3 is the top form h*∧e*∧f*, one dimensional.
        assert_eq!(invariants[3].len(), 1);
        assert_eq!(invariants[3][0].coords, vec![(0, BigInt::one())]);
        let err = invariant_subalgebra(&complex("A1", Domain::Prime(5)), &alg).unwrap_err();
        assert!(matches!(err, CeError::NeedsRationalCoefficients { .. }));
    }

    #[test]
    fn primitive_degrees_match_degree_table() {
        for (name, expected) in [("A1", vec![3]), ("A2", vec![3, 5]), ("B2", vec![3, 7])] {
            let cx = complex(name, Domain::Rational);
            let rs = build_root_system(name.parse().unwrap());
            let alg = build_chevalley(&rs).unwrap();
            let invariants = invariant_subalgebra(&cx, &alg).unwrap();
            let layers = primitives(&cx, &alg, &invariants).unwrap();
            let mut degrees = Vec::new();
            for layer in &layers {
                for z in layer {
                    degrees.push(z.degree);
                }
            }
            assert_eq!(degrees, expected, "{name}");
        }
    }

    #[test]
    fn exterior_certificate_for_sl3() {
        let cx = complex("A2", Domain::Rational);
        let rs = build_root_system("A2".parse().unwrap());
        let alg = build_chevalley(&rs).unwrap();
        let invariants = invariant_subalgebra(&cx, &alg).unwrap();
        let layers = primitives(&cx, &alg, &invariants).unwrap();
        let cert = verify_exterior_structure(&cx, &invariants, &layers).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.primitive_degrees, vec![3, 5]);
        let labels: Vec<(usize, &str)> = cert
            .witnesses
            .iter()
            .map(|w| (w.degree, w.label.as_str()))
            .collect();
        assert_eq!(
            labels,
            vec![(0, "1"), (3, "z3"), (5, "z5"), (8, "z3^z5")]
        );
    }

    #[test]
    fn charp_scan_sl2() {
        let rows = charp_scan("A1".parse().unwrap(), &[2, 5], ComplexConfig::default()).unwrap();
        assert_eq!(rows[0].p, 2);
        assert_eq!(rows[0].betti, vec![1, 2, 2, 1]);
        assert!(!rows[0].matches);
        assert!(!rows[0].exceeds_coxeter);
        assert_eq!(rows[1].p, 5);
        assert_eq!(rows[1].betti, vec![1, 0, 0, 1]);
        assert!(rows[1].matches);
        assert!(rows[1].exceeds_coxeter);
        assert!(rows[1].exceeds_safe_bound);
        let err = charp_scan("A1".parse().unwrap(), &[4], ComplexConfig::default()).unwrap_err();
        assert_eq!(err, CeError::NotPrime(4));
    }

    #[test]
    fn size_gate_blocks_oversized_types() {
        let err = charp_scan("B4".parse().unwrap(), &[5], ComplexConfig::default()).unwrap_err();
        assert_eq!(err, CeError::TooLarge { dim: 36, max: 16 });
        // Lowering the cutoff blocks a small type the same way; best_effort
        // overrides the gate. A2 has dim 8.
        let tight = ComplexConfig {
            max_dim: 6,
            best_effort: false,
        };
        assert!(matches!(
            h3_dimension("A2".parse().unwrap(), tight),
            Err(CeError::TooLarge { .. })
        ));
        let forced = ComplexConfig {
            max_dim: 6,
            best_effort: true,
        };
        assert_eq!(h3_dimension("A2".parse().unwrap(), forced).unwrap(), 1);
    }

    #[test]
    fn h3_is_one_dimensional() {
        for name in ["A1", "A2", "B2"] {
            assert_eq!(
                h3_dimension(name.parse().unwrap(), ComplexConfig::default()).unwrap(),
                1,
                "{name}"
            );
        }
    }

    #[test]
    fn differential_commutes_with_coadjoint_action() {
        let cx = complex("A2", Domain::Integer);
        let rs = build_root_system("A2".parse().unwrap());
        let alg = build_chevalley(&rs).unwrap();
        for t in 0..alg.dimension() {
            for n in 0..=3 {
                let l_n = coadjoint_matrix(&cx, &alg, t, n);
                let l_next = coadjoint_matrix(&cx, &alg, t, n + 1);
                let left = cx.differential(n).multiply(&l_n).unwrap();
                let right = l_next.multiply(cx.differential(n)).unwrap();
                assert_eq!(left, right, "t={t} n={n}");
            }
        }
    }

    #[test]
    fn report_over_q_for_sl3() {
        let report = cohomology_report(
            "A2".parse().unwrap(),
            Domain::Rational,
            ComplexConfig::default(),
        )
        .unwrap();
        assert_eq!(report.betti, vec![1, 0, 0, 1, 0, 1, 0, 0, 1]);
        assert!(report.exterior_match);
        assert_eq!(report.primitive_degrees, vec![3, 5]);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["type"], "A2");
        assert_eq!(json["field"], "Q");
        assert_eq!(json["exterior_match"], true);
    }

    #[test]
    fn report_over_f2_for_sl2_flags_mismatch() {
        let report = cohomology_report(
            "A1".parse().unwrap(),
            Domain::Prime(2),
            ComplexConfig::default(),
        )
        .unwrap();
        assert_eq!(report.betti, vec![1, 2, 2, 1]);
        assert!(!report.exterior_match);
        assert_eq!(report.primitive_degrees, vec![3]);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["field"], "Fp:2");
    }
}
