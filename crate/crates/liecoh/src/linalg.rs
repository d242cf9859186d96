//! Exact sparse linear algebra over Z, Q, and F_p: rank, kernel bases, and
//! Smith normal form. No floating point anywhere; every answer is exact.
//!
//! Matrices are stored column-major with sorted sparse columns. Rank and
//! kernel computations first split the columns into connected components of
//! the shared-row graph and eliminate each component separately; on graded
//! differentials this recovers the weight-block decomposition for free.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{op} needs field scalars; integer matrices go through smith_normal_form")]
    IntegerDomain { op: &'static str },
    #[error("smith_normal_form needs integer scalars, got {domain}")]
    NotIntegerDomain { domain: Domain },
    #[error("modulus {p} is not a prime below 2^31")]
    BadModulus { p: u64 },
    #[error("scalar domain mismatch: {left} vs {right}")]
    DomainMismatch { left: Domain, right: Domain },
    #[error("matrix text parse error: {0}")]
    Parse(String),
}

/// Coefficient domain of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Integer,
    Rational,
    /// F_p; the modulus must be a prime below 2^31.
    Prime(u64),
}

impl Domain {
    pub fn check(self) -> Result<(), LinalgError> {
        if let Domain::Prime(p) = self {
            if p >= 1 << 31 || !is_prime(p) {
                return Err(LinalgError::BadModulus { p });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Integer => write!(f, "Z"),
            Domain::Rational => write!(f, "Q"),
            Domain::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A single exact scalar, tagged with its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactScalar {
    Int(BigInt),
    Rat(BigRational),
    Fp { value: u64, modulus: u64 },
}

impl ExactScalar {
    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Int(v) => v.is_zero(),
            ExactScalar::Rat(v) => v.is_zero(),
            ExactScalar::Fp { value, .. } => *value == 0,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            ExactScalar::Int(_) => Domain::Integer,
            ExactScalar::Rat(_) => Domain::Rational,
            ExactScalar::Fp { modulus, .. } => Domain::Prime(*modulus),
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Int(v) => write!(f, "{v}"),
            ExactScalar::Rat(v) => write!(f, "{v}"),
            ExactScalar::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Sparse column: (row, value) pairs sorted by row, no zero values.
type Col<T> = Vec<(u32, T)>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum MatrixData {
    Int(Vec<Col<BigInt>>),
    Rat(Vec<Col<BigRational>>),
    Fp { p: u64, cols: Vec<Col<u64>> },
}

/// Immutable exact sparse matrix over one of the three scalar domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    nrows: usize,
    ncols: usize,
    data: MatrixData,
}

/// Invariant factors d_1 | d_2 | ... | d_k of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub nrows: usize,
    pub ncols: usize,
}

impl SmithForm {
    /// The factors bigger than 1, i.e. the torsion part.
    pub fn nonunit_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

impl Serialize for SmithForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SmithForm", 4)?;
        st.serialize_field("rows", &self.nrows)?;
        st.serialize_field("cols", &self.ncols)?;
        st.serialize_field("rank", &self.rank)?;
        let factors: Vec<String> = self.invariant_factors.iter().map(|d| d.to_string()).collect();
        st.serialize_field("invariant_factors", &factors)?;
        st.end()
    }
}

impl ExactMatrix {
    pub fn zero(nrows: usize, ncols: usize, domain: Domain) -> Self {
        domain.check().expect("valid domain");
        let data = match domain {
            Domain::Integer => MatrixData::Int(vec![Vec::new(); ncols]),
            Domain::Rational => MatrixData::Rat(vec![Vec::new(); ncols]),
            Domain::Prime(p) => MatrixData::Fp {
                p,
                cols: vec![Vec::new(); ncols],
            },
        };
        ExactMatrix { nrows, ncols, data }
    }

    /// Build from (row, col, value) triples of machine integers, accumulating
    /// duplicates; values are reduced into the target domain.
    pub fn from_integer_triples(
        nrows: usize,
        ncols: usize,
        domain: Domain,
        triples: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Self {
        Self::from_bigint_triples(
            nrows,
            ncols,
            domain,
            triples
                .into_iter()
                .map(|(r, c, v)| (r, c, BigInt::from(v))),
        )
    }

    pub fn from_bigint_triples(
        nrows: usize,
        ncols: usize,
        domain: Domain,
        triples: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Self {
        domain.check().expect("valid domain");
        let mut acc: Vec<BTreeMap<u32, BigInt>> = vec![BTreeMap::new(); ncols];
        for (r, c, v) in triples {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) outside {nrows}x{ncols}");
            let slot = acc[c].entry(r as u32).or_insert_with(BigInt::zero);
            *slot += v;
        }
        let data = match domain {
            Domain::Integer => MatrixData::Int(
                acc.into_iter()
                    .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                    .collect(),
            ),
            Domain::Rational => MatrixData::Rat(
                acc.into_iter()
                    .map(|m| {
                        m.into_iter()
                            .filter(|(_, v)| !v.is_zero())
                            .map(|(r, v)| (r, BigRational::from(v)))
                            .collect()
                    })
                    .collect(),
            ),
            Domain::Prime(p) => MatrixData::Fp {
                p,
                cols: acc
                    .into_iter()
                    .map(|m| {
                        m.into_iter()
                            .filter_map(|(r, v)| {
                                let red = bigint_mod_u64(&v, p);
                                (red != 0).then_some((r, red))
                            })
                            .collect()
                    })
                    .collect(),
            },
        };
        ExactMatrix { nrows, ncols, data }
    }

    pub fn from_rational_triples(
        nrows: usize,
        ncols: usize,
        triples: impl IntoIterator<Item = (usize, usize, BigRational)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<u32, BigRational>> = vec![BTreeMap::new(); ncols];
        for (r, c, v) in triples {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) outside {nrows}x{ncols}");
            let slot = acc[c].entry(r as u32).or_insert_with(BigRational::zero);
            *slot += v;
        }
        let cols = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        ExactMatrix {
            nrows,
            ncols,
            data: MatrixData::Rat(cols),
        }
    }

    pub fn identity(n: usize, domain: Domain) -> Self {
        Self::from_integer_triples(n, n, domain, (0..n).map(|i| (i, i, 1)))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn domain(&self) -> Domain {
        match &self.data {
            MatrixData::Int(_) => Domain::Integer,
            MatrixData::Rat(_) => Domain::Rational,
            MatrixData::Fp { p, .. } => Domain::Prime(*p),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.data {
            MatrixData::Int(cols) => cols.iter().map(Vec::len).sum(),
            MatrixData::Rat(cols) => cols.iter().map(Vec::len).sum(),
            MatrixData::Fp { cols, .. } => cols.iter().map(Vec::len).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn entry(&self, r: usize, c: usize) -> ExactScalar {
        assert!(r < self.nrows && c < self.ncols);
        let r = r as u32;
        match &self.data {
            MatrixData::Int(cols) => ExactScalar::Int(
                col_get(&cols[c], r).cloned().unwrap_or_else(BigInt::zero),
            ),
            MatrixData::Rat(cols) => ExactScalar::Rat(
                col_get(&cols[c], r).cloned().unwrap_or_else(BigRational::zero),
            ),
            MatrixData::Fp { p, cols } => ExactScalar::Fp {
                value: col_get(&cols[c], r).copied().unwrap_or(0),
                modulus: *p,
            },
        }
    }

    /// Reinterpret an integer matrix over Q or F_p.
    pub fn with_domain(&self, domain: Domain) -> Self {
        match &self.data {
            MatrixData::Int(cols) => Self::from_bigint_triples(
                self.nrows,
                self.ncols,
                domain,
                cols.iter().enumerate().flat_map(|(c, col)| {
                    col.iter().map(move |(r, v)| (*r as usize, c, v.clone()))
                }),
            ),
            _ => {
                assert_eq!(domain, self.domain(), "only integer matrices convert");
                self.clone()
            }
        }
    }

    pub fn transpose(&self) -> Self {
        fn t<T: Clone>(nrows: usize, cols: &[Col<T>]) -> Vec<Col<T>> {
            let mut out: Vec<Col<T>> = vec![Vec::new(); nrows];
            for (c, col) in cols.iter().enumerate() {
                for (r, v) in col {
                    out[*r as usize].push((c as u32, v.clone()));
                }
            }
            out
        }
        let data = match &self.data {
            MatrixData::Int(cols) => MatrixData::Int(t(self.nrows, cols)),
            MatrixData::Rat(cols) => MatrixData::Rat(t(self.nrows, cols)),
            MatrixData::Fp { p, cols } => MatrixData::Fp {
                p: *p,
                cols: t(self.nrows, cols),
            },
        };
        ExactMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            data,
        }
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn vstack(parts: &[&ExactMatrix]) -> Result<Self, LinalgError> {
        assert!(!parts.is_empty(), "vstack of nothing");
        let ncols = parts[0].ncols;
        let domain = parts[0].domain();
        for m in parts {
            assert_eq!(m.ncols, ncols, "vstack needs equal column counts");
            if m.domain() != domain {
                return Err(LinalgError::DomainMismatch {
                    left: domain,
                    right: m.domain(),
                });
            }
        }
        fn stack<T: Clone>(parts: &[(&[Col<T>], usize)], ncols: usize) -> Vec<Col<T>> {
            let mut out: Vec<Col<T>> = vec![Vec::new(); ncols];
            let mut offset = 0u32;
            for (cols, nrows) in parts {
                for (c, col) in cols.iter().enumerate() {
                    out[c].extend(col.iter().map(|(r, v)| (r + offset, v.clone())));
                }
                offset += *nrows as u32;
            }
            out
        }
        let nrows = parts.iter().map(|m| m.nrows).sum();
        let data = match domain {
            Domain::Integer => {
                let slices: Vec<_> = parts
                    .iter()
                    .map(|m| match &m.data {
                        MatrixData::Int(c) => (c.as_slice(), m.nrows),
                        _ => unreachable!(),
                    })
                    .collect();
                MatrixData::Int(stack(&slices, ncols))
            }
            Domain::Rational => {
                let slices: Vec<_> = parts
                    .iter()
                    .map(|m| match &m.data {
                        MatrixData::Rat(c) => (c.as_slice(), m.nrows),
                        _ => unreachable!(),
                    })
                    .collect();
                MatrixData::Rat(stack(&slices, ncols))
            }
            Domain::Prime(p) => {
                let slices: Vec<_> = parts
                    .iter()
                    .map(|m| match &m.data {
                        MatrixData::Fp { cols, .. } => (cols.as_slice(), m.nrows),
                        _ => unreachable!(),
                    })
                    .collect();
                MatrixData::Fp {
                    p,
                    cols: stack(&slices, ncols),
                }
            }
        };
        Ok(ExactMatrix { nrows, ncols, data })
    }

    /// Matrix product self * other.
    pub fn multiply(&self, other: &ExactMatrix) -> Result<Self, LinalgError> {
        assert_eq!(self.ncols, other.nrows, "inner dimensions must agree");
        if self.domain() != other.domain() {
            return Err(LinalgError::DomainMismatch {
                left: self.domain(),
                right: other.domain(),
            });
        }
        fn mm<T: Clone + PartialEq>(
            a: &[Col<T>],
            b: &[Col<T>],
            zero: T,
            addmul: impl Fn(&mut T, &T, &T),
        ) -> Vec<Col<T>> {
            b.iter()
                .map(|bcol| {
                    let mut acc: BTreeMap<u32, T> = BTreeMap::new();
                    for (k, bval) in bcol {
                        for (r, aval) in &a[*k as usize] {
                            let slot = acc.entry(*r).or_insert_with(|| zero.clone());
                            addmul(slot, aval, bval);
                        }
                    }
                    acc.into_iter().filter(|(_, v)| *v != zero).collect()
                })
                .collect()
        }
        let data = match (&self.data, &other.data) {
            (MatrixData::Int(a), MatrixData::Int(b)) => {
                MatrixData::Int(mm(a, b, BigInt::zero(), |s, x, y| *s += x * y))
            }
            (MatrixData::Rat(a), MatrixData::Rat(b)) => {
                MatrixData::Rat(mm(a, b, BigRational::zero(), |s, x, y| *s += x * y))
            }
            (MatrixData::Fp { p, cols: a }, MatrixData::Fp { cols: b, .. }) => {
                let p = *p;
                MatrixData::Fp {
                    p,
                    cols: mm(a, b, 0u64, move |s, x, y| *s = (*s + x * y % p) % p),
                }
            }
            _ => unreachable!("domains already checked"),
        };
        Ok(ExactMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            data,
        })
    }

    /// Apply to a dense vector of scalars from the same domain.
    pub fn apply(&self, v: &[ExactScalar]) -> Result<Vec<ExactScalar>, LinalgError> {
        assert_eq!(v.len(), self.ncols, "vector length must match column count");
        let rhs = match self.domain() {
            Domain::Integer => ExactMatrix::from_bigint_triples(
                self.ncols,
                1,
                Domain::Integer,
                v.iter().enumerate().filter_map(|(i, s)| match s {
                    ExactScalar::Int(x) if !x.is_zero() => Some((i, 0, x.clone())),
                    ExactScalar::Int(_) => None,
                    other => panic!("expected integer scalar, got {other}"),
                }),
            ),
            Domain::Rational => ExactMatrix::from_rational_triples(
                self.ncols,
                1,
                v.iter().enumerate().filter_map(|(i, s)| match s {
                    ExactScalar::Rat(x) if !x.is_zero() => Some((i, 0, x.clone())),
                    ExactScalar::Rat(_) => None,
                    other => panic!("expected rational scalar, got {other}"),
                }),
            ),
            Domain::Prime(p) => ExactMatrix::from_integer_triples(
                self.ncols,
                1,
                Domain::Prime(p),
                v.iter().enumerate().filter_map(|(i, s)| match s {
                    ExactScalar::Fp { value, modulus } if *modulus == p => {
                        (*value != 0).then_some((i, 0, *value as i64))
                    }
                    other => panic!("expected F_{p} scalar, got {other}"),
                }),
            ),
        };
        let product = self.multiply(&rhs)?;
        Ok((0..self.nrows).map(|r| product.entry(r, 0)).collect())
    }

    /// Rank over Q or F_p.
    pub fn rank(&self) -> Result<usize, LinalgError> {
        match &self.data {
            MatrixData::Int(_) => Err(LinalgError::IntegerDomain { op: "rank" }),
            MatrixData::Rat(cols) => {
                let int_cols: Vec<Col<BigInt>> =
                    cols.iter().map(|c| normalize_rational_col(c).0).collect();
                Ok(rank_int_cols(&int_cols))
            }
            MatrixData::Fp { p, cols } => Ok(rank_fp_cols(*p, cols)),
        }
    }

    /// Canonical kernel basis: one vector per non-pivot column of the
    /// reduced column echelon form, ordered by that column index. Over Q the
    /// vectors are scaled to coprime integers with positive entry at the
    /// defining column; over F_p that entry is 1.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<ExactScalar>>, LinalgError> {
        match &self.data {
            MatrixData::Int(_) => Err(LinalgError::IntegerDomain { op: "kernel_basis" }),
            MatrixData::Rat(cols) => {
                let mut int_cols: Vec<Col<BigInt>> = Vec::with_capacity(cols.len());
                let mut scales: Vec<BigRational> = Vec::with_capacity(cols.len());
                for c in cols {
                    let (int_col, scale) = normalize_rational_col(c);
                    int_cols.push(int_col);
                    scales.push(scale);
                }
                let vectors = kernel_int_cols(&int_cols);
                Ok(vectors
                    .into_iter()
                    .map(|sparse| {
                        // The elimination ran on t_j-scaled columns, so the
                        // original kernel coordinate at column j is t_j * v_j.
                        let rescaled: Vec<(u32, BigRational)> = sparse
                            .into_iter()
                            .map(|(c, v)| (c, BigRational::from(v) * &scales[c as usize]))
                            .collect();
                        let canonical = canonicalize_rational_vector(rescaled);
                        let mut dense =
                            vec![ExactScalar::Rat(BigRational::zero()); self.ncols];
                        for (c, v) in canonical {
                            dense[c as usize] = ExactScalar::Rat(BigRational::from(v));
                        }
                        dense
                    })
                    .collect())
            }
            MatrixData::Fp { p, cols } => {
                let vectors = kernel_fp_cols(*p, cols);
                Ok(vectors
                    .into_iter()
                    .map(|sparse| {
                        let mut dense = vec![
                            ExactScalar::Fp {
                                value: 0,
                                modulus: *p
                            };
                            self.ncols
                        ];
                        for (c, v) in sparse {
                            dense[c as usize] = ExactScalar::Fp {
                                value: v,
                                modulus: *p,
                            };
                        }
                        dense
                    })
                    .collect())
            }
        }
    }

    /// Any solution x of self * x = rhs over a field domain, or None when
    /// rhs is outside the column span. The solution is supported on the
    /// pivot columns, so it is canonical.
    pub fn solve(&self, rhs: &[ExactScalar]) -> Result<Option<Vec<ExactScalar>>, LinalgError> {
        assert_eq!(rhs.len(), self.nrows, "rhs length must match row count");
        let domain = self.domain();
        if domain == Domain::Integer {
            return Err(LinalgError::IntegerDomain { op: "solve" });
        }
        for s in rhs {
            if s.domain() != domain {
                return Err(LinalgError::DomainMismatch {
                    left: domain,
                    right: s.domain(),
                });
            }
        }
        // Kernel of [self | rhs]: a kernel vector hitting the appended
        // column rearranges into a solution.
        let rhs_col = match domain {
            Domain::Rational => ExactMatrix::from_rational_triples(
                self.nrows,
                1,
                rhs.iter().enumerate().filter_map(|(i, s)| match s {
                    ExactScalar::Rat(x) if !x.is_zero() => Some((i, 0, x.clone())),
                    _ => None,
                }),
            ),
            Domain::Prime(_) => ExactMatrix::from_integer_triples(
                self.nrows,
                1,
                domain,
                rhs.iter().enumerate().filter_map(|(i, s)| match s {
                    ExactScalar::Fp { value, .. } if *value != 0 => {
                        Some((i, 0, *value as i64))
                    }
                    _ => None,
                }),
            ),
            Domain::Integer => unreachable!(),
        };
        let augmented = hstack(self, &rhs_col);
        let kernel = augmented.kernel_basis()?;
        let last = self.ncols;
        let Some(vector) = kernel.into_iter().find(|v| !v[last].is_zero()) else {
            return Ok(None);
        };
        // self * v[..last] + rhs * v[last] = 0, so x = -v[..last] / v[last].
        let solution = match domain {
            Domain::Rational => {
                let scale = match &vector[last] {
                    ExactScalar::Rat(x) => -x.clone(),
                    _ => unreachable!(),
                };
                vector[..last]
                    .iter()
                    .map(|s| match s {
                        ExactScalar::Rat(x) => ExactScalar::Rat(x / &scale),
                        _ => unreachable!(),
                    })
                    .collect()
            }
            Domain::Prime(p) => {
                let t = match &vector[last] {
                    ExactScalar::Fp { value, .. } => *value,
                    _ => unreachable!(),
                };
                let scale = (p - inv_mod(t, p)) % p;
                vector[..last]
                    .iter()
                    .map(|s| match s {
                        ExactScalar::Fp { value, .. } => ExactScalar::Fp {
                            value: value * scale % p,
                            modulus: p,
                        },
                        _ => unreachable!(),
                    })
                    .collect()
            }
            Domain::Integer => unreachable!(),
        };
        Ok(Some(solution))
    }

    /// Smith normal form of an integer matrix.
    pub fn smith_normal_form(&self) -> Result<SmithForm, LinalgError> {
        let MatrixData::Int(cols) = &self.data else {
            return Err(LinalgError::NotIntegerDomain {
                domain: self.domain(),
            });
        };
        let components = split_components(cols);
        let mut all_factors: Vec<BigInt> = Vec::new();
        for group in &components {
            all_factors.extend(snf_component(cols, group));
        }
        let rank = all_factors.len();
        let invariant_factors = divisibility_chain(all_factors);
        Ok(SmithForm {
            invariant_factors,
            rank,
            nrows: self.nrows,
            ncols: self.ncols,
        })
    }

    /// Text export: "rows cols" header, then one "r c value" line per entry
    /// in column-major order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.nrows, self.ncols);
        let mut push = |r: u32, c: usize, v: String| {
            out.push_str(&format!("{r} {c} {v}\n"));
        };
        match &self.data {
            MatrixData::Int(cols) => {
                for (c, col) in cols.iter().enumerate() {
                    for (r, v) in col {
                        push(*r, c, v.to_string());
                    }
                }
            }
            MatrixData::Rat(cols) => {
                for (c, col) in cols.iter().enumerate() {
                    for (r, v) in col {
                        push(*r, c, v.to_string());
                    }
                }
            }
            MatrixData::Fp { cols, .. } => {
                for (c, col) in cols.iter().enumerate() {
                    for (r, v) in col {
                        push(*r, c, v.to_string());
                    }
                }
            }
        }
        out
    }

    /// Parse the [`to_text`](Self::to_text) format into the given domain.
    /// Rational values may be written "a/b"; other domains take integers.
    pub fn from_text(text: &str, domain: Domain) -> Result<Self, LinalgError> {
        domain.check()?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| LinalgError::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let nrows: usize = parse_field(parts.next(), "row count")?;
        let ncols: usize = parse_field(parts.next(), "column count")?;
        if parts.next().is_some() {
            return Err(LinalgError::Parse("header has trailing fields".into()));
        }
        let mut int_triples: Vec<(usize, usize, BigInt)> = Vec::new();
        let mut rat_triples: Vec<(usize, usize, BigRational)> = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let r: usize = parse_field(parts.next(), "row index")?;
            let c: usize = parse_field(parts.next(), "column index")?;
            let value = parts
                .next()
                .ok_or_else(|| LinalgError::Parse(format!("missing value in line {line:?}")))?;
            if parts.next().is_some() {
                return Err(LinalgError::Parse(format!("trailing fields in line {line:?}")));
            }
            if r >= nrows || c >= ncols {
                return Err(LinalgError::Parse(format!(
                    "entry ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            match domain {
                Domain::Rational => {
                    let v = BigRational::from_str(value).map_err(|e| {
                        LinalgError::Parse(format!("bad rational {value:?}: {e}"))
                    })?;
                    rat_triples.push((r, c, v));
                }
                _ => {
                    let v = BigInt::from_str(value).map_err(|e| {
                        LinalgError::Parse(format!("bad integer {value:?}: {e}"))
                    })?;
                    int_triples.push((r, c, v));
                }
            }
        }
        Ok(match domain {
            Domain::Rational => Self::from_rational_triples(nrows, ncols, rat_triples),
            _ => Self::from_bigint_triples(nrows, ncols, domain, int_triples),
        })
    }
}

fn parse_field<T: FromStr>(field: Option<&str>, what: &str) -> Result<T, LinalgError> {
    field
        .ok_or_else(|| LinalgError::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| LinalgError::Parse(format!("bad {what}")))
}

fn hstack(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    assert_eq!(a.nrows, b.nrows);
    assert_eq!(a.domain(), b.domain());
    let data = match (&a.data, &b.data) {
        (MatrixData::Int(x), MatrixData::Int(y)) => {
            MatrixData::Int(x.iter().chain(y).cloned().collect())
        }
        (MatrixData::Rat(x), MatrixData::Rat(y)) => {
            MatrixData::Rat(x.iter().chain(y).cloned().collect())
        }
        (MatrixData::Fp { p, cols: x }, MatrixData::Fp { cols: y, .. }) => MatrixData::Fp {
            p: *p,
            cols: x.iter().chain(y).cloned().collect(),
        },
        _ => unreachable!(),
    };
    ExactMatrix {
        nrows: a.nrows,
        ncols: a.ncols + b.ncols,
        data,
    }
}

fn col_get<T>(col: &Col<T>, row: u32) -> Option<&T> {
    col.binary_search_by_key(&row, |(r, _)| *r)
        .ok()
        .map(|i| &col[i].1)
}

fn bigint_mod_u64(v: &BigInt, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Extended Euclid; p prime and a nonzero mod p.
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} is not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

/// Scale a rational column to coprime integers. Returns the integer column
/// and the positive scale t with int_col = t * col.
fn normalize_rational_col(col: &Col<BigRational>) -> (Col<BigInt>, BigRational) {
    if col.is_empty() {
        return (Vec::new(), BigRational::one());
    }
    let mut denom_lcm = BigInt::one();
    for (_, v) in col {
        denom_lcm = denom_lcm.lcm(v.denom());
    }
    let scaled: Col<BigInt> = col
        .iter()
        .map(|(r, v)| (*r, v.numer() * (&denom_lcm / v.denom())))
        .collect();
    let mut g = BigInt::zero();
    for (_, v) in &scaled {
        g = g.gcd(v);
    }
    let out = scaled.into_iter().map(|(r, v)| (r, v / &g)).collect();
    (out, BigRational::new(denom_lcm, g))
}

/// Rescale a sparse rational vector to coprime integers with a positive
/// value at its highest-index entry.
fn canonicalize_rational_vector(v: Vec<(u32, BigRational)>) -> Col<BigInt> {
    let mut denom_lcm = BigInt::one();
    for (_, x) in &v {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let scaled: Col<BigInt> = v
        .into_iter()
        .map(|(i, x)| (i, x.numer() * (&denom_lcm / x.denom())))
        .collect();
    let mut g = BigInt::zero();
    for (_, x) in &scaled {
        g = g.gcd(x);
    }
    if scaled.last().expect("vector nonempty").1.is_negative() {
        g = -g;
    }
    scaled.into_iter().map(|(i, x)| (i, x / &g)).collect()
}

/// Connected components of the column graph (columns joined when they share
/// a row). Empty columns are excluded. Each group is sorted ascending.
fn split_components<T>(cols: &[Col<T>]) -> Vec<Vec<usize>> {
    struct Dsu(Vec<u32>);
    impl Dsu {
        fn find(&mut self, x: u32) -> u32 {
            if self.0[x as usize] != x {
                let root = self.find(self.0[x as usize]);
                self.0[x as usize] = root;
                root
            } else {
                x
            }
        }
        fn union(&mut self, a: u32, b: u32) {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra != rb {
                self.0[ra as usize] = rb;
            }
        }
    }
    let mut dsu = Dsu((0..cols.len() as u32).collect());
    let mut row_owner: BTreeMap<u32, u32> = BTreeMap::new();
    for (c, col) in cols.iter().enumerate() {
        for (r, _) in col {
            match row_owner.get(r) {
                Some(&owner) => dsu.union(c as u32, owner),
                None => {
                    row_owner.insert(*r, c as u32);
                }
            }
        }
    }
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (c, col) in cols.iter().enumerate() {
        if !col.is_empty() {
            groups.entry(dsu.find(c as u32)).or_default().push(c);
        }
    }
    groups.into_values().collect()
}

/// ca * a + cb * b over sorted sparse columns.
fn combine_int(ca: &BigInt, a: &Col<BigInt>, cb: &BigInt, b: &Col<BigInt>) -> Col<BigInt> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some((ra, va)), Some((rb, _))) if ra < rb => {
                i += 1;
                (*ra, ca * va)
            }
            (Some((ra, _)), Some((rb, vb))) if rb < ra => {
                j += 1;
                (*rb, cb * vb)
            }
            (Some((ra, va)), Some((_, vb))) => {
                i += 1;
                j += 1;
                (*ra, ca * va + cb * vb)
            }
            (Some((ra, va)), None) => {
                i += 1;
                (*ra, ca * va)
            }
            (None, Some((rb, vb))) => {
                j += 1;
                (*rb, cb * vb)
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    out
}

fn col_content(col: &Col<BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for (_, v) in col {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_col(col: &mut Col<BigInt>, g: &BigInt) {
    if g.is_one() || g.is_zero() {
        return;
    }
    for (_, v) in col.iter_mut() {
        *v = &*v / g;
    }
}

/// Fraction-free rank of integer columns, component by component.
fn rank_int_cols(cols: &[Col<BigInt>]) -> usize {
    split_components(cols)
        .iter()
        .map(|group| {
            let mut active: Vec<Col<BigInt>> = group.iter().map(|&c| cols[c].clone()).collect();
            let mut rank = 0;
            loop {
                let Some(pivot_idx) = active
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_empty())
                    .min_by_key(|(i, c)| (c.len(), *i))
                    .map(|(i, _)| i)
                else {
                    break;
                };
                let pivot_col = active.swap_remove(pivot_idx);
                let (pivot_row, pivot_val) = pivot_col
                    .iter()
                    .min_by_key(|(r, v)| (v.abs(), *r))
                    .map(|(r, v)| (*r, v.clone()))
                    .expect("pivot column nonempty");
                rank += 1;
                for col in active.iter_mut() {
                    if let Some(v) = col_get(col, pivot_row) {
                        let v = v.clone();
                        *col = combine_int(&pivot_val, col, &-v, &pivot_col);
                        let g = col_content(col);
                        divide_col(col, &g);
                    }
                }
            }
            rank
        })
        .sum()
}

fn rank_fp_cols(p: u64, cols: &[Col<u64>]) -> usize {
    split_components(cols)
        .iter()
        .map(|group| {
            let mut active: Vec<Col<u64>> = group.iter().map(|&c| cols[c].clone()).collect();
            let mut rank = 0;
            loop {
                let Some(pivot_idx) = active
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_empty())
                    .min_by_key(|(i, c)| (c.len(), *i))
                    .map(|(i, _)| i)
                else {
                    break;
                };
                let pivot_col = active.swap_remove(pivot_idx);
                let (pivot_row, pivot_val) = pivot_col[0];
                let inv = inv_mod(pivot_val, p);
                rank += 1;
                for col in active.iter_mut() {
                    if let Some(v) = col_get(col, pivot_row) {
                        // col -= (v / pivot_val) * pivot_col
                        let factor = (p - v * inv % p) % p;
                        *col = combine_fp(p, 1, col, factor, &pivot_col);
                    }
                }
            }
            rank
        })
        .sum()
}

fn combine_fp(p: u64, ca: u64, a: &Col<u64>, cb: u64, b: &Col<u64>) -> Col<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some((ra, va)), Some((rb, _))) if ra < rb => {
                i += 1;
                (*ra, ca * va % p)
            }
            (Some((ra, _)), Some((rb, vb))) if rb < ra => {
                j += 1;
                (*rb, cb * vb % p)
            }
            (Some((ra, va)), Some((_, vb))) => {
                i += 1;
                j += 1;
                (*ra, (ca * va + cb * vb) % p)
            }
            (Some((ra, va)), None) => {
                i += 1;
                (*ra, ca * va % p)
            }
            (None, Some((rb, vb))) => {
                j += 1;
                (*rb, cb * vb % p)
            }
            (None, None) => unreachable!(),
        };
        if next.1 != 0 {
            out.push(next);
        }
    }
    out
}

/// Column echelon kernel over Q (integer columns), returning sparse vectors
/// (column index, coprime integer value) with positive value at the defining
/// free column. The vectors are mathematically canonical: the dependency of
/// a free column on the earlier pivot columns is unique.
fn kernel_int_cols(cols: &[Col<BigInt>]) -> Vec<Col<BigInt>> {
    struct Pivot {
        m: Col<BigInt>,
        history: Col<BigInt>,
        row: u32,
        val: BigInt,
    }
    let mut kernel: Vec<Col<BigInt>> = Vec::new();
    for group in split_components(cols) {
        let mut pivots: Vec<Pivot> = Vec::new();
        for &j in &group {
            let mut m = cols[j].clone();
            let mut history: Col<BigInt> = vec![(j as u32, BigInt::one())];
            for pivot in &pivots {
                if let Some(v) = col_get(&m, pivot.row) {
                    let v = v.clone();
                    // (m & history) <- pivot.val * (m & history) - v * pivot.
                    m = combine_int(&pivot.val, &m, &-&v, &pivot.m);
                    history = combine_int(&pivot.val, &history, &-v, &pivot.history);
                    let g = col_content(&m).gcd(&col_content(&history));
                    divide_col(&mut m, &g);
                    divide_col(&mut history, &g);
                }
            }
            if m.is_empty() {
                // history[j] stayed nonzero: only pivot scalings touched it.
                if col_get(&history, j as u32).expect("free column coefficient").is_negative() {
                    for (_, v) in history.iter_mut() {
                        *v = -&*v;
                    }
                }
                kernel.push(history);
            } else {
                let (row, val) = m
                    .iter()
                    .min_by_key(|(r, v)| (v.abs(), *r))
                    .map(|(r, v)| (*r, v.clone()))
                    .expect("pivot column nonempty");
                pivots.push(Pivot { m, history, row, val });
            }
        }
    }
    // Zero columns never enter a component; each spans a kernel direction.
    for (j, col) in cols.iter().enumerate() {
        if col.is_empty() {
            kernel.push(vec![(j as u32, BigInt::one())]);
        }
    }
    kernel.sort_by_key(|v| v.last().expect("kernel vector nonempty").0);
    kernel
}

fn kernel_fp_cols(p: u64, cols: &[Col<u64>]) -> Vec<Col<u64>> {
    struct Pivot {
        m: Col<u64>,
        history: Col<u64>,
        row: u32,
        inv_val: u64,
    }
    let mut kernel: Vec<Col<u64>> = Vec::new();
    for group in split_components(cols) {
        let mut pivots: Vec<Pivot> = Vec::new();
        for &j in &group {
            let mut m = cols[j].clone();
            let mut history: Col<u64> = vec![(j as u32, 1u64)];
            for pivot in &pivots {
                if let Some(&v) = col_get(&m, pivot.row) {
                    let factor = (p - v * pivot.inv_val % p) % p;
                    m = combine_fp(p, 1, &m, factor, &pivot.m);
                    history = combine_fp(p, 1, &history, factor, &pivot.history);
                }
            }
            if m.is_empty() {
                let lead = *col_get(&history, j as u32).expect("free column coefficient");
                let scale = inv_mod(lead, p);
                for (_, v) in history.iter_mut() {
                    *v = *v * scale % p;
                }
                kernel.push(history);
            } else {
                let (row, val) = m[0];
                pivots.push(Pivot {
                    m,
                    history,
                    row,
                    inv_val: inv_mod(val, p),
                });
            }
        }
    }
    for (j, col) in cols.iter().enumerate() {
        if col.is_empty() {
            kernel.push(vec![(j as u32, 1u64)]);
        }
    }
    kernel.sort_by_key(|v| v.last().expect("kernel vector nonempty").0);
    kernel
}

/// Diagonal of the Smith form of one column component, as positive integers
/// in a divisibility chain.
fn snf_component(cols: &[Col<BigInt>], group: &[usize]) -> Vec<BigInt> {
    // Densify on local indices; components are weight blocks and stay small.
    let mut row_ids: Vec<u32> = group
        .iter()
        .flat_map(|&c| cols[c].iter().map(|(r, _)| *r))
        .collect();
    row_ids.sort_unstable();
    row_ids.dedup();
    let row_index: BTreeMap<u32, usize> = row_ids.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let nr = row_ids.len();
    let nc = group.len();
    let mut m = vec![vec![BigInt::zero(); nc]; nr];
    for (local_c, &c) in group.iter().enumerate() {
        for (r, v) in &cols[c] {
            m[row_index[r]][local_c] = v.clone();
        }
    }
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // Smallest nonzero entry of the trailing submatrix becomes the pivot.
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if m[i][j].is_zero() {
                    continue;
                }
                let a = m[i][j].abs();
                if best.as_ref().is_none_or(|(b, _, _)| a < *b) {
                    best = Some((a, i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        // Euclidean reduction of row and column t; truncated quotients
        // shrink remainders, so re-picking the pivot terminates.
        let mut dirty = false;
        for i in t + 1..nr {
            if m[i][t].is_zero() {
                continue;
            }
            let q = &m[i][t] / &m[t][t];
            if !q.is_zero() {
                for j in t..nc {
                    let sub = &q * &m[t][j];
                    m[i][j] -= sub;
                }
            }
            if !m[i][t].is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..nc {
            if m[t][j].is_zero() {
                continue;
            }
            let q = &m[t][j] / &m[t][t];
            if !q.is_zero() {
                for row in m.iter_mut().skip(t) {
                    let sub = &q * &row[t];
                    row[j] -= sub;
                }
            }
            if !m[t][j].is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // Pivot must divide the rest of the submatrix; pull a bad row up.
        let pivot = m[t][t].clone();
        let mut fixed = true;
        'scan: for i in t + 1..nr {
            for j in t + 1..nc {
                if !(&m[i][j] % &pivot).is_zero() {
                    for jj in t..nc {
                        let add = m[i][jj].clone();
                        m[t][jj] += add;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        diag.push(pivot.abs());
        t += 1;
    }
    diag
}

/// Merge invariant-factor multisets into one global divisibility chain.
fn divisibility_chain(factors: Vec<BigInt>) -> Vec<BigInt> {
    let ones = factors.iter().filter(|d| d.is_one()).count();
    let mut rest: Vec<BigInt> = factors.into_iter().filter(|d| !d.is_one()).collect();
    loop {
        rest.sort();
        let mut changed = false;
        for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                if !(&rest[j] % &rest[i]).is_zero() {
                    let g = rest[i].gcd(&rest[j]);
                    let l = rest[i].lcm(&rest[j]);
                    rest[i] = g;
                    rest[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let extra_ones = rest.iter().filter(|d| d.is_one()).count();
    let mut chain = vec![BigInt::one(); ones + extra_ones];
    chain.extend(rest.into_iter().filter(|d| !d.is_one()));
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int_matrix(domain: Domain, rows: &[&[i64]]) -> ExactMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        ExactMatrix::from_integer_triples(
            nrows,
            ncols,
            domain,
            rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter().enumerate().map(move |(c, &v)| (r, c, v))
            }),
        )
    }

    fn factors(m: &ExactMatrix) -> Vec<i64> {
        m.smith_normal_form()
            .unwrap()
            .invariant_factors
            .iter()
            .map(|d| d.to_i64().unwrap())
            .collect()
    }

    // Independent dense oracle: Bareiss rank over Q in i128.
    fn dense_rank_rational(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect();
        let (nr, nc) = (m.len(), m.first().map_or(0, Vec::len));
        let mut rank = 0;
        let mut row = 0;
        for col in 0..nc {
            let Some(p) = (row..nr).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(row, p);
            for i in 0..nr {
                if i != row && m[i][col] != 0 {
                    let (a, b) = (m[row][col], m[i][col]);
                    for j in 0..nc {
                        m[i][j] = m[i][j] * a - m[row][j] * b;
                    }
                    let g = m[i].iter().fold(0i128, |acc, &v| {
                        num_integer::gcd(acc, v)
                    });
                    if g > 1 {
                        for v in m[i].iter_mut() {
                            *v /= g;
                        }
                    }
                }
            }
            row += 1;
            rank += 1;
            if row == nr {
                break;
            }
        }
        rank
    }

    // Independent dense oracle: elimination mod p.
    fn dense_rank_mod_p(rows: &[Vec<i64>], p: u64) -> usize {
        let mut m: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect())
            .collect();
        let (nr, nc) = (m.len(), m.first().map_or(0, Vec::len));
        let mut rank = 0;
        let mut row = 0;
        for col in 0..nc {
            let Some(pi) = (row..nr).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(row, pi);
            let inv = inv_mod(m[row][col], p);
            for i in 0..nr {
                if i != row && m[i][col] != 0 {
                    let f = (p - m[i][col] * inv % p) % p;
                    for j in 0..nc {
                        m[i][j] = (m[i][j] + f * m[row][j]) % p;
                    }
                }
            }
            row += 1;
            rank += 1;
            if row == nr {
                break;
            }
        }
        rank
    }

    // Independent oracle via determinantal divisors: d_1 * ... * d_k is the
    // gcd of all k x k minors. Only viable at toy sizes, which is the point.
    fn dense_snf(rows: &[Vec<i64>]) -> Vec<i128> {
        fn det(m: &[Vec<i64>], rset: &[usize], cset: &[usize]) -> i128 {
            if rset.is_empty() {
                return 1;
            }
            let mut total = 0i128;
            let mut sign = 1i128;
            for (k, &c) in cset.iter().enumerate() {
                let sub_c: Vec<usize> = cset
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(_, &cc)| cc)
                    .collect();
                total += sign * m[rset[0]][c] as i128 * det(m, &rset[1..], &sub_c);
                sign = -sign;
            }
            total
        }
        fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..=n.saturating_sub(k) {
                for mut rest in combinations(n - first - 1, k - 1) {
                    for v in rest.iter_mut() {
                        *v += first + 1;
                    }
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        let mut divisors = Vec::new();
        for k in 1..=nr.min(nc) {
            let mut g = 0i128;
            for rset in combinations(nr, k) {
                for cset in combinations(nc, k) {
                    g = num_integer::gcd(g, det(rows, &rset, &cset));
                }
            }
            if g == 0 {
                break;
            }
            divisors.push(g);
        }
        let mut prev = 1i128;
        divisors
            .into_iter()
            .map(|g| {
                let d = g / prev;
                prev = g;
                d
            })
            .collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(ExactMatrix::identity(2, Domain::Rational).rank().unwrap(), 2);
        let m = int_matrix(Domain::Rational, &[&[2, 4], &[4, 8]]);
        assert_eq!(m.rank().unwrap(), 1);
        let m = int_matrix(Domain::Prime(2), &[&[2, 4], &[4, 8]]);
        assert_eq!(m.rank().unwrap(), 0);
        let err = int_matrix(Domain::Integer, &[&[1]]).rank().unwrap_err();
        assert_eq!(err, LinalgError::IntegerDomain { op: "rank" });
    }

    #[test]
    fn smith_form_examples() {
        let m = int_matrix(Domain::Integer, &[&[2, 0], &[0, 3]]);
        assert_eq!(factors(&m), vec![1, 6]);
        let m = int_matrix(Domain::Integer, &[&[2, 4], &[4, 8]]);
        assert_eq!(factors(&m), vec![2]);
        assert_eq!(factors(&ExactMatrix::identity(2, Domain::Integer)), vec![1, 1]);
        let err = int_matrix(Domain::Rational, &[&[1]])
            .smith_normal_form()
            .unwrap_err();
        assert_eq!(
            err,
            LinalgError::NotIntegerDomain {
                domain: Domain::Rational
            }
        );
    }

    #[test]
    fn kernel_examples() {
        let z = ExactMatrix::zero(3, 3, Domain::Rational);
        let basis = z.kernel_basis().unwrap();
        assert_eq!(basis.len(), 3);
        for (i, v) in basis.iter().enumerate() {
            for (j, s) in v.iter().enumerate() {
                assert_eq!(s.is_zero(), i != j);
            }
        }
        let m = int_matrix(Domain::Rational, &[&[1, 1]]);
        let basis = m.kernel_basis().unwrap();
        assert_eq!(basis.len(), 1);
        let v: Vec<String> = basis[0].iter().map(|s| s.to_string()).collect();
        assert_eq!(v, vec!["-1", "1"]);
    }

    #[test]
    fn kernel_is_canonical_under_pivot_choices() {
        // Same column span, different layout: each free column's dependency
        // on earlier pivots is unique, so both give the same vector at the
        // shared free column pattern.
        let m = int_matrix(Domain::Rational, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let basis = m.kernel_basis().unwrap();
        assert_eq!(basis.len(), 1);
        let v: Vec<String> = basis[0].iter().map(|s| s.to_string()).collect();
        assert_eq!(v, vec!["-1", "-1", "1"]);
    }

    #[test]
    fn solve_examples() {
        let m = int_matrix(Domain::Rational, &[&[1, 0], &[0, 2], &[1, 2]]);
        let rhs: Vec<ExactScalar> = [3, 4, 7]
            .iter()
            .map(|&v| ExactScalar::Rat(BigRational::from(BigInt::from(v))))
            .collect();
        let x = m.solve(&rhs).unwrap().unwrap();
        let strings: Vec<String> = x.iter().map(|s| s.to_string()).collect();
        assert_eq!(strings, vec!["3", "2"]);
        let bad_rhs: Vec<ExactScalar> = [1, 0, 0]
            .iter()
            .map(|&v| ExactScalar::Rat(BigRational::from(BigInt::from(v))))
            .collect();
        assert_eq!(m.solve(&bad_rhs).unwrap(), None);

        let m = int_matrix(Domain::Prime(5), &[&[2]]);
        let rhs = vec![ExactScalar::Fp { value: 3, modulus: 5 }];
        let x = m.solve(&rhs).unwrap().unwrap();
        assert_eq!(x, vec![ExactScalar::Fp { value: 4, modulus: 5 }]);
    }

    #[test]
    fn multiply_and_transpose() {
        let a = int_matrix(Domain::Integer, &[&[1, 2], &[3, 4]]);
        let b = int_matrix(Domain::Integer, &[&[0, 1], &[1, 0]]);
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab, int_matrix(Domain::Integer, &[&[2, 1], &[4, 3]]));
        let at = a.transpose();
        assert_eq!(at, int_matrix(Domain::Integer, &[&[1, 3], &[2, 4]]));
        let err = a
            .multiply(&int_matrix(Domain::Rational, &[&[1, 0], &[0, 1]]))
            .unwrap_err();
        assert!(matches!(err, LinalgError::DomainMismatch { .. }));
    }

    #[test]
    fn vstack_stacks_rows() {
        let a = int_matrix(Domain::Rational, &[&[1, 2]]);
        let b = int_matrix(Domain::Rational, &[&[3, 4], &[5, 6]]);
        let s = ExactMatrix::vstack(&[&a, &b]).unwrap();
        assert_eq!(s, int_matrix(Domain::Rational, &[&[1, 2], &[3, 4], &[5, 6]]));
    }

    #[test]
    fn text_roundtrip() {
        let m = int_matrix(Domain::Integer, &[&[1, 0, -2], &[0, 3, 0]]);
        let text = m.to_text();
        assert!(text.starts_with("2 3\n"));
        let back = ExactMatrix::from_text(&text, Domain::Integer).unwrap();
        assert_eq!(m, back);

        let q = ExactMatrix::from_text("1 2\n0 0 1/2\n0 1 -3\n", Domain::Rational).unwrap();
        assert_eq!(q.entry(0, 0).to_string(), "1/2");
        assert_eq!(q.entry(0, 1).to_string(), "-3");

        assert!(ExactMatrix::from_text("", Domain::Integer).is_err());
        assert!(ExactMatrix::from_text("2 2\n5 0 1\n", Domain::Integer).is_err());
        assert!(ExactMatrix::from_text("2 2\n0 0 x\n", Domain::Integer).is_err());
    }

    #[test]
    fn bad_modulus_rejected() {
        assert!(ExactMatrix::from_text("1 1\n0 0 1\n", Domain::Prime(4)).is_err());
        assert!(ExactMatrix::from_text("1 1\n0 0 1\n", Domain::Prime(1 << 31)).is_err());
        assert!(ExactMatrix::from_text("1 1\n0 0 1\n", Domain::Prime((1 << 31) - 1)).is_ok());
    }

    #[test]
    fn modular_inverse() {
        for p in [2u64, 3, 5, 7, 31, 97] {
            for a in 1..p.min(40) {
                assert_eq!(a * inv_mod(a, p) % p, 1, "a={a} p={p}");
            }
        }
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(nr, nc)| {
            proptest::collection::vec(proptest::collection::vec(-9i64..10, nc), nr)
        })
    }

    fn to_exact(rows: &[Vec<i64>], domain: Domain) -> ExactMatrix {
        ExactMatrix::from_integer_triples(
            rows.len(),
            rows[0].len(),
            domain,
            rows.iter()
                .enumerate()
                .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v))),
        )
    }

    proptest! {
        #[test]
        fn prop_rank_matches_dense_oracle(rows in arb_matrix()) {
            let m = to_exact(&rows, Domain::Rational);
            prop_assert_eq!(m.rank().unwrap(), dense_rank_rational(&rows));
        }

        #[test]
        fn prop_fp_rank_matches_dense_oracle(rows in arb_matrix(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let m = to_exact(&rows, Domain::Prime(p));
            prop_assert_eq!(m.rank().unwrap(), dense_rank_mod_p(&rows, p));
        }

        #[test]
        fn prop_snf_matches_dense_oracle(rows in arb_matrix()) {
            let m = to_exact(&rows, Domain::Integer);
            let got: Vec<i128> = m
                .smith_normal_form()
                .unwrap()
                .invariant_factors
                .iter()
                .map(|d| d.to_i128().unwrap())
                .collect();
            prop_assert_eq!(got, dense_snf(&rows));
        }

        #[test]
        fn prop_snf_divisibility_and_rank(rows in arb_matrix()) {
            let m = to_exact(&rows, Domain::Integer);
            let snf = m.smith_normal_form().unwrap();
            for w in snf.invariant_factors.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            for d in &snf.invariant_factors {
                prop_assert!(d.is_positive());
            }
            prop_assert_eq!(snf.rank, m.with_domain(Domain::Rational).rank().unwrap());
        }

        #[test]
        fn prop_fp_rank_from_invariant_factors(rows in arb_matrix(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let snf = to_exact(&rows, Domain::Integer).smith_normal_form().unwrap();
            let divisible = snf
                .invariant_factors
                .iter()
                .filter(|d| (*d % BigInt::from(p)).is_zero())
                .count();
            let fp_rank = to_exact(&rows, Domain::Prime(p)).rank().unwrap();
            prop_assert_eq!(fp_rank, snf.rank - divisible);
        }

        #[test]
        fn prop_kernel_annihilates_and_spans(rows in arb_matrix()) {
            let m = to_exact(&rows, Domain::Rational);
            let basis = m.kernel_basis().unwrap();
            prop_assert_eq!(basis.len(), m.ncols() - m.rank().unwrap());
            for v in &basis {
                for s in m.apply(v).unwrap() {
                    prop_assert!(s.is_zero());
                }
            }
            if !basis.is_empty() {
                let kernel_matrix = ExactMatrix::from_rational_triples(
                    m.ncols(),
                    basis.len(),
                    basis.iter().enumerate().flat_map(|(k, v)| {
                        v.iter().enumerate().filter_map(move |(i, s)| match s {
                            ExactScalar::Rat(x) if !x.is_zero() => Some((i, k, x.clone())),
                            _ => None,
                        })
                    }),
                );
                prop_assert_eq!(kernel_matrix.rank().unwrap(), basis.len());
            }
        }

        #[test]
        fn prop_fp_kernel_annihilates(rows in arb_matrix(), p in prop::sample::select(vec![2u64, 3, 5])) {
            let m = to_exact(&rows, Domain::Prime(p));
            let basis = m.kernel_basis().unwrap();
            prop_assert_eq!(basis.len(), m.ncols() - m.rank().unwrap());
            for v in &basis {
                for s in m.apply(v).unwrap() {
                    prop_assert!(s.is_zero());
                }
            }
        }
    }
}
