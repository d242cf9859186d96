//! Root-system combinatorics for the simple Lie types.
//!
//! Conventions. Cartan matrices follow the Bourbaki plate labeling, with
//! `a[i][j] = <alpha_j, alpha_i^vee>`, so row `i` lists the pairings of all
//! simple roots against the `i`-th simple coroot and `(d_i a_ij)` is
//! symmetric for the symmetrizers `d_i = (alpha_i, alpha_i)/2`. Roots are
//! stored as integer coordinate vectors in the simple-root basis; no
//! Euclidean embedding is ever materialized.
//!
//! Exponents are computed from the positive-root height distribution by the
//! dual-partition construction, which keeps the degree table an output of
//! root combinatorics rather than hardcoded data.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootDataError {
    #[error("invalid rank {rank} for series {series}: valid ranks are {valid}")]
    InvalidRank {
        series: char,
        rank: usize,
        valid: &'static str,
    },
    #[error("cannot parse Lie type from {0:?}: expected a series letter A-G followed by a rank, e.g. \"D4\"")]
    Parse(String),
}

/// One of the seven series of simple Lie types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }
}

/// A simple Lie type such as `A2` or `E8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LieType {
    series: Series,
    rank: usize,
}

impl LieType {
    /// Validates the rank range for the series: A >= 1, B >= 2, C >= 2,
    /// D >= 4, E in {6,7,8}, F = 4, G = 2.
    pub fn new(series: Series, rank: usize) -> Result<Self, RootDataError> {
        let valid = match series {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            Series::D => rank >= 4,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        };
        if valid {
            Ok(LieType { series, rank })
        } else {
            Err(RootDataError::InvalidRank {
                series: series.letter(),
                rank,
                valid: match series {
                    Series::A => "r >= 1",
                    Series::B | Series::C => "r >= 2",
                    Series::D => "r >= 4",
                    Series::E => "r in {6,7,8}",
                    Series::F => "r = 4",
                    Series::G => "r = 2",
                },
            })
        }
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

impl FromStr for LieType {
    type Err = RootDataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        let series = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Series::A,
            Some('B') => Series::B,
            Some('C') => Series::C,
            Some('D') => Series::D,
            Some('E') => Series::E,
            Some('F') => Series::F,
            Some('G') => Series::G,
            _ => return Err(RootDataError::Parse(s.to_string())),
        };
        let rest: String = chars.collect();
        let rank: usize = rest
            .parse()
            .map_err(|_| RootDataError::Parse(s.to_string()))?;
        LieType::new(series, rank).map_err(|_| RootDataError::Parse(s.to_string()))
    }
}

impl Serialize for LieType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LieType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// The root system of a simple Lie type: Cartan matrix, symmetrizers,
/// positive roots in simple-root coordinates, Coxeter number, exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    pub lie_type: LieType,
    /// `cartan[i][j] = <alpha_j, alpha_i^vee>`; diagonal 2, off-diagonal <= 0.
    pub cartan: Vec<Vec<i64>>,
    /// `d_i = (alpha_i, alpha_i)/2`, positive integers with gcd 1 making
    /// `(d_i a_ij)` symmetric.
    pub symmetrizers: Vec<i64>,
    /// Sorted by (height, lexicographic coordinates).
    pub positive_roots: Vec<Vec<i64>>,
    pub coxeter_number: usize,
    /// Ascending; `generator_degrees = 2*m + 1` over these.
    pub exponents: Vec<usize>,
    index: BTreeMap<Vec<i64>, usize>,
}

impl RootSystem {
    /// `<v, alpha_i^vee>` for `v` in simple-root coordinates.
    pub fn pairing(&self, v: &[i64], i: usize) -> i64 {
        self.cartan[i]
            .iter()
            .zip(v)
            .map(|(a, c)| a * c)
            .sum()
    }

    /// Half squared length `(v, v)/2` of a root `v`; lies in {1, 2, 3}.
    pub fn length_half(&self, v: &[i64]) -> i64 {
        let r = self.lie_type.rank();
        let mut two_norm = 0;
        for i in 0..r {
            for j in 0..r {
                two_norm += self.symmetrizers[i] * self.cartan[i][j] * v[i] * v[j];
            }
        }
        debug_assert_eq!(two_norm % 2, 0);
        two_norm / 2
    }

    /// Index of a positive root in `positive_roots`, if present.
    pub fn positive_root_index(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    /// `dim g = rank + |Phi|`.
    pub fn lie_algebra_dim(&self) -> usize {
        self.lie_type.rank() + 2 * self.positive_roots.len()
    }

    pub fn height(v: &[i64]) -> i64 {
        v.iter().sum()
    }
}

fn cartan_matrix(t: LieType) -> Vec<Vec<i64>> {
    let r = t.rank();
    let mut a = vec![vec![0i64; r]; r];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let bond = |a: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    match t.series() {
        Series::A => {
            for i in 0..r - 1 {
                bond(&mut a, i, i + 1);
            }
        }
        Series::B => {
            // alpha_r short: a_{r-1,r} = -1, a_{r,r-1} = -2.
            for i in 0..r - 1 {
                bond(&mut a, i, i + 1);
            }
            a[r - 1][r - 2] = -2;
        }
        Series::C => {
            // alpha_r long: a_{r-1,r} = -2, a_{r,r-1} = -1.
            for i in 0..r - 1 {
                bond(&mut a, i, i + 1);
            }
            a[r - 2][r - 1] = -2;
        }
        Series::D => {
            for i in 0..r - 2 {
                bond(&mut a, i, i + 1);
            }
            bond(&mut a, r - 3, r - 1);
        }
        Series::E => {
            // Bourbaki: chain 1-3-4-5-6(-7(-8)), with 2 attached to 4.
            bond(&mut a, 0, 2);
            bond(&mut a, 1, 3);
            for i in 2..r - 1 {
                bond(&mut a, i, i + 1);
            }
        }
        Series::F => {
            // alpha1, alpha2 long: a_{2,3} = -1, a_{3,2} = -2.
            bond(&mut a, 0, 1);
            bond(&mut a, 1, 2);
            bond(&mut a, 2, 3);
            a[2][1] = -2;
        }
        Series::G => {
            // alpha1 short, d = (1,3): a_{1,2} = -3, a_{2,1} = -1.
            a[0][1] = -3;
            a[1][0] = -1;
        }
    }
    a
}

/// Positive integer symmetrizers with gcd 1 making `(d_i a_ij)` symmetric,
/// propagated along the (connected) Dynkin diagram.
fn compute_symmetrizers(cartan: &[Vec<i64>]) -> Vec<i64> {
    let r = cartan.len();
    // Propagate rational ratios via BFS: d_j / d_i = a_ij / a_ji on bonds.
    // Track d_i as num/den pairs over a common start d_0 = 1.
    let mut num = vec![0i64; r];
    let mut den = vec![0i64; r];
    num[0] = 1;
    den[0] = 1;
    let mut queue = vec![0usize];
    while let Some(i) = queue.pop() {
        for j in 0..r {
            if i != j && cartan[i][j] != 0 && den[j] == 0 {
                // d_i a_ij = d_j a_ji  =>  d_j = d_i * a_ij / a_ji.
                num[j] = num[i] * cartan[i][j];
                den[j] = den[i] * cartan[j][i];
                if num[j] < 0 && den[j] < 0 {
                    num[j] = -num[j];
                    den[j] = -den[j];
                }
                queue.push(j);
            }
        }
    }
    let lcm_den = den.iter().fold(1i64, |acc, &d| num_integer::lcm(acc, d));
    let mut d: Vec<i64> = (0..r).map(|i| num[i] * (lcm_den / den[i])).collect();
    let g = d.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x));
    for x in d.iter_mut() {
        *x /= g;
    }
    assert!(d.iter().all(|&x| x > 0), "symmetrizers must be positive");
    for i in 0..r {
        for j in 0..r {
            assert_eq!(
                d[i] * cartan[i][j],
                d[j] * cartan[j][i],
                "(d_i a_ij) must be symmetric"
            );
        }
    }
    d
}

/// Closure of the simple roots under simple reflections, restricted to
/// positive roots. `s_i(v) = v - <v, alpha_i^vee> alpha_i`.
fn generate_positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let r = cartan.len();
    let mut seen: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
    let mut queue: Vec<Vec<i64>> = Vec::new();
    for i in 0..r {
        let mut v = vec![0i64; r];
        v[i] = 1;
        seen.insert(v.clone(), ());
        queue.push(v);
    }
    while let Some(v) = queue.pop() {
        for i in 0..r {
            let pairing: i64 = cartan[i].iter().zip(&v).map(|(a, c)| a * c).sum();
            let mut w = v.clone();
            w[i] -= pairing;
            if w.iter().all(|&c| c >= 0) && !seen.contains_key(&w) {
                seen.insert(w.clone(), ());
                queue.push(w);
            }
        }
    }
    let mut roots: Vec<Vec<i64>> = seen.into_keys().collect();
    roots.sort_by_key(|v| (RootSystem::height(v), v.clone()));
    roots
}

/// Exponents as the dual partition of the height distribution: the j-th
/// largest exponent is `#{heights k : #roots of height k >= j}`.
fn exponents_from_heights(positive_roots: &[Vec<i64>], rank: usize) -> Vec<usize> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in positive_roots {
        *counts.entry(RootSystem::height(v)).or_insert(0) += 1;
    }
    let max_mult = counts.values().copied().max().unwrap_or(0);
    assert_eq!(max_mult, rank, "height 1 must carry exactly the simple roots");
    let mut exps: Vec<usize> = (1..=max_mult)
        .map(|j| counts.values().filter(|&&c| c >= j).count())
        .collect();
    exps.sort_unstable();
    exps
}

pub fn build_root_system(t: LieType) -> RootSystem {
    let cartan = cartan_matrix(t);
    let symmetrizers = compute_symmetrizers(&cartan);
    let positive_roots = generate_positive_roots(&cartan);
    let coxeter_number = 1 + positive_roots
        .iter()
        .map(|v| RootSystem::height(v) as usize)
        .max()
        .expect("at least one positive root");
    let exponents = exponents_from_heights(&positive_roots, t.rank());
    assert_eq!(
        2 * positive_roots.len(),
        t.rank() * coxeter_number,
        "|Phi| = r h"
    );
    let index = positive_roots
        .iter()
        .enumerate()
        .map(|(k, v)| (v.clone(), k))
        .collect();
    RootSystem {
        lie_type: t,
        cartan,
        symmetrizers,
        positive_roots,
        coxeter_number,
        exponents,
        index,
    }
}

/// The degrees of the homogeneous generators of H*(g), ascending: `2 m_i + 1`
/// over the exponents `m_i`.
pub fn generator_degrees(t: LieType) -> Vec<usize> {
    build_root_system(t)
        .exponents
        .iter()
        .map(|m| 2 * m + 1)
        .collect()
}

/// `(h, 3(h-1))`: the Coxeter number and the prime threshold above which the
/// characteristic-p ring is expected to match the characteristic-0 one.
pub fn coxeter_threshold(t: LieType) -> (usize, usize) {
    let h = build_root_system(t).coxeter_number;
    (h, 3 * (h - 1))
}
