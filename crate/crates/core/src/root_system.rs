//! The A_ℓ root system in the fundamental-weight basis.
//!
//! Weights are integer vectors `(n_1, …, n_ℓ)` meaning `Σ n_k ω_k`. Since
//! `(α_i, ω_j) = δ_ij`, every pairing of a weight with a positive root is an
//! integer partial sum of coordinates, so nothing here needs rational
//! arithmetic. The Gram matrix of the fundamental weights is exposed scaled by
//! `ℓ + 1` for callers that need full inner products.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Root datum of `su(ℓ+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootSystem {
    rank: usize,
}

/// Positive root `α_ij = α_i + … + α_{j-1}`, with `1 ≤ i < j ≤ ℓ+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PositiveRoot {
    pub i: usize,
    pub j: usize,
}

/// Integer weight in the fundamental-weight basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(Vec<i64>);

impl RootSystem {
    pub fn new(rank: usize) -> Result<Self> {
        if rank < 1 {
            return Err(Error::InvalidRank(rank));
        }
        Ok(RootSystem { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All positive roots in lexicographic order of `(i, j)`.
    pub fn positive_roots(&self) -> Vec<PositiveRoot> {
        let n = self.rank + 1;
        (1..n).flat_map(|i| (i + 1..=n).map(move |j| PositiveRoot { i, j })).collect()
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let l = self.rank;
        (0..l)
            .map(|r| {
                (0..l)
                    .map(|c| match r.abs_diff(c) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect()
    }

    /// The simple root `α_i` (1-based) as a weight: the `i`-th column of the
    /// Cartan matrix.
    pub fn simple_root(&self, i: usize) -> Result<Weight> {
        if i == 0 || i > self.rank {
            return Err(Error::IndexOutOfRange { index: i, rank: self.rank });
        }
        let a = self.cartan_matrix();
        Ok(Weight((0..self.rank).map(|r| a[r][i - 1]).collect()))
    }

    /// The positive root `α_ij` expressed in the fundamental-weight basis.
    pub fn root_weight(&self, r: PositiveRoot) -> Weight {
        let a = self.cartan_matrix();
        Weight((0..self.rank).map(|row| (r.i..r.j).map(|col| a[row][col - 1]).sum()).collect())
    }

    /// `(ℓ+1)·(ω_i, ω_j) = min(i,j)·(ℓ+1−max(i,j))`, i.e. the inverse Cartan
    /// matrix with its common denominator cleared.
    pub fn scaled_gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank as i64 + 1;
        (1..=self.rank as i64).map(|i| (1..=self.rank as i64).map(|j| i.min(j) * (n - i.max(j))).collect()).collect()
    }

    /// `(ℓ+1)·(λ, μ)` for weights in this root system.
    pub fn scaled_inner(&self, a: &Weight, b: &Weight) -> i64 {
        let g = self.scaled_gram();
        let mut acc = 0;
        for (r, x) in a.0.iter().enumerate() {
            for (c, y) in b.0.iter().enumerate() {
                acc += x * g[r][c] * y;
            }
        }
        acc
    }

    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank])
    }

    pub fn zero(&self) -> Weight {
        Weight(vec![0; self.rank])
    }

    /// Fundamental weight `ω_k` (1-based).
    pub fn fundamental(&self, k: usize) -> Result<Weight> {
        if k == 0 || k > self.rank {
            return Err(Error::IndexOutOfRange { index: k, rank: self.rank });
        }
        let mut v = vec![0; self.rank];
        v[k - 1] = 1;
        Ok(Weight(v))
    }

    pub fn check(&self, w: &Weight) -> Result<()> {
        if w.0.len() != self.rank {
            return Err(Error::DimensionMismatch { rank: self.rank, got: w.0.len() });
        }
        Ok(())
    }

    pub fn check_dominant(&self, w: &Weight) -> Result<()> {
        self.check(w)?;
        if !w.is_dominant() {
            return Err(Error::NotDominant(w.0.clone()));
        }
        Ok(())
    }
}

impl PositiveRoot {
    pub fn is_simple(&self) -> bool {
        self.j == self.i + 1
    }
}

impl fmt::Display for PositiveRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α_{}{}", self.i, self.j)
    }
}

impl Weight {
    pub fn new(coords: Vec<i64>) -> Self {
        Weight(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        assert_eq!(self.0.len(), rhs.0.len(), "weights of different rank");
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        assert_eq!(self.0.len(), rhs.0.len(), "weights of different rank");
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|c| -c).collect())
    }
}

/// `(Λ, α_ij) = Σ_{k=i}^{j-1} n_k`.
pub fn pair_weight_root(w: &Weight, r: PositiveRoot) -> i64 {
    w.0[r.i - 1..r.j - 1].iter().sum()
}

/// `(ρ, α_ij) = j − i`.
pub fn rho_pairing(r: PositiveRoot) -> i64 {
    (r.j - r.i) as i64
}

/// Exponent `e` with `K_{2ρ} v = q^e v` for a weight vector `v` of weight `μ`:
/// `e = (2ρ, μ) = Σ_j j(ℓ+1−j) m_j`.
pub fn two_rho_pairing(mu: &Weight) -> i64 {
    let n = mu.0.len() as i64 + 1;
    mu.0.iter()
        .enumerate()
        .map(|(k, m)| {
            let j = k as i64 + 1;
            j * (n - j) * m
        })
        .sum()
}

/// Image of a weight under the diagram automorphism `i ↦ ℓ+1−i`.
pub fn dual_weight(w: &Weight) -> Weight {
    Weight(w.0.iter().rev().copied().collect())
}
