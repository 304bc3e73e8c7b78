//! Points of the search space and the swap (2-exchange) neighborhood.
//!
//! Indices are 0-based: `mapping[i]` is the location of facility `i`. The
//! usual mathematical notation x(1..n) is shifted down by one.

use std::fmt;

use itertools::Itertools;
use rand::Rng;

use crate::{Error, Result};

/// Smallest problem size accepted anywhere in the crate.
pub const MIN_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    /// Validates that `mapping` is a bijection on `0..n` with `n >= 3`.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        if n < MIN_SIZE {
            return Err(Error::SizeTooSmall { n });
        }
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n {
                return Err(Error::NotBijection(format!("value {v} out of range 0..{n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotBijection(format!("value {v} appears more than once")));
            }
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    /// Uniform random permutation (Fisher–Yates driven by `rng`).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            mapping.swap(i, j);
        }
        Self::new(mapping)
    }

    pub(crate) fn from_vec_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(Self::new(mapping.clone()).is_ok());
        Permutation { mapping }
    }

    pub fn n(&self) -> usize {
        self.mapping.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    /// Location assigned to facility `i`.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.mapping[i]
    }

    /// Copy of `self` with the images of positions `u` and `v` exchanged.
    pub fn swap(&self, u: usize, v: usize) -> Result<Self> {
        let n = self.n();
        for idx in [u, v] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        if u == v {
            return Err(Error::SameIndex(u));
        }
        let mut mapping = self.mapping.clone();
        mapping.swap(u, v);
        Ok(Permutation { mapping })
    }

    pub(crate) fn swap_in_place(&mut self, u: usize, v: usize) {
        self.mapping.swap(u, v);
    }

    /// All `n(n-1)/2` swap neighbors, ordered by the pair `(u, v)` with `u < v`
    /// in lexicographic order.
    pub fn neighbors(&self) -> Neighbors<'_> {
        Neighbors { base: self, u: 0, v: 1 }
    }

    /// Lexicographic rank in `0..n!`.
    pub fn rank(&self) -> usize {
        let n = self.n();
        let mut rank = 0usize;
        for i in 0..n {
            let smaller_after = self.mapping[i + 1..].iter().filter(|&&v| v < self.mapping[i]).count();
            rank = rank * (n - i) + smaller_after;
        }
        rank
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mapping.iter().join(","))
    }
}

/// Size of the swap neighborhood, `n(n-1)/2`.
pub fn neighborhood_size(n: usize) -> usize {
    n * (n - 1) / 2
}

/// The swap pairs `(u, v)`, `u < v`, in lexicographic order.
pub fn swap_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

/// Iterator over swap neighbors; see [`Permutation::neighbors`].
pub struct Neighbors<'a> {
    base: &'a Permutation,
    u: usize,
    v: usize,
}

impl Iterator for Neighbors<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let n = self.base.n();
        if self.v >= n {
            self.u += 1;
            self.v = self.u + 1;
            if self.v >= n {
                return None;
            }
        }
        let mut mapping = self.base.mapping.clone();
        mapping.swap(self.u, self.v);
        self.v += 1;
        Some(Permutation { mapping })
    }
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    (0..n).permutations(n).map(Permutation::from_vec_unchecked)
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}
