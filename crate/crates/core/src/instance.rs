//! Problem data: the product-form QAP instance `(r, w)` and the general
//! four-index coefficient tensor `psi[i][j][p][q]`.

use std::ops::AddAssign;

use num_traits::Num;

use crate::decomposition::Marginals;
use crate::permutation::{Permutation, MIN_SIZE};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Entries up to this magnitude keep every `O(n^2)` sum inside `i128`.
const INT_ENTRY_LIMIT: i64 = 1 << 32;

/// Largest size for which a dense `n^4` tensor may be built.
pub const MAX_TENSOR_SIZE: usize = 32;

/// Anything with an objective over permutations of `0..n`.
pub trait Landscape<S: Scalar> {
    fn n(&self) -> usize;

    /// Objective value at `x`; `x` must have size `self.n()`.
    fn fitness(&self, x: &Permutation) -> Result<S>;

    /// Fitness after `x.swap(u, v)`, given `f_x = fitness(x)`.
    fn fitness_after_swap(&self, x: &Permutation, f_x: &S, u: usize, v: usize) -> Result<S> {
        let _ = f_x;
        self.fitness(&x.swap(u, v)?)
    }
}

/// QAP instance: `r` holds distances between locations, `w` flows between
/// facilities, both row-major `n x n`. Neither symmetry nor a zero diagonal is
/// assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct QapInstance<S> {
    n: usize,
    r: Vec<S>,
    w: Vec<S>,
    marginals: Marginals<S>,
    integer: Option<IntegerForm>,
}

/// Integer copy of an all-integer instance; evaluating through it avoids
/// big-number arithmetic and gives the same values.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct IntegerForm {
    pub(crate) r: Vec<i128>,
    pub(crate) w: Vec<i128>,
    pub(crate) marginals: Marginals<i128>,
}

impl IntegerForm {
    fn try_new<S: Scalar>(n: usize, r: &[S], w: &[S]) -> Option<Self> {
        let convert = |m: &[S]| -> Option<Vec<i128>> {
            m.iter()
                .map(|v| v.to_exact_i64().filter(|k| k.abs() <= INT_ENTRY_LIMIT).map(i128::from))
                .collect()
        };
        let r = convert(r)?;
        let w = convert(w)?;
        let marginals = Marginals::new(n, &r, &w);
        Some(IntegerForm { r, w, marginals })
    }
}

fn fitness_sum<T: Num + Clone + AddAssign>(n: usize, r: &[T], w: &[T], x: &Permutation) -> T {
    let mut total = T::zero();
    for i in 0..n {
        let a = x.at(i);
        for j in 0..n {
            total += r[i * n + j].clone() * w[a * n + x.at(j)].clone();
        }
    }
    total
}

/// `f(x with u, v swapped) - f(x)`: only terms with `i` or `j` in `{u, v}` change.
fn swap_delta<T: Num + Clone + AddAssign>(n: usize, r: &[T], w: &[T], x: &Permutation, u: usize, v: usize) -> T {
    let rr = |i: usize, j: usize| r[i * n + j].clone();
    let ww = |p: usize, q: usize| w[p * n + q].clone();
    let (a, b) = (x.at(u), x.at(v));
    let mut delta = T::zero();
    for k in (0..n).filter(|&k| k != u && k != v) {
        let c = x.at(k);
        delta += (rr(u, k) - rr(v, k)) * (ww(b, c) - ww(a, c));
        delta += (rr(k, u) - rr(k, v)) * (ww(c, b) - ww(c, a));
    }
    delta += (rr(u, u) - rr(v, v)) * (ww(b, b) - ww(a, a));
    delta += (rr(u, v) - rr(v, u)) * (ww(b, a) - ww(a, b));
    delta
}

impl<S: Scalar> QapInstance<S> {
    pub fn new(n: usize, r: Vec<S>, w: Vec<S>) -> Result<Self> {
        if n < MIN_SIZE {
            return Err(Error::SizeTooSmall { n });
        }
        for m in [&r, &w] {
            if m.len() != n * n {
                return Err(Error::MatrixShape {
                    expected: n * n,
                    found: m.len(),
                });
            }
        }
        Ok(Self::build(n, r, w))
    }

    fn build(n: usize, r: Vec<S>, w: Vec<S>) -> Self {
        let marginals = Marginals::new(n, &r, &w);
        let integer = IntegerForm::try_new(n, &r, &w);
        QapInstance {
            n,
            r,
            w,
            marginals,
            integer,
        }
    }

    pub fn from_rows(r: Vec<Vec<S>>, w: Vec<Vec<S>>) -> Result<Self> {
        let n = r.len();
        for row in r.iter().chain(&w) {
            if row.len() != n {
                return Err(Error::MatrixShape {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            });
        }
        Self::new(n, r.into_iter().flatten().collect(), w.into_iter().flatten().collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![S::zero(); n * n], vec![S::zero(); n * n])
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize) -> &S {
        &self.r[i * self.n + j]
    }

    #[inline]
    pub fn w(&self, p: usize, q: usize) -> &S {
        &self.w[p * self.n + q]
    }

    pub fn distances(&self) -> &[S] {
        &self.r
    }

    pub fn flows(&self) -> &[S] {
        &self.w
    }

    /// Converts every entry with `f`, e.g. to switch arithmetic modes.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> QapInstance<T> {
        let r: Vec<T> = self.r.iter().map(&f).collect();
        let w: Vec<T> = self.w.iter().map(&f).collect();
        QapInstance::build(self.n, r, w)
    }

    /// Returns a copy with the distances and flows exchanged.
    pub fn swap_roles(&self) -> Self {
        Self::build(self.n, self.w.clone(), self.r.clone())
    }

    pub(crate) fn marginals(&self) -> &Marginals<S> {
        &self.marginals
    }

    pub(crate) fn integer_form(&self) -> Option<&IntegerForm> {
        self.integer.as_ref()
    }
}

impl<S: Scalar> Landscape<S> for QapInstance<S> {
    fn n(&self) -> usize {
        self.n
    }

    /// `sum_{i,j} r[i][j] * w[x(i)][x(j)]` over all ordered pairs, diagonal
    /// included.
    fn fitness(&self, x: &Permutation) -> Result<S> {
        x.check_size(self.n)?;
        Ok(match &self.integer {
            Some(int) => S::from_i128(fitness_sum(self.n, &int.r, &int.w, x)),
            None => fitness_sum(self.n, &self.r, &self.w, x),
        })
    }

    /// `O(n)` update.
    fn fitness_after_swap(&self, x: &Permutation, f_x: &S, u: usize, v: usize) -> Result<S> {
        x.check_size(self.n)?;
        x.swap(u, v)?;
        let delta = match &self.integer {
            Some(int) => S::from_i128(swap_delta(self.n, &int.r, &int.w, x, u, v)),
            None => swap_delta(self.n, &self.r, &self.w, x, u, v),
        };
        Ok(f_x.clone() + delta)
    }
}

/// Dense four-index coefficient tensor generalizing the product `r[i][j] * w[p][q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralTensor<S> {
    n: usize,
    psi: Vec<S>,
}

impl<S: Scalar> GeneralTensor<S> {
    pub fn zeros(n: usize) -> Result<Self> {
        Self::check_dims(n)?;
        Ok(GeneralTensor {
            n,
            psi: vec![S::zero(); n * n * n * n],
        })
    }

    /// Builds a tensor from `f(i, j, p, q)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> S) -> Result<Self> {
        Self::check_dims(n)?;
        let mut psi = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for p in 0..n {
                    for q in 0..n {
                        psi.push(f(i, j, p, q));
                    }
                }
            }
        }
        Ok(GeneralTensor { n, psi })
    }

    fn check_dims(n: usize) -> Result<()> {
        if n < MIN_SIZE {
            return Err(Error::SizeTooSmall { n });
        }
        if n > MAX_TENSOR_SIZE {
            return Err(Error::TensorTooLarge {
                n,
                max: MAX_TENSOR_SIZE,
            });
        }
        Ok(())
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, p: usize, q: usize) -> usize {
        ((i * self.n + j) * self.n + p) * self.n + q
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, p: usize, q: usize) -> &S {
        &self.psi[self.offset(i, j, p, q)]
    }

    pub fn set(&mut self, i: usize, j: usize, p: usize, q: usize, value: S) {
        let at = self.offset(i, j, p, q);
        self.psi[at] = value;
    }
}

impl<S: Scalar> Landscape<S> for GeneralTensor<S> {
    fn n(&self) -> usize {
        self.n
    }

    /// `sum_{i,j} psi[i][j][x(i)][x(j)]`.
    fn fitness(&self, x: &Permutation) -> Result<S> {
        x.check_size(self.n)?;
        let mut total = S::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                total += self.get(i, j, x.at(i), x.at(j)).clone();
            }
        }
        Ok(total)
    }
}

/// `psi[i][j][p][q] = r[i][j] * w[p][q]`.
pub fn tensor_from_qap<S: Scalar>(inst: &QapInstance<S>) -> Result<GeneralTensor<S>> {
    GeneralTensor::from_fn(inst.n, |i, j, p, q| inst.r(i, j).clone() * inst.w(p, q).clone())
}
