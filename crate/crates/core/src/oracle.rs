//! Brute-force ground truth over the whole search space.
//!
//! Everything here works from a black-box `Fn(&Permutation) -> S` and literal
//! enumeration, without using any closed form from
//! [`decomposition`](crate::decomposition).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomposition::Decompose;
use crate::permutation::{all_permutations, neighborhood_size, Permutation};
use crate::scalar::{mean_and_variance, Mode, Scalar};
use crate::{Error, Result};

/// Default largest `n` for which `n!` points are enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// `(1/d) sum_{y in N(x)} f(y)`.
pub fn neighborhood_avg_brute<S: Scalar>(f: impl Fn(&Permutation) -> S, x: &Permutation) -> S {
    let mut sum = S::zero();
    for y in x.neighbors() {
        sum += f(&y);
    }
    sum / S::from_usize(neighborhood_size(x.n()))
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(())
}

/// Values of `f` at every permutation, indexed by lexicographic rank.
#[derive(Debug, Clone)]
pub struct SpaceTable<S> {
    n: usize,
    values: Vec<S>,
}

impl<S: Scalar> SpaceTable<S> {
    pub fn tabulate(f: impl Fn(&Permutation) -> S, n: usize, cap: usize) -> Result<Self> {
        check_cap(n, cap)?;
        let values = all_permutations(n).map(|x| f(&x)).collect();
        Ok(SpaceTable { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn at(&self, x: &Permutation) -> &S {
        &self.values[x.rank()]
    }

    /// Neighborhood mean at every permutation, in rank order.
    pub fn neighbor_means(&self) -> Vec<S> {
        let d = S::from_usize(neighborhood_size(self.n));
        all_permutations(self.n)
            .map(|x| {
                let mut sum = S::zero();
                for y in x.neighbors() {
                    sum += self.at(&y).clone();
                }
                sum / d.clone()
            })
            .collect()
    }

    pub fn stats(&self) -> SpaceStats<S> {
        let (mean, variance) = mean_and_variance(&self.values);
        SpaceStats {
            mean,
            variance,
            count: self.values.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceStats<S> {
    pub mean: S,
    /// Population variance over all `n!` points.
    pub variance: S,
    pub count: usize,
}

/// Exact mean and population variance of `f` over all of `S_n`.
pub fn enumerate_space<S: Scalar>(f: impl Fn(&Permutation) -> S, n: usize, cap: usize) -> Result<SpaceStats<S>> {
    Ok(SpaceTable::tabulate(f, n, cap)?.stats())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementarityReport<S> {
    pub is_elementary: bool,
    /// `d (1 - slope)`, only when the fit is exact and not degenerate.
    pub fitted_k: Option<S>,
    /// Least-squares fit `neighbor_mean(x) ~ slope * f(x) + intercept`.
    pub slope: S,
    pub intercept: S,
    pub max_residual: S,
    pub worst_point: Permutation,
    /// Enumerated mean of `f`.
    pub mean: S,
    /// `f` is constant, so the slope is undetermined.
    pub degenerate: bool,
}

/// Fits the wave-equation form `avg_{N(x)} f = a f(x) + b` by least squares
/// over all of `S_n` and reports the worst residual.
pub fn check_elementary<S: Scalar>(
    f: impl Fn(&Permutation) -> S,
    n: usize,
    cap: usize,
) -> Result<ElementarityReport<S>> {
    let table = SpaceTable::tabulate(f, n, cap)?;
    Ok(elementarity_of_table(&table))
}

pub fn elementarity_of_table<S: Scalar>(table: &SpaceTable<S>) -> ElementarityReport<S> {
    let n = table.n();
    let fvals = table.values();
    let yvals = table.neighbor_means();
    let count = S::from_usize(fvals.len());
    let (fmean, fvar) = mean_and_variance(fvals);
    let (ymean, _) = mean_and_variance(&yvals);

    let mut cov = S::zero();
    for (fv, yv) in fvals.iter().zip(&yvals) {
        cov += (fv.clone() - fmean.clone()) * (yv.clone() - ymean.clone());
    }
    cov = cov / count;

    let degenerate = fvar.is_zero();
    let slope = if degenerate { S::one() } else { cov / fvar };
    let intercept = ymean - slope.clone() * fmean.clone();

    let mut max_residual = S::zero();
    let mut worst = 0usize;
    let mut scale = S::zero();
    for (idx, (fv, yv)) in fvals.iter().zip(&yvals).enumerate() {
        let res = (yv.clone() - slope.clone() * fv.clone() - intercept.clone()).abs();
        if res > max_residual {
            max_residual = res;
            worst = idx;
        }
        if fv.abs() > scale {
            scale = fv.abs();
        }
    }
    let is_elementary = S::negligible(&max_residual, &scale);
    let fitted_k =
        (is_elementary && !degenerate).then(|| S::from_usize(neighborhood_size(n)) * (S::one() - slope.clone()));
    let worst_point = all_permutations(n).nth(worst).expect("rank within n!");

    ElementarityReport {
        is_elementary,
        fitted_k,
        slope,
        intercept,
        max_residual,
        worst_point,
        mean: fmean,
        degenerate,
    }
}

/// How component variances are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceSource {
    /// Full enumeration; fails above `cap`.
    Exact { cap: usize },
    /// `samples` uniform random permutations from a `ChaCha8Rng` seeded with `seed`.
    Sampled { samples: usize, seed: u64 },
    /// Exact when `n <= cap`, otherwise sampled.
    Auto { cap: usize, samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceTriple<S> {
    /// `Var(f_c1), Var(f_c2), Var(f_c3)`.
    pub components: [S; 3],
    /// `Var(f)`.
    pub total: S,
    /// `Cov(f_c1, f_c2), Cov(f_c1, f_c3), Cov(f_c2, f_c3)`.
    pub covariances: [S; 3],
    pub exact: bool,
    pub count: usize,
}

impl<S: Scalar> VarianceTriple<S> {
    pub fn component_sum(&self) -> S {
        self.components.iter().cloned().fold(S::zero(), |a, b| a + b)
    }
}

/// Population variances of each component and of `f`.
pub fn variance_triple<S: Scalar, L: Decompose<S> + ?Sized>(
    l: &L,
    source: VarianceSource,
) -> Result<VarianceTriple<S>> {
    let n = l.n();
    let (points, exact): (Box<dyn Iterator<Item = Permutation>>, bool) = match source {
        VarianceSource::Exact { cap } => {
            check_cap(n, cap)?;
            (Box::new(all_permutations(n)), true)
        }
        VarianceSource::Auto { cap, .. } if n <= cap => (Box::new(all_permutations(n)), true),
        VarianceSource::Sampled { samples, seed } | VarianceSource::Auto { samples, seed, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Permutation> = (0..samples)
                .map(|_| Permutation::random(n, &mut rng))
                .collect::<Result<_>>()?;
            (Box::new(pts.into_iter()), false)
        }
    };

    let mut cols: [Vec<S>; 4] = Default::default();
    for x in points {
        let parts = l.components(&x)?;
        let f = l.fitness(&x)?;
        for (col, v) in cols.iter_mut().zip(parts.into_iter().chain(std::iter::once(f))) {
            col.push(v);
        }
    }
    let count = cols[0].len();
    let count_s = S::from_usize(count.max(1));
    let sums: Vec<S> = cols
        .iter()
        .map(|c| c.iter().fold(S::zero(), |acc, v| acc + v.clone()))
        .collect();
    let means: Vec<S> = sums.iter().map(|s| s.clone() / count_s.clone()).collect();
    let covariance = |a: usize, b: usize| {
        let mut acc = S::zero();
        match S::MODE {
            // Raw sums keep denominators small: E[uv] - E[u]E[v].
            Mode::Rational => {
                for (u, v) in cols[a].iter().zip(&cols[b]) {
                    acc += u.clone() * v.clone();
                }
                acc -= sums[a].clone() * means[b].clone();
            }
            // Centered sums avoid cancellation.
            Mode::Float => {
                for (u, v) in cols[a].iter().zip(&cols[b]) {
                    acc += (u.clone() - means[a].clone()) * (v.clone() - means[b].clone());
                }
            }
        }
        acc / count_s.clone()
    };
    Ok(VarianceTriple {
        components: [covariance(0, 0), covariance(1, 1), covariance(2, 2)],
        total: covariance(3, 3),
        covariances: [covariance(0, 1), covariance(0, 2), covariance(1, 2)],
        exact,
        count,
    })
}
