//! Random-walk autocorrelation.
//!
//! Along a uniform random swap walk, an elementary function with constant `k`
//! decorrelates geometrically with ratio `lambda = 1 - k/d`. Since the three
//! components are uncorrelated over the search space, the autocorrelation of
//! `f` is the variance-weighted mixture
//!
//! ```text
//! r(s) = sum_m W_m lambda_m^s,    W_m = Var(f_cm) / Var(f)
//! ```
//!
//! The autocorrelation coefficient is `xi = 1 / (1 - r(1)) = 1 / sum_m W_m k_m/d`.
//! Because `k_m/d` lies in `[2/(n-1), 4/(n-1)]`, `xi` always falls in
//! `[(n-1)/4, (n-1)/2]`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{Component, Decompose};
use crate::instance::Landscape;
use crate::oracle::{variance_triple, VarianceSource, VarianceTriple};
use crate::permutation::{swap_pairs, Permutation};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Fitness trace of a random walk, start point included.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSeries<S> {
    pub values: Vec<S>,
    pub seed: u64,
    pub start: Permutation,
    pub steps: usize,
}

impl<S: Scalar> WalkSeries<S> {
    /// CSV with header `step,fitness`, one row per visited point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,fitness\n");
        for (step, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{step},{}", v.render());
        }
        out
    }
}

/// Uniform random swap walk of `steps` moves.
///
/// Uses a `ChaCha8Rng` seeded with `seed`. When `start` is `None` the first
/// draws produce a Fisher–Yates start permutation. Each move draws an index in
/// `0..d` and applies the swap pair of that index in lexicographic order.
pub fn random_walk<S: Scalar, L: Landscape<S> + ?Sized>(
    l: &L,
    start: Option<Permutation>,
    steps: usize,
    seed: u64,
) -> Result<WalkSeries<S>> {
    if steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let n = l.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = match start {
        Some(x) => {
            x.check_size(n)?;
            x
        }
        None => Permutation::random(n, &mut rng)?,
    };
    let pairs: Vec<(usize, usize)> = swap_pairs(n).collect();
    let mut x = start.clone();
    let mut values = Vec::with_capacity(steps + 1);
    let mut f = l.fitness(&x)?;
    values.push(f.clone());
    for _ in 0..steps {
        let (u, v) = pairs[rng.random_range(0..pairs.len())];
        f = l.fitness_after_swap(&x, &f, u, v)?;
        x.swap_in_place(u, v);
        values.push(f.clone());
    }
    Ok(WalkSeries {
        values,
        seed,
        start,
        steps,
    })
}

/// Standard biased estimator `r(s) = sum_t (f_t - m)(f_{t+s} - m) / sum_t (f_t - m)^2`
/// for `s = 0..=max_lag`.
pub fn empirical_autocorr<S: Scalar>(series: &WalkSeries<S>, max_lag: usize) -> Result<Vec<f64>> {
    let steps = series.values.len().saturating_sub(1);
    if max_lag * 10 >= steps {
        return Err(Error::LagTooLarge { max_lag, steps });
    }
    let vals: Vec<f64> = series.values.iter().map(Scalar::to_f64).collect();
    autocorr_of(&vals, max_lag)
}

pub(crate) fn autocorr_of(vals: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let len = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / len;
    let dev: Vec<f64> = vals.iter().map(|v| v - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if denom == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((0..=max_lag)
        .map(|s| dev.iter().zip(&dev[s..]).map(|(a, b)| a * b).sum::<f64>() / denom)
        .collect())
}

/// `W_m = Var(f_cm) / sum_m Var(f_cm)`.
///
/// The normalizer equals `Var(f)` when the variances are exact; using the sum
/// keeps `r(0) = 1` for sampled estimates too.
pub fn autocorr_weights<S: Scalar>(vt: &VarianceTriple<S>) -> Result<[S; 3]> {
    let total = vt.component_sum();
    if total.is_zero() || vt.total.is_zero() {
        return Err(Error::ZeroVariance);
    }
    Ok(vt.components.clone().map(|v| v / total.clone()))
}

/// `r(s) = sum_m W_m (1 - k_m/d)^s` for `s = 0..=max_lag`.
pub fn theoretical_from_weights<S: Scalar>(n: usize, weights: &[S; 3], max_lag: usize) -> Vec<S> {
    let lambdas = Component::ALL.map(|m| m.walk_eigenvalue::<S>(n));
    let mut powers: [S; 3] = std::array::from_fn(|_| S::one());
    let mut out = Vec::with_capacity(max_lag + 1);
    for _ in 0..=max_lag {
        let mut r = S::zero();
        for k in 0..3 {
            r += weights[k].clone() * powers[k].clone();
        }
        out.push(r);
        for k in 0..3 {
            powers[k] = powers[k].clone() * lambdas[k].clone();
        }
    }
    out
}

pub fn theoretical_autocorr<S: Scalar, L: Decompose<S> + ?Sized>(
    l: &L,
    max_lag: usize,
    source: VarianceSource,
) -> Result<Vec<S>> {
    let vt = variance_triple(l, source)?;
    let weights = autocorr_weights(&vt)?;
    Ok(theoretical_from_weights(l.n(), &weights, max_lag))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient<S> {
    /// `1 / (1 - r(1))`.
    pub xi: S,
    /// `(n-1)/4`
    pub lo: S,
    /// `(n-1)/2`
    pub hi: S,
}

pub fn coefficient_from_weights<S: Scalar>(n: usize, weights: &[S; 3]) -> Coefficient<S> {
    let mut rate = S::zero();
    for m in Component::ALL {
        rate += weights[m.index() - 1].clone() * m.k_over_d::<S>(n);
    }
    Coefficient {
        xi: S::one() / rate,
        lo: S::ratio(n as i64 - 1, 4),
        hi: S::ratio(n as i64 - 1, 2),
    }
}

pub fn autocorr_coefficient<S: Scalar, L: Decompose<S> + ?Sized>(
    l: &L,
    source: VarianceSource,
) -> Result<Coefficient<S>> {
    let vt = variance_triple(l, source)?;
    let weights = autocorr_weights(&vt)?;
    Ok(coefficient_from_weights(l.n(), &weights))
}

/// Walk parameters for [`autocorr_report`].
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub start: Option<Permutation>,
    pub steps: usize,
    pub seed: u64,
    pub max_lag: usize,
}

#[derive(Debug, Clone)]
pub struct AutocorrReport<S> {
    pub empirical: Vec<f64>,
    pub theoretical: Vec<S>,
    pub weights: [S; 3],
    pub coefficient: Coefficient<S>,
    pub variances: VarianceTriple<S>,
    pub series: WalkSeries<S>,
}

pub fn autocorr_report<S: Scalar, L: Decompose<S> + ?Sized>(
    l: &L,
    walk: &WalkConfig,
    source: VarianceSource,
) -> Result<AutocorrReport<S>> {
    let variances = variance_triple(l, source)?;
    let weights = autocorr_weights(&variances)?;
    let theoretical = theoretical_from_weights(l.n(), &weights, walk.max_lag);
    let coefficient = coefficient_from_weights(l.n(), &weights);
    let series = random_walk(l, walk.start.clone(), walk.steps, walk.seed)?;
    let empirical = empirical_autocorr(&series, walk.max_lag)?;
    Ok(AutocorrReport {
        empirical,
        theoretical,
        weights,
        coefficient,
        variances,
        series,
    })
}
