//! Elementary landscape decomposition under the swap neighborhood.
//!
//! The objective `f(x) = sum_{i,j,p,q} psi[i][j][p][q] [x(i)=p][x(j)=q]` splits
//! into three components `f = f_c1 + f_c2 + f_c3`, each satisfying the wave
//! equation
//!
//! ```text
//! avg_{y in N(x)} f_c(y) = f_c(x) + (k/d) (mean(f_c) - f_c(x)),   d = n(n-1)/2
//! ```
//!
//! with characteristic constants `k = 2n`, `2(n-1)` and `n`. Every off-diagonal
//! indicator `[x(i)=p][x(j)=q]` (`i != j`, `p != q`) is rewritten as
//!
//! ```text
//! Omega1 / (2n) + Omega2 / (2(n-2)) + Omega3 / (n(n-2))
//! ```
//!
//! where each `Omega` is a five-valued function of how `x` places `i` and `j`
//! relative to `p` and `q` (see [`OmegaCase`]). The diagonal indicators
//! `[x(i)=p]` are elementary with `k = n` and go entirely into `f_c3`.
//!
//! Tensor entries with `i == j, p != q` or `i != j, p == q` never contribute:
//! a bijection cannot send one position to two locations, nor two positions
//! to one location. They are skipped.

use std::ops::{AddAssign, SubAssign};

use num_traits::Num;

use crate::instance::{GeneralTensor, Landscape, QapInstance};
use crate::permutation::{neighborhood_size, Permutation};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// One of the three elementary components. Also selects the matching
/// `Omega` function and its parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    C1,
    C2,
    C3,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::C1, Component::C2, Component::C3];

    /// 1-based index `m`.
    pub fn index(self) -> usize {
        match self {
            Component::C1 => 1,
            Component::C2 => 2,
            Component::C3 => 3,
        }
    }

    pub fn from_index(m: usize) -> Result<Self> {
        match m {
            1 => Ok(Component::C1),
            2 => Ok(Component::C2),
            3 => Ok(Component::C3),
            _ => Err(Error::BadComponent(m)),
        }
    }

    /// `(alpha, beta, gamma, epsilon, zeta)` of the matching `Omega` function.
    pub fn params(self, n: usize) -> OmegaParams {
        let n = n as i64;
        match self {
            Component::C1 => OmegaParams::new(n - 3, 1 - n, -2, 0, -1),
            Component::C2 => OmegaParams::new(n - 3, n - 3, 0, 0, 1),
            Component::C3 => OmegaParams::new(2 * n - 3, 1, n - 2, 0, -1),
        }
    }

    /// Characteristic constant: `2n`, `2(n-1)`, `n`.
    pub fn k(self, n: usize) -> i64 {
        let n = n as i64;
        match self {
            Component::C1 => 2 * n,
            Component::C2 => 2 * (n - 1),
            Component::C3 => n,
        }
    }

    /// Denominator of the weight applied to `Omega`: `2n`, `2(n-2)`, `n(n-2)`.
    pub fn weight_denominator(self, n: usize) -> i64 {
        let n = n as i64;
        match self {
            Component::C1 => 2 * n,
            Component::C2 => 2 * (n - 2),
            Component::C3 => n * (n - 2),
        }
    }

    /// Mean of `Omega` over all of `S_n`: `-1`, `(n-3)/(n-1)`, `1`.
    pub fn omega_mean<S: Scalar>(self, n: usize) -> S {
        match self {
            Component::C1 => S::from_i64(-1),
            Component::C2 => S::ratio(n as i64 - 3, n as i64 - 1),
            Component::C3 => S::one(),
        }
    }

    /// `k/d` as an exact ratio.
    pub fn k_over_d<S: Scalar>(self, n: usize) -> S {
        S::ratio(self.k(n), neighborhood_size(n) as i64)
    }

    /// Coefficient of `(mean(f_c) - f_c(x))` in the composite neighborhood
    /// average, in reduced form: `4/(n-1)`, `4/n`, `2/(n-1)`.
    pub fn wave_coefficient<S: Scalar>(self, n: usize) -> S {
        let n = n as i64;
        match self {
            Component::C1 => S::ratio(4, n - 1),
            Component::C2 => S::ratio(4, n),
            Component::C3 => S::ratio(2, n - 1),
        }
    }

    /// Random-walk eigenvalue `1 - k/d`.
    pub fn walk_eigenvalue<S: Scalar>(self, n: usize) -> S {
        S::one() - self.k_over_d(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OmegaParams {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub epsilon: i64,
    pub zeta: i64,
}

impl OmegaParams {
    pub fn new(alpha: i64, beta: i64, gamma: i64, epsilon: i64, zeta: i64) -> Self {
        OmegaParams {
            alpha,
            beta,
            gamma,
            epsilon,
            zeta,
        }
    }

    pub fn value(&self, case: OmegaCase) -> i64 {
        match case {
            OmegaCase::Alpha => self.alpha,
            OmegaCase::Beta => self.beta,
            OmegaCase::Gamma => self.gamma,
            OmegaCase::Epsilon => self.epsilon,
            OmegaCase::Zeta => self.zeta,
        }
    }
}

/// Placement of positions `i, j` relative to locations `p, q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OmegaCase {
    /// `x(i) = p` and `x(j) = q`.
    Alpha,
    /// `x(i) = q` and `x(j) = p`.
    Beta,
    /// Exactly one of `x(i) = p`, `x(j) = q`.
    Gamma,
    /// Exactly one of `x(i) = q`, `x(j) = p`.
    Epsilon,
    /// Neither `x(i)` nor `x(j)` is in `{p, q}`.
    Zeta,
}

impl OmegaCase {
    pub const ALL: [OmegaCase; 5] = [
        OmegaCase::Alpha,
        OmegaCase::Beta,
        OmegaCase::Gamma,
        OmegaCase::Epsilon,
        OmegaCase::Zeta,
    ];

    fn slot(self) -> usize {
        self as usize
    }

    /// Panics if the five conditions are not mutually exclusive and
    /// exhaustive, which cannot happen for a bijection with `i != j`, `p != q`.
    pub fn classify(i: usize, j: usize, p: usize, q: usize, x: &Permutation) -> Result<Self> {
        check_omega_indices(i, j, p, q, x.n())?;
        Ok(Self::classify_unchecked(x.at(i), x.at(j), p, q))
    }

    #[inline]
    fn classify_unchecked(xi: usize, xj: usize, p: usize, q: usize) -> Self {
        let ip = xi == p;
        let jq = xj == q;
        let iq = xi == q;
        let jp = xj == p;
        let fired = [ip && jq, iq && jp, ip ^ jq, iq ^ jp, !ip && !iq && !jp && !jq];
        assert_eq!(
            fired.iter().filter(|&&b| b).count(),
            1,
            "omega cases must partition: x(i)={xi} x(j)={xj} p={p} q={q}"
        );
        let slot = fired.iter().position(|&b| b).unwrap_or(4);
        OmegaCase::ALL[slot]
    }
}

fn check_omega_indices(i: usize, j: usize, p: usize, q: usize, n: usize) -> Result<()> {
    for index in [i, j, p, q] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if i == j || p == q {
        return Err(Error::DegenerateOmega { i, j, p, q });
    }
    Ok(())
}

/// Diagonal indicator `[x(i) = p]`; elementary with `k = n`, mean `1/n`.
pub fn phi_diag<S: Scalar>(i: usize, p: usize, x: &Permutation) -> Result<S> {
    let n = x.n();
    for index in [i, p] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    Ok(if x.at(i) == p { S::one() } else { S::zero() })
}

/// Value of `Omega^m_{(i,j),(p,q)}` at `x`.
pub fn omega<S: Scalar>(kind: Component, i: usize, j: usize, p: usize, q: usize, x: &Permutation) -> Result<S> {
    let case = OmegaCase::classify(i, j, p, q, x)?;
    Ok(S::from_i64(kind.params(x.n()).value(case)))
}

/// Closed-form `sum_{y in N(x)} Omega(y)` from the transition counts between
/// the five cases. Kept as an oracle to check against literal enumeration.
pub fn omega_neighborhood_sum_oracle<S: Scalar>(
    kind: Component,
    i: usize,
    j: usize,
    p: usize,
    q: usize,
    x: &Permutation,
) -> Result<S> {
    let case = OmegaCase::classify(i, j, p, q, x)?;
    let n = x.n() as i64;
    let d = neighborhood_size(x.n()) as i64;
    let OmegaParams {
        alpha,
        beta,
        gamma,
        epsilon,
        zeta,
    } = kind.params(x.n());
    let sum = match case {
        OmegaCase::Alpha => beta + 2 * (n - 2) * gamma + (d - 2 * n + 3) * alpha,
        OmegaCase::Beta => alpha + 2 * (n - 2) * epsilon + (d - 2 * n + 3) * beta,
        OmegaCase::Gamma => alpha + 2 * epsilon + (n - 3) * zeta + (d - n) * gamma,
        OmegaCase::Epsilon => beta + 2 * gamma + (n - 3) * zeta + (d - n) * epsilon,
        OmegaCase::Zeta => 2 * gamma + 2 * epsilon + (d - 4) * zeta,
    };
    Ok(S::from_i64(sum))
}

/// A value split into its three components plus the total.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple<S> {
    pub parts: [S; 3],
    pub total: S,
}

impl<S: Scalar> Triple<S> {
    pub fn from_parts(parts: [S; 3]) -> Self {
        let total = parts[0].clone() + parts[1].clone() + parts[2].clone();
        Triple { parts, total }
    }

    pub fn get(&self, m: Component) -> &S {
        &self.parts[m.index() - 1]
    }
}

/// `(f_c1(x), f_c2(x), f_c3(x))` and their sum.
pub type ComponentTriple<S> = Triple<S>;
/// Search-space means of the three components and of `f`.
pub type AverageTriple<S> = Triple<S>;

/// Landscapes whose components can be evaluated.
pub trait Decompose<S: Scalar>: Landscape<S> {
    /// `[f_c1(x), f_c2(x), f_c3(x)]`.
    fn components(&self, x: &Permutation) -> Result<[S; 3]>;

    /// `sum_{i != j, p != q} psi[i][j][p][q]`.
    fn off_diagonal_mass(&self) -> S;

    /// `sum_{i, p} psi[i][i][p][p]`.
    fn diagonal_mass(&self) -> S;
}

/// Sums of `psi` over the five `Omega` cases at `x`, plus the diagonal part.
struct CaseSums<S> {
    by_case: [S; 5],
    diagonal: S,
}

impl<S: Scalar> CaseSums<S> {
    fn combine(&self, n: usize) -> [S; 3] {
        Component::ALL.map(|m| {
            let params = m.params(n);
            let mut acc = S::zero();
            for case in OmegaCase::ALL {
                let coef = params.value(case);
                if coef != 0 {
                    acc += S::from_i64(coef) * self.by_case[case.slot()].clone();
                }
            }
            let mut value = acc / S::from_i64(m.weight_denominator(n));
            if m == Component::C3 {
                value += self.diagonal.clone();
            }
            value
        })
    }
}

/// Reference evaluator: visits every `(i, j, p, q)` with `i != j`, `p != q`,
/// classifies it and accumulates `psi * Omega / weight`. `O(n^4)`.
pub fn components_ref<S: Scalar>(t: &GeneralTensor<S>, x: &Permutation) -> Result<[S; 3]> {
    let n = t.n();
    x.check_size(n)?;
    let mut by_case: [S; 5] = std::array::from_fn(|_| S::zero());
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let (xi, xj) = (x.at(i), x.at(j));
            for p in 0..n {
                for q in (0..n).filter(|&q| q != p) {
                    let case = OmegaCase::classify_unchecked(xi, xj, p, q);
                    by_case[case.slot()] += t.get(i, j, p, q).clone();
                }
            }
        }
    }
    let mut diagonal = S::zero();
    for i in 0..n {
        diagonal += t.get(i, i, x.at(i), x.at(i)).clone();
    }
    Ok(CaseSums { by_case, diagonal }.combine(n))
}

pub fn component_value_ref<S: Scalar>(t: &GeneralTensor<S>, m: Component, x: &Permutation) -> Result<S> {
    let [c1, c2, c3] = components_ref(t, x)?;
    Ok(match m {
        Component::C1 => c1,
        Component::C2 => c2,
        Component::C3 => c3,
    })
}

/// Row and column sums of both matrices, cached on the instance.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Marginals<S> {
    /// `sum_{j != i} r[i][j]`
    r_row_off: Vec<S>,
    /// `sum_{i != j} r[i][j]`
    r_col_off: Vec<S>,
    w_row: Vec<S>,
    w_col: Vec<S>,
    r_off_total: S,
    w_off_total: S,
    r_trace: S,
    w_trace: S,
}

impl<S: Num + Clone + AddAssign> Marginals<S> {
    pub(crate) fn new(n: usize, r: &[S], w: &[S]) -> Self {
        let mut r_row_off = vec![S::zero(); n];
        let mut r_col_off = vec![S::zero(); n];
        let mut w_row = vec![S::zero(); n];
        let mut w_col = vec![S::zero(); n];
        let (mut r_trace, mut w_trace) = (S::zero(), S::zero());
        let (mut r_total, mut w_total) = (S::zero(), S::zero());
        for a in 0..n {
            for b in 0..n {
                let rv = &r[a * n + b];
                let wv = &w[a * n + b];
                w_row[a] += wv.clone();
                w_col[b] += wv.clone();
                w_total += wv.clone();
                r_total += rv.clone();
                if a == b {
                    r_trace += rv.clone();
                    w_trace += wv.clone();
                } else {
                    r_row_off[a] += rv.clone();
                    r_col_off[b] += rv.clone();
                }
            }
        }
        Marginals {
            r_row_off,
            r_col_off,
            w_row,
            w_col,
            r_off_total: r_total - r_trace.clone(),
            w_off_total: w_total - w_trace.clone(),
            r_trace,
            w_trace,
        }
    }
}

/// Product-form evaluator in `O(n^2)`.
///
/// With `a = x(i)`, `b = x(j)` fixed, the `(p, q)` pairs falling in each case
/// sum to
///
/// ```text
/// Alpha:   w[a][b]
/// Beta:    w[b][a]
/// Gamma:   (row_w(a) - w[a][a] - w[a][b]) + (col_w(b) - w[b][b] - w[a][b])
/// Epsilon: (col_w(a) - w[a][a] - w[b][a]) + (row_w(b) - w[b][b] - w[b][a])
/// Zeta:    off_w - (all of the above)
/// ```
///
/// and summing `r[i][j]` times these over `i != j` leaves only two genuinely
/// quadratic terms, `sum r[i][j] w[a][b]` and `sum r[i][j] w[b][a]`.
pub fn components_fast<S: Scalar>(inst: &QapInstance<S>, x: &Permutation) -> Result<[S; 3]> {
    let n = inst.n();
    x.check_size(n)?;
    let sums = match inst.integer_form() {
        Some(int) => {
            let (by_case, diagonal) = case_sums(n, &int.r, &int.w, &int.marginals, x);
            CaseSums {
                by_case: by_case.map(S::from_i128),
                diagonal: S::from_i128(diagonal),
            }
        }
        None => {
            let (by_case, diagonal) = case_sums(n, inst.distances(), inst.flows(), inst.marginals(), x);
            CaseSums { by_case, diagonal }
        }
    };
    Ok(sums.combine(n))
}

/// Per-case sums `[alpha, beta, gamma, epsilon, zeta]` and the diagonal term.
fn case_sums<T>(n: usize, r: &[T], w: &[T], mg: &Marginals<T>, x: &Permutation) -> ([T; 5], T)
where
    T: Num + Clone + AddAssign + SubAssign,
{
    let mut direct = T::zero();
    let mut reversed = T::zero();
    for i in 0..n {
        let a = x.at(i);
        for j in (0..n).filter(|&j| j != i) {
            let b = x.at(j);
            let rij = r[i * n + j].clone();
            direct += rij.clone() * w[a * n + b].clone();
            reversed += rij * w[b * n + a].clone();
        }
    }

    let mut gamma = T::zero();
    let mut epsilon = T::zero();
    let mut diagonal = T::zero();
    for i in 0..n {
        let a = x.at(i);
        let waa = w[a * n + a].clone();
        let out_w = mg.w_row[a].clone() - waa.clone();
        let in_w = mg.w_col[a].clone() - waa.clone();
        gamma += out_w.clone() * mg.r_row_off[i].clone() + in_w.clone() * mg.r_col_off[i].clone();
        epsilon += in_w * mg.r_row_off[i].clone() + out_w * mg.r_col_off[i].clone();
        diagonal += r[i * n + i].clone() * waa;
    }
    gamma -= direct.clone() + direct.clone();
    epsilon -= reversed.clone() + reversed.clone();
    let zeta = mg.r_off_total.clone() * mg.w_off_total.clone()
        - direct.clone()
        - reversed.clone()
        - gamma.clone()
        - epsilon.clone();
    ([direct, reversed, gamma, epsilon, zeta], diagonal)
}

pub fn component_value_fast<S: Scalar>(inst: &QapInstance<S>, m: Component, x: &Permutation) -> Result<S> {
    let parts = components_fast(inst, x)?;
    Ok(parts[m.index() - 1].clone())
}

impl<S: Scalar> Decompose<S> for QapInstance<S> {
    fn components(&self, x: &Permutation) -> Result<[S; 3]> {
        components_fast(self, x)
    }

    fn off_diagonal_mass(&self) -> S {
        let mg = self.marginals();
        mg.r_off_total.clone() * mg.w_off_total.clone()
    }

    fn diagonal_mass(&self) -> S {
        let mg = self.marginals();
        mg.r_trace.clone() * mg.w_trace.clone()
    }
}

impl<S: Scalar> Decompose<S> for GeneralTensor<S> {
    fn components(&self, x: &Permutation) -> Result<[S; 3]> {
        components_ref(self, x)
    }

    fn off_diagonal_mass(&self) -> S {
        let n = self.n();
        let mut total = S::zero();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for p in 0..n {
                    for q in (0..n).filter(|&q| q != p) {
                        total += self.get(i, j, p, q).clone();
                    }
                }
            }
        }
        total
    }

    fn diagonal_mass(&self) -> S {
        let n = self.n();
        let mut total = S::zero();
        for i in 0..n {
            for p in 0..n {
                total += self.get(i, i, p, p).clone();
            }
        }
        total
    }
}

pub fn decompose<S: Scalar, L: Decompose<S> + ?Sized>(l: &L, x: &Permutation) -> Result<ComponentTriple<S>> {
    Ok(Triple::from_parts(l.components(x)?))
}

/// Closed-form search-space mean of component `m`, by linearity of the mean.
pub fn component_average<S: Scalar, L: Decompose<S> + ?Sized>(l: &L, m: Component) -> S {
    let n = l.n();
    let mut mean = l.off_diagonal_mass() * m.omega_mean::<S>(n) / S::from_i64(m.weight_denominator(n));
    if m == Component::C3 {
        mean += l.diagonal_mass() / S::from_usize(n);
    }
    mean
}

pub fn averages<S: Scalar, L: Decompose<S> + ?Sized>(l: &L) -> AverageTriple<S> {
    Triple::from_parts(Component::ALL.map(|m| component_average(l, m)))
}

/// `value + (k/d) (mean - value)`: the wave-equation neighborhood average of
/// an elementary function.
pub fn grover_predict<S: Scalar>(value: &S, mean: &S, k_over_d: &S) -> S {
    value.clone() + k_over_d.clone() * (mean.clone() - value.clone())
}

/// Predicted mean of `f_cm` over the swap neighbors of `x`.
pub fn wave_predict_component<S: Scalar, L: Decompose<S> + ?Sized>(m: Component, l: &L, x: &Permutation) -> Result<S> {
    let parts = l.components(x)?;
    let mean = component_average(l, m);
    Ok(grover_predict(&parts[m.index() - 1], &mean, &m.k_over_d(l.n())))
}

/// Mean of `f` over the swap neighbors of `x`, from the three components:
///
/// ```text
/// f(x) + 4/(n-1) (mean_c1 - f_c1(x)) + 4/n (mean_c2 - f_c2(x)) + 2/(n-1) (mean_c3 - f_c3(x))
/// ```
pub fn neighborhood_avg_wave<S: Scalar, L: Decompose<S> + ?Sized>(l: &L, x: &Permutation) -> Result<S> {
    let n = l.n();
    let parts = l.components(x)?;
    let means = averages(l);
    let mut avg = l.fitness(x)?;
    for m in Component::ALL {
        let idx = m.index() - 1;
        avg += m.wave_coefficient::<S>(n) * (means.parts[idx].clone() - parts[idx].clone());
    }
    Ok(avg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_instance;
    use crate::instance::tensor_from_qap;
    use crate::permutation::{all_permutations, factorial};
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::ratio(a, b)
    }

    fn single_entry(n: usize, i: usize, j: usize, p: usize, q: usize) -> GeneralTensor<Rational> {
        let mut t = GeneralTensor::zeros(n).unwrap();
        t.set(i, j, p, q, Rational::from_i64(1));
        t
    }

    #[test]
    fn parameter_vectors() {
        assert_eq!(Component::C1.params(5), OmegaParams::new(2, -4, -2, 0, -1));
        assert_eq!(Component::C2.params(5), OmegaParams::new(2, 2, 0, 0, 1));
        assert_eq!(Component::C3.params(5), OmegaParams::new(7, 1, 3, 0, -1));
        assert_eq!(Component::ALL.map(|m| m.k(5)), [10, 8, 5]);
    }

    #[test]
    fn k_over_d_reduces_to_wave_coefficients() {
        for n in 3..=40 {
            for m in Component::ALL {
                assert_eq!(m.k_over_d::<Rational>(n), m.wave_coefficient::<Rational>(n));
            }
        }
    }

    #[test]
    fn omega_examples() {
        // i=0, j=1, p=2, q=3
        let x = Permutation::new(vec![2, 3, 0, 1, 4]).unwrap();
        assert_eq!(omega::<Rational>(Component::C1, 0, 1, 2, 3, &x).unwrap(), q(2, 1));
        let x = Permutation::new(vec![0, 1, 2, 3, 4]).unwrap();
        assert_eq!(omega::<Rational>(Component::C2, 0, 1, 2, 3, &x).unwrap(), q(1, 1));
        let x = Permutation::new(vec![3, 2, 0, 1, 4]).unwrap();
        assert_eq!(omega::<Rational>(Component::C3, 0, 1, 2, 3, &x).unwrap(), q(1, 1));
    }

    #[test]
    fn omega_rejects_degenerate_indices() {
        let x = Permutation::identity(4).unwrap();
        assert!(matches!(
            omega::<f64>(Component::C1, 1, 1, 0, 2, &x),
            Err(Error::DegenerateOmega { .. })
        ));
        assert!(matches!(
            omega::<f64>(Component::C1, 0, 1, 2, 2, &x),
            Err(Error::DegenerateOmega { .. })
        ));
        assert!(matches!(
            omega::<f64>(Component::C1, 0, 1, 2, 4, &x),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn alpha_case_neighbor_sum_n5() {
        // beta + 2(n-2) gamma + (d-2n+3) alpha with n=5, d=10: -4 - 12 + 6
        let x = Permutation::new(vec![2, 3, 0, 1, 4]).unwrap();
        let closed = omega_neighborhood_sum_oracle::<Rational>(Component::C1, 0, 1, 2, 3, &x).unwrap();
        assert_eq!(closed, q(-10, 1));
        let brute: Rational = x
            .neighbors()
            .map(|y| omega::<Rational>(Component::C1, 0, 1, 2, 3, &y).unwrap())
            .sum();
        assert_eq!(brute, closed);
    }

    #[test]
    fn phi_diag_values() {
        let id = Permutation::identity(4).unwrap();
        assert_eq!(phi_diag::<Rational>(2, 2, &id).unwrap(), q(1, 1));
        assert_eq!(phi_diag::<Rational>(0, 1, &id).unwrap(), q(0, 1));
        for i in 0..4 {
            for p in 0..4 {
                let total: Rational = all_permutations(4)
                    .map(|x| phi_diag::<Rational>(i, p, &x).unwrap())
                    .sum();
                assert_eq!(total / Rational::from_usize(factorial(4)), q(1, 4));
            }
        }
    }

    #[test]
    fn table_rows_for_single_entry() {
        let n = 5;
        let t = single_entry(n, 0, 1, 2, 3);
        let alpha = Permutation::new(vec![2, 3, 0, 1, 4]).unwrap();
        let [c1, c2, c3] = components_ref(&t, &alpha).unwrap();
        assert_eq!((c1.clone(), c2.clone(), c3.clone()), (q(1, 5), q(1, 3), q(7, 15)));
        assert_eq!(c1 + c2 + c3, q(1, 1));

        let beta = Permutation::new(vec![3, 2, 0, 1, 4]).unwrap();
        let [c1, c2, c3] = components_ref(&t, &beta).unwrap();
        assert_eq!((c1.clone(), c2.clone(), c3.clone()), (q(-4, 10), q(2, 6), q(1, 15)));
        assert_eq!(c1 + c2 + c3, q(0, 1));
    }

    #[test]
    fn zero_instance_components() {
        let inst = QapInstance::<Rational>::zeros(4).unwrap();
        let t = GeneralTensor::<Rational>::zeros(4).unwrap();
        let x = Permutation::identity(4).unwrap();
        let zero = [q(0, 1), q(0, 1), q(0, 1)];
        assert_eq!(components_fast(&inst, &x).unwrap(), zero);
        assert_eq!(components_ref(&t, &x).unwrap(), zero);
        assert_eq!(averages(&inst).parts, zero);
        assert_eq!(neighborhood_avg_wave(&inst, &x).unwrap(), q(0, 1));
        for m in Component::ALL {
            assert_eq!(wave_predict_component(m, &inst, &x).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn fractional_and_huge_entries_skip_integer_form() {
        let base = generate_instance::<Rational>(5, 8, -9, 9).unwrap();
        let thirds = base.map(|v| v.clone() / q(3, 1) + q(1, 7));
        let huge = base.map(|v| v.clone() * q(1 << 40, 1));
        for inst in [thirds, huge] {
            assert!(inst.integer_form().is_none());
            let t = tensor_from_qap(&inst).unwrap();
            for x in all_permutations(5).step_by(3) {
                let parts = components_fast(&inst, &x).unwrap();
                assert_eq!(parts, components_ref(&t, &x).unwrap());
                let f = inst.fitness(&x).unwrap();
                assert_eq!(parts.iter().cloned().fold(q(0, 1), |a, b| a + b), f);
                assert_eq!(t.fitness(&x).unwrap(), f);
            }
        }
        assert!(base.integer_form().is_some());
    }

    #[test]
    fn fast_matches_ref_exhaustively_n4() {
        let inst = generate_instance::<Rational>(4, 3, -5, 9).unwrap();
        let t = tensor_from_qap(&inst).unwrap();
        for x in all_permutations(4) {
            assert_eq!(components_fast(&inst, &x).unwrap(), components_ref(&t, &x).unwrap());
            for m in Component::ALL {
                assert_eq!(
                    component_value_fast(&inst, m, &x).unwrap(),
                    component_value_ref(&t, m, &x).unwrap()
                );
            }
        }
    }

    #[test]
    fn decomposition_sums_to_fitness() {
        let inst = generate_instance::<Rational>(5, 11, 0, 20).unwrap();
        for x in all_permutations(5) {
            let tri = decompose(&inst, &x).unwrap();
            assert_eq!(tri.total, inst.fitness(&x).unwrap());
        }
    }

    #[test]
    fn mixed_diagonal_entries_contribute_nothing() {
        let n = 4;
        for (i, j, p, q) in [(1, 1, 0, 2), (0, 2, 3, 3)] {
            let t = single_entry(n, i, j, p, q);
            for x in all_permutations(n) {
                assert_eq!(t.fitness(&x).unwrap(), Rational::from_i64(0));
                assert_eq!(decompose(&t, &x).unwrap().total, Rational::from_i64(0));
            }
            assert_eq!(t.off_diagonal_mass(), Rational::from_i64(0));
            assert_eq!(t.diagonal_mass(), Rational::from_i64(0));
        }
    }

    #[test]
    fn averages_match_enumeration_n4() {
        let inst = generate_instance::<Rational>(4, 5, 0, 9).unwrap();
        let count = Rational::from_usize(factorial(4));
        let mut sums = [q(0, 1), q(0, 1), q(0, 1)];
        let mut fsum = q(0, 1);
        for x in all_permutations(4) {
            let parts = components_fast(&inst, &x).unwrap();
            for k in 0..3 {
                sums[k] += parts[k].clone();
            }
            fsum += inst.fitness(&x).unwrap();
        }
        let avg = averages(&inst);
        for (part, sum) in avg.parts.iter().zip(&sums) {
            assert_eq!(part, &(sum.clone() / count.clone()));
        }
        assert_eq!(avg.total, fsum / count);
    }

    #[test]
    fn component_two_mean_vanishes_at_n3() {
        let inst = generate_instance::<Rational>(3, 2, 1, 9).unwrap();
        assert_eq!(component_average(&inst, Component::C2), q(0, 1));
        let total: Rational = all_permutations(3)
            .map(|x| component_value_fast(&inst, Component::C2, &x).unwrap())
            .sum();
        assert_eq!(total, q(0, 1));
    }

    #[test]
    fn float_mode_agrees_with_exact() {
        let exact = generate_instance::<Rational>(6, 8, 0, 50).unwrap();
        let float = generate_instance::<f64>(6, 8, 0, 50).unwrap();
        let x = Permutation::new(vec![3, 1, 5, 0, 2, 4]).unwrap();
        let a = decompose(&exact, &x).unwrap();
        let b = decompose(&float, &x).unwrap();
        for k in 0..3 {
            let diff = a.parts[k].to_f64() - b.parts[k];
            assert!(f64::negligible(&diff, &b.total));
        }
    }
}
