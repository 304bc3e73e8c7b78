//! The full identity suite run by `qapland verify`: every closed form in
//! [`decomposition`](crate::decomposition) against brute-force neighbor and
//! search-space enumeration from [`oracle`](crate::oracle).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{averages, components_ref, grover_predict, Component, Decompose};
use crate::instance::{tensor_from_qap, Landscape, QapInstance, MAX_TENSOR_SIZE};
use crate::oracle::{neighborhood_avg_brute, variance_triple, SpaceTable, VarianceSource};
use crate::permutation::{neighborhood_size, Permutation};
use crate::scalar::Scalar;
use crate::Result;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Enumerate all of `S_n` when `n <= cap`.
    pub cap: usize,
    /// Points checked when `n > cap`.
    pub samples: usize,
    pub seed: u64,
    /// Points used for the `O(n^4)` reference comparison.
    pub reference_points: usize,
    /// Adds one to `k` of this component wherever the suite uses it. Only for
    /// checking that the suite can fail.
    pub perturb_k: Option<Component>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            cap: crate::oracle::DEFAULT_ENUMERATION_CAP,
            samples: 200,
            seed: 0,
            reference_points: 50,
            perturb_k: None,
        }
    }
}

impl VerifyConfig {
    fn k_over_d<S: Scalar>(&self, m: Component, n: usize) -> S {
        let bump = (self.perturb_k == Some(m)) as i64;
        S::ratio(m.k(n) + bump, neighborhood_size(n) as i64)
    }
}

#[derive(Debug, Clone)]
pub struct Claim<S> {
    pub name: &'static str,
    pub max_residual: S,
    /// Magnitude the float tolerance is relative to.
    pub scale: S,
    pub checked: usize,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport<S> {
    pub n: usize,
    pub exhaustive: bool,
    pub claims: Vec<Claim<S>>,
}

impl<S: Scalar> VerifyReport<S> {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

/// Running maximum of `|a - b|` and of `|b|`.
struct Tracker<S> {
    max_residual: S,
    scale: S,
    checked: usize,
}

impl<S: Scalar> Tracker<S> {
    fn new() -> Self {
        Tracker {
            max_residual: S::zero(),
            scale: S::zero(),
            checked: 0,
        }
    }

    fn observe(&mut self, got: &S, want: &S) {
        let res = (got.clone() - want.clone()).abs();
        if res > self.max_residual {
            self.max_residual = res;
        }
        if want.abs() > self.scale {
            self.scale = want.abs();
        }
        self.checked += 1;
    }

    fn finish(self, name: &'static str) -> Claim<S> {
        let passed = S::negligible(&self.max_residual, &self.scale);
        Claim {
            name,
            max_residual: self.max_residual,
            scale: self.scale,
            checked: self.checked,
            passed,
        }
    }
}

pub fn verify_instance<S: Scalar>(inst: &QapInstance<S>, cfg: &VerifyConfig) -> Result<VerifyReport<S>> {
    let mut report = verify_landscape(inst, cfg)?;
    if inst.n() <= MAX_TENSOR_SIZE {
        let tensor = tensor_from_qap(inst)?;
        let mut fast_ref = Tracker::new();
        for x in reference_points(inst.n(), cfg) {
            let fast = inst.components(&x)?;
            let slow = components_ref(&tensor, &x)?;
            for (a, b) in fast.iter().zip(&slow) {
                fast_ref.observe(a, b);
            }
        }
        report.claims.push(fast_ref.finish("fast_vs_reference"));
    }
    Ok(report)
}

fn reference_points(n: usize, cfg: &VerifyConfig) -> Vec<Permutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    (0..cfg.reference_points)
        .map(|_| Permutation::random(n, &mut rng).expect("n >= 3"))
        .collect()
}

pub fn verify_landscape<S: Scalar, L: Decompose<S> + ?Sized>(l: &L, cfg: &VerifyConfig) -> Result<VerifyReport<S>> {
    let n = l.n();
    let means = averages(l);
    let k_over_d: [S; 3] = Component::ALL.map(|m| cfg.k_over_d(m, n));
    let mut identity = Tracker::new();
    let mut wave: [Tracker<S>; 3] = std::array::from_fn(|_| Tracker::new());
    let mut composite = Tracker::new();

    let predict_composite = |f: &S, parts: &[S; 3]| {
        let mut avg = f.clone();
        for k in 0..3 {
            avg += k_over_d[k].clone() * (means.parts[k].clone() - parts[k].clone());
        }
        avg
    };

    let exhaustive = n <= cfg.cap;
    let mut claims = Vec::new();
    if exhaustive {
        let f_table = SpaceTable::tabulate(|x| l.fitness(x).expect("size checked"), n, cfg.cap)?;
        let c_tables: Vec<SpaceTable<S>> = (0..3)
            .map(|k| SpaceTable::tabulate(|x| l.components(x).expect("size checked")[k].clone(), n, cfg.cap))
            .collect::<Result<_>>()?;
        let f_nbr = f_table.neighbor_means();
        let c_nbr: Vec<Vec<S>> = c_tables.iter().map(SpaceTable::neighbor_means).collect();

        for rank in 0..f_table.values().len() {
            let f = f_table.values()[rank].clone();
            let parts: [S; 3] = std::array::from_fn(|k| c_tables[k].values()[rank].clone());
            identity.observe(&(parts[0].clone() + parts[1].clone() + parts[2].clone()), &f);
            for k in 0..3 {
                let pred = grover_predict(&parts[k], &means.parts[k], &k_over_d[k]);
                wave[k].observe(&pred, &c_nbr[k][rank]);
            }
            composite.observe(&predict_composite(&f, &parts), &f_nbr[rank]);
        }

        let mut avg = Tracker::new();
        for (part, table) in means.parts.iter().zip(&c_tables) {
            avg.observe(part, &table.stats().mean);
        }
        avg.observe(&means.total, &f_table.stats().mean);
        claims.push(avg.finish("closed_form_averages"));

        let vt = variance_triple(l, VarianceSource::Exact { cap: cfg.cap })?;
        let mut orth = Tracker::new();
        orth.observe(&vt.component_sum(), &vt.total);
        for cov in &vt.covariances {
            orth.observe(cov, &S::zero());
        }
        claims.push(orth.finish("variance_orthogonality"));
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.samples {
            let x = Permutation::random(n, &mut rng)?;
            let f = l.fitness(&x)?;
            let parts = l.components(&x)?;
            identity.observe(&(parts[0].clone() + parts[1].clone() + parts[2].clone()), &f);
            let nbr_parts: Vec<[S; 3]> = x.neighbors().map(|y| l.components(&y)).collect::<Result<_>>()?;
            for k in 0..3 {
                let mut sum = S::zero();
                for p in &nbr_parts {
                    sum += p[k].clone();
                }
                let brute = sum / S::from_usize(nbr_parts.len());
                let pred = grover_predict(&parts[k], &means.parts[k], &k_over_d[k]);
                wave[k].observe(&pred, &brute);
            }
            let brute_f = neighborhood_avg_brute(|y| l.fitness(y).expect("size checked"), &x);
            composite.observe(&predict_composite(&f, &parts), &brute_f);
        }
    }

    let [w1, w2, w3] = wave;
    let mut all = vec![
        identity.finish("decomposition_identity"),
        w1.finish("wave_equation_c1"),
        w2.finish("wave_equation_c2"),
        w3.finish("wave_equation_c3"),
        composite.finish("neighborhood_average"),
    ];
    all.extend(claims);
    Ok(VerifyReport {
        n,
        exhaustive,
        claims: all,
    })
}
