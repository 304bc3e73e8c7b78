//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary (`harness = false`).

use std::io::Write as _;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qap_landscape::decomposition::{
    averages, component_value_fast, component_value_ref, components_fast, grover_predict, omega,
    omega_neighborhood_sum_oracle, phi_diag, Component, Decompose, OmegaCase,
};
use qap_landscape::instance::{tensor_from_qap, Landscape};
use qap_landscape::oracle::{check_elementary, neighborhood_avg_brute, variance_triple, SpaceTable, VarianceSource};
use qap_landscape::permutation::{all_permutations, neighborhood_size};
use qap_landscape::qaplib::{parse_qaplib_as, write_qaplib};
use qap_landscape::spectral::{
    autocorr_coefficient, autocorr_weights, empirical_autocorr, random_walk, theoretical_from_weights,
};
use qap_landscape::{generate_instance, neighborhood_avg_wave, Permutation, QapInstance, Rational, Scalar};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(num: i64, den: i64) -> Rational {
    Rational::ratio(num, den)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rational_instance(n: usize, seed: u64) -> QapInstance<Rational> {
    generate_instance(n, seed, 0, 9).expect("valid generator arguments")
}

/// The characteristic constants, written out independently of the library.
fn expected_k(m: Component, n: usize) -> i64 {
    let n = n as i64;
    match m {
        Component::C1 => 2 * n,
        Component::C2 => 2 * (n - 1),
        Component::C3 => n,
    }
}

fn c01_decomposition_identity() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for n in 3..=6 {
        for seed in 0..5 {
            let inst = rational_instance(n, seed);
            for x in all_permutations(n) {
                let parts = inst.components(&x).map_err(|e| e.to_string())?;
                let f = inst.fitness(&x).map_err(|e| e.to_string())?;
                let residual = parts[0].clone() + parts[1].clone() + parts[2].clone() - f;
                ensure(residual == q(0, 1), || {
                    format!("n={n} seed={seed} x={x}: residual {residual}")
                })?;
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:.1?}, target 60s")
    })?;
    Ok(format!(
        "{checked} (instance, x) pairs, n = 3..6, residual 0, {elapsed:.2?}"
    ))
}

fn c02_component_wave_equation() -> Outcome {
    let mut checked = 0usize;
    for n in 4..=6 {
        let d = neighborhood_size(n) as i64;
        for seed in 0..3 {
            let inst = rational_instance(n, 100 + seed);
            let means = averages(&inst);
            for (idx, m) in Component::ALL.into_iter().enumerate() {
                let table = SpaceTable::tabulate(|x| inst.components(x).unwrap()[idx].clone(), n, 8)
                    .map_err(|e| e.to_string())?;
                let nbr = table.neighbor_means();
                let k_over_d = q(expected_k(m, n), d);
                for (rank, value) in table.values().iter().enumerate() {
                    let pred = grover_predict(value, &means.parts[idx], &k_over_d);
                    ensure(pred == nbr[rank], || {
                        format!("n={n} {m:?} rank {rank}: {pred} vs {}", nbr[rank])
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} component values, k = 2n, 2(n-1), n, residual 0"))
}

fn c03_phi_elementary() -> Outcome {
    let n = 5;
    for i in 0..n {
        for p in 0..n {
            let rep = check_elementary(|x| phi_diag::<Rational>(i, p, x).unwrap(), n, 8).map_err(|e| e.to_string())?;
            ensure(rep.is_elementary, || format!("phi({i},{p}) not elementary"))?;
            ensure(rep.fitted_k == Some(q(5, 1)), || {
                format!("phi({i},{p}) k = {:?}", rep.fitted_k)
            })?;
            ensure(rep.mean == q(1, 5), || format!("phi({i},{p}) mean = {}", rep.mean))?;
        }
    }
    Ok("all 25 (i, p) at n = 5: elementary, k = 5, mean 1/5".into())
}

fn c04_omega_elementary() -> Outcome {
    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let expected = [(10, q(-1, 1)), (8, q(1, 2)), (5, q(1, 1))];
    let mut per_kind = [0usize; 3];
    for (idx, m) in Component::ALL.into_iter().enumerate() {
        while per_kind[idx] < 12 {
            let (i, j, p, qq) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            if i == j || p == qq {
                continue;
            }
            let rep =
                check_elementary(|x| omega::<Rational>(m, i, j, p, qq, x).unwrap(), n, 8).map_err(|e| e.to_string())?;
            let (k, mean) = &expected[idx];
            ensure(rep.is_elementary, || format!("{m:?} ({i},{j},{p},{qq}) not elementary"))?;
            ensure(rep.fitted_k == Some(q(*k, 1)), || {
                format!("{m:?} ({i},{j},{p},{qq}) k = {:?}", rep.fitted_k)
            })?;
            ensure(&rep.mean == mean, || {
                format!("{m:?} ({i},{j},{p},{qq}) mean = {}", rep.mean)
            })?;
            per_kind[idx] += 1;
        }
    }
    Ok(format!(
        "{per_kind:?} sampled tuples per kind: k = 10, 8, 5; means -1, 1/2, 1"
    ))
}

fn c05_case_sums_vs_enumeration() -> Outcome {
    let mut checked = 0usize;
    for n in [4, 5] {
        let mut seen = [false; 5];
        for x in all_permutations(n) {
            let nbrs: Vec<Permutation> = x.neighbors().collect();
            for (i, j, p, qq) in itertools::iproduct!(0..n, 0..n, 0..n, 0..n) {
                if i == j || p == qq {
                    continue;
                }
                seen[OmegaCase::classify(i, j, p, qq, &x).unwrap() as usize] = true;
                for m in Component::ALL {
                    let closed = omega_neighborhood_sum_oracle::<Rational>(m, i, j, p, qq, &x).unwrap();
                    let literal = nbrs
                        .iter()
                        .map(|y| omega::<Rational>(m, i, j, p, qq, y).unwrap())
                        .fold(q(0, 1), |a, b| a + b);
                    ensure(closed == literal, || {
                        format!("n={n} {m:?} ({i},{j},{p},{qq}) x={x}: {closed} vs {literal}")
                    })?;
                    checked += 1;
                }
            }
        }
        ensure(seen.iter().all(|&s| s), || format!("n={n}: not every case occurred"))?;
    }
    Ok(format!("{checked} neighbor sums over all five cases, n = 4, 5"))
}

fn c06_non_elementarity() -> Outcome {
    let inst = rational_instance(5, 7);
    let rep = check_elementary(|x| inst.fitness(x).unwrap(), 5, 8).map_err(|e| e.to_string())?;
    ensure(!rep.is_elementary && rep.max_residual > q(0, 1), || {
        "fit is exact".into()
    })?;
    Ok(format!(
        "n = 5 seed 7: best fit slope {}, max residual {} at x = ({})",
        rep.slope.to_f64(),
        rep.max_residual.to_f64(),
        rep.worst_point
    ))
}

fn c07_neighborhood_average() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 4..=7 {
        let inst: QapInstance<Rational> = generate_instance(n, 200 + n as u64, -9, 9).unwrap();
        for _ in 0..200 {
            let x = Permutation::random(n, &mut rng).unwrap();
            let wave = neighborhood_avg_wave(&inst, &x).map_err(|e| e.to_string())?;
            let brute = neighborhood_avg_brute(|y| inst.fitness(y).unwrap(), &x);
            ensure(wave == brute, || format!("n={n} x={x}: {wave} vs {brute}"))?;
        }
    }
    Ok("200 random x for each n = 4..7, residual 0".into())
}

fn c08_closed_form_averages() -> Outcome {
    for n in 4..=6 {
        for seed in 0..3 {
            let inst = rational_instance(n, 300 + seed);
            let means = averages(&inst);
            for idx in 0..3 {
                let table = SpaceTable::tabulate(|x| inst.components(x).unwrap()[idx].clone(), n, 8)
                    .map_err(|e| e.to_string())?;
                let mean = table.stats().mean;
                ensure(mean == means.parts[idx], || {
                    format!("n={n} c{}: {} vs {mean}", idx + 1, means.parts[idx])
                })?;
            }
            let fmean = SpaceTable::tabulate(|x| inst.fitness(x).unwrap(), n, 8)
                .unwrap()
                .stats()
                .mean;
            ensure(fmean == means.total, || format!("n={n} f: {} vs {fmean}", means.total))?;
        }
    }
    Ok("component and total means, n = 4..6, residual 0".into())
}

fn c09_variance_orthogonality() -> Outcome {
    for n in 3..=6 {
        for seed in 0..5 {
            let inst = rational_instance(n, 400 + seed);
            let vt = variance_triple(&inst, VarianceSource::Exact { cap: 8 }).map_err(|e| e.to_string())?;
            let gap = vt.total.clone() - vt.component_sum();
            ensure(gap == q(0, 1), || format!("n={n} seed={seed}: Var(f) - sum = {gap}"))?;
            ensure(vt.covariances.iter().all(|c| *c == q(0, 1)), || {
                format!("n={n} seed={seed}: covariance nonzero")
            })?;
        }
    }
    Ok("Var(f) = sum Var(f_cm), pairwise covariances 0, n = 3..6 x 5 seeds".into())
}

fn c10_fast_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in 0..1000 {
        let n = rng.random_range(4..=12);
        let lo = rng.random_range(-50..=0);
        let hi = rng.random_range(lo..=50);
        let inst: QapInstance<Rational> = generate_instance(n, rng.random(), lo, hi).unwrap();
        let tensor = tensor_from_qap(&inst).unwrap();
        let x = Permutation::random(n, &mut rng).unwrap();
        let m = Component::ALL[rng.random_range(0..3)];
        let fast = component_value_fast(&inst, m, &x).map_err(|e| e.to_string())?;
        let slow = component_value_ref(&tensor, m, &x).map_err(|e| e.to_string())?;
        ensure(fast == slow, || {
            format!("triple {t}: n={n} {m:?} x={x}: {fast} vs {slow}")
        })?;
    }

    let n = 100;
    let calls = 200;
    let exact: QapInstance<Rational> = generate_instance(n, 1, 0, 99).unwrap();
    let float = exact.map(Scalar::to_f64);
    let x = Permutation::random(n, &mut rng).unwrap();
    let time_it = |f: &dyn Fn()| {
        let start = Instant::now();
        for _ in 0..calls {
            f();
        }
        start.elapsed().as_secs_f64() * 1e3 / calls as f64
    };
    let ms_exact = time_it(&|| {
        std::hint::black_box(components_fast(&exact, &x).unwrap());
    });
    let ms_float = time_it(&|| {
        std::hint::black_box(components_fast(&float, &x).unwrap());
    });
    let note = if ms_exact.max(ms_float) < 10.0 {
        "under 10 ms"
    } else {
        "over the 10 ms smoke target"
    };
    Ok(format!(
        "1000 triples exact; n = 100 triple {ms_exact:.3} ms rational, {ms_float:.3} ms float ({note})"
    ))
}

fn c11_autocorrelation() -> Outcome {
    let n = 10;
    let inst: QapInstance<f64> = generate_instance(n, 11, 0, 9).unwrap();
    // All of S_10 in float mode; entries are integers so every value is exact.
    let vt = variance_triple(&inst, VarianceSource::Exact { cap: 10 }).map_err(|e| e.to_string())?;
    let weights = autocorr_weights(&vt).map_err(|e| e.to_string())?;
    let theory = theoretical_from_weights(n, &weights, 5);
    let series = random_walk(&inst, None, 100_000, 11).map_err(|e| e.to_string())?;
    let empirical = empirical_autocorr(&series, 5).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for s in 1..=5 {
        let gap = (empirical[s] - theory[s]).abs();
        worst = worst.max(gap);
        ensure(gap <= 0.02, || {
            format!("s={s}: empirical {:.4} vs predicted {:.4}", empirical[s], theory[s])
        })?;
    }

    for seed in 0..50u64 {
        let m = 4 + (seed as usize % 5);
        let inst = rational_instance(m, 500 + seed);
        let c = autocorr_coefficient(&inst, VarianceSource::Exact { cap: 8 }).map_err(|e| e.to_string())?;
        ensure(c.lo <= c.xi && c.xi <= c.hi, || {
            format!("n={m} seed={seed}: xi {} outside [{}, {}]", c.xi, c.lo, c.hi)
        })?;
    }
    Ok(format!(
        "n = 10, 1e5 steps: max |r_hat - r| = {worst:.4} over s = 1..5 (r(1) = {:.4}); xi bounds hold on 50 instances",
        theory[1]
    ))
}

fn c12_cli_contract() -> Outcome {
    for seed in 0..10 {
        let inst: QapInstance<Rational> = generate_instance(3 + seed as usize, seed, -100, 100).unwrap();
        let text = write_qaplib(&inst).map_err(|e| e.to_string())?;
        let back = parse_qaplib_as::<Rational>(&text, false).map_err(|e| e.to_string())?;
        ensure(back == inst, || format!("round trip changed instance (seed {seed})"))?;
    }

    let dir = std::env::temp_dir().join(format!("qapland-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("inst.dat");
    let inst: QapInstance<Rational> = generate_instance(5, 12, 0, 9).unwrap();
    std::fs::File::create(&path)
        .and_then(|mut f| f.write_all(write_qaplib(&inst).unwrap().as_bytes()))
        .map_err(|e| e.to_string())?;
    let path = path.to_str().unwrap().to_string();

    let run = |extra: &[&str]| -> Result<i32, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_qapland"))
            .args(["verify", "--instance", &path])
            .args(extra)
            .output()
            .map_err(|e| e.to_string())?;
        out.status.code().ok_or_else(|| "terminated by signal".to_string())
    };
    let clean = run(&[])?;
    let broken: Vec<i32> = ["1", "2", "3"]
        .iter()
        .map(|m| run(&["--perturb-k", m]))
        .collect::<Result<_, _>>()?;
    let _ = std::fs::remove_dir_all(&dir);
    ensure(clean == 0, || format!("clean verify exited {clean}"))?;
    ensure(broken.iter().all(|&c| c == 2), || {
        format!("perturbed verify exited {broken:?}")
    })?;
    Ok("round trip on 10 instances; verify exits 0 clean, 2 with each perturbed k".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("decomposition identity", c01_decomposition_identity),
        ("per-component wave equation", c02_component_wave_equation),
        ("diagonal indicator is elementary", c03_phi_elementary),
        ("Omega functions are elementary", c04_omega_elementary),
        ("case neighbor sums", c05_case_sums_vs_enumeration),
        ("composite non-elementarity", c06_non_elementarity),
        ("neighborhood average formula", c07_neighborhood_average),
        ("closed-form averages", c08_closed_form_averages),
        ("variance orthogonality", c09_variance_orthogonality),
        ("fast path equivalence", c10_fast_path),
        ("autocorrelation consistency", c11_autocorrelation),
        ("CLI contract", c12_cli_contract),
    ];
    let mut failures = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", idx + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", idx + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
