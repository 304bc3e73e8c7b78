//! `qapland` command-line driver.
//!
//! Exit codes: 0 on success, 1 on invalid input (flags, files, permutations),
//! 2 when a checked identity has a residual above tolerance.
//!
//! Permutations are given 0-based as comma-separated lists: `--perm 2,0,1`
//! places facility 0 at location 2. (In 1-based notation this is x = (3,1,2).)

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::decomposition::{averages, decompose, neighborhood_avg_wave, Component};
use crate::generate::generate_instance;
use crate::instance::{Landscape, QapInstance};
use crate::oracle::{neighborhood_avg_brute, variance_triple, VarianceSource, DEFAULT_ENUMERATION_CAP};
use crate::permutation::Permutation;
use crate::qaplib::parse_qaplib;
use crate::scalar::{Mode, Rational, Scalar};
use crate::spectral::{autocorr_report, WalkConfig};
use crate::verify::{verify_instance, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qapland",
    version,
    about = "Elementary landscape analysis of QAP instances under the swap neighborhood"
)]
struct Cli {
    #[command(flatten)]
    source: SourceArgs,

    /// Arithmetic: exact rationals, f64, or rational when every entry is an integer.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto, global = true)]
    mode: ModeArg,

    /// Largest n for exhaustive enumeration of all n! permutations.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP, global = true)]
    cap: usize,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Read the flow matrix before the distance matrix.
    #[arg(long, global = true)]
    flow_first: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// QAPLIB instance file.
    #[arg(long, global = true, conflicts_with_all = ["gen", "n"])]
    instance: Option<PathBuf>,

    /// Generate an instance: `n,seed,lo,hi`.
    #[arg(long, global = true, conflicts_with = "n")]
    gen: Option<String>,

    /// Generated instance size (with --seed, --lo, --hi).
    #[arg(long, global = true)]
    n: Option<usize>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, default_value_t = 0, allow_hyphen_values = true)]
    lo: i64,

    #[arg(long, global = true, default_value_t = 9, allow_hyphen_values = true)]
    hi: i64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Rational,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print f(x) and its three elementary components.
    Decompose {
        #[arg(long)]
        perm: String,
    },
    /// Run every identity check and report the largest residual of each.
    Verify {
        /// Points checked when n exceeds the enumeration cap.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Points for the O(n^4) reference comparison.
        #[arg(long, default_value_t = 50)]
        reference_points: usize,
        /// Mutation test: add one to the characteristic constant of component M.
        #[arg(long, value_name = "M", hide = true)]
        perturb_k: Option<usize>,
    },
    /// Neighborhood average of f at x: wave-equation formula vs brute force.
    Avg {
        #[arg(long)]
        perm: String,
    },
    /// Random-walk autocorrelation, empirical and predicted.
    Autocorr {
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        walk_seed: u64,
        #[arg(long, default_value_t = 10)]
        max_lag: usize,
        /// Start of the walk; random when omitted.
        #[arg(long)]
        perm: Option<String>,
        /// Samples for component variances when n exceeds the cap.
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
    /// Closed-form component means and, within the cap, enumerated moments.
    Stats,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose { .. } => "decompose",
            Command::Verify { .. } => "verify",
            Command::Avg { .. } => "avg",
            Command::Autocorr { .. } => "autocorr",
            Command::Stats => "stats",
        }
    }
}

/// Command result before formatting.
struct Outcome {
    results: Map<String, Value>,
    residuals: Map<String, Value>,
    failed: bool,
    notes: Vec<String>,
    csv: Option<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            results: Map::new(),
            residuals: Map::new(),
            failed: false,
            notes: Vec::new(),
            csv: None,
        }
    }

    fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    fn residual<S: Scalar>(&mut self, key: &str, residual: &S, scale: &S) {
        let ok = S::negligible(residual, scale);
        self.failed |= !ok;
        self.residuals.insert(key.to_string(), Value::String(residual.render()));
    }
}

fn s<S: Scalar>(v: &S) -> Value {
    Value::String(v.render())
}

fn list<S: Scalar>(vals: &[S]) -> Value {
    Value::Array(vals.iter().map(s).collect())
}

fn parse_perm(text: &str) -> Result<Permutation, String> {
    let mapping = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid permutation entry {t:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Permutation::new(mapping).map_err(|e| e.to_string())
}

fn parse_gen(arg: &str) -> Result<(usize, u64, i64, i64), String> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    let bad = || format!("--gen expects n,seed,lo,hi, got {arg:?}");
    if parts.len() != 4 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
        parts[3].parse().map_err(|_| bad())?,
    ))
}

/// Instance in exact form plus whether every entry is an integer.
fn load_instance(cli: &Cli) -> Result<(QapInstance<Rational>, QapInstance<f64>, bool), String> {
    let src = &cli.source;
    if let Some(path) = &src.instance {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let parsed = parse_qaplib(&text, cli.flow_first).map_err(|e| format!("{}: {e}", path.display()))?;
        let exact = parsed.to_instance().map_err(|e| e.to_string())?;
        let float = parsed.to_instance().map_err(|e| e.to_string())?;
        return Ok((exact, float, parsed.is_integral()));
    }
    let (n, seed, lo, hi) = match (&src.gen, src.n) {
        (Some(arg), _) => parse_gen(arg)?,
        (None, Some(n)) => (n, src.seed, src.lo, src.hi),
        (None, None) => return Err("no instance given: use --instance PATH, --gen n,seed,lo,hi or --n N".into()),
    };
    let mut exact = generate_instance::<Rational>(n, seed, lo, hi).map_err(|e| e.to_string())?;
    if cli.flow_first {
        exact = exact.swap_roles();
    }
    let float = exact.map(Scalar::to_f64);
    Ok((exact, float, true))
}

fn run_typed<S: Scalar>(cli: &Cli, inst: &QapInstance<S>) -> Result<Outcome, String> {
    let n = inst.n();
    let mut out = Outcome::new();
    let perm_for = |text: &str| -> Result<Permutation, String> {
        let x = parse_perm(text)?;
        x.check_size(n).map_err(|e| e.to_string())?;
        Ok(x)
    };
    match &cli.command {
        Command::Decompose { perm } => {
            let x = perm_for(perm)?;
            let f = inst.fitness(&x).map_err(|e| e.to_string())?;
            let tri = decompose(inst, &x).map_err(|e| e.to_string())?;
            out.result("perm", x.to_string());
            out.result("f", s(&f));
            for m in Component::ALL {
                out.result(&format!("f_c{}", m.index()), s(tri.get(m)));
            }
            out.result("sum", s(&tri.total));
            out.residual("sum_check", &(tri.total.clone() - f.clone()).abs(), &f);
        }
        Command::Avg { perm } => {
            let x = perm_for(perm)?;
            let wave = neighborhood_avg_wave(inst, &x).map_err(|e| e.to_string())?;
            let brute = neighborhood_avg_brute(|y| inst.fitness(y).expect("size checked"), &x);
            out.result("perm", x.to_string());
            out.result("f", s(&inst.fitness(&x).map_err(|e| e.to_string())?));
            out.result("wave_average", s(&wave));
            out.result("brute_force_average", s(&brute));
            out.residual("avg_check", &(wave - brute.clone()).abs(), &brute);
        }
        Command::Stats => {
            let means = averages(inst);
            for m in Component::ALL {
                out.result(&format!("mean_c{}", m.index()), s(means.get(m)));
                out.result(&format!("k{}", m.index()), m.k(n));
            }
            out.result("mean_f", s(&means.total));
            if n <= cli.cap {
                let vt = variance_triple(inst, VarianceSource::Exact { cap: cli.cap }).map_err(|e| e.to_string())?;
                let enumerated = crate::oracle::enumerate_space(|x| inst.fitness(x).expect("size checked"), n, cli.cap)
                    .map_err(|e| e.to_string())?;
                out.result("enumerated_mean_f", s(&enumerated.mean));
                out.result("var_f", s(&vt.total));
                for (k, v) in vt.components.iter().enumerate() {
                    out.result(&format!("var_c{}", k + 1), s(v));
                }
                out.residual(
                    "mean_check",
                    &(means.total.clone() - enumerated.mean.clone()).abs(),
                    &enumerated.mean,
                );
                out.residual(
                    "variance_check",
                    &(vt.component_sum() - vt.total.clone()).abs(),
                    &vt.total,
                );
            } else {
                out.notes
                    .push(format!("n = {n} exceeds --cap {}: enumerated moments skipped", cli.cap));
            }
        }
        Command::Autocorr {
            steps,
            walk_seed,
            max_lag,
            perm,
            samples,
        } => {
            let start = perm.as_deref().map(perm_for).transpose()?;
            let walk = WalkConfig {
                start,
                steps: *steps,
                seed: *walk_seed,
                max_lag: *max_lag,
            };
            let source = VarianceSource::Auto {
                cap: cli.cap,
                samples: *samples,
                seed: *walk_seed,
            };
            let rep = autocorr_report(inst, &walk, source).map_err(|e| e.to_string())?;
            out.notes
                .push("xi = 1 / (1 - r(1)); r(s) = sum_m W_m (1 - k_m/d)^s with W_m = Var(f_cm)/Var(f)".into());
            out.result("definition", "xi = 1/(1 - r(1))");
            out.result("variances_exact", rep.variances.exact);
            out.result("weights", list(&rep.weights));
            out.result("xi", s(&rep.coefficient.xi));
            out.result("xi_lower_bound", s(&rep.coefficient.lo));
            out.result("xi_upper_bound", s(&rep.coefficient.hi));
            out.result("theoretical", list(&rep.theoretical));
            out.result("empirical", list(&rep.empirical));
            out.result("steps", *steps);
            out.result("walk_seed", *walk_seed);
            out.result("start", rep.series.start.to_string());
            let c = &rep.coefficient;
            let below = if c.xi < c.lo {
                c.lo.clone() - c.xi.clone()
            } else {
                S::zero()
            };
            let above = if c.xi > c.hi {
                c.xi.clone() - c.hi.clone()
            } else {
                S::zero()
            };
            out.residual("xi_bounds", &(below + above), &c.xi);
            out.csv = Some(rep.series.to_csv());
        }
        Command::Verify {
            samples,
            reference_points,
            perturb_k,
        } => {
            let perturb_k = perturb_k
                .map(Component::from_index)
                .transpose()
                .map_err(|e| e.to_string())?;
            let cfg = VerifyConfig {
                cap: cli.cap,
                samples: *samples,
                seed: cli.source.seed,
                reference_points: *reference_points,
                perturb_k,
            };
            let rep = verify_instance(inst, &cfg).map_err(|e| e.to_string())?;
            out.result("exhaustive", rep.exhaustive);
            for claim in &rep.claims {
                out.result(&format!("{}_points", claim.name), claim.checked);
                out.residual(claim.name, &claim.max_residual, &claim.scale);
            }
        }
    }
    Ok(out)
}

fn render(cli: &Cli, n: usize, mode: Mode, outcome: &Outcome) -> String {
    let command = cli.command.name();
    match cli.format {
        Format::Json => {
            let doc = json!({
                "n": n,
                "mode": mode.as_str(),
                "command": command,
                "results": outcome.results,
                "residuals": outcome.residuals,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("json values are always serializable");
            text.push('\n');
            text
        }
        Format::Csv => match &outcome.csv {
            Some(csv) => csv.clone(),
            None => {
                let mut text = String::from("section,key,value\n");
                for (section, map) in [("results", &outcome.results), ("residuals", &outcome.residuals)] {
                    for (k, v) in map {
                        text.push_str(&format!("{section},{k},{}\n", csv_cell(v)));
                    }
                }
                text
            }
        },
        Format::Text => {
            let mut text = format!("# {command}  n={n}  mode={mode}\n");
            for note in &outcome.notes {
                text.push_str(&format!("# {note}\n"));
            }
            for (k, v) in &outcome.results {
                text.push_str(&format!("{k} = {}\n", plain(v)));
            }
            for (k, v) in &outcome.residuals {
                text.push_str(&format!("residual {k} = {}\n", plain(v)));
            }
            text.push_str(if outcome.failed {
                "status: FAIL\n"
            } else {
                "status: ok\n"
            });
            text
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn csv_cell(v: &Value) -> String {
    let text = plain(v);
    if text.contains([',', '"', ' ']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text
    }
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };

    // Permutation syntax is checked before the instance is touched.
    let perm_arg = match &cli.command {
        Command::Decompose { perm } | Command::Avg { perm } => Some(perm.as_str()),
        Command::Autocorr { perm, .. } => perm.as_deref(),
        _ => None,
    };
    if let Some(Err(msg)) = perm_arg.map(parse_perm) {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_INVALID;
    }

    let (exact, float, integral) = match load_instance(&cli) {
        Ok(v) => v,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INVALID;
        }
    };
    let mode = match cli.mode {
        ModeArg::Rational => Mode::Rational,
        ModeArg::Float => Mode::Float,
        ModeArg::Auto if integral => Mode::Rational,
        ModeArg::Auto => Mode::Float,
    };
    let outcome = match mode {
        Mode::Rational => run_typed(&cli, &exact),
        Mode::Float => run_typed(&cli, &float),
    };
    match outcome {
        Ok(outcome) => {
            let _ = write!(stdout, "{}", render(&cli, exact.n(), mode, &outcome));
            if outcome.failed {
                EXIT_VERIFY_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INVALID
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(args, &mut stdout.lock(), &mut stderr.lock())
}
