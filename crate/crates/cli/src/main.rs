use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use grouptest::exponent::lower_bound_error;
use grouptest::harness::{
    parse_config, table1, table2, write_table1_csv, write_table2_csv, RunManifest,
};
use grouptest::{find_violation, sample_matrix, DecisionRule, EnsembleSpec, Evaluator, TestMatrix};

#[derive(Parser, Debug)]
#[command(
    name = "grouptest",
    version,
    about = "Nonadaptive group testing for an upper bound on the number of defectives"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a constant-column-weight test matrix.
    Gen {
        /// Number of tests (rows).
        #[arg(short = 'N', long = "tests")]
        tests: usize,
        /// Number of items (columns).
        #[arg(short = 't', long = "items")]
        items: usize,
        /// Column weight.
        #[arg(short = 'w', long, value_parser = clap::value_parser!(u64).range(1..))]
        weight: u64,
        #[arg(long)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Error probabilities of a rule on a matrix, as `err_h0,err_h1,eps`.
    Eval {
        #[arg(short, long)]
        matrix: PathBuf,
        /// Threshold size: `H0` is `|S| <= s`.
        #[arg(short, long)]
        s: usize,
        #[arg(long, value_enum)]
        rule: RuleArg,
        /// Weight threshold `T` (wdr only).
        #[arg(short = 'T', long)]
        threshold: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Subsets sampled per hypothesis (mc only).
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Seed (required for mc).
        #[arg(long)]
        seed: Option<u64>,
        /// Print the full record with a header instead of the bare row.
        #[arg(long)]
        record: bool,
    },
    /// Exponent table for a range of s.
    Exponents {
        #[arg(long, default_value_t = 2)]
        s_min: usize,
        #[arg(long, default_value_t = 6)]
        s_max: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Best-matrix searches described by a config file.
    Simulate {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Run manifest (default: `<out>.manifest.json`).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Lower bound on the maximal error of any rule and design.
    Bound {
        #[arg(short = 'N', long = "tests")]
        tests: usize,
        #[arg(short = 't', long = "items")]
        items: usize,
        #[arg(short, long)]
        s: usize,
    },
    /// Check whether a matrix is a disjunctive s-code.
    CheckDisjunctive {
        #[arg(short, long)]
        matrix: PathBuf,
        #[arg(short, long)]
        s: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Wdr,
    Comp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Mc,
}

#[derive(Debug)]
enum CliError {
    Core(grouptest::Error),
    /// A core error about the contents of a file.
    InFile {
        path: PathBuf,
        source: grouptest::Error,
    },
    Io {
        path: PathBuf,
        source: io::Error,
    },
    Usage(String),
}

impl From<grouptest::Error> for CliError {
    fn from(e: grouptest::Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "error[{}]: {e}", kind(e)),
            CliError::InFile { path, source } => {
                write!(f, "error[{}]: {}: {source}", kind(source), path.display())
            }
            CliError::Io { path, source } => write!(f, "error[io]: {}: {source}", path.display()),
            CliError::Usage(msg) => write!(f, "error[usage]: {msg}"),
        }
    }
}

fn kind(e: &grouptest::Error) -> &'static str {
    match e {
        grouptest::Error::Input(_) => "input",
        grouptest::Error::Parse { .. } => "parse",
        grouptest::Error::Budget { .. } => "budget",
        grouptest::Error::Domain(_) => "domain",
        grouptest::Error::Bracket { .. } => "convergence",
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, bytes),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn load_matrix(path: &Path) -> Result<TestMatrix, CliError> {
    TestMatrix::parse_text(&read(path)?).map_err(|source| CliError::InFile {
        path: path.to_path_buf(),
        source,
    })
}

// the common column weight, if every column has the same one
fn constant_weight(x: &TestMatrix) -> Option<usize> {
    let w = x.column_weight(0);
    (1..x.n_items())
        .all(|j| x.column_weight(j) == w)
        .then_some(w)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            tests,
            items,
            weight,
            seed,
            out,
        } => {
            let spec = EnsembleSpec::new(tests, items, weight as usize)?;
            emit(
                out.as_deref(),
                sample_matrix(&spec, seed).to_text().as_bytes(),
            )
        }
        Command::Eval {
            matrix,
            s,
            rule,
            threshold,
            method,
            trials,
            seed,
            record,
        } => {
            let x = load_matrix(&matrix)?;
            let rule = match (rule, threshold) {
                (RuleArg::Wdr, Some(t)) => DecisionRule::wdr(t),
                (RuleArg::Wdr, None) => {
                    return Err(CliError::Usage("--rule wdr needs --threshold".into()))
                }
                (RuleArg::Comp, None) => DecisionRule::comp(s)?,
                (RuleArg::Comp, Some(_)) => {
                    return Err(CliError::Usage(
                        "--threshold applies to --rule wdr only".into(),
                    ))
                }
            };
            let ev = Evaluator::default();
            let (pair, trials, seed) = match method {
                MethodArg::Exact => (ev.universal_error(&x, &rule, s)?, None, None),
                MethodArg::Mc => {
                    let seed = seed.ok_or_else(|| {
                        CliError::Usage("--method mc needs an explicit --seed".into())
                    })?;
                    let est = ev.mc_error(&x, &rule, s, trials, seed)?;
                    (est.point, Some(trials), Some(seed))
                }
            };
            let row = format!("{},{},{}", pair.err_h0, pair.err_h1, pair.eps());
            let text = if record {
                let param = match rule {
                    DecisionRule::Wdr { threshold } => threshold,
                    DecisionRule::Comp { s } => s,
                };
                let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
                format!(
                    "N,t,s,rule,T,w,err_h0,err_h1,eps,method,trials,seed\n{},{},{s},{},{param},{},{row},{},{},{}\n",
                    x.n_tests(),
                    x.n_items(),
                    rule.kind(),
                    opt(constant_weight(&x).map(|w| w as u64)),
                    if method == MethodArg::Exact { "exact" } else { "mc" },
                    opt(trials.map(|t| t as u64)),
                    opt(seed),
                )
            } else {
                format!("{row}\n")
            };
            emit(None, text.as_bytes())
        }
        Command::Exponents { s_min, s_max, out } => {
            if s_min > s_max {
                return Err(CliError::Usage(format!(
                    "--s-min {s_min} exceeds --s-max {s_max}"
                )));
            }
            let s_list: Vec<usize> = (s_min..=s_max).collect();
            let rows = table1(&s_list)?;
            let mut buf = Vec::new();
            write_table1_csv(&rows, &mut buf)?;
            emit(out.as_deref(), &buf)
        }
        Command::Simulate {
            config,
            out,
            manifest,
        } => {
            let cfg = parse_config(&read(&config)?).map_err(|source| CliError::InFile {
                path: config.clone(),
                source,
            })?;
            let results = table2(&cfg.scenarios)?;
            for (_, r) in &results {
                for s in &r.skipped {
                    eprintln!(
                        "skipped w = {} T = {:?}: {}",
                        s.weight, s.threshold, s.reason
                    );
                }
            }
            let rows: Vec<_> = results.iter().map(|(row, _)| row.clone()).collect();
            let mut buf = Vec::new();
            write_table2_csv(&rows, &mut buf)?;
            write(&out, &buf)?;
            let manifest = manifest.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".manifest.json");
                p.into()
            });
            let m = RunManifest::new(&cfg.scenarios, &results);
            write(&manifest, m.to_json().as_bytes())
        }
        Command::Bound { tests, items, s } => {
            let b = lower_bound_error(tests, items, s)?;
            emit(None, format!("{b}\n").as_bytes())
        }
        Command::CheckDisjunctive { matrix, s } => {
            let x = load_matrix(&matrix)?;
            let text = match find_violation(&x, s, grouptest::evaluator::DEFAULT_CAP)? {
                None => format!("disjunctive s={s}\n"),
                Some(w) => {
                    let set: Vec<String> = w
                        .set
                        .members()
                        .iter()
                        .map(|i| (i + 1).to_string())
                        .collect();
                    format!(
                        "not disjunctive s={s}: items {{{}}} cover item {}\n",
                        set.join(","),
                        w.item + 1
                    )
                }
            };
            emit(None, text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
        {
            eprintln!("error[usage]: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
