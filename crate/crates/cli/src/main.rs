//! `tmscheme`: experiments on macro schemes for Thue–Morse words.
//!
//! Machine-readable results go to stdout as `key=value` lines; when the
//! main payload (a word or scheme file) is written to stdout instead, the
//! summary moves to stderr. Exit codes: 0 success, 1 verification failed,
//! 2 usage or parse error, 3 resource budget exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use tmscheme::construct::upper_bound_scheme;
use tmscheme::measures::{report, ReportLimits};
use tmscheme::reduce::{reduce_levels, reduce_to_bound, Reduction};
use tmscheme::solve::{is_attractor, min_attractor, min_scheme, AttractorCheck, SearchLimits, Solution};
use tmscheme::words::{lemma_suite, thue_morse, thue_morse_index, LemmaOutcome};
use tmscheme::{Error, MacroScheme, ValidityVerdict, Word};

#[derive(Parser)]
#[command(name = "tmscheme", version, about = "Macro schemes, attractors and measures for Thue-Morse words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Thue-Morse word t_n.
    Gen {
        #[arg(short = 'n')]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the size-(n+2) scheme for t_n.
    Construct {
        #[arg(short = 'n')]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scheme against a word.
    Verify {
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Rebuild the word a scheme encodes.
    Decode {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a scheme for t_n into a scheme for a shorter Thue-Morse word.
    Reduce {
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
        #[arg(short = 'n')]
        n: u32,
        /// Apply exactly this many levels instead of stopping at the first
        /// level that meets the size guarantee.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        levels: Option<u32>,
        /// Step log, one line per boundary edit.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest valid scheme of a short word.
    SolveB {
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the witness scheme here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest string attractor of a short word.
    SolveGamma {
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the witness positions here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the structural checks on t_n.
    Lemmas {
        #[arg(short = 'n')]
        n: u32,
    },
    /// Report delta, gamma, b, z and r for a word.
    Measure {
        #[arg(long)]
        word: PathBuf,
        /// Longest word for which exact gamma and b are attempted.
        #[arg(long, default_value_t = 64)]
        exact_limit: usize,
        /// Seconds allowed for each exact search.
        #[arg(long)]
        time_budget: Option<f64>,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    word: PathBuf,
    /// Seconds before giving up with a bracket.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl SolverArgs {
    fn limits(&self, base: SearchLimits) -> Result<SearchLimits, Failure> {
        let mut limits = base.with_workers(self.threads);
        if let Some(budget) = self.time_budget {
            limits = limits.with_time_budget(seconds(budget)?);
        }
        Ok(limits)
    }
}

enum Failure {
    Verification(String),
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Budget { .. } | Error::Timeout { .. } => Failure::Budget(msg),
            Error::BoundNotReached { .. } | Error::Internal(_) => Failure::Verification(msg),
            _ => Failure::Usage(msg),
        }
    }
}

type Outcome = Result<(), Failure>;

fn seconds(s: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s).map_err(|_| Failure::Usage(format!("invalid time budget {s}")))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_word(path: &Path) -> Result<Word, Failure> {
    Word::from_file_bytes(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_scheme(path: &Path) -> Result<MacroScheme, Failure> {
    MacroScheme::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Writes `payload` to `out` or stdout, and the summary to whichever of
/// stdout/stderr the payload is not using.
fn emit(out: Option<&Path>, payload: &str, summary: &[String]) -> Outcome {
    match out {
        Some(path) => {
            write_file(path, payload)?;
            print_lines(summary);
        }
        None => {
            print!("{payload}");
            for line in summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}

fn print_lines(lines: &[String]) {
    let mut stdout = io::stdout().lock();
    for line in lines {
        let _ = writeln!(stdout, "{line}");
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Gen { n, out } => {
            let t = thue_morse(n)?;
            emit(out.as_deref(), &t.to_file_string(), &[format!("n={n} len={}", t.len())])
        }
        Command::Construct { n, out } => {
            let b = upper_bound_scheme(n)?;
            let summary = format!("n={n} size={} grounds={}", b.size(), b.ground_count());
            emit(out.as_deref(), &b.serialize(), &[summary])
        }
        Command::Verify { word, scheme } => {
            let w = read_word(&word)?;
            let b = read_scheme(&scheme)?;
            match b.validate(&w)? {
                ValidityVerdict::Valid => {
                    print_lines(&[format!("size={} valid=true", b.size())]);
                    Ok(())
                }
                ValidityVerdict::Invalid(reason) => {
                    print_lines(&[format!("size={} valid=false reason={reason}", b.size())]);
                    Err(Failure::Verification(format!("invalid scheme: {reason}")))
                }
            }
        }
        Command::Decode { scheme, out } => {
            let b = read_scheme(&scheme)?;
            match b.decode() {
                Ok(w) => emit(out.as_deref(), &w.to_file_string(), &[format!("len={} decoded=true", w.len())]),
                Err(e) => {
                    print_lines(&[format!("decoded=false reason={}", e.reason())]);
                    Err(Failure::Verification("scheme cannot be decoded".into()))
                }
            }
        }
        Command::Reduce { word, scheme, n, levels, trace, out } => reduce(&word, &scheme, n, levels, trace, out),
        Command::SolveB { solver, out } => {
            let w = read_word(&solver.word)?;
            let solution = min_scheme(&w, &solver.limits(SearchLimits::for_schemes())?)?;
            let witness = solution.witness().serialize();
            let mut lines = match &solution {
                Solution::Exact { size, .. } => vec![format!("b={size}")],
                Solution::Bracket { lower, upper, .. } => vec![format!("b_lower={lower}"), format!("b_upper={upper}")],
            };
            match out {
                Some(path) => write_file(&path, &witness)?,
                None => lines.push(format!("witness={}", witness.trim_end().replace('\n', ";"))),
            }
            print_lines(&lines);
            budget_outcome(&solution)
        }
        Command::SolveGamma { solver, out } => {
            let w = read_word(&solver.word)?;
            let solution = min_attractor(&w, &solver.limits(SearchLimits::for_attractors())?)?;
            let positions: Vec<String> = solution.witness().iter().map(|p| p.to_string()).collect();
            if is_attractor(&w, solution.witness())? != AttractorCheck::Ok {
                return Err(Failure::Verification("witness is not an attractor".into()));
            }
            let mut lines = match &solution {
                Solution::Exact { size, .. } => vec![format!("gamma={size}")],
                Solution::Bracket { lower, upper, .. } => {
                    vec![format!("gamma_lower={lower}"), format!("gamma_upper={upper}")]
                }
            };
            lines.push(format!("witness={}", positions.join(",")));
            if let Some(path) = out {
                write_file(&path, &format!("{}\n", positions.join(" ")))?;
            }
            print_lines(&lines);
            budget_outcome(&solution)
        }
        Command::Lemmas { n } => {
            let suite = lemma_suite(n)?;
            let mut lines = vec![format!("n={n}")];
            for (name, outcome) in suite.entries() {
                match outcome {
                    LemmaOutcome::Pass => lines.push(format!("{name}=pass")),
                    LemmaOutcome::Fail(detail) => {
                        eprintln!("{name}: {detail}");
                        lines.push(format!("{name}=fail"));
                    }
                }
            }
            lines.push(format!("all_pass={}", suite.all_pass()));
            print_lines(&lines);
            if suite.all_pass() {
                Ok(())
            } else {
                Err(Failure::Verification("a structural check failed".into()))
            }
        }
        Command::Measure { word, exact_limit, time_budget } => {
            let w = read_word(&word)?;
            let limits = ReportLimits {
                exact_limit,
                time_budget: time_budget.map(seconds).transpose()?,
                workers: 0,
            };
            let r = report(&w, &limits)?;
            print!("{}", r.to_key_values());
            if r.chain_ok() {
                Ok(())
            } else {
                Err(Failure::Verification("inequality chain violated".into()))
            }
        }
    }
}

fn budget_outcome<W>(solution: &Solution<W>) -> Outcome {
    match solution {
        Solution::Exact { .. } => Ok(()),
        Solution::Bracket { .. } => Err(Failure::Budget("time budget exhausted; reported a bracket".into())),
    }
}

fn reduce(
    word: &Path,
    scheme: &Path,
    n: u32,
    levels: Option<u32>,
    trace: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Outcome {
    let w = read_word(word)?;
    let b = read_scheme(scheme)?;
    if thue_morse_index(&w) != Some(n) {
        return Err(Failure::Usage(format!("{} is not t_{n}", word.display())));
    }
    if let ValidityVerdict::Invalid(reason) = b.validate(&w)? {
        print_lines(&[format!("valid_input=false reason={reason}")]);
        return Err(Failure::Verification(format!("input scheme is invalid: {reason}")));
    }
    let (steps, result): (Vec<Reduction>, MacroScheme) = match levels {
        Some(l) => {
            let steps = reduce_levels(&b, n, l)?;
            let last = steps.last().map(|s| s.scheme.clone()).unwrap_or_else(|| b.clone());
            (steps, last)
        }
        None if n >= 5 => {
            let r = reduce_to_bound(&b, n)?;
            (r.steps, r.scheme)
        }
        None => {
            let steps = reduce_levels(&b, n, 1)?;
            let last = steps[0].scheme.clone();
            (steps, last)
        }
    };
    if let Some(path) = trace {
        let mut log = String::new();
        for (i, step) in steps.iter().enumerate() {
            for event in &step.trace {
                log.push_str(&format!("level={} {event}\n", i + 1));
            }
        }
        write_file(&path, &log)?;
    }
    let depth = steps.len() as u32;
    let bound_ok = steps.iter().all(Reduction::satisfies_size_bound);
    let mut summary = vec![
        format!("n={n} levels={depth} target_n={}", n - depth),
        format!("size_in={} size_out={}", b.size(), result.size()),
    ];
    for (i, step) in steps.iter().enumerate() {
        summary.push(format!(
            "level={} grounds_in={} size_in={} size_out={} size_bound={} bound_ok={}",
            i + 1,
            step.input_grounds,
            step.input_size,
            step.scheme.size(),
            step.size_bound(),
            step.satisfies_size_bound()
        ));
    }
    let target = thue_morse(n - depth)?;
    let valid = result.is_valid_for(&target);
    summary.push(format!("valid={valid} bound_ok={bound_ok}"));
    emit(out.as_deref(), &result.serialize(), &summary)?;
    if valid && bound_ok {
        Ok(())
    } else {
        Err(Failure::Verification("reduced scheme failed its checks".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
