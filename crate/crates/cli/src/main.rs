mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fewopt::condition::log_condition_number;
use fewopt::format::{parse_instance, parse_quartic, parse_scalar};
use fewopt::harness::{grid_supremum_report, make_hardness_instance, widening_oracle, HardnessMode};
use fewopt::supremum::{sup, sup_decide};
use fewopt::transform::canonicalize_simplex;
use fewopt::univariate::{root_bound, trinomial_roots};
use fewopt::{Error, Fewnomial, PrecisionBudget, Result};
use serde_json::Value;

/// Certified suprema of fewnomials over the positive orthant.
///
/// Precision is read from FEWOPT_PRECISION_BITS (starting mantissa) and
/// FEWOPT_PRECISION_CAP (escalation ceiling).
#[derive(Parser, Debug)]
#[command(name = "fewopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Positive,
    Slack,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Supremum over the positive orthant.
    Sup {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Decide whether the supremum is at least LAMBDA.
    Decide {
        file: PathBuf,
        /// Scalar expression, e.g. "5/4" or "sqrt(2)".
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Positive roots of a univariate trinomial.
    Roots {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Log of the condition number.
    Condition {
        file: PathBuf,
        /// Allow supports with more than n+2 points, up to this many minors.
        #[arg(long)]
        max_subsets: Option<u128>,
    },
    /// Canonical form of an (n+1)-term instance.
    Canon { file: PathBuf },
    /// Build the feasibility gadget f² + t_M from a quartic.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        cap_m: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Positive)]
        mode: Mode,
    },
    /// Log-grid search for the supremum.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// log10 range of every coordinate, as LO,HI.
        #[arg(long, default_value = "-6,6", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 60)]
        rounds: usize,
        /// Also run the search over widening ranges.
        #[arg(long)]
        widen: bool,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn instance(path: &PathBuf, budget: &PrecisionBudget) -> Result<Fewnomial> {
    parse_instance(&read(path)?, budget.mantissa)
}

fn parse_range(s: &str) -> Result<[f64; 2]> {
    let bad = || Error::InvalidInput(format!("range must be LO,HI with LO < HI, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok([lo, hi])
}

fn run(cmd: Command) -> Result<(Value, i32)> {
    let budget = PrecisionBudget::from_env()?;
    match cmd {
        Command::Sup { file, eps } => {
            let budget = budget.with_eps(eps)?;
            let f = instance(&file, &budget)?;
            Ok(render::supremum(&sup(&f, &budget)?))
        }
        Command::Decide { file, lambda } => {
            let f = instance(&file, &budget)?;
            let l = parse_scalar(&lambda, budget.mantissa)?;
            Ok(render::decision(&sup_decide(&f, &l, &budget)?, &l))
        }
        Command::Roots { file, eps } => {
            let budget = budget.with_eps(eps)?;
            let f = instance(&file, &budget)?;
            let r = trinomial_roots(&f, eps, &budget)?;
            Ok((render::roots(&r, &root_bound(&f, &budget)?), render::EXIT_OK))
        }
        Command::Condition { file, max_subsets } => {
            let f = instance(&file, &budget)?;
            Ok((render::condition(&log_condition_number(&f, &budget, max_subsets)?), render::EXIT_OK))
        }
        Command::Canon { file } => {
            let f = instance(&file, &budget)?;
            Ok((render::canonical(&canonicalize_simplex(&f, &budget)?), render::EXIT_OK))
        }
        Command::Reduce { file, delta, cap_m, mode } => {
            let q = parse_quartic(&read(&file)?)?;
            let mode = match mode {
                Mode::Positive => HardnessMode::PositiveOrthant,
                Mode::Slack => HardnessMode::SlackPositive,
                Mode::All => HardnessMode::AllOrthants,
            };
            Ok((render::hardness(&make_hardness_instance(&q, delta, cap_m, mode)?), render::EXIT_OK))
        }
        Command::Oracle { file, grid, range, rounds, widen } => {
            if grid < 3 {
                return Err(Error::InvalidInput("--grid must be at least 3".into()));
            }
            let range = parse_range(&range)?;
            let f = instance(&file, &budget)?;
            let mut out = render::grid(&grid_supremum_report(&f, range, grid, rounds), range, grid, rounds);
            if widen {
                out["widening"] = render::widening(&widening_oracle(&f, grid, rounds));
            }
            Ok((out, render::EXIT_OK))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(cli.command) {
        Ok(v) => v,
        Err(e) => (render::error(&e), render::exit_code(&e)),
    };
    println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
    ExitCode::from(code as u8)
}
