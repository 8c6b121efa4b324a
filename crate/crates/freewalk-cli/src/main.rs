//! `freewalk` — exact computations around nearest-neighbour random walks on
//! free groups: resolvent values, stationarity defects of translate and
//! averaged families, direction kernels, boundary sampling, and structured
//! subset analysis.
//!
//! Exit codes: 0 success, 1 verification failed, 2 bad input, 3 budget
//! exceeded.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freewalk_cli::output::{Format, Table};
use freewalk_cli::{CliFailure, run};

#[derive(Parser)]
#[command(
    name = "freewalk",
    version,
    about = "Exact random-walk computations on free groups",
    propagate_version = true
)]
struct Cli {
    /// Rank d of the free group (letters a..=z, uppercase for inverses).
    #[arg(long, global = true, default_value_t = 2)]
    rank: u8,
    /// Output format: text, json, or csv.
    #[arg(long, global = true, default_value = "text")]
    format: String,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolvent values at chosen points.
    Green {
        /// `closed` or `truncated:DEPTH`.
        #[arg(long, default_value = "closed")]
        model: String,
        /// Step measure `w=p/q,...` (default: uniform on the generators).
        #[arg(long)]
        step: Option<String>,
        /// Comma-separated points.
        #[arg(long, default_value = "e,a,ab,abA,bb")]
        points: String,
    },
    /// Per-sphere translators minimizing the translated set weight.
    TranslateSearch {
        /// Set argument `SPEC[@RADIUS]`.
        #[arg(long)]
        set: String,
        /// Search translators sphere by sphere up to this radius.
        #[arg(long, default_value_t = 4)]
        radius_max: usize,
        /// `closed` or `truncated:DEPTH`.
        #[arg(long, default_value = "closed")]
        model: String,
        /// Step measure `w=p/q,...` (default: uniform on the generators).
        #[arg(long)]
        step: Option<String>,
    },
    /// Stationarity defect of the averaged family.
    DefectMk {
        /// Reference set `SPEC[@RADIUS]`.
        #[arg(long)]
        reference: String,
        /// Averaging stage n (walk steps 0..=n).
        #[arg(long, default_value_t = 3)]
        stage: u32,
        /// Semicolon-separated test sets.
        #[arg(long)]
        test_sets: String,
        /// Step measure `w=p/q,...` (default: uniform on the generators).
        #[arg(long)]
        step: Option<String>,
    },
    /// Stationarity defect of the translate family.
    DefectGreen {
        /// Reference set `SPEC[@RADIUS]` normalizing the family.
        #[arg(long)]
        reference: String,
        /// Translating element (a reduced word).
        #[arg(long)]
        translator: String,
        /// Semicolon-separated test sets.
        #[arg(long)]
        test_sets: String,
        /// `closed` or `truncated:DEPTH`.
        #[arg(long, default_value = "closed")]
        model: String,
        /// Step measure `w=p/q,...` (default: uniform on the generators).
        #[arg(long)]
        step: Option<String>,
    },
    /// Direction-kernel exponents, values, and harmonicity defects.
    Kernel {
        /// Ray `PREFIX|PERIOD` (e.g. `e|ab`).
        #[arg(long)]
        ray: String,
        /// Comma-separated points.
        #[arg(long, default_value = "e,a,A,ab")]
        points: String,
    },
    /// Kernel mass of a set sphere by sphere.
    Lightness {
        /// Ray for plain sums (omit with --expected).
        #[arg(long)]
        ray: Option<String>,
        /// Set argument `SPEC[@RADIUS]`.
        #[arg(long)]
        set: String,
        /// Largest sphere radius reported.
        #[arg(long, default_value_t = 8)]
        r_max: usize,
        /// Average over directions (ζ-weighted √-kernel) instead.
        #[arg(long)]
        expected: bool,
    },
    /// Boundary directions drawn from the hitting measure.
    ZetaSample {
        /// Length of each sampled direction prefix.
        #[arg(long, default_value_t = 6)]
        length: usize,
        /// RNG seed (same seed, same samples).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of directions to draw.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Per-sphere counts and growth estimates of a family.
    Growth {
        /// Family spec (no radius suffix).
        #[arg(long)]
        set: String,
        /// Largest sphere radius counted.
        #[arg(long, default_value_t = 8)]
        r_max: usize,
    },
    /// Sparse-family product experiment.
    Injectivity {
        /// Factors per product: 2 or 3.
        #[arg(long, default_value_t = 2)]
        tuple_len: usize,
        /// Ball radius the families are drawn from.
        #[arg(long, default_value_t = 8)]
        radius: usize,
        /// Per-sphere enumeration cap for the family construction.
        #[arg(long, default_value_t = 12)]
        cap: usize,
    },
    /// Census √-kernel sums per sphere and the 4r bound.
    SphereSum {
        /// Ray `PREFIX|PERIOD` fixing the direction.
        #[arg(long)]
        ray: String,
        /// Largest sphere radius reported.
        #[arg(long, default_value_t = 8)]
        r_max: usize,
    },
    /// Run the verification checklist.
    VerifyAll {
        /// Run a single named check.
        #[arg(long)]
        only: Option<String>,
    },
}

fn execute(cli: &Cli) -> Result<(Table, bool), CliFailure> {
    let rank = cli.rank;
    match &cli.command {
        Command::Green {
            model,
            step,
            points,
        } => run::green(rank, model, step.as_deref(), points).map(|t| (t, true)),
        Command::TranslateSearch {
            set,
            radius_max,
            model,
            step,
        } => {
            run::translate_search(rank, model, step.as_deref(), set, *radius_max).map(|t| (t, true))
        }
        Command::DefectMk {
            reference,
            stage,
            test_sets,
            step,
        } => run::defect_mk(rank, step.as_deref(), reference, *stage, test_sets).map(|t| (t, true)),
        Command::DefectGreen {
            reference,
            translator,
            test_sets,
            model,
            step,
        } => run::defect_green(
            rank,
            model,
            step.as_deref(),
            reference,
            translator,
            test_sets,
        )
        .map(|t| (t, true)),
        Command::Kernel { ray, points } => run::kernel(rank, ray, points).map(|t| (t, true)),
        Command::Lightness {
            ray,
            set,
            r_max,
            expected,
        } => run::lightness(rank, ray.as_deref(), set, *r_max, *expected).map(|t| (t, true)),
        Command::ZetaSample {
            length,
            seed,
            count,
        } => run::zeta_sample(rank, *length, *seed, *count).map(|t| (t, true)),
        Command::Growth { set, r_max } => run::growth(rank, set, *r_max).map(|t| (t, true)),
        Command::Injectivity {
            tuple_len,
            radius,
            cap,
        } => run::injectivity(rank, *tuple_len, *radius, *cap).map(|t| (t, true)),
        Command::SphereSum { ray, r_max } => run::sphere_sum(rank, ray, *r_max).map(|t| (t, true)),
        Command::VerifyAll { only } => run::verify_all(only.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format.parse::<Format>() {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok((table, all_passed)) => {
            let rendered = match render(&table, format) {
                Ok(bytes) => bytes,
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(1);
                }
            };
            let written = match &cli.output {
                Some(path) => File::create(path).and_then(|mut f| f.write_all(&rendered)),
                None => std::io::stdout().write_all(&rendered),
            };
            if let Err(err) = written {
                eprintln!("error: {err}");
                return ExitCode::from(1);
            }
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}

fn render(table: &Table, format: Format) -> anyhow::Result<Vec<u8>> {
    let mut buffer = Vec::new();
    table.render(format, &mut buffer)?;
    Ok(buffer)
}
