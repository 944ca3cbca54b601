use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use vancycles::pipeline::problem::parse_field;
use vancycles::pipeline::quick;
use vancycles::pipeline::{exit_code, run, Problem, RunOptions};
use vancycles::Error;

#[derive(Parser)]
#[command(
    name = "vancycles",
    version,
    about = "Vanishing cycles, characteristic cycles and a_f checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the commands of a problem file and write a JSON report.
    Run {
        problem: PathBuf,
        /// Report path; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        retries: Option<u32>,
        /// `rationals` or `modular:p`.
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value = ".vancycles-cache")]
        cache_dir: PathBuf,
        #[arg(long)]
        no_cache: bool,
        /// Recompute over Q after a modular run (default on in modular mode).
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        confirm_over_rationals: Option<bool>,
        /// Add wall-clock timings and cache counters to the report.
        #[arg(long)]
        timing: bool,
    },
    /// Exceptional coefficient at a point (the Milnor number for isolated singularities).
    Mu {
        f: String,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Comma-separated coordinates; the origin by default.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        retries: u32,
    },
    /// Relative polar curve of `f` for the linear form `l`.
    Polar {
        f: String,
        l: String,
        /// `;`-separated generators of the stratum (ambient space when empty).
        #[arg(long, default_value = "")]
        stratum: String,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
    /// Conormal variety of `V(generators)`, generators separated by `;`.
    Conormal {
        generators: String,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
    /// Thom's a_f condition for `(M, N)` at a point.
    Afpair {
        /// `;`-separated generators of M (ambient space when empty).
        m: String,
        f: String,
        /// `;`-separated generators of N.
        n: String,
        /// Comma-separated coordinates.
        point: String,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json<T: Serialize>(v: &T) {
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(v).expect("serializable")
    ));
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e) as u8)
}

fn vars_opt(v: &[String]) -> Option<&[String]> {
    (!v.is_empty()).then_some(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            problem,
            out,
            seed,
            retries,
            field,
            cache_dir,
            no_cache,
            confirm_over_rationals,
            timing,
        } => {
            let field = match field.as_deref().map(parse_field).transpose() {
                Ok(f) => f,
                Err(e) => return fail(&e),
            };
            let opts = RunOptions {
                seed,
                retries,
                field,
                cache_dir: (!no_cache).then_some(cache_dir),
                confirm_over_rationals,
                timing,
            };
            let report = match Problem::load(&problem).and_then(|p| run(&p, &opts)) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, report.to_json()) {
                        return fail(&e.into());
                    }
                    emit(&report.table());
                }
                None => emit(&report.to_json()),
            }
            if let Some(f) = &report.failure {
                eprintln!("error in {}: {}", f.command, f.message);
            }
            return ExitCode::from(report.exit_code() as u8);
        }
        Command::Mu {
            f,
            vars,
            point,
            seed,
            retries,
        } => quick::mu(&f, vars_opt(&vars), point.as_deref(), seed, retries).map(|c| {
            emit(&format!("{}\n", c.value));
        }),
        Command::Polar {
            f,
            l,
            stratum,
            vars,
        } => quick::polar(&f, &l, &stratum, vars_opt(&vars)).map(|p| print_json(&p)),
        Command::Conormal { generators, vars } => {
            quick::conormal(&generators, vars_opt(&vars)).map(|c| print_json(&c))
        }
        Command::Afpair {
            m,
            f,
            n,
            point,
            vars,
        } => quick::afpair(&m, &f, &n, &point, vars_opt(&vars)).map(|v| print_json(&v)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
