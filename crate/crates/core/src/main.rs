use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use monotone_infer::cli::{self, AiMode, CmdOutput, InferAlgo};

/// Invariant inference for propositional transition systems via the
/// monotone theory.
#[derive(Parser)]
#[command(name = "monotone-infer", version)]
struct Args {
    /// RNG seed; falls back to MONOTONE_INFER_SEED, then 0
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the report as JSON to this path
    #[arg(long, global = true, value_name = "path")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer an inductive invariant (exit 0 invariant, 1 unsafe, 2 inconclusive)
    Infer {
        /// System file
        system: PathBuf,
        /// Inference engine: cdnf-itp or dual-itp
        #[arg(long, default_value = "cdnf-itp")]
        algo: String,
        /// Initial bounded-reachability depth
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// Restart budget; s doubles on every restart
        #[arg(long, default_value_t = 8)]
        max_restarts: u32,
    },
    /// Abstract interpretation in the monotone-span domain
    Ai {
        /// System file (may carry `# basis: ...` metadata)
        system: PathBuf,
        /// Basis file: one cube per line
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Iteration strategy: efficient or direct
        #[arg(long, default_value = "efficient")]
        mode: String,
    },
    /// Learn a formula from an exhaustive teacher
    Learn {
        /// Target formula file
        target: PathBuf,
        /// Number of variables
        #[arg(long)]
        n: u32,
    },
    /// Generate a certified benchmark system
    Gen {
        /// Family: parity, two-bits or fenced-random
        family: String,
        /// Number of variables
        #[arg(long)]
        n: u32,
        /// Output file; stdout when omitted
        out: Option<PathBuf>,
    },
    /// Check the three inductive-invariant conditions
    Verify {
        system: PathBuf,
        invariant: PathBuf,
    },
    /// Run a bound-assertion suite
    Bench {
        /// Suite name: bounds, monotonization, inference, absint, learning, empty
        #[arg(long)]
        suite: String,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn run(args: Args) -> Result<(CmdOutput, Option<PathBuf>), (String, i32)> {
    let seed = args
        .seed
        .or_else(|| {
            std::env::var("MONOTONE_INFER_SEED").ok().and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    let fail = |msg: String| (msg, 3);
    let mut gen_out: Option<PathBuf> = None;
    let result = match &args.command {
        Command::Infer { system, algo, s, max_restarts } => {
            let algo = InferAlgo::parse(algo)
                .ok_or_else(|| fail(format!("unknown algorithm `{algo}`")))?;
            let text = read(system).map_err(fail)?;
            cli::cmd_infer(&text, algo, *s, *max_restarts, seed)
        }
        Command::Ai { system, basis, mode } => {
            let mode =
                AiMode::parse(mode).ok_or_else(|| fail(format!("unknown mode `{mode}`")))?;
            let text = read(system).map_err(fail)?;
            let basis_text = match basis {
                Some(p) => Some(read(p).map_err(fail)?),
                None => None,
            };
            cli::cmd_ai(&text, basis_text.as_deref(), mode, seed)
        }
        Command::Learn { target, n } => {
            let text = read(target).map_err(fail)?;
            cli::cmd_learn(&text, *n, seed)
        }
        Command::Gen { family, n, out } => {
            gen_out = out.clone();
            cli::cmd_gen(family, *n, seed)
        }
        Command::Verify { system, invariant } => {
            let sys = read(system).map_err(fail)?;
            let inv = read(invariant).map_err(fail)?;
            cli::cmd_verify(&sys, &inv, seed)
        }
        Command::Bench { suite } => cli::cmd_bench(suite, seed),
    };
    match result {
        Ok(output) => {
            if let Some(path) = &args.json {
                std::fs::write(path, output.report.to_json())
                    .map_err(|e| (format!("cannot write {}: {e}", path.display()), 3))?;
            }
            Ok((output, gen_out))
        }
        Err(e) => Err((e.to_string(), e.exit_code())),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok((output, gen_out)) => {
            match (&output.artifact, &gen_out) {
                (Some(artifact), Some(path)) => {
                    if let Err(e) = std::fs::write(path, artifact) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(3);
                    }
                }
                (Some(artifact), None) => print!("{artifact}"),
                _ => {}
            }
            print!("{}", output.report.to_text());
            ExitCode::from(output.exit as u8)
        }
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
