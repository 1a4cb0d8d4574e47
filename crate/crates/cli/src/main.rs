mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use report::{Report, Status, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "g2", version, about = "Batch verifications for compact G2 constructions")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for data-parallel kernels.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Numeric pass/fail tolerance for floating-point checks.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Standard 3-form, its metric and Hodge dual.
    VerifyPhi0,
    /// Fixed loci, singular set and Betti numbers of T^7 / G.
    Orbifold {
        /// `builtin:joyce` or a path to a group definition file.
        #[arg(long, default_value = "builtin:joyce")]
        group: String,
        #[arg(long, default_value_t = 1)]
        delta_b2: i64,
        #[arg(long, default_value_t = 3)]
        delta_b3: i64,
    },
    /// Eguchi-Hanson metric certificate at one scale.
    EhCheck {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// K3 lattice operations.
    #[command(subcommand)]
    K3(K3Command),
    /// Twisted connected sum bookkeeping.
    #[command(subcommand)]
    Tcs(TcsCommand),
    /// Spectral solver for the torsion-free equation on flat T^7.
    SolveTorsion(SolveArgs),
}

#[derive(Subcommand, Debug)]
enum K3Command {
    LatticeInvariants {
        /// Lattice file; the K3 lattice when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    FindIsometry {
        /// `{"gram": .., "vectors": {"v": .., "w": ..}}`; a seeded random pair when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 20_000)]
        search_budget: usize,
    },
    Match {
        /// `{"source": {"cI": ..}, "target": {"cI": ..}}`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Half-square of the built-in rank-one example when no input is given.
        #[arg(long, default_value_t = 4)]
        square_half: i64,
        #[arg(long, default_value_t = 4_000)]
        search_budget: usize,
    },
}

#[derive(Subcommand, Debug)]
enum TcsCommand {
    Betti {
        #[arg(long)]
        block1: String,
        #[arg(long)]
        block2: String,
        #[arg(long)]
        b2: Option<u32>,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    NeckCheck {
        /// Omit the sign flip on the third Kähler class.
        #[arg(long)]
        violate: bool,
    },
    Catalog {
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Semicolon-separated `k1,k2,k3:dir` entries.
    #[arg(long, default_value = "2,1,1:45")]
    modes: String,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 60)]
    max_iter: usize,
    #[arg(long, default_value_t = 16)]
    resolution: usize,
}

/// The argv echo, without the output path so reports compare across destinations.
fn command_echo() -> Vec<String> {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            out.push(a);
        }
    }
    out
}

fn emit(report: &Report, out: Option<&PathBuf>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| anyhow::anyhow!("writing {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 1 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let (status, payload) = match commands::run(&cli) {
        Ok(o) => (o.status, o.payload),
        Err(e) => {
            eprintln!("error: {e:#}");
            (Status::Error, json!({ "error": format!("{e:#}") }))
        }
    };
    let report = Report { schema_version: SCHEMA_VERSION, command: command_echo(), status, payload };
    if let Err(e) = emit(&report, cli.out.as_ref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(status.exit_code() as u8)
}
