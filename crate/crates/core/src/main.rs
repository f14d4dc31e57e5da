use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twistlat::harness::{self, Command, RunConfig};

#[derive(Parser)]
#[command(name = "twistlat", version, about = "Curve counts and Dehn-twist lattices on the once-punctured torus")]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 for one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Count simple, scaled and multi-curves over a length grid.
    Enumerate,
    /// Count twist lattice points over a radius grid.
    Census,
    /// Run the inequality sweeps selected by `verify.theorem`.
    Verify {
        /// Overrides `verify.theorem`.
        #[arg(long)]
        theorem: Option<String>,
    },
    /// Fit curve-count growth exponents.
    Fit,
    /// Compare fast paths against brute-force oracles.
    Oracle,
    /// Run every acceptance criterion.
    VerifyAll,
}

fn load(cli: &Cli) -> twistlat::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Sub::Verify { theorem: Some(t) } = &cli.command {
        cfg.verify.theorem = t.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.command {
        Sub::Enumerate => Command::Enumerate,
        Sub::Census => Command::Census,
        Sub::Verify { .. } => Command::Verify,
        Sub::Fit => Command::Fit,
        Sub::Oracle => Command::Oracle,
        Sub::VerifyAll => Command::VerifyAll,
    };
    let res = load(&cli).and_then(|cfg| harness::run(cmd, &cfg));
    match &res {
        Ok(o) => {
            for l in &o.lines {
                println!("{l}");
            }
            let failed: Vec<&String> = o.manifest.checks.iter().filter(|(_, c)| !c.passed).map(|(k, _)| k).collect();
            if !failed.is_empty() {
                eprintln!("failed checks: {failed:?}");
            }
        }
        Err(e) => eprintln!("twistlat: {e}"),
    }
    ExitCode::from(harness::exit_code(&res) as u8)
}
