use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod suite;

#[derive(Parser, Debug)]
#[command(name = "qmf", version, about = "Exact arithmetic for weight-2 quaternionic modular forms")]
pub struct Cli {
    /// Directory for cached class sets.
    #[arg(long, global = true, env = "QMF_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Write JSON here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct LevelArgs {
    /// Level N.
    #[arg(long)]
    pub level: u64,

    /// Explicit split N1,N2 (N1 carries the ramified primes).
    #[arg(long, value_parser = parse_split)]
    pub split: Option<(u64, u64)>,
}

fn parse_split(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(',').ok_or("expected N1,N2")?;
    let a = a.trim().parse().map_err(|e| format!("N1: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("N2: {e}"))?;
    Ok((a, b))
}

fn parse_phi(s: &str) -> Result<Vec<String>, String> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<num_bigint::BigInt>().map(|_| x.to_string()).map_err(|e| format!("{x:?}: {e}"))
        })
        .collect()
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mass of the order of level N and its numerator.
    Mass(LevelArgs),

    /// Right ideal classes with unit weights.
    Classes(LevelArgs),

    /// Brandt matrices and the eigen-decomposition of the cuspidal space.
    Brandt {
        #[command(flatten)]
        level: LevelArgs,
        /// Comma-separated primes; defaults to every prime up to --ell-max.
        #[arg(long, value_delimiter = ',')]
        ell: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        ell_max: u64,
        /// Also print eigen-blocks.
        #[arg(long)]
        eigen: bool,
    },

    /// Cusp form congruent to 1 mod p^r and a congruence certificate.
    Congruence {
        #[command(flatten)]
        level: LevelArgs,
        /// Prime; defaults to every prime dividing the mass numerator.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 50)]
        ell_max: u64,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
    },

    /// Toric periods and algebraic central L-values for an imaginary quadratic field.
    Lvalue {
        #[command(flatten)]
        level: LevelArgs,
        /// Fundamental discriminant, negative.
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        /// Character index; all characters when omitted.
        #[arg(long = "char")]
        character: Option<usize>,
        /// Form values on the classes, comma-separated.
        #[arg(long, value_parser = parse_phi, allow_hyphen_values = true)]
        phi: Option<Vec<String>>,
        /// Check the central-value congruence modulo p^r.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 50)]
        ell_max: u64,
    },

    /// One JSON line per level and split with mass data and congruence verdicts.
    Scan {
        #[arg(long, default_value_t = 2)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = 50)]
        ell_max: u64,
    },

    /// Run the built-in reproduction suite.
    VerifyPaper {
        /// Only these criteria (1-12).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    commands::run(&cli)
}
