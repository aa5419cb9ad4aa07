//! `rsl`: encode data into a simulated storage cluster, fail and repair
//! nodes, reconstruct, eavesdrop, and check properties of the code.

mod cluster;
mod commands;
mod payload;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rsl", version, about = "Secure regenerating-code toolkit and cluster simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Code parameters. d defaults to 2k - 2, the only value the construction supports.
#[derive(Args, Clone, Debug)]
pub struct CodeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of concatenated scalar copies (β = m).
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Symbol field GF(p^w) as `p,w`.
    #[arg(long, default_value = "2,4", value_parser = parse_pair)]
    pub field: (usize, usize),
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode a payload into a new cluster directory.
    Encode {
        #[arg(long)]
        cluster: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        /// Pre-code against an (l1, l2) eavesdropper, given as `l1,l2`.
        #[arg(long, value_parser = parse_pair)]
        secure: Option<(usize, usize)>,
        /// Seed for the random symbols of the secure pre-code.
        #[arg(long)]
        seed: Option<u64>,
        /// File to store (default: empty payload).
        #[arg(long, conflicts_with = "symbols")]
        input: Option<PathBuf>,
        /// Raw symbols to store instead of bytes, e.g. `0x3,7,0xa`.
        #[arg(long, value_delimiter = ',', value_parser = parse_u64)]
        symbols: Option<Vec<u64>>,
    },
    /// Fail one node and regenerate it from d helpers.
    FailRepair {
        #[arg(long)]
        cluster: PathBuf,
        #[arg(long)]
        node: usize,
        /// Helper nodes (default: the first d live nodes).
        #[arg(long, value_delimiter = ',')]
        helpers: Option<Vec<usize>>,
    },
    /// Rebuild the payload from k nodes.
    Reconstruct {
        #[arg(long)]
        cluster: PathBuf,
        /// Nodes to read (default: the first k live nodes).
        #[arg(long, value_delimiter = ',')]
        nodes: Option<Vec<usize>>,
        /// Where to write a byte payload (default: stdout).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Report what an eavesdropper learns from the event log.
    Attack {
        #[arg(long)]
        cluster: PathBuf,
        /// Nodes whose storage is read.
        #[arg(long, value_delimiter = ',')]
        e: Vec<usize>,
        /// Nodes whose incoming repair traffic is read.
        #[arg(long, value_delimiter = ',')]
        f: Vec<usize>,
        /// Epoch range `a..b` (inclusive) or a single epoch.
        #[arg(long, value_parser = parse_range)]
        epochs: Option<(u64, u64)>,
    },
    /// Print secrecy capacity and comparison bounds.
    CapacityTable {
        /// One query `k,d,n,beta,l1,l2`; repeatable.
        #[arg(long)]
        query: Vec<String>,
        /// Product-matrix sweep over k in `a..b`: d = 2k-2, n = d+1, all (l1, l2).
        #[arg(long, value_parser = parse_range)]
        sweep: Option<(u64, u64)>,
        /// β values for the sweep.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        betas: Vec<usize>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// CSV output (the default).
        #[arg(long)]
        csv: bool,
    },
    /// Run the property checks, on a code or on a cluster.
    Verify {
        #[arg(long)]
        cluster: Option<PathBuf>,
        #[command(flatten)]
        code: CodeArgs,
        /// Run only these property ids; repeatable.
        #[arg(long)]
        property: Vec<String>,
        /// Case count above which a property is sampled.
        #[arg(long)]
        max_cases: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("`{s}`: {e}"))
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let num = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("`{x}`: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Encode {
            cluster,
            code,
            secure,
            seed,
            input,
            symbols,
        } => commands::encode(&cluster, &code, secure, seed, input.as_deref(), symbols),
        Cmd::FailRepair { cluster, node, helpers } => commands::fail_repair(&cluster, node, helpers),
        Cmd::Reconstruct { cluster, nodes, output } => commands::reconstruct(&cluster, nodes, output.as_deref()),
        Cmd::Attack { cluster, e, f, epochs } => commands::attack(&cluster, e, f, epochs),
        Cmd::CapacityTable {
            query,
            sweep,
            betas,
            json,
            csv: _,
        } => commands::capacity_table(&query, sweep, &betas, json),
        Cmd::Verify {
            cluster,
            code,
            property,
            max_cases,
            seed,
        } => commands::verify(cluster.as_deref(), &code, &property, max_cases, seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
