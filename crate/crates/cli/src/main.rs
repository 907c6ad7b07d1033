use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zdgraph_cli::*;

#[derive(Parser)]
#[command(name = "zdgraph", version, about = "Wiener index and Wiener complexity of zero-divisor graphs")]
struct Cli {
    /// Worker threads for graph building and distance computation.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Vertex budget for the graph oracle; for `sweep`, the largest graph to include.
    #[arg(long, global = true)]
    max_vertices: Option<u64>,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RingArg {
    /// Ring spec such as `M2(2)xM2(3)`.
    #[arg(value_name = "RING")]
    positional: Option<String>,

    #[arg(long = "ring", value_name = "RING", conflicts_with = "positional")]
    flag: Option<String>,
}

impl RingArg {
    fn get(&self) -> CliResult<&str> {
        self.flag
            .as_deref()
            .or(self.positional.as_deref())
            .ok_or_else(|| CliError::usage("a ring spec is required (positional or --ring)"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form quantity by name.
    Formula {
        name: String,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        squarezero: bool,
        /// Vertex class, `k1,...,kl|0` or `k1,...,kl|1`.
        #[arg(long)]
        class: Option<String>,
    },
    /// Build the graph and report measured quantities.
    Oracle {
        #[command(flatten)]
        ring: RingArg,
    },
    /// Compare every closed form with the graph oracle.
    Verify {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
    },
    /// Verify every ring whose graph has at most --max-vertices vertices.
    Sweep {
        /// Emit CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Write the graph as an edge list, DOT or GraphML.
    Export {
        #[command(flatten)]
        ring: RingArg,
        #[arg(value_name = "FORMAT")]
        positional_format: Option<String>,
        #[arg(long = "format", conflicts_with = "positional_format")]
        format: Option<String>,
    },
    /// Reconstruct the Wiener index of M_n(GF(q)) as a polynomial in q.
    Poly {
        #[arg(value_name = "N", required_unless_present = "n_flag")]
        n: Option<u32>,
        #[arg(long = "n", conflicts_with = "n")]
        n_flag: Option<u32>,
    },
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> CliResult<(String, i32)> {
    let mut options = RunOptions::default();
    if let Some(m) = cli.max_vertices {
        options.max_vertices = m;
    }
    match cli.command {
        Command::Formula {
            name,
            ring,
            n,
            q,
            k,
            squarezero,
            class,
        } => {
            let args = FormulaArgs {
                ring,
                n,
                q,
                k,
                squarezero,
                class,
            };
            Ok((to_json(&run_formula(&name, &args)?), exit::PASS))
        }
        Command::Oracle { ring } => Ok((to_json(&run_oracle(ring.get()?, &options)?), exit::PASS)),
        Command::Verify { ring, format } => {
            let report = run_verify(ring.get()?, &options)?;
            let text = match format {
                ReportFormat::Json => to_json(&report),
                ReportFormat::Text => report.to_text(),
            };
            Ok((text, report.exit_code()))
        }
        Command::Sweep { csv } => {
            let max = cli
                .max_vertices
                .ok_or_else(|| CliError::usage("sweep needs --max-vertices"))?;
            let rows = run_sweep(max, &options)?;
            let failed = rows.iter().any(|r| r.verdict == Verdict::Fail);
            let text = if csv { sweep_csv(&rows) } else { to_json(&rows) };
            Ok((text, if failed { exit::MISMATCH } else { exit::PASS }))
        }
        Command::Export {
            ring,
            positional_format,
            format,
        } => {
            let fmt = format
                .or(positional_format)
                .ok_or_else(|| CliError::usage("an export format is required: edgelist, dot or graphml"))?;
            let fmt: ExportFormat = fmt.parse()?;
            Ok((run_export(ring.get()?, fmt, &options)?, exit::PASS))
        }
        Command::Poly { n, n_flag } => {
            let n = n.or(n_flag).expect("clap enforces one of the two");
            Ok((to_json(&run_poly(n)?), exit::PASS))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let result = match cli.workers {
        Some(0) => Err(CliError::usage("--workers must be at least 1")),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(CliError::usage(format!("cannot start {w} workers: {e}"))),
        },
        None => run(cli),
    };
    let (text, code) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code as u8);
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(exit::USAGE as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
