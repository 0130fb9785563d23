use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use verifly::domains::DomainKind;
use verifly::harness::{gen_edit_script, gen_program, run_bench, write_csv, Corpus, CorpusSpec};
use verifly::server::{run_batch, serve, BatchOptions, DomainChoice, ServeConfig};
use verifly::snapshot::SnapshotFormat;

#[derive(Parser)]
#[command(name = "verifly", version, about = "Incremental assertion checker for Horn-clause programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-shot: parse, analyze, and check the given files.
    Check {
        paths: Vec<PathBuf>,
        /// Abstract domain: modes, types, product, or auto.
        #[arg(long, default_value = "auto")]
        domains: String,
        /// Emit diagnostics and stats as one JSON object.
        #[arg(long)]
        json: bool,
        /// Print the normalized clause IR before diagnostics.
        #[arg(long)]
        dump_chc: bool,
        /// Log each success-pattern growth during the fixpoint to stderr.
        #[arg(long)]
        trace_fixpoint: bool,
        /// Log the invalidation report of incremental updates to stderr.
        #[arg(long)]
        trace_incremental: bool,
    },
    /// Run as a diagnostics daemon over stdin/stdout.
    Serve {
        /// Line-delimited JSON over standard input/output (the only transport).
        #[arg(long)]
        stdio: bool,
        #[arg(long, default_value_t = 300)]
        debounce_ms: u64,
        /// Persist/restore the analysis graph across runs.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, default_value = "bin")]
        snapshot_format: String,
    },
    /// Benchmark incremental updates against scratch analysis.
    Bench {
        /// Corpus description (JSON: seed, files, clauses_total, preds, shape, assertion_density).
        #[arg(long)]
        spec: PathBuf,
        /// Number of edits in the generated script.
        #[arg(long, default_value_t = 20)]
        scripts: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    env_logger::Builder::new()
        .parse_filters(&std::env::var("VERIFLY_LOG").unwrap_or_else(|_| "warn".into()))
        .init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { paths, domains, json, dump_chc, trace_fixpoint, trace_incremental } => {
            if paths.is_empty() {
                eprintln!("verifly check: no input files");
                2
            } else if let Some(domain) = DomainChoice::parse(&domains) {
                let opts = BatchOptions { domain, json, dump_chc, trace_fixpoint, trace_incremental };
                run_batch(&paths, &opts, &mut std::io::stdout())
            } else {
                eprintln!("verifly check: unknown domain {domains:?} (expected modes|types|product|auto)");
                2
            }
        }
        Command::Serve { stdio, debounce_ms, snapshot, snapshot_format } => {
            if !stdio {
                eprintln!("verifly serve: only --stdio transport is supported");
                2
            } else if let Some(format) = SnapshotFormat::parse(&snapshot_format) {
                let cfg = ServeConfig {
                    debounce: std::time::Duration::from_millis(debounce_ms),
                    snapshot,
                    snapshot_format: format,
                    domain: DomainChoice::Auto,
                };
                serve(cfg, std::io::BufReader::new(std::io::stdin()), std::io::stdout().lock());
                0
            } else {
                eprintln!("verifly serve: unknown snapshot format {snapshot_format:?}");
                2
            }
        }
        Command::Bench { spec, scripts, out } => bench(&spec, scripts, &out),
    };
    std::process::exit(code);
}

fn bench(spec_path: &PathBuf, scripts: usize, out_path: &PathBuf) -> i32 {
    let spec: CorpusSpec = match std::fs::read_to_string(spec_path)
        .map_err(|e| e.to_string())
        .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()))
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("verifly bench: cannot read spec {}: {e}", spec_path.display());
            return 2;
        }
    };
    let texts = match gen_program(&spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("verifly bench: {e}");
            return 2;
        }
    };
    let corpus = Corpus::new(texts, spec.preds);
    let script = match gen_edit_script(spec.seed ^ 0x5eed, &corpus, scripts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("verifly bench: {e}");
            return 2;
        }
    };
    let rows = match run_bench(&corpus, &script, DomainKind::Product, 5) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verifly bench: {e}");
            return 1;
        }
    };
    let mut csv = Vec::new();
    if write_csv(&rows, &mut csv).is_err() {
        return 2;
    }
    if let Err(e) = std::fs::write(out_path, &csv) {
        eprintln!("verifly bench: cannot write {}: {e}", out_path.display());
        return 2;
    }
    let mut stderr = std::io::stderr().lock();
    let _ = writeln!(stderr, "wrote {} rows to {}", rows.len(), out_path.display());
    0
}
