mod config;
mod run;
mod store;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;

use clap::Parser;
use rayon::prelude::*;

use config::{Command, ExperimentConfig};
use run::RunError;
use store::LedgerRow;

/// Runs graded-weyl experiments from TOML configurations.
#[derive(Debug, Parser)]
#[command(name = "graded-weyl", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Configuration files; several run concurrently.
    #[arg(long, required = true, num_args = 1..)]
    config: Vec<PathBuf>,
    /// Output root; each run writes to `<out>/<config-hash>/`.
    #[arg(long, default_value = "outputs")]
    out: PathBuf,
    /// Worker threads for the run pool and the numerical kernels.
    #[arg(long)]
    threads: Option<usize>,
    /// Recompute even if a cached result exists.
    #[arg(long)]
    no_cache: bool,
}

struct Outcome {
    row: LedgerRow,
    message: String,
}

fn failure(hash: &str, command: Command, code: i32, detail: String) -> Outcome {
    let status = if code == 2 { "schema_error" } else if code == 3 { "numeric_error" } else { "io_error" };
    Outcome {
        row: LedgerRow { hash: hash.to_string(), command, status, exit_code: code, cache: "none", detail: detail.clone() },
        message: format!("error: {detail}"),
    }
}

fn execute(cli: &Cli, path: &Path) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return failure("-", cli.command, 2, format!("cannot read {}: {e}", path.display())),
    };
    let cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return failure("-", cli.command, 2, format!("schema error at {e}")),
    };
    let canonical = store::canonical_run(cli.command, &cfg.canonical());
    let hash = store::config_hash(&canonical);
    let name = store::short_hash(&hash).to_string();
    let out_dir = cli.out.join(&name);
    let cache_dir = store::cache_root(&cli.out).join(&name);
    let (files, cache) = match (cli.no_cache, store::cached(&cache_dir)) {
        (false, Some(files)) => (files, "hit"),
        _ => match run::run(cli.command, &cfg) {
            Ok(artifacts) => {
                let files = store::render(&artifacts, &hash, &cfg.canonical());
                if let Err(e) = store::write_run(&cache_dir, &files) {
                    return failure(&hash, cli.command, 1, format!("cannot write {}: {e}", cache_dir.display()));
                }
                (files, "miss")
            }
            Err(e @ RunError::Schema(_)) => return failure(&hash, cli.command, 2, e.to_string()),
            Err(e @ RunError::Numeric { .. }) => return failure(&hash, cli.command, 3, e.to_string()),
        },
    };
    if out_dir != cache_dir {
        if let Err(e) = store::write_run(&out_dir, &files) {
            return failure(&hash, cli.command, 1, format!("cannot write {}: {e}", out_dir.display()));
        }
    }
    Outcome {
        row: LedgerRow { hash, command: cli.command, status: "ok", exit_code: 0, cache, detail: out_dir.display().to_string() },
        message: format!("{name} {} (cache {cache})", out_dir.display()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let (tx, rx) = mpsc::channel();
    pool.install(|| {
        cli.config.par_iter().for_each_with(tx, |tx, path| {
            let _ = tx.send(execute(&cli, path));
        });
    });
    // completion order
    let outcomes: Vec<Outcome> = rx.into_iter().collect();
    let mut code = 0;
    for o in &outcomes {
        if o.row.exit_code == 0 {
            println!("{}", o.message);
        } else {
            eprintln!("{}", o.message);
        }
        code = code.max(o.row.exit_code);
    }
    let rows: Vec<LedgerRow> = outcomes.into_iter().map(|o| o.row).collect();
    if let Err(e) = store::append_ledger(&cli.out.join("ledger.csv"), &rows) {
        eprintln!("error: cannot append to the run ledger: {e}");
        code = code.max(1);
    }
    ExitCode::from(code as u8)
}
