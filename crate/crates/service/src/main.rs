//! `rankfit-serve`: runs the explanation API, optionally serving a web UI
//! bundle from a directory.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::Parser;
use rankfit_service::{router, AppState, Config};

#[derive(Parser)]
#[command(name = "rankfit-serve", version, about = "HTTP API for ranking explanation")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory served at `/`.
    #[arg(long)]
    static_dir: Option<PathBuf>,
    /// Directory for dataset snapshots, reloaded on start.
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    max_rows: usize,
    /// Solves allowed to run at once.
    #[arg(long, default_value_t = 2)]
    workers: usize,
    /// Default solve time limit in seconds; 0 disables it.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
}

#[tokio::main]
async fn main() -> Result<()> {
    let args = Args::parse();
    let default_time_limit = if args.time_limit == 0.0 {
        None
    } else {
        Some(Duration::try_from_secs_f64(args.time_limit).context("--time-limit must be nonnegative")?)
    };
    let config = Config {
        max_rows: args.max_rows,
        workers: args.workers,
        default_time_limit,
        snapshot_dir: args.snapshot_dir,
        static_dir: args.static_dir,
        ..Config::default()
    };
    let state = AppState::new(config).context("loading snapshots")?;
    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("binding {}", args.addr))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
