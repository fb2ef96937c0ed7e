use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use archgame_service::{router, Store};
use clap::Parser;

/// Serve decomposition sessions over HTTP.
#[derive(Parser)]
#[command(name = "archgame-serve", version, about)]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Keep sessions here across restarts; in memory otherwise.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Seconds a decompose request waits before returning a job to poll.
    #[arg(long, default_value_t = 10.0)]
    budget_secs: f64,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let budget = Duration::try_from_secs_f64(args.budget_secs)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
    let store = match &args.data_dir {
        Some(dir) => Store::open(dir, budget)?,
        None => Store::in_memory(budget),
    };
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store))).await
}
