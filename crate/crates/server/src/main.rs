use std::net::SocketAddr;

use clap::Parser;

#[derive(Parser)]
#[command(name = "moga-vrptw-server", version, about = "Local service for steering moga-vrptw runs")]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "MOGA_VRPTW_BIND", default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let listener = tokio::net::TcpListener::bind(args.bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, moga_vrptw_server::app())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
