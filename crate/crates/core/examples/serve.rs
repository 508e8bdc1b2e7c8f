//! Ingests the bundled corpus into a temporary data directory and serves
//! the HTTP API until interrupted.
//!
//!     cargo run --example serve [-- 127.0.0.1:8080]
//!     curl 'localhost:8080/api/search/names?q=xb'
//!     curl -X POST localhost:8080/api/comments/TARSKI:theorem:1 \
//!          -H 'authorization: Bearer editor' -H 'content-type: application/json' \
//!          -d '{"body": "Extensionality"}'

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use mmlhub::platform::{http, BuildSettings, Platform};
use mmlhub::users::{hash_token, Role, User, UserId};

fn user(id: &str, role: Role) -> User {
    User { id: UserId(id.into()), name: id.into(), role, blocked: false, token_hash: hash_token(id) }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let addr: SocketAddr = std::env::args().nth(1).as_deref().unwrap_or("127.0.0.1:8080").parse()?;
    let data = tempfile::tempdir()?;
    let platform = Platform::open_dir(
        data.path(),
        BuildSettings::default(),
        vec![user("admin", Role::Admin), user("editor", Role::Editor)],
    )?;
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mml/v1");
    let outcome = platform.ingest(&corpus, "v1")?;
    println!(
        "serving {} articles ({} items) from {} on http://{addr}",
        outcome.state.corpus.len(),
        outcome.state.item_count(),
        data.path().display()
    );
    println!("tokens: \"admin\" (administrator), \"editor\"");

    tokio::runtime::Runtime::new()?.block_on(http::serve(Arc::new(platform), addr))?;
    Ok(())
}
