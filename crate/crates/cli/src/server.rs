//! WebSocket transport for [`SessionHub`]: `GET /ws` upgrades, then every
//! text frame is one [`ClientMessage`] answered by one or more
//! [`ServerMessage`] frames.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;

use crate::protocol::{ClientMessage, ErrorCode, ServerMessage};
use crate::session::SessionHub;

pub fn router(hub: Arc<SessionHub>) -> Router {
    Router::new()
        .route("/ws", get(upgrade))
        .route("/health", get(|| async { "ok" }))
        .with_state(hub)
}

async fn upgrade(ws: WebSocketUpgrade, State(hub): State<Arc<SessionHub>>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, hub))
}

async fn connection(mut socket: WebSocket, hub: Arc<SessionHub>) {
    while let Some(Ok(msg)) = socket.recv().await {
        let text = match msg {
            Message::Text(t) => t,
            Message::Close(_) => break,
            _ => continue,
        };
        let replies = match serde_json::from_str::<ClientMessage>(text.as_str()) {
            Ok(m) => {
                let hub = hub.clone();
                // Steps are CPU-bound; keep them off the reactor.
                match tokio::task::spawn_blocking(move || hub.handle(m)).await {
                    Ok(r) => r,
                    Err(e) => vec![ServerMessage::Error {
                        session: None,
                        code: ErrorCode::Engine,
                        message: e.to_string(),
                    }],
                }
            }
            Err(e) => vec![ServerMessage::Error {
                session: None,
                code: ErrorCode::BadRequest,
                message: e.to_string(),
            }],
        };
        for r in replies {
            let json = serde_json::to_string(&r).expect("messages serialize");
            if socket.send(Message::Text(json.into())).await.is_err() {
                return;
            }
        }
    }
}

/// Serve until the process is interrupted. Returns the bound address
/// through `on_bound` before accepting connections.
pub async fn serve(
    hub: Arc<SessionHub>,
    bind: SocketAddr,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(hub))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
