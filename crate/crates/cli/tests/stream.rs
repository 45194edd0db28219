use std::future::IntoFuture;
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use ldx_cli::server::{self, AppState};
use serde_json::Value;
use tokio_tungstenite::tungstenite::Message;

async fn next_json<S>(ws: &mut S) -> Value
where
    S: StreamExt<Item = Result<Message, tokio_tungstenite::tungstenite::Error>> + Unpin,
{
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(10), ws.next()).await.expect("no message").unwrap().unwrap();
        if let Message::Text(t) = msg {
            return serde_json::from_str(&t).unwrap();
        }
    }
}

#[tokio::test]
async fn stream_pushes_a_view_per_move() {
    let app = AppState::new(Duration::from_secs(3600), None);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(axum::serve(listener, server::router(app.clone())).into_future());

    let shared = app.store.create(ldx_core::corpus::source("tic_tac_toe").unwrap().to_string(), ["random".parse().unwrap(); 2], 4).unwrap();
    let id = shared.lock().unwrap().id.clone();

    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/sessions/{id}/stream")).await.unwrap();
    let first = next_json(&mut ws).await;
    assert_eq!(first["v"], 1);
    assert_eq!(first["history_len"], 0);
    assert_eq!(first["legal_moves"].as_array().unwrap().len(), 9);

    let mut plies = 0;
    loop {
        let done = {
            let mut s = shared.lock().unwrap();
            s.agent_move().unwrap();
            s.publish();
            s.state.terminated
        };
        plies += 1;
        let v = next_json(&mut ws).await;
        assert_eq!(v["history_len"], plies);
        assert_eq!(v["terminated"], done);
        if done {
            assert!(v["outcome"].is_object());
            break;
        }
    }
    ws.send(Message::Close(None)).await.unwrap();

    let missing = tokio_tungstenite::connect_async(format!("ws://{addr}/sessions/missing/stream")).await;
    assert!(missing.is_err());
}
