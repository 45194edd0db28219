use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use ldx_cli::server::{self, AppState, Shared};
use ldx_cli::session::Session;
use ldx_core::corpus;
use rand::Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> (Shared, Router) {
    let state = AppState::new(Duration::from_secs(3600), None);
    (state.clone(), server::router(state))
}

async fn call(router: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = router.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
    (status, v)
}

async fn create(router: &Router, body: Value) -> (String, Value) {
    let (status, v) = call(router, Method::POST, "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    (v["session_id"].as_str().unwrap().to_string(), v)
}

fn indices(state: &Value) -> Vec<u64> {
    state["legal_moves"].as_array().unwrap().iter().map(|m| m["index"].as_u64().unwrap()).collect()
}

#[tokio::test]
async fn reversi_session_starts_with_four_moves() {
    let (_, router) = app();
    let (id, v) = create(&router, json!({ "game_name": "reversi", "seed": 1 })).await;
    assert_eq!(v["v"], 1);
    let st = &v["state"];
    assert_eq!(st["legal_moves"].as_array().unwrap().len(), 4);
    assert_eq!(st["scores"], json!([2, 2]));
    assert_eq!(st["mover"], "P1");
    assert_eq!(st["cells"].as_array().unwrap().len(), 64);
    assert_eq!(st["terminated"], false);
    let occupied = st["cells"].as_array().unwrap().iter().filter(|c| !c["piece"].is_null()).count();
    assert_eq!(occupied, 4);

    let (status, again) = call(&router, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again["state"], v["state"]);
}

#[tokio::test]
async fn illegal_action_is_rejected_without_changing_state() {
    let (_, router) = app();
    let (id, v) = create(&router, json!({ "game_name": "reversi" })).await;
    let (status, err) =
        call(&router, Method::POST, &format!("/sessions/{id}/actions"), Some(json!({ "cell": 0 }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"]["kind"], "IllegalAction");
    let mut legal: Vec<u64> = err["legal_actions"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    legal.sort();
    let mut expected = indices(&v["state"]);
    expected.sort();
    assert_eq!(legal, expected);
    let mask = err["legal_mask"].as_array().unwrap();
    assert_eq!(mask.len(), v["state"]["action_space_size"].as_u64().unwrap() as usize);
    assert_eq!(mask.iter().filter(|b| b.as_bool().unwrap()).count(), 4);
    assert_eq!(err["state"], v["state"]);

    let (_, after) = call(&router, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(after["state"], v["state"]);

    // Out-of-range indices and moves that do not exist in the codec are also illegal.
    for body in [json!({ "action_index": 100000 }), json!({ "source": 1, "dest": 2 }), json!("pass")] {
        let (status, _) = call(&router, Method::POST, &format!("/sessions/{id}/actions"), Some(body)).await;
        assert_eq!(status, StatusCode::CONFLICT);
    }
}

#[tokio::test]
async fn action_forms_are_equivalent() {
    let (_, router) = app();
    let bodies = [json!({ "action_index": 4 }), json!({ "cell": 4 }), json!({ "source": 4, "dest": 4 })];
    let mut views = Vec::new();
    for body in bodies {
        let (id, _) = create(&router, json!({ "game_name": "tic_tac_toe", "seed": 3 })).await;
        let (status, v) = call(&router, Method::POST, &format!("/sessions/{id}/actions"), Some(body)).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        let mut st = v["state"].clone();
        st["session_id"] = Value::Null;
        views.push(st);
    }
    assert_eq!(views[0], views[1]);
    assert_eq!(views[0], views[2]);
    assert_eq!(views[0]["cells"][4]["owner"], "P1");
    assert_eq!(views[0]["mover"], "P2");
}

#[tokio::test]
async fn reversi_plays_out_to_a_score_decided_result() {
    let (_, router) = app();
    let (id, _) = create(&router, json!({ "game_name": "reversi", "seats": ["random", "random"], "seed": 7 })).await;
    let mut passes = 0;
    let last = loop {
        let (status, v) = call(&router, Method::POST, &format!("/sessions/{id}/agent-move"), None).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        if v["action"]["kind"] == "pass" {
            passes += 1;
        }
        if v["state"]["terminated"] == true {
            break v;
        }
    };
    let st = &last["state"];
    let scores = st["scores"].as_array().unwrap();
    let (p1, p2) = (scores[0].as_i64().unwrap(), scores[1].as_i64().unwrap());
    let cells = st["cells"].as_array().unwrap();
    let count = |p: &str| cells.iter().filter(|c| c["owner"] == p).count() as i64;
    assert_eq!((p1, p2), (count("P1"), count("P2")));
    let winner = &st["outcome"]["winner"];
    match p1.cmp(&p2) {
        std::cmp::Ordering::Greater => assert_eq!(winner, "P1"),
        std::cmp::Ordering::Less => assert_eq!(winner, "P2"),
        std::cmp::Ordering::Equal => assert!(winner.is_null()),
    }
    assert!(st["legal_moves"].as_array().unwrap().is_empty());
    let full = cells.iter().all(|c| !c["piece"].is_null());
    assert!(full || passes >= 2, "ended with neither a full board nor a double pass");

    let (status, v) = call(&router, Method::POST, &format!("/sessions/{id}/agent-move"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"]["kind"], "GameOver");
}

#[tokio::test]
async fn undo_restores_the_previous_state_exactly() {
    let (app_state, router) = app();
    let (id, _) = create(&router, json!({ "game_name": "english_draughts", "seats": ["random", "random"], "seed": 11 })).await;
    let mut views = Vec::new();
    for _ in 0..30 {
        let (_, v) = call(&router, Method::GET, &format!("/sessions/{id}/state"), None).await;
        views.push(v["state"].clone());
        let (status, _) = call(&router, Method::POST, &format!("/sessions/{id}/agent-move"), None).await;
        assert_eq!(status, StatusCode::OK);
    }
    let shared = app_state.store.get(&id).unwrap();
    {
        let s = shared.lock().unwrap();
        let replayed = Session::replay(&s.game, &s.history).unwrap();
        assert_eq!(replayed, s.state);
    }
    while let Some(expected) = views.pop() {
        let (status, v) = call(&router, Method::POST, &format!("/sessions/{id}/undo"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(v["state"], expected);
    }
    {
        let s = shared.lock().unwrap();
        assert_eq!(s.state, s.game.initial_state());
    }
    let (status, v) = call(&router, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"]["kind"], "NothingToUndo");
}

#[tokio::test]
async fn legal_moves_match_the_engine() {
    let (app_state, router) = app();
    let mut rng = ldx_core::engine::rng::stream(5, 0);
    for name in corpus::BOARD_GAMES {
        let game = corpus::load(name).unwrap();
        for seed in 0..3u64 {
            let (id, _) = create(&router, json!({ "game_name": name, "seed": seed })).await;
            let mut st = game.initial_state();
            for _ in 0..40 {
                let (_, v) = call(&router, Method::GET, &format!("/sessions/{id}/state"), None).await;
                if st.terminated {
                    assert_eq!(v["state"]["terminated"], true);
                    break;
                }
                let engine: Vec<u64> = game.legal_actions(&st).into_iter().map(u64::from).collect();
                assert_eq!(indices(&v["state"]), engine, "{name}");
                let a = engine[rng.random_range(0..engine.len())];
                let (status, _) =
                    call(&router, Method::POST, &format!("/sessions/{id}/actions"), Some(json!({ "action_index": a }))).await;
                assert_eq!(status, StatusCode::OK);
                game.step_capped(&mut st, a as u32, 200).unwrap();
            }
            let shared = app_state.store.get(&id).unwrap();
            assert_eq!(shared.lock().unwrap().state, st, "{name}");
        }
    }
}

#[tokio::test]
async fn errors_use_the_documented_status_codes() {
    let (_, router) = app();
    let (status, v) = call(&router, Method::GET, "/sessions/nope/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["kind"], "UnknownSession");
    let (status, _) = call(&router, Method::POST, "/sessions/nope/actions", Some(json!({ "cell": 0 }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, v) =
        call(&router, Method::POST, "/sessions", Some(json!({ "game_text": "(game \"broken\"\n  (players 2)\n  (equipment (board (square 3)) (pieces (\"stone\" both)))\n  (rules (play (repeat (P1 P2) (teleport)))))" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"]["line"].as_u64().is_some(), "{v}");
    assert!(v["error"]["column"].as_u64().is_some(), "{v}");
    assert!(v["error"]["kind"].as_str().unwrap().ends_with("Error") || v["error"]["kind"] == "UnknownKeyword");

    let (status, _) = call(&router, Method::POST, "/sessions", Some(json!({ "game_name": "no_such_game" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&router, Method::POST, "/sessions", Some(json!({}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&router, Method::POST, "/sessions", Some(json!({ "game_name": "hex", "seats": ["human", "wizard"] }))).await;
    assert!(status.is_client_error());

    let (id, _) = create(&router, json!({ "game_name": "hex" })).await;
    let (status, v) = call(&router, Method::POST, &format!("/sessions/{id}/actions"), Some(json!({ "bogus": true }))).await;
    assert!(status.is_client_error() && status != StatusCode::CONFLICT, "{status} {v}");
    let (status, v) = call(&router, Method::POST, &format!("/sessions/{id}/agent-move"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"]["kind"], "HumanSeat");
}

#[tokio::test]
async fn validation_failures_list_their_issues() {
    let (_, router) = app();
    let text = corpus::source("tic_tac_toe").unwrap().replace("(place \"stone\"", "(place \"ghost\"");
    assert_ne!(text, corpus::source("tic_tac_toe").unwrap());
    let (status, v) = call(&router, Method::POST, "/sessions", Some(json!({ "game_text": text }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert!(v["error"]["message"].as_str().unwrap().contains("ghost"), "{v}");
}

#[tokio::test]
async fn games_endpoint_lists_the_corpus_and_extra_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("my_variant.ldx"), corpus::source("tic_tac_toe").unwrap()).unwrap();
    let state = AppState::new(Duration::from_secs(60), Some(dir.path().to_path_buf()));
    let router = server::router(state);
    let (status, v) = call(&router, Method::GET, "/games", None).await;
    assert_eq!(status, StatusCode::OK);
    let names: Vec<&str> = v["games"].as_array().unwrap().iter().map(|g| g["name"].as_str().unwrap()).collect();
    for g in corpus::BOARD_GAMES {
        assert!(names.contains(g));
    }
    assert!(names.contains(&"my_variant"));
    let (_, v) = create(&router, json!({ "game_name": "my_variant" })).await;
    assert_eq!(v["state"]["cells"].as_array().unwrap().len(), 9);
}

#[tokio::test]
async fn idle_sessions_are_evicted() {
    let state = AppState::new(Duration::from_secs(10), None);
    let router = server::router(state.clone());
    let (old, _) = create(&router, json!({ "game_name": "hex" })).await;
    let (_fresh, _) = create(&router, json!({ "game_name": "hex" })).await;
    assert_eq!(state.store.evict_idle(Instant::now()), 0);
    state.store.get(&old).unwrap().lock().unwrap().last_active -= Duration::from_secs(11);
    assert_eq!(state.store.evict_idle(Instant::now()), 1);
    assert_eq!(state.store.len(), 1);
    let (status, _) = call(&router, Method::GET, &format!("/sessions/{old}/state"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn snapshots_restore_sessions() {
    let (state, router) = app();
    let (id, _) = create(&router, json!({ "game_name": "connect_four", "seats": ["mcts:20", "random"], "seed": 9 })).await;
    for _ in 0..6 {
        call(&router, Method::POST, &format!("/sessions/{id}/agent-move"), None).await;
    }
    let (_, before) = call(&router, Method::GET, &format!("/sessions/{id}/state"), None).await;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.json");
    server::save_snapshot(&state, &path).unwrap();

    let restored = AppState::new(Duration::from_secs(3600), None);
    assert!(server::load_snapshot(&restored, &path).unwrap().is_empty());
    let router2 = server::router(restored);
    let (status, after) = call(&router2, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after, before);

    // The agent continues identically after a restore.
    let (_, a) = call(&router, Method::POST, &format!("/sessions/{id}/agent-move"), None).await;
    let (_, b) = call(&router2, Method::POST, &format!("/sessions/{id}/agent-move"), None).await;
    assert_eq!(a, b);
}
