use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use confound_cli::service::{router, ServiceOptions};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(ServiceOptions {
        workers: 2,
        ..ServiceOptions::default()
    })
}

async fn call(app: Router, method: Method, uri: &str, body: &str) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let res = app.oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

async fn simulate(body: Value) -> (StatusCode, Value) {
    let (status, bytes) = call(app(), Method::POST, "/simulate", &body.to_string()).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn without_wall_time(mut v: Value) -> Value {
    match &mut v {
        Value::Object(m) => {
            m.remove("wall_time_ms");
        }
        Value::Array(items) => {
            for item in items {
                if let Value::Object(m) = item {
                    m.remove("wall_time_ms");
                }
            }
        }
        _ => {}
    }
    v
}

#[tokio::test]
async fn health_is_ok_and_stable() {
    let (s1, b1) = call(app(), Method::GET, "/health", "").await;
    let (s2, b2) = call(app(), Method::GET, "/health", "").await;
    assert_eq!(s1, StatusCode::OK);
    assert_eq!(b1, b"ok");
    assert_eq!((s1, b1), (s2, b2));
}

#[tokio::test]
async fn null_configuration_is_calibrated() {
    let (status, v) = simulate(json!({
        "n_per_group": 20, "d_manip": 0.0, "d_conf": 0.0, "r": 0.75,
        "n_replicates": 10000, "seed": 5, "request_id": "null-run"
    }))
    .await;
    assert_eq!(status, StatusCode::OK);
    for key in ["flag_rate", "naive_power_or_type1", "adjusted_power_or_type1"] {
        let rate = v[key].as_f64().unwrap();
        assert!((rate - 0.05).abs() < 0.01, "{key} {rate}");
    }
    assert_eq!(v["request_id"], "null-run");
    assert_eq!(v["config"]["n_replicates"], 10000);
    assert!(v["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[tokio::test]
async fn reference_configuration_flags_unnecessarily() {
    let (status, v) = simulate(json!({
        "n_per_group": 20, "d_manip": 2.0, "d_conf": 1.0, "r": 0.75, "n_replicates": 4000, "seed": 3
    }))
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!(v["unnecessary_flag_rate"].as_f64().unwrap() > 0.5);
    assert_eq!(v["request_id"], Value::Null);
}

#[tokio::test]
async fn invalid_field_is_named() {
    let (status, v) = simulate(json!({"r": 1.5})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "r");
    assert!(v["error"]["message"].as_str().unwrap().contains("1.5"));

    let (status, v) = simulate(json!({"n_per_group": 20, "effect": 2})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "effect");

    let (status, v) = simulate(json!({"n_per_group": "many"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "n_per_group");

    let (status, v) = simulate(json!({"grid_axis": "d_conf", "grid_values": [0.0, 9.0], "r": 0.5, "n_replicates": 10, "alpha_balance": 0.0})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "alpha_balance");

    let (status, bytes) = call(app(), Method::POST, "/simulate", "{oops").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["error"]["field"], Value::Null);
}

#[tokio::test]
async fn replicate_cap_is_enforced() {
    let (status, v) = simulate(json!({"n_replicates": 100001})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["field"], "n_replicates");
    let (status, _) = simulate(json!({"n_replicates": 60000, "grid_axis": "r", "grid_values": [0.0, 0.5]})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let small = router(ServiceOptions {
        workers: 1,
        max_replicates: 50,
        cors: false,
    });
    let (status, _) = call(small, Method::POST, "/simulate", r#"{"n_replicates": 51}"#).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn grid_returns_one_summary_per_value() {
    let (status, v) = simulate(json!({
        "n_replicates": 500, "grid_axis": "d_conf", "grid_values": [0.0, 1.0, 2.0], "request_id": "g"
    }))
    .await;
    assert_eq!(status, StatusCode::OK);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 3);
    for (item, d) in items.iter().zip([0.0, 1.0, 2.0]) {
        assert_eq!(item["config"]["d_conf"], d);
        assert_eq!(item["request_id"], "g");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_identical_requests_match_serial_answer() {
    let body = json!({"n_replicates": 3000, "seed": 17, "d_conf": 0.5}).to_string();
    let (_, serial) = call(app(), Method::POST, "/simulate", &body).await;
    let serial = without_wall_time(serde_json::from_slice(&serial).unwrap());
    let shared = app();
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let app = shared.clone();
            let body = body.clone();
            tokio::spawn(async move { call(app, Method::POST, "/simulate", &body).await })
        })
        .collect();
    for h in handles {
        let (status, bytes) = h.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        let v = without_wall_time(serde_json::from_slice(&bytes).unwrap());
        assert_eq!(v.to_string(), serial.to_string());
    }
}

#[tokio::test]
async fn cors_headers_only_when_enabled() {
    let preflight = |app: Router| async move {
        let req = Request::builder()
            .method(Method::OPTIONS)
            .uri("/simulate")
            .header(header::ORIGIN, "http://localhost:5173")
            .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
            .body(Body::empty())
            .unwrap();
        app.oneshot(req).await.unwrap()
    };
    let open = router(ServiceOptions {
        cors: true,
        ..ServiceOptions::default()
    });
    let res = preflight(open).await;
    assert!(res.headers().contains_key(header::ACCESS_CONTROL_ALLOW_ORIGIN));
    let res = preflight(app()).await;
    assert!(!res.headers().contains_key(header::ACCESS_CONTROL_ALLOW_ORIGIN));
}
