use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use osagent_core::grounding::{Raster, Rgb};
use osagent_core::planner::{BackendConfig, BackendKind, HttpModel, ModelBackend, PromptBundle};

struct Seen {
    auth: Option<String>,
    body: serde_json::Value,
}

/// Answers each connection with the next canned `(status, body)`.
fn stub(replies: Vec<(u16, &'static str)>) -> (String, thread::JoinHandle<Vec<Seen>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/generate", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let mut seen = Vec::new();
        for (status, body) in replies {
            let (stream, _) = listener.accept().unwrap();
            let mut r = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut auth = None;
            loop {
                let mut line = String::new();
                r.read_line(&mut line).unwrap();
                let l = line.trim_end();
                if l.is_empty() {
                    break;
                }
                let lower = l.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = Some(l["authorization:".len()..].trim().to_string());
                }
            }
            let mut buf = vec![0; len];
            r.read_exact(&mut buf).unwrap();
            seen.push(Seen {
                auth,
                body: serde_json::from_slice(&buf).unwrap(),
            });
            let mut w = stream;
            write!(
                w,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
        seen
    });
    (url, handle)
}

fn prompt() -> PromptBundle {
    PromptBundle {
        system: "sys".into(),
        user: "## User Objective\nopen notepad".into(),
        images: vec![Raster::new(4, 3, Rgb(1, 2, 3))],
    }
}

fn config(url: String, auth: Option<&str>) -> BackendConfig {
    BackendConfig {
        kind: BackendKind::HttpModel,
        endpoint: Some(url),
        model: "stub-model".into(),
        auth: auth.map(str::to_string),
        ..BackendConfig::default()
    }
}

#[test]
fn retries_transient_errors_then_reads_text() {
    let (url, h) = stub(vec![(503, "{}"), (200, r#"{"text":"[Decision] DONE"}"#)]);
    std::env::set_var("OSAGENT_TEST_KEY", "sekret");
    let mut m = HttpModel::new(&config(url, Some("OSAGENT_TEST_KEY")))
        .unwrap()
        .with_base_delay(Duration::from_millis(1));
    assert_eq!(m.generate(&prompt()).unwrap(), "[Decision] DONE");
    let seen = h.join().unwrap();
    assert_eq!(seen.len(), 2);
    let b = &seen[1].body;
    assert_eq!(b["model"], "stub-model");
    assert_eq!(b["temperature"], 0.1);
    assert_eq!(b["messages"][0]["content"], "sys");
    assert_eq!(b["messages"][1]["content"][1]["media_type"], "image/png");
    assert_eq!(seen[1].auth.as_deref(), Some("Bearer sekret"));
}

#[test]
fn chat_style_reply_is_accepted() {
    let (url, h) = stub(vec![(200, r#"{"choices":[{"message":{"content":"hello"}}]}"#)]);
    let mut m = HttpModel::new(&config(url, None)).unwrap();
    assert_eq!(m.generate(&prompt()).unwrap(), "hello");
    assert!(h.join().unwrap()[0].auth.is_none());
}

#[test]
fn client_errors_are_not_retried() {
    let (url, h) = stub(vec![(400, "{}")]);
    let mut m = HttpModel::new(&config(url, None))
        .unwrap()
        .with_base_delay(Duration::from_millis(1));
    let e = m.generate(&prompt()).unwrap_err();
    assert!(e.to_string().contains("400"));
    assert_eq!(h.join().unwrap().len(), 1);
}

#[test]
fn persistent_outage_gives_backend_unavailable() {
    let (url, h) = stub(vec![(500, "{}"), (502, "{}"), (429, "{}")]);
    let mut m = HttpModel::new(&config(url, None))
        .unwrap()
        .with_base_delay(Duration::from_millis(1));
    assert!(m.generate(&prompt()).is_err());
    assert_eq!(h.join().unwrap().len(), 3);
}

#[test]
fn missing_credential_variable_fails_without_leaking() {
    let (url, _h) = stub(vec![]);
    let mut m = HttpModel::new(&config(url, Some("OSAGENT_TEST_UNSET_VAR"))).unwrap();
    let e = m.generate(&prompt()).unwrap_err().to_string();
    assert!(e.contains("OSAGENT_TEST_UNSET_VAR"));
}
