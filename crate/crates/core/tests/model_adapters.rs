use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;

use conductor_core::tool_registry::{ChatMessage, ChatRequest, EndpointConfig, HttpModelClient, ModelClient};

/// Serves one request with `status` and `body`, returning the request body it saw.
fn serve_once(status: &'static str, body: &'static str) -> (String, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut len = 0usize;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" || line.is_empty() {
                break;
            }
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                len = v.trim().parse().unwrap();
            }
        }
        let mut buf = vec![0; len];
        reader.read_exact(&mut buf).unwrap();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        String::from_utf8(buf).unwrap()
    });
    (url, handle)
}

fn request() -> ChatRequest {
    ChatRequest {
        model: "stub".into(),
        messages: vec![ChatMessage::new("user", "hello")],
    }
}

#[test]
fn http_client_parses_completion() {
    let (url, handle) = serve_once("200 OK", r#"{"content":"hi","usage":{"prompt_tokens":3,"completion_tokens":1}}"#);
    let endpoint = EndpointConfig {
        model: "stub".into(),
        url,
        api_key_env: None,
    };
    let resp = HttpModelClient::default().complete(&endpoint, &request()).unwrap();
    assert_eq!(resp.content, "hi");
    assert_eq!(resp.usage.prompt_tokens, 3);
    assert_eq!(resp.usage.completion_tokens, 1);
    let sent: serde_json::Value = serde_json::from_str(&handle.join().unwrap()).unwrap();
    assert_eq!(sent["model"], "stub");
    assert_eq!(sent["messages"][0]["content"], "hello");
}

#[test]
fn http_client_reports_server_errors() {
    let (url, handle) = serve_once("500 Internal Server Error", "{}");
    let endpoint = EndpointConfig {
        model: "stub".into(),
        url,
        api_key_env: None,
    };
    assert!(HttpModelClient::default().complete(&endpoint, &request()).is_err());
    handle.join().unwrap();
}

#[test]
fn http_client_requires_configured_key_variable() {
    let endpoint = EndpointConfig {
        model: "stub".into(),
        url: "http://127.0.0.1:9/".into(),
        api_key_env: Some("CONDUCTOR_TEST_KEY_THAT_IS_NEVER_SET".into()),
    };
    let err = HttpModelClient::default().complete(&endpoint, &request()).unwrap_err();
    assert!(err.to_string().contains("CONDUCTOR_TEST_KEY_THAT_IS_NEVER_SET"));
}
