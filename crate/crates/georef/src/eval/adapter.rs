//! Model adapters and the wire protocol.
//!
//! One request/response document pair serves both transports: line-
//! delimited JSON over a child process's stdio, or an HTTP POST of the
//! same document to `/v1/answer`. See `docs/adapter-protocol.md`.

use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShotDoc {
    pub question: String,
    pub image_path: String,
    pub answer: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistoryTurn {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecodingHint {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for DecodingHint {
    fn default() -> Self {
        Self { temperature: 0.0, max_tokens: 1024 }
    }
}

/// The request document an adapter receives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRequest {
    pub id: String,
    pub question: String,
    pub image_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_svg: Option<String>,
    pub system: String,
    pub shots: Vec<ShotDoc>,
    pub history: Vec<HistoryTurn>,
    #[serde(default)]
    pub decoding_hint: DecodingHint,
}

/// The response document an adapter returns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelResponse {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("timeout waiting for the model")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("invalid adapter spec: {0}")]
    BadSpec(String),
}

/// An answer-producing model behind some transport.
pub trait AnswerModel: Send + Sync {
    fn name(&self) -> String;
    fn answer(&self, req: &ModelRequest) -> Result<String, AdapterError>;
}

fn backoff(attempt: u32) {
    let ms = 100u64.saturating_mul(1 << attempt.min(6));
    std::thread::sleep(Duration::from_millis(ms));
}

struct ChildHandle {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Drop for ChildHandle {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Adapter speaking line-delimited JSON over a child process's stdio. The
/// child is spawned once and reused; a timeout kills and respawns it.
pub struct SubprocessAdapter {
    command: Vec<String>,
    timeout: Duration,
    max_retries: u32,
    child: Mutex<Option<ChildHandle>>,
}

impl SubprocessAdapter {
    pub fn new(command_line: &str, timeout: Duration, max_retries: u32) -> Result<Self, AdapterError> {
        let command: Vec<String> = command_line.split_whitespace().map(String::from).collect();
        if command.is_empty() {
            return Err(AdapterError::BadSpec("empty command".into()));
        }
        Ok(Self { command, timeout, max_retries, child: Mutex::new(None) })
    }

    fn spawn(&self) -> Result<ChildHandle, AdapterError> {
        let mut child = Command::new(&self.command[0])
            .args(&self.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| AdapterError::Transport(format!("spawn {}: {e}", self.command[0])))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = channel();
        std::thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ChildHandle { child, stdin, lines: rx })
    }

    fn round_trip(&self, req: &ModelRequest) -> Result<String, AdapterError> {
        let mut guard = self.child.lock().expect("adapter lock");
        if guard.is_none() {
            *guard = Some(self.spawn()?);
        }
        let handle = guard.as_mut().expect("child present");
        let doc = serde_json::to_string(req).expect("request serializes");
        if let Err(e) = writeln!(handle.stdin, "{doc}").and_then(|_| handle.stdin.flush()) {
            *guard = None;
            return Err(AdapterError::Transport(format!("write to child: {e}")));
        }
        let deadline = std::time::Instant::now() + self.timeout;
        loop {
            let remaining = deadline.saturating_duration_since(std::time::Instant::now());
            if remaining.is_zero() {
                *guard = None;
                return Err(AdapterError::Timeout);
            }
            match handle.lines.recv_timeout(remaining) {
                Ok(Ok(line)) => {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let resp: ModelResponse = serde_json::from_str(&line)
                        .map_err(|e| AdapterError::MalformedResponse(e.to_string()))?;
                    if resp.id != req.id {
                        return Err(AdapterError::MalformedResponse(format!(
                            "response id {} does not match request id {}",
                            resp.id, req.id
                        )));
                    }
                    return Ok(resp.text);
                }
                Ok(Err(e)) => {
                    *guard = None;
                    return Err(AdapterError::Transport(format!("read from child: {e}")));
                }
                Err(RecvTimeoutError::Timeout) => {
                    *guard = None;
                    return Err(AdapterError::Timeout);
                }
                Err(RecvTimeoutError::Disconnected) => {
                    *guard = None;
                    return Err(AdapterError::Transport("child closed its stdout".into()));
                }
            }
        }
    }
}

impl AnswerModel for SubprocessAdapter {
    fn name(&self) -> String {
        format!("cmd:{}", self.command.join(" "))
    }

    fn answer(&self, req: &ModelRequest) -> Result<String, AdapterError> {
        let mut last = AdapterError::Timeout;
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                backoff(attempt - 1);
            }
            match self.round_trip(req) {
                Ok(text) => return Ok(text),
                Err(e @ AdapterError::Timeout) | Err(e @ AdapterError::Transport(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }
}

/// Adapter POSTing the request document to an HTTP endpoint. A bare host
/// URL gets the standard `/v1/answer` path appended.
pub struct HttpAdapter {
    url: String,
    client: reqwest::blocking::Client,
    max_retries: u32,
}

impl HttpAdapter {
    pub fn new(endpoint: &str, timeout: Duration, max_retries: u32) -> Result<Self, AdapterError> {
        let parsed: reqwest::Url = endpoint
            .parse()
            .map_err(|e| AdapterError::BadSpec(format!("{endpoint}: {e}")))?;
        let url = if parsed.path() == "/" || parsed.path().is_empty() {
            format!("{}/v1/answer", endpoint.trim_end_matches('/'))
        } else {
            endpoint.to_string()
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| AdapterError::Transport(e.to_string()))?;
        Ok(Self { url, client, max_retries })
    }

    fn round_trip(&self, req: &ModelRequest) -> Result<String, AdapterError> {
        let resp = self
            .client
            .post(&self.url)
            .json(req)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    AdapterError::Timeout
                } else {
                    AdapterError::Transport(e.to_string())
                }
            })?;
        if !resp.status().is_success() {
            return Err(AdapterError::Transport(format!("HTTP {}", resp.status())));
        }
        let doc: ModelResponse = resp
            .json()
            .map_err(|e| AdapterError::MalformedResponse(e.to_string()))?;
        if doc.id != req.id {
            return Err(AdapterError::MalformedResponse(format!(
                "response id {} does not match request id {}",
                doc.id, req.id
            )));
        }
        Ok(doc.text)
    }
}

impl AnswerModel for HttpAdapter {
    fn name(&self) -> String {
        self.url.clone()
    }

    fn answer(&self, req: &ModelRequest) -> Result<String, AdapterError> {
        let mut last = AdapterError::Timeout;
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                backoff(attempt - 1);
            }
            match self.round_trip(req) {
                Ok(text) => return Ok(text),
                Err(e @ AdapterError::Timeout) | Err(e @ AdapterError::Transport(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }
}
