//! Chat-completion client for OpenAI-compatible endpoints.

use super::prompt::{Part, Prompt, Role};
use super::EvalError;
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Reasoning {
    High,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    /// Full chat-completions URL.
    pub url: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    #[serde(default)]
    pub auth_env: Option<String>,
    #[serde(default = "default_max_tokens")]
    pub max_output_tokens: u32,
    #[serde(default)]
    pub reasoning: Reasoning,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    /// Shell command converting `{input}` (SVG) to `{output}` (PNG).
    #[serde(default)]
    pub rasterize_cmd: Option<String>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub initial_backoff_ms: u64,
    #[serde(default = "default_timeout")]
    pub timeout_s: u64,
}

fn default_max_tokens() -> u32 {
    16_384
}
fn default_concurrency() -> usize {
    4
}
fn default_retries() -> u32 {
    4
}
fn default_backoff() -> u64 {
    1_000
}
fn default_timeout() -> u64 {
    600
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            model: model.into(),
            auth_env: None,
            max_output_tokens: default_max_tokens(),
            reasoning: Reasoning::None,
            concurrency: default_concurrency(),
            rasterize_cmd: None,
            max_retries: default_retries(),
            initial_backoff_ms: default_backoff(),
            timeout_s: default_timeout(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| EvalError::Config(format!("`{}`: {}", e.path(), e.inner())))
    }
}

/// What came back from one completion request.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelReply {
    pub text: String,
    pub reasoning: Option<String>,
    pub latency_ms: u64,
    /// The response hit the output-token limit.
    pub truncated: bool,
    pub retries: u32,
}

pub struct ModelClient {
    http: reqwest::Client,
    cfg: EndpointConfig,
    token: Option<String>,
    images: PathBuf,
}

impl ModelClient {
    /// `images` is the directory holding `<instance id>.svg`.
    pub fn new(cfg: EndpointConfig, images: impl Into<PathBuf>) -> Result<Self, EvalError> {
        let token = match &cfg.auth_env {
            Some(var) => Some(std::env::var(var).map_err(|_| EvalError::Config(format!("environment variable {var} is not set")))?),
            None => None,
        };
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_s))
            .build()
            .map_err(|e| EvalError::Transport(e.to_string()))?;
        Ok(ModelClient {
            http,
            cfg,
            token,
            images: images.into(),
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.cfg
    }

    async fn image_url(&self, instance_id: &str) -> Result<String, EvalError> {
        let svg = self.images.join(format!("{instance_id}.svg"));
        let (bytes, mime) = match &self.cfg.rasterize_cmd {
            Some(cmd) => (rasterize(cmd, &svg).await?, "image/png"),
            None => (
                tokio::fs::read(&svg)
                    .await
                    .map_err(|e| EvalError::Io(format!("{}: {e}", svg.display())))?,
                "image/svg+xml",
            ),
        };
        let b64 = base64::engine::general_purpose::STANDARD.encode(bytes);
        Ok(format!("data:{mime};base64,{b64}"))
    }

    async fn body(&self, prompt: &Prompt) -> Result<Value, EvalError> {
        let mut messages = Vec::new();
        for m in &prompt.messages {
            let role = match m.role {
                Role::System => "system",
                Role::User => "user",
                Role::Assistant => "assistant",
            };
            let mut content = Vec::new();
            for p in &m.parts {
                content.push(match p {
                    Part::Text { text } => json!({"type": "text", "text": text}),
                    Part::Image { instance_id } => {
                        json!({"type": "image_url", "image_url": {"url": self.image_url(instance_id).await?}})
                    }
                });
            }
            messages.push(json!({"role": role, "content": content}));
        }
        let mut body = json!({
            "model": self.cfg.model,
            "messages": messages,
            "max_tokens": self.cfg.max_output_tokens,
        });
        if self.cfg.reasoning == Reasoning::High {
            body["reasoning_effort"] = json!("high");
        }
        Ok(body)
    }

    /// Send one prompt, retrying 429/5xx and transport failures with
    /// exponential backoff.
    pub async fn complete(&self, prompt: &Prompt, request_id: &str) -> Result<ModelReply, EvalError> {
        let body = self.body(prompt).await?;
        let start = Instant::now();
        let mut last = String::new();
        for attempt in 0..=self.cfg.max_retries {
            if attempt > 0 {
                let wait = self.cfg.initial_backoff_ms.saturating_mul(1 << (attempt - 1).min(16));
                tokio::time::sleep(Duration::from_millis(wait)).await;
            }
            let mut req = self.http.post(&self.cfg.url).header("x-request-id", request_id).json(&body);
            if let Some(t) = &self.token {
                req = req.bearer_auth(t);
            }
            let resp = match req.send().await {
                Ok(r) => r,
                Err(e) => {
                    last = e.to_string();
                    tracing::warn!(request_id, attempt, error = %e, "transport failure");
                    continue;
                }
            };
            let status = resp.status();
            if status.as_u16() == 429 || status.is_server_error() {
                last = format!("HTTP {status}");
                tracing::warn!(request_id, attempt, %status, "retryable status");
                continue;
            }
            let text = resp.text().await.map_err(|e| EvalError::Transport(e.to_string()))?;
            if !status.is_success() {
                return Err(EvalError::Http {
                    status: status.as_u16(),
                    body: text.chars().take(500).collect(),
                });
            }
            let value: Value = serde_json::from_str(&text).map_err(|e| EvalError::Response(e.to_string()))?;
            let mut reply = read_reply(&value)?;
            reply.latency_ms = start.elapsed().as_millis() as u64;
            reply.retries = attempt;
            return Ok(reply);
        }
        Err(EvalError::Transport(format!(
            "gave up after {} retries: {last}",
            self.cfg.max_retries
        )))
    }
}

fn content_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(parts) => Some(
            parts
                .iter()
                .filter_map(|p| p.get("text").and_then(Value::as_str))
                .collect::<Vec<_>>()
                .join(""),
        ),
        _ => None,
    }
}

fn read_reply(v: &Value) -> Result<ModelReply, EvalError> {
    let choice = v
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| EvalError::Response("no choices in response".into()))?;
    let msg = &choice["message"];
    let text = content_text(&msg["content"]).unwrap_or_default();
    let reasoning = ["reasoning_content", "reasoning"]
        .iter()
        .find_map(|k| msg.get(*k).and_then(content_text))
        .filter(|s| !s.is_empty());
    Ok(ModelReply {
        text,
        reasoning,
        latency_ms: 0,
        truncated: choice.get("finish_reason").and_then(Value::as_str) == Some("length"),
        retries: 0,
    })
}

async fn rasterize(cmd: &str, svg: &Path) -> Result<Vec<u8>, EvalError> {
    let dir = tempfile_dir()?;
    let out = dir.join("image.png");
    let line = cmd
        .replace("{input}", &svg.display().to_string())
        .replace("{output}", &out.display().to_string());
    let status = tokio::process::Command::new("sh")
        .arg("-c")
        .arg(&line)
        .status()
        .await
        .map_err(|e| EvalError::Io(format!("rasterizer: {e}")))?;
    if !status.success() {
        return Err(EvalError::Io(format!("rasterizer exited with {status}")));
    }
    let bytes = tokio::fs::read(&out).await.map_err(|e| EvalError::Io(format!("{}: {e}", out.display())));
    let _ = tokio::fs::remove_dir_all(&dir).await;
    bytes
}

fn tempfile_dir() -> Result<PathBuf, EvalError> {
    let dir = std::env::temp_dir().join(format!("polarbench-raster-{}", uuid::Uuid::new_v4()));
    std::fs::create_dir_all(&dir).map_err(|e| EvalError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}
