//! Provider construction: live chat-completion HTTP client, transcript
//! replay, and the seeded offline mutator.

use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde_json::json;
use shopevo_core::llm::{
    ChatExchange, CompletionRequest, OfflineMutator, Provider, ProviderError, ReplayProvider,
};
use shopevo_core::seed::{derive_seed, stream};

use crate::config::{ProviderKind, RunConfig};

/// Builds the provider named by the config. The offline mutator is seeded
/// from the run's root seed; replay needs a transcript path; live needs a
/// base URL, a model, and an API key in the configured environment variable.
pub fn build_provider(cfg: &RunConfig) -> Result<Box<dyn Provider>> {
    match cfg.provider {
        ProviderKind::Offline => Ok(Box::new(OfflineMutator::new(derive_seed(
            cfg.seed,
            stream::PROVIDER,
            0,
        )))),
        ProviderKind::Replay => {
            let Some(path) = &cfg.transcript else {
                bail!("provider `replay` needs --transcript pointing at a recorded run");
            };
            let exchanges = read_transcript(Path::new(path))?;
            Ok(Box::new(ReplayProvider::from_exchanges(&exchanges)))
        }
        ProviderKind::Live => {
            if cfg.base_url.is_empty() {
                bail!("provider `live` needs a base URL (--base-url or LLM_BASE_URL)");
            }
            if cfg.model.is_empty() {
                bail!("provider `live` needs a model name (--model or LLM_MODEL)");
            }
            let api_key = std::env::var(&cfg.api_key_env).with_context(|| {
                format!("provider `live` needs an API key in ${}", cfg.api_key_env)
            })?;
            Ok(Box::new(HttpProvider::new(
                cfg.base_url.clone(),
                cfg.model.clone(),
                api_key,
            )?))
        }
    }
}

/// Reads a transcript file: one JSON exchange per line.
pub fn read_transcript(path: &Path) -> Result<Vec<ChatExchange>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading transcript {}", path.display()))?;
    let mut exchanges = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let exchange: ChatExchange = serde_json::from_str(line)
            .with_context(|| format!("{}: bad exchange on line {}", path.display(), index + 1))?;
        exchanges.push(exchange);
    }
    Ok(exchanges)
}

/// Blocking client for a chat-completion endpoint.
///
/// Sends `POST {base_url}/chat/completions` with `{model, temperature,
/// messages}` and takes the first choice's message content. Transport and
/// HTTP errors are retryable; the engine retries three times and then
/// degrades the stage to an empty response.
pub struct HttpProvider {
    client: reqwest::blocking::Client,
    base_url: String,
    model: String,
    api_key: String,
}

impl HttpProvider {
    pub fn new(base_url: String, model: String, api_key: String) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .context("building HTTP client")?;
        Ok(HttpProvider {
            client,
            base_url,
            model,
            api_key,
        })
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

fn transport(message: String) -> ProviderError {
    ProviderError::Transport { message }
}

impl Provider for HttpProvider {
    fn name(&self) -> &str {
        &self.model
    }

    fn complete(&mut self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let messages: Vec<serde_json::Value> = request
            .messages
            .iter()
            .map(|m| json!({"role": m.role.as_str(), "content": m.content}))
            .collect();
        let body = json!({
            "model": self.model,
            "temperature": request.temperature,
            "messages": messages,
        });
        let response = self
            .client
            .post(self.endpoint())
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| transport(format!("request failed: {e}")))?;

        let status = response.status();
        let text = response
            .text()
            .map_err(|e| transport(format!("reading response body: {e}")))?;
        if status.as_u16() == 429 {
            return Err(transport(
                "HTTP 429: rate limited or out of quota".to_string(),
            ));
        }
        if !status.is_success() {
            let snippet: String = text.chars().take(200).collect();
            return Err(transport(format!("HTTP {status}: {snippet}")));
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| transport(format!("response is not JSON: {e}")))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| transport("response has no message content".to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shopevo_core::llm::{Message, RequestContext, RequestKind};
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::thread;

    fn request() -> CompletionRequest {
        CompletionRequest {
            kind: RequestKind::Init,
            messages: vec![Message::system("sys"), Message::user("write a rule")],
            temperature: 1.0,
            context: RequestContext::default(),
        }
    }

    /// Serves canned HTTP responses, one per accepted connection, and
    /// returns the raw request bodies it saw.
    fn serve(responses: Vec<String>) -> (String, thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = thread::spawn(move || {
            let mut seen = Vec::new();
            for body in responses {
                let (mut socket, _) = listener.accept().unwrap();
                let mut buf = vec![0u8; 65536];
                let mut request = Vec::new();
                loop {
                    let n = socket.read(&mut buf).unwrap();
                    request.extend_from_slice(&buf[..n]);
                    let text = String::from_utf8_lossy(&request);
                    if let Some(split) = text.find("\r\n\r\n") {
                        let header = &text[..split];
                        let length: usize = header
                            .lines()
                            .find_map(|l| l.to_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse().unwrap()))
                            .unwrap_or(0);
                        if text.len() >= split + 4 + length {
                            break;
                        }
                    }
                }
                seen.push(String::from_utf8_lossy(&request).into_owned());
                socket.write_all(body.as_bytes()).unwrap();
            }
            seen
        });
        (format!("http://{addr}"), handle)
    }

    fn http_response(status: &str, body: &str) -> String {
        format!(
            "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
            body.len()
        )
    }

    #[test]
    fn live_provider_posts_chat_payload_and_reads_first_choice() {
        let body = r#"{"choices":[{"message":{"role":"assistant","content":"-PT / TWKR"}}]}"#;
        let (url, handle) = serve(vec![http_response("200 OK", body)]);
        let mut provider = HttpProvider::new(url, "test-model".into(), "k".into()).unwrap();
        let reply = provider.complete(&request()).unwrap();
        assert_eq!(reply, "-PT / TWKR");

        let seen = handle.join().unwrap();
        assert!(seen[0].starts_with("POST /chat/completions"));
        assert!(seen[0].contains("authorization: Bearer k") || seen[0].contains("Authorization: Bearer k"));
        let payload_start = seen[0].find("\r\n\r\n").unwrap() + 4;
        let payload: serde_json::Value = serde_json::from_str(&seen[0][payload_start..]).unwrap();
        assert_eq!(payload["model"], "test-model");
        assert_eq!(payload["temperature"], 1.0);
        assert_eq!(payload["messages"][0]["role"], "system");
        assert_eq!(payload["messages"][1]["content"], "write a rule");
    }

    #[test]
    fn rate_limiting_is_a_retryable_quota_error() {
        let (url, handle) = serve(vec![http_response("429 Too Many Requests", "{}")]);
        let mut provider = HttpProvider::new(url, "m".into(), "k".into()).unwrap();
        let err = provider.complete(&request()).unwrap_err();
        assert!(!err.is_fatal());
        assert!(err.to_string().contains("quota"), "{err}");
        handle.join().unwrap();
    }

    #[test]
    fn malformed_payloads_are_transport_errors() {
        let (url, handle) = serve(vec![http_response("200 OK", r#"{"choices":[]}"#)]);
        let mut provider = HttpProvider::new(url, "m".into(), "k".into()).unwrap();
        let err = provider.complete(&request()).unwrap_err();
        assert!(!err.is_fatal());
        assert!(err.to_string().contains("no message content"));
        handle.join().unwrap();
    }

    #[test]
    fn provider_factory_checks_required_settings() {
        let offline = build_provider(&RunConfig::default()).unwrap();
        assert_eq!(offline.name(), "offline");

        let replay = RunConfig {
            provider: ProviderKind::Replay,
            ..RunConfig::default()
        };
        assert!(build_provider(&replay).is_err());

        let live = RunConfig {
            provider: ProviderKind::Live,
            ..RunConfig::default()
        };
        assert!(build_provider(&live).is_err());
    }
}
