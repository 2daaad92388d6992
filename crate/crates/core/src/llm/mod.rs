//! Language-model plumbing for the evolution engine.
//!
//! The engine talks to a [`Provider`], which turns a [`CompletionRequest`]
//! into free-form text. Three interchangeable implementations exist: a live
//! HTTP client (in the companion binary crate), a [`ReplayProvider`] that
//! replays a recorded transcript, and an [`OfflineMutator`] that synthesizes
//! plausible responses from seeded randomness so whole runs work with no
//! network at all.
//!
//! Requests carry their inputs both as rendered chat messages and as
//! structured [`RequestContext`] data. Providers that actually understand
//! language read the messages; the offline mutator reads the context, so it
//! never has to parse its own prompts.

mod extract;
mod offline;
mod prompt;
mod replay;

pub use extract::extract_rule;
pub use offline::{offline_response, OfflineMutator};
pub use prompt::{render_prompt, PromptBundle, RenderError, SourceInfo, StageData};
pub use replay::ReplayProvider;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// What stage of the evolution loop a request belongs to.
///
/// Generation kinds (`Init`, `Crossover`, `Mutate`) expect a rule expression
/// back; reflection kinds expect prose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RequestKind {
    /// Produce a fresh rule from the seed heuristics.
    Init,
    /// Compare two parents and explain the fitness gap.
    CoReflect,
    /// Compare a rule before and after an edit.
    SelfReflect,
    /// Condense recent reflections into durable guidance.
    Collective,
    /// Merge two parents into one offspring rule.
    Crossover,
    /// Produce a variant of the elite rule.
    Mutate,
}

impl RequestKind {
    /// Stable lowercase name, used in transcripts and error messages.
    pub fn as_str(self) -> &'static str {
        match self {
            RequestKind::Init => "init",
            RequestKind::CoReflect => "co_reflect",
            RequestKind::SelfReflect => "self_reflect",
            RequestKind::Collective => "collective",
            RequestKind::Crossover => "crossover",
            RequestKind::Mutate => "mutate",
        }
    }

    /// True for kinds whose response is parsed as a rule expression.
    pub fn expects_rule(self) -> bool {
        matches!(
            self,
            RequestKind::Init | RequestKind::Crossover | RequestKind::Mutate
        )
    }
}

impl core::fmt::Display for RequestKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Who authored a chat message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Role {
    System,
    User,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
        }
    }
}

/// One chat message in a completion request.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message {
            role: Role::User,
            content: content.into(),
        }
    }
}

/// Structured inputs mirrored alongside the rendered messages.
///
/// `sources` holds the rule texts the request builds on, ordered the same
/// way the prompt presents them (better parent first for pair stages).
/// `improved` is set for self-reflection and records which branch applies.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RequestContext {
    pub sources: Vec<String>,
    pub improved: Option<bool>,
}

/// Everything a provider needs to answer one request.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRequest {
    pub kind: RequestKind,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub context: RequestContext,
}

/// Why a provider call failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    /// A replay ran past the end of its transcript. Fatal: the recorded run
    /// and the current run have diverged and replaying further is
    /// meaningless.
    #[error("transcript exhausted: request {index} has no recorded response")]
    TranscriptExhausted { index: usize },
    /// A replayed response was recorded for a different stage than the one
    /// now asking. Fatal for the same reason as exhaustion.
    #[error("transcript entry {index} was recorded for a {found} request, expected {expected}")]
    KindMismatch {
        index: usize,
        expected: &'static str,
        found: String,
    },
    /// A transient transport failure: connection refused, HTTP error
    /// status, unparseable response body. Retryable.
    #[error("{message}")]
    Transport { message: String },
}

impl ProviderError {
    /// Fatal errors abort the run; the rest are retried and then degraded.
    pub fn is_fatal(&self) -> bool {
        matches!(
            self,
            ProviderError::TranscriptExhausted { .. } | ProviderError::KindMismatch { .. }
        )
    }
}

/// A source of completions: live API, transcript replay, or offline mutator.
pub trait Provider {
    /// Short name recorded in transcripts ("offline", "replay", a model id).
    fn name(&self) -> &str;

    /// Answer one request. Errors flagged fatal by
    /// [`ProviderError::is_fatal`] abort the run; others are retried.
    fn complete(&mut self, request: &CompletionRequest) -> Result<String, ProviderError>;
}

/// One request/response pair as recorded in a run transcript.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChatExchange {
    pub kind: RequestKind,
    /// Provider identity: a model name for the live provider, "offline" or
    /// "replay" otherwise.
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<Message>,
    pub response: String,
    /// Wall time across all attempts; 0 where no clock is available.
    pub latency_ms: u64,
    /// How many attempts the call took, counting the successful one.
    pub attempts: u32,
    /// Set when every attempt failed and the stage degraded to an empty
    /// response; holds the last error text.
    pub error: Option<String>,
}

/// How many times a retryable provider failure is attempted before the
/// stage degrades.
pub const PROVIDER_ATTEMPTS: u32 = 3;

/// The result of a completion call after retry handling.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionOutcome {
    /// Response text; empty when every attempt failed.
    pub response: String,
    pub attempts: u32,
    /// Last error text when the call degraded, `None` on success.
    pub error: Option<String>,
}

/// Call the provider with up to [`PROVIDER_ATTEMPTS`] tries.
///
/// Fatal errors are returned immediately. If every attempt fails with a
/// retryable error the outcome degrades to an empty response and carries
/// the last error text, so the caller can mark the affected offspring
/// invalid and keep going.
pub fn complete_with_retries(
    provider: &mut dyn Provider,
    request: &CompletionRequest,
) -> Result<CompletionOutcome, ProviderError> {
    let mut last_error = None;
    for attempt in 1..=PROVIDER_ATTEMPTS {
        match provider.complete(request) {
            Ok(response) => {
                return Ok(CompletionOutcome {
                    response,
                    attempts: attempt,
                    error: None,
                })
            }
            Err(err) if err.is_fatal() => return Err(err),
            Err(err) => last_error = Some(err),
        }
    }
    Ok(CompletionOutcome {
        response: String::new(),
        attempts: PROVIDER_ATTEMPTS,
        error: last_error.map(|err| err.to_string()),
    })
}
