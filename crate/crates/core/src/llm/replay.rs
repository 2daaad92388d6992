//! Replaying a recorded transcript as a provider.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{ChatExchange, CompletionRequest, Provider, ProviderError, RequestKind};

/// A provider that answers requests from a recorded transcript, in order.
///
/// Replay is positional: the nth request of the run gets the nth recorded
/// response. Each entry's recorded kind is checked against the incoming
/// request and a mismatch is fatal, because it means the run being replayed
/// into has diverged from the run that produced the transcript.
#[derive(Debug, Clone)]
pub struct ReplayProvider {
    entries: Vec<(RequestKind, String)>,
    cursor: usize,
}

impl ReplayProvider {
    pub fn new(entries: Vec<(RequestKind, String)>) -> Self {
        ReplayProvider { entries, cursor: 0 }
    }

    /// Build a replay from recorded exchanges, keeping kind and response.
    pub fn from_exchanges(exchanges: &[ChatExchange]) -> Self {
        ReplayProvider::new(
            exchanges
                .iter()
                .map(|exchange| (exchange.kind, exchange.response.clone()))
                .collect(),
        )
    }

    /// How many recorded responses have been consumed.
    pub fn position(&self) -> usize {
        self.cursor
    }

    /// How many recorded responses remain.
    pub fn remaining(&self) -> usize {
        self.entries.len() - self.cursor
    }
}

impl Provider for ReplayProvider {
    fn name(&self) -> &str {
        "replay"
    }

    fn complete(&mut self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let index = self.cursor;
        let (kind, response) = self
            .entries
            .get(index)
            .ok_or(ProviderError::TranscriptExhausted { index })?;
        if *kind != request.kind {
            return Err(ProviderError::KindMismatch {
                index,
                expected: request.kind.as_str(),
                found: kind.as_str().to_string(),
            });
        }
        self.cursor += 1;
        Ok(response.clone())
    }
}
