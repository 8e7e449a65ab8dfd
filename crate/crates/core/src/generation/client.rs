use std::thread;

use serde::{Deserialize, Serialize};

use super::{GenerationEndpoint, GenerationError, GenerationMode, ParaphraseCandidate, Paraphraser};

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct GenerateRequest {
    pub text: String,
    pub n: usize,
    pub mode: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct GenerateResponse {
    pub candidates: Vec<String>,
}

/// Blocking HTTP client for the `/generate` endpoint.
///
/// Transport failures are retried with exponential backoff; a non-2xx
/// status is returned immediately as [`GenerationError::Service`].
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    endpoint: GenerationEndpoint,
    agent: ureq::Agent,
}

impl HttpGenerator {
    pub fn new(endpoint: GenerationEndpoint) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(endpoint.timeout).build();
        Self { endpoint, agent }
    }

    pub fn endpoint(&self) -> &GenerationEndpoint {
        &self.endpoint
    }

    fn url(&self) -> String {
        format!("{}/generate", self.endpoint.base_url)
    }
}

impl Paraphraser for HttpGenerator {
    fn mode(&self) -> GenerationMode {
        self.endpoint.mode
    }

    fn request_paraphrases(&self, sentence: &str) -> Result<Vec<ParaphraseCandidate>, GenerationError> {
        if sentence.trim().is_empty() {
            return Err(GenerationError::EmptyInput);
        }
        let n = self.endpoint.requested();
        let body = GenerateRequest {
            text: sentence.to_string(),
            n,
            mode: self.endpoint.mode.wire_name().to_string(),
        };
        let mut attempt: u32 = 0;
        let response = loop {
            match self.agent.post(&self.url()).send_json(&body) {
                Ok(r) => break r,
                Err(ureq::Error::Status(status, resp)) => {
                    let body = resp.into_string().unwrap_or_default();
                    return Err(GenerationError::Service { status, body });
                }
                Err(ureq::Error::Transport(t)) => {
                    if attempt >= self.endpoint.max_retries {
                        return Err(GenerationError::Unreachable {
                            url: self.url(),
                            attempts: attempt + 1,
                            message: t.to_string(),
                        });
                    }
                    let delay = self.endpoint.backoff.saturating_mul(1 << attempt.min(16));
                    log::debug!("retrying {} in {:?} after: {t}", self.url(), delay);
                    thread::sleep(delay);
                    attempt += 1;
                }
            }
        };
        let response: GenerateResponse = response
            .into_json()
            .map_err(|e| GenerationError::InvalidResponse(e.to_string()))?;
        if response.candidates.is_empty() {
            return Err(GenerationError::EmptyGeneration);
        }
        let mut candidates = ParaphraseCandidate::ranked(response.candidates);
        candidates.truncate(n);
        Ok(candidates)
    }
}
