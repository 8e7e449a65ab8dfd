//! Deterministic stand-in for the generation service.
//!
//! Responses come from a fixture map (input text to candidate list). Inputs
//! missing from the map get a 404 unless a seed is configured, in which case
//! the service synthesizes candidates by shuffling the input's words with a
//! generator seeded from the seed and the input text.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::thread::JoinHandle;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::client::{GenerateRequest, GenerateResponse};
use super::GenerationMode;

#[derive(Debug, Error)]
pub enum MockServiceError {
    #[error("cannot read fixtures: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixtures are not a JSON object of string lists: {0}")]
    Fixtures(#[from] serde_json::Error),
    #[error("cannot bind mock server: {0}")]
    Bind(String),
}

#[derive(Debug, Clone, Default)]
pub struct MockService {
    fixtures: BTreeMap<String, Vec<String>>,
    seed: Option<u64>,
}

impl MockService {
    pub fn new(fixtures: BTreeMap<String, Vec<String>>) -> Self {
        Self { fixtures, seed: None }
    }

    pub fn from_json(json: &str) -> Result<Self, MockServiceError> {
        Ok(Self::new(serde_json::from_str(json)?))
    }

    pub fn from_path(path: &Path) -> Result<Self, MockServiceError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Enables synthesized responses for inputs without a fixture.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn fixtures(&self) -> &BTreeMap<String, Vec<String>> {
        &self.fixtures
    }

    /// Handles one request body, returning `(status, json body)`.
    pub fn respond(&self, body: &str) -> (u16, String) {
        let request: GenerateRequest = match serde_json::from_str(body) {
            Ok(r) => r,
            Err(e) => return (400, error_body(&format!("bad request: {e}"))),
        };
        let Some(mode) = GenerationMode::from_wire(&request.mode) else {
            return (400, error_body(&format!("unknown mode {:?}", request.mode)));
        };
        if request.n == 0 {
            return (400, error_body("n must be positive"));
        }
        let n = match mode {
            GenerationMode::Hb => 1,
            GenerationMode::Cg => request.n,
        };
        let candidates = match self.fixtures.get(request.text.trim()) {
            Some(list) => list.iter().take(n).cloned().collect(),
            None => match self.seed {
                Some(seed) => synthesize(&request.text, n, seed),
                None => return (404, error_body(&format!("no fixture for {:?}", request.text))),
            },
        };
        let response = GenerateResponse { candidates };
        (200, serde_json::to_string(&response).expect("serializable"))
    }
}

fn error_body(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn synthesize(text: &str, n: usize, seed: u64) -> Vec<String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(text));
    (0..n)
        .map(|k| {
            if k == 0 || words.len() < 2 {
                return text.trim().to_string();
            }
            let mut shuffled = words.clone();
            shuffled.shuffle(&mut rng);
            shuffled.join(" ")
        })
        .collect()
}

/// Background HTTP server wrapping a [`MockService`]. Stops on drop.
pub struct MockServer {
    server: Arc<tiny_http::Server>,
    workers: Vec<JoinHandle<()>>,
    base_url: String,
}

impl MockServer {
    /// Binds `addr` (e.g. `127.0.0.1:0`) and starts serving.
    pub fn start(addr: &str, service: MockService) -> Result<Self, MockServiceError> {
        let server = tiny_http::Server::http(addr).map_err(|e| MockServiceError::Bind(e.to_string()))?;
        let local = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| MockServiceError::Bind("not an IP listener".into()))?;
        let server = Arc::new(server);
        let service = Arc::new(service);
        let workers = (0..4)
            .map(|_| {
                let server = Arc::clone(&server);
                let service = Arc::clone(&service);
                std::thread::spawn(move || {
                    for request in server.incoming_requests() {
                        handle(&service, request);
                    }
                })
            })
            .collect();
        Ok(Self {
            server,
            workers,
            base_url: format!("http://{local}"),
        })
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    /// Blocks the calling thread until the server is stopped from elsewhere.
    pub fn join(mut self) {
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        for _ in &self.workers {
            self.server.unblock();
        }
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

fn handle(service: &MockService, mut request: tiny_http::Request) {
    let (status, body) = if request.url() != "/generate" {
        (404, error_body("not found"))
    } else if *request.method() != tiny_http::Method::Post {
        (405, error_body("method not allowed"))
    } else {
        let mut body = String::new();
        match request.as_reader().read_to_string(&mut body) {
            Ok(_) => service.respond(&body),
            Err(e) => (400, error_body(&format!("unreadable body: {e}"))),
        }
    };
    let header = tiny_http::Header::from_bytes(&b"Content-Type"[..], &b"application/json"[..]).expect("static header");
    let response = tiny_http::Response::from_string(body)
        .with_status_code(status)
        .with_header(header);
    if let Err(e) = request.respond(response) {
        log::warn!("mock server failed to respond: {e}");
    }
}
