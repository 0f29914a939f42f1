use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sedac_core::corpus::Problem;
use sedac_core::metrics::{Condition, ResponseSource};
use sedac_core::Lexicon;
use thiserror::Error;

use crate::client::{ChatClient, ClientError};
use crate::prompt::{render_prompt, PromptError, PromptMode};
use crate::synthetic::{synthetic_transcript, SYNTHETIC_MODEL};
use crate::transcript::{StoreError, Transcript, TranscriptKey, TranscriptStore};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("problem {problem_id}: {source}")]
    Client {
        problem_id: String,
        #[source]
        source: ClientError,
    },
    #[error("problem {problem_id}: {source}")]
    Prompt {
        problem_id: String,
        #[source]
        source: PromptError,
    },
    #[error("no recorded transcript for {0:?}")]
    CacheMiss(TranscriptKey),
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub enum Backend {
    /// Query the endpoint, recording every response.
    Live(ChatClient),
    /// Read recorded transcripts only. Holds no client, so it cannot touch
    /// the network.
    Replay,
    /// Generate transcripts with the synthetic model and record them.
    Synthetic { seed: u64, lexicon: Lexicon },
}

pub struct Translator {
    backend: Backend,
    store: TranscriptStore,
    model: String,
}

impl Translator {
    pub fn live(client: ChatClient, store: TranscriptStore) -> Self {
        let model = client.config().model.clone();
        Translator {
            backend: Backend::Live(client),
            store,
            model,
        }
    }

    pub fn replay(store: TranscriptStore, model: &str) -> Self {
        Translator {
            backend: Backend::Replay,
            store,
            model: model.to_string(),
        }
    }

    pub fn synthetic(store: TranscriptStore, seed: u64, lexicon: Lexicon) -> Self {
        Translator {
            backend: Backend::Synthetic { seed, lexicon },
            store,
            model: SYNTHETIC_MODEL.to_string(),
        }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn is_replay(&self) -> bool {
        matches!(self.backend, Backend::Replay)
    }

    /// Recorded transcripts win in every mode; otherwise the backend is asked
    /// and the result recorded.
    pub fn translate(
        &self,
        problem: &Problem,
        mode: PromptMode,
        trial: usize,
    ) -> Result<Transcript, TranslateError> {
        let key = TranscriptKey::new(&problem.id, mode, &self.model, trial);
        if let Some(t) = self.store.get(&key)? {
            return Ok(t);
        }
        let t = match &self.backend {
            Backend::Replay => return Err(TranslateError::CacheMiss(key)),
            Backend::Synthetic { seed, lexicon } => {
                synthetic_transcript(problem, mode, trial, *seed, lexicon)
            }
            Backend::Live(client) => {
                let prompt =
                    render_prompt(mode, problem).map_err(|source| TranslateError::Prompt {
                        problem_id: problem.id.clone(),
                        source,
                    })?;
                let response =
                    client
                        .complete(&prompt)
                        .map_err(|source| TranslateError::Client {
                            problem_id: problem.id.clone(),
                            source,
                        })?;
                let timestamp = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                Transcript {
                    problem_id: problem.id.clone(),
                    mode,
                    model: self.model.clone(),
                    trial,
                    prompt,
                    response,
                    timestamp,
                }
            }
        };
        self.store.put(&t)?;
        Ok(t)
    }

    /// Translate a batch with at most `workers` requests in flight. Results
    /// keep the order of `problems`.
    pub fn translate_batch(
        &self,
        problems: &[Problem],
        mode: PromptMode,
        trial: usize,
        workers: usize,
    ) -> Vec<Result<Transcript, TranslateError>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .expect("thread pool");
        pool.install(|| {
            problems
                .par_iter()
                .map(|p| self.translate(p, mode, trial))
                .collect()
        })
    }
}

impl ResponseSource for Translator {
    fn response(
        &self,
        problem: &Problem,
        condition: Condition,
        trial: usize,
    ) -> Result<String, String> {
        self.translate(problem, PromptMode::for_condition(condition), trial)
            .map(|t| t.response)
            .map_err(|e| e.to_string())
    }
}
