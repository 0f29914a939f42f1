//! Model side of the pipeline: prompts, the chat endpoint, the transcript
//! store used for replay, and a synthetic model for offline runs.

pub mod client;
pub mod prompt;
pub mod synthetic;
pub mod transcript;
pub mod translate;

pub use client::{ChatClient, ClientError, EndpointConfig};
pub use prompt::{render_prompt, PromptError, PromptMode, PromptTemplate};
pub use synthetic::{synthetic_response, synthetic_transcript, ErrorMix, SYNTHETIC_MODEL};
pub use transcript::{StoreError, Transcript, TranscriptKey, TranscriptStore};
pub use translate::{Backend, TranslateError, Translator};
