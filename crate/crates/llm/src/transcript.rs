use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::prompt::PromptMode;

/// Replay lookup key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TranscriptKey {
    pub problem_id: String,
    pub mode: PromptMode,
    pub model: String,
    pub trial: usize,
}

impl TranscriptKey {
    pub fn new(problem_id: &str, mode: PromptMode, model: &str, trial: usize) -> Self {
        TranscriptKey {
            problem_id: problem_id.to_string(),
            mode,
            model: model.to_string(),
            trial,
        }
    }

    /// Hex sha256 of the key fields, used as the file name.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.problem_id.as_str(),
            self.mode.name(),
            self.model.as_str(),
            &self.trial.to_string(),
        ] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub problem_id: String,
    pub mode: PromptMode,
    pub model: String,
    pub trial: usize,
    pub prompt: String,
    pub response: String,
    /// Seconds since the epoch; 0 for synthetic transcripts.
    pub timestamp: u64,
}

impl Transcript {
    pub fn key(&self) -> TranscriptKey {
        TranscriptKey::new(&self.problem_id, self.mode, &self.model, self.trial)
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error("a different transcript is already recorded for {0:?}")]
    Conflict(TranscriptKey),
}

/// One JSON file per transcript, named by the digest of its key. Writes go
/// through a temporary file and a rename, so readers never see partial
/// files; existing transcripts are never overwritten.
#[derive(Debug, Clone)]
pub struct TranscriptStore {
    dir: PathBuf,
}

impl TranscriptStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(TranscriptStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &TranscriptKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    pub fn get(&self, key: &TranscriptKey) -> Result<Option<Transcript>, StoreError> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let t: Transcript = serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
            path: path.clone(),
            message: e.to_string(),
        })?;
        if t.key() != *key {
            return Err(StoreError::Corrupt {
                path,
                message: "key does not match file name".to_string(),
            });
        }
        Ok(Some(t))
    }

    /// Record a transcript. Re-recording identical content is a no-op.
    pub fn put(&self, t: &Transcript) -> Result<PathBuf, StoreError> {
        let key = t.key();
        if let Some(old) = self.get(&key)? {
            return if old == *t {
                Ok(self.path_for(&key))
            } else {
                Err(StoreError::Conflict(key))
            };
        }
        let path = self.path_for(&key);
        let tmp = self
            .dir
            .join(format!(".{}.{}.tmp", key.digest(), std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(
                serde_json::to_string_pretty(t)
                    .expect("transcript serializes")
                    .as_bytes(),
            )?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Every transcript in the store, sorted by key.
    pub fn list(&self) -> Result<Vec<Transcript>, StoreError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = fs::read_to_string(&path)?;
            let t: Transcript = serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
                path: path.clone(),
                message: e.to_string(),
            })?;
            out.push(t);
        }
        out.sort_by_key(|t| t.key());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(trial: usize, response: &str) -> Transcript {
        Transcript {
            problem_id: "p1".into(),
            mode: PromptMode::OneShot,
            model: "m".into(),
            trial,
            prompt: "prompt".into(),
            response: response.into(),
            timestamp: 0,
        }
    }

    #[test]
    fn put_get_list() {
        let dir = tempfile::tempdir().unwrap();
        let store = TranscriptStore::open(dir.path()).unwrap();
        let a = sample(0, "cat(tom).");
        let path = store.put(&a).unwrap();
        assert_eq!(path.file_name().unwrap().len(), 64 + 5);
        assert_eq!(store.get(&a.key()).unwrap(), Some(a.clone()));
        assert_eq!(store.get(&sample(1, "").key()).unwrap(), None);
        store.put(&a).unwrap();
        assert!(matches!(
            store.put(&sample(0, "other")),
            Err(StoreError::Conflict(_))
        ));
        store.put(&sample(1, "x")).unwrap();
        assert_eq!(store.list().unwrap().len(), 2);
    }

    #[test]
    fn same_key_same_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let store = TranscriptStore::open(dir.path()).unwrap();
        let a = sample(0, "cat(tom).\n?- cat(tom).");
        let path = store.put(&a).unwrap();
        let first = fs::read(&path).unwrap();
        let again = store.get(&a.key()).unwrap().unwrap();
        assert_eq!(again.response.as_bytes(), a.response.as_bytes());
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn digest_separates_fields() {
        let a = TranscriptKey::new("ab", PromptMode::OneShot, "c", 0);
        let b = TranscriptKey::new("a", PromptMode::OneShot, "bc", 0);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), a.clone().digest());
    }

    #[test]
    fn tampered_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let store = TranscriptStore::open(dir.path()).unwrap();
        let a = sample(0, "x");
        let path = store.put(&a).unwrap();
        fs::write(&path, "{").unwrap();
        assert!(matches!(
            store.get(&a.key()),
            Err(StoreError::Corrupt { .. })
        ));
    }
}
