//! Line-delimited JSON streams of documents and verdicts.
//!
//! Stream file: one object per line with `id`, `ts`, `text` and an optional
//! ground-truth `label`. A label equal to the document's own id, or to
//! [`FIRST_STORY_LABEL`], marks a first story; any other label names an
//! earlier document of the same event.
//!
//! Verdict file: one object per line with `id`, `prediction` (`"0"` for a
//! novel document, otherwise the id of the nearest earlier document),
//! `is_novel`, `novelty_score` and `nearest_id`.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detector::Verdict;
use crate::evaluation::Truth;
use crate::scalar::Scalar;

mod synth;

pub use synth::{generate_synthetic, SynthConfig, SynthError};

/// Prediction written for novel documents, and accepted as a first-story label.
pub const FIRST_STORY_LABEL: &str = "0";

#[derive(Debug, thiserror::Error)]
pub enum StreamError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: timestamp decreases")]
    Order { line: usize },
    #[error("line {line}: document id {id:?} repeats")]
    DuplicateId { line: usize, id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// Milliseconds since the Unix epoch.
    pub ts: i64,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, ts: i64, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            ts,
            text: text.into(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Ground truth, when the document is annotated.
    pub fn truth(&self) -> Option<Truth> {
        let label = self.label.as_deref()?;
        if label == self.id || label == FIRST_STORY_LABEL {
            Some(Truth::New)
        } else {
            Some(Truth::Old)
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StreamError + '_ {
    move |source| StreamError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads a stream, checking that ids are present and unique and that
/// timestamps never decrease. Blank lines are skipped.
pub fn read_stream_from<R: BufRead>(reader: R) -> Result<Vec<Document>, StreamError> {
    let mut docs: Vec<Document> = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| StreamError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| StreamError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if doc.id.is_empty() {
            return Err(StreamError::Parse {
                line: line_no,
                message: "empty document id".into(),
            });
        }
        if docs.last().is_some_and(|prev| doc.ts < prev.ts) {
            return Err(StreamError::Order { line: line_no });
        }
        if !ids.insert(doc.id.clone()) {
            return Err(StreamError::DuplicateId {
                line: line_no,
                id: doc.id,
            });
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn read_stream(path: impl AsRef<Path>) -> Result<Vec<Document>, StreamError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    read_stream_from(BufReader::new(file))
}

fn write_lines<I, S>(path: &Path, records: I) -> Result<(), StreamError>
where
    I: IntoIterator<Item = S>,
    S: Serialize,
{
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut out, &r).map_err(|e| io_err(path)(e.into()))?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn write_stream(path: impl AsRef<Path>, docs: &[Document]) -> Result<(), StreamError> {
    write_lines(path.as_ref(), docs)
}

/// On-disk form of a [`Verdict`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub id: String,
    pub prediction: String,
    pub is_novel: bool,
    pub novelty_score: f64,
    pub nearest_id: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub empty_document: bool,
}

impl<T: Scalar> From<&Verdict<T>> for VerdictRecord {
    fn from(v: &Verdict<T>) -> Self {
        let prediction = match (&v.nearest_id, v.is_novel) {
            (Some(nearest), false) => nearest.clone(),
            _ => FIRST_STORY_LABEL.to_owned(),
        };
        Self {
            id: v.doc_id.clone(),
            prediction,
            is_novel: v.is_novel,
            novelty_score: v.novelty_score.to_f64_lossy(),
            nearest_id: v.nearest_id.clone(),
            empty_document: v.empty_document,
        }
    }
}

impl From<VerdictRecord> for Verdict<f64> {
    fn from(r: VerdictRecord) -> Self {
        Self {
            doc_id: r.id,
            is_novel: r.is_novel,
            nearest_id: r.nearest_id,
            novelty_score: r.novelty_score,
            empty_document: r.empty_document,
        }
    }
}

pub fn write_verdicts<T: Scalar>(
    path: impl AsRef<Path>,
    verdicts: &[Verdict<T>],
) -> Result<(), StreamError> {
    write_lines(path.as_ref(), verdicts.iter().map(VerdictRecord::from))
}

pub fn read_verdicts(path: impl AsRef<Path>) -> Result<Vec<Verdict<f64>>, StreamError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: VerdictRecord = serde_json::from_str(&line).map_err(|e| StreamError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec.into());
    }
    Ok(out)
}

/// Pairs each verdict's novelty score with its document's ground truth.
/// Verdicts for unannotated or unknown documents are skipped.
pub fn join_truth<T: Scalar>(verdicts: &[Verdict<T>], docs: &[Document]) -> Vec<(T, Truth)> {
    let truth: HashMap<&str, Truth> = docs
        .iter()
        .filter_map(|d| Some((d.id.as_str(), d.truth()?)))
        .collect();
    verdicts
        .iter()
        .filter_map(|v| Some((v.novelty_score, *truth.get(v.doc_id.as_str())?)))
        .collect()
}
