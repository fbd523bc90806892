//! The streaming first-story detection loop.
//!
//! For every document: update the vector space (incremental mode), weigh the
//! document, fetch candidates from the index, take the minimum cosine
//! distance, decide, and only then insert the document so it can never match
//! itself.

use std::collections::HashSet;
use std::sync::Arc;

use crate::lshindex::{ExhaustiveIndex, IndexedDoc, LshError, LshIndex, LshParams, NeighborIndex};
use crate::scalar::Scalar;
use crate::streamio::Document;
use crate::textprep::{preprocess, Stoplist, TokenBag};
use crate::vecspace::{cosine, TermVector, UnseenTerms, VecSpaceError, VectorSpaceState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectorError {
    #[error("document {0:?} was already processed")]
    DuplicateDoc(String),
    #[error("invalid detector configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lsh(#[from] LshError),
    #[error(transparent)]
    Weigh(#[from] VecSpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightingMode {
    /// Statistics come from a training prefix only and never change; terms
    /// first seen later carry no weight.
    Static,
    /// Statistics absorb every arriving batch before it is weighed.
    #[default]
    Incremental,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig<T> {
    /// Cosine-distance threshold: a document is novel when its distance to
    /// the nearest candidate is at least this value.
    pub threshold: T,
    pub lsh: LshParams,
    pub mode: WeightingMode,
    /// Documents absorbed together per incremental update.
    pub batch_size: usize,
    /// Leading documents absorbed as one training batch before the stream is
    /// processed. Required (non-zero) in static mode.
    pub train_prefix: usize,
}

impl<T: Scalar> DetectorConfig<T> {
    pub const DEFAULT_THRESHOLD: f64 = 0.5;
    pub const DEFAULT_BITS: u32 = 13;
    pub const DEFAULT_PHI: f64 = 0.05;
    pub const DEFAULT_P_COLL: f64 = 0.9;

    pub fn validate(&self) -> Result<(), DetectorError> {
        if !(self.threshold >= T::zero() && self.threshold <= T::one()) {
            return Err(DetectorError::Config(format!(
                "threshold must be in [0,1], got {}",
                self.threshold
            )));
        }
        if self.batch_size == 0 {
            return Err(DetectorError::Config(
                "batch size must be at least 1".into(),
            ));
        }
        if self.mode == WeightingMode::Static && self.train_prefix == 0 {
            return Err(DetectorError::Config(
                "static mode needs a non-empty training prefix".into(),
            ));
        }
        Ok(())
    }

    pub fn with_threshold(mut self, threshold: T) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_mode(mut self, mode: WeightingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_train_prefix(mut self, n: usize) -> Self {
        self.train_prefix = n;
        self
    }

    pub fn with_batch_size(mut self, n: usize) -> Self {
        self.batch_size = n;
        self
    }
}

impl<T: Scalar> Default for DetectorConfig<T> {
    /// Threshold 0.5, k = 13, tables planned for phi = 0.05 at p = 0.9 (11),
    /// incremental mode, batch size 1, no training prefix.
    fn default() -> Self {
        Self {
            threshold: T::lit(Self::DEFAULT_THRESHOLD),
            lsh: LshParams::planned(
                Self::DEFAULT_PHI,
                Self::DEFAULT_P_COLL,
                Self::DEFAULT_BITS,
                0,
            )
            .expect("default LSH parameters are valid"),
            mode: WeightingMode::Incremental,
            batch_size: 1,
            train_prefix: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T> {
    pub doc_id: String,
    pub is_novel: bool,
    /// Closest candidate, if any candidate was retrieved.
    pub nearest_id: Option<String>,
    /// Minimum cosine distance to any candidate; 1 without candidates.
    pub novelty_score: T,
    /// Set when preprocessing left no tokens at all.
    pub empty_document: bool,
}

/// Minimum cosine distance from `q` to `cands`, with the argmin. Ties go to
/// the earliest-inserted candidate.
pub fn score<T: Scalar>(
    q: &TermVector<T>,
    cands: &[Arc<IndexedDoc<T>>],
) -> (T, Option<Arc<IndexedDoc<T>>>) {
    let mut best: (T, Option<&Arc<IndexedDoc<T>>>) = (T::one(), None);
    for c in cands {
        let d = T::one() - cosine(q, &c.vector);
        let better = match best.1 {
            None => true,
            Some(b) => d < best.0 || (d == best.0 && c.seq < b.seq),
        };
        if better {
            best = (d, Some(c));
        }
    }
    (best.0, best.1.cloned())
}

pub struct Detector<T, I = LshIndex<T>> {
    config: DetectorConfig<T>,
    stoplist: Stoplist,
    space: VectorSpaceState,
    index: I,
    seen: HashSet<String>,
}

impl<T: Scalar> Detector<T, LshIndex<T>> {
    pub fn with_lsh(config: DetectorConfig<T>, stoplist: Stoplist) -> Result<Self, DetectorError> {
        let index = LshIndex::new(config.lsh);
        Self::new(config, stoplist, index)
    }
}

impl<T: Scalar> Detector<T, ExhaustiveIndex<T>> {
    /// Brute-force 1-NN detector with the same weighting as the LSH one.
    pub fn exhaustive(
        config: DetectorConfig<T>,
        stoplist: Stoplist,
    ) -> Result<Self, DetectorError> {
        Self::new(config, stoplist, ExhaustiveIndex::new())
    }
}

impl<T: Scalar, I: NeighborIndex<T>> Detector<T, I> {
    pub fn new(
        config: DetectorConfig<T>,
        stoplist: Stoplist,
        index: I,
    ) -> Result<Self, DetectorError> {
        config.validate()?;
        Ok(Self {
            config,
            stoplist,
            space: VectorSpaceState::new(),
            index,
            seen: HashSet::new(),
        })
    }

    pub fn config(&self) -> &DetectorConfig<T> {
        &self.config
    }

    pub fn vector_space(&self) -> &VectorSpaceState {
        &self.space
    }

    pub fn index(&self) -> &I {
        &self.index
    }

    /// Absorbs `docs` as the training batch. In static mode this is the only
    /// update the vector space ever sees.
    pub fn train(&mut self, docs: &[Document]) {
        for doc in docs {
            let bag = preprocess(&doc.text, &self.stoplist);
            self.space.absorb(&bag);
        }
    }

    /// Processes one arriving batch: absorb it (incremental mode), then decide
    /// each document in order.
    pub fn process_batch(&mut self, docs: &[Document]) -> Result<Vec<Verdict<T>>, DetectorError> {
        let bags = self.prepare(docs)?;
        if self.config.mode == WeightingMode::Incremental {
            self.space.absorb_batch(&bags);
        }
        self.decide_all(docs, &bags)
    }

    pub fn process(&mut self, doc: &Document) -> Result<Verdict<T>, DetectorError> {
        let mut v = self.process_batch(std::slice::from_ref(doc))?;
        Ok(v.pop().expect("one verdict per document"))
    }

    /// Decides documents without updating the vector space. In incremental
    /// mode they must already have been absorbed through [`Self::train`].
    pub fn process_trained(&mut self, docs: &[Document]) -> Result<Vec<Verdict<T>>, DetectorError> {
        let bags = self.prepare(docs)?;
        self.decide_all(docs, &bags)
    }

    /// Runs a whole stream: the configured training prefix first, then the
    /// rest in batches of the configured size.
    pub fn run(&mut self, docs: &[Document]) -> Result<Vec<Verdict<T>>, DetectorError> {
        let prefix = self.config.train_prefix.min(docs.len());
        let (train, rest) = docs.split_at(prefix);
        let mut verdicts = Vec::with_capacity(docs.len());
        if prefix > 0 {
            self.train(train);
            verdicts.extend(self.process_trained(train)?);
        }
        for batch in rest.chunks(self.config.batch_size) {
            verdicts.extend(self.process_batch(batch)?);
        }
        Ok(verdicts)
    }

    fn prepare(&self, docs: &[Document]) -> Result<Vec<TokenBag>, DetectorError> {
        let mut batch_ids = HashSet::new();
        for doc in docs {
            if self.seen.contains(&doc.id) || !batch_ids.insert(doc.id.as_str()) {
                return Err(DetectorError::DuplicateDoc(doc.id.clone()));
            }
        }
        Ok(docs
            .iter()
            .map(|d| preprocess(&d.text, &self.stoplist))
            .collect())
    }

    fn decide_all(
        &mut self,
        docs: &[Document],
        bags: &[TokenBag],
    ) -> Result<Vec<Verdict<T>>, DetectorError> {
        docs.iter()
            .zip(bags)
            .map(|(doc, bag)| self.decide(doc, bag))
            .collect()
    }

    fn decide(&mut self, doc: &Document, bag: &TokenBag) -> Result<Verdict<T>, DetectorError> {
        let unseen = match self.config.mode {
            WeightingMode::Static => UnseenTerms::Drop,
            WeightingMode::Incremental => UnseenTerms::Reject,
        };
        let vector: TermVector<T> = self.space.weigh_with(bag, &doc.id, unseen)?;
        let verdict = if bag.is_empty() {
            Verdict {
                doc_id: doc.id.clone(),
                is_novel: true,
                nearest_id: None,
                novelty_score: T::one(),
                empty_document: true,
            }
        } else {
            let cands = self.index.candidates(&vector);
            let (distance, nearest) = score(&vector, &cands);
            Verdict {
                doc_id: doc.id.clone(),
                is_novel: distance >= self.config.threshold,
                nearest_id: nearest.map(|n| n.doc_id().to_owned()),
                novelty_score: distance,
                empty_document: false,
            }
        };
        self.index.insert(vector)?;
        self.seen.insert(doc.id.clone());
        Ok(verdict)
    }
}

/// Runs `docs` through an LSH-backed detector.
pub fn run_stream<T: Scalar>(
    docs: &[Document],
    config: DetectorConfig<T>,
    stoplist: Stoplist,
) -> Result<Vec<Verdict<T>>, DetectorError> {
    Detector::with_lsh(config, stoplist)?.run(docs)
}

/// Runs `docs` through the exhaustive 1-NN detector.
pub fn run_stream_exhaustive<T: Scalar>(
    docs: &[Document],
    config: DetectorConfig<T>,
    stoplist: Stoplist,
) -> Result<Vec<Verdict<T>>, DetectorError> {
    Detector::exhaustive(config, stoplist)?.run(docs)
}
