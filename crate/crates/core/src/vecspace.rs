//! Incrementally updated TF-IDF vector space.
//!
//! The model keeps only additive statistics (document count and per-term
//! document frequency), so absorbing documents in batches of any size yields
//! the same state as absorbing them one at a time. Inverse document frequency
//! is derived on demand as `log10(total_docs / df)`.
//!
//! Term weights use the log-scaled term frequency
//! `(log10(tf) + 1) * idf`, and every vector is L2-normalised so that cosine
//! similarity between two stored vectors reduces to a dot product.

use std::collections::HashMap;

use crate::scalar::Scalar;
use crate::textprep::TokenBag;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VecSpaceError {
    /// The term has never been absorbed, so it has no document frequency.
    #[error("term {0:?} has not been absorbed into the vector space")]
    UnknownTerm(String),
    #[error("weight for term {term} is not a finite non-negative number")]
    InvalidWeight { term: u32 },
}

/// Dense, append-only identifier of a vocabulary term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bijection between terms and ids `0..len`, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    ids: HashMap<String, TermId>,
    terms: Vec<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> Option<&str> {
        self.terms.get(id.index()).map(String::as_str)
    }

    fn intern(&mut self, term: &str) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = TermId(u32::try_from(self.terms.len()).expect("vocabulary exceeds u32 ids"));
        self.ids.insert(term.to_owned(), id);
        self.terms.push(term.to_owned());
        id
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TermId, &str)> + '_ {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| (TermId(i as u32), t.as_str()))
    }
}

/// How [`VectorSpaceState::weigh_with`] treats terms that were never absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnseenTerms {
    /// Fail with [`VecSpaceError::UnknownTerm`].
    Reject,
    /// Leave the term out of the vector.
    Drop,
}

/// Corpus statistics at some point in the stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VectorSpaceState {
    vocab: Vocabulary,
    doc_freq: Vec<u64>,
    total_docs: u64,
}

impl VectorSpaceState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total_docs(&self) -> u64 {
        self.total_docs
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn doc_freq(&self, id: TermId) -> u64 {
        self.doc_freq.get(id.index()).copied().unwrap_or(0)
    }

    pub fn doc_freq_of(&self, term: &str) -> u64 {
        self.vocab.get(term).map_or(0, |id| self.doc_freq(id))
    }

    /// Adds one document's terms to the counts.
    pub fn absorb(&mut self, bag: &TokenBag) {
        for term in bag.terms() {
            let id = self.vocab.intern(term);
            if id.index() == self.doc_freq.len() {
                self.doc_freq.push(0);
            }
            self.doc_freq[id.index()] += 1;
        }
        self.total_docs += 1;
    }

    pub fn absorb_batch<'a>(&mut self, batch: impl IntoIterator<Item = &'a TokenBag>) {
        for bag in batch {
            self.absorb(bag);
        }
    }

    /// `log10(total_docs / df)` for an absorbed term.
    pub fn idf<T: Scalar>(&self, id: TermId) -> Result<T, VecSpaceError> {
        match self.doc_freq(id) {
            0 => Err(VecSpaceError::UnknownTerm(
                self.vocab
                    .term(id)
                    .map_or_else(|| format!("#{}", id.0), str::to_owned),
            )),
            df if df == self.total_docs => Ok(T::zero()),
            df => Ok((T::from_count(self.total_docs) / T::from_count(df)).log10()),
        }
    }

    pub fn idf_of<T: Scalar>(&self, term: &str) -> Result<T, VecSpaceError> {
        let id = self
            .vocab
            .get(term)
            .ok_or_else(|| VecSpaceError::UnknownTerm(term.to_owned()))?;
        self.idf(id)
    }

    /// Weighs `bag` against the current statistics. Every term must already
    /// have been absorbed.
    pub fn weigh<T: Scalar>(
        &self,
        bag: &TokenBag,
        doc_id: &str,
    ) -> Result<TermVector<T>, VecSpaceError> {
        self.weigh_with(bag, doc_id, UnseenTerms::Reject)
    }

    pub fn weigh_with<T: Scalar>(
        &self,
        bag: &TokenBag,
        doc_id: &str,
        unseen: UnseenTerms,
    ) -> Result<TermVector<T>, VecSpaceError> {
        let mut raw = Vec::with_capacity(bag.len());
        for (term, tf) in bag.iter() {
            let id = match (self.vocab.get(term), unseen) {
                (Some(id), _) if self.doc_freq(id) > 0 => id,
                (_, UnseenTerms::Drop) => continue,
                (_, UnseenTerms::Reject) => {
                    return Err(VecSpaceError::UnknownTerm(term.to_owned()))
                }
            };
            let idf: T = self.idf(id)?;
            let w = (T::from_count(u64::from(tf)).log10() + T::one()) * idf;
            if w > T::zero() {
                raw.push((id, w));
            }
        }
        raw.sort_unstable_by_key(|&(id, _)| id);
        Ok(TermVector::normalized(doc_id, raw))
    }
}

/// Sparse, L2-normalised term-weight vector of one document.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector<T> {
    doc_id: String,
    // sorted by term id, no zero weights
    entries: Vec<(TermId, T)>,
    norm: T,
}

impl<T: Scalar> TermVector<T> {
    pub fn zero(doc_id: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            entries: Vec::new(),
            norm: T::zero(),
        }
    }

    /// Builds a vector from arbitrary non-negative weights, scaled to unit
    /// length. Duplicate ids are summed.
    pub fn from_weights(
        doc_id: impl Into<String>,
        weights: impl IntoIterator<Item = (TermId, T)>,
    ) -> Result<Self, VecSpaceError> {
        let mut raw: Vec<(TermId, T)> = Vec::new();
        for (id, w) in weights {
            if !w.is_finite() || w < T::zero() {
                return Err(VecSpaceError::InvalidWeight { term: id.0 });
            }
            raw.push((id, w));
        }
        raw.sort_by_key(|&(id, _)| id);
        let mut merged: Vec<(TermId, T)> = Vec::with_capacity(raw.len());
        for (id, w) in raw {
            match merged.last_mut() {
                Some((last, acc)) if *last == id => *acc = *acc + w,
                _ => merged.push((id, w)),
            }
        }
        merged.retain(|&(_, w)| w > T::zero());
        Ok(Self::normalized(doc_id, merged))
    }

    fn normalized(doc_id: impl Into<String>, mut raw: Vec<(TermId, T)>) -> Self {
        let norm = raw.iter().map(|&(_, w)| w * w).sum::<T>().sqrt();
        if norm == T::zero() {
            return Self::zero(doc_id);
        }
        for (_, w) in &mut raw {
            *w = *w / norm;
        }
        let norm = raw.iter().map(|&(_, w)| w * w).sum::<T>().sqrt();
        Self {
            doc_id: doc_id.into(),
            entries: raw,
            norm,
        }
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    /// Non-zero entries in ascending term-id order.
    pub fn entries(&self) -> &[(TermId, T)] {
        &self.entries
    }

    pub fn get(&self, id: TermId) -> T {
        self.entries
            .binary_search_by_key(&id, |&(t, _)| t)
            .map_or(T::zero(), |i| self.entries[i].1)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn dot(&self, other: &Self) -> T {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = T::zero();
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc = acc + a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Cosine similarity, clamped to `[0, 1]`; zero if either vector is zero.
pub fn cosine<T: Scalar>(q: &TermVector<T>, d: &TermVector<T>) -> T {
    if q.is_zero() || d.is_zero() {
        return T::zero();
    }
    let sim = q.dot(d) / (q.norm() * d.norm());
    sim.max(T::zero()).min(T::one())
}
