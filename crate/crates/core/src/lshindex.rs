//! Multi-table random-hyperplane LSH over sparse term vectors.
//!
//! Each table owns `k` hyperplanes. A hyperplane has one Rademacher (±1)
//! component per term id, derived by hashing `(seed, table, term)`, so the
//! planes never need to be materialised and the vocabulary can grow without
//! bound. A vector's signature bit is 1 when its projection onto the plane is
//! strictly positive.
//!
//! Documents land in one bucket per table; a query's candidates are the union
//! of the buckets it hashes to.

use std::collections::HashMap;
use std::sync::Arc;

use crate::scalar::Scalar;
use crate::vecspace::{TermId, TermVector};

pub const MAX_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LshError {
    #[error("document {0:?} is already indexed")]
    DuplicateDoc(String),
    #[error("collision probability {p_coll}^{k} is numerically 0 or 1; no table count satisfies the bound")]
    DegenerateParams { p_coll: f64, k: u32 },
    #[error("invalid LSH parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LshParams {
    /// Signature width `k`, in `1..=64`.
    pub bits: u32,
    /// Number of hash tables `L`.
    pub tables: usize,
    pub seed: u64,
}

impl LshParams {
    pub fn new(bits: u32, tables: usize, seed: u64) -> Result<Self, LshError> {
        if !(1..=MAX_BITS).contains(&bits) {
            return Err(LshError::InvalidParams(format!(
                "bits per signature must be in 1..={MAX_BITS}, got {bits}"
            )));
        }
        if tables == 0 {
            return Err(LshError::InvalidParams("need at least one table".into()));
        }
        Ok(Self { bits, tables, seed })
    }

    /// Parameters whose table count comes from [`plan_tables`].
    pub fn planned(phi: f64, p_coll: f64, bits: u32, seed: u64) -> Result<Self, LshError> {
        if !(1..=MAX_BITS).contains(&bits) {
            return Self::new(bits, 1, seed);
        }
        Self::new(bits, plan_tables(phi, p_coll, bits)?, seed)
    }
}

/// Smallest table count `L` such that a neighbour whose per-hyperplane
/// collision probability is `p_coll` is missed by all `L` tables with
/// probability at most `phi`: `L = ceil(ln(phi) / ln(1 - p_coll^k))`.
pub fn plan_tables<T: Scalar>(phi: T, p_coll: T, k: u32) -> Result<usize, LshError> {
    let (zero, one) = (T::zero(), T::one());
    if !(phi > zero && phi < one) {
        return Err(LshError::InvalidParams(format!(
            "phi must be in (0,1), got {phi}"
        )));
    }
    if !(p_coll > zero && p_coll < one) {
        return Err(LshError::InvalidParams(format!(
            "collision probability must be in (0,1), got {p_coll}"
        )));
    }
    if k == 0 {
        return Err(LshError::InvalidParams("k must be positive".into()));
    }
    let degenerate = || LshError::DegenerateParams {
        p_coll: p_coll.to_f64_lossy(),
        k,
    };
    let exponent = i32::try_from(k).map_err(|_| degenerate())?;
    let table_hit = p_coll.powi(exponent);
    let table_miss = one - table_hit;
    if table_hit == zero || table_miss == zero || table_miss == one {
        return Err(degenerate());
    }
    let tables = (phi.ln() / table_miss.ln()).ceil();
    let tables = tables.to_usize().ok_or_else(degenerate)?;
    Ok(tables.max(1))
}

/// One table's `k`-bit fingerprint of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub bits: u64,
    pub table: usize,
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Signs of term `term`'s component on all 64 candidate hyperplanes of
/// `table`: bit `b` set means `+1` on hyperplane `b`.
#[inline]
fn hyperplane_signs(seed: u64, table: usize, term: TermId) -> u64 {
    let key = ((table as u64) << 32) | u64::from(term.0);
    mix64(mix64(key) ^ seed)
}

/// The `table`-th signature of `v`.
pub fn signature<T: Scalar>(v: &TermVector<T>, table: usize, params: &LshParams) -> Signature {
    let k = params.bits as usize;
    let mut proj = [T::zero(); MAX_BITS as usize];
    for &(term, w) in v.entries() {
        let signs = hyperplane_signs(params.seed, table, term);
        for (b, p) in proj[..k].iter_mut().enumerate() {
            if signs >> b & 1 == 1 {
                *p = *p + w;
            } else {
                *p = *p - w;
            }
        }
    }
    let bits = proj[..k]
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > T::zero())
        .fold(0u64, |acc, (b, _)| acc | 1 << b);
    Signature { bits, table }
}

/// A document held by an index, tagged with its insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedDoc<T> {
    pub seq: u64,
    pub vector: TermVector<T>,
}

impl<T: Scalar> IndexedDoc<T> {
    pub fn doc_id(&self) -> &str {
        self.vector.doc_id()
    }
}

/// Storage that can propose nearest-neighbour candidates for a query.
pub trait NeighborIndex<T: Scalar> {
    fn insert(&mut self, v: TermVector<T>) -> Result<(), LshError>;

    /// Candidates in insertion order, without duplicates.
    fn candidates(&self, q: &TermVector<T>) -> Vec<Arc<IndexedDoc<T>>>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

type Bucket<T> = Vec<Arc<IndexedDoc<T>>>;

#[derive(Debug, Clone)]
pub struct LshIndex<T> {
    params: LshParams,
    tables: Vec<HashMap<u64, Bucket<T>>>,
    ids: HashMap<String, u64>,
}

impl<T: Scalar> LshIndex<T> {
    pub fn new(params: LshParams) -> Self {
        Self {
            params,
            tables: vec![HashMap::new(); params.tables],
            ids: HashMap::new(),
        }
    }

    pub fn params(&self) -> &LshParams {
        &self.params
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.ids.contains_key(doc_id)
    }

    /// Buckets of one table as `(signature bits, members)`, in no particular order.
    pub fn buckets(&self, table: usize) -> impl Iterator<Item = (u64, &[Arc<IndexedDoc<T>>])> + '_ {
        self.tables[table].iter().map(|(&k, b)| (k, b.as_slice()))
    }
}

impl<T: Scalar> NeighborIndex<T> for LshIndex<T> {
    fn insert(&mut self, v: TermVector<T>) -> Result<(), LshError> {
        if self.ids.contains_key(v.doc_id()) {
            return Err(LshError::DuplicateDoc(v.doc_id().to_owned()));
        }
        let seq = self.ids.len() as u64;
        self.ids.insert(v.doc_id().to_owned(), seq);
        let doc = Arc::new(IndexedDoc { seq, vector: v });
        for (table, buckets) in self.tables.iter_mut().enumerate() {
            let sig = signature(&doc.vector, table, &self.params);
            buckets.entry(sig.bits).or_default().push(Arc::clone(&doc));
        }
        Ok(())
    }

    fn candidates(&self, q: &TermVector<T>) -> Vec<Arc<IndexedDoc<T>>> {
        let mut out: Vec<Arc<IndexedDoc<T>>> = Vec::new();
        for (table, buckets) in self.tables.iter().enumerate() {
            let sig = signature(q, table, &self.params);
            if let Some(bucket) = buckets.get(&sig.bits) {
                out.extend(bucket.iter().cloned());
            }
        }
        out.sort_unstable_by_key(|d| d.seq);
        out.dedup_by_key(|d| d.seq);
        out
    }

    fn len(&self) -> usize {
        self.ids.len()
    }
}

/// Brute-force index: every stored document is a candidate.
#[derive(Debug, Clone, Default)]
pub struct ExhaustiveIndex<T> {
    docs: Vec<Arc<IndexedDoc<T>>>,
    ids: HashMap<String, u64>,
}

impl<T: Scalar> ExhaustiveIndex<T> {
    pub fn new() -> Self {
        Self {
            docs: Vec::new(),
            ids: HashMap::new(),
        }
    }
}

impl<T: Scalar> NeighborIndex<T> for ExhaustiveIndex<T> {
    fn insert(&mut self, v: TermVector<T>) -> Result<(), LshError> {
        if self.ids.contains_key(v.doc_id()) {
            return Err(LshError::DuplicateDoc(v.doc_id().to_owned()));
        }
        let seq = self.docs.len() as u64;
        self.ids.insert(v.doc_id().to_owned(), seq);
        self.docs.push(Arc::new(IndexedDoc { seq, vector: v }));
        Ok(())
    }

    fn candidates(&self, _q: &TermVector<T>) -> Vec<Arc<IndexedDoc<T>>> {
        self.docs.clone()
    }

    fn len(&self) -> usize {
        self.docs.len()
    }
}
