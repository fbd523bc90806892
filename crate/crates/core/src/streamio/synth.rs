//! Synthetic labelled news streams.
//!
//! Words are pronounceable consonant-vowel strings chosen so that each one
//! survives preprocessing as its own distinct term. A first story belongs to
//! one of a fixed set of categories and mixes that category's words (drawn
//! from the background vocabulary and shared by every event of the category)
//! with words from a fresh, never-before-used topic vocabulary and a few
//! Zipf-sampled background words. Every other document is a noisy copy of an earlier
//! first story: each token is replaced by a background word with probability
//! `duplicate_noise`. Independently, each document gains one brand-new word
//! with probability `drift_rate`.

use std::collections::HashSet;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::Document;
use crate::textprep::{stem, Stoplist};

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aiou";
const CATEGORIES: usize = 12;
const CATEGORY_WORDS: usize = 3;
const CATEGORY_TOKENS: usize = 6;
const TOPIC_WORDS: usize = 4;
const TOPIC_TOKENS: usize = 8;
const BACKGROUND_TOKENS: usize = 2;
const BASE_TS: i64 = 1_342_051_200_000;
const TS_STEP: i64 = 60_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid synthetic stream configuration: {0}")]
pub struct SynthError(String);

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub n_events: usize,
    /// Size of the shared background vocabulary.
    pub vocab_size: usize,
    /// Probability that a document carries one never-seen word.
    pub drift_rate: f64,
    /// Probability of replacing each copied token of a follow-up document.
    pub duplicate_noise: f64,
    pub seed: u64,
    /// Number of leading documents that are all first stories.
    pub lead_events: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_docs: 1000,
            n_events: 250,
            vocab_size: 2000,
            drift_rate: 0.05,
            duplicate_noise: 0.05,
            seed: 0,
            lead_events: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let err = |m: String| Err(SynthError(m));
        if self.n_events > self.n_docs {
            return err(format!(
                "{} events exceed {} documents",
                self.n_events, self.n_docs
            ));
        }
        if self.n_docs > 0 && self.n_events == 0 {
            return err("a non-empty stream needs at least one event".into());
        }
        if self.lead_events > self.n_events {
            return err(format!(
                "{} leading first stories exceed {} events",
                self.lead_events, self.n_events
            ));
        }
        if self.vocab_size == 0 {
            return err("background vocabulary must be non-empty".into());
        }
        for (name, r) in [("drift", self.drift_rate), ("noise", self.duplicate_noise)] {
            if !(0.0..=1.0).contains(&r) {
                return err(format!("{name} rate must be in [0,1], got {r}"));
            }
        }
        Ok(())
    }
}

/// Enumerates non-stopword words whose stems are pairwise distinct.
struct WordSource {
    next: u64,
    stems: HashSet<String>,
    stoplist: Stoplist,
}

impl WordSource {
    fn new() -> Self {
        Self {
            next: 0,
            stems: HashSet::new(),
            stoplist: Stoplist::english(),
        }
    }

    fn spell(mut n: u64) -> String {
        let base = (CONSONANTS.len() * VOWELS.len()) as u64;
        let mut w = String::new();
        // at least three syllables
        while w.len() < 6 || n > 0 {
            let s = (n % base) as usize;
            n /= base;
            w.push(CONSONANTS[s / VOWELS.len()] as char);
            w.push(VOWELS[s % VOWELS.len()] as char);
        }
        w
    }

    fn fresh(&mut self) -> String {
        loop {
            let w = Self::spell(self.next);
            self.next += 1;
            if self.stoplist.contains(&w) {
                continue;
            }
            if self.stems.insert(stem(&w)) {
                return w;
            }
        }
    }
}

/// Generates a labelled stream; identical configs give identical streams.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Vec<Document>, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // word enumeration is seed-independent; the seed picks where it starts
    let mut words = WordSource::new();
    words.next = rng.gen_range(0..1 << 20);
    let background: Vec<String> = (0..cfg.vocab_size).map(|_| words.fresh()).collect();
    let zipf =
        WeightedIndex::new((1..=cfg.vocab_size).map(|r| 1.0 / r as f64)).expect("positive weights");
    let categories: Vec<Vec<&str>> = (0..CATEGORIES)
        .map(|_| {
            (0..CATEGORY_WORDS)
                .map(|_| background[rng.gen_range(0..background.len())].as_str())
                .collect()
        })
        .collect();

    let mut is_first = vec![false; cfg.n_docs];
    is_first[..cfg.lead_events]
        .iter_mut()
        .for_each(|f| *f = true);
    let lead = cfg.lead_events.max(1).min(cfg.n_docs);
    if cfg.n_docs > 0 {
        is_first[0] = true;
    }
    let placed = is_first.iter().filter(|&&f| f).count();
    let remaining: Vec<usize> = (lead..cfg.n_docs).collect();
    for &i in remaining.choose_multiple(&mut rng, cfg.n_events - placed) {
        is_first[i] = true;
    }

    // (first-story id, its tokens)
    let mut events: Vec<(String, Vec<String>)> = Vec::with_capacity(cfg.n_events);
    let mut docs = Vec::with_capacity(cfg.n_docs);
    for (i, &first) in is_first.iter().enumerate() {
        let id = format!("d{i:06}");
        let (tokens, label) = if first {
            let topic: Vec<String> = (0..TOPIC_WORDS).map(|_| words.fresh()).collect();
            let category = &categories[rng.gen_range(0..CATEGORIES)];
            let mut tokens = Vec::with_capacity(CATEGORY_TOKENS + TOPIC_TOKENS + BACKGROUND_TOKENS);
            for _ in 0..CATEGORY_TOKENS {
                tokens.push(category[rng.gen_range(0..category.len())].to_owned());
            }
            for _ in 0..TOPIC_TOKENS {
                tokens.push(topic[rng.gen_range(0..topic.len())].clone());
            }
            for _ in 0..BACKGROUND_TOKENS {
                tokens.push(background[zipf.sample(&mut rng)].clone());
            }
            tokens.shuffle(&mut rng);
            events.push((id.clone(), tokens.clone()));
            (tokens, id.clone())
        } else {
            let (source, src_tokens) = events.choose(&mut rng).expect("an earlier event");
            let tokens = src_tokens
                .iter()
                .map(|t| {
                    if rng.gen_bool(cfg.duplicate_noise) {
                        background[zipf.sample(&mut rng)].clone()
                    } else {
                        t.clone()
                    }
                })
                .collect();
            (tokens, source.clone())
        };
        let mut tokens = tokens;
        if rng.gen_bool(cfg.drift_rate) {
            let at = rng.gen_range(0..=tokens.len());
            tokens.insert(at, words.fresh());
        }
        docs.push(Document {
            id,
            ts: BASE_TS + TS_STEP * i as i64,
            text: tokens.join(" "),
            label: Some(label),
        });
    }
    Ok(docs)
}
