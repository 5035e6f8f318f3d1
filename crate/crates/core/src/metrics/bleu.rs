//! Corpus BLEU over pre-tokenized text: one reference per candidate,
//! n = 1..4, uniform weights, no smoothing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_N: usize = 4;

/// Pooled clipped n-gram counts; merging then scoring equals scoring the union.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub matches: [u64; MAX_N],
    pub totals: [u64; MAX_N],
    pub candidate_len: u64,
    pub reference_len: u64,
}

fn ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, u64> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
    }
    counts
}

impl BleuStats {
    pub fn add<S: AsRef<str>, T: AsRef<str>>(&mut self, candidate: &[S], reference: &[T]) {
        self.candidate_len += candidate.len() as u64;
        self.reference_len += reference.len() as u64;
        for n in 1..=MAX_N {
            let refs = ngrams(reference, n);
            for (gram, c) in ngrams(candidate, n) {
                self.matches[n - 1] += c.min(refs.get(&gram).copied().unwrap_or(0));
            }
            self.totals[n - 1] += candidate.len().saturating_sub(n - 1) as u64;
        }
    }

    pub fn merge(&mut self, other: &BleuStats) {
        for n in 0..MAX_N {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.candidate_len += other.candidate_len;
        self.reference_len += other.reference_len;
    }

    pub fn brevity_penalty(&self) -> f64 {
        let (c, r) = (self.candidate_len as f64, self.reference_len as f64);
        if self.candidate_len == 0 {
            0.0
        } else if c > r {
            1.0
        } else {
            (1.0 - r / c).exp()
        }
    }

    /// Score in [0, 100]; 0 when any pooled precision is 0.
    pub fn score(&self) -> f64 {
        if self.candidate_len == 0 || (0..MAX_N).any(|n| self.matches[n] == 0) {
            return 0.0;
        }
        let log_p: f64 = (0..MAX_N)
            .map(|n| (self.matches[n] as f64 / self.totals[n] as f64).ln())
            .sum::<f64>()
            / MAX_N as f64;
        100.0 * self.brevity_penalty() * log_p.exp()
    }
}

/// Corpus BLEU of `candidates` against `references`, paired by position.
pub fn bleu<S: AsRef<str>, T: AsRef<str>>(candidates: &[Vec<S>], references: &[Vec<T>]) -> Result<f64> {
    if candidates.len() != references.len() {
        return Err(Error::InvalidArgument(format!(
            "bleu: {} candidates but {} references",
            candidates.len(),
            references.len()
        )));
    }
    let mut stats = BleuStats::default();
    for (i, (c, r)) in candidates.iter().zip(references).enumerate() {
        if r.is_empty() {
            return Err(Error::InvalidArgument(format!("bleu: reference {i} is empty")));
        }
        stats.add(c, r);
    }
    Ok(stats.score())
}

/// Add-one smoothed sentence BLEU, for inspecting single outputs.
pub fn sentence_bleu<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T]) -> f64 {
    let mut s = BleuStats::default();
    s.add(candidate, reference);
    if s.candidate_len == 0 {
        return 0.0;
    }
    let log_p: f64 = (0..MAX_N)
        .map(|n| ((s.matches[n] + 1) as f64 / (s.totals[n] + 1) as f64).ln())
        .sum::<f64>()
        / MAX_N as f64;
    100.0 * s.brevity_penalty() * log_p.exp()
}
