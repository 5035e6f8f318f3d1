use serde::{Deserialize, Serialize};

use crate::corpus::Example;
use crate::error::Result;
use crate::metrics::{contains_run, join, tokenize, Prediction};
use crate::template::INDICATOR_PHRASE;

pub fn has_indicator(text: &str) -> bool {
    contains_run(&tokenize(text), &INDICATOR_PHRASE)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorStats {
    /// Generated explanations containing the phrase.
    pub generated: u64,
    /// Gold explanations containing the phrase.
    pub gold: u64,
    /// Both contain it.
    pub both: u64,
}

impl IndicatorStats {
    pub fn add(&mut self, generated: &str, gold: &str) {
        let (g, r) = (has_indicator(generated), has_indicator(gold));
        self.generated += u64::from(g);
        self.gold += u64::from(r);
        self.both += u64::from(g && r);
    }

    pub fn merge(&mut self, other: &IndicatorStats) {
        self.generated += other.generated;
        self.gold += other.gold;
        self.both += other.both;
    }

    /// Absent when no generated explanation contains the phrase.
    pub fn precision(&self) -> Option<f64> {
        (self.generated > 0).then(|| self.both as f64 / self.generated as f64)
    }

    /// Absent when no gold explanation contains the phrase.
    pub fn recall(&self) -> Option<f64> {
        (self.gold > 0).then(|| self.both as f64 / self.gold as f64)
    }
}

/// Counts over predictions that carry an explanation.
pub fn indicator_stats(predictions: &[Prediction], gold: &[Example]) -> Result<IndicatorStats> {
    let mut s = IndicatorStats::default();
    for (p, g) in join(predictions, gold)? {
        if let Some(expl) = &p.generated_explanation {
            s.add(expl, &g.explanation);
        }
    }
    Ok(s)
}
