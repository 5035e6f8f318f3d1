//! Explanation and label metrics, and the per-quadrant report.

mod bleu;
mod hallucination;
mod indicator;
mod report;
mod tokenize;

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use bleu::{bleu, sentence_bleu, BleuStats, MAX_N};
pub use hallucination::{hallucinated_entities, hallucination, is_hallucinated, HallucinationResult};
pub use indicator::{has_indicator, indicator_stats, IndicatorStats};
pub use report::{evaluate, evaluate_files, Counts, EvalReport, GroupMetrics};
pub use tokenize::{contains_run, tokenize};

use crate::corpus::{read_jsonl_checked, Example};
use crate::error::{Error, Result};
use crate::template::Label;

/// A system's output for one example.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub example_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_explanation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_label: Option<Label>,
}

impl Prediction {
    /// Gold explanation and label, as a perfect system would emit them.
    pub fn from_gold(example: &Example) -> Self {
        Prediction {
            example_id: example.id.clone(),
            generated_explanation: Some(example.explanation.clone()),
            predicted_label: Some(example.label),
        }
    }
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    read_jsonl_checked(path, |p: &Prediction| {
        if p.generated_explanation.is_none() && p.predicted_label.is_none() {
            Err(format!("prediction `{}` has neither explanation nor label", p.example_id))
        } else {
            Ok(())
        }
    })
}

pub fn write_predictions(preds: &[Prediction], path: impl AsRef<Path>) -> Result<()> {
    crate::corpus::write_jsonl(preds, path)
}

/// Pairs every prediction with its gold example; unknown ids are an error.
pub fn join<'a>(predictions: &'a [Prediction], gold: &'a [Example]) -> Result<Vec<(&'a Prediction, &'a Example)>> {
    let index: HashMap<&str, &Example> = gold.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut missing = Vec::new();
    let mut pairs = Vec::with_capacity(predictions.len());
    for p in predictions {
        match index.get(p.example_id.as_str()) {
            Some(g) => pairs.push((p, *g)),
            None => missing.push(p.example_id.clone()),
        }
    }
    if missing.is_empty() {
        Ok(pairs)
    } else {
        Err(Error::Join { ids: missing })
    }
}

/// Exact-match label accuracy; every prediction must carry a label.
pub fn accuracy(predictions: &[Prediction], gold: &[Example]) -> Result<f64> {
    let pairs = join(predictions, gold)?;
    let mut correct = 0usize;
    for (p, g) in &pairs {
        let label = p.predicted_label.ok_or_else(|| {
            Error::InvalidArgument(format!("prediction `{}` has no label", p.example_id))
        })?;
        correct += usize::from(label == g.label);
    }
    Ok(if pairs.is_empty() {
        0.0
    } else {
        correct as f64 / pairs.len() as f64
    })
}

/// Accuracy of always answering the most frequent gold label.
pub fn majority_accuracy(gold: &[Example]) -> f64 {
    if gold.is_empty() {
        return 0.0;
    }
    let ent = gold.iter().filter(|e| e.label == Label::Entailment).count();
    ent.max(gold.len() - ent) as f64 / gold.len() as f64
}
