//! Rule-based explain-then-predict system: recover the template by parsing,
//! render its explanation, then read the label off the explanation.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{read_examples, write_jsonl, Example};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::metrics::{has_indicator, write_predictions, Prediction};
use crate::registry::Registry;
use crate::template::Label;

pub const ABSTAIN_EXPLANATION: &str = "we do not know .";
pub const MAJORITY_EXPLANATION: &str = "the hypothesis follows .";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// Only the training templates are known.
    #[default]
    Restricted,
    /// Every registry template is known.
    ClosedBook,
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "restricted" => Ok(Scope::Restricted),
            "closed-book" => Ok(Scope::ClosedBook),
            _ => Err(format!("unknown scope `{s}` (expected restricted or closed-book)")),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Restricted => "restricted",
            Scope::ClosedBook => "closed-book",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// Emit the bare indicator phrase, so the label is non_entailment.
    #[default]
    Abstain,
    /// Emit a phrase-free sentence, so the label is entailment.
    Majority,
}

impl Fallback {
    pub fn explanation(self) -> &'static str {
        match self {
            Fallback::Abstain => ABSTAIN_EXPLANATION,
            Fallback::Majority => MAJORITY_EXPLANATION,
        }
    }
}

impl FromStr for Fallback {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "abstain" => Ok(Fallback::Abstain),
            "majority" => Ok(Fallback::Majority),
            _ => Err(format!("unknown fallback `{s}` (expected abstain or majority)")),
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fallback::Abstain => "abstain",
            Fallback::Majority => "majority",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct BaselineConfig {
    pub scope: Scope,
    /// Templates the restricted scope may match.
    pub training_template_ids: BTreeSet<String>,
    pub fallback: Fallback,
    pub log_fallbacks: bool,
}

impl BaselineConfig {
    pub fn validate(&self, registry: &Registry) -> Result<()> {
        match self.training_template_ids.iter().find(|id| registry.get(id).is_none()) {
            Some(id) => Err(Error::InvalidArgument(format!("training template `{id}` is not in the registry"))),
            None => Ok(()),
        }
    }
}

/// The explanation and whether a known template matched. Never fails:
/// unmatched and ambiguous inputs get the fallback explanation.
pub fn explain(
    premise: &str,
    hypothesis: &str,
    config: &BaselineConfig,
    registry: &Registry,
    lexicon: &Lexicon,
) -> (String, bool) {
    let parsed = match config.scope {
        Scope::Restricted => registry.parse_pair_among(premise, hypothesis, lexicon, |t| {
            config.training_template_ids.contains(&t.id)
        }),
        Scope::ClosedBook => registry.parse_pair(premise, hypothesis, lexicon),
    };
    match parsed {
        Ok(Some((t, b))) => match t.render_explanation(&b, lexicon) {
            Ok(e) => (e, true),
            Err(_) => (config.fallback.explanation().to_string(), false),
        },
        _ => (config.fallback.explanation().to_string(), false),
    }
}

pub fn predict(explanation: &str) -> Label {
    if has_indicator(explanation) {
        Label::NonEntailment
    } else {
        Label::Entailment
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackRecord {
    pub example_id: String,
}

/// Predictions in input order, plus ids of examples that used the fallback.
pub fn run_examples(
    examples: &[Example],
    config: &BaselineConfig,
    registry: &Registry,
    lexicon: &Lexicon,
) -> (Vec<Prediction>, Vec<String>) {
    let out: Vec<(Prediction, bool)> = examples
        .par_iter()
        .map(|e| {
            let (explanation, matched) = explain(&e.premise, &e.hypothesis, config, registry, lexicon);
            let label = predict(&explanation);
            (
                Prediction {
                    example_id: e.id.clone(),
                    generated_explanation: Some(explanation),
                    predicted_label: Some(label),
                },
                matched,
            )
        })
        .collect();
    let fallbacks = out
        .iter()
        .filter(|(_, m)| !m)
        .map(|(p, _)| p.example_id.clone())
        .collect();
    (out.into_iter().map(|(p, _)| p).collect(), fallbacks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub examples: usize,
    pub fallbacks: usize,
}

/// Reads examples, writes predictions and (if enabled) the fallback log.
pub fn run(
    examples_path: &Path,
    config: &BaselineConfig,
    registry: &Registry,
    lexicon: &Lexicon,
    out_path: &Path,
    fallback_log: &Path,
) -> Result<RunSummary> {
    config.validate(registry)?;
    let examples = read_examples(examples_path)?;
    let (preds, fallbacks) = run_examples(&examples, config, registry, lexicon);
    write_predictions(&preds, out_path)?;
    if config.log_fallbacks {
        let records: Vec<FallbackRecord> = fallbacks
            .iter()
            .map(|id| FallbackRecord { example_id: id.clone() })
            .collect();
        write_jsonl(&records, fallback_log)?;
    }
    Ok(RunSummary {
        examples: examples.len(),
        fallbacks: fallbacks.len(),
    })
}
