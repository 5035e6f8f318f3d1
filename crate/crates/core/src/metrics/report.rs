use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{read_examples, Example, Split};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::metrics::{is_hallucinated, read_predictions, tokenize, BleuStats, IndicatorStats, Prediction};
use crate::template::Label;

/// Integer tallies behind every rate; merging is exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub examples: u64,
    pub gold_entailment: u64,
    pub gold_non_entailment: u64,
    pub labeled: u64,
    pub correct: u64,
    pub explained: u64,
    pub hallucinated: u64,
    pub indicator: IndicatorStats,
    pub bleu: BleuStats,
}

impl Counts {
    fn add(&mut self, p: &Prediction, g: &Example, lexicon: &Lexicon) {
        self.examples += 1;
        match g.label {
            Label::Entailment => self.gold_entailment += 1,
            Label::NonEntailment => self.gold_non_entailment += 1,
        }
        if let Some(label) = p.predicted_label {
            self.labeled += 1;
            self.correct += u64::from(label == g.label);
        }
        if let Some(expl) = &p.generated_explanation {
            self.explained += 1;
            self.hallucinated += u64::from(is_hallucinated(expl, &g.premise, &g.hypothesis, lexicon));
            self.indicator.add(expl, &g.explanation);
            self.bleu.add(&tokenize(expl), &tokenize(&g.explanation));
        }
    }

    pub fn merge(&mut self, o: &Counts) {
        self.examples += o.examples;
        self.gold_entailment += o.gold_entailment;
        self.gold_non_entailment += o.gold_non_entailment;
        self.labeled += o.labeled;
        self.correct += o.correct;
        self.explained += o.explained;
        self.hallucinated += o.hallucinated;
        self.indicator.merge(&o.indicator);
        self.bleu.merge(&o.bleu);
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Rates for one group. Undefined rates (zero denominator) are omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub majority_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bleu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hallucination_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicator_precision: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicator_recall: Option<f64>,
    pub counts: Counts,
}

impl From<Counts> for GroupMetrics {
    fn from(c: Counts) -> Self {
        GroupMetrics {
            accuracy: ratio(c.correct, c.labeled),
            majority_accuracy: ratio(c.gold_entailment.max(c.gold_non_entailment), c.examples),
            bleu: (c.explained > 0).then(|| c.bleu.score()),
            hallucination_rate: ratio(c.hallucinated, c.explained),
            indicator_precision: c.indicator.precision(),
            indicator_recall: c.indicator.recall(),
            counts: c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Keyed by quadrant name for test examples, by split name otherwise.
    pub groups: BTreeMap<String, GroupMetrics>,
    pub overall: GroupMetrics,
    /// Prediction ids with no gold example.
    pub unmatched_ids: Vec<String>,
    /// Gold examples without a prediction, per group.
    pub coverage_gaps: BTreeMap<String, u64>,
}

fn group_of(e: &Example) -> String {
    match e.split {
        Split::Test => e.quadrant().name(),
        s => s.as_str().to_string(),
    }
}

/// Scores `predictions` against `gold`, per group and overall.
pub fn evaluate(predictions: &[Prediction], gold: &[Example], lexicon: &Lexicon) -> Result<EvalReport> {
    let mut index: HashMap<&str, &Example> = HashMap::with_capacity(gold.len());
    for g in gold {
        if index.insert(g.id.as_str(), g).is_some() {
            return Err(Error::InvalidArgument(format!("gold example id `{}` appears twice", g.id)));
        }
    }
    let mut seen = HashSet::with_capacity(predictions.len());
    let mut unmatched_ids = Vec::new();
    let mut pairs = Vec::with_capacity(predictions.len());
    for p in predictions {
        if !seen.insert(p.example_id.as_str()) {
            return Err(Error::InvalidArgument(format!("prediction for `{}` appears twice", p.example_id)));
        }
        match index.get(p.example_id.as_str()) {
            Some(g) => pairs.push((p, *g)),
            None => unmatched_ids.push(p.example_id.clone()),
        }
    }
    unmatched_ids.sort();

    let per_group: BTreeMap<String, Counts> = pairs
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<String, Counts>, (p, g)| {
            acc.entry(group_of(g)).or_default().add(p, g, lexicon);
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, c) in b {
                a.entry(k).or_default().merge(&c);
            }
            a
        });

    let mut overall = Counts::default();
    for c in per_group.values() {
        overall.merge(c);
    }
    let mut coverage_gaps = BTreeMap::new();
    for g in gold {
        if !seen.contains(g.id.as_str()) {
            *coverage_gaps.entry(group_of(g)).or_insert(0) += 1;
        }
    }
    Ok(EvalReport {
        groups: per_group.into_iter().map(|(k, c)| (k, c.into())).collect(),
        overall: overall.into(),
        unmatched_ids,
        coverage_gaps,
    })
}

/// Reads a predictions file and any number of gold example files, then evaluates.
pub fn evaluate_files(predictions: &Path, gold: &[impl AsRef<Path>], lexicon: &Lexicon) -> Result<EvalReport> {
    let preds = read_predictions(predictions)?;
    let mut examples = Vec::new();
    for path in gold {
        examples.extend(read_examples(path)?);
    }
    evaluate(&preds, &examples, lexicon)
}

impl EvalReport {
    /// Fixed-width text table, one row per group plus `overall`.
    pub fn to_table(&self) -> String {
        let cell = |v: Option<f64>| match v {
            Some(x) => format!("{x:.4}"),
            None => "-".to_string(),
        };
        let mut out = format!(
            "{:<22} {:>7} {:>8} {:>8} {:>9} {:>8} {:>8} {:>8}\n",
            "group", "n", "acc", "major", "bleu", "halluc", "ind_p", "ind_r"
        );
        let rows = self
            .groups
            .iter()
            .map(|(k, m)| (k.as_str(), m))
            .chain(std::iter::once(("overall", &self.overall)));
        for (name, m) in rows {
            let _ = writeln!(
                out,
                "{:<22} {:>7} {:>8} {:>8} {:>9} {:>8} {:>8} {:>8}",
                name,
                m.counts.examples,
                cell(m.accuracy),
                cell(m.majority_accuracy),
                m.bleu.map_or("-".to_string(), |b| format!("{b:.2}")),
                cell(m.hallucination_rate),
                cell(m.indicator_precision),
                cell(m.indicator_recall),
            );
        }
        if !self.unmatched_ids.is_empty() {
            let _ = writeln!(out, "unmatched predictions: {}", self.unmatched_ids.len());
        }
        let gaps: u64 = self.coverage_gaps.values().sum();
        if gaps > 0 {
            let _ = writeln!(out, "gold examples without prediction: {gaps}");
        }
        out
    }
}
