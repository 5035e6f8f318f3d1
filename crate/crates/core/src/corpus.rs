//! Few-shot corpora: k training examples per training template, a small dev
//! set, and four fixed test quadrants (vocabulary × template condition).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, Partition};
use crate::registry::{FoldSplit, Registry};
use crate::rng;
use crate::template::{Binding, BindingSpace, Label, Template};

pub const DEFAULT_TEST_SIZE: usize = 300;

/// Train/dev draws for k up to this value never touch the IND test range.
pub const MAX_RESERVED_K: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Ind,
    Ood,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Ind => "ind",
            Condition::Ood => "ood",
        }
    }

    pub fn partition(self) -> Partition {
        match self {
            Condition::Ind => Partition::Ind,
            Condition::Ood => Partition::Ood,
        }
    }
}

/// One of the four test conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quadrant {
    pub vocab: Condition,
    pub template: Condition,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::new(Condition::Ind, Condition::Ind),
        Quadrant::new(Condition::Ind, Condition::Ood),
        Quadrant::new(Condition::Ood, Condition::Ind),
        Quadrant::new(Condition::Ood, Condition::Ood),
    ];

    pub const fn new(vocab: Condition, template: Condition) -> Self {
        Quadrant { vocab, template }
    }

    /// `indvocab_oodtemplate` and so on.
    pub fn name(self) -> String {
        format!("{}vocab_{}template", self.vocab.as_str(), self.template.as_str())
    }

    pub fn file_name(self) -> String {
        format!("test_{}.jsonl", self.name())
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Quadrant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Quadrant::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| format!("unknown quadrant `{s}`"))
    }
}

impl Serialize for Quadrant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Quadrant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example {
    pub id: String,
    pub premise: String,
    pub hypothesis: String,
    pub explanation: String,
    pub label: Label,
    pub template_id: String,
    /// Slot name to lemma.
    pub binding: BTreeMap<String, String>,
    pub vocab_condition: Condition,
    pub template_condition: Condition,
    pub split: Split,
}

impl Example {
    pub fn quadrant(&self) -> Quadrant {
        Quadrant::new(self.vocab_condition, self.template_condition)
    }

    fn build(
        template: &Template,
        binding: &Binding,
        lexicon: &Lexicon,
        split: Split,
        ordinal: usize,
        quadrant: Quadrant,
    ) -> Result<Self> {
        let r = template.render(binding, lexicon)?;
        Ok(Example {
            id: format!("{}:{}:{}", template.id, split.as_str(), ordinal),
            premise: r.premise,
            hypothesis: r.hypothesis,
            explanation: r.explanation,
            label: template.label,
            template_id: template.id.clone(),
            binding: binding.to_lemmas(lexicon),
            vocab_condition: quadrant.vocab,
            template_condition: quadrant.template,
            split,
        })
    }
}

/// Per-template dev size: 0.2k rounded half up, at least 1.
pub fn dev_count(k: usize) -> usize {
    ((2 * k + 5) / 10).max(1)
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub fold_split: FoldSplit,
    pub held_out_fold: usize,
    pub k: usize,
    pub master_seed: u64,
    pub test_size: usize,
}

impl ExperimentPlan {
    pub fn new(fold_split: FoldSplit, held_out_fold: usize, k: usize, master_seed: u64) -> Result<Self> {
        if held_out_fold >= fold_split.folds.len() {
            return Err(Error::InvalidArgument(format!(
                "fold must be in 0..{}, got {held_out_fold}",
                fold_split.folds.len()
            )));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(ExperimentPlan {
            fold_split,
            held_out_fold,
            k,
            master_seed,
            test_size: DEFAULT_TEST_SIZE,
        })
    }

    pub fn training_ids(&self) -> BTreeSet<String> {
        self.fold_split.training_ids(self.held_out_fold)
    }

    pub fn held_out_ids(&self) -> BTreeSet<String> {
        self.fold_split.fold(self.held_out_fold).iter().cloned().collect()
    }

    fn templates<'r>(&self, registry: &'r Registry, condition: Condition) -> Result<Vec<&'r Template>> {
        let ids = match condition {
            Condition::Ind => self.training_ids(),
            Condition::Ood => self.held_out_ids(),
        };
        ids.iter()
            .map(|id| {
                registry
                    .get(id)
                    .ok_or_else(|| Error::InvalidArgument(format!("fold split names unknown template `{id}`")))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    /// Fewer distinct bindings than requested; the rest were drawn with replacement.
    Exhausted,
    /// IND test bindings may repeat train/dev bindings.
    Overlap,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenerationWarning {
    pub template_id: String,
    /// `train`, `dev` or a quadrant name.
    pub set: String,
    pub kind: WarningKind,
    pub requested: usize,
    pub available: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub k: usize,
    pub fold: usize,
    pub seed: u64,
    pub dev_per_template: usize,
    pub test_per_template: usize,
    pub training_templates: Vec<String>,
    pub held_out_templates: Vec<String>,
    /// File stem to example count.
    pub counts: BTreeMap<String, usize>,
    pub warnings: Vec<GenerationWarning>,
}

impl GenerationReport {
    pub fn exhausted(&self, set: &str) -> bool {
        self.warnings
            .iter()
            .any(|w| w.set == set && w.kind == WarningKind::Exhausted)
    }
}

/// Binding indices for one (template, partition): a lazy seeded shuffle
/// of the canonical enumeration, read by position.
struct Draws {
    count: u64,
    order: rng::ShuffledIndices<rand_chacha::ChaCha8Rng>,
    seen: Vec<u64>,
}

impl Draws {
    fn new(count: u64, seed: u64, purpose: &str, template_id: &str) -> Self {
        Draws {
            count,
            order: rng::ShuffledIndices::new(count, rng::stream(seed, purpose, template_id)),
            seen: Vec::new(),
        }
    }

    /// Distinct positions `[start, end)` clipped to the supply.
    fn range(&mut self, start: usize, end: usize) -> Vec<u64> {
        let end = end.min(usize::try_from(self.count).unwrap_or(usize::MAX));
        while self.seen.len() < end {
            match self.order.next() {
                Some(i) => self.seen.push(i),
                None => break,
            }
        }
        self.seen.get(start..end).map(<[u64]>::to_vec).unwrap_or_default()
    }
}

/// Pads `picked` to `want` with draws taken with replacement, warning if needed.
fn pad(
    picked: &mut Vec<u64>,
    want: usize,
    count: u64,
    seed: u64,
    template_id: &str,
    set: &str,
    warnings: &mut Vec<GenerationWarning>,
) {
    if picked.len() >= want {
        return;
    }
    warnings.push(GenerationWarning {
        template_id: template_id.to_string(),
        set: set.to_string(),
        kind: WarningKind::Exhausted,
        requested: want,
        available: count,
    });
    let mut r = rng::stream(seed, &format!("replacement/{set}"), template_id);
    while picked.len() < want {
        picked.push(r.random_range(0..count));
    }
}

fn reserve(k: usize) -> usize {
    (MAX_RESERVED_K + dev_count(MAX_RESERVED_K)).max(k + dev_count(k))
}

struct TemplateOutput {
    examples: Vec<Example>,
    warnings: Vec<GenerationWarning>,
}

fn train_dev_for(
    template: &Template,
    plan: &ExperimentPlan,
    lexicon: &Lexicon,
) -> Result<(TemplateOutput, TemplateOutput)> {
    let space = BindingSpace::new(template, lexicon, Partition::Ind)?;
    let mut draws = Draws::new(space.count(), plan.master_seed, "bindings/ind", &template.id);
    let k = plan.k;
    let d = dev_count(k);
    let q = Quadrant::new(Condition::Ind, Condition::Ind);
    let mut out = Vec::new();
    for (split, start, want) in [(Split::Train, 0, k), (Split::Dev, k, d)] {
        let mut warnings = Vec::new();
        let mut picked = draws.range(start, start + want);
        pad(
            &mut picked,
            want,
            space.count(),
            plan.master_seed,
            &template.id,
            split.as_str(),
            &mut warnings,
        );
        let examples = picked
            .iter()
            .enumerate()
            .map(|(n, &i)| Example::build(template, &space.get(i), lexicon, split, n, q))
            .collect::<Result<_>>()?;
        out.push(TemplateOutput { examples, warnings });
    }
    let dev = out.pop().expect("two outputs");
    let train = out.pop().expect("two outputs");
    Ok((train, dev))
}

fn test_for(
    template: &Template,
    quadrant: Quadrant,
    plan: &ExperimentPlan,
    lexicon: &Lexicon,
) -> Result<TemplateOutput> {
    let n = plan.test_size;
    let space = BindingSpace::new(template, lexicon, quadrant.vocab.partition())?;
    let count = space.count();
    let set = quadrant.name();
    let mut warnings = Vec::new();
    let mut picked = match quadrant.vocab {
        Condition::Ind => {
            // Shares the train/dev stream; skips the positions train and dev can use.
            let mut draws = Draws::new(count, plan.master_seed, "bindings/ind", &template.id);
            let skip = reserve(plan.k);
            if count >= (skip + n) as u64 {
                draws.range(skip, skip + n)
            } else {
                if quadrant.template == Condition::Ind {
                    warnings.push(GenerationWarning {
                        template_id: template.id.clone(),
                        set: set.clone(),
                        kind: WarningKind::Overlap,
                        requested: n,
                        available: count,
                    });
                }
                draws.range(0, n)
            }
        }
        Condition::Ood => Draws::new(count, plan.master_seed, "bindings/ood", &template.id).range(0, n),
    };
    pad(&mut picked, n, count, plan.master_seed, &template.id, &set, &mut warnings);
    // OOD-vocab ordinals follow the IND-vocab ones so ids stay unique per template.
    let offset = match quadrant.vocab {
        Condition::Ind => 0,
        Condition::Ood => n,
    };
    let examples = picked
        .iter()
        .enumerate()
        .map(|(i, &b)| Example::build(template, &space.get(b), lexicon, Split::Test, offset + i, quadrant))
        .collect::<Result<_>>()?;
    Ok(TemplateOutput { examples, warnings })
}

fn flatten(parts: Vec<TemplateOutput>, warnings: &mut Vec<GenerationWarning>) -> Vec<Example> {
    let mut examples = Vec::new();
    for p in parts {
        examples.extend(p.examples);
        warnings.extend(p.warnings);
    }
    examples
}

/// k train and `dev_count(k)` dev examples per training template, IND
/// vocabulary only. Train is a prefix of the same draw sequence for every k.
pub fn generate_train_dev(
    plan: &ExperimentPlan,
    registry: &Registry,
    lexicon: &Lexicon,
) -> Result<(Vec<Example>, Vec<Example>, Vec<GenerationWarning>)> {
    let templates = plan.templates(registry, Condition::Ind)?;
    let parts: Vec<(TemplateOutput, TemplateOutput)> = templates
        .par_iter()
        .map(|t| train_dev_for(t, plan, lexicon))
        .collect::<Result<_>>()?;
    let (train, dev): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    let mut warnings = Vec::new();
    let train = flatten(train, &mut warnings);
    let dev = flatten(dev, &mut warnings);
    Ok((train, dev, warnings))
}

/// Test examples keyed by quadrant.
pub type TestSets = BTreeMap<Quadrant, Vec<Example>>;

/// The four test quadrants, `plan.test_size` examples per template each.
/// Independent of k as long as k does not exceed [`MAX_RESERVED_K`].
pub fn generate_test_quadrants(
    plan: &ExperimentPlan,
    registry: &Registry,
    lexicon: &Lexicon,
) -> Result<(TestSets, Vec<GenerationWarning>)> {
    let mut out = BTreeMap::new();
    let mut warnings = Vec::new();
    for quadrant in Quadrant::ALL {
        let templates = plan.templates(registry, quadrant.template)?;
        let parts: Vec<TemplateOutput> = templates
            .par_iter()
            .map(|t| test_for(t, quadrant, plan, lexicon))
            .collect::<Result<_>>()?;
        out.insert(quadrant, flatten(parts, &mut warnings));
    }
    Ok((out, warnings))
}

/// Everything `generate` writes, kept in memory.
pub struct Corpus {
    pub train: Vec<Example>,
    pub dev: Vec<Example>,
    pub test: TestSets,
    pub report: GenerationReport,
}

pub fn generate(plan: &ExperimentPlan, registry: &Registry, lexicon: &Lexicon) -> Result<Corpus> {
    let (train, dev, mut warnings) = generate_train_dev(plan, registry, lexicon)?;
    let (test, test_warnings) = generate_test_quadrants(plan, registry, lexicon)?;
    warnings.extend(test_warnings);
    warnings.sort();
    let mut counts = BTreeMap::new();
    counts.insert("train".to_string(), train.len());
    counts.insert("dev".to_string(), dev.len());
    for (q, examples) in &test {
        counts.insert(format!("test_{}", q.name()), examples.len());
    }
    let report = GenerationReport {
        k: plan.k,
        fold: plan.held_out_fold,
        seed: plan.master_seed,
        dev_per_template: dev_count(plan.k),
        test_per_template: plan.test_size,
        training_templates: plan.training_ids().into_iter().collect(),
        held_out_templates: plan.held_out_ids().into_iter().collect(),
        counts,
        warnings,
    };
    Ok(Corpus {
        train,
        dev,
        test,
        report,
    })
}

impl Corpus {
    /// Writes `train.jsonl`, `dev.jsonl`, the four quadrant files and `report.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_examples(&self.train, dir.join("train.jsonl"))?;
        write_examples(&self.dev, dir.join("dev.jsonl"))?;
        for (q, examples) in &self.test {
            write_examples(examples, dir.join(q.file_name()))?;
        }
        write_json(&self.report, dir.join("report.json"))
    }
}

pub(crate) fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invariant(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// JSON-lines writer shared by every record type.
pub fn write_jsonl<T: Serialize>(records: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)
            .map_err(|e| Error::Invariant(format!("serializing {}: {e}", path.display())))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// JSON-lines reader; blank lines are skipped, errors carry the line number.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    read_jsonl_checked(path, |_: &T| Ok(()))
}

/// [`read_jsonl`] with a per-record check whose message is reported at the record's line.
pub fn read_jsonl_checked<T: for<'de> Deserialize<'de>>(
    path: impl AsRef<Path>,
    check: impl Fn(&T) -> std::result::Result<(), String>,
) -> Result<Vec<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| e.to_string())
            .and_then(|r| check(&r).map(|()| r))
            .map_err(|message| Error::Record {
                file: path.display().to_string(),
                line: n + 1,
                message,
            })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_examples(examples: &[Example], path: impl AsRef<Path>) -> Result<()> {
    write_jsonl(examples, path)
}

pub fn read_examples(path: impl AsRef<Path>) -> Result<Vec<Example>> {
    read_jsonl(path)
}
