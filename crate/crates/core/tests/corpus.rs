mod common;

use std::collections::{BTreeMap, HashSet};

use common::{small_lexicon, starter, starter_subset};
use templex::corpus::{
    dev_count, generate, read_examples, write_examples, Condition, Corpus, ExperimentPlan, Quadrant, Split,
    WarningKind,
};
use templex::registry::{split_folds, FOLDS, STARTER_TEMPLATES};
use templex::template::{Binding, Label};
use templex::{Error, Registry};

const SEED: u64 = 7;

fn corpus(k: usize, fold: usize) -> Corpus {
    let (lex, reg) = starter();
    let plan = ExperimentPlan::new(split_folds(reg, SEED), fold, k, SEED).unwrap();
    generate(&plan, reg, lex).unwrap()
}

#[test]
fn folds_partition_the_registry() {
    let (_, reg) = starter();
    let split = split_folds(reg, SEED);
    assert_eq!(split.folds.len(), FOLDS);
    let sizes: Vec<usize> = split.folds.iter().map(Vec::len).collect();
    assert_eq!(sizes, [24, 24, 24, 23, 23]);
    let all: HashSet<&String> = split.folds.iter().flatten().collect();
    assert_eq!(all.len(), reg.len());
    for f in 0..FOLDS {
        let train = split.training_ids(f);
        assert_eq!(train.len() + split.fold(f).len(), reg.len());
        assert!(split.fold(f).iter().all(|id| !train.contains(id)));
    }
    assert_eq!(split, split_folds(reg, SEED));
    assert_ne!(split, split_folds(reg, SEED + 1));
}

#[test]
fn five_templates_give_one_per_fold() {
    let lex = starter().0;
    let text = starter_subset(&[
        "ln_subject_object_swap_01",
        "le_passive_01",
        "sn_np_s_01",
        "cn_embedded_under_if_01",
        "ce_embedded_under_since_03",
    ]);
    let reg = Registry::parse(&text, "five", lex).unwrap();
    assert_eq!(reg.len(), 5);
    let split = split_folds(&reg, SEED);
    assert!(split.folds.iter().all(|f| f.len() == 1));

    let plan = ExperimentPlan::new(split.clone(), 2, 4, SEED).unwrap();
    let c = generate(&plan, &reg, lex).unwrap();
    assert_eq!(c.train.len(), 4 * 4);
    assert_eq!(c.dev.len(), 4 * dev_count(4));
    assert!(c.train.iter().all(|e| e.template_id != split.fold(2)[0]));
    for (q, examples) in &c.test {
        let templates = if q.template == Condition::Ind { 4 } else { 1 };
        assert_eq!(examples.len(), templates * 300, "{}", q.name());
    }
}

#[test]
fn dev_sizes() {
    let got: Vec<usize> = [1, 2, 4, 8, 16].into_iter().map(dev_count).collect();
    assert_eq!(got, [1, 1, 1, 2, 3]);
}

#[test]
fn split_arithmetic_and_invariants() {
    let (lex, reg) = starter();
    let c = corpus(16, 0);
    let split = split_folds(reg, SEED);
    let n_train = split.training_ids(0).len();
    let n_held = split.fold(0).len();
    assert_eq!(c.train.len(), 16 * n_train);
    assert_eq!(c.dev.len(), 3 * n_train);
    assert!(c.report.warnings.is_empty(), "{:?}", c.report.warnings);

    let mut ids = HashSet::new();
    let all = c.train.iter().chain(&c.dev).chain(c.test.values().flatten());
    for e in all {
        assert!(ids.insert(e.id.clone()), "duplicate id {}", e.id);
        let t = reg.get(&e.template_id).unwrap();
        assert_eq!(e.label, t.label);
        let in_train = split.training_ids(0).contains(&e.template_id);
        let want = if in_train { Condition::Ind } else { Condition::Ood };
        assert_eq!(e.template_condition, want, "{}", e.id);
        // Every slot filler comes from the example's vocabulary partition.
        let b = Binding::from_lemmas(t, &e.binding, lex).unwrap();
        for (_, id) in b.iter() {
            assert_eq!(lex.entry(id).partition, e.vocab_condition.partition(), "{}", e.id);
        }
    }

    let train_ids = split.training_ids(0);
    for q in Quadrant::ALL {
        let examples = &c.test[&q];
        let templates: Vec<&str> = match q.template {
            Condition::Ind => train_ids.iter().map(String::as_str).collect(),
            Condition::Ood => split.fold(0).iter().map(String::as_str).collect(),
        };
        assert_eq!(examples.len(), 300 * templates.len(), "{}", q.name());
        assert_eq!(templates.len(), if q.template == Condition::Ind { n_train } else { n_held });
        assert!(examples.iter().all(|e| e.split == Split::Test && e.quadrant() == q));
        // Label balance follows the template labels, 300 each.
        let ent_templates = templates
            .iter()
            .filter(|id| reg.get(id).unwrap().label == Label::Entailment)
            .count();
        let ent = examples.iter().filter(|e| e.label == Label::Entailment).count();
        assert_eq!(ent, 300 * ent_templates, "{}", q.name());
    }

    // IND-vocabulary test bindings never repeat a train or dev binding of the same template.
    let seen: HashSet<(&str, &BTreeMap<String, String>)> = c
        .train
        .iter()
        .chain(&c.dev)
        .map(|e| (e.template_id.as_str(), &e.binding))
        .collect();
    for q in [Quadrant::new(Condition::Ind, Condition::Ind)] {
        for e in &c.test[&q] {
            assert!(!seen.contains(&(e.template_id.as_str(), &e.binding)), "{}", e.id);
        }
    }
}

#[test]
fn every_example_parses_back_to_its_template() {
    let (lex, reg) = starter();
    let c = corpus(4, 1);
    let all: Vec<_> = c.train.iter().chain(&c.dev).chain(c.test.values().flatten()).collect();
    for e in all.iter().step_by(5) {
        let (t, b) = reg.parse_pair(&e.premise, &e.hypothesis, lex).unwrap().unwrap();
        assert_eq!(t.id, e.template_id);
        assert_eq!(b.to_lemmas(lex), e.binding);
    }
}

#[test]
fn train_is_nested_across_k_and_test_is_fixed() {
    let c1 = corpus(1, 0);
    let c4 = corpus(4, 0);
    let c16 = corpus(16, 0);
    let by_id = |c: &Corpus| -> BTreeMap<String, templex::corpus::Example> {
        c.train.iter().map(|e| (e.id.clone(), e.clone())).collect()
    };
    let (m1, m4, m16) = (by_id(&c1), by_id(&c4), by_id(&c16));
    for (small, big) in [(&m1, &m4), (&m4, &m16)] {
        for (id, e) in small {
            assert_eq!(big.get(id), Some(e), "{id}");
        }
    }
    assert_eq!(c1.test, c4.test);
    assert_eq!(c4.test, c16.test);
}

#[test]
fn generation_is_deterministic() {
    let a = corpus(2, 3);
    let b = corpus(2, 3);
    assert_eq!(a.train, b.train);
    assert_eq!(a.dev, b.dev);
    assert_eq!(a.test, b.test);
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    a.write_dir(dir_a.path()).unwrap();
    b.write_dir(dir_b.path()).unwrap();
    for entry in std::fs::read_dir(dir_a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        let x = std::fs::read(dir_a.path().join(&name)).unwrap();
        let y = std::fs::read(dir_b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn small_supply_pads_and_warns() {
    let lex = &small_lexicon();
    let reg = Registry::parse(STARTER_TEMPLATES, "templates", lex).unwrap();
    let plan = ExperimentPlan::new(split_folds(&reg, SEED), 0, 16, SEED).unwrap();
    let c = generate(&plan, &reg, lex).unwrap();
    assert_eq!(c.train.len(), 16 * plan.training_ids().len());
    for examples in c.test.values() {
        assert_eq!(examples.len() % 300, 0);
    }
    assert!(c.report.exhausted("indvocab_indtemplate"));
    assert!(c.report.warnings.iter().any(|w| w.kind == WarningKind::Overlap));
    for w in &c.report.warnings {
        assert!(w.available < w.requested as u64 + 19, "{w:?}");
    }
    // Padded output is still deterministic.
    let again = generate(&plan, &reg, lex).unwrap();
    assert_eq!(c.test, again.test);
    assert_eq!(c.report, again.report);
}

#[test]
fn plan_rejects_bad_arguments() {
    let (_, reg) = starter();
    let split = split_folds(reg, SEED);
    assert!(matches!(ExperimentPlan::new(split.clone(), 0, 0, SEED), Err(Error::InvalidArgument(_))));
    assert!(matches!(ExperimentPlan::new(split, FOLDS, 1, SEED), Err(Error::InvalidArgument(_))));
}

#[test]
fn jsonl_round_trip() {
    let c = corpus(1, 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.jsonl");
    write_examples(&c.train, &path).unwrap();
    assert_eq!(read_examples(&path).unwrap(), c.train);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), c.train.len());
    assert!(text.ends_with('\n'));
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "id",
        "premise",
        "hypothesis",
        "explanation",
        "label",
        "template_id",
        "binding",
        "vocab_condition",
        "template_condition",
        "split",
    ] {
        assert!(keys.contains(&k), "{k}");
    }
}

#[test]
fn jsonl_errors_carry_line_numbers() {
    let c = corpus(1, 4);
    let dir = tempfile::tempdir().unwrap();

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    assert!(read_examples(&empty).unwrap().is_empty());

    let bad = dir.path().join("bad.jsonl");
    let good = serde_json::to_string(&c.train[0]).unwrap();
    let mut broken: serde_json::Value = serde_json::from_str(&good).unwrap();
    broken.as_object_mut().unwrap().remove("label");
    std::fs::write(&bad, format!("{good}\n\n{broken}\n")).unwrap();
    match read_examples(&bad) {
        Err(Error::Record { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("label"), "{message}");
        }
        other => panic!("expected a record error, got {other:?}"),
    }

    let extra = dir.path().join("extra.jsonl");
    let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
    v["surprise"] = serde_json::json!(1);
    std::fs::write(&extra, format!("{v}\n")).unwrap();
    assert!(matches!(read_examples(&extra), Err(Error::Record { line: 1, .. })));

    let missing = dir.path().join("missing.jsonl");
    assert!(matches!(read_examples(&missing), Err(Error::Io { .. })));
}
