mod common;

use proptest::prelude::*;
use common::{small_lexicon, starter};
use templex::lexicon::{Feature, Partition};
use templex::metrics::{has_indicator, hallucinated_entities, tokenize};
use templex::registry::STARTER_TEMPLATES;
use templex::template::{enumerate_bindings, BindingSpace, Label};
use templex::Registry;

#[test]
fn exhaustive_round_trip_on_small_partitions() {
    let lex = &small_lexicon();
    let reg = Registry::parse(STARTER_TEMPLATES, "templates", lex).unwrap();
    let mut checked = 0usize;
    for t in reg.templates() {
        for partition in [Partition::Ind, Partition::Ood] {
            let space = enumerate_bindings(t, lex, partition).unwrap();
            let all: Vec<_> = space.iter().collect();
            assert_eq!(all.len() as u64, space.count());
            for b in all {
                let r = t.render(&b, lex).unwrap();
                let (pt, pb) = reg
                    .parse_pair(&r.premise, &r.hypothesis, lex)
                    .unwrap()
                    .unwrap_or_else(|| panic!("{}: `{}` did not parse", t.id, r.premise));
                assert_eq!((pt.id.as_str(), &pb), (t.id.as_str(), &b));
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn binding_count_matches_nested_loops() {
    let (lex, reg) = starter();
    let t = reg.get("le_around_prepositional_phrase_01").unwrap();
    let space = BindingSpace::new(t, lex, Partition::Ind).unwrap();
    let prof = lex.members(templex::lexicon::PosClass::Profession, Partition::Ind);
    let prep = lex.members(templex::lexicon::PosClass::Preposition, Partition::Ind);
    let verb = lex.members(templex::lexicon::PosClass::TransitiveVerb, Partition::Ind);
    let mut n = 0u64;
    for _p in &prep {
        for _v in &verb {
            for x in &prof {
                for y in &prof {
                    for z in &prof {
                        if x != y && y != z && x != z {
                            n += 1;
                        }
                    }
                }
            }
        }
    }
    assert_eq!(space.count(), n);
}

#[test]
fn non_matching_input() {
    let (lex, reg) = starter();
    assert!(reg.parse_pair("hello world .", "hello .", lex).unwrap().is_none());
    assert!(reg.parse_pair("", "", lex).unwrap().is_none());
}

fn arb_case() -> impl Strategy<Value = (usize, bool, u64)> {
    (0usize..118, any::<bool>(), any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn parse_inverts_render((ti, ood, raw) in arb_case()) {
        let (lex, reg) = starter();
        let t = &reg.templates()[ti];
        let partition = if ood { Partition::Ood } else { Partition::Ind };
        let space = BindingSpace::new(t, lex, partition).unwrap();
        let b = space.get(raw % space.count());
        let r = t.render(&b, lex).unwrap();
        let (pt, pb) = reg.parse_pair(&r.premise, &r.hypothesis, lex).unwrap().unwrap();
        prop_assert_eq!(&pt.id, &t.id);
        prop_assert_eq!(pb, b);
    }

    #[test]
    fn rendered_instances_keep_template_invariants((ti, ood, raw) in arb_case()) {
        let (lex, reg) = starter();
        let t = &reg.templates()[ti];
        let partition = if ood { Partition::Ood } else { Partition::Ind };
        let space = BindingSpace::new(t, lex, partition).unwrap();
        let b = space.get(raw % space.count());
        let r = t.render(&b, lex).unwrap();

        // Indicator phrase iff non-entailment.
        prop_assert_eq!(has_indicator(&r.explanation), t.label == Label::NonEntailment);
        // Gold explanations mention no entity absent from the input.
        prop_assert!(hallucinated_entities(&r.explanation, &r.premise, &r.hypothesis, lex).is_empty());
        // Rendering is already tokenized, ends in a period, and all slot fillers come from one partition.
        for s in [&r.premise, &r.hypothesis, &r.explanation] {
            prop_assert_eq!(tokenize(s).join(" "), s.to_string());
            prop_assert!(s.ends_with(" ."));
        }
        for (_, id) in b.iter() {
            prop_assert_eq!(lex.entry(id).partition, partition);
        }
        // Copula agreement: "is still the N" takes a singular N, "are still the N" a plural one.
        let toks = tokenize(&r.explanation);
        for w in toks.windows(4) {
            if w[1] == "still" && w[2] == "the" && (w[0] == "is" || w[0] == "are") {
                let want = if w[0] == "is" { Feature::Singular } else { Feature::Plural };
                prop_assert!(lex.lookup(&w[3]).iter().any(|x| x.feature == want), "{}", r.explanation);
            }
        }
    }

    #[test]
    fn render_is_deterministic((ti, raw) in (0usize..118, any::<u64>())) {
        let (lex, reg) = starter();
        let t = &reg.templates()[ti];
        let space = BindingSpace::new(t, lex, Partition::Ind).unwrap();
        let b = space.get(raw % space.count());
        prop_assert_eq!(t.render(&b, lex).unwrap(), t.render(&b, lex).unwrap());
    }
}
