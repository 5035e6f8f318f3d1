#![allow(dead_code)]

pub mod fixtures;

use std::collections::HashMap;
use std::sync::OnceLock;

use templex::lexicon::{Lexicon, STARTER_LEXICON};
use templex::Registry;

/// The starter lexicon and registry, validated once per test binary.
pub fn starter() -> (&'static Lexicon, &'static Registry) {
    static CELL: OnceLock<(Lexicon, Registry)> = OnceLock::new();
    let (lex, reg) = CELL.get_or_init(|| {
        let lex = Lexicon::starter();
        let reg = Registry::starter(&lex).unwrap();
        (lex, reg)
    });
    (lex, reg)
}

/// The starter lexicon cut down to a few entries per class and partition:
/// three professions, two verbs of each kind, one of everything else.
pub fn small_lexicon_text() -> String {
    let mut kept: HashMap<(String, String), usize> = HashMap::new();
    let mut text = String::new();
    for line in STARTER_LEXICON.lines() {
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if line.starts_with('#') || fields.len() != 4 {
            continue;
        }
        let cap = match fields[0] {
            "profession" => 3,
            "transitive_verb" | "intransitive_verb" => 2,
            _ => 1,
        };
        let n = kept.entry((fields[0].to_string(), fields[1].to_string())).or_default();
        if *n < cap {
            *n += 1;
            text.push_str(line);
            text.push('\n');
        }
    }
    text
}

pub fn small_lexicon() -> Lexicon {
    Lexicon::parse(&small_lexicon_text(), "small").unwrap()
}

/// The records for `ids`, cut out of the starter template file.
pub fn starter_subset(ids: &[&str]) -> String {
    let mut out = String::new();
    let mut keep = false;
    for line in templex::registry::STARTER_TEMPLATES.lines() {
        if let Some(rest) = line.strip_prefix("template ") {
            let id = rest.split('|').next().unwrap().trim();
            keep = ids.contains(&id);
        } else if !line.starts_with("  ") {
            keep = false;
        }
        if keep {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}
