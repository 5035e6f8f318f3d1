//! Paired premise/hypothesis/explanation templates and their slot bindings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Feature, LexemeId, Lexicon, Partition, PosClass};

/// The contiguous token sequence that marks a non-entailment explanation.
pub const INDICATOR_PHRASE: [&str; 4] = ["we", "do", "not", "know"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    LexicalOverlap,
    Subsequence,
    Constituent,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [
        Heuristic::LexicalOverlap,
        Heuristic::Subsequence,
        Heuristic::Constituent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Heuristic::LexicalOverlap => "lexical_overlap",
            Heuristic::Subsequence => "subsequence",
            Heuristic::Constituent => "constituent",
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Heuristic::ALL
            .into_iter()
            .find(|h| h.as_str() == s)
            .ok_or_else(|| format!("unknown heuristic `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Entailment,
    NonEntailment,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Entailment => "entailment",
            Label::NonEntailment => "non_entailment",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "entailment" => Ok(Label::Entailment),
            "non_entailment" => Ok(Label::NonEntailment),
            _ => Err(format!("unknown label `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Number {
    Singular,
    Plural,
}

impl Number {
    pub fn feature(self) -> Feature {
        match self {
            Number::Singular => Feature::Singular,
            Number::Plural => Feature::Plural,
        }
    }
}

impl FromStr for Number {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sg" | "singular" => Ok(Number::Singular),
            "pl" | "plural" => Ok(Number::Plural),
            _ => Err(format!("unknown number `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotDecl {
    pub pos_class: PosClass,
    /// Fixed for nouns; `None` for every other class.
    pub number: Option<Number>,
}

impl SlotDecl {
    /// Feature used when a reference omits one.
    pub fn default_feature(&self) -> Option<Feature> {
        match (self.number, self.pos_class.required_features()) {
            (Some(n), _) => Some(n.feature()),
            (None, [only]) => Some(*only),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Literal(String),
    Slot { name: String, feature: Feature },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    elements: Vec<Element>,
}

impl Pattern {
    pub fn new(elements: Vec<Element>) -> Self {
        Pattern { elements }
    }

    /// Parses whitespace-separated tokens; `{name}` and `{name:feature}` are slot references.
    pub fn parse(text: &str, slots: &BTreeMap<String, SlotDecl>) -> std::result::Result<Self, String> {
        let mut elements = Vec::new();
        for tok in text.split_whitespace() {
            if let Some(inner) = tok.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
                let (name, feature) = match inner.split_once(':') {
                    Some((n, f)) => (n, Some(f.parse::<Feature>()?)),
                    None => (inner, None),
                };
                let decl = slots
                    .get(name)
                    .ok_or_else(|| format!("slot `{name}` is not declared"))?;
                let feature = feature.or_else(|| decl.default_feature()).ok_or_else(|| {
                    format!("slot `{name}` ({}) needs an explicit feature", decl.pos_class)
                })?;
                elements.push(Element::Slot {
                    name: name.to_string(),
                    feature,
                });
            } else if tok.contains(['{', '}']) {
                return Err(format!("malformed slot reference `{tok}`"));
            } else {
                elements.push(Element::Literal(tok.to_string()));
            }
        }
        if elements.is_empty() {
            return Err("empty pattern".into());
        }
        Ok(Pattern { elements })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn slot_names(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().filter_map(|e| match e {
            Element::Slot { name, .. } => Some(name.as_str()),
            Element::Literal(_) => None,
        })
    }

    /// True when `phrase` occurs as contiguous literal tokens.
    pub fn contains_literal_run(&self, phrase: &[&str]) -> bool {
        self.elements.windows(phrase.len()).any(|w| {
            w.iter()
                .zip(phrase)
                .all(|(e, p)| matches!(e, Element::Literal(l) if l == p))
        })
    }

    pub fn render_tokens<'a>(
        &'a self,
        binding: &Binding,
        lexicon: &'a Lexicon,
    ) -> Result<Vec<&'a str>> {
        self.elements
            .iter()
            .map(|e| match e {
                Element::Literal(l) => Ok(l.as_str()),
                Element::Slot { name, feature } => {
                    let id = binding.get(name).ok_or_else(|| Error::BindingMismatch {
                        template: String::new(),
                        message: format!("slot `{name}` is unbound"),
                    })?;
                    lexicon.entry(id).inflect(*feature)
                }
            })
            .collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match e {
                Element::Literal(l) => f.write_str(l)?,
                Element::Slot { name, feature } => write!(f, "{{{name}:{feature}}}")?,
            }
        }
        Ok(())
    }
}

/// Assignment of lexemes to a template's slots.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding {
    assignments: BTreeMap<String, LexemeId>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, slot: impl Into<String>, lexeme: LexemeId) {
        self.assignments.insert(slot.into(), lexeme);
    }

    pub fn get(&self, slot: &str) -> Option<LexemeId> {
        self.assignments.get(slot).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, LexemeId)> {
        self.assignments.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Serialized form: slot name to lemma.
    pub fn to_lemmas(&self, lexicon: &Lexicon) -> BTreeMap<String, String> {
        self.assignments
            .iter()
            .map(|(k, v)| (k.clone(), lexicon.entry(*v).lemma.clone()))
            .collect()
    }

    pub fn from_lemmas(
        template: &Template,
        lemmas: &BTreeMap<String, String>,
        lexicon: &Lexicon,
    ) -> Result<Self> {
        let mut binding = Binding::new();
        for (slot, lemma) in lemmas {
            let decl = template.slots.get(slot).ok_or_else(|| Error::BindingMismatch {
                template: template.id.clone(),
                message: format!("unknown slot `{slot}`"),
            })?;
            let id = lexicon
                .find(decl.pos_class, lemma)
                .ok_or_else(|| Error::BindingMismatch {
                    template: template.id.clone(),
                    message: format!("no {} named `{lemma}`", decl.pos_class),
                })?;
            binding.insert(slot.clone(), id);
        }
        template.check_binding(&binding, lexicon)?;
        Ok(binding)
    }
}

/// The three rendered strings of one instance, tokens joined by single spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    pub premise: String,
    pub hypothesis: String,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub id: String,
    pub heuristic: Heuristic,
    pub subcase: String,
    pub label: Label,
    pub slots: BTreeMap<String, SlotDecl>,
    pub premise: Pattern,
    pub hypothesis: Pattern,
    pub explanation: Pattern,
}

impl Template {
    /// Checks the rules every template must satisfy on its own.
    pub fn validate(&self) -> Result<()> {
        let fail = |rule, message: String| Error::Template {
            template: self.id.clone(),
            rule,
            message,
        };

        for (name, decl) in &self.slots {
            if decl.pos_class.is_noun() != decl.number.is_some() {
                return Err(fail(
                    "slot declaration",
                    format!("slot `{name}`: nouns take a number, other classes do not"),
                ));
            }
        }

        for pattern in [&self.premise, &self.hypothesis, &self.explanation] {
            for e in pattern.elements() {
                match e {
                    Element::Literal(l) => {
                        if l.is_empty()
                            || l.chars().any(char::is_whitespace)
                            || l.to_lowercase() != *l
                        {
                            return Err(fail("literal token", format!("`{l}` is not a lowercase token")));
                        }
                    }
                    Element::Slot { name, feature } => {
                        let decl = self.slots.get(name).ok_or_else(|| {
                            fail("undeclared slot", format!("`{name}` is not declared"))
                        })?;
                        if !decl.pos_class.required_features().contains(feature) {
                            return Err(fail(
                                "slot feature",
                                format!("`{name}` ({}) has no `{feature}` form", decl.pos_class),
                            ));
                        }
                    }
                }
            }
        }

        let input: BTreeSet<&str> = self
            .premise
            .slot_names()
            .chain(self.hypothesis.slot_names())
            .collect();
        if let Some(extra) = self.explanation.slot_names().find(|s| !input.contains(s)) {
            return Err(fail(
                "no-new-content rule",
                format!("explanation uses `{extra}`, absent from premise and hypothesis"),
            ));
        }
        if let Some(unused) = self.slots.keys().find(|s| !input.contains(s.as_str())) {
            return Err(fail(
                "unused slot",
                format!("`{unused}` never appears in premise or hypothesis"),
            ));
        }

        let has_phrase = self.explanation.contains_literal_run(&INDICATOR_PHRASE);
        if has_phrase != (self.label == Label::NonEntailment) {
            return Err(fail(
                "indicator-phrase rule",
                format!(
                    "label {} but explanation {} \"we do not know\"",
                    self.label,
                    if has_phrase { "contains" } else { "lacks" }
                ),
            ));
        }
        Ok(())
    }

    /// Binding covers exactly the declared slots, with matching classes and
    /// distinct lexemes for same-class slots.
    pub fn check_binding(&self, binding: &Binding, lexicon: &Lexicon) -> Result<()> {
        let fail = |message: String| Error::BindingMismatch {
            template: self.id.clone(),
            message,
        };
        if binding.len() != self.slots.len() {
            return Err(fail(format!(
                "expected {} slots, got {}",
                self.slots.len(),
                binding.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for (name, decl) in &self.slots {
            let id = binding
                .get(name)
                .ok_or_else(|| fail(format!("slot `{name}` is unbound")))?;
            let entry = lexicon.entry(id);
            if entry.pos_class != decl.pos_class {
                return Err(fail(format!(
                    "slot `{name}` wants {}, got `{}` ({})",
                    decl.pos_class, entry.lemma, entry.pos_class
                )));
            }
            if !seen.insert(id) {
                return Err(fail(format!(
                    "`{}` bound to more than one {} slot",
                    entry.lemma, decl.pos_class
                )));
            }
        }
        Ok(())
    }

    pub fn render(&self, binding: &Binding, lexicon: &Lexicon) -> Result<Rendered> {
        self.check_binding(binding, lexicon)?;
        let join = |p: &Pattern| p.render_tokens(binding, lexicon).map(|t| t.join(" "));
        Ok(Rendered {
            premise: join(&self.premise)?,
            hypothesis: join(&self.hypothesis)?,
            explanation: join(&self.explanation)?,
        })
    }

    pub fn render_explanation(&self, binding: &Binding, lexicon: &Lexicon) -> Result<String> {
        self.check_binding(binding, lexicon)?;
        Ok(self.explanation.render_tokens(binding, lexicon)?.join(" "))
    }

    /// Positional match of tokenized premise and hypothesis against this
    /// template; returns the unique binding that renders them, if any.
    pub fn match_tokens<S: AsRef<str>>(
        &self,
        premise: &[S],
        hypothesis: &[S],
        lexicon: &Lexicon,
    ) -> Option<Binding> {
        if premise.len() != self.premise.len() || hypothesis.len() != self.hypothesis.len() {
            return None;
        }
        let mut binding = Binding::new();
        let pairs = self
            .premise
            .elements()
            .iter()
            .zip(premise)
            .chain(self.hypothesis.elements().iter().zip(hypothesis));
        for (element, token) in pairs {
            let token = token.as_ref();
            match element {
                Element::Literal(l) => {
                    if l != token {
                        return None;
                    }
                }
                Element::Slot { name, feature } => {
                    let class = self.slots[name].pos_class;
                    let id = lexicon
                        .lookup(token)
                        .iter()
                        .find(|r| r.feature == *feature && lexicon.entry(r.lexeme).pos_class == class)?
                        .lexeme;
                    match binding.get(name) {
                        Some(prev) if prev != id => return None,
                        Some(_) => {}
                        None => binding.insert(name.clone(), id),
                    }
                }
            }
        }
        self.check_binding(&binding, lexicon).ok()?;
        Some(binding)
    }
}

/// All bindings of a template over one partition, in canonical order: slots
/// sorted by name, lexemes in file order, first slot varying slowest.
///
/// Bindings are addressed by index, so callers can sample without
/// materializing the whole space.
#[derive(Clone, Debug)]
pub struct BindingSpace {
    slots: Vec<SpaceSlot>,
    count: u64,
}

#[derive(Clone, Debug)]
struct SpaceSlot {
    name: String,
    candidates: Vec<LexemeId>,
    /// Earlier slots of the same class; their picks are excluded here.
    earlier_same_class: Vec<usize>,
    radix: u64,
}

impl BindingSpace {
    pub fn new(template: &Template, lexicon: &Lexicon, partition: Partition) -> Result<Self> {
        let mut slots: Vec<SpaceSlot> = Vec::new();
        let mut count: u64 = 1;
        for (name, decl) in &template.slots {
            let candidates = lexicon.members(decl.pos_class, partition);
            if candidates.is_empty() {
                return Err(Error::EmptyClass {
                    pos_class: decl.pos_class.to_string(),
                    partition: partition.to_string(),
                });
            }
            let earlier_same_class: Vec<usize> = slots
                .iter()
                .enumerate()
                .filter(|(_, s)| lexicon.entry(s.candidates[0]).pos_class == decl.pos_class)
                .map(|(i, _)| i)
                .collect();
            let radix = (candidates.len() as u64).saturating_sub(earlier_same_class.len() as u64);
            count = count.saturating_mul(radix);
            slots.push(SpaceSlot {
                name: name.clone(),
                candidates,
                earlier_same_class,
                radix,
            });
        }
        Ok(BindingSpace { slots, count })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// The binding at `index` in canonical order.
    pub fn get(&self, index: u64) -> Binding {
        assert!(index < self.count, "binding index {index} out of range {}", self.count);
        let mut digits = vec![0u64; self.slots.len()];
        let mut rest = index;
        for (i, slot) in self.slots.iter().enumerate().rev() {
            digits[i] = rest % slot.radix;
            rest /= slot.radix;
        }
        let mut picked: Vec<LexemeId> = Vec::with_capacity(self.slots.len());
        let mut binding = Binding::new();
        for (slot, digit) in self.slots.iter().zip(digits) {
            let used: Vec<LexemeId> = slot.earlier_same_class.iter().map(|&j| picked[j]).collect();
            let id = *slot
                .candidates
                .iter()
                .filter(|c| !used.contains(c))
                .nth(digit as usize)
                .expect("digit below radix");
            picked.push(id);
            binding.insert(slot.name.clone(), id);
        }
        binding
    }

    pub fn iter(&self) -> impl Iterator<Item = Binding> + '_ {
        (0..self.count).map(|i| self.get(i))
    }
}

/// Canonical enumeration of a template's bindings over one partition.
pub fn enumerate_bindings(
    template: &Template,
    lexicon: &Lexicon,
    partition: Partition,
) -> Result<BindingSpace> {
    BindingSpace::new(template, lexicon, partition)
}
