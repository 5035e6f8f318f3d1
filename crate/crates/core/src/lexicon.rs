//! Word lists with explicit morphology and an IND/OOD partition.
//!
//! A [`Lexicon`] is immutable once built. Every surface form is indexed back
//! to the lexeme and feature it realizes, which is what parsing and the
//! hallucination metric run on.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosClass {
    Profession,
    Location,
    TransitiveVerb,
    IntransitiveVerb,
    Adverb,
    Adjective,
    Preposition,
    Relativizer,
    Connective,
}

impl PosClass {
    pub const ALL: [PosClass; 9] = [
        PosClass::Profession,
        PosClass::Location,
        PosClass::TransitiveVerb,
        PosClass::IntransitiveVerb,
        PosClass::Adverb,
        PosClass::Adjective,
        PosClass::Preposition,
        PosClass::Relativizer,
        PosClass::Connective,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosClass::Profession => "profession",
            PosClass::Location => "location",
            PosClass::TransitiveVerb => "transitive_verb",
            PosClass::IntransitiveVerb => "intransitive_verb",
            PosClass::Adverb => "adverb",
            PosClass::Adjective => "adjective",
            PosClass::Preposition => "preposition",
            PosClass::Relativizer => "relativizer",
            PosClass::Connective => "connective",
        }
    }

    /// Professions and locations: the classes that count as entities.
    pub fn is_entity(self) -> bool {
        matches!(self, PosClass::Profession | PosClass::Location)
    }

    pub fn is_noun(self) -> bool {
        self.is_entity()
    }

    /// The exact set of forms an entry of this class must carry.
    pub fn required_features(self) -> &'static [Feature] {
        match self {
            PosClass::Profession | PosClass::Location => &[Feature::Singular, Feature::Plural],
            PosClass::TransitiveVerb => &[Feature::Past, Feature::PassiveParticiple],
            PosClass::IntransitiveVerb => &[Feature::Past],
            _ => &[Feature::Base],
        }
    }
}

impl fmt::Display for PosClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PosClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown pos class `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Ind,
    Ood,
}

impl Partition {
    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Ind => "ind",
            Partition::Ood => "ood",
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Partition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ind" | "IND" => Ok(Partition::Ind),
            "ood" | "OOD" => Ok(Partition::Ood),
            _ => Err(format!("unknown partition `{s}` (expected ind or ood)")),
        }
    }
}

/// Inflectional feature selecting one surface form of a lexeme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Feature {
    #[serde(rename = "sg")]
    Singular,
    #[serde(rename = "pl")]
    Plural,
    #[serde(rename = "past")]
    Past,
    #[serde(rename = "pp")]
    PassiveParticiple,
    #[serde(rename = "base")]
    Base,
}

impl Feature {
    pub fn as_str(self) -> &'static str {
        match self {
            Feature::Singular => "sg",
            Feature::Plural => "pl",
            Feature::Past => "past",
            Feature::PassiveParticiple => "pp",
            Feature::Base => "base",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sg" | "singular" => Ok(Feature::Singular),
            "pl" | "plural" => Ok(Feature::Plural),
            "past" => Ok(Feature::Past),
            "pp" | "passive_participle" => Ok(Feature::PassiveParticiple),
            "base" => Ok(Feature::Base),
            _ => Err(format!("unknown feature `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexemeEntry {
    pub lemma: String,
    pub pos_class: PosClass,
    pub forms: BTreeMap<Feature, String>,
    pub partition: Partition,
}

impl LexemeEntry {
    pub fn is_entity(&self) -> bool {
        self.pos_class.is_entity()
    }

    /// Stored surface form for `feature`.
    pub fn inflect(&self, feature: Feature) -> Result<&str> {
        self.forms
            .get(&feature)
            .map(String::as_str)
            .ok_or_else(|| Error::MissingForm {
                lemma: self.lemma.clone(),
                pos_class: self.pos_class.to_string(),
                feature: feature.to_string(),
            })
    }

    fn label(&self) -> String {
        format!("`{}` ({})", self.lemma, self.pos_class)
    }
}

/// Index of an entry inside its [`Lexicon`], in file order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexemeId(pub usize);

/// One reading of a surface form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Realization {
    pub lexeme: LexemeId,
    pub feature: Feature,
}

#[derive(Clone, Debug)]
pub struct Lexicon {
    entries: Vec<LexemeEntry>,
    surface_index: HashMap<String, Vec<Realization>>,
    by_key: HashMap<(PosClass, String), LexemeId>,
}

impl Lexicon {
    /// Builds a lexicon, checking every entry and cross-entry invariant.
    pub fn from_entries(entries: Vec<LexemeEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Lexicon {
                rule: "no entries",
                message: "the lexicon contains no entries".into(),
            });
        }

        let mut by_key = HashMap::new();
        let mut surface_index: HashMap<String, Vec<Realization>> = HashMap::new();

        for (i, entry) in entries.iter().enumerate() {
            if !is_token(&entry.lemma) {
                return Err(Error::Lexicon {
                    rule: "malformed lemma",
                    message: format!("{} must be a nonempty lowercase token", entry.label()),
                });
            }
            if let Some(prev) = by_key.insert((entry.pos_class, entry.lemma.clone()), LexemeId(i)) {
                let prev: &LexemeEntry = &entries[prev.0];
                return Err(if prev.partition != entry.partition {
                    Error::Lexicon {
                        rule: "partition overlap",
                        message: format!("{} is listed in both partitions", entry.label()),
                    }
                } else {
                    Error::Lexicon {
                        rule: "duplicate entry",
                        message: format!("{} is listed more than once", entry.label()),
                    }
                });
            }

            let required = entry.pos_class.required_features();
            for feature in required {
                if !entry.forms.contains_key(feature) {
                    return Err(Error::Lexicon {
                        rule: "missing form",
                        message: format!("{} has no `{feature}` form", entry.label()),
                    });
                }
            }
            for (feature, surface) in &entry.forms {
                if !required.contains(feature) {
                    return Err(Error::Lexicon {
                        rule: "unexpected form",
                        message: format!(
                            "{} carries `{feature}`, which its class does not use",
                            entry.label()
                        ),
                    });
                }
                if !is_token(surface) {
                    return Err(Error::Lexicon {
                        rule: "malformed surface",
                        message: format!(
                            "{} form `{feature}` = {surface:?} must be a nonempty lowercase token",
                            entry.label()
                        ),
                    });
                }
                surface_index
                    .entry(surface.clone())
                    .or_default()
                    .push(Realization {
                        lexeme: LexemeId(i),
                        feature: *feature,
                    });
            }
        }

        let mut surfaces: Vec<_> = surface_index.iter().collect();
        surfaces.sort_by(|a, b| a.0.cmp(b.0));
        for (surface, readings) in surfaces {
            let partitions: HashSet<Partition> = readings
                .iter()
                .map(|r| entries[r.lexeme.0].partition)
                .collect();
            if partitions.len() > 1 {
                let who: Vec<String> = readings
                    .iter()
                    .map(|r| entries[r.lexeme.0].label())
                    .collect();
                return Err(Error::Lexicon {
                    rule: "partition overlap",
                    message: format!(
                        "surface `{surface}` appears in both partitions via {}",
                        who.join(", ")
                    ),
                });
            }
            // Two lemmas of one class sharing a form would make parsing ambiguous.
            for (a, ra) in readings.iter().enumerate() {
                for rb in &readings[a + 1..] {
                    let (ea, eb) = (&entries[ra.lexeme.0], &entries[rb.lexeme.0]);
                    if ra.lexeme != rb.lexeme && ea.pos_class == eb.pos_class {
                        return Err(Error::Lexicon {
                            rule: "ambiguous surface",
                            message: format!(
                                "surface `{surface}` realizes both {} and {}",
                                ea.label(),
                                eb.label()
                            ),
                        });
                    }
                }
            }
        }

        Ok(Lexicon {
            entries,
            surface_index,
            by_key,
        })
    }

    /// Parses the line-oriented lexicon format (see `docs/formats.md`).
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            entries.push(parse_record(line).map_err(|message| Error::Syntax {
                file: source.to_string(),
                line: n + 1,
                message,
            })?);
        }
        Self::from_entries(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The lexicon shipped with the crate.
    pub fn starter() -> Self {
        Self::parse(STARTER_LEXICON, "data/lexicon.txt").expect("starter lexicon is valid")
    }

    pub fn entries(&self) -> &[LexemeEntry] {
        &self.entries
    }

    pub fn entry(&self, id: LexemeId) -> &LexemeEntry {
        &self.entries[id.0]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn find(&self, pos_class: PosClass, lemma: &str) -> Option<LexemeId> {
        self.by_key.get(&(pos_class, lemma.to_string())).copied()
    }

    /// Every reading of `surface`; empty for unknown tokens.
    pub fn lookup(&self, surface: &str) -> &[Realization] {
        self.surface_index
            .get(surface)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Members of a class within one partition, in file order.
    pub fn members(&self, pos_class: PosClass, partition: Partition) -> Vec<LexemeId> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.pos_class == pos_class && e.partition == partition)
            .map(|(i, _)| LexemeId(i))
            .collect()
    }

    pub fn is_entity_token(&self, token: &str) -> bool {
        self.lookup(token)
            .iter()
            .any(|r| self.entry(r.lexeme).is_entity())
    }

    /// Entity lexemes a token can realize (number-normalized identity).
    pub fn entity_lexemes<'a>(&'a self, token: &str) -> impl Iterator<Item = LexemeId> + 'a {
        self.lookup(token)
            .iter()
            .filter(move |r| self.entry(r.lexeme).is_entity())
            .map(|r| r.lexeme)
    }
}

pub const STARTER_LEXICON: &str = include_str!("../data/lexicon.txt");

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace) && s.to_lowercase() == s
}

fn parse_record(line: &str) -> std::result::Result<LexemeEntry, String> {
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    let [pos, partition, lemma, forms] = fields.as_slice() else {
        return Err(format!(
            "expected 4 `|`-separated fields, found {}",
            fields.len()
        ));
    };
    let pos_class: PosClass = pos.parse()?;
    let partition: Partition = partition.parse()?;
    let mut table = BTreeMap::new();
    for item in forms.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (feature, surface) = item
            .split_once('=')
            .ok_or_else(|| format!("form `{item}` is not `feature=surface`"))?;
        let feature: Feature = feature.trim().parse()?;
        if table.insert(feature, surface.trim().to_string()).is_some() {
            return Err(format!("form `{feature}` given twice for `{lemma}`"));
        }
    }
    Ok(LexemeEntry {
        lemma: lemma.to_string(),
        pos_class,
        forms: table,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(text: &str) -> Result<Lexicon> {
        Lexicon::parse(text, "test")
    }

    #[test]
    fn inflects_stored_forms() {
        let lex = Lexicon::starter();
        let get = |pos, lemma| lex.entry(lex.find(pos, lemma).unwrap());
        assert_eq!(
            get(PosClass::Profession, "psychologist")
                .inflect(Feature::Plural)
                .unwrap(),
            "psychologists"
        );
        assert_eq!(
            get(PosClass::Profession, "scientist")
                .inflect(Feature::Plural)
                .unwrap(),
            "scientists"
        );
        assert_eq!(
            get(PosClass::TransitiveVerb, "address")
                .inflect(Feature::PassiveParticiple)
                .unwrap(),
            "addressed"
        );
        assert_eq!(
            get(PosClass::IntransitiveVerb, "run")
                .inflect(Feature::Past)
                .unwrap(),
            "ran"
        );
    }

    #[test]
    fn missing_inflection_names_entry() {
        let lex = Lexicon::starter();
        let run = lex.entry(lex.find(PosClass::IntransitiveVerb, "run").unwrap());
        let err = run.inflect(Feature::PassiveParticiple).unwrap_err();
        assert!(err.to_string().contains("run"), "{err}");
        assert!(err.to_string().contains("pp"), "{err}");
    }

    #[test]
    fn entity_tokens() {
        let lex = Lexicon::starter();
        assert!(lex.is_entity_token("psychologists"));
        assert!(lex.is_entity_token("library"));
        assert!(!lex.is_entity_token("saw"));
        assert!(!lex.is_entity_token("near"));
        assert!(!lex.is_entity_token("unicorn"));
    }

    #[test]
    fn single_record_loads() {
        let lex = tiny("profession | ind | psychologist | sg=psychologist; pl=psychologists\n")
            .unwrap();
        let id = lex.find(PosClass::Profession, "psychologist").unwrap();
        assert_eq!(
            lex.entry(id).inflect(Feature::Plural).unwrap(),
            "psychologists"
        );
    }

    #[test]
    fn empty_file_rejected() {
        let err = tiny("# only a comment\n\n").unwrap_err();
        assert!(err.to_string().contains("no entries"), "{err}");
    }

    #[test]
    fn partition_overlap_rejected() {
        let err = tiny(
            "profession | ind | author | sg=author; pl=authors\n\
             profession | ood | author | sg=author; pl=authors\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("partition overlap"), "{err}");
        assert!(err.to_string().contains("author"), "{err}");

        let err = tiny(
            "profession | ind | author | sg=author; pl=authors\n\
             profession | ind | author | sg=author; pl=authors\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");

        let err = tiny(
            "profession | ind | author | sg=author; pl=authors\n\
             profession | ood | writer | sg=author; pl=writers\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("partition overlap"), "{err}");
        assert!(err.to_string().contains("author"), "{err}");
    }

    #[test]
    fn missing_forms_rejected() {
        let err = tiny("transitive_verb | ind | see | past=saw\n").unwrap_err();
        assert!(err.to_string().contains("missing form"), "{err}");
        let err = tiny("profession | ind | nurse | sg=nurse\n").unwrap_err();
        assert!(err.to_string().contains("missing form"), "{err}");
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let err = tiny("profession | ind | nurse\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, .. }), "{err}");
        let err = tiny("# c\nprofession | xyz | nurse | sg=nurse; pl=nurses\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{err}");
        let err = tiny("profession | ind | nurse | sg=Nurse; pl=nurses\n").unwrap_err();
        assert!(err.to_string().contains("malformed surface"), "{err}");
    }

    #[test]
    fn starter_meets_minimum_sizes() {
        let lex = Lexicon::starter();
        let count = |pos, part| lex.members(pos, part).len();
        assert!(count(PosClass::Profession, Partition::Ind) >= 20);
        assert!(count(PosClass::Profession, Partition::Ood) >= 10);
        for part in [Partition::Ind, Partition::Ood] {
            assert!(count(PosClass::TransitiveVerb, part) >= 6);
            assert!(count(PosClass::IntransitiveVerb, part) >= 4);
            assert!(count(PosClass::Location, part) >= 4);
        }
    }

    #[test]
    fn starter_places_paper_ood_words_in_ood() {
        let lex = Lexicon::starter();
        for word in [
            "chaplains", "penciller", "deceived", "singer", "author", "needed", "administrators",
            "lyricist", "supported", "professor", "athletes", "called", "doctors", "senators",
            "recognized", "nurses", "recommended", "near",
        ] {
            let readings = lex.lookup(word);
            assert!(!readings.is_empty(), "{word} missing");
            assert!(
                readings
                    .iter()
                    .all(|r| lex.entry(r.lexeme).partition == Partition::Ood),
                "{word} not OOD"
            );
        }
    }

    #[test]
    fn surface_index_inverts_form_tables() {
        let lex = Lexicon::starter();
        let mut forward = 0;
        for (i, e) in lex.entries().iter().enumerate() {
            for (feature, surface) in &e.forms {
                forward += 1;
                assert!(lex.lookup(surface).contains(&Realization {
                    lexeme: LexemeId(i),
                    feature: *feature
                }));
            }
        }
        let backward: usize = lex.surface_index.values().map(Vec::len).sum();
        assert_eq!(forward, backward);
    }
}
