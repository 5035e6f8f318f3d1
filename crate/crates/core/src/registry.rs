//! The template inventory: loading, validation, lookup by surface text,
//! the 5-fold template split and summary statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Feature, LexemeId, Lexicon, Partition, PosClass};
use crate::metrics::tokenize;
use crate::rng;
use crate::template::{
    Binding, BindingSpace, Element, Heuristic, Label, Number, Pattern, SlotDecl, Template,
};

pub const FOLDS: usize = 5;

pub const STARTER_TEMPLATES: &str = include_str!("../data/templates.txt");

#[derive(Clone, Debug)]
pub struct Registry {
    templates: Vec<Template>,
    by_id: HashMap<String, usize>,
    by_heuristic: BTreeMap<Heuristic, BTreeMap<String, Vec<String>>>,
    by_shape: HashMap<(usize, usize), Vec<usize>>,
}

impl Registry {
    /// Validates `templates` against `lexicon` and indexes them.
    pub fn new(templates: Vec<Template>, lexicon: &Lexicon) -> Result<Self> {
        let mut by_id = HashMap::new();
        for (i, t) in templates.iter().enumerate() {
            t.validate()?;
            if by_id.insert(t.id.clone(), i).is_some() {
                return Err(Error::Template {
                    template: t.id.clone(),
                    rule: "unique id",
                    message: "id used more than once".into(),
                });
            }
            check_supply(t, lexicon)?;
        }

        let mut by_shape: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in templates.iter().enumerate() {
            by_shape
                .entry((t.premise.len(), t.hypothesis.len()))
                .or_default()
                .push(i);
        }
        for group in by_shape.values() {
            for (n, &a) in group.iter().enumerate() {
                for &b in &group[n + 1..] {
                    check_pair(&templates[a], &templates[b], lexicon)?;
                }
            }
        }

        let mut by_heuristic: BTreeMap<Heuristic, BTreeMap<String, Vec<String>>> = BTreeMap::new();
        for t in &templates {
            by_heuristic
                .entry(t.heuristic)
                .or_default()
                .entry(t.subcase.clone())
                .or_default()
                .push(t.id.clone());
        }
        if let Some(h) = Heuristic::ALL.iter().find(|h| !by_heuristic.contains_key(h)) {
            return Err(Error::Template {
                template: "<registry>".into(),
                rule: "heuristic coverage",
                message: format!("no template for heuristic {h}"),
            });
        }
        for label in [Label::Entailment, Label::NonEntailment] {
            if !templates.iter().any(|t| t.label == label) {
                return Err(Error::Template {
                    template: "<registry>".into(),
                    rule: "label coverage",
                    message: format!("no {label} template"),
                });
            }
        }

        Ok(Registry {
            templates,
            by_id,
            by_heuristic,
            by_shape,
        })
    }

    /// Parses the template file format (see `docs/formats.md`) and validates.
    pub fn parse(text: &str, source: &str, lexicon: &Lexicon) -> Result<Self> {
        Self::new(parse_templates(text, source)?, lexicon)
    }

    pub fn load(path: impl AsRef<Path>, lexicon: &Lexicon) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string(), lexicon)
    }

    /// The inventory shipped with the crate, validated against `lexicon`.
    pub fn starter(lexicon: &Lexicon) -> Result<Self> {
        Self::parse(STARTER_TEMPLATES, "data/templates.txt", lexicon)
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.by_id.get(id).map(|&i| &self.templates[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.iter().map(|t| t.id.as_str())
    }

    /// heuristic → subcase → template ids.
    pub fn by_heuristic(&self) -> &BTreeMap<Heuristic, BTreeMap<String, Vec<String>>> {
        &self.by_heuristic
    }

    /// Recovers `(template, binding)` from a rendered premise and hypothesis.
    ///
    /// Several matches are tolerated only when they agree on label and
    /// explanation, in which case the smallest template id wins.
    pub fn parse_pair(
        &self,
        premise: &str,
        hypothesis: &str,
        lexicon: &Lexicon,
    ) -> Result<Option<(&Template, Binding)>> {
        self.parse_pair_among(premise, hypothesis, lexicon, |_| true)
    }

    /// [`Registry::parse_pair`] restricted to templates accepted by `keep`.
    pub fn parse_pair_among(
        &self,
        premise: &str,
        hypothesis: &str,
        lexicon: &Lexicon,
        keep: impl Fn(&Template) -> bool,
    ) -> Result<Option<(&Template, Binding)>> {
        let p = tokenize(premise);
        let h = tokenize(hypothesis);
        let Some(candidates) = self.by_shape.get(&(p.len(), h.len())) else {
            return Ok(None);
        };
        let mut matches: Vec<(&Template, Binding)> = candidates
            .iter()
            .map(|&i| &self.templates[i])
            .filter(|t| keep(t))
            .filter_map(|t| t.match_tokens(&p, &h, lexicon).map(|b| (t, b)))
            .collect();
        matches.sort_by(|a, b| a.0.id.cmp(&b.0.id));
        match matches.len() {
            0 => Ok(None),
            1 => Ok(matches.pop()),
            _ => {
                let (first, fb) = &matches[0];
                let expl = first.render_explanation(fb, lexicon)?;
                for (t, b) in &matches[1..] {
                    if t.label != first.label || t.render_explanation(b, lexicon)? != expl {
                        return Err(Error::Ambiguous {
                            ids: matches.iter().map(|(t, _)| t.id.clone()).collect(),
                        });
                    }
                }
                Ok(matches.into_iter().next())
            }
        }
    }
}

fn check_supply(t: &Template, lexicon: &Lexicon) -> Result<()> {
    for partition in [Partition::Ind, Partition::Ood] {
        let space = BindingSpace::new(t, lexicon, partition).map_err(|e| Error::Template {
            template: t.id.clone(),
            rule: "slot classes",
            message: e.to_string(),
        })?;
        if space.count() == 0 {
            return Err(Error::Template {
                template: t.id.clone(),
                rule: "slot classes",
                message: format!("too few {partition} lexemes to fill distinct slots"),
            });
        }
    }
    Ok(())
}

/// Fails when two templates can render the same premise/hypothesis pair
/// and would disagree on label or explanation.
fn check_pair(a: &Template, b: &Template, lexicon: &Lexicon) -> Result<()> {
    let Some((ba, bb)) = find_collision(a, b, lexicon) else {
        return Ok(());
    };
    let same = a.label == b.label
        && a.render_explanation(&ba, lexicon)? == b.render_explanation(&bb, lexicon)?;
    if same {
        return Ok(());
    }
    let shown = a.render(&ba, lexicon)?;
    Err(Error::Template {
        template: a.id.clone(),
        rule: "ambiguity",
        message: format!(
            "`{}` renders the same pair ({:?} / {:?}) with a different {}",
            b.id,
            shown.premise,
            shown.hypothesis,
            if a.label != b.label { "label" } else { "explanation" }
        ),
    })
}

/// Searches for bindings of `a` and `b` (over the whole lexicon) rendering
/// identical premise and hypothesis token sequences.
pub fn find_collision(a: &Template, b: &Template, lexicon: &Lexicon) -> Option<(Binding, Binding)> {
    if a.premise.len() != b.premise.len() || a.hypothesis.len() != b.hypothesis.len() {
        return None;
    }
    // Variables are a's slots followed by b's slots.
    let a_names: Vec<&String> = a.slots.keys().collect();
    let b_names: Vec<&String> = b.slots.keys().collect();
    let var = |owner: usize, name: &str| -> usize {
        if owner == 0 {
            a_names.iter().position(|n| *n == name).unwrap()
        } else {
            a_names.len() + b_names.iter().position(|n| *n == name).unwrap()
        }
    };
    let decls: Vec<SlotDecl> = a.slots.values().chain(b.slots.values()).copied().collect();
    let mut domains: Vec<Vec<LexemeId>> = decls
        .iter()
        .map(|d| {
            let mut all = lexicon.members(d.pos_class, Partition::Ind);
            all.extend(lexicon.members(d.pos_class, Partition::Ood));
            all
        })
        .collect();

    let form = |id: LexemeId, f: Feature| lexicon.entry(id).forms.get(&f).map(String::as_str);
    let mut links: Vec<(usize, Feature, usize, Feature)> = Vec::new();
    let aligned = a
        .premise
        .elements()
        .iter()
        .zip(b.premise.elements())
        .chain(a.hypothesis.elements().iter().zip(b.hypothesis.elements()));
    for (ea, eb) in aligned {
        match (ea, eb) {
            (Element::Literal(x), Element::Literal(y)) => {
                if x != y {
                    return None;
                }
            }
            (Element::Literal(lit), Element::Slot { name, feature })
            | (Element::Slot { name, feature }, Element::Literal(lit)) => {
                let owner = usize::from(matches!(ea, Element::Literal(_)));
                let v = var(owner, name);
                domains[v].retain(|&id| form(id, *feature) == Some(lit.as_str()));
                if domains[v].is_empty() {
                    return None;
                }
            }
            (
                Element::Slot { name: na, feature: fa },
                Element::Slot { name: nb, feature: fb },
            ) => links.push((var(0, na), *fa, var(1, nb), *fb)),
        }
    }
    // Same-template slots of one class must differ.
    let mut distinct: Vec<(usize, usize)> = Vec::new();
    for (lo, hi) in [(0, a_names.len()), (a_names.len(), decls.len())] {
        for i in lo..hi {
            for j in i + 1..hi {
                if decls[i].pos_class == decls[j].pos_class {
                    distinct.push((i, j));
                }
            }
        }
    }

    if !prune(&mut domains, &links, &form) {
        return None;
    }
    let mut assignment: Vec<Option<LexemeId>> = vec![None; decls.len()];
    if !search(&mut assignment, &domains, &links, &distinct, &form) {
        return None;
    }
    let mut ba = Binding::new();
    let mut bb = Binding::new();
    for (i, id) in assignment.into_iter().enumerate() {
        let id = id.expect("complete assignment");
        if i < a_names.len() {
            ba.insert(a_names[i].clone(), id);
        } else {
            bb.insert(b_names[i - a_names.len()].clone(), id);
        }
    }
    Some((ba, bb))
}

/// Arc consistency over the surface-equality links: drops every lexeme whose
/// form cannot be matched by the linked slot. False when a domain empties.
fn prune<'a>(
    domains: &mut [Vec<LexemeId>],
    links: &[(usize, Feature, usize, Feature)],
    form: &impl Fn(LexemeId, Feature) -> Option<&'a str>,
) -> bool {
    let mut changed = true;
    while changed {
        changed = false;
        for &(x, fx, y, fy) in links {
            let xs: HashSet<&str> = domains[x].iter().filter_map(|&id| form(id, fx)).collect();
            let ys: HashSet<&str> = domains[y].iter().filter_map(|&id| form(id, fy)).collect();
            for (v, f, other) in [(x, fx, &ys), (y, fy, &xs)] {
                let before = domains[v].len();
                domains[v].retain(|&id| form(id, f).is_some_and(|s| other.contains(s)));
                if domains[v].is_empty() {
                    return false;
                }
                changed |= domains[v].len() != before;
            }
        }
    }
    true
}

fn search<'a>(
    assignment: &mut Vec<Option<LexemeId>>,
    domains: &[Vec<LexemeId>],
    links: &[(usize, Feature, usize, Feature)],
    distinct: &[(usize, usize)],
    form: &impl Fn(LexemeId, Feature) -> Option<&'a str>,
) -> bool {
    // Filter every open variable's domain against the current partial assignment
    // and branch on the tightest one.
    let mut best: Option<(usize, Vec<LexemeId>)> = None;
    for v in 0..assignment.len() {
        if assignment[v].is_some() {
            continue;
        }
        let live: Vec<LexemeId> = domains[v]
            .iter()
            .copied()
            .filter(|&id| consistent(v, id, assignment, links, distinct, form))
            .collect();
        if live.is_empty() {
            return false;
        }
        if best.as_ref().is_none_or(|(_, d)| live.len() < d.len()) {
            best = Some((v, live));
        }
    }
    let Some((v, live)) = best else {
        return true;
    };
    for id in live {
        assignment[v] = Some(id);
        if search(assignment, domains, links, distinct, form) {
            return true;
        }
    }
    assignment[v] = None;
    false
}

fn consistent<'a>(
    v: usize,
    id: LexemeId,
    assignment: &[Option<LexemeId>],
    links: &[(usize, Feature, usize, Feature)],
    distinct: &[(usize, usize)],
    form: &impl Fn(LexemeId, Feature) -> Option<&'a str>,
) -> bool {
    for &(x, fx, y, fy) in links {
        let other = if x == v {
            assignment[y].map(|o| (form(id, fx), form(o, fy)))
        } else if y == v {
            assignment[x].map(|o| (form(o, fx), form(id, fy)))
        } else {
            None
        };
        if let Some((s, t)) = other {
            if s.is_none() || s != t {
                return false;
            }
        }
    }
    distinct.iter().all(|&(x, y)| {
        let other = if x == v {
            assignment[y]
        } else if y == v {
            assignment[x]
        } else {
            None
        };
        other != Some(id)
    })
}

fn parse_templates(text: &str, source: &str) -> Result<Vec<Template>> {
    struct Pending {
        line: usize,
        id: String,
        heuristic: Heuristic,
        subcase: String,
        label: Label,
        fields: BTreeMap<String, (usize, String)>,
    }

    let syntax = |line: usize, message: String| Error::Syntax {
        file: source.to_string(),
        line,
        message,
    };

    let finish = |p: Pending| -> Result<Template> {
        let field = |key: &str| {
            p.fields
                .get(key)
                .cloned()
                .ok_or_else(|| syntax(p.line, format!("template `{}` has no `{key}:` line", p.id)))
        };
        let (slots_line, slots_text) = field("slots")?;
        let slots = parse_slots(&slots_text).map_err(|m| syntax(slots_line, m))?;
        let pattern = |key: &str| -> Result<Pattern> {
            let (line, text) = field(key)?;
            Pattern::parse(&text, &slots).map_err(|m| syntax(line, m))
        };
        Ok(Template {
            premise: pattern("premise")?,
            hypothesis: pattern("hypothesis")?,
            explanation: pattern("explanation")?,
            id: p.id,
            heuristic: p.heuristic,
            subcase: p.subcase,
            label: p.label,
            slots,
        })
    };

    let mut out = Vec::new();
    let mut pending: Option<Pending> = None;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(header) = raw.strip_prefix("template ") {
            if let Some(p) = pending.take() {
                out.push(finish(p)?);
            }
            let parts: Vec<&str> = header.split('|').map(str::trim).collect();
            let [id, heuristic, subcase, label] = parts.as_slice() else {
                return Err(syntax(
                    line_no,
                    "expected `template <id> | <heuristic> | <subcase> | <label>`".into(),
                ));
            };
            if id.is_empty() || id.contains(char::is_whitespace) || subcase.is_empty() {
                return Err(syntax(line_no, "template id and subcase must be nonempty tokens".into()));
            }
            pending = Some(Pending {
                line: line_no,
                id: id.to_string(),
                heuristic: heuristic.parse().map_err(|m| syntax(line_no, m))?,
                subcase: subcase.to_string(),
                label: label.parse().map_err(|m| syntax(line_no, m))?,
                fields: BTreeMap::new(),
            });
        } else if raw.starts_with(char::is_whitespace) {
            let p = pending
                .as_mut()
                .ok_or_else(|| syntax(line_no, "field line outside a template record".into()))?;
            let (key, value) = trimmed
                .split_once(':')
                .ok_or_else(|| syntax(line_no, format!("expected `key: value`, got `{trimmed}`")))?;
            let key = key.trim();
            if !matches!(key, "slots" | "premise" | "hypothesis" | "explanation") {
                return Err(syntax(line_no, format!("unknown field `{key}`")));
            }
            if p
                .fields
                .insert(key.to_string(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(syntax(line_no, format!("field `{key}` given twice")));
            }
        } else {
            return Err(syntax(line_no, format!("unexpected line `{trimmed}`")));
        }
    }
    if let Some(p) = pending.take() {
        out.push(finish(p)?);
    }
    if out.is_empty() {
        return Err(syntax(0, "no templates".into()));
    }
    Ok(out)
}

fn parse_slots(text: &str) -> std::result::Result<BTreeMap<String, SlotDecl>, String> {
    let mut slots = BTreeMap::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, decl) = item
            .split_once('=')
            .ok_or_else(|| format!("slot `{item}` is not `name=class[:number]`"))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad slot name `{name}`"));
        }
        let (class, number) = match decl.trim().split_once(':') {
            Some((c, n)) => (c, Some(n.parse::<Number>()?)),
            None => (decl.trim(), None),
        };
        let pos_class: PosClass = class.parse()?;
        if slots
            .insert(name.to_string(), SlotDecl { pos_class, number })
            .is_some()
        {
            return Err(format!("slot `{name}` declared twice"));
        }
    }
    Ok(slots)
}

/// Five disjoint groups of template ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub folds: Vec<Vec<String>>,
    pub seed: u64,
}

impl FoldSplit {
    pub fn fold(&self, index: usize) -> &[String] {
        &self.folds[index]
    }

    /// Every id outside `held_out`.
    pub fn training_ids(&self, held_out: usize) -> BTreeSet<String> {
        self.folds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != held_out)
            .flat_map(|(_, f)| f.iter().cloned())
            .collect()
    }
}

/// Seeded shuffle of the template ids followed by round-robin assignment.
pub fn split_folds(registry: &Registry, seed: u64) -> FoldSplit {
    let mut ids: Vec<String> = registry.ids().map(String::from).collect();
    rng::shuffle(&mut ids, &mut rng::stream(seed, "folds", ""));
    let mut folds = vec![Vec::new(); FOLDS];
    for (i, id) in ids.into_iter().enumerate() {
        folds[i % FOLDS].push(id);
    }
    FoldSplit { folds, seed }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LabelCounts {
    pub entailment: usize,
    pub non_entailment: usize,
}

impl LabelCounts {
    fn add(&mut self, label: Label) {
        match label {
            Label::Entailment => self.entailment += 1,
            Label::NonEntailment => self.non_entailment += 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegistryStats {
    pub templates: usize,
    pub labels: LabelCounts,
    pub by_heuristic: BTreeMap<String, BTreeMap<String, LabelCounts>>,
    pub partition: Partition,
    pub samples_per_template: usize,
    pub rendered: usize,
    pub mean_premise_len: f64,
    pub mean_hypothesis_len: f64,
    pub mean_explanation_len: f64,
}

/// Token length with the terminal period removed.
pub fn content_length(text: &str) -> usize {
    let toks = tokenize(text);
    toks.len() - usize::from(toks.last().is_some_and(|t| t == "."))
}

/// Template counts and mean rendered lengths over a seeded sample of
/// `samples_per_template` bindings per template.
pub fn registry_stats(
    registry: &Registry,
    lexicon: &Lexicon,
    samples_per_template: usize,
    partition: Partition,
    seed: u64,
) -> Result<RegistryStats> {
    if samples_per_template == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let mut labels = LabelCounts::default();
    let mut by_heuristic: BTreeMap<String, BTreeMap<String, LabelCounts>> = BTreeMap::new();
    let (mut p, mut h, mut e, mut rendered) = (0usize, 0usize, 0usize, 0usize);
    for t in registry.templates() {
        labels.add(t.label);
        by_heuristic
            .entry(t.heuristic.to_string())
            .or_default()
            .entry(t.subcase.clone())
            .or_default()
            .add(t.label);
        let space = BindingSpace::new(t, lexicon, partition)?;
        let order = rng::ShuffledIndices::new(space.count(), rng::stream(seed, "stats", &t.id));
        for index in order.take(samples_per_template) {
            let r = t.render(&space.get(index), lexicon)?;
            p += content_length(&r.premise);
            h += content_length(&r.hypothesis);
            e += content_length(&r.explanation);
            rendered += 1;
        }
    }
    let mean = |total: usize| total as f64 / rendered.max(1) as f64;
    Ok(RegistryStats {
        templates: registry.len(),
        labels,
        by_heuristic,
        partition,
        samples_per_template,
        rendered,
        mean_premise_len: mean(p),
        mean_hypothesis_len: mean(h),
        mean_explanation_len: mean(e),
    })
}
