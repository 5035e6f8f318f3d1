//! C ABI over templex.
//!
//! Handles are opaque pointers created by `*_new`/`*_load` and released by the
//! matching `*_free`. Functions return a [`TemplexStatus`]; on failure the
//! message is available from [`templex_last_error_message`] on the same
//! thread. Strings handed out by the library are freed with
//! [`templex_string_free`].

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use serde_json::json;
use templex::baseline::{self, BaselineConfig, Fallback, Scope};
use templex::metrics::{evaluate_files, tokenize, BleuStats};
use templex::template::{Binding, Label};
use templex::{Error, Lexicon, Registry};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplexStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Syntax = 4,
    Validation = 5,
    NoMatch = 6,
    Ambiguous = 7,
    InvalidArgument = 8,
    Invariant = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplexLabel {
    Entailment = 0,
    NonEntailment = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplexFallback {
    Abstain = 0,
    Majority = 1,
}

/// A validated lexicon and template registry.
pub struct TemplexToolkit {
    lexicon: Lexicon,
    registry: Registry,
}

/// Running corpus BLEU over added sentence pairs.
pub struct TemplexBleu {
    stats: BleuStats,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

fn status_of(e: &Error) -> TemplexStatus {
    match e {
        Error::Io { .. } => TemplexStatus::Io,
        Error::Syntax { .. } | Error::Record { .. } => TemplexStatus::Syntax,
        Error::Lexicon { .. }
        | Error::Template { .. }
        | Error::MissingForm { .. }
        | Error::BindingMismatch { .. }
        | Error::EmptyClass { .. } => TemplexStatus::Validation,
        Error::Ambiguous { .. } => TemplexStatus::Ambiguous,
        Error::Join { .. } | Error::InvalidArgument(_) => TemplexStatus::InvalidArgument,
        Error::Invariant(_) => TemplexStatus::Invariant,
    }
}

struct Fail(TemplexStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn fail(status: TemplexStatus, message: impl Into<String>) -> Fail {
    set_error(message);
    Fail(status)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TemplexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TemplexStatus::Ok
        }
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("panic inside templex");
            TemplexStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(TemplexStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TemplexStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| fail(TemplexStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(TemplexStatus::NullArgument, format!("`{name}` is null")));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| fail(TemplexStatus::Invariant, "output contains a NUL byte"))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, name: &str) -> Result<T, Fail> {
    serde_json::from_str(text).map_err(|e| fail(TemplexStatus::InvalidArgument, format!("`{name}`: {e}")))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread; do not free.
#[no_mangle]
pub extern "C" fn templex_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn templex_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Toolkit over the built-in lexicon and registry.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn templex_toolkit_new_default(out: *mut *mut TemplexToolkit) -> TemplexStatus {
    guard(|| {
        let lexicon = Lexicon::starter();
        let registry = Registry::starter(&lexicon)?;
        put(out, Box::into_raw(Box::new(TemplexToolkit { lexicon, registry })), "out")
    })
}

/// Toolkit from a lexicon file and a template file.
///
/// # Safety
/// Paths must be NUL-terminated strings; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn templex_toolkit_load(
    lexicon_path: *const c_char,
    registry_path: *const c_char,
    out: *mut *mut TemplexToolkit,
) -> TemplexStatus {
    guard(|| {
        let lexicon = Lexicon::load(str_arg(lexicon_path, "lexicon_path")?)?;
        let registry = Registry::load(str_arg(registry_path, "registry_path")?, &lexicon)?;
        put(out, Box::into_raw(Box::new(TemplexToolkit { lexicon, registry })), "out")
    })
}

/// # Safety
/// `tk` must come from a toolkit constructor and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn templex_toolkit_free(tk: *mut TemplexToolkit) {
    if !tk.is_null() {
        drop(Box::from_raw(tk));
    }
}

/// Number of templates, or 0 for a null handle.
///
/// # Safety
/// `tk` must be null or a live toolkit.
#[no_mangle]
pub unsafe extern "C" fn templex_toolkit_template_count(tk: *const TemplexToolkit) -> usize {
    tk.as_ref().map_or(0, |t| t.registry.len())
}

/// Renders a template. `binding_json` maps slot names to lemmas; the result is
/// `{"premise", "hypothesis", "explanation", "label"}`.
///
/// # Safety
/// `tk` must be live; strings NUL-terminated; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn templex_render(
    tk: *const TemplexToolkit,
    template_id: *const c_char,
    binding_json: *const c_char,
    out_json: *mut *mut c_char,
) -> TemplexStatus {
    guard(|| {
        let tk = ref_arg(tk, "tk")?;
        let id = str_arg(template_id, "template_id")?;
        let lemmas: BTreeMap<String, String> = parse_json(str_arg(binding_json, "binding_json")?, "binding_json")?;
        let template = tk
            .registry
            .get(id)
            .ok_or_else(|| fail(TemplexStatus::InvalidArgument, format!("no template `{id}`")))?;
        let binding = Binding::from_lemmas(template, &lemmas, &tk.lexicon)?;
        let r = template.render(&binding, &tk.lexicon)?;
        let value = json!({
            "premise": r.premise,
            "hypothesis": r.hypothesis,
            "explanation": r.explanation,
            "label": template.label,
        });
        put(out_json, c_string(value.to_string())?, "out_json")
    })
}

/// Recovers `{"template_id", "label", "binding"}` from a premise and
/// hypothesis. Returns `NO_MATCH` when no template renders them.
///
/// # Safety
/// `tk` must be live; strings NUL-terminated; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn templex_parse(
    tk: *const TemplexToolkit,
    premise: *const c_char,
    hypothesis: *const c_char,
    out_json: *mut *mut c_char,
) -> TemplexStatus {
    guard(|| {
        let tk = ref_arg(tk, "tk")?;
        let p = str_arg(premise, "premise")?;
        let h = str_arg(hypothesis, "hypothesis")?;
        let Some((t, b)) = tk.registry.parse_pair(p, h, &tk.lexicon)? else {
            return Err(fail(TemplexStatus::NoMatch, "no template matches"));
        };
        let value = json!({
            "template_id": t.id,
            "label": t.label,
            "binding": b.to_lemmas(&tk.lexicon),
        });
        put(out_json, c_string(value.to_string())?, "out_json")
    })
}

/// Rule-based explanation. `training_ids_json` is a JSON array of known
/// template ids, or null to know the whole registry.
///
/// # Safety
/// `tk` must be live; strings NUL-terminated (except the nullable id list);
/// out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn templex_explain(
    tk: *const TemplexToolkit,
    premise: *const c_char,
    hypothesis: *const c_char,
    training_ids_json: *const c_char,
    fallback: TemplexFallback,
    out_explanation: *mut *mut c_char,
    out_matched: *mut bool,
) -> TemplexStatus {
    guard(|| {
        let tk = ref_arg(tk, "tk")?;
        let p = str_arg(premise, "premise")?;
        let h = str_arg(hypothesis, "hypothesis")?;
        let (scope, training_template_ids) = if training_ids_json.is_null() {
            (Scope::ClosedBook, BTreeSet::new())
        } else {
            let ids: BTreeSet<String> =
                parse_json(str_arg(training_ids_json, "training_ids_json")?, "training_ids_json")?;
            (Scope::Restricted, ids)
        };
        let config = BaselineConfig {
            scope,
            training_template_ids,
            fallback: match fallback {
                TemplexFallback::Abstain => Fallback::Abstain,
                TemplexFallback::Majority => Fallback::Majority,
            },
            log_fallbacks: false,
        };
        config.validate(&tk.registry)?;
        let (explanation, matched) = baseline::explain(p, h, &config, &tk.registry, &tk.lexicon);
        if out_matched.is_null() {
            return Err(fail(TemplexStatus::NullArgument, "`out_matched` is null"));
        }
        put(out_explanation, c_string(explanation)?, "out_explanation")?;
        put(out_matched, matched, "out_matched")
    })
}

/// Label implied by an explanation: non-entailment iff it contains "we do not know".
///
/// # Safety
/// `explanation` must be NUL-terminated; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn templex_predict_label(explanation: *const c_char, out: *mut TemplexLabel) -> TemplexStatus {
    guard(|| {
        let label = match baseline::predict(str_arg(explanation, "explanation")?) {
            Label::Entailment => TemplexLabel::Entailment,
            Label::NonEntailment => TemplexLabel::NonEntailment,
        };
        put(out, label, "out")
    })
}

/// Evaluates a predictions file against a gold examples file; writes the
/// report as JSON.
///
/// # Safety
/// `tk` must be live; paths NUL-terminated; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn templex_evaluate_files(
    tk: *const TemplexToolkit,
    predictions_path: *const c_char,
    gold_path: *const c_char,
    out_json: *mut *mut c_char,
) -> TemplexStatus {
    guard(|| {
        let tk = ref_arg(tk, "tk")?;
        let preds = Path::new(str_arg(predictions_path, "predictions_path")?);
        let gold = str_arg(gold_path, "gold_path")?;
        let report = evaluate_files(preds, &[gold], &tk.lexicon)?;
        let text = serde_json::to_string(&report).map_err(|e| fail(TemplexStatus::Invariant, e.to_string()))?;
        put(out_json, c_string(text)?, "out_json")
    })
}

#[no_mangle]
pub extern "C" fn templex_bleu_new() -> *mut TemplexBleu {
    Box::into_raw(Box::new(TemplexBleu {
        stats: BleuStats::default(),
    }))
}

/// Adds one candidate/reference pair (tokenized internally). The reference
/// must have at least one token.
///
/// # Safety
/// `bleu` must be live; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn templex_bleu_add(
    bleu: *mut TemplexBleu,
    candidate: *const c_char,
    reference: *const c_char,
) -> TemplexStatus {
    guard(|| {
        let b = bleu
            .as_mut()
            .ok_or_else(|| fail(TemplexStatus::NullArgument, "`bleu` is null"))?;
        let c = tokenize(str_arg(candidate, "candidate")?);
        let r = tokenize(str_arg(reference, "reference")?);
        if r.is_empty() {
            return Err(fail(TemplexStatus::InvalidArgument, "reference is empty"));
        }
        b.stats.add(&c, &r);
        Ok(())
    })
}

/// Corpus BLEU in [0, 100] over everything added so far; 0 for a null handle.
///
/// # Safety
/// `bleu` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn templex_bleu_score(bleu: *const TemplexBleu) -> f64 {
    bleu.as_ref().map_or(0.0, |b| b.stats.score())
}

/// # Safety
/// `bleu` must come from [`templex_bleu_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn templex_bleu_free(bleu: *mut TemplexBleu) {
    if !bleu.is_null() {
        drop(Box::from_raw(bleu));
    }
}
