#ifndef TEMPLEX_H
#define TEMPLEX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TemplexStatus {
  TEMPLEX_STATUS_OK = 0,
  TEMPLEX_STATUS_NULL_ARGUMENT = 1,
  TEMPLEX_STATUS_INVALID_UTF8 = 2,
  TEMPLEX_STATUS_IO = 3,
  TEMPLEX_STATUS_SYNTAX = 4,
  TEMPLEX_STATUS_VALIDATION = 5,
  TEMPLEX_STATUS_NO_MATCH = 6,
  TEMPLEX_STATUS_AMBIGUOUS = 7,
  TEMPLEX_STATUS_INVALID_ARGUMENT = 8,
  TEMPLEX_STATUS_INVARIANT = 9,
  TEMPLEX_STATUS_PANIC = 10,
} TemplexStatus;

typedef enum TemplexFallback {
  TEMPLEX_FALLBACK_ABSTAIN = 0,
  TEMPLEX_FALLBACK_MAJORITY = 1,
} TemplexFallback;

typedef enum TemplexLabel {
  TEMPLEX_LABEL_ENTAILMENT = 0,
  TEMPLEX_LABEL_NON_ENTAILMENT = 1,
} TemplexLabel;

// Running corpus BLEU over added sentence pairs.
typedef struct TemplexBleu TemplexBleu;

// A validated lexicon and template registry.
typedef struct TemplexToolkit TemplexToolkit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call into the library on this thread; do not free.
const char *templex_last_error_message(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void templex_string_free(char *s);

// Toolkit over the built-in lexicon and registry.
//
// # Safety
// `out` must be a valid pointer.
enum TemplexStatus templex_toolkit_new_default(struct TemplexToolkit **out);

// Toolkit from a lexicon file and a template file.
//
// # Safety
// Paths must be NUL-terminated strings; `out` must be a valid pointer.
enum TemplexStatus templex_toolkit_load(const char *lexicon_path,
                                        const char *registry_path,
                                        struct TemplexToolkit **out);

// # Safety
// `tk` must come from a toolkit constructor and not have been freed. Null is ignored.
void templex_toolkit_free(struct TemplexToolkit *tk);

// Number of templates, or 0 for a null handle.
//
// # Safety
// `tk` must be null or a live toolkit.
size_t templex_toolkit_template_count(const struct TemplexToolkit *tk);

// Renders a template. `binding_json` maps slot names to lemmas; the result is
// `{"premise", "hypothesis", "explanation", "label"}`.
//
// # Safety
// `tk` must be live; strings NUL-terminated; `out_json` a valid pointer.
enum TemplexStatus templex_render(const struct TemplexToolkit *tk,
                                  const char *template_id,
                                  const char *binding_json,
                                  char **out_json);

// Recovers `{"template_id", "label", "binding"}` from a premise and
// hypothesis. Returns `NO_MATCH` when no template renders them.
//
// # Safety
// `tk` must be live; strings NUL-terminated; `out_json` a valid pointer.
enum TemplexStatus templex_parse(const struct TemplexToolkit *tk,
                                 const char *premise,
                                 const char *hypothesis,
                                 char **out_json);

// Rule-based explanation. `training_ids_json` is a JSON array of known
// template ids, or null to know the whole registry.
//
// # Safety
// `tk` must be live; strings NUL-terminated (except the nullable id list);
// out pointers valid.
enum TemplexStatus templex_explain(const struct TemplexToolkit *tk,
                                   const char *premise,
                                   const char *hypothesis,
                                   const char *training_ids_json,
                                   enum TemplexFallback fallback,
                                   char **out_explanation,
                                   bool *out_matched);

// Label implied by an explanation: non-entailment iff it contains "we do not know".
//
// # Safety
// `explanation` must be NUL-terminated; `out` a valid pointer.
enum TemplexStatus templex_predict_label(const char *explanation, enum TemplexLabel *out);

// Evaluates a predictions file against a gold examples file; writes the
// report as JSON.
//
// # Safety
// `tk` must be live; paths NUL-terminated; `out_json` a valid pointer.
enum TemplexStatus templex_evaluate_files(const struct TemplexToolkit *tk,
                                          const char *predictions_path,
                                          const char *gold_path,
                                          char **out_json);

struct TemplexBleu *templex_bleu_new(void);

// Adds one candidate/reference pair (tokenized internally). The reference
// must have at least one token.
//
// # Safety
// `bleu` must be live; strings NUL-terminated.
enum TemplexStatus templex_bleu_add(struct TemplexBleu *bleu,
                                    const char *candidate,
                                    const char *reference);

// Corpus BLEU in [0, 100] over everything added so far; 0 for a null handle.
//
// # Safety
// `bleu` must be null or live.
double templex_bleu_score(const struct TemplexBleu *bleu);

// # Safety
// `bleu` must come from [`templex_bleu_new`] and not have been freed. Null is ignored.
void templex_bleu_free(struct TemplexBleu *bleu);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEMPLEX_H */
