use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed line in a lexicon or template file.
    #[error("{file}:{line}: {message}")]
    Syntax {
        file: String,
        line: usize,
        message: String,
    },

    #[error("lexicon: {rule}: {message}")]
    Lexicon { rule: &'static str, message: String },

    #[error("template `{template}`: {rule}: {message}")]
    Template {
        template: String,
        rule: &'static str,
        message: String,
    },

    #[error("no form `{feature}` for `{lemma}` ({pos_class})")]
    MissingForm {
        lemma: String,
        pos_class: String,
        feature: String,
    },

    #[error("binding does not fit template `{template}`: {message}")]
    BindingMismatch { template: String, message: String },

    #[error("no {partition} entries for pos class `{pos_class}`")]
    EmptyClass { pos_class: String, partition: String },

    #[error("ambiguous parse, matching templates: {}", .ids.join(", "))]
    Ambiguous { ids: Vec<String> },

    /// Malformed JSON-lines record.
    #[error("{file}:{line}: {message}")]
    Record {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{} prediction(s) do not match any gold example: {}", .ids.len(), preview(.ids))]
    Join { ids: Vec<String> },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 5;
    let mut s = ids.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        s.push_str(", ...");
    }
    s
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for validation or input errors, 2 for broken internal invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 2,
            _ => 1,
        }
    }
}
