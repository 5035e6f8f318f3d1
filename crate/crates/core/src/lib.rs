//! Templated NLI examples with explanations: lexicon and template registry,
//! deterministic few-shot corpora, explanation metrics and a rule-based
//! explain-then-predict baseline.

pub mod baseline;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod lexicon;
pub mod metrics;
pub mod registry;
pub mod rng;
pub mod template;

pub use error::{Error, Result};
pub use lexicon::Lexicon;
pub use registry::Registry;
