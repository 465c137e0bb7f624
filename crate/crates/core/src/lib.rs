//! Incremental, message-passing dependency parsing over a lexicalized
//! performance grammar.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides:
//!
//! * [`grammar`]: word-class hierarchy with inherited valency frames, the
//!   lexicon and flat feature unification ([`features`]).
//! * [`kb`]: a small terminological knowledge base with copy-on-write
//!   interpretation contexts.
//! * [`syntax`]: the two instrumented constraint predicates, `syntax_check`
//!   and (in [`kb`]) `concept_check`, both counted in [`metrics::Metrics`].
//! * [`engine`]: the actor-based parser (attach, skip, backtrack, predict,
//!   preference) and its exhaustive counterpart.
//! * [`chart`]: a complete active chart parser over the same grammar.
//! * [`text`]: centering-based nominal anaphora resolution.
//!
//! File formats, the corpus runner and the command line tool live in the
//! `parsetalk` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chart;
pub mod engine;
pub mod features;
pub mod grammar;
pub mod kb;
pub mod metrics;
mod phrase;
pub mod result;
pub mod syntax;
pub mod text;
pub mod tokens;
pub mod word;

#[cfg(test)]
mod test_fixtures;

pub use chart::{ChartConfig, ChartVariant};
pub use engine::{parse, Mode, ParseConfig, ParseError, Preference};
pub use features::{unify, FeatureStructure, FeatureValue};
pub use grammar::{Grammar, GrammarBuilder, GrammarError};
pub use kb::{ContextStore, Kb, KbBuilder, KbError};
pub use metrics::{Metrics, MetricsRecord};
pub use result::{Analysis, DepEdge, ParseResult};
