//! The incremental parser.
//!
//! Tokens are read left to right. Each one becomes the active container and
//! the search cascade (prediction, head, modifier; then skipping, then
//! backtracking) runs to quiescence before the next token is read.
//! [`Mode::Exhaustive`] drops every restriction and explores all
//! attachment orders; it is the complete reference the restricted mode is
//! measured against.

mod exhaustive;
pub(crate) mod protocol;
mod restricted;
mod scheduler;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::grammar::Grammar;
use crate::kb::{ContextId, ContextStore, Kb, KbError};
use crate::metrics::Metrics;
use crate::result::ParseResult;

/// Tokens whose containers act as barriers.
pub const PUNCTUATION: [&str; 6] = [".", ",", ";", ":", "!", "?"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Restricted,
    Exhaustive,
}

/// How competing attachments of one search are split into pursued and
/// deferred ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preference {
    AllPreferred,
    /// Attachments to the head with the greatest position win.
    ClosestAttachment,
}

impl Preference {
    pub const IDS: [&'static str; 2] = ["all-preferred", "closest-attachment"];

    pub fn from_id(id: &str) -> Result<Self, ParseError> {
        match id {
            "all-preferred" => Ok(Preference::AllPreferred),
            "closest-attachment" => Ok(Preference::ClosestAttachment),
            other => Err(ParseError::UnknownPreference(other.into())),
        }
    }
}

pub type InterruptHook = Arc<dyn Fn() -> bool + Send + Sync>;

#[derive(Clone)]
pub struct ParseConfig {
    pub mode: Mode,
    pub memoization_pruning: bool,
    pub barrier_bounding: bool,
    /// Preference predicate id, see [`Preference::IDS`].
    pub preference: String,
    pub seed: u64,
    pub trace: bool,
    /// Most phrases one container may hold.
    pub ambiguity_cap: usize,
    /// Most distinct search states in exhaustive mode.
    pub state_ceiling: usize,
    /// Polled between protocol steps; returning true aborts the parse.
    pub interrupt: Option<InterruptHook>,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            mode: Mode::Restricted,
            memoization_pruning: true,
            barrier_bounding: true,
            preference: "all-preferred".into(),
            seed: 0,
            trace: false,
            ambiguity_cap: 64,
            state_ceiling: 200_000,
            interrupt: None,
        }
    }
}

impl ParseConfig {
    pub fn exhaustive() -> Self {
        ParseConfig {
            mode: Mode::Exhaustive,
            memoization_pruning: false,
            barrier_bounding: false,
            ..Default::default()
        }
    }

    /// The settings actually in force: exhaustive mode switches both
    /// restrictions off.
    pub fn effective(&self) -> ParseConfig {
        let mut c = self.clone();
        if c.mode == Mode::Exhaustive {
            c.memoization_pruning = false;
            c.barrier_bounding = false;
        }
        c
    }

    pub(crate) fn interrupted(&self) -> bool {
        self.interrupt.as_ref().is_some_and(|f| f())
    }
}

impl fmt::Debug for ParseConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParseConfig")
            .field("mode", &self.mode)
            .field("memoization_pruning", &self.memoization_pruning)
            .field("barrier_bounding", &self.barrier_bounding)
            .field("preference", &self.preference)
            .field("seed", &self.seed)
            .field("trace", &self.trace)
            .field("ambiguity_cap", &self.ambiguity_cap)
            .field("state_ceiling", &self.state_ceiling)
            .field("interrupt", &self.interrupt.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("lexeme `{lexeme}` refers to concept `{concept}`, which the knowledge base does not declare")]
    UnknownConcept { lexeme: String, concept: String },
    #[error("valency `{label}` of class `{class}` refers to role `{role}`, which the knowledge base does not declare")]
    UnknownRole { class: String, label: String, role: String },
    #[error("unknown preference predicate `{0}`")]
    UnknownPreference(String),
    #[error("attachment offer refers to a container that is no longer on the chain")]
    StaleOffer,
    #[error("{what} exceeded its limit of {limit}")]
    ResourceLimit { what: &'static str, limit: usize },
    #[error("interrupted")]
    Interrupted,
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// Checks that every concept and role the grammar mentions is declared in
/// the knowledge base.
pub fn validate(g: &Grammar, kb: &Kb) -> Result<(), ParseError> {
    for (_, e) in g.lexemes() {
        if let Some(c) = &e.concept {
            if kb.concept_id(c).is_none() {
                return Err(ParseError::UnknownConcept {
                    lexeme: e.surface.clone(),
                    concept: c.clone(),
                });
            }
        }
    }
    for (_, class) in g.classes() {
        for v in &class.valencies {
            if let Some(r) = &v.role {
                if kb.role_id(r).is_none() {
                    return Err(ParseError::UnknownRole {
                        class: class.name.clone(),
                        label: v.label.clone(),
                        role: r.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Parses one sentence in a fresh context store.
pub fn parse(tokens: &[&str], g: &Grammar, kb: &Kb, cfg: &ParseConfig) -> Result<ParseResult, ParseError> {
    let mut store = ContextStore::new();
    let base = store.root();
    parse_with(&mut store, base, tokens, g, kb, cfg, &Metrics::new())
}

/// Parses one sentence on top of `base` (for example the interpretation of
/// the preceding utterance). Counts go to `metrics`; the result carries the
/// increments of this call only.
pub fn parse_with(
    store: &mut ContextStore,
    base: ContextId,
    tokens: &[&str],
    g: &Grammar,
    kb: &Kb,
    cfg: &ParseConfig,
    metrics: &Metrics,
) -> Result<ParseResult, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    validate(g, kb)?;
    let cfg = cfg.effective();
    let preference = Preference::from_id(&cfg.preference)?;
    let before = metrics.snapshot();
    let run = Run {
        tokens,
        cfg: &cfg,
        preference,
        base,
    };
    let env = crate::phrase::Env { g, kb, store, metrics };
    let (analyses, trace) = match cfg.mode {
        Mode::Restricted => restricted::run(&run, env)?,
        Mode::Exhaustive => exhaustive::run(&run, env)?,
    };
    let mut result = ParseResult::from_analyses(analyses, tokens.len(), metrics.snapshot().since(&before));
    result.trace = trace;
    Ok(result)
}

/// Per-call settings shared by both modes.
pub(crate) struct Run<'a> {
    pub tokens: &'a [&'a str],
    pub cfg: &'a ParseConfig,
    pub preference: Preference,
    pub base: ContextId,
}

impl Run<'_> {
    pub fn is_barrier(&self, token: usize) -> bool {
        PUNCTUATION.contains(&self.tokens[token])
    }

    pub fn check_interrupt(&self) -> Result<(), ParseError> {
        if self.cfg.interrupted() {
            Err(ParseError::Interrupted)
        } else {
            Ok(())
        }
    }
}

/// Phrase identity used when collecting the final analyses.
pub(crate) fn dedup_by_key(phrases: Vec<crate::phrase::Phrase>) -> Vec<crate::phrase::Phrase> {
    let mut seen = alloc::collections::BTreeSet::new();
    phrases.into_iter().filter(|p| seen.insert(p.key())).collect()
}
