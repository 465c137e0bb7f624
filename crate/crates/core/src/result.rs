//! Parse outcomes shared by the engine and the chart baseline.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::features::FeatureStructure;
use crate::grammar::{ClassId, LexemeId};
use crate::kb::{ContextId, InstanceId, Interpretation};
use crate::metrics::MetricsRecord;
use crate::tokens::TokenSet;

/// One dependency relation between two tokens.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DepEdge {
    pub head: u32,
    pub modifier: u32,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisWord {
    pub token: u32,
    pub lexeme: Option<LexemeId>,
    pub class: ClassId,
    pub features: FeatureStructure,
    pub instance: Option<InstanceId>,
    /// `(head token, label)`.
    pub head: Option<(u32, String)>,
}

/// A dependency tree over (part of) the input with its interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub root: u32,
    pub coverage: TokenSet,
    /// Sorted; edges to unfilled placeholders are omitted.
    pub edges: Vec<DepEdge>,
    /// Sorted by token.
    pub words: Vec<AnalysisWord>,
    pub interpretation: Interpretation,
    /// Not part of the serialized form: ids depend on scheduling order.
    pub context: ContextId,
    /// Derived from an attachment the preference predicate deferred.
    pub deferred: bool,
    /// Predicted words that were never filled.
    pub open_placeholders: usize,
    pub open_mandatory_placeholders: usize,
}

impl Analysis {
    pub fn word(&self, token: u32) -> Option<&AnalysisWord> {
        self.words.iter().find(|w| w.token == token)
    }
}

/// One delivered protocol message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub seq: u64,
    pub msg: &'static str,
    pub from: String,
    pub to: String,
    pub outcome: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseResult {
    pub analyses: Vec<Analysis>,
    pub skipped: TokenSet,
    pub complete: bool,
    pub metrics: MetricsRecord,
    pub tokens: usize,
    /// Filled only when tracing was requested.
    pub trace: Vec<TraceEvent>,
}

impl ParseResult {
    /// The analysis set as a set of edge multisets (edges are kept sorted).
    pub fn edge_sets(&self) -> BTreeSet<Vec<DepEdge>> {
        self.analyses.iter().map(|a| a.edges.clone()).collect()
    }

    /// Builds a result from maximal analyses; `analyses[0]` is the main one.
    pub(crate) fn from_analyses(mut analyses: Vec<Analysis>, tokens: usize, mut metrics: MetricsRecord) -> Self {
        analyses.sort_by(|a, b| {
            (
                a.deferred,
                &a.edges,
                &a.words.iter().map(|w| w.lexeme).collect::<Vec<_>>(),
            )
                .cmp(&(
                    b.deferred,
                    &b.edges,
                    &b.words.iter().map(|w| w.lexeme).collect::<Vec<_>>(),
                ))
        });
        let (skipped, complete) = match analyses.first() {
            Some(main) => {
                let skipped = main.coverage.holes();
                let all = main.coverage.union(&skipped).len() == tokens;
                let complete = all && analyses.iter().any(|a| a.open_mandatory_placeholders == 0);
                (skipped, complete)
            }
            None => (TokenSet::new(), false),
        };
        metrics.skipped_tokens = skipped.len() as u64;
        metrics.complete = complete;
        ParseResult {
            analyses,
            skipped,
            complete,
            metrics,
            tokens,
            trace: Vec::new(),
        }
    }
}
