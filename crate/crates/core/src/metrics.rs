//! Call counters for the two constraint predicates and protocol events.
//!
//! Counters are atomic so that a single [`Metrics`] may be shared by
//! concurrently running parses; a record may also forward every increment to
//! a parent (run-level) record.

use alloc::sync::Arc;
use core::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Default)]
pub struct Metrics {
    syntax_checks: AtomicU64,
    concept_checks: AtomicU64,
    anaphora_concept_checks: AtomicU64,
    backtrack_events: AtomicU64,
    parent: Option<Arc<Metrics>>,
}

impl Metrics {
    pub fn new() -> Self {
        Self::default()
    }

    /// A record whose increments are mirrored into `parent`.
    pub fn with_parent(parent: Arc<Metrics>) -> Self {
        Metrics {
            parent: Some(parent),
            ..Default::default()
        }
    }

    pub fn record_syntax_check(&self) {
        self.syntax_checks.fetch_add(1, Ordering::Relaxed);
        if let Some(p) = &self.parent {
            p.record_syntax_check();
        }
    }

    pub fn record_concept_check(&self) {
        self.concept_checks.fetch_add(1, Ordering::Relaxed);
        if let Some(p) = &self.parent {
            p.record_concept_check();
        }
    }

    pub fn record_anaphora_concept_check(&self) {
        self.anaphora_concept_checks.fetch_add(1, Ordering::Relaxed);
        if let Some(p) = &self.parent {
            p.record_anaphora_concept_check();
        }
    }

    pub fn record_backtrack(&self) {
        self.backtrack_events.fetch_add(1, Ordering::Relaxed);
        if let Some(p) = &self.parent {
            p.record_backtrack();
        }
    }

    pub fn syntax_checks(&self) -> u64 {
        self.syntax_checks.load(Ordering::Relaxed)
    }

    pub fn concept_checks(&self) -> u64 {
        self.concept_checks.load(Ordering::Relaxed)
    }

    pub fn anaphora_concept_checks(&self) -> u64 {
        self.anaphora_concept_checks.load(Ordering::Relaxed)
    }

    pub fn backtrack_events(&self) -> u64 {
        self.backtrack_events.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> MetricsRecord {
        MetricsRecord {
            syntax_checks: self.syntax_checks(),
            concept_checks: self.concept_checks(),
            anaphora_concept_checks: self.anaphora_concept_checks(),
            backtrack_events: self.backtrack_events(),
            ..Default::default()
        }
    }
}

/// Plain snapshot of one run's counters and outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MetricsRecord {
    pub syntax_checks: u64,
    /// Parser-side CONCEPTCHECK calls (role filling).
    pub concept_checks: u64,
    /// Conceptual checks issued while searching nominal antecedents.
    pub anaphora_concept_checks: u64,
    pub backtrack_events: u64,
    pub skipped_tokens: u64,
    /// Filled in by callers that have a clock.
    pub wall_time_ms: Option<u64>,
    pub complete: bool,
}

impl MetricsRecord {
    pub fn concept_checks_with_anaphora(&self) -> u64 {
        self.concept_checks + self.anaphora_concept_checks
    }

    /// Counter-wise difference `self - earlier`.
    pub fn since(&self, earlier: &MetricsRecord) -> MetricsRecord {
        MetricsRecord {
            syntax_checks: self.syntax_checks - earlier.syntax_checks,
            concept_checks: self.concept_checks - earlier.concept_checks,
            anaphora_concept_checks: self.anaphora_concept_checks - earlier.anaphora_concept_checks,
            backtrack_events: self.backtrack_events - earlier.backtrack_events,
            ..*self
        }
    }
}
