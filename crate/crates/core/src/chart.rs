//! Active chart parser over the same dependency grammar, used as the
//! complete baseline. Every edge is a full phrase with its own
//! interpretation context; nothing is packed or shared.
//!
//! Edges are combined root to root: a popped agenda edge is tried as head
//! and as modifier against every compatible edge already in the chart,
//! through the same counted checks the engine uses.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::engine::{validate, ParseError};
use crate::grammar::Grammar;
use crate::kb::{ContextId, ContextStore, Kb};
use crate::metrics::Metrics;
use crate::phrase::{try_attach, Env, Phrase, PhraseKey, Reading};
use crate::result::ParseResult;
use crate::tokens::TokenSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ChartVariant {
    /// Edges cover contiguous token spans.
    #[default]
    Standard,
    /// Edges may have up to `gap_cap` gaps.
    Discontinuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChartConfig {
    pub variant: ChartVariant,
    /// Most edges (chart and agenda together) before giving up.
    pub edge_ceiling: usize,
    pub gap_cap: usize,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig {
            variant: ChartVariant::Standard,
            edge_ceiling: 100_000,
            gap_cap: 2,
        }
    }
}

impl ChartConfig {
    pub fn discontinuous() -> Self {
        ChartConfig {
            variant: ChartVariant::Discontinuous,
            ..Default::default()
        }
    }
}

/// Coverage as a bit mask when the sentence is short enough, else as a set.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Mask(u128);

impl Mask {
    fn of(s: &TokenSet) -> Option<Mask> {
        let mut m = 0u128;
        for t in s.iter() {
            if t >= 128 {
                return None;
            }
            m |= 1 << t;
        }
        Some(Mask(m))
    }

    fn gaps(self) -> usize {
        if self.0 == 0 {
            return 0;
        }
        let trimmed = self.0 >> self.0.trailing_zeros();
        // runs of ones minus one
        let runs = (trimmed & !(trimmed << 1)).count_ones() as usize;
        runs - 1
    }
}

struct Chart<'a, 'e> {
    cfg: &'a ChartConfig,
    env: Env<'e>,
    /// Processed edges grouped by coverage.
    chart: BTreeMap<TokenSet, Vec<Phrase>>,
    masks: BTreeMap<TokenSet, Option<Mask>>,
    agenda: VecDeque<Phrase>,
    known: BTreeSet<PhraseKey>,
}

pub fn parse(tokens: &[&str], g: &Grammar, kb: &Kb, cfg: &ChartConfig) -> Result<ParseResult, ParseError> {
    let mut store = ContextStore::new();
    let base = store.root();
    parse_with(&mut store, base, tokens, g, kb, cfg, &Metrics::new())
}

pub fn parse_with(
    store: &mut ContextStore,
    base: ContextId,
    tokens: &[&str],
    g: &Grammar,
    kb: &Kb,
    cfg: &ChartConfig,
    metrics: &Metrics,
) -> Result<ParseResult, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    validate(g, kb)?;
    let before = metrics.snapshot();
    let mut c = Chart {
        cfg,
        env: Env { g, kb, store, metrics },
        chart: BTreeMap::new(),
        masks: BTreeMap::new(),
        agenda: VecDeque::new(),
        known: BTreeSet::new(),
    };
    for (t, surface) in tokens.iter().enumerate() {
        for r in Reading::all(g, surface) {
            let p = Phrase::lexical(&mut c.env, base, t as u32, r)?;
            c.offer(p)?;
        }
    }
    while let Some(e) = c.agenda.pop_front() {
        c.combine(&e)?;
        c.masks
            .entry(e.coverage.clone())
            .or_insert_with(|| Mask::of(&e.coverage));
        c.chart.entry(e.coverage.clone()).or_default().push(e);
    }

    let best = c.chart.keys().map(TokenSet::len).max().unwrap_or(0);
    let mut analyses = Vec::new();
    for (cov, edges) in &c.chart {
        if cov.len() == best {
            for e in edges {
                analyses.push(e.to_analysis(g, kb, c.env.store)?);
            }
        }
    }
    Ok(ParseResult::from_analyses(
        analyses,
        tokens.len(),
        metrics.snapshot().since(&before),
    ))
}

impl Chart<'_, '_> {
    fn offer(&mut self, p: Phrase) -> Result<(), ParseError> {
        if self.known.insert(p.key()) {
            if self.known.len() > self.cfg.edge_ceiling {
                return Err(ParseError::ResourceLimit {
                    what: "chart edges",
                    limit: self.cfg.edge_ceiling,
                });
            }
            self.agenda.push_back(p);
        }
        Ok(())
    }

    fn compatible(&self, a: &TokenSet, a_mask: Option<Mask>, b: &TokenSet, b_mask: Option<Mask>) -> bool {
        let gaps = match (a_mask, b_mask) {
            (Some(x), Some(y)) => {
                if x.0 & y.0 != 0 {
                    return false;
                }
                Mask(x.0 | y.0).gaps()
            }
            _ => {
                if !a.is_disjoint(b) {
                    return false;
                }
                a.union(b).gap_count()
            }
        };
        match self.cfg.variant {
            ChartVariant::Standard => gaps == 0,
            ChartVariant::Discontinuous => gaps <= self.cfg.gap_cap,
        }
    }

    fn combine(&mut self, e: &Phrase) -> Result<(), ParseError> {
        let e_mask = Mask::of(&e.coverage);
        let partners: Vec<TokenSet> = self
            .chart
            .keys()
            .filter(|cov| self.compatible(&e.coverage, e_mask, cov, self.masks[*cov]))
            .cloned()
            .collect();
        let e_open: Vec<usize> = e.open_valencies(self.env.g, e.root).collect();
        for cov in partners {
            let fs = self.chart.remove(&cov).unwrap_or_default();
            let outcome = self.combine_with(e, &e_open, &fs);
            self.chart.insert(cov, fs);
            outcome?;
        }
        Ok(())
    }

    fn combine_with(&mut self, e: &Phrase, e_open: &[usize], fs: &[Phrase]) -> Result<(), ParseError> {
        for f in fs {
            for &vi in e_open {
                if let Some(p) = try_attach(&mut self.env, e, e.root, f, vi)? {
                    self.offer(p)?;
                }
            }
            for vi in f.open_valencies(self.env.g, f.root).collect::<Vec<_>>() {
                if let Some(p) = try_attach(&mut self.env, f, f.root, e, vi)? {
                    self.offer(p)?;
                }
            }
        }
        Ok(())
    }
}
