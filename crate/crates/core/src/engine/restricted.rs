//! The restricted (incomplete, efficient) protocol: arc-eager attachment on
//! the right rim, skipping, backtracking into the parse history, retry of
//! skipped material, prediction and preference.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;

use super::protocol::{split_by_preference, Offer, PhraseId, Protocol, Scope, Search, SearchKind};
use super::{ParseError, Run};
use crate::phrase::{with_predictions, Env, Phrase, Reading};
use crate::result::{Analysis, TraceEvent};
use crate::tokens::TokenSet;

type CId = usize;

const SEARCH: [&str; 3] = ["searchPredictionFor", "searchHeadFor", "searchModifierFor"];
const RESEARCH: [&str; 3] = ["reSearchPredictionFor", "reSearchHeadFor", "reSearchModifierFor"];

struct Container {
    phrases: Vec<PhraseId>,
    coverage: TokenSet,
    /// Historical predecessors: the containers this one superseded that
    /// remain reachable.
    hist: Vec<CId>,
    deferred: Option<CId>,
    /// The container of a punctuation token.
    barrier: bool,
    /// Moved aside by skipping; retried after later attachments.
    skipped: bool,
}

struct Engine<'r, 'e> {
    run: &'r Run<'r>,
    env: Env<'e>,
    proto: Protocol,
    containers: Vec<Container>,
    /// The textual chain, left to right; the active container is last.
    chain: Vec<CId>,
}

pub(super) fn run(run: &Run<'_>, env: Env<'_>) -> Result<(Vec<Analysis>, Vec<TraceEvent>), ParseError> {
    let mut e = Engine {
        run,
        env,
        proto: Protocol::new(run.cfg.seed, run.cfg.trace),
        containers: Vec::new(),
        chain: Vec::new(),
    };
    for t in 0..run.tokens.len() {
        run.check_interrupt()?;
        let a = e.read(t)?;
        e.integrate(a)?;
        debug_assert!(e.chain_partitions(t + 1));
    }
    e.finish()
}

impl Engine<'_, '_> {
    fn read(&mut self, t: usize) -> Result<CId, ParseError> {
        let mut phrases = Vec::new();
        for r in Reading::all(self.env.g, self.run.tokens[t]) {
            let lexical = Phrase::lexical(&mut self.env, self.run.base, t as u32, r)?;
            for p in with_predictions(&mut self.env, lexical)? {
                phrases.push(self.proto.add(p));
            }
        }
        let c = self.push(Container {
            phrases,
            coverage: TokenSet::singleton(t as u32),
            hist: Vec::new(),
            deferred: None,
            barrier: self.run.is_barrier(t),
            skipped: false,
        });
        self.chain.push(c);
        Ok(c)
    }

    /// A lexical container without predictions, for a token released from
    /// a reanalysed phrase.
    fn relexicalize(&mut self, t: u32) -> Result<CId, ParseError> {
        let mut phrases = Vec::new();
        for r in Reading::all(self.env.g, self.run.tokens[t as usize]) {
            let p = Phrase::lexical(&mut self.env, self.run.base, t, r)?;
            phrases.push(self.proto.add(p));
        }
        Ok(self.push(Container {
            phrases,
            coverage: TokenSet::singleton(t),
            hist: Vec::new(),
            deferred: None,
            barrier: self.run.is_barrier(t as usize),
            skipped: true,
        }))
    }

    /// The chain's coverages are disjoint and together cover `0..read`.
    fn chain_partitions(&self, read: usize) -> bool {
        let mut all = TokenSet::new();
        for &c in &self.chain {
            let cov = &self.containers[c].coverage;
            if !all.is_disjoint(cov) {
                return false;
            }
            all = all.union(cov);
        }
        all.len() == read && all.last().is_none_or(|l| l as usize + 1 == read)
    }

    fn push(&mut self, c: Container) -> CId {
        self.containers.push(c);
        self.containers.len() - 1
    }

    fn integrate(&mut self, mut a: CId) -> Result<(), ParseError> {
        let mut backtracked = false;
        loop {
            self.run.check_interrupt()?;
            if let Some(n) = self.scan(a)? {
                a = n;
                continue;
            }
            if self.chain.len() == 1 {
                return Ok(());
            }
            // an open prediction waits for more input
            let waiting = self.containers[a]
                .phrases
                .iter()
                .any(|&p| self.proto.phrase(p).has_placeholder());
            if waiting || backtracked {
                return Ok(());
            }
            backtracked = true;
            match self.backtrack(a)? {
                Some(n) => a = n,
                None => return Ok(()),
            }
        }
    }

    /// Searches leftward along the chain, skipping containers that offer
    /// nothing.
    fn scan(&mut self, a: CId) -> Result<Option<CId>, ParseError> {
        let ai = self.chain.len() - 1;
        let mut skipped = Vec::new();
        for ti in (0..ai).rev() {
            let t = self.chain[ti];
            let offers = self.cascade(a, t, SEARCH)?;
            if offers.is_empty() {
                skipped.push(t);
                if self.run.cfg.barrier_bounding && self.containers[t].barrier {
                    return Ok(None);
                }
                continue;
            }
            return self.attach(a, t, offers, skipped).map(Some);
        }
        Ok(None)
    }

    /// Prediction, then head, then modifier search against one target; each
    /// stage only runs if the previous one found nothing.
    fn cascade(&mut self, a: CId, t: CId, names: [&'static str; 3]) -> Result<Vec<Offer>, ParseError> {
        let active = self.containers[a].phrases.clone();
        let targets = self.containers[t].phrases.clone();
        let stages = [
            (SearchKind::Prediction, names[0]),
            (SearchKind::Head, names[1]),
            (SearchKind::Modifier, names[2]),
        ];
        for (kind, name) in stages {
            if kind == SearchKind::Prediction && !targets.iter().any(|&p| self.proto.phrase(p).has_placeholder()) {
                continue;
            }
            let search = Search {
                kind,
                scope: Scope::RightRim,
                name,
                requester: a as u32,
                target: t as u32,
                active: &active,
                targets: &targets,
            };
            let offers = self.proto.episode(&mut self.env, &search)?;
            if !offers.is_empty() {
                return Ok(offers);
            }
        }
        Ok(Vec::new())
    }

    /// Historical links of a container built from `offers`: the head part
    /// always, the modifying part only without memoization pruning.
    fn history(&self, kind: SearchKind, active: CId, target: CId) -> Vec<CId> {
        let (head, modifier) = match kind {
            SearchKind::Modifier => (active, target),
            _ => (target, active),
        };
        if self.run.cfg.memoization_pruning {
            alloc::vec![head]
        } else {
            alloc::vec![head, modifier]
        }
    }

    fn attach(&mut self, a: CId, t: CId, offers: Vec<Offer>, skipped: Vec<CId>) -> Result<CId, ParseError> {
        let ti = self.chain.iter().position(|&c| c == t).ok_or(ParseError::StaleOffer)?;
        let hist = self.history(offers[0].kind, a, t);
        let coverage = self.containers[a].coverage.union(&self.containers[t].coverage);
        let n = self.build(offers, coverage, hist);
        self.chain.truncate(ti);
        self.move_aside(skipped);
        self.chain.push(n);
        self.retry(n)
    }

    /// Flags containers as skipped and appends them to the chain in token
    /// order.
    fn move_aside(&mut self, mut moved: Vec<CId>) {
        for &c in &moved {
            self.containers[c].skipped = true;
        }
        moved.sort_by_key(|&c| self.containers[c].coverage.first());
        self.chain.extend(moved);
    }

    /// A new container from a successful search; deferred offers go into a
    /// side container of their own.
    fn build(&mut self, offers: Vec<Offer>, coverage: TokenSet, hist: Vec<CId>) -> CId {
        let (mut preferred, deferred) = split_by_preference(offers, self.run.preference);
        let cap = self.run.cfg.ambiguity_cap.max(1);
        if preferred.len() > cap {
            log::warn!("container holds {} analyses, keeping {cap}", preferred.len());
            preferred.truncate(cap);
        }
        let deferred = if deferred.is_empty() {
            None
        } else {
            let phrases = self.add_offers(deferred, true);
            Some(self.push(Container {
                phrases,
                coverage: coverage.clone(),
                hist: hist.clone(),
                deferred: None,
                barrier: false,
                skipped: false,
            }))
        };
        let phrases = self.add_offers(preferred, false);
        self.push(Container {
            phrases,
            coverage,
            hist,
            deferred,
            barrier: false,
            skipped: false,
        })
    }

    fn add_offers(&mut self, offers: Vec<Offer>, deferred: bool) -> Vec<PhraseId> {
        let mut seen = BTreeSet::new();
        let mut ids = Vec::new();
        for o in offers {
            if seen.insert(o.phrase.key()) {
                let mut p = o.phrase;
                p.deferred |= deferred;
                ids.push(self.proto.add(p));
            }
        }
        ids
    }

    /// Lets skipped containers inside the span of `n` attach where the
    /// discontinuity occurs. Each is tried at most once per new container.
    fn retry(&mut self, mut n: CId) -> Result<CId, ParseError> {
        let mut tried = BTreeSet::new();
        loop {
            self.run.check_interrupt()?;
            let span = &self.containers[n].coverage;
            let (lo, hi) = (span.first(), span.last());
            let mut candidates: Vec<CId> = self
                .chain
                .iter()
                .copied()
                .filter(|&c| {
                    let s = &self.containers[c];
                    s.skipped && !tried.contains(&c) && s.coverage.first() >= lo && s.coverage.last() <= hi
                })
                .collect();
            candidates.sort_by_key(|&c| self.containers[c].coverage.first());

            let mut found = None;
            for s in candidates {
                tried.insert(s);
                let offers = self.retry_one(s, n)?;
                if !offers.is_empty() {
                    found = Some((s, offers));
                    break;
                }
            }
            let Some((s, offers)) = found else {
                return Ok(n);
            };
            let hist = self.history(offers[0].kind, s, n);
            let coverage = self.containers[n].coverage.union(&self.containers[s].coverage);
            let merged = self.build(offers, coverage, hist);
            self.chain.retain(|&c| c != s);
            let ni = self.chain.iter().position(|&c| c == n).ok_or(ParseError::StaleOffer)?;
            self.chain[ni] = merged;
            n = merged;
            tried.clear();
        }
    }

    /// Skipped container `s` looks for a head among the words around its
    /// gap in `n`; `s` heading `n` is left to the scan that follows.
    fn retry_one(&mut self, s: CId, n: CId) -> Result<Vec<Offer>, ParseError> {
        let active = self.containers[s].phrases.clone();
        let targets = self.containers[n].phrases.clone();
        let gap = self.containers[s].coverage.clone();
        let head = Search {
            kind: SearchKind::Head,
            scope: Scope::Discontinuity(gap),
            name: RESEARCH[1],
            requester: s as u32,
            target: n as u32,
            active: &active,
            targets: &targets,
        };
        Ok(self.proto.episode(&mut self.env, &head)?)
    }

    /// The last token before `t` that is a barrier.
    fn barrier_before(&self, t: u32) -> Option<u32> {
        (0..t).rev().find(|&i| self.run.is_barrier(i as usize))
    }

    fn predecessors(&self, c: CId) -> impl Iterator<Item = CId> + '_ {
        let c = &self.containers[c];
        c.deferred.into_iter().chain(c.hist.iter().copied())
    }

    /// Re-addresses the failed search to the parse history of the
    /// containers on the chain, nearest first.
    fn backtrack(&mut self, a: CId) -> Result<Option<CId>, ParseError> {
        let bounding = self.run.cfg.barrier_bounding;
        let ai = self.chain.len() - 1;
        let limit = self.containers[a].coverage.first().and_then(|t| self.barrier_before(t));
        let mut sent = false;
        for xi in (0..ai).rev() {
            let x = self.chain[xi];
            if bounding && self.containers[x].barrier {
                break;
            }
            let mut visited = BTreeSet::from([x]);
            let mut queue: VecDeque<CId> = self.predecessors(x).collect();
            while let Some(h) = queue.pop_front() {
                if !visited.insert(h) {
                    continue;
                }
                queue.extend(self.predecessors(h));
                let reaches_past_barrier = match (limit, self.containers[h].coverage.first()) {
                    (Some(l), Some(m)) => m <= l,
                    _ => false,
                };
                if bounding && reaches_past_barrier {
                    continue;
                }
                self.run.check_interrupt()?;
                let offers = self.cascade(a, h, RESEARCH)?;
                sent = true;
                if !offers.is_empty() {
                    self.env.metrics.record_backtrack();
                    return self.compose(a, xi, h, offers).map(Some);
                }
            }
        }
        if sent {
            self.env.metrics.record_backtrack();
        }
        Ok(None)
    }

    /// Builds the composite container after a successful backtrack. Tokens
    /// of the superseded container that the historical one lacks are
    /// released as fresh skipped containers.
    fn compose(&mut self, a: CId, xi: usize, h: CId, offers: Vec<Offer>) -> Result<CId, ParseError> {
        let x = self.chain[xi];
        let hist = self.history(offers[0].kind, a, h);
        let coverage = self.containers[h].coverage.union(&self.containers[a].coverage);
        let n = self.build(offers, coverage, hist);
        let gap = self.containers[x].coverage.difference(&self.containers[h].coverage);
        let mut moved = Vec::new();
        for t in gap.iter() {
            moved.push(self.relexicalize(t)?);
        }
        let ai = self.chain.len() - 1;
        moved.extend_from_slice(&self.chain[xi + 1..ai]);
        self.chain.truncate(xi);
        self.move_aside(moved);
        self.chain.push(n);
        self.retry(n)
    }

    /// The largest container on the chain, rightmost on ties, with its
    /// deferred alternatives.
    fn finish(mut self) -> Result<(Vec<Analysis>, Vec<TraceEvent>), ParseError> {
        let mut best = self.chain[0];
        for &c in &self.chain {
            if self.containers[c].coverage.len() >= self.containers[best].coverage.len() {
                best = c;
            }
        }
        let mut ids = self.containers[best].phrases.clone();
        if let Some(d) = self.containers[best].deferred {
            ids.extend_from_slice(&self.containers[d].phrases);
        }
        let phrases = super::dedup_by_key(ids.into_iter().map(|p| self.proto.phrase(p).clone()).collect());
        let analyses = phrases
            .iter()
            .map(|p| p.to_analysis(self.env.g, self.env.kb, self.env.store))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((analyses, self.proto.take_trace()))
    }
}
