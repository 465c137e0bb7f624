//! Complete search: the same head and modifier searches, addressed to every
//! word of every phrase on the chain, in every order, with the option of
//! not attaching at all. Predictions are not used.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::protocol::{split_by_preference, PhraseId, Protocol, Scope, Search, SearchKind};
use super::{ParseError, Run};
use crate::phrase::{Env, Phrase, PhraseKey, Reading};
use crate::result::{Analysis, TraceEvent};

#[derive(Clone)]
struct State {
    /// Next token to read.
    next: usize,
    /// Phrases read so far, left to right by creation; the active one last.
    chain: Vec<PhraseId>,
    active: bool,
}

struct Explorer<'r, 'e> {
    run: &'r Run<'r>,
    env: Env<'e>,
    proto: Protocol,
    by_key: BTreeMap<PhraseKey, PhraseId>,
    seen: BTreeSet<(usize, bool, Vec<PhraseId>)>,
    stack: Vec<State>,
}

pub(super) fn run(run: &Run<'_>, env: Env<'_>) -> Result<(Vec<Analysis>, Vec<TraceEvent>), ParseError> {
    let mut s = Explorer {
        run,
        env,
        proto: Protocol::new(run.cfg.seed, run.cfg.trace),
        by_key: BTreeMap::new(),
        seen: BTreeSet::new(),
        stack: Vec::new(),
    };
    let lexical = s.lexical()?;
    s.push(State {
        next: 0,
        chain: Vec::new(),
        active: false,
    })?;

    let mut finals: BTreeSet<PhraseId> = BTreeSet::new();
    while let Some(state) = s.stack.pop() {
        run.check_interrupt()?;
        if state.active {
            s.expand_active(&state)?;
        } else if state.next == run.tokens.len() {
            finals.extend(state.chain.iter().copied());
        } else {
            for &p in &lexical[state.next] {
                let mut chain = state.chain.clone();
                chain.push(p);
                s.push(State {
                    next: state.next + 1,
                    chain,
                    active: true,
                })?;
            }
        }
    }

    let best = finals
        .iter()
        .map(|&p| s.proto.phrase(p).coverage.len())
        .max()
        .unwrap_or(0);
    let phrases: Vec<Phrase> = finals
        .iter()
        .map(|&p| s.proto.phrase(p))
        .filter(|p| p.coverage.len() == best)
        .cloned()
        .collect();
    let analyses = phrases
        .iter()
        .map(|p| p.to_analysis(s.env.g, s.env.kb, s.env.store))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((analyses, s.proto.take_trace()))
}

impl Explorer<'_, '_> {
    /// One phrase per reading of every token, created once and shared by
    /// all states.
    fn lexical(&mut self) -> Result<Vec<Vec<PhraseId>>, ParseError> {
        let mut out = Vec::new();
        for (t, surface) in self.run.tokens.iter().enumerate() {
            let mut ids = Vec::new();
            for r in Reading::all(self.env.g, surface) {
                let p = Phrase::lexical(&mut self.env, self.run.base, t as u32, r)?;
                ids.push(self.intern(p));
            }
            out.push(ids);
        }
        Ok(out)
    }

    fn intern(&mut self, p: Phrase) -> PhraseId {
        let key = p.key();
        if let Some(&id) = self.by_key.get(&key) {
            return id;
        }
        let id = self.proto.add(p);
        self.by_key.insert(key, id);
        id
    }

    fn push(&mut self, s: State) -> Result<(), ParseError> {
        let mut phrases = s.chain.clone();
        let active = s.active.then(|| phrases.pop()).flatten();
        phrases.sort_unstable();
        phrases.extend(active);
        if self.seen.insert((s.next, s.active, phrases)) {
            let limit = self.run.cfg.state_ceiling;
            if self.seen.len() > limit {
                return Err(ParseError::ResourceLimit {
                    what: "exhaustive search states",
                    limit,
                });
            }
            self.stack.push(s);
        }
        Ok(())
    }

    /// Successors of a state with an active phrase: stop attaching, join
    /// the active phrase with any other phrase of the chain in either
    /// direction, or let a phrase lying in one of its gaps attach into it.
    fn expand_active(&mut self, state: &State) -> Result<(), ParseError> {
        self.push(State {
            active: false,
            ..state.clone()
        })?;
        let n = state.chain.len();
        let a = state.chain[n - 1];
        self.retry_gaps(state)?;
        for ti in (0..n - 1).rev() {
            let t = state.chain[ti];
            for (kind, name) in [
                (SearchKind::Head, "searchHeadFor"),
                (SearchKind::Modifier, "searchModifierFor"),
            ] {
                let search = Search {
                    kind,
                    scope: Scope::AllWords,
                    name,
                    requester: a.0,
                    target: t.0,
                    active: &[a],
                    targets: &[t],
                };
                let offers = self.proto.episode(&mut self.env, &search)?;
                let (preferred, deferred) = split_by_preference(offers, self.run.preference);
                let flagged = deferred.into_iter().map(|mut o| {
                    o.phrase.deferred = true;
                    o
                });
                self.replace(state, ti, preferred.into_iter().chain(flagged).map(|o| o.phrase))?;
            }
        }
        Ok(())
    }

    fn retry_gaps(&mut self, state: &State) -> Result<(), ParseError> {
        let n = state.chain.len();
        let a = state.chain[n - 1];
        let cov = &self.proto.phrase(a).coverage;
        let (Some(lo), Some(hi)) = (cov.first(), cov.last()) else {
            return Ok(());
        };
        for si in 0..n - 1 {
            let s = state.chain[si];
            let gap = self.proto.phrase(s).coverage.clone();
            if gap.first().is_none_or(|f| f < lo) || gap.last().is_none_or(|l| l > hi) {
                continue;
            }
            let search = Search {
                kind: SearchKind::Head,
                scope: Scope::Discontinuity(gap),
                name: "reSearchHeadFor",
                requester: s.0,
                target: a.0,
                active: &[s],
                targets: &[a],
            };
            let offers = self.proto.episode(&mut self.env, &search)?;
            let (preferred, deferred) = split_by_preference(offers, self.run.preference);
            let flagged = deferred.into_iter().map(|mut o| {
                o.phrase.deferred = true;
                o
            });
            self.replace(state, si, preferred.into_iter().chain(flagged).map(|o| o.phrase))?;
        }
        Ok(())
    }

    /// Successor states in which chain phrase `gone` and the active phrase
    /// are replaced by each of `joined`, which becomes active.
    fn replace(&mut self, state: &State, gone: usize, joined: impl Iterator<Item = Phrase>) -> Result<(), ParseError> {
        let n = state.chain.len();
        for p in joined {
            let id = self.intern(p);
            let mut chain: Vec<PhraseId> = state.chain[..n - 1].to_vec();
            chain.remove(gone);
            chain.push(id);
            self.push(State {
                next: state.next,
                chain,
                active: true,
            })?;
        }
        Ok(())
    }
}
