//! Search episodes: one search message from a requesting container to a
//! target container, fanned out to phrases and words, answered by replies
//! carrying attachment offers. An episode runs until the queue is quiescent.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::scheduler::Scheduler;
use super::Preference;
use crate::kb::KbError;
use crate::phrase::{fill, try_attach, Env, Phrase};
use crate::tokens::TokenSet;
use crate::word::Position;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct PhraseId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum SearchKind {
    /// The active root fills a placeholder of the target.
    Prediction,
    /// The active root becomes a modifier of a target word.
    Head,
    /// The active root takes the target root as modifier.
    Modifier,
}

/// Which target words receive a head search.
#[derive(Clone, Debug)]
pub(crate) enum Scope {
    RightRim,
    AllWords,
    /// Words where the target phrase spans the given tokens.
    Discontinuity(TokenSet),
}

pub(crate) struct Search<'s> {
    pub kind: SearchKind,
    pub scope: Scope,
    /// Message type name used in the trace.
    pub name: &'static str,
    pub requester: u32,
    pub target: u32,
    pub active: &'s [PhraseId],
    pub targets: &'s [PhraseId],
}

#[derive(Clone, Debug)]
pub(crate) struct Offer {
    pub kind: SearchKind,
    pub active: PhraseId,
    pub target: PhraseId,
    /// Position of the head word of the new relation.
    pub head_position: Position,
    pub word: usize,
    pub valency: usize,
    pub phrase: Phrase,
}

impl Offer {
    fn sort_key(&self) -> (PhraseId, PhraseId, usize, usize) {
        (self.target, self.active, self.word, self.valency)
    }
}

enum Msg {
    Container,
    Phrase {
        active: PhraseId,
        target: PhraseId,
    },
    Word {
        active: PhraseId,
        target: PhraseId,
        word: usize,
    },
    Reply {
        offers: Vec<Offer>,
        from: String,
    },
}

pub(crate) struct Protocol {
    pub phrases: Vec<Phrase>,
    sched: Scheduler<Msg>,
}

impl Protocol {
    pub fn new(seed: u64, trace: bool) -> Self {
        Protocol {
            phrases: Vec::new(),
            sched: Scheduler::new(seed, trace),
        }
    }

    pub fn add(&mut self, p: Phrase) -> PhraseId {
        self.phrases.push(p);
        PhraseId(self.phrases.len() as u32 - 1)
    }

    pub fn phrase(&self, id: PhraseId) -> &Phrase {
        &self.phrases[id.0 as usize]
    }

    pub fn take_trace(&mut self) -> Vec<crate::result::TraceEvent> {
        self.sched.take_trace()
    }

    /// Runs one search to quiescence and returns the offers in canonical
    /// order, independent of delivery order.
    pub fn episode(&mut self, env: &mut Env<'_>, s: &Search<'_>) -> Result<Vec<Offer>, KbError> {
        let mut offers = Vec::new();
        self.sched.send(0, Msg::Container);
        while let Some((time, msg)) = self.sched.next() {
            match msg {
                Msg::Container => {
                    let mut n = 0;
                    for &target in s.targets {
                        for &active in s.active {
                            self.sched.send(time + 1, Msg::Phrase { active, target });
                            n += 1;
                        }
                    }
                    self.trace(s.name, format!("C{}", s.requester), format!("C{}", s.target), || {
                        format!("forwarded to {n} phrase pairs")
                    });
                }
                Msg::Phrase { active, target } => {
                    let t = self.phrase(target);
                    let words: Vec<usize> = match s.kind {
                        SearchKind::Prediction => t.placeholders().collect(),
                        SearchKind::Modifier => alloc::vec![t.root],
                        SearchKind::Head => match &s.scope {
                            Scope::RightRim => t.right_rim(),
                            Scope::AllWords => (0..t.words.len()).collect(),
                            Scope::Discontinuity(gap) => t.discontinuity_words(gap),
                        },
                    };
                    let n = words.len();
                    for word in words {
                        self.sched.send(time + 1, Msg::Word { active, target, word });
                    }
                    self.trace(s.name, format!("P{}", active.0), format!("P{}", target.0), || {
                        format!("forwarded to {n} words")
                    });
                }
                Msg::Word { active, target, word } => {
                    let found = self.evaluate(env, s.kind, active, target, word)?;
                    let to = self.word_name(target, word);
                    let outcome = if found.is_empty() {
                        String::from("fail")
                    } else {
                        format!("{} x{}", reply_name(s.kind), found.len())
                    };
                    self.trace(s.name, format!("P{}", active.0), to.clone(), || outcome);
                    self.sched.send(
                        time + 1,
                        Msg::Reply {
                            offers: found,
                            from: to,
                        },
                    );
                }
                Msg::Reply {
                    offers: mut found,
                    from,
                } => {
                    let n = found.len();
                    self.trace(reply_name(s.kind), from, format!("C{}", s.requester), || {
                        format!("{n} offers")
                    });
                    offers.append(&mut found);
                }
            }
        }
        debug_assert!(self.sched.is_quiescent());
        offers.sort_by_key(Offer::sort_key);
        Ok(offers)
    }

    fn evaluate(
        &self,
        env: &mut Env<'_>,
        kind: SearchKind,
        active: PhraseId,
        target: PhraseId,
        word: usize,
    ) -> Result<Vec<Offer>, KbError> {
        let (a, t) = (self.phrase(active), self.phrase(target));
        let mut out = Vec::new();
        match kind {
            SearchKind::Prediction => {
                if let Some(phrase) = fill(env, t, word, a)? {
                    let head_position = t.words[word]
                        .head
                        .map(|(h, _)| t.words[h as usize].position)
                        .unwrap_or(Position::Predicted);
                    out.push(Offer {
                        kind,
                        active,
                        target,
                        head_position,
                        word,
                        valency: 0,
                        phrase,
                    });
                }
            }
            SearchKind::Head => {
                for vi in t.open_valencies(env.g, word).collect::<Vec<_>>() {
                    if let Some(phrase) = try_attach(env, t, word, a, vi)? {
                        out.push(Offer {
                            kind,
                            active,
                            target,
                            head_position: t.words[word].position,
                            word,
                            valency: vi,
                            phrase,
                        });
                    }
                }
            }
            SearchKind::Modifier => {
                let r = a.root;
                for vi in a.open_valencies(env.g, r).collect::<Vec<_>>() {
                    if let Some(phrase) = try_attach(env, a, r, t, vi)? {
                        out.push(Offer {
                            kind,
                            active,
                            target,
                            head_position: a.words[r].position,
                            word: r,
                            valency: vi,
                            phrase,
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    fn word_name(&self, phrase: PhraseId, word: usize) -> String {
        match self.phrase(phrase).words[word].position {
            Position::Token(t) => format!("P{}.w{}", phrase.0, t),
            Position::Predicted => format!("P{}.predicted", phrase.0),
        }
    }

    fn trace(&mut self, msg: &'static str, from: String, to: String, outcome: impl FnOnce() -> String) {
        if self.sched.tracing() {
            let o = outcome();
            self.sched.record(msg, from, to, o);
        }
    }
}

fn reply_name(kind: SearchKind) -> &'static str {
    match kind {
        SearchKind::Prediction => "predictionFound",
        SearchKind::Head => "headFound",
        SearchKind::Modifier => "modifierFound",
    }
}

/// Separates offers into preferred and deferred ones.
pub(crate) fn split_by_preference(offers: Vec<Offer>, pref: Preference) -> (Vec<Offer>, Vec<Offer>) {
    match pref {
        Preference::AllPreferred => (offers, Vec::new()),
        Preference::ClosestAttachment => {
            let Some(best) = offers.iter().map(|o| o.head_position).max() else {
                return (offers, Vec::new());
            };
            offers.into_iter().partition(|o| o.head_position == best)
        }
    }
}
