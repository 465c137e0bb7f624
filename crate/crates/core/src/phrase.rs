//! Phrases: dependency trees over word actors, each holding one
//! interpretation context. Both the engine and the chart combine phrases
//! through [`try_attach`] and [`fill`], so they share the counted checks.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::features::unify;
use crate::grammar::{ClassId, Grammar, LexemeId};
use crate::kb::{ContextId, ContextStore, InstanceId, Kb, KbError};
use crate::metrics::Metrics;
use crate::result::{Analysis, AnalysisWord, DepEdge};
use crate::syntax::{frame_of, syntax_check};
use crate::tokens::TokenSet;
use crate::word::{Position, WordActor};

/// Everything a protocol step needs besides the phrases themselves.
pub(crate) struct Env<'a> {
    pub g: &'a Grammar,
    pub kb: &'a Kb,
    pub store: &'a mut ContextStore,
    pub metrics: &'a Metrics,
}

/// A role relation whose CONCEPTCHECK waits for a referent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct PendingRole {
    head: u32,
    modifier: u32,
}

/// One reading of a token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reading {
    Lexeme(LexemeId),
    Unknown,
}

impl Reading {
    pub fn all(g: &Grammar, surface: &str) -> Vec<Reading> {
        let ids = g.lookup(surface);
        if ids.is_empty() {
            alloc::vec![Reading::Unknown]
        } else {
            ids.iter().map(|&id| Reading::Lexeme(id)).collect()
        }
    }
}

/// Canonical identity of a tree: per word its position, reading and head.
pub type PhraseKey = Vec<(Position, Option<LexemeId>, ClassId, Option<(Position, u16)>)>;

#[derive(Clone, Debug)]
pub struct Phrase {
    pub words: Vec<WordActor>,
    pub root: usize,
    pub context: ContextId,
    pub coverage: TokenSet,
    pub deferred: bool,
    pending: Vec<PendingRole>,
}

impl Phrase {
    /// A one-word phrase. A word with a concept gets a fresh instance in a
    /// child of `base`.
    pub(crate) fn lexical(env: &mut Env<'_>, base: ContextId, token: u32, reading: Reading) -> Result<Phrase, KbError> {
        let (lexeme, class, features, concept) = match reading {
            Reading::Lexeme(id) => {
                let e = env.g.lexeme(id);
                (Some(id), e.class, e.features.clone(), e.concept.as_deref())
            }
            Reading::Unknown => (None, env.g.unknown_class(), Default::default(), None),
        };
        let (context, instance) = match concept {
            Some(c) => {
                let ctx = env.store.clone_context(base)?;
                let inst = env.store.assert_instance(env.kb, ctx, c)?;
                (ctx, Some(inst.id))
            }
            None => (base, None),
        };
        Ok(Phrase {
            words: alloc::vec![WordActor::lexical(lexeme, class, token, Arc::new(features), instance)],
            root: 0,
            context,
            coverage: TokenSet::singleton(token),
            deferred: false,
            pending: Vec::new(),
        })
    }

    /// A phrase holding only a predicted word.
    pub(crate) fn placeholder(g: &Grammar, class: ClassId, mandatory: bool, context: ContextId) -> Phrase {
        Phrase {
            words: alloc::vec![WordActor::placeholder(
                class,
                Arc::new(g.default_features(class).clone()),
                mandatory
            )],
            root: 0,
            context,
            coverage: TokenSet::new(),
            deferred: false,
            pending: Vec::new(),
        }
    }

    pub fn root_word(&self) -> &WordActor {
        &self.words[self.root]
    }

    /// The discourse referent of word `w`: its own instance, or for a
    /// concept-less word the referent of its first role-less dependent that
    /// has one (a preposition denotes its object).
    pub fn referent(&self, g: &Grammar, w: usize) -> Option<InstanceId> {
        let word = &self.words[w];
        if word.instance.is_some() || word.placeholder {
            return word.instance;
        }
        let frame = frame_of(g, word);
        let mut deps: Vec<(u16, u32)> = word.filled.clone();
        deps.sort_unstable();
        deps.into_iter()
            .filter(|&(vi, _)| frame[vi as usize].role.is_none())
            .find_map(|(_, m)| self.referent(g, m as usize))
    }

    /// From the root, repeatedly the right-most modifier to the right of the
    /// current word: the words a following phrase can attach to without
    /// crossing an existing relation.
    pub fn right_rim(&self) -> Vec<usize> {
        let mut rim = alloc::vec![self.root];
        let mut cur = self.root;
        loop {
            let here = self.words[cur].position;
            let next = self.words[cur]
                .filled
                .iter()
                .map(|&(_, m)| m as usize)
                .filter(|&m| self.words[m].position > here)
                .max_by_key(|&m| self.words[m].position);
            match next {
                Some(m) => {
                    rim.push(m);
                    cur = m;
                }
                None => return rim,
            }
        }
    }

    /// Words incident to a relation whose span strictly contains a token of
    /// `gap`: where a skipped item sits inside this phrase.
    pub fn discontinuity_words(&self, gap: &TokenSet) -> Vec<usize> {
        let mut out = Vec::new();
        for (m, w) in self.words.iter().enumerate() {
            let Some((h, _)) = w.head else { continue };
            let (a, b) = (self.words[h as usize].position, w.position);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if gap.iter().any(|t| lo < Position::Token(t) && Position::Token(t) < hi) {
                out.push(h as usize);
                out.push(m);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn placeholders(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .filter(|(_, w)| w.placeholder)
            .map(|(i, _)| i)
    }

    pub fn has_placeholder(&self) -> bool {
        self.words.iter().any(|w| w.placeholder)
    }

    /// Open valencies of word `w` as indices into its frame.
    pub fn open_valencies<'g>(&self, g: &'g Grammar, w: usize) -> impl Iterator<Item = usize> + 'g {
        let word = self.words[w].clone();
        (0..frame_of(g, &word).len()).filter(move |&vi| !word.is_filled(vi as u16))
    }

    pub fn key(&self) -> PhraseKey {
        let mut key: PhraseKey = self
            .words
            .iter()
            .map(|w| {
                let head = w.head.map(|(h, vi)| (self.words[h as usize].position, vi));
                (w.position, w.lexeme, w.class, head)
            })
            .collect();
        key.sort_unstable();
        key
    }

    pub fn edges(&self, g: &Grammar) -> Vec<DepEdge> {
        let mut edges: Vec<DepEdge> = self
            .words
            .iter()
            .filter_map(|w| {
                let (h, vi) = w.head?;
                let head = &self.words[h as usize];
                Some(DepEdge {
                    head: head.token()?,
                    modifier: w.token()?,
                    label: frame_of(g, head)[vi as usize].label.clone(),
                })
            })
            .collect();
        edges.sort();
        edges
    }

    pub(crate) fn to_analysis(&self, g: &Grammar, kb: &Kb, store: &ContextStore) -> Result<Analysis, KbError> {
        let mut words: Vec<AnalysisWord> = self
            .words
            .iter()
            .filter_map(|w| {
                let head = w.head.and_then(|(h, vi)| {
                    let hw = &self.words[h as usize];
                    Some((hw.token()?, frame_of(g, hw)[vi as usize].label.clone()))
                });
                Some(AnalysisWord {
                    token: w.token()?,
                    lexeme: w.lexeme,
                    class: w.class,
                    features: (*w.features).clone(),
                    instance: w.instance,
                    head,
                })
            })
            .collect();
        words.sort_by_key(|w| w.token);
        let root = match self.root_word().token() {
            Some(t) => t,
            // a placeholder root: report its lowest real dependent
            None => self.coverage.first().unwrap_or(0),
        };
        Ok(Analysis {
            root,
            coverage: self.coverage.clone(),
            edges: self.edges(g),
            words,
            interpretation: store.extract(kb, self.context)?,
            context: self.context,
            deferred: self.deferred,
            open_placeholders: self.placeholders().count(),
            open_mandatory_placeholders: self.words.iter().filter(|w| w.placeholder && w.mandatory).count(),
        })
    }

    /// Word lists concatenated, `other` shifted; returns the shift.
    fn merged(&self, other: &Phrase) -> (Phrase, usize) {
        let off = self.words.len();
        let mut words = self.words.clone();
        words.extend(other.words.iter().map(|w| {
            let mut w = w.clone();
            for f in &mut w.filled {
                f.1 += off as u32;
            }
            if let Some(h) = &mut w.head {
                h.0 += off as u32;
            }
            w
        }));
        let mut pending = self.pending.clone();
        pending.extend(other.pending.iter().map(|p| PendingRole {
            head: p.head + off as u32,
            modifier: p.modifier + off as u32,
        }));
        (
            Phrase {
                words,
                root: self.root,
                context: self.context,
                coverage: self.coverage.union(&other.coverage),
                deferred: self.deferred || other.deferred,
                pending,
            },
            off,
        )
    }

    fn link(&mut self, g: &Grammar, head: usize, modifier: usize, vi: usize) {
        self.words[head].filled.push((vi as u16, modifier as u32));
        self.words[modifier].head = Some((head as u32, vi as u16));
        if frame_of(g, &self.words[head])[vi].role.is_some() {
            self.pending.push(PendingRole {
                head: head as u32,
                modifier: modifier as u32,
            });
        }
    }

    fn unlink(&mut self, head: usize, modifier: usize) {
        self.words[head].filled.retain(|&(_, m)| m as usize != modifier);
        self.words[modifier].head = None;
        self.pending
            .retain(|p| !(p.head as usize == head && p.modifier as usize == modifier));
    }

    fn remove_word(&mut self, w: usize) {
        self.words.remove(w);
        let fix = |i: &mut u32| {
            if *i as usize > w {
                *i -= 1;
            }
        };
        for word in &mut self.words {
            for f in &mut word.filled {
                fix(&mut f.1);
            }
            if let Some(h) = &mut word.head {
                fix(&mut h.0);
            }
        }
        for p in &mut self.pending {
            fix(&mut p.head);
            fix(&mut p.modifier);
        }
        if self.root > w {
            self.root -= 1;
        }
    }

    /// Runs CONCEPTCHECK for every pending role whose two referents are now
    /// known. False if one of them fails.
    fn resolve_pending(&mut self, env: &mut Env<'_>) -> Result<bool, KbError> {
        let mut i = 0;
        while i < self.pending.len() {
            let p = self.pending[i];
            let head = self.referent(env.g, p.head as usize);
            let filler = self.referent(env.g, p.modifier as usize);
            let (Some(head), Some(filler)) = (head, filler) else {
                i += 1;
                continue;
            };
            let hw = &self.words[p.head as usize];
            let vi = self.words[p.modifier as usize]
                .head
                .map(|(_, vi)| vi)
                .unwrap_or_default();
            let role = frame_of(env.g, hw)[vi as usize].role.as_deref().unwrap_or_default();
            match env
                .store
                .concept_check(env.kb, self.context, head, role, filler, env.metrics)?
            {
                Some(ctx) => {
                    self.context = ctx;
                    self.pending.swap_remove(i);
                }
                None => return Ok(false),
            }
        }
        Ok(true)
    }
}

/// The root of `modifier` fills valency `vi` of word `head_word` in `head`.
/// Non-destructive: both inputs are left as they were. SYNTAXCHECK is
/// always counted; CONCEPTCHECK is counted once both referents exist.
pub(crate) fn try_attach(
    env: &mut Env<'_>,
    head: &Phrase,
    head_word: usize,
    modifier: &Phrase,
    vi: usize,
) -> Result<Option<Phrase>, KbError> {
    let hw = &head.words[head_word];
    let v = &frame_of(env.g, hw)[vi];
    if !syntax_check(env.g, hw, modifier.root_word(), v, env.metrics) {
        return Ok(None);
    }
    let (mut p, off) = head.merged(modifier);
    p.context = env.store.graft(head.context, modifier.context)?;
    p.link(env.g, head_word, off + modifier.root, vi);
    if !p.resolve_pending(env)? {
        return Ok(None);
    }
    Ok(Some(p))
}

/// The root of `active` takes the place of placeholder `ph` in `target`,
/// inheriting its head relation and its modifiers. The relations around the
/// placeholder are re-checked against the actual word.
pub(crate) fn fill(env: &mut Env<'_>, target: &Phrase, ph: usize, active: &Phrase) -> Result<Option<Phrase>, KbError> {
    let p_word = &target.words[ph];
    let actual = active.root_word();
    if !p_word.placeholder || actual.placeholder || !env.g.subsumes(p_word.class, actual.class) {
        return Ok(None);
    }
    let Some(features) = unify(&p_word.features, &actual.features) else {
        return Ok(None);
    };
    let (mut q, off) = target.merged(active);
    let a = off + active.root;
    q.words[a].features = Arc::new(features);

    if let Some((h, vi)) = q.words[ph].head {
        let h = h as usize;
        q.unlink(h, ph);
        let v = &frame_of(env.g, &q.words[h])[vi as usize];
        if !syntax_check(env.g, &q.words[h], &q.words[a], v, env.metrics) {
            return Ok(None);
        }
        q.link(env.g, h, a, vi as usize);
    } else {
        q.root = a;
    }

    let p_frame = frame_of(env.g, &q.words[ph]);
    let moved: Vec<(u16, u32)> = q.words[ph].filled.clone();
    for (pvi, m) in moved {
        let m = m as usize;
        let label = &p_frame[pvi as usize].label;
        q.unlink(ph, m);
        let a_frame = frame_of(env.g, &q.words[a]);
        let Some(avi) = a_frame.iter().position(|v| &v.label == label) else {
            return Ok(None);
        };
        if !syntax_check(env.g, &q.words[a], &q.words[m], &a_frame[avi], env.metrics) {
            return Ok(None);
        }
        q.link(env.g, a, m, avi);
    }
    q.remove_word(ph);
    q.context = env.store.graft(target.context, active.context)?;
    if !q.resolve_pending(env)? {
        return Ok(None);
    }
    Ok(Some(q))
}

/// The phrases a freshly read word contributes, with its predictions
/// instantiated: a predicted head becomes a placeholder root above the
/// word, a predicted modifier a placeholder dependent. A prediction that
/// cannot be linked leaves the phrase as it was.
pub(crate) fn with_predictions(env: &mut Env<'_>, lexical: Phrase) -> Result<Vec<Phrase>, KbError> {
    use crate::grammar::PredictionSlot;
    let preds = env.g.predictions(lexical.root_word().class).to_vec();
    let mut out = alloc::vec![lexical];
    for slot in [PredictionSlot::Modifier, PredictionSlot::Head] {
        for pred in preds.iter().filter(|p| p.slot == slot) {
            let mut next = Vec::new();
            for phrase in &out {
                let ph = Phrase::placeholder(env.g, pred.class, pred.mandatory, phrase.context);
                let mut made = Vec::new();
                match slot {
                    PredictionSlot::Modifier => {
                        for vi in phrase.open_valencies(env.g, phrase.root).collect::<Vec<_>>() {
                            made.extend(try_attach(env, phrase, phrase.root, &ph, vi)?);
                        }
                    }
                    PredictionSlot::Head => {
                        for vi in ph.open_valencies(env.g, 0).collect::<Vec<_>>() {
                            made.extend(try_attach(env, &ph, 0, phrase, vi)?);
                        }
                    }
                }
                if made.is_empty() {
                    next.push(phrase.clone());
                } else {
                    next.extend(made);
                }
            }
            out = next;
        }
    }
    Ok(out)
}
