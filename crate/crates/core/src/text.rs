//! Local coherence across utterances: backward- and forward-looking
//! centers, and resolution of definite nominal anaphora against the
//! previous utterance's forward-looking centers.

use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::{parse_with, ParseConfig, ParseError};
use crate::features::{unify, FeatureStructure};
use crate::grammar::Grammar;
use crate::kb::{ContextId, ContextStore, InstanceId, Interpretation, Kb, KbError};
use crate::metrics::{Metrics, MetricsRecord};
use crate::result::{Analysis, AnalysisWord, ParseResult};

/// Tokens that end an utterance.
pub const UTTERANCE_END: [&str; 3] = [".", "!", "?"];

/// Class whose subclasses denote discourse referents.
pub const NOMINAL_CLASS: &str = "Nominal";

/// Features an anaphor must agree in with its antecedent.
pub const AGREEMENT: [&str; 2] = ["num", "gen"];

/// A nominal's discourse referent within one utterance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Referent {
    /// After substitution, so an anaphor and its antecedent share it.
    pub instance: InstanceId,
    pub utterance: usize,
    pub token: u32,
    /// 0 subject, 1 direct object, 2 other.
    pub rank: u8,
    /// Agreement features of the realizing word.
    pub agreement: FeatureStructure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CenteringState {
    pub cb: Option<Referent>,
    pub cf: Vec<Referent>,
}

/// One entry of the resolution report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub utterance: usize,
    pub token: u32,
    /// `(utterance, token)` of the antecedent.
    pub antecedent: Option<(usize, u32)>,
}

#[derive(Clone, Debug)]
pub struct UtteranceResult {
    pub tokens: Vec<String>,
    pub parse: ParseResult,
    /// Context of the chosen analysis after resolution.
    pub context: Option<ContextId>,
    pub centers: CenteringState,
}

#[derive(Clone, Debug)]
pub struct TextResult {
    pub utterances: Vec<UtteranceResult>,
    pub resolutions: Vec<Resolution>,
    /// Interpretation visible at the end of the text.
    pub interpretation: Interpretation,
    pub metrics: MetricsRecord,
}

/// Splits after every utterance-final punctuation token; a trailing
/// remainder forms the last utterance.
pub fn split_utterances<'a, 't>(tokens: &'a [&'t str]) -> Vec<&'a [&'t str]> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        if UTTERANCE_END.contains(t) {
            out.push(&tokens[start..=i]);
            start = i + 1;
        }
    }
    if start < tokens.len() {
        out.push(&tokens[start..]);
    }
    out
}

fn is_nominal(g: &Grammar, w: &AnalysisWord) -> bool {
    let Some(nominal) = g.class_id(NOMINAL_CLASS) else {
        return w.instance.is_some();
    };
    w.instance.is_some() && g.subsumes(nominal, w.class)
}

fn rank(w: &AnalysisWord) -> u8 {
    match w.head.as_ref().map(|(_, l)| l.as_str()) {
        Some("subj") => 0,
        Some("obj") => 1,
        _ => 2,
    }
}

/// Definite nominals: `def:+` on the word or on one of its dependents.
pub fn is_anaphor(g: &Grammar, a: &Analysis, w: &AnalysisWord) -> bool {
    is_nominal(g, w)
        && (w.features.has_atom("def", "+")
            || a.words
                .iter()
                .any(|d| d.head.as_ref().is_some_and(|(h, _)| *h == w.token) && d.features.has_atom("def", "+")))
}

/// The ranked forward-looking centers of an utterance analysis.
pub fn forward_centers(
    g: &Grammar,
    store: &ContextStore,
    ctx: ContextId,
    a: &Analysis,
    utterance: usize,
) -> Result<Vec<Referent>, KbError> {
    let mut cf = Vec::new();
    for w in a.words.iter().filter(|w| is_nominal(g, w)) {
        let Some(inst) = w.instance else { continue };
        cf.push(Referent {
            instance: store.canonical(ctx, inst)?,
            utterance,
            token: w.token,
            rank: rank(w),
            agreement: w.features.project(&AGREEMENT),
        });
    }
    cf.sort_by_key(|r| (r.rank, r.token));
    Ok(cf)
}

/// New centers after an utterance: `cf` ranked from its nominals, `cb` the
/// best-ranked member of the old `cf` realized again.
pub fn update_centers(
    g: &Grammar,
    store: &ContextStore,
    ctx: ContextId,
    a: &Analysis,
    utterance: usize,
    state: &CenteringState,
) -> Result<CenteringState, KbError> {
    let cf = forward_centers(g, store, ctx, a, utterance)?;
    let cb = state
        .cf
        .iter()
        .find(|old| cf.iter().any(|r| r.instance == old.instance))
        .cloned();
    Ok(CenteringState { cb, cf })
}

/// The first member of `state.cf` that agrees with the anaphor and whose
/// concept the anaphor's concept subsumes. Each conceptual test is counted.
pub fn search_nom_antecedent(
    kb: &Kb,
    store: &ContextStore,
    anaphor: InstanceId,
    agreement: &FeatureStructure,
    state: &CenteringState,
    metrics: &Metrics,
) -> Option<Referent> {
    let concept = store.concept_of(anaphor)?;
    state
        .cf
        .iter()
        .filter(|c| c.instance != anaphor)
        .find(|c| {
            if unify(agreement, &c.agreement).is_none() {
                return false;
            }
            metrics.record_anaphora_concept_check();
            store
                .concept_of(c.instance)
                .is_some_and(|ante| kb.subsumes_id(concept, ante))
        })
        .cloned()
}

/// Replaces the anaphor's referent by the antecedent's in a child of `ctx`.
pub fn resolve(
    store: &mut ContextStore,
    ctx: ContextId,
    anaphor: InstanceId,
    antecedent: InstanceId,
) -> Result<ContextId, KbError> {
    if store.canonical(ctx, anaphor)? == antecedent {
        return Ok(ctx);
    }
    store.substitute(ctx, anaphor, antecedent)
}

/// Parses a text utterance by utterance, each on top of the previous
/// utterance's chosen interpretation, resolving definite nominals.
pub fn parse_text(
    tokens: &[&str],
    g: &Grammar,
    kb: &Kb,
    cfg: &ParseConfig,
    metrics: &Metrics,
) -> Result<TextResult, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let before = metrics.snapshot();
    let mut store = ContextStore::new();
    let mut base = store.root();
    let mut state = CenteringState::default();
    let mut utterances = Vec::new();
    let mut resolutions = Vec::new();

    for (ui, utt) in split_utterances(tokens).into_iter().enumerate() {
        let parse = parse_with(&mut store, base, utt, g, kb, cfg, metrics)?;
        let mut context = None;
        if let Some(main) = parse.analyses.first() {
            let mut ctx = main.context;
            for w in main.words.iter().filter(|w| is_anaphor(g, main, w)) {
                let Some(inst) = w.instance else { continue };
                let agreement = w.features.project(&AGREEMENT);
                let found = search_nom_antecedent(kb, &store, inst, &agreement, &state, metrics);
                if let Some(ante) = &found {
                    ctx = resolve(&mut store, ctx, inst, ante.instance)?;
                }
                resolutions.push(Resolution {
                    utterance: ui,
                    token: w.token,
                    antecedent: found.map(|a| (a.utterance, a.token)),
                });
            }
            state = update_centers(g, &store, ctx, main, ui, &state)?;
            base = ctx;
            context = Some(ctx);
        } else {
            state = CenteringState::default();
        }
        utterances.push(UtteranceResult {
            tokens: utt.iter().map(|t| String::from(*t)).collect(),
            parse,
            context,
            centers: state.clone(),
        });
    }
    Ok(TextResult {
        utterances,
        resolutions,
        interpretation: store.extract(kb, base)?,
        metrics: metrics.snapshot().since(&before),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::{grammar, kb};

    const TEXT: &str = "Zenon sells this printer for $2,000 . the company sells notebooks .";

    fn run(text: &str) -> TextResult {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        parse_text(&tokens, &grammar(), &kb(), &ParseConfig::default(), &Metrics::new()).unwrap()
    }

    #[test]
    fn splits_after_final_punctuation() {
        let tokens = ["a", ".", "b", "c", "!", "d"];
        let parts = split_utterances(&tokens);
        assert_eq!(parts, [&["a", "."][..], &["b", "c", "!"][..], &["d"][..]]);
    }

    #[test]
    fn the_company_resolves_to_zenon() {
        let r = run(TEXT);
        assert_eq!(r.utterances.len(), 2);
        assert!(r
            .resolutions
            .iter()
            .any(|x| x.utterance == 1 && x.token == 1 && x.antecedent == Some((0, 0))));
        let u1 = &r.utterances[0].centers;
        assert!(u1.cb.is_none());
        assert_eq!(u1.cf.iter().map(|c| c.token).collect::<Vec<_>>(), [0, 3, 5]);
        let cb = r.utterances[1].centers.cb.as_ref().unwrap();
        assert_eq!((cb.utterance, cb.token), (0, 0));
        // one node shared by both sentences' assertions
        let shared = r
            .interpretation
            .assertions
            .iter()
            .filter(|(_, role, filler)| *filler == cb.instance && role == "AGENT")
            .count();
        assert_eq!(shared, 2);
        assert!(r.metrics.anaphora_concept_checks >= 1);
    }

    #[test]
    fn resolution_keeps_edges_and_assertion_count() {
        let (g, kb) = (grammar(), kb());
        let tokens: Vec<&str> = TEXT.split_whitespace().collect();
        let mut store = ContextStore::new();
        let m = Metrics::new();
        let root = store.root();
        let cfg = ParseConfig::default();
        let u1 = parse_with(&mut store, root, &tokens[..7], &g, &kb, &cfg, &m).unwrap();
        let c1 = u1.analyses[0].context;
        let u2 = parse_with(&mut store, c1, &tokens[7..], &g, &kb, &cfg, &m).unwrap();
        let a = &u2.analyses[0];
        let before = store.extract(&kb, a.context).unwrap();
        let company = a.word(1).unwrap().instance.unwrap();
        let zenon = u1.analyses[0].word(0).unwrap().instance.unwrap();
        let ctx = resolve(&mut store, a.context, company, zenon).unwrap();
        let after = store.extract(&kb, ctx).unwrap();
        assert_eq!(before.assertions.len(), after.assertions.len());
        assert!(after.instances.iter().all(|(i, _)| *i != company));
        assert_eq!(resolve(&mut store, ctx, company, zenon).unwrap(), ctx);
    }

    #[test]
    fn empty_cf_finds_nothing() {
        let (_, kb) = (grammar(), kb());
        let mut store = ContextStore::new();
        let root = store.root();
        let ctx = store.clone_context(root).unwrap();
        let i = store.assert_instance(&kb, ctx, "COMPANY").unwrap();
        let m = Metrics::new();
        let state = CenteringState::default();
        assert!(search_nom_antecedent(&kb, &store, i.id, &FeatureStructure::new(), &state, &m).is_none());
        assert_eq!(m.anaphora_concept_checks(), 0);
    }
}
