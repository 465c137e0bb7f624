//! JSON documents: grammar and knowledge-base files on the way in, parse
//! results, trace lines and resolution reports on the way out.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use parsetalk_core::grammar::{ClassSpec, Direction, LexemeSpec, PredictionSlot, ValencySpec};
use parsetalk_core::kb::Interpretation;
use parsetalk_core::result::TraceEvent;
use parsetalk_core::text::{Referent, Resolution, TextResult};
use parsetalk_core::{
    Analysis, FeatureStructure, FeatureValue, Grammar, GrammarError, Kb, KbError, MetricsRecord, ParseResult,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read file")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Kb(#[from] KbError),
}

impl From<serde_json::Error> for LoadError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the message bare
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        LoadError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

pub fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

type Features = BTreeMap<String, String>;

fn features(f: &Features) -> FeatureStructure {
    let mut fs = FeatureStructure::new();
    for (k, v) in f {
        fs.insert(k, FeatureValue::parse(v));
    }
    fs
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GrammarDoc {
    classes: Vec<ClassDoc>,
    #[serde(default)]
    lexicon: Vec<LexemeDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    name: String,
    parent: Option<String>,
    #[serde(default)]
    features: Features,
    #[serde(default)]
    valencies: Vec<ValencyDoc>,
    #[serde(default)]
    predictions: Vec<PredictionDoc>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum DirectionDoc {
    Left,
    Right,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValencyDoc {
    label: String,
    direction: DirectionDoc,
    target: String,
    mandatory: bool,
    #[serde(default)]
    features: Features,
    role: Option<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum SlotDoc {
    Head,
    Modifier,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionDoc {
    slot: SlotDoc,
    class: String,
    #[serde(default)]
    mandatory: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexemeDoc {
    surface: String,
    class: String,
    #[serde(default)]
    features: Features,
    concept: Option<String>,
}

pub fn parse_grammar(text: &str) -> Result<Grammar, LoadError> {
    let doc: GrammarDoc = serde_json::from_str(text)?;
    let mut b = Grammar::builder();
    for c in doc.classes {
        let mut spec = ClassSpec::new(&c.name, c.parent.as_deref()).features(features(&c.features));
        for v in c.valencies {
            let direction = match v.direction {
                DirectionDoc::Left => Direction::ModifierPrecedes,
                DirectionDoc::Right => Direction::ModifierFollows,
            };
            let mut vs = ValencySpec::new(&v.label, direction, &v.target).features(features(&v.features));
            if v.mandatory {
                vs = vs.mandatory();
            }
            if let Some(r) = &v.role {
                vs = vs.role(r);
            }
            spec = spec.valency(vs);
        }
        for p in c.predictions {
            let slot = match p.slot {
                SlotDoc::Head => PredictionSlot::Head,
                SlotDoc::Modifier => PredictionSlot::Modifier,
            };
            spec = spec.predicts(slot, &p.class, p.mandatory);
        }
        b.add_class(spec);
    }
    for l in doc.lexicon {
        let mut spec = LexemeSpec::new(&l.surface, &l.class).features(features(&l.features));
        if let Some(c) = &l.concept {
            spec = spec.concept(c);
        }
        b.add_lexeme(spec);
    }
    Ok(b.build()?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KbDoc {
    concepts: Vec<ConceptDoc>,
    #[serde(default)]
    roles: Vec<RoleDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConceptDoc {
    name: String,
    #[serde(default)]
    parents: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RoleDoc {
    name: String,
    domain: String,
    range: String,
}

pub fn parse_kb(text: &str) -> Result<Kb, LoadError> {
    let doc: KbDoc = serde_json::from_str(text)?;
    let mut b = Kb::builder();
    for c in doc.concepts {
        b.add_concept(&c.name, c.parents);
    }
    for r in doc.roles {
        b.add_role(&r.name, &r.domain, &r.range);
    }
    Ok(b.build()?)
}

pub fn load_grammar(path: &Path) -> Result<Grammar, LoadError> {
    parse_grammar(&read(path)?)
}

pub fn load_kb(path: &Path) -> Result<Kb, LoadError> {
    parse_kb(&read(path)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub head: u32,
    pub modifier: u32,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub instance: u32,
    pub concept: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionDoc {
    pub subject: u32,
    pub role: String,
    pub filler: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationDoc {
    pub instances: Vec<InstanceDoc>,
    pub assertions: Vec<AssertionDoc>,
}

impl From<&Interpretation> for InterpretationDoc {
    fn from(i: &Interpretation) -> Self {
        InterpretationDoc {
            instances: i
                .instances
                .iter()
                .map(|(id, c)| InstanceDoc {
                    instance: id.0,
                    concept: c.clone(),
                })
                .collect(),
            assertions: i
                .assertions
                .iter()
                .map(|(s, r, f)| AssertionDoc {
                    subject: s.0,
                    role: r.clone(),
                    filler: f.0,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisDoc {
    pub edges: Vec<EdgeDoc>,
    pub interpretation: InterpretationDoc,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub deferred: bool,
}

impl From<&Analysis> for AnalysisDoc {
    fn from(a: &Analysis) -> Self {
        AnalysisDoc {
            edges: a
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    head: e.head,
                    modifier: e.modifier,
                    label: e.label.clone(),
                })
                .collect(),
            interpretation: (&a.interpretation).into(),
            deferred: a.deferred,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub syntax_checks: u64,
    pub concept_checks: u64,
    pub anaphora_concept_checks: u64,
    pub backtracks: u64,
    pub skipped: u64,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl From<&MetricsRecord> for MetricsDoc {
    fn from(m: &MetricsRecord) -> Self {
        MetricsDoc {
            syntax_checks: m.syntax_checks,
            concept_checks: m.concept_checks,
            anaphora_concept_checks: m.anaphora_concept_checks,
            backtracks: m.backtrack_events,
            skipped: m.skipped_tokens,
            complete: m.complete,
            wall_ms: m.wall_time_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseResultDoc {
    pub analyses: Vec<AnalysisDoc>,
    pub skipped: Vec<u32>,
    pub complete: bool,
    pub metrics: MetricsDoc,
}

impl From<&ParseResult> for ParseResultDoc {
    fn from(r: &ParseResult) -> Self {
        ParseResultDoc {
            analyses: r.analyses.iter().map(AnalysisDoc::from).collect(),
            skipped: r.skipped.iter().collect(),
            complete: r.complete,
            metrics: (&r.metrics).into(),
        }
    }
}

/// `seq, msgType, fromActor, toActor, outcome`
pub fn trace_line(e: &TraceEvent) -> String {
    format!("{}, {}, {}, {}, {}", e.seq, e.msg, e.from, e.to, e.outcome)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolutionDoc {
    pub utterance: usize,
    pub token: u32,
    pub antecedent_utterance: Option<usize>,
    pub antecedent_token: Option<u32>,
}

impl From<&Resolution> for ResolutionDoc {
    fn from(r: &Resolution) -> Self {
        ResolutionDoc {
            utterance: r.utterance,
            token: r.token,
            antecedent_utterance: r.antecedent.map(|a| a.0),
            antecedent_token: r.antecedent.map(|a| a.1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtteranceDoc {
    pub tokens: Vec<String>,
    pub parse: ParseResultDoc,
    /// Forward-looking centers, best first.
    pub cf: Vec<CenterDoc>,
    pub cb: Option<CenterDoc>,
}

/// A discourse referent by the utterance and token that realized it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterDoc {
    pub utterance: usize,
    pub token: u32,
    pub instance: u32,
}

impl From<&Referent> for CenterDoc {
    fn from(r: &Referent) -> Self {
        CenterDoc {
            utterance: r.utterance,
            token: r.token,
            instance: r.instance.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextReportDoc {
    pub utterances: Vec<UtteranceDoc>,
    pub resolutions: Vec<ResolutionDoc>,
    pub interpretation: InterpretationDoc,
    pub metrics: MetricsDoc,
}

impl From<&TextResult> for TextReportDoc {
    fn from(t: &TextResult) -> Self {
        TextReportDoc {
            utterances: t
                .utterances
                .iter()
                .map(|u| UtteranceDoc {
                    tokens: u.tokens.clone(),
                    parse: (&u.parse).into(),
                    cf: u.centers.cf.iter().map(CenterDoc::from).collect(),
                    cb: u.centers.cb.as_ref().map(CenterDoc::from),
                })
                .collect(),
            resolutions: t.resolutions.iter().map(ResolutionDoc::from).collect(),
            interpretation: (&t.interpretation).into(),
            metrics: (&t.metrics).into(),
        }
    }
}
