//! Lexicalized dependency grammar: the word-class hierarchy, inherited
//! valency frames, predictions and the lexicon.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::features::FeatureStructure;

/// Name of the synthetic class assigned to tokens missing from the lexicon.
pub const UNKNOWN_CLASS: &str = "UnknownWord";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexemeId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("duplicate word class `{0}`")]
    DuplicateClass(String),
    #[error("unknown word class `{0}`")]
    UnknownClass(String),
    #[error("class hierarchy has a cycle through `{0}`")]
    Cycle(String),
    #[error("class hierarchy must have exactly one root, found {0:?}")]
    RootCount(Vec<String>),
    #[error("valency `{label}` of class `{class}` targets undeclared class `{target}`")]
    UndeclaredTarget {
        class: String,
        label: String,
        target: String,
    },
    #[error("duplicate valency label `{label}` in class `{class}`")]
    DuplicateLabel { class: String, label: String },
}

/// Where the modifier sits relative to its head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// The modifier precedes the head ("left" in grammar files).
    ModifierPrecedes,
    /// The modifier follows the head ("right").
    ModifierFollows,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valency {
    pub label: String,
    pub direction: Direction,
    pub target: ClassId,
    pub mandatory: bool,
    pub features: FeatureStructure,
    pub role: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PredictionSlot {
    Head,
    Modifier,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub slot: PredictionSlot,
    pub class: ClassId,
    pub mandatory: bool,
}

#[derive(Clone, Debug)]
pub struct WordClass {
    pub name: String,
    pub parent: Option<ClassId>,
    pub default_features: FeatureStructure,
    /// Locally declared valencies only; see [`Grammar::frame`].
    pub valencies: Vec<Valency>,
    pub predictions: Vec<Prediction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexemeEntry {
    pub surface: String,
    pub class: ClassId,
    /// Entry features layered over the class defaults.
    pub features: FeatureStructure,
    pub concept: Option<String>,
}

/// A validated grammar. Immutable once built; share it by reference.
#[derive(Clone, Debug)]
pub struct Grammar {
    classes: Vec<WordClass>,
    by_name: BTreeMap<String, ClassId>,
    // subsumes[general * n + specific]
    subsumes: Vec<bool>,
    frames: Vec<Vec<Valency>>,
    augmented: Vec<Vec<Valency>>,
    predictions: Vec<Vec<Prediction>>,
    features: Vec<FeatureStructure>,
    lexemes: Vec<LexemeEntry>,
    lexicon: BTreeMap<String, Vec<LexemeId>>,
    root: ClassId,
    unknown: ClassId,
}

impl Grammar {
    pub fn builder() -> GrammarBuilder {
        GrammarBuilder::default()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, id: ClassId) -> &WordClass {
        &self.classes[id.0 as usize]
    }

    pub fn class_name(&self, id: ClassId) -> &str {
        &self.class(id).name
    }

    pub fn class_id(&self, name: &str) -> Option<ClassId> {
        self.by_name.get(name).copied()
    }

    pub fn classes(&self) -> impl Iterator<Item = (ClassId, &WordClass)> {
        self.classes.iter().enumerate().map(|(i, c)| (ClassId(i as u32), c))
    }

    pub fn root_class(&self) -> ClassId {
        self.root
    }

    pub fn unknown_class(&self) -> ClassId {
        self.unknown
    }

    /// Number of classes on the path from `id` up to the root, inclusive.
    pub fn depth(&self, id: ClassId) -> usize {
        let mut depth = 1;
        let mut cur = self.class(id).parent;
        while let Some(p) = cur {
            depth += 1;
            cur = self.class(p).parent;
        }
        depth
    }

    /// True iff `specific == general` or `general` is an ancestor of `specific`.
    pub fn subsumes(&self, general: ClassId, specific: ClassId) -> bool {
        let n = self.classes.len();
        self.subsumes[general.0 as usize * n + specific.0 as usize]
    }

    /// Name-based variant of [`Grammar::subsumes`].
    pub fn class_subsumes(&self, general: &str, specific: &str) -> Result<bool, GrammarError> {
        let g = self
            .class_id(general)
            .ok_or_else(|| GrammarError::UnknownClass(general.to_string()))?;
        let s = self
            .class_id(specific)
            .ok_or_else(|| GrammarError::UnknownClass(specific.to_string()))?;
        Ok(self.subsumes(g, s))
    }

    /// Effective valency frame: inherited valencies with same-label local
    /// declarations replacing them, followed by new local labels.
    pub fn frame(&self, id: ClassId) -> &[Valency] {
        &self.frames[id.0 as usize]
    }

    /// The frame of a predicted word: its own frame plus every valency a
    /// subclass declares under a label the class does not already have.
    pub fn augmented_frame(&self, id: ClassId) -> &[Valency] {
        &self.augmented[id.0 as usize]
    }

    pub fn valency(&self, id: ClassId, label: &str) -> Option<&Valency> {
        self.frame(id).iter().find(|v| v.label == label)
    }

    pub fn predictions(&self, id: ClassId) -> &[Prediction] {
        &self.predictions[id.0 as usize]
    }

    pub fn default_features(&self, id: ClassId) -> &FeatureStructure {
        &self.features[id.0 as usize]
    }

    pub fn lexeme(&self, id: LexemeId) -> &LexemeEntry {
        &self.lexemes[id.0 as usize]
    }

    pub fn lexemes(&self) -> impl Iterator<Item = (LexemeId, &LexemeEntry)> {
        self.lexemes.iter().enumerate().map(|(i, l)| (LexemeId(i as u32), l))
    }

    /// All entries for a surface form, in declaration order.
    pub fn lookup(&self, surface: &str) -> &[LexemeId] {
        self.lexicon.get(surface).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every role name referenced by some valency.
    pub fn referenced_roles(&self) -> BTreeSet<&str> {
        self.classes
            .iter()
            .flat_map(|c| c.valencies.iter())
            .filter_map(|v| v.role.as_deref())
            .collect()
    }

    /// Copy of this grammar with every prediction removed.
    pub fn without_predictions(&self) -> Grammar {
        let mut g = self.clone();
        for c in &mut g.classes {
            c.predictions.clear();
        }
        for p in &mut g.predictions {
            p.clear();
        }
        g
    }

    fn descendants(&self, id: ClassId) -> Vec<ClassId> {
        // breadth-first, declaration order within a level
        let mut out = Vec::new();
        let mut frontier = alloc::vec![id];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in frontier {
                for (cid, c) in self.classes() {
                    if c.parent == Some(p) {
                        out.push(cid);
                        next.push(cid);
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

/// Input for one word class, referring to other classes by name.
#[derive(Clone, Debug, Default)]
pub struct ClassSpec {
    pub name: String,
    pub parent: Option<String>,
    pub features: FeatureStructure,
    pub valencies: Vec<ValencySpec>,
    pub predictions: Vec<PredictionSpec>,
}

impl ClassSpec {
    pub fn new(name: &str, parent: Option<&str>) -> Self {
        ClassSpec {
            name: name.to_string(),
            parent: parent.map(ToString::to_string),
            ..Default::default()
        }
    }

    pub fn features(mut self, fs: FeatureStructure) -> Self {
        self.features = fs;
        self
    }

    pub fn valency(mut self, v: ValencySpec) -> Self {
        self.valencies.push(v);
        self
    }

    pub fn predicts(mut self, slot: PredictionSlot, class: &str, mandatory: bool) -> Self {
        self.predictions.push(PredictionSpec {
            slot,
            class: class.to_string(),
            mandatory,
        });
        self
    }
}

#[derive(Clone, Debug)]
pub struct ValencySpec {
    pub label: String,
    pub direction: Direction,
    pub target: String,
    pub mandatory: bool,
    pub features: FeatureStructure,
    pub role: Option<String>,
}

impl ValencySpec {
    pub fn new(label: &str, direction: Direction, target: &str) -> Self {
        ValencySpec {
            label: label.to_string(),
            direction,
            target: target.to_string(),
            mandatory: false,
            features: FeatureStructure::new(),
            role: None,
        }
    }

    pub fn mandatory(mut self) -> Self {
        self.mandatory = true;
        self
    }

    pub fn features(mut self, fs: FeatureStructure) -> Self {
        self.features = fs;
        self
    }

    pub fn role(mut self, role: &str) -> Self {
        self.role = Some(role.to_string());
        self
    }
}

#[derive(Clone, Debug)]
pub struct PredictionSpec {
    pub slot: PredictionSlot,
    pub class: String,
    pub mandatory: bool,
}

#[derive(Clone, Debug)]
pub struct LexemeSpec {
    pub surface: String,
    pub class: String,
    pub features: FeatureStructure,
    pub concept: Option<String>,
}

impl LexemeSpec {
    pub fn new(surface: &str, class: &str) -> Self {
        LexemeSpec {
            surface: surface.to_string(),
            class: class.to_string(),
            features: FeatureStructure::new(),
            concept: None,
        }
    }

    pub fn features(mut self, fs: FeatureStructure) -> Self {
        self.features = fs;
        self
    }

    pub fn concept(mut self, concept: &str) -> Self {
        self.concept = Some(concept.to_string());
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct GrammarBuilder {
    classes: Vec<ClassSpec>,
    lexicon: Vec<LexemeSpec>,
}

impl GrammarBuilder {
    pub fn class(mut self, spec: ClassSpec) -> Self {
        self.classes.push(spec);
        self
    }

    pub fn lexeme(mut self, spec: LexemeSpec) -> Self {
        self.lexicon.push(spec);
        self
    }

    pub fn add_class(&mut self, spec: ClassSpec) {
        self.classes.push(spec);
    }

    pub fn add_lexeme(&mut self, spec: LexemeSpec) {
        self.lexicon.push(spec);
    }

    pub fn build(self) -> Result<Grammar, GrammarError> {
        let mut by_name = BTreeMap::new();
        for (i, c) in self.classes.iter().enumerate() {
            if by_name.insert(c.name.clone(), ClassId(i as u32)).is_some() {
                return Err(GrammarError::DuplicateClass(c.name.clone()));
            }
        }
        let resolve = |name: &str| {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| GrammarError::UnknownClass(name.to_string()))
        };

        let mut classes = Vec::with_capacity(self.classes.len() + 1);
        for spec in &self.classes {
            let parent = spec.parent.as_deref().map(resolve).transpose()?;
            let mut seen = BTreeSet::new();
            let mut valencies = Vec::new();
            for v in &spec.valencies {
                if !seen.insert(v.label.as_str()) {
                    return Err(GrammarError::DuplicateLabel {
                        class: spec.name.clone(),
                        label: v.label.clone(),
                    });
                }
                let target = resolve(&v.target).map_err(|_| GrammarError::UndeclaredTarget {
                    class: spec.name.clone(),
                    label: v.label.clone(),
                    target: v.target.clone(),
                })?;
                valencies.push(Valency {
                    label: v.label.clone(),
                    direction: v.direction,
                    target,
                    mandatory: v.mandatory,
                    features: v.features.clone(),
                    role: v.role.clone(),
                });
            }
            let predictions = spec
                .predictions
                .iter()
                .map(|p| {
                    Ok(Prediction {
                        slot: p.slot,
                        class: resolve(&p.class)?,
                        mandatory: p.mandatory,
                    })
                })
                .collect::<Result<Vec<_>, GrammarError>>()?;
            classes.push(WordClass {
                name: spec.name.clone(),
                parent,
                default_features: spec.features.clone(),
                valencies,
                predictions,
            });
        }

        let roots: Vec<usize> = (0..classes.len()).filter(|&i| classes[i].parent.is_none()).collect();
        if roots.len() != 1 {
            return Err(GrammarError::RootCount(
                roots.iter().map(|&i| classes[i].name.clone()).collect(),
            ));
        }
        let root = ClassId(roots[0] as u32);
        // a cycle never reaches the root
        for c in &classes {
            let mut cur = c.parent;
            let mut steps = 0;
            while let Some(p) = cur {
                steps += 1;
                if steps > classes.len() {
                    return Err(GrammarError::Cycle(c.name.clone()));
                }
                cur = classes[p.0 as usize].parent;
            }
        }

        let unknown = match by_name.get(UNKNOWN_CLASS) {
            Some(id) => *id,
            None => {
                let id = ClassId(classes.len() as u32);
                classes.push(WordClass {
                    name: UNKNOWN_CLASS.to_string(),
                    parent: Some(root),
                    default_features: FeatureStructure::new(),
                    valencies: Vec::new(),
                    predictions: Vec::new(),
                });
                by_name.insert(UNKNOWN_CLASS.to_string(), id);
                id
            }
        };

        let n = classes.len();
        let mut subsumes = alloc::vec![false; n * n];
        for s in 0..n {
            let mut cur = Some(ClassId(s as u32));
            while let Some(g) = cur {
                subsumes[g.0 as usize * n + s] = true;
                cur = classes[g.0 as usize].parent;
            }
        }

        // Parents before children so inherited data is ready.
        let mut order: Vec<usize> = (0..n).collect();
        let depth_of = |i: usize| {
            let mut d = 0;
            let mut cur = classes[i].parent;
            while let Some(p) = cur {
                d += 1;
                cur = classes[p.0 as usize].parent;
            }
            d
        };
        order.sort_by_key(|&i| (depth_of(i), i));
        let mut frames: Vec<Vec<Valency>> = alloc::vec![Vec::new(); n];
        let mut predictions: Vec<Vec<Prediction>> = alloc::vec![Vec::new(); n];
        let mut features: Vec<FeatureStructure> = alloc::vec![FeatureStructure::new(); n];
        for &i in &order {
            let class = &classes[i];
            let (mut frame, mut preds, inherited) = match class.parent {
                Some(p) => (
                    frames[p.0 as usize].clone(),
                    predictions[p.0 as usize].clone(),
                    features[p.0 as usize].clone(),
                ),
                None => (Vec::new(), Vec::new(), FeatureStructure::new()),
            };
            for v in &class.valencies {
                match frame.iter_mut().find(|f| f.label == v.label) {
                    Some(slot) => *slot = v.clone(),
                    None => frame.push(v.clone()),
                }
            }
            for p in &class.predictions {
                match preds.iter_mut().find(|q| q.slot == p.slot) {
                    Some(slot) => *slot = p.clone(),
                    None => preds.push(p.clone()),
                }
            }
            frames[i] = frame;
            predictions[i] = preds;
            features[i] = inherited.overridden_by(&class.default_features);
        }

        let mut lexemes = Vec::with_capacity(self.lexicon.len());
        let mut lexicon: BTreeMap<String, Vec<LexemeId>> = BTreeMap::new();
        for spec in self.lexicon {
            let class = by_name
                .get(&spec.class)
                .copied()
                .ok_or_else(|| GrammarError::UnknownClass(spec.class.clone()))?;
            let id = LexemeId(lexemes.len() as u32);
            lexicon.entry(spec.surface.clone()).or_default().push(id);
            lexemes.push(LexemeEntry {
                surface: spec.surface,
                class,
                features: features[class.0 as usize].overridden_by(&spec.features),
                concept: spec.concept,
            });
        }

        let mut grammar = Grammar {
            classes,
            by_name,
            subsumes,
            frames,
            augmented: Vec::new(),
            predictions,
            features,
            lexemes,
            lexicon,
            root,
            unknown,
        };
        grammar.augmented = (0..n)
            .map(|i| {
                let id = ClassId(i as u32);
                let mut frame = grammar.frame(id).to_vec();
                for d in grammar.descendants(id) {
                    for v in grammar.frame(d) {
                        if !frame.iter().any(|f| f.label == v.label) {
                            frame.push(v.clone());
                        }
                    }
                }
                frame
            })
            .collect();
        Ok(grammar)
    }
}
