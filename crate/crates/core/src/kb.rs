//! A minimal terminological knowledge base.
//!
//! [`Kb`] holds the asserted concept taxonomy and role definitions; it is
//! immutable after [`KbBuilder::build`]. Interpretations live in a
//! [`ContextStore`]: a tree of copy-on-write contexts, one per reading.
//! A child stores only its own additions, and a context that has children is
//! frozen.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::metrics::Metrics;

/// Name of the taxonomy root.
pub const ROOT_CONCEPT: &str = "THING";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceId(pub u32);

/// A discourse referent: an instance and the context it was asserted in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceRef {
    pub id: InstanceId,
    pub context: ContextId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("duplicate concept `{0}`")]
    DuplicateConcept(String),
    #[error("duplicate role `{0}`")]
    DuplicateRole(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("taxonomy has a cycle through `{0}`")]
    Cycle(String),
    #[error("unknown context {0:?}")]
    UnknownContext(ContextId),
    #[error("context {0:?} has children and can no longer be written")]
    Frozen(ContextId),
    #[error("instance {0:?} is not visible in context {1:?}")]
    DanglingInstance(InstanceId, ContextId),
}

#[derive(Clone, Debug)]
pub struct Concept {
    pub name: String,
    pub parents: Vec<ConceptId>,
}

#[derive(Clone, Debug)]
pub struct RoleDef {
    pub name: String,
    pub domain: ConceptId,
    pub range: ConceptId,
}

#[derive(Clone, Debug)]
pub struct Kb {
    concepts: Vec<Concept>,
    concept_ids: BTreeMap<String, ConceptId>,
    roles: Vec<RoleDef>,
    role_ids: BTreeMap<String, RoleId>,
    // ancestors[c] includes c itself
    ancestors: Vec<BTreeSet<ConceptId>>,
}

impl Kb {
    pub fn builder() -> KbBuilder {
        KbBuilder::default()
    }

    pub fn concept_id(&self, name: &str) -> Option<ConceptId> {
        self.concept_ids.get(name).copied()
    }

    pub fn concept(&self, id: ConceptId) -> &Concept {
        &self.concepts[id.0 as usize]
    }

    pub fn concept_name(&self, id: ConceptId) -> &str {
        &self.concept(id).name
    }

    pub fn concepts(&self) -> impl Iterator<Item = (ConceptId, &Concept)> {
        self.concepts.iter().enumerate().map(|(i, c)| (ConceptId(i as u32), c))
    }

    pub fn root(&self) -> ConceptId {
        self.concept_ids[ROOT_CONCEPT]
    }

    pub fn role_id(&self, name: &str) -> Option<RoleId> {
        self.role_ids.get(name).copied()
    }

    pub fn role(&self, id: RoleId) -> &RoleDef {
        &self.roles[id.0 as usize]
    }

    pub fn roles(&self) -> impl Iterator<Item = (RoleId, &RoleDef)> {
        self.roles.iter().enumerate().map(|(i, r)| (RoleId(i as u32), r))
    }

    /// Longest parent path from `id` to the root, counting both ends.
    pub fn depth(&self, id: ConceptId) -> usize {
        1 + self
            .concept(id)
            .parents
            .iter()
            .map(|&p| self.depth(p))
            .max()
            .unwrap_or(0)
    }

    pub fn subsumes_id(&self, general: ConceptId, specific: ConceptId) -> bool {
        self.ancestors[specific.0 as usize].contains(&general)
    }

    pub fn subsumes(&self, general: &str, specific: &str) -> Result<bool, KbError> {
        let g = self
            .concept_id(general)
            .ok_or_else(|| KbError::UnknownConcept(general.to_string()))?;
        let s = self
            .concept_id(specific)
            .ok_or_else(|| KbError::UnknownConcept(specific.to_string()))?;
        Ok(self.subsumes_id(g, s))
    }
}

#[derive(Clone, Debug, Default)]
pub struct KbBuilder {
    concepts: Vec<(String, Vec<String>)>,
    roles: Vec<(String, String, String)>,
}

impl KbBuilder {
    /// Declares a concept. An empty parent list means "directly under THING".
    pub fn concept(mut self, name: &str, parents: &[&str]) -> Self {
        self.add_concept(name, parents.iter().map(|p| p.to_string()).collect());
        self
    }

    pub fn role(mut self, name: &str, domain: &str, range: &str) -> Self {
        self.add_role(name, domain, range);
        self
    }

    pub fn add_concept(&mut self, name: &str, parents: Vec<String>) {
        self.concepts.push((name.to_string(), parents));
    }

    pub fn add_role(&mut self, name: &str, domain: &str, range: &str) {
        self.roles
            .push((name.to_string(), domain.to_string(), range.to_string()));
    }

    pub fn build(self) -> Result<Kb, KbError> {
        let mut concept_ids = BTreeMap::new();
        let mut names: Vec<(String, Vec<String>)> = Vec::new();
        if !self.concepts.iter().any(|(n, _)| n == ROOT_CONCEPT) {
            names.push((ROOT_CONCEPT.to_string(), Vec::new()));
        }
        names.extend(self.concepts);
        for (i, (name, _)) in names.iter().enumerate() {
            if concept_ids.insert(name.clone(), ConceptId(i as u32)).is_some() {
                return Err(KbError::DuplicateConcept(name.clone()));
            }
        }
        let root = concept_ids[ROOT_CONCEPT];
        let mut concepts = Vec::with_capacity(names.len());
        for (name, parents) in &names {
            let mut ids = Vec::new();
            for p in parents {
                ids.push(*concept_ids.get(p).ok_or_else(|| KbError::UnknownConcept(p.clone()))?);
            }
            if ids.is_empty() && name != ROOT_CONCEPT {
                ids.push(root);
            }
            concepts.push(Concept {
                name: name.clone(),
                parents: ids,
            });
        }
        if !concepts[root.0 as usize].parents.is_empty() {
            return Err(KbError::Cycle(ROOT_CONCEPT.to_string()));
        }

        // Transitive closure by DFS with cycle detection.
        let n = concepts.len();
        let mut ancestors: Vec<Option<BTreeSet<ConceptId>>> = alloc::vec![None; n];
        fn close(
            c: usize,
            concepts: &[Concept],
            memo: &mut Vec<Option<BTreeSet<ConceptId>>>,
            on_stack: &mut Vec<bool>,
        ) -> Result<BTreeSet<ConceptId>, KbError> {
            if let Some(done) = &memo[c] {
                return Ok(done.clone());
            }
            if on_stack[c] {
                return Err(KbError::Cycle(concepts[c].name.clone()));
            }
            on_stack[c] = true;
            let mut set = BTreeSet::new();
            set.insert(ConceptId(c as u32));
            for p in &concepts[c].parents {
                set.extend(close(p.0 as usize, concepts, memo, on_stack)?);
            }
            on_stack[c] = false;
            memo[c] = Some(set.clone());
            Ok(set)
        }
        let mut on_stack = alloc::vec![false; n];
        for c in 0..n {
            close(c, &concepts, &mut ancestors, &mut on_stack)?;
        }
        let ancestors: Vec<BTreeSet<ConceptId>> = ancestors.into_iter().map(Option::unwrap).collect();

        let mut roles = Vec::new();
        let mut role_ids = BTreeMap::new();
        for (name, domain, range) in self.roles {
            let lookup = |c: &str| {
                concept_ids
                    .get(c)
                    .copied()
                    .ok_or_else(|| KbError::UnknownConcept(c.to_string()))
            };
            let def = RoleDef {
                domain: lookup(&domain)?,
                range: lookup(&range)?,
                name: name.clone(),
            };
            if role_ids.insert(name.clone(), RoleId(roles.len() as u32)).is_some() {
                return Err(KbError::DuplicateRole(name));
            }
            roles.push(def);
        }

        Ok(Kb {
            concepts,
            concept_ids,
            roles,
            role_ids,
            ancestors,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleAssertion {
    pub subject: InstanceId,
    pub role: RoleId,
    pub filler: InstanceId,
}

#[derive(Clone, Debug, Default)]
struct Context {
    parent: Option<ContextId>,
    depth: u32,
    children: u32,
    instances: Vec<InstanceId>,
    assertions: Vec<RoleAssertion>,
    // anaphor instance -> antecedent instance
    substitutions: Vec<(InstanceId, InstanceId)>,
}

/// The serializable content visible from one context.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Interpretation {
    /// `(instance, concept name)`, ordered by instance id.
    pub instances: Vec<(InstanceId, String)>,
    /// `(subject, role name, filler)`, ordered by subject, role, filler.
    pub assertions: Vec<(InstanceId, String, InstanceId)>,
}

impl Interpretation {
    pub fn is_empty(&self) -> bool {
        self.instances.is_empty() && self.assertions.is_empty()
    }
}

/// Arena of interpretation contexts sharing one instance namespace.
#[derive(Clone, Debug)]
pub struct ContextStore {
    contexts: Vec<Context>,
    // global: instance ids are never reused, so concept lookup needs no context
    instance_concepts: Vec<ConceptId>,
}

impl Default for ContextStore {
    fn default() -> Self {
        Self::new()
    }
}

impl ContextStore {
    /// A store holding only the empty root context.
    pub fn new() -> Self {
        ContextStore {
            contexts: alloc::vec![Context::default()],
            instance_concepts: Vec::new(),
        }
    }

    pub fn root(&self) -> ContextId {
        ContextId(0)
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn ctx(&self, id: ContextId) -> Result<&Context, KbError> {
        self.contexts.get(id.0 as usize).ok_or(KbError::UnknownContext(id))
    }

    fn writable(&mut self, id: ContextId) -> Result<&mut Context, KbError> {
        let ctx = self
            .contexts
            .get_mut(id.0 as usize)
            .ok_or(KbError::UnknownContext(id))?;
        if ctx.children > 0 {
            return Err(KbError::Frozen(id));
        }
        Ok(ctx)
    }

    pub fn parent(&self, id: ContextId) -> Result<Option<ContextId>, KbError> {
        Ok(self.ctx(id)?.parent)
    }

    /// A new, empty child of `ctx`; `ctx` is frozen from now on.
    pub fn clone_context(&mut self, ctx: ContextId) -> Result<ContextId, KbError> {
        let depth = self.ctx(ctx)?.depth + 1;
        self.contexts[ctx.0 as usize].children += 1;
        let id = ContextId(self.contexts.len() as u32);
        self.contexts.push(Context {
            parent: Some(ctx),
            depth,
            ..Default::default()
        });
        Ok(id)
    }

    /// Number of instances and assertions stored in `ctx` itself.
    pub fn own_size(&self, ctx: ContextId) -> Result<usize, KbError> {
        let c = self.ctx(ctx)?;
        Ok(c.instances.len() + c.assertions.len() + c.substitutions.len())
    }

    pub fn assert_instance(&mut self, kb: &Kb, ctx: ContextId, concept: &str) -> Result<InstanceRef, KbError> {
        let cid = kb
            .concept_id(concept)
            .ok_or_else(|| KbError::UnknownConcept(concept.to_string()))?;
        self.assert_instance_id(ctx, cid)
    }

    pub fn assert_instance_id(&mut self, ctx: ContextId, concept: ConceptId) -> Result<InstanceRef, KbError> {
        let id = InstanceId(self.instance_concepts.len() as u32);
        self.writable(ctx)?.instances.push(id);
        self.instance_concepts.push(concept);
        Ok(InstanceRef { id, context: ctx })
    }

    pub fn concept_of(&self, instance: InstanceId) -> Option<ConceptId> {
        self.instance_concepts.get(instance.0 as usize).copied()
    }

    fn chain(&self, ctx: ContextId) -> Result<Vec<ContextId>, KbError> {
        let mut out = Vec::new();
        let mut cur = Some(ctx);
        while let Some(c) = cur {
            out.push(c);
            cur = self.ctx(c)?.parent;
        }
        Ok(out)
    }

    /// True if `instance` was asserted in `ctx` or one of its ancestors.
    pub fn is_visible(&self, ctx: ContextId, instance: InstanceId) -> Result<bool, KbError> {
        for c in self.chain(ctx)? {
            if self.contexts[c.0 as usize].instances.contains(&instance) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn require_visible(&self, ctx: ContextId, instance: InstanceId) -> Result<ConceptId, KbError> {
        if !self.is_visible(ctx, instance)? {
            return Err(KbError::DanglingInstance(instance, ctx));
        }
        self.concept_of(instance)
            .ok_or(KbError::DanglingInstance(instance, ctx))
    }

    /// CONCEPTCHECK: counts one call, then tests the role's domain against
    /// the head's concept and its range against the filler's. On success
    /// the assertion goes into a fresh child of `ctx`, which is returned;
    /// on failure nothing is created.
    pub fn concept_check(
        &mut self,
        kb: &Kb,
        ctx: ContextId,
        head: InstanceId,
        role: &str,
        filler: InstanceId,
        metrics: &Metrics,
    ) -> Result<Option<ContextId>, KbError> {
        #[cfg(test)]
        crate::metrics::calls::concept();
        metrics.record_concept_check();
        let rid = kb.role_id(role).ok_or_else(|| KbError::UnknownRole(role.to_string()))?;
        let head_concept = self.require_visible(ctx, head)?;
        let filler_concept = self.require_visible(ctx, filler)?;
        let def = kb.role(rid);
        if !kb.subsumes_id(def.domain, head_concept) || !kb.subsumes_id(def.range, filler_concept) {
            return Ok(None);
        }
        let child = self.clone_context(ctx)?;
        self.contexts[child.0 as usize].assertions.push(RoleAssertion {
            subject: head,
            role: rid,
            filler,
        });
        Ok(Some(child))
    }

    /// A child of `into` that additionally carries everything `from` added
    /// on top of the nearest common ancestor of the two contexts. Used to
    /// join two phrases' interpretations; this is bookkeeping, not a check.
    pub fn graft(&mut self, into: ContextId, from: ContextId) -> Result<ContextId, KbError> {
        let into_chain: BTreeSet<ContextId> = self.chain(into)?.into_iter().collect();
        let mut replay = Vec::new();
        for c in self.chain(from)? {
            if into_chain.contains(&c) {
                break;
            }
            replay.push(c);
        }
        let child = self.clone_context(into)?;
        for c in replay.into_iter().rev() {
            let src = self.contexts[c.0 as usize].clone();
            let dst = &mut self.contexts[child.0 as usize];
            dst.instances.extend(src.instances);
            dst.assertions.extend(src.assertions);
            dst.substitutions.extend(src.substitutions);
        }
        Ok(child)
    }

    /// A child of `ctx` in which `anaphor` is replaced by `antecedent` in
    /// every visible assertion, and `anaphor` itself no longer appears.
    pub fn substitute(
        &mut self,
        ctx: ContextId,
        anaphor: InstanceId,
        antecedent: InstanceId,
    ) -> Result<ContextId, KbError> {
        self.require_visible(ctx, anaphor)?;
        self.require_visible(ctx, antecedent)?;
        let child = self.clone_context(ctx)?;
        if anaphor != antecedent {
            self.contexts[child.0 as usize]
                .substitutions
                .push((anaphor, antecedent));
        }
        Ok(child)
    }

    /// Follows substitutions visible from `ctx`.
    pub fn canonical(&self, ctx: ContextId, instance: InstanceId) -> Result<InstanceId, KbError> {
        let subs = self.substitutions(ctx)?;
        Ok(resolve_sub(&subs, instance))
    }

    fn substitutions(&self, ctx: ContextId) -> Result<BTreeMap<InstanceId, InstanceId>, KbError> {
        let mut subs = BTreeMap::new();
        for c in self.chain(ctx)? {
            for &(from, to) in &self.contexts[c.0 as usize].substitutions {
                subs.entry(from).or_insert(to);
            }
        }
        Ok(subs)
    }

    /// Own assertions of `ctx` only (no ancestors, no substitution).
    pub fn own_assertions(&self, ctx: ContextId) -> Result<&[RoleAssertion], KbError> {
        Ok(&self.ctx(ctx)?.assertions)
    }

    /// Instances and role assertions visible from `ctx`, after substitution,
    /// deterministically ordered.
    pub fn extract(&self, kb: &Kb, ctx: ContextId) -> Result<Interpretation, KbError> {
        let subs = self.substitutions(ctx)?;
        let mut instances = BTreeSet::new();
        let mut assertions = Vec::new();
        for c in self.chain(ctx)? {
            let c = &self.contexts[c.0 as usize];
            for &i in &c.instances {
                if !subs.contains_key(&i) {
                    instances.insert(i);
                }
            }
            for a in &c.assertions {
                assertions.push((resolve_sub(&subs, a.subject), a.role, resolve_sub(&subs, a.filler)));
            }
        }
        assertions.sort();
        Ok(Interpretation {
            instances: instances
                .into_iter()
                .map(|i| (i, kb.concept_name(self.instance_concepts[i.0 as usize]).to_string()))
                .collect(),
            assertions: assertions
                .into_iter()
                .map(|(s, r, f)| (s, kb.role(r).name.clone(), f))
                .collect(),
        })
    }
}

fn resolve_sub(subs: &BTreeMap<InstanceId, InstanceId>, mut i: InstanceId) -> InstanceId {
    let mut steps = 0;
    while let Some(&next) = subs.get(&i) {
        i = next;
        steps += 1;
        if steps > subs.len() {
            break;
        }
    }
    i
}
