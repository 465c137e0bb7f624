//! Flat attribute/value feature structures and their unification.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use core::fmt;

/// The marker used in grammar files for an unconstrained value.
pub const UNCONSTRAINED: &str = "*";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureValue {
    /// Unifies with anything and resolves to the other side.
    Any,
    Atom(String),
}

impl FeatureValue {
    pub fn parse(raw: &str) -> Self {
        if raw == UNCONSTRAINED {
            FeatureValue::Any
        } else {
            FeatureValue::Atom(raw.to_string())
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            FeatureValue::Any => None,
            FeatureValue::Atom(a) => Some(a),
        }
    }

    fn unify(&self, other: &FeatureValue) -> Option<FeatureValue> {
        match (self, other) {
            (FeatureValue::Any, v) | (v, FeatureValue::Any) => Some(v.clone()),
            (FeatureValue::Atom(a), FeatureValue::Atom(b)) if a == b => Some(self.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Any => f.write_str(UNCONSTRAINED),
            FeatureValue::Atom(a) => f.write_str(a),
        }
    }
}

/// A flat attribute/value matrix. Attributes are unique; values are atoms
/// or the unconstrained marker.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FeatureStructure {
    pairs: BTreeMap<String, FeatureValue>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insert, parsing `"*"` as unconstrained.
    pub fn with(mut self, attr: &str, value: &str) -> Self {
        self.insert(attr, FeatureValue::parse(value));
        self
    }

    pub fn insert(&mut self, attr: &str, value: FeatureValue) -> Option<FeatureValue> {
        self.pairs.insert(attr.to_string(), value)
    }

    pub fn get(&self, attr: &str) -> Option<&FeatureValue> {
        self.pairs.get(attr)
    }

    /// True if `attr` holds exactly the atom `value`.
    pub fn has_atom(&self, attr: &str, value: &str) -> bool {
        self.get(attr).and_then(FeatureValue::as_atom) == Some(value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FeatureValue)> {
        self.pairs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `other`'s pairs replace ours attribute by attribute (inheritance,
    /// not unification).
    pub fn overridden_by(&self, other: &FeatureStructure) -> FeatureStructure {
        let mut out = self.clone();
        for (k, v) in &other.pairs {
            out.pairs.insert(k.clone(), v.clone());
        }
        out
    }

    /// Restriction to the listed attributes.
    pub fn project(&self, attrs: &[&str]) -> FeatureStructure {
        FeatureStructure {
            pairs: self
                .pairs
                .iter()
                .filter(|(k, _)| attrs.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn unify(&self, other: &FeatureStructure) -> Option<FeatureStructure> {
        unify(self, other)
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("]")
    }
}

impl<'a> FromIterator<(&'a str, &'a str)> for FeatureStructure {
    fn from_iter<I: IntoIterator<Item = (&'a str, &'a str)>>(iter: I) -> Self {
        iter.into_iter()
            .fold(FeatureStructure::new(), |fs, (k, v)| fs.with(k, v))
    }
}

/// Unification of two flat structures. `None` iff some shared attribute
/// holds two different atoms.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Option<FeatureStructure> {
    let mut out = a.clone();
    for (attr, bv) in &b.pairs {
        match out.pairs.get_mut(attr) {
            Some(av) => *av = av.unify(bv)?,
            None => {
                out.pairs.insert(attr.clone(), bv.clone());
            }
        }
    }
    Some(out)
}
