//! Shared test helpers, including a brute-force reference parser that works
//! from the raw JSON grammar and knowledge base without the core types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use parsetalk::core::{Grammar, Kb, ParseResult};
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn grammar() -> Grammar {
    parsetalk::format::load_grammar(&fixture("grammar.json")).unwrap()
}

pub fn kb() -> Kb {
    parsetalk::format::load_kb(&fixture("kb.json")).unwrap()
}

pub fn sentences(name: &str) -> Vec<Vec<String>> {
    parsetalk::corpus::load_corpus(&fixture(name))
        .unwrap()
        .into_iter()
        .map(|s| s.tokens)
        .collect()
}

pub type Edge = (u32, u32, String);
pub type EdgeSets = BTreeSet<Vec<Edge>>;

pub fn edge_sets(r: &ParseResult) -> EdgeSets {
    r.edge_sets()
        .into_iter()
        .map(|es| es.into_iter().map(|e| (e.head, e.modifier, e.label)).collect())
        .collect()
}

type Features = BTreeMap<String, String>;

/// A word's place in a candidate tree: `None` absent, `Some(None)` the
/// root, `Some(Some((head, valency)))` a dependent.
type Place = Option<Option<(usize, usize)>>;

struct Valency {
    label: String,
    modifier_precedes: bool,
    target: String,
    features: Features,
    role: Option<String>,
}

struct Class {
    parent: Option<String>,
    features: Features,
    valencies: Vec<Valency>,
}

#[derive(Clone)]
struct Word {
    class: String,
    features: Features,
    concept: Option<String>,
}

/// Dependency trees enumerated head assignment by head assignment.
pub struct BruteForce {
    classes: BTreeMap<String, Class>,
    lexicon: BTreeMap<String, Vec<Word>>,
    concept_parents: BTreeMap<String, Vec<String>>,
    roles: BTreeMap<String, (String, String)>,
}

const UNKNOWN: &str = "<unknown>";
const THING: &str = "THING";

fn features(v: &Value) -> Features {
    v.as_object()
        .map(|o| {
            o.iter()
                .map(|(k, v)| (k.clone(), v.as_str().unwrap().to_string()))
                .collect()
        })
        .unwrap_or_default()
}

fn text(v: &Value, key: &str) -> Option<String> {
    v.get(key).and_then(Value::as_str).map(String::from)
}

fn unifies(a: &Features, b: &Features) -> bool {
    a.iter()
        .all(|(k, x)| b.get(k).is_none_or(|y| x == "*" || y == "*" || x == y))
}

impl BruteForce {
    pub fn from_fixtures() -> BruteForce {
        let read = |n| serde_json::from_str::<Value>(&std::fs::read_to_string(fixture(n)).unwrap()).unwrap();
        BruteForce::new(&read("grammar.json"), &read("kb.json"))
    }

    pub fn new(grammar: &Value, kb: &Value) -> BruteForce {
        let mut classes = BTreeMap::new();
        for c in grammar["classes"].as_array().unwrap() {
            let valencies = c["valencies"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|v| Valency {
                    label: text(v, "label").unwrap(),
                    modifier_precedes: v["direction"] == "left",
                    target: text(v, "target").unwrap(),
                    features: features(&v["features"]),
                    role: text(v, "role"),
                })
                .collect();
            classes.insert(
                text(c, "name").unwrap(),
                Class {
                    parent: text(c, "parent"),
                    features: features(&c["features"]),
                    valencies,
                },
            );
        }
        let root = classes.iter().find(|(_, c)| c.parent.is_none()).unwrap().0.clone();
        classes.insert(
            UNKNOWN.into(),
            Class {
                parent: Some(root),
                features: Features::new(),
                valencies: Vec::new(),
            },
        );

        let mut bf = BruteForce {
            classes,
            lexicon: BTreeMap::new(),
            concept_parents: BTreeMap::new(),
            roles: BTreeMap::new(),
        };
        for l in grammar["lexicon"].as_array().unwrap() {
            let class = text(l, "class").unwrap();
            let mut fs = bf.class_features(&class);
            fs.extend(features(&l["features"]));
            bf.lexicon.entry(text(l, "surface").unwrap()).or_default().push(Word {
                class,
                features: fs,
                concept: text(l, "concept"),
            });
        }
        for c in kb["concepts"].as_array().unwrap() {
            let parents = c["parents"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|p| p.as_str().unwrap().to_string())
                .collect();
            bf.concept_parents.insert(text(c, "name").unwrap(), parents);
        }
        for r in kb["roles"].as_array().unwrap() {
            bf.roles.insert(
                text(r, "name").unwrap(),
                (text(r, "domain").unwrap(), text(r, "range").unwrap()),
            );
        }
        bf
    }

    fn ancestry(&self, class: &str) -> Vec<&str> {
        let mut out = vec![];
        let mut cur = self.classes.get_key_value(class).map(|(k, _)| k.as_str());
        while let Some(c) = cur {
            out.push(c);
            cur = self.classes[c].parent.as_deref();
        }
        out
    }

    fn class_features(&self, class: &str) -> Features {
        let mut fs = Features::new();
        for c in self.ancestry(class).into_iter().rev() {
            fs.extend(self.classes[c].features.clone());
        }
        fs
    }

    /// Inherited frame; a subclass valency replaces the inherited one with
    /// the same label in place.
    fn frame(&self, class: &str) -> Vec<&Valency> {
        let mut frame: Vec<&Valency> = Vec::new();
        for c in self.ancestry(class).into_iter().rev() {
            for v in &self.classes[c].valencies {
                match frame.iter().position(|f| f.label == v.label) {
                    Some(i) => frame[i] = v,
                    None => frame.push(v),
                }
            }
        }
        frame
    }

    fn concept_subsumes(&self, general: &str, specific: &str) -> bool {
        general == THING
            || general == specific
            || self.concept_parents[specific]
                .iter()
                .any(|p| self.concept_subsumes(general, p))
    }

    fn readings(&self, token: &str) -> Vec<Word> {
        self.lexicon.get(token).cloned().unwrap_or_else(|| {
            vec![Word {
                class: UNKNOWN.into(),
                features: Features::new(),
                concept: None,
            }]
        })
    }

    /// The maximal-coverage analyses among all trees whose every word
    /// respects the syntactic and conceptual constraints, restricted to
    /// trees that can be built bottom-up with at most `gap_cap` gaps in any
    /// partial phrase.
    pub fn analyses(&self, tokens: &[&str], gap_cap: usize) -> EdgeSets {
        let readings: Vec<Vec<Word>> = tokens.iter().map(|t| self.readings(t)).collect();
        let mut best = 0;
        let mut out = EdgeSets::new();
        let mut choice = vec![0; tokens.len()];
        loop {
            let words: Vec<&Word> = choice.iter().enumerate().map(|(i, &r)| &readings[i][r]).collect();
            self.trees(&words, gap_cap, &mut best, &mut out);
            // next reading combination
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < readings[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                return out;
            }
        }
    }

    fn trees(&self, words: &[&Word], gap_cap: usize, best: &mut usize, out: &mut EdgeSets) {
        let frames: Vec<Vec<&Valency>> = words.iter().map(|w| self.frame(&w.class)).collect();
        let mut options: Vec<Vec<Place>> = Vec::new();
        for (m, w) in words.iter().enumerate() {
            let mut o = vec![None, Some(None)];
            for (h, frame) in frames.iter().enumerate() {
                for (vi, v) in frame.iter().enumerate() {
                    let direction_ok = if v.modifier_precedes { m < h } else { m > h };
                    if h != m
                        && direction_ok
                        && self.ancestry(&w.class).contains(&v.target.as_str())
                        && unifies(&w.features, &v.features)
                    {
                        o.push(Some(Some((h, vi))));
                    }
                }
            }
            options.push(o);
        }
        let mut assign = Vec::with_capacity(words.len());
        let mut used = BTreeSet::new();
        self.assign(
            words,
            &frames,
            &options,
            &mut assign,
            &mut used,
            false,
            gap_cap,
            best,
            out,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        words: &[&Word],
        frames: &[Vec<&Valency>],
        options: &[Vec<Place>],
        assign: &mut Vec<Place>,
        used: &mut BTreeSet<(usize, usize)>,
        rooted: bool,
        gap_cap: usize,
        best: &mut usize,
        out: &mut EdgeSets,
    ) {
        let m = assign.len();
        if m == words.len() {
            self.accept(words, frames, assign, gap_cap, best, out);
            return;
        }
        for &o in &options[m] {
            match o {
                Some(None) if rooted => continue,
                Some(Some(hv)) if used.contains(&hv) => continue,
                _ => {}
            }
            if let Some(Some(hv)) = o {
                used.insert(hv);
            }
            assign.push(o);
            self.assign(
                words,
                frames,
                options,
                assign,
                used,
                rooted || o == Some(None),
                gap_cap,
                best,
                out,
            );
            assign.pop();
            if let Some(Some(hv)) = o {
                used.remove(&hv);
            }
        }
    }

    fn accept(
        &self,
        words: &[&Word],
        frames: &[Vec<&Valency>],
        assign: &[Place],
        gap_cap: usize,
        best: &mut usize,
        out: &mut EdgeSets,
    ) {
        let present: Vec<usize> = (0..words.len()).filter(|&i| assign[i].is_some()).collect();
        if present.is_empty() || present.len() < *best {
            return;
        }
        let head = |i: usize| assign[i].flatten();
        // every present word reaches the root through present words
        for &i in &present {
            let mut cur = i;
            let mut steps = 0;
            while let Some((h, _)) = head(cur) {
                if assign[h].is_none() || steps > words.len() {
                    return;
                }
                cur = h;
                steps += 1;
            }
            if assign[cur] != Some(None) {
                return;
            }
        }
        let children = |h: usize| -> Vec<(usize, usize)> {
            present
                .iter()
                .filter_map(|&m| head(m).filter(|&(x, _)| x == h).map(|(_, vi)| (vi, m)))
                .collect()
        };
        let referent = |w: usize| -> Option<usize> {
            fn go(
                w: usize,
                words: &[&Word],
                frames: &[Vec<&Valency>],
                kids: &dyn Fn(usize) -> Vec<(usize, usize)>,
            ) -> Option<usize> {
                if words[w].concept.is_some() {
                    return Some(w);
                }
                let mut deps = kids(w);
                deps.sort_unstable();
                deps.into_iter()
                    .filter(|&(vi, _)| frames[w][vi].role.is_none())
                    .find_map(|(_, m)| go(m, words, frames, kids))
            }
            go(w, words, frames, &children)
        };
        for &m in &present {
            let Some((h, vi)) = head(m) else { continue };
            let Some(role) = &frames[h][vi].role else { continue };
            let (Some(rh), Some(rm)) = (referent(h), referent(m)) else {
                continue;
            };
            let (domain, range) = &self.roles[role];
            if !self.concept_subsumes(domain, words[rh].concept.as_ref().unwrap())
                || !self.concept_subsumes(range, words[rm].concept.as_ref().unwrap())
            {
                return;
            }
        }
        let root = present.iter().copied().find(|&i| assign[i] == Some(None)).unwrap();
        if !buildable(root, &|h| children(h).into_iter().map(|(_, m)| m).collect(), gap_cap) {
            return;
        }
        if present.len() > *best {
            *best = present.len();
            out.clear();
        }
        let mut edges: Vec<Edge> = present
            .iter()
            .filter_map(|&m| head(m).map(|(h, vi)| (h as u32, m as u32, frames[h][vi].label.clone())))
            .collect();
        edges.sort();
        out.insert(edges);
    }
}

fn gaps(set: u64) -> usize {
    if set == 0 {
        return 0;
    }
    let t = set >> set.trailing_zeros();
    (t & !(t << 1)).count_ones() as usize - 1
}

/// Whether the subtree under `h` can be assembled by attaching finished
/// dependent subtrees one at a time, every partial result having at most
/// `cap` gaps.
fn buildable(h: usize, children: &dyn Fn(usize) -> Vec<usize>, cap: usize) -> bool {
    fn yield_of(h: usize, children: &dyn Fn(usize) -> Vec<usize>) -> u64 {
        children(h)
            .into_iter()
            .fold(1 << h, |acc, c| acc | yield_of(c, children))
    }
    let kids = children(h);
    if !kids.iter().all(|&c| buildable(c, children, cap)) {
        return false;
    }
    let yields: Vec<u64> = kids.iter().map(|&c| yield_of(c, children)).collect();
    let n = kids.len();
    let mut reachable = vec![false; 1 << n];
    reachable[0] = true;
    for subset in 0..(1usize << n) {
        if !reachable[subset] {
            continue;
        }
        let covered = (0..n)
            .filter(|i| subset & (1 << i) != 0)
            .fold(1u64 << h, |a, i| a | yields[i]);
        for (i, y) in yields.iter().enumerate() {
            if subset & (1 << i) == 0 && gaps(covered | y) <= cap {
                reachable[subset | (1 << i)] = true;
            }
        }
    }
    reachable[(1 << n) - 1]
}
