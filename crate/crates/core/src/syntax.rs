//! SYNTAXCHECK, the counted grammatical constraint predicate.

use crate::features::unify;
use crate::grammar::{Direction, Grammar, Valency};
use crate::metrics::Metrics;
use crate::word::WordActor;

/// The valency frame a word offers. Placeholders use the augmented frame of
/// their predicted class, so a modifier may attach to a yet-unseen head
/// through any valency of a subclass.
pub fn frame_of<'g>(g: &'g Grammar, w: &WordActor) -> &'g [Valency] {
    if w.placeholder {
        g.augmented_frame(w.class)
    } else {
        g.frame(w.class)
    }
}

/// Counts one call, then tests whether `modifier` may fill `v` on `head`:
/// the label is still open, the target class subsumes the modifier's
/// class, features unify, and word order matches the valency direction.
pub fn syntax_check(g: &Grammar, head: &WordActor, modifier: &WordActor, v: &Valency, m: &Metrics) -> bool {
    #[cfg(test)]
    crate::metrics::calls::syntax();
    m.record_syntax_check();
    let frame = frame_of(g, head);
    let filled = head
        .filled
        .iter()
        .any(|&(i, _)| frame.get(i as usize).is_some_and(|f| f.label == v.label));
    if filled || !g.subsumes(v.target, modifier.class) {
        return false;
    }
    if unify(&modifier.features, &v.features).is_none() {
        return false;
    }
    match v.direction {
        Direction::ModifierPrecedes => modifier.position < head.position,
        Direction::ModifierFollows => modifier.position > head.position,
    }
}
