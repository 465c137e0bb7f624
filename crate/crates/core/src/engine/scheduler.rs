//! Discrete-event message queue.
//!
//! Messages sent "concurrently" share a timestamp; among those the delivery
//! order is a seeded pseudo-random permutation. Protocol outcomes never
//! depend on that order (replies are collected and sorted before use), so a
//! seed only changes the trace.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::result::TraceEvent;

pub(crate) struct Scheduler<M> {
    rng: ChaCha8Rng,
    queue: BinaryHeap<Reverse<(u64, u64, u64)>>,
    pending: BTreeMap<u64, (u64, M)>,
    next_seq: u64,
    delivered: u64,
    trace: Option<Vec<TraceEvent>>,
}

impl<M> Scheduler<M> {
    pub fn new(seed: u64, trace: bool) -> Self {
        Scheduler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            queue: BinaryHeap::new(),
            pending: BTreeMap::new(),
            next_seq: 0,
            delivered: 0,
            trace: trace.then(Vec::new),
        }
    }

    pub fn send(&mut self, time: u64, msg: M) {
        let seq = self.next_seq;
        self.next_seq += 1;
        let tiebreak = self.rng.next_u64();
        self.queue.push(Reverse((time, tiebreak, seq)));
        self.pending.insert(seq, (time, msg));
    }

    /// Next message in delivery order with its timestamp.
    pub fn next(&mut self) -> Option<(u64, M)> {
        let Reverse((_, _, seq)) = self.queue.pop()?;
        self.delivered += 1;
        self.pending.remove(&seq)
    }

    pub fn is_quiescent(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn tracing(&self) -> bool {
        self.trace.is_some()
    }

    pub fn record(&mut self, msg: &'static str, from: String, to: String, outcome: String) {
        let seq = self.delivered;
        if let Some(t) = &mut self.trace {
            t.push(TraceEvent {
                seq,
                msg,
                from,
                to,
                outcome,
            });
        }
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(core::mem::take).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(seed: u64) -> Vec<u32> {
        let mut s = Scheduler::new(seed, false);
        s.send(1, 10);
        for i in 0..8 {
            s.send(0, i);
        }
        let mut out = Vec::new();
        while let Some((_, m)) = s.next() {
            out.push(m);
        }
        out
    }

    #[test]
    fn time_orders_before_tiebreak() {
        let o = order(3);
        assert_eq!(o.last(), Some(&10));
        assert_eq!(o, order(3));
        let mut sorted = o.clone();
        sorted.sort();
        assert_eq!(sorted, [0, 1, 2, 3, 4, 5, 6, 7, 10]);
    }

    #[test]
    fn seed_permutes_same_time_messages() {
        assert!((0..16).any(|s| order(s) != order(0)));
    }
}
