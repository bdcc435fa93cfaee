//! Per-connective labeling steps over state sets.

use fixedbitset::FixedBitSet;

use crate::logic::PlayerId;
use crate::structure::GalStructure;

/// Outcome of an until computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixpoint {
    pub marks: FixedBitSet,
    /// Number of backward propagation layers that added at least one state.
    pub rounds: usize,
}

pub fn all_states(g: &GalStructure) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(g.state_count());
    s.insert_range(..);
    s
}

/// States whose player set contains `i`.
pub fn verify_player(g: &GalStructure, i: PlayerId) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(g.state_count());
    for e in g.states() {
        if g.players_at(e).contains(&i) {
            s.insert(e.index());
        }
    }
    s
}

pub fn verify_not(g: &GalStructure, a: &FixedBitSet) -> FixedBitSet {
    let mut s = a.clone();
    s.grow(g.state_count());
    s.toggle_range(..);
    s
}

pub fn verify_implies(g: &GalStructure, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut s = verify_not(g, a);
    s.union_with(b);
    s
}

/// Union of the marks of every instance of the quantified body.
pub fn verify_exists<'a>(g: &GalStructure, instances: impl IntoIterator<Item = &'a FixedBitSet>) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(g.state_count());
    for i in instances {
        s.union_with(i);
    }
    s
}

/// States all of whose successors are in `a`. Deadlocks qualify vacuously.
pub fn verify_ax(g: &GalStructure, a: &FixedBitSet) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(g.state_count());
    for e in g.states() {
        if g.succ(e).iter().all(|n| a.contains(n.index())) {
            s.insert(e.index());
        }
    }
    s
}

/// Least fixpoint of `Z = b ∨ (a ∧ some successor in Z)`.
pub fn verify_eu(g: &GalStructure, a: &FixedBitSet, b: &FixedBitSet) -> Fixpoint {
    let mut z = b.clone();
    z.grow(g.state_count());
    let mut layer: Vec<usize> = z.ones().collect();
    let mut rounds = 0;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &e in &layer {
            for p in g.pred(crate::structure::StateId(e as u32)) {
                let p = p.index();
                if a.contains(p) && !z.put(p) {
                    next.push(p);
                }
            }
        }
        if !next.is_empty() {
            rounds += 1;
        }
        layer = next;
    }
    Fixpoint { marks: z, rounds }
}

/// Least fixpoint of `Z = b ∨ (a ∧ has a successor ∧ every successor in Z)`.
pub fn verify_au(g: &GalStructure, a: &FixedBitSet, b: &FixedBitSet) -> Fixpoint {
    let mut z = b.clone();
    z.grow(g.state_count());
    let mut pending: Vec<usize> = g.states().map(|e| g.succ(e).len()).collect();
    let mut layer: Vec<usize> = z.ones().collect();
    let mut rounds = 0;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &e in &layer {
            for p in g.pred(crate::structure::StateId(e as u32)) {
                let p = p.index();
                if z.contains(p) {
                    continue;
                }
                pending[p] -= 1;
                if pending[p] == 0 && a.contains(p) {
                    z.insert(p);
                    next.push(p);
                }
            }
        }
        if !next.is_empty() {
            rounds += 1;
        }
        layer = next;
    }
    Fixpoint { marks: z, rounds }
}
