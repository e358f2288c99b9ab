//! Direct product-graph reference for regular annotations. The automaton
//! is determinized on the fly by a local subset construction (with the
//! empty subset as an explicit sink, so words never fall off), the product
//! with the system is explored as a plain graph, and until/release are
//! answered by reachability and by safe-cycle/dead-end search. No code is
//! shared with the saturation pipeline.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ectl::automata::Automaton;
use ectl::lts::Lts;

use crate::OracleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMode {
    Until,
    Release,
}

/// A product node: the subset of automaton states alive after the word
/// read so far, and the system state reached.
type Node = (BTreeSet<u32>, u32);

struct Subsets<'a> {
    rules: &'a [(u32, Option<u32>, u32)],
    letters: &'a [String],
    finals: &'a BTreeSet<u32>,
}

impl Subsets<'_> {
    fn close(&self, mut set: BTreeSet<u32>) -> BTreeSet<u32> {
        let mut work: Vec<u32> = set.iter().copied().collect();
        while let Some(q) = work.pop() {
            for (from, on, to) in self.rules {
                if *from == q && on.is_none() && set.insert(*to) {
                    work.push(*to);
                }
            }
        }
        set
    }

    fn step(&self, set: &BTreeSet<u32>, letter: &str) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        if let Some(lid) = self.letters.iter().position(|l| l == letter) {
            let lid = lid as u32;
            for (from, on, to) in self.rules {
                if set.contains(from) && *on == Some(lid) {
                    out.insert(*to);
                }
            }
        }
        self.close(out)
    }

    fn hits_final(&self, set: &BTreeSet<u32>) -> bool {
        set.iter().any(|q| self.finals.contains(q))
    }
}

/// Evaluates E(x U[A] y) or E(x R[A] y) for a finite-kind automaton at
/// every state, by explicit search in the subset × system product.
pub fn finite_product_check(
    lts: &Lts,
    sat_x: &[bool],
    aut: &Automaton,
    sat_y: &[bool],
    mode: ProductMode,
) -> Result<Vec<bool>, OracleError> {
    let Automaton::Finite(f) = aut else {
        return Err(OracleError::UnsupportedKind { name: aut.name().to_string() });
    };
    let init = f
        .initial()
        .ok_or_else(|| OracleError::BadAutomaton { name: f.name().to_string() })?;
    let subs = Subsets { rules: f.rules(), letters: f.alphabet(), finals: f.finals() };
    let start_set = subs.close(BTreeSet::from([init]));

    let mut out = vec![false; lts.state_count()];
    for s in 0..lts.state_count() as u32 {
        out[s as usize] = match mode {
            ProductMode::Until => until_from(lts, sat_x, sat_y, &subs, &start_set, s),
            ProductMode::Release => release_from(lts, sat_x, sat_y, &subs, &start_set, s),
        };
    }
    Ok(out)
}

/// Reachability of an accepting pair: a node whose subset hits a final
/// state while the system state carries y, moving only through x-states.
fn until_from(
    lts: &Lts,
    sat_x: &[bool],
    sat_y: &[bool],
    subs: &Subsets,
    start_set: &BTreeSet<u32>,
    s0: u32,
) -> bool {
    let mut seen: BTreeSet<Node> = BTreeSet::new();
    let mut queue: VecDeque<Node> = VecDeque::new();
    queue.push_back((start_set.clone(), s0));
    seen.insert((start_set.clone(), s0));
    while let Some((set, s)) = queue.pop_front() {
        if subs.hits_final(&set) && sat_y[s as usize] {
            return true;
        }
        if !sat_x[s as usize] {
            continue; // the prefix may not pass through a non-x state
        }
        for (a, t) in lts.successors(s).expect("state id from iteration") {
            let next = subs.step(&set, lts.action_name(*a));
            let node = (next, *t);
            if seen.insert(node.clone()) {
                queue.push_back(node);
            }
        }
    }
    false
}

/// Release holds when some maximal path can be walked without ever
/// standing on a violating node (subset final, state not y) before a
/// releasing x-visit. Concretely: from the start node, moving through
/// pending nodes only, we can reach a released node, a pending node whose
/// system state is a dead end, or a cycle of pending nodes.
fn release_from(
    lts: &Lts,
    sat_x: &[bool],
    sat_y: &[bool],
    subs: &Subsets,
    start_set: &BTreeSet<u32>,
    s0: u32,
) -> bool {
    let violating =
        |set: &BTreeSet<u32>, s: u32| subs.hits_final(set) && !sat_y[s as usize];
    let released = |set: &BTreeSet<u32>, s: u32| {
        sat_x[s as usize] && !violating(set, s)
    };

    let start = (start_set.clone(), s0);
    if violating(start_set, s0) {
        return false;
    }
    if released(start_set, s0) {
        return true;
    }

    // collect the pending nodes reachable from the start without touching
    // a violating one; stop early on a released or halting node
    let mut pending: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    let mut queue: VecDeque<Node> = VecDeque::new();
    pending.insert(start.clone(), Vec::new());
    queue.push_back(start);
    while let Some((set, s)) = queue.pop_front() {
        if lts.successors(s).expect("state id from iteration").is_empty() {
            return true; // maximal path ends here with all prefixes clean
        }
        let mut edges = Vec::new();
        for (a, t) in lts.successors(s).expect("state id from iteration") {
            let next = subs.step(&set, lts.action_name(*a));
            if violating(&next, *t) {
                continue; // this continuation is burnt
            }
            if released(&next, *t) {
                return true;
            }
            let node = (next, *t);
            edges.push(node.clone());
            if !pending.contains_key(&node) {
                pending.insert(node.clone(), Vec::new());
                queue.push_back(node);
            }
        }
        let key = (set, s);
        pending.insert(key, edges);
    }

    // no released node and no safe dead end: the remaining hope is an
    // infinite path inside the pending subgraph, i.e. a cycle
    has_cycle(&pending)
}

fn has_cycle(graph: &BTreeMap<Node, Vec<Node>>) -> bool {
    // Kahn's algorithm: a full topological order means no cycle
    let mut indeg: BTreeMap<&Node, usize> = graph.keys().map(|k| (k, 0)).collect();
    for edges in graph.values() {
        for e in edges {
            if let Some(d) = indeg.get_mut(e) {
                *d += 1;
            }
        }
    }
    let mut free: Vec<&Node> =
        indeg.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut removed = 0usize;
    while let Some(k) = free.pop() {
        removed += 1;
        for e in &graph[k] {
            if let Some(d) = indeg.get_mut(e) {
                *d -= 1;
                if *d == 0 {
                    free.push(e);
                }
            }
        }
    }
    removed < graph.len()
}
