//! Brute-force walks over pushdown-system configurations. The engine
//! answers reachability through saturation; these helpers instead expand
//! configurations one rule application at a time, with explicit stack and
//! node budgets, so they can double-check the saturation output on small
//! random systems.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use ectl::pds::PushdownSystem;

/// A configuration: control state and stack, top first.
pub type Config = (u32, Vec<u32>);

/// All one-step successors of a configuration. A configuration with an
/// empty stack has none: every rule needs a top symbol to fire.
pub fn successors(pds: &PushdownSystem, c: &Config) -> Vec<Config> {
    let (p, stack) = c;
    let Some(&top) = stack.first() else { return Vec::new() };
    let mut out = Vec::new();
    for rule in pds.rules() {
        if rule.from == *p && rule.sym == top {
            let mut s2 = Vec::with_capacity(rule.push.len() + stack.len() - 1);
            s2.extend_from_slice(&rule.push);
            s2.extend_from_slice(&stack[1..]);
            out.push((rule.to, s2));
        }
    }
    out
}

/// Outcome of a budgeted search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    /// A target was reached.
    Found,
    /// Every configuration within the stack bound was expanded and no
    /// target appeared.
    Exhausted,
    /// The node budget ran out first; nothing can be concluded.
    Capped,
}

/// Breadth-first reachability from `from` towards any of `targets`,
/// never expanding configurations whose stack exceeds `stack_cap`.
pub fn reach_brute(
    pds: &PushdownSystem,
    from: &Config,
    targets: &BTreeSet<Config>,
    stack_cap: usize,
    node_cap: usize,
) -> Search {
    let mut seen: HashSet<Config> = HashSet::new();
    let mut queue: VecDeque<Config> = VecDeque::new();
    seen.insert(from.clone());
    queue.push_back(from.clone());
    while let Some(c) = queue.pop_front() {
        if targets.contains(&c) {
            return Search::Found;
        }
        if c.1.len() > stack_cap {
            continue; // too tall to expand, but it was checked as a target
        }
        for succ in successors(pds, &c) {
            if seen.contains(&succ) {
                continue;
            }
            if seen.len() >= node_cap {
                return Search::Capped;
            }
            seen.insert(succ.clone());
            queue.push_back(succ);
        }
    }
    Search::Exhausted
}

/// What an exhaustive forward closure from a configuration revealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunBound {
    /// The closure is finite and acyclic: every run halts.
    Halts,
    /// A reachable cycle exists: some run is infinite.
    Cycles,
    /// The closure outgrew the node budget; by König's lemma that already
    /// means arbitrarily long runs exist, but no cycle was pinned down.
    Capped,
}

/// Expands the full successor graph of `from` (no stack bound) and
/// classifies it. Halting systems close quickly; growing ones trip the
/// budget.
pub fn closure_brute(pds: &PushdownSystem, from: &Config, node_cap: usize) -> RunBound {
    let mut index: HashMap<Config, usize> = HashMap::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue: VecDeque<Config> = VecDeque::new();
    index.insert(from.clone(), 0);
    edges.push(Vec::new());
    queue.push_back(from.clone());
    while let Some(c) = queue.pop_front() {
        let id = index[&c];
        let mut out = Vec::new();
        for succ in successors(pds, &c) {
            let sid = match index.get(&succ) {
                Some(i) => *i,
                None => {
                    if index.len() >= node_cap {
                        return RunBound::Capped;
                    }
                    let i = edges.len();
                    index.insert(succ.clone(), i);
                    edges.push(Vec::new());
                    queue.push_back(succ);
                    i
                }
            };
            out.push(sid);
        }
        edges[id] = out;
    }
    // three-color depth-first search for a cycle
    let n = edges.len();
    let mut color = vec![0u8; n]; // 0 white, 1 on stack, 2 done
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        stack.push((root, 0));
        while let Some((v, i)) = stack.pop() {
            if i < edges[v].len() {
                stack.push((v, i + 1));
                let w = edges[v][i];
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return RunBound::Cycles,
                    _ => {}
                }
            } else {
                color[v] = 2;
            }
        }
    }
    RunBound::Halts
}

/// Whether some run of exactly `len` steps leaves `from`. Depth-first
/// with a failure memo; `budget` counts expansions and `None` reports its
/// exhaustion.
pub fn can_extend(
    pds: &PushdownSystem,
    from: &Config,
    len: usize,
    budget: &mut usize,
) -> Option<bool> {
    fn go(
        pds: &PushdownSystem,
        c: &Config,
        remaining: usize,
        memo: &mut HashMap<Config, usize>,
        budget: &mut usize,
    ) -> Option<bool> {
        if remaining == 0 {
            return Some(true);
        }
        if let Some(f) = memo.get(c) {
            if *f >= remaining {
                return Some(false);
            }
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        for succ in successors(pds, c) {
            match go(pds, &succ, remaining - 1, memo, budget)? {
                true => return Some(true),
                false => {}
            }
        }
        let e = memo.entry(c.clone()).or_insert(0);
        *e = (*e).max(remaining);
        Some(false)
    }
    let mut memo = HashMap::new();
    go(pds, from, len, &mut memo, budget)
}

/// A configuration is dead when no rule fires at its head. This is the
/// local, rule-table definition the saturation-side dead-set must agree
/// with.
pub fn is_dead_config(pds: &PushdownSystem, c: &Config) -> bool {
    successors(pds, c).is_empty()
}
