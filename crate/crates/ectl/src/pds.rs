//! Pushdown systems and the saturation-based reachability machinery: pre*
//! over regular configuration sets, infinite-run detection via repeating
//! heads, and the dead-configuration sets used for maximal finite runs.
//!
//! A configuration is a control state plus a stack word (top first). Regular
//! sets of configurations are represented by config automata: finite
//! automata over the stack alphabet whose initial states are the control
//! states, accepting (p, w) iff w is accepted starting from p.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdsError {
    #[error("pushdown system `{name}`: rule `{rule}` is not normalized (replacement longer than 2)")]
    NotNormalized { name: String, rule: String },
    #[error("config automaton has an edge into control state `{state}`; targets must only enter auxiliary states")]
    EdgeIntoControl { state: String },
    #[error("unknown control state id {id}")]
    UnknownControl { id: u32 },
    #[error("witness replay exceeded {cap} rule applications")]
    TraceTooLong { cap: usize },
}

/// One rule `(from, sym) -> (to, push)`; `push` is the replacement for the
/// popped top symbol, written top-first (empty = pop).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsRule {
    pub from: u32,
    pub sym: u32,
    pub to: u32,
    pub push: Vec<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct PushdownSystem {
    name: String,
    controls: Vec<String>,
    control_ids: HashMap<String, u32>,
    syms: Vec<String>,
    sym_ids: HashMap<String, u32>,
    rules: Vec<PdsRule>,
    rule_set: HashSet<(u32, u32, u32, Vec<u32>)>,
}

impl PushdownSystem {
    pub fn new(name: &str) -> PushdownSystem {
        PushdownSystem { name: name.to_string(), ..Default::default() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Returns the id for a control state, creating it on first use.
    pub fn intern_control(&mut self, name: &str) -> u32 {
        if let Some(id) = self.control_ids.get(name) {
            return *id;
        }
        let id = self.controls.len() as u32;
        self.controls.push(name.to_string());
        self.control_ids.insert(name.to_string(), id);
        id
    }

    pub fn intern_sym(&mut self, name: &str) -> u32 {
        if let Some(id) = self.sym_ids.get(name) {
            return *id;
        }
        let id = self.syms.len() as u32;
        self.syms.push(name.to_string());
        self.sym_ids.insert(name.to_string(), id);
        id
    }

    pub fn control_id(&self, name: &str) -> Option<u32> {
        self.control_ids.get(name).copied()
    }

    pub fn sym_id(&self, name: &str) -> Option<u32> {
        self.sym_ids.get(name).copied()
    }

    pub fn control_name(&self, id: u32) -> &str {
        &self.controls[id as usize]
    }

    pub fn sym_name(&self, id: u32) -> &str {
        &self.syms[id as usize]
    }

    pub fn control_count(&self) -> usize {
        self.controls.len()
    }

    pub fn sym_count(&self) -> usize {
        self.syms.len()
    }

    pub fn rules(&self) -> &[PdsRule] {
        &self.rules
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Adds a rule by ids; duplicates are merged (rules form a set).
    pub fn add_rule(&mut self, from: u32, sym: u32, to: u32, push: &[u32]) {
        let key = (from, sym, to, push.to_vec());
        if self.rule_set.insert(key) {
            self.rules.push(PdsRule { from, sym, to, push: push.to_vec() });
        }
    }

    /// Convenience for tests and hand-built systems.
    pub fn add_rule_named(&mut self, from: &str, sym: &str, to: &str, push: &[&str]) {
        let from = self.intern_control(from);
        let sym = self.intern_sym(sym);
        let to = self.intern_control(to);
        let push: Vec<u32> = push.iter().map(|s| self.intern_sym(s)).collect();
        self.add_rule(from, sym, to, &push);
    }

    pub fn is_normalized(&self) -> bool {
        self.rules.iter().all(|r| r.push.len() <= 2)
    }

    fn rule_display(&self, r: &PdsRule) -> String {
        let push: Vec<&str> = r.push.iter().map(|s| self.sym_name(*s)).collect();
        format!(
            "({}, {}) -> ({}, [{}])",
            self.control_name(r.from),
            self.sym_name(r.sym),
            self.control_name(r.to),
            push.join(" ")
        )
    }

    fn ensure_normalized(&self) -> Result<(), PdsError> {
        for r in &self.rules {
            if r.push.len() > 2 {
                return Err(PdsError::NotNormalized {
                    name: self.name.clone(),
                    rule: self.rule_display(r),
                });
            }
        }
        Ok(())
    }
}

/// Where a normalized rule came from: the index of the original rule, and
/// whether it is the leading rule of a split chain (the one that stands for
/// the original step) or a bookkeeping continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleOrigin {
    pub source: usize,
    pub leading: bool,
}

/// Splits every rule with a replacement longer than 2 into a chain of push
/// rules through fresh control states (`norm:<n>`), preserving reachability
/// between original configurations. Returns the new system plus, for each of
/// its rules, the index of the original rule it realizes.
pub fn normalize(pds: &PushdownSystem) -> (PushdownSystem, Vec<RuleOrigin>) {
    let mut out = PushdownSystem::new(&pds.name);
    out.controls = pds.controls.clone();
    out.control_ids = pds.control_ids.clone();
    out.syms = pds.syms.clone();
    out.sym_ids = pds.sym_ids.clone();
    let mut origins = Vec::new();
    let mut fresh = 0usize;
    for (i, r) in pds.rules.iter().enumerate() {
        let k = r.push.len();
        if k <= 2 {
            out.add_rule(r.from, r.sym, r.to, &r.push);
            origins.push(RuleOrigin { source: i, leading: true });
            continue;
        }
        // (p, s) -> (q, w1..wk) becomes a leading rule pushing the last two
        // symbols, then rewrites that prepend one earlier symbol each,
        // ending at q with w1 w2 on top:
        //   (p, s)        -> (f1, w{k-1} wk)
        //   (f1, w{k-1})  -> (f2, w{k-2} w{k-1})
        //   ...
        //   (f{k-2}, w2)  -> (q, w1 w2)
        let mut chain: Vec<u32> = Vec::new();
        for _ in 0..k - 2 {
            let id = out.intern_control(&format!("norm:{fresh}"));
            fresh += 1;
            chain.push(id);
        }
        out.add_rule(r.from, r.sym, chain[0], &[r.push[k - 2], r.push[k - 1]]);
        origins.push(RuleOrigin { source: i, leading: true });
        for j in 0..k - 2 {
            let to = if j + 1 < chain.len() { chain[j + 1] } else { r.to };
            let top = r.push[k - 2 - j];
            out.add_rule(chain[j], top, to, &[r.push[k - 3 - j], top]);
            origins.push(RuleOrigin { source: i, leading: false });
        }
    }
    (out, origins)
}

/// A finite automaton over the stack alphabet representing a regular set of
/// configurations. States `0..control_count` are the controls of the system
/// it was built for; auxiliary states are added behind them.
#[derive(Debug, Clone)]
pub struct ConfigAutomaton {
    state_names: Vec<String>,
    n_controls: u32,
    sym_names: Vec<String>,
    edges: Vec<(u32, u32, u32)>,
    edge_set: HashSet<(u32, u32, u32)>,
    finals: BTreeSet<u32>,
}

impl ConfigAutomaton {
    /// An automaton accepting nothing, with one initial state per control.
    pub fn new(pds: &PushdownSystem) -> ConfigAutomaton {
        ConfigAutomaton {
            state_names: pds.controls.clone(),
            n_controls: pds.controls.len() as u32,
            sym_names: pds.syms.clone(),
            edges: Vec::new(),
            edge_set: HashSet::new(),
            finals: BTreeSet::new(),
        }
    }

    /// Adds an auxiliary (non-control) state named `aux:<n>`.
    pub fn add_aux(&mut self) -> u32 {
        let id = self.state_names.len() as u32;
        self.state_names.push(format!("aux:{}", id - self.n_controls));
        id
    }

    pub fn add_edge(&mut self, from: u32, sym: u32, to: u32) {
        if self.edge_set.insert((from, sym, to)) {
            self.edges.push((from, sym, to));
        }
    }

    pub fn mark_final(&mut self, state: u32) {
        self.finals.insert(state);
    }

    pub fn n_controls(&self) -> u32 {
        self.n_controls
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn edges(&self) -> &[(u32, u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn finals(&self) -> &BTreeSet<u32> {
        &self.finals
    }

    pub fn state_name(&self, q: u32) -> &str {
        &self.state_names[q as usize]
    }

    /// NFA acceptance of the stack word (top-first) starting from a control.
    pub fn accepts(&self, control: u32, stack: &[u32]) -> Result<bool, PdsError> {
        if control >= self.n_controls {
            return Err(PdsError::UnknownControl { id: control });
        }
        let mut cur: BTreeSet<u32> = BTreeSet::from([control]);
        for sym in stack {
            let mut next = BTreeSet::new();
            for (f, s, t) in &self.edges {
                if *s == *sym && cur.contains(f) {
                    next.insert(*t);
                }
            }
            cur = next;
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.iter().any(|q| self.finals.contains(q)))
    }

    /// Stable debug rendering: `final STATE` lines, then `STATE γ STATE`
    /// edge lines, both lexicographically sorted. Bit-exact across runs.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> =
            self.finals.iter().map(|q| format!("final {}", self.state_name(*q))).collect();
        lines.sort();
        let mut edge_lines: Vec<String> = self
            .edges
            .iter()
            .map(|(f, s, t)| {
                format!(
                    "{} {} {}",
                    self.state_name(*f),
                    &self.sym_names[*s as usize],
                    self.state_name(*t)
                )
            })
            .collect();
        edge_lines.sort();
        lines.extend(edge_lines);
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

/// How an edge of a saturated automaton came to exist: part of the target,
/// or added for a rule whose replacement is matched by the `via` edges
/// (indices into the saturated edge list, always older than the edge).
#[derive(Debug, Clone)]
enum Provenance {
    Seed,
    Rule { rule: usize, via: Vec<usize> },
}

/// The result of `pre_star`: the saturated automaton plus the provenance
/// needed to replay a rule sequence from any accepted configuration into
/// the original target.
#[derive(Debug, Clone)]
pub struct SaturatedCa {
    ca: ConfigAutomaton,
    provenance: Vec<Provenance>,
}

impl SaturatedCa {
    pub fn ca(&self) -> &ConfigAutomaton {
        &self.ca
    }

    pub fn accepts(&self, control: u32, stack: &[u32]) -> Result<bool, PdsError> {
        self.ca.accepts(control, stack)
    }

    /// Replays the saturation back-pointers from an accepted configuration,
    /// returning the rule indices (into the system handed to `pre_star`)
    /// applied in order until a target configuration is reached. `None` if
    /// the configuration is not accepted.
    pub fn trace(
        &self,
        control: u32,
        stack: &[u32],
        cap: usize,
    ) -> Result<Option<Vec<usize>>, PdsError> {
        if control >= self.ca.n_controls {
            return Err(PdsError::UnknownControl { id: control });
        }
        let Some(mut path) = self.best_path(control, stack) else {
            return Ok(None);
        };
        let mut rules = Vec::new();
        loop {
            let Some(&first) = path.first() else { break };
            match &self.provenance[first] {
                Provenance::Seed => break,
                Provenance::Rule { rule, via } => {
                    rules.push(*rule);
                    if rules.len() > cap {
                        return Err(PdsError::TraceTooLong { cap });
                    }
                    path.splice(0..1, via.iter().copied());
                }
            }
        }
        Ok(Some(rules))
    }

    /// Deterministic accepting path for (control, stack): depth-first over
    /// edges ordered by insertion index, memoizing dead (state, position)
    /// pairs. Returns edge indices.
    fn best_path(&self, control: u32, stack: &[u32]) -> Option<Vec<usize>> {
        // edges grouped by (state, sym), in insertion order
        let mut by_key: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
        for (i, (f, s, _)) in self.ca.edges.iter().enumerate() {
            by_key.entry((*f, *s)).or_default().push(i);
        }
        let mut dead: HashSet<(u32, usize)> = HashSet::new();
        let mut path: Vec<usize> = Vec::new();
        if self.dfs(control, stack, 0, &by_key, &mut dead, &mut path) {
            Some(path)
        } else {
            None
        }
    }

    fn dfs(
        &self,
        state: u32,
        stack: &[u32],
        pos: usize,
        by_key: &HashMap<(u32, u32), Vec<usize>>,
        dead: &mut HashSet<(u32, usize)>,
        path: &mut Vec<usize>,
    ) -> bool {
        if pos == stack.len() {
            return self.ca.finals.contains(&state);
        }
        if dead.contains(&(state, pos)) {
            return false;
        }
        if let Some(edges) = by_key.get(&(state, stack[pos])) {
            for &e in edges {
                let (_, _, t) = self.ca.edges[e];
                path.push(e);
                if self.dfs(t, stack, pos + 1, by_key, dead, path) {
                    return true;
                }
                path.pop();
            }
        }
        dead.insert((state, pos));
        false
    }
}

/// Saturates `target` into the automaton accepting every configuration from
/// which the system can reach a target configuration: whenever a rule
/// (p,γ)→(p',w) exists and the automaton has a path p' →w q, the edge
/// p →γ q is added, to fixpoint. The worklist is FIFO and rules fire in
/// declaration order, so the output is deterministic.
pub fn pre_star(pds: &PushdownSystem, target: &ConfigAutomaton) -> Result<SaturatedCa, PdsError> {
    pds.ensure_normalized()?;
    for (_, _, t) in target.edges() {
        if *t < target.n_controls {
            return Err(PdsError::EdgeIntoControl {
                state: target.state_name(*t).to_string(),
            });
        }
    }

    let mut ca = target.clone();
    ca.edges.clear();
    ca.edge_set.clear();
    let mut provenance: Vec<Provenance> = Vec::new();
    let mut worklist: VecDeque<usize> = VecDeque::new();
    // edges grouped by (from, sym) for the two-symbol completion scans
    let mut adj: HashMap<(u32, u32), Vec<usize>> = HashMap::new();

    macro_rules! add_edge {
        ($f:expr, $s:expr, $t:expr, $prov:expr) => {{
            let (f, s, t) = ($f, $s, $t);
            if ca.edge_set.insert((f, s, t)) {
                let idx = ca.edges.len();
                ca.edges.push((f, s, t));
                provenance.push($prov);
                adj.entry((f, s)).or_default().push(idx);
                worklist.push_back(idx);
            }
        }};
    }

    for (f, s, t) in target.edges() {
        add_edge!(*f, *s, *t, Provenance::Seed);
    }
    // rule indexes: single-symbol replacements keyed by (to, push[0]);
    // two-symbol replacements likewise by their first pushed symbol
    let mut one: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    let mut two: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, r) in pds.rules().iter().enumerate() {
        match r.push.len() {
            0 => add_edge!(r.from, r.sym, r.to, Provenance::Rule { rule: i, via: vec![] }),
            1 => one.entry((r.to, r.push[0])).or_default().push(i),
            _ => two.entry((r.to, r.push[0])).or_default().push(i),
        }
    }
    // partially matched two-symbol rules: key (mid-state, second symbol)
    let mut pending: HashMap<(u32, u32), Vec<(usize, usize)>> = HashMap::new();

    while let Some(ti) = worklist.pop_front() {
        let (q, sym, q2) = ca.edges[ti];
        if let Some(rules) = one.get(&(q, sym)) {
            for &ri in rules {
                let r = &pds.rules()[ri];
                add_edge!(r.from, r.sym, q2, Provenance::Rule { rule: ri, via: vec![ti] });
            }
        }
        if let Some(rules) = two.get(&(q, sym)) {
            for &ri in rules {
                let r = &pds.rules()[ri];
                let key = (q2, r.push[1]);
                pending.entry(key).or_default().push((ri, ti));
                if let Some(seconds) = adj.get(&key) {
                    for &e2 in seconds.clone().iter() {
                        let t2 = ca.edges[e2].2;
                        add_edge!(
                            r.from,
                            r.sym,
                            t2,
                            Provenance::Rule { rule: ri, via: vec![ti, e2] }
                        );
                    }
                }
            }
        }
        if let Some(firsts) = pending.get(&(q, sym)) {
            for (ri, first) in firsts.clone() {
                let r = &pds.rules()[ri];
                add_edge!(r.from, r.sym, q2, Provenance::Rule { rule: ri, via: vec![first, ti] });
            }
        }
    }

    Ok(SaturatedCa { ca, provenance })
}

/// The heads (p,γ) that can reach themselves again in at least one step with
/// the stack below γ untouched — the certificates for infinite runs.
/// Computed via the head graph: nodes are heads; a rewrite (p,γ)→(q,γ')
/// steps to (q,γ'); a push (p,γ)→(q,γ₁γ₂) steps to (q,γ₁) immediately and to
/// (q',γ₂) for every q' that can fully consume γ₁ from q. Repeating heads
/// are exactly the nodes on cycles.
pub fn repeating_heads(pds: &PushdownSystem) -> Result<BTreeSet<(u32, u32)>, PdsError> {
    pds.ensure_normalized()?;
    let pops = pop_relation(pds);

    let mut nodes: Vec<(u32, u32)> = Vec::new();
    let mut node_ids: HashMap<(u32, u32), usize> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let intern = |h: (u32, u32),
                      nodes: &mut Vec<(u32, u32)>,
                      node_ids: &mut HashMap<(u32, u32), usize>,
                      succ: &mut Vec<Vec<usize>>| {
        *node_ids.entry(h).or_insert_with(|| {
            nodes.push(h);
            succ.push(Vec::new());
            nodes.len() - 1
        })
    };
    for r in pds.rules() {
        let from = intern((r.from, r.sym), &mut nodes, &mut node_ids, &mut succ);
        match r.push.len() {
            0 => {}
            1 => {
                let to = intern((r.to, r.push[0]), &mut nodes, &mut node_ids, &mut succ);
                succ[from].push(to);
            }
            _ => {
                let to = intern((r.to, r.push[0]), &mut nodes, &mut node_ids, &mut succ);
                succ[from].push(to);
                for q2 in pops.get(&(r.to, r.push[0])).into_iter().flatten() {
                    let lower = intern((*q2, r.push[1]), &mut nodes, &mut node_ids, &mut succ);
                    succ[from].push(lower);
                }
            }
        }
    }

    let comp = tarjan_scc(&succ);
    let mut comp_size: HashMap<usize, usize> = HashMap::new();
    for c in &comp {
        *comp_size.entry(*c).or_default() += 1;
    }
    let mut rep = BTreeSet::new();
    for (i, head) in nodes.iter().enumerate() {
        let cyclic =
            comp_size[&comp[i]] > 1 || succ[i].contains(&i);
        if cyclic {
            rep.insert(*head);
        }
    }
    Ok(rep)
}

/// pop(p,γ,q) iff (p, γ) can become (q, ε) — γ fully consumed. Saturation:
/// pops seed it, rewrites chain through it, pushes need two hops.
fn pop_relation(pds: &PushdownSystem) -> BTreeMap<(u32, u32), BTreeSet<u32>> {
    let mut pops: BTreeSet<(u32, u32, u32)> = BTreeSet::new();
    let mut worklist: VecDeque<(u32, u32, u32)> = VecDeque::new();
    let add = |t: (u32, u32, u32),
                   pops: &mut BTreeSet<(u32, u32, u32)>,
                   worklist: &mut VecDeque<(u32, u32, u32)>| {
        if pops.insert(t) {
            worklist.push_back(t);
        }
    };
    for r in pds.rules() {
        if r.push.is_empty() {
            add((r.from, r.sym, r.to), &mut pops, &mut worklist);
        }
    }
    while let Some((q, sym, x)) = worklist.pop_front() {
        for r in pds.rules() {
            match r.push.len() {
                1 if (r.to, r.push[0]) == (q, sym) => {
                    add((r.from, r.sym, x), &mut pops, &mut worklist);
                }
                2 => {
                    // (r.from, r.sym) -> (r.to, a b): consuming needs
                    // pop(r.to, a, m) then pop(m, b, y)
                    let (a, b) = (r.push[0], r.push[1]);
                    if (r.to, a) == (q, sym) {
                        let seconds: Vec<u32> = pops
                            .iter()
                            .filter(|(f, s, _)| (*f, *s) == (x, b))
                            .map(|(_, _, y)| *y)
                            .collect();
                        for y in seconds {
                            add((r.from, r.sym, y), &mut pops, &mut worklist);
                        }
                    }
                    // the new triple may complete a partially matched push
                    let firsts: Vec<u32> = pops
                        .iter()
                        .filter(|(f, s, m)| (*f, *s) == (r.to, a) && *m == q)
                        .map(|_| q)
                        .collect();
                    if sym == b && !firsts.is_empty() {
                        add((r.from, r.sym, x), &mut pops, &mut worklist);
                    }
                }
                _ => {}
            }
        }
    }
    let mut out: BTreeMap<(u32, u32), BTreeSet<u32>> = BTreeMap::new();
    for (p, g, q) in pops {
        out.entry((p, g)).or_default().insert(q);
    }
    out
}

/// Iterative Tarjan; returns the component index per node. Components are
/// numbered in reverse topological order (an edge u→v across components
/// implies comp[u] > comp[v]).
pub(crate) fn tarjan_scc(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut next_comp = 0usize;

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        // (node, next child position)
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *ci < succ[v].len() {
                let w = succ[v][*ci];
                *ci += 1;
                if index[w] == usize::MAX {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("scc stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                call.pop();
                if let Some(&mut (u, _)) = call.last_mut() {
                    low[u] = low[u].min(low[v]);
                }
            }
        }
    }
    comp
}

/// Independent route to the repeating heads, used as a correctness oracle
/// for the head-graph method: (p,γ) repeats iff some rule applied at (p,γ)
/// leads into pre*({(p, γw)}).
pub fn repeating_heads_via_prestar(
    pds: &PushdownSystem,
) -> Result<BTreeSet<(u32, u32)>, PdsError> {
    pds.ensure_normalized()?;
    let mut heads: BTreeSet<(u32, u32)> = BTreeSet::new();
    for r in pds.rules() {
        heads.insert((r.from, r.sym));
    }
    let mut rep = BTreeSet::new();
    for (p, g) in heads {
        let mut target = ConfigAutomaton::new(pds);
        let univ = target.add_aux();
        target.add_edge(p, g, univ);
        for sym in 0..pds.sym_count() as u32 {
            target.add_edge(univ, sym, univ);
        }
        target.mark_final(univ);
        let sat = pre_star(pds, &target)?;
        let mut repeats = false;
        for r in pds.rules() {
            if (r.from, r.sym) == (p, g) && sat.accepts(r.to, &r.push)? {
                repeats = true;
                break;
            }
        }
        if repeats {
            rep.insert((p, g));
        }
    }
    Ok(rep)
}

/// The set of configurations admitting an infinite run: pre* of every
/// configuration whose head is repeating.
pub fn has_infinite_run(pds: &PushdownSystem) -> Result<SaturatedCa, PdsError> {
    let rep = repeating_heads(pds)?;
    let mut target = ConfigAutomaton::new(pds);
    let univ = target.add_aux();
    for (p, g) in &rep {
        target.add_edge(*p, *g, univ);
    }
    for sym in 0..pds.sym_count() as u32 {
        target.add_edge(univ, sym, univ);
    }
    target.mark_final(univ);
    pre_star(pds, &target)
}

/// Accepts exactly the configurations where no rule applies: (p, γw) with no
/// rule triggered by (p,γ), plus every (p, ε) for totality.
pub fn dead_configs(pds: &PushdownSystem) -> ConfigAutomaton {
    dead_configs_excluding(pds, &BTreeSet::new())
}

/// `dead_configs` restricted to controls outside `excluded`: excluded
/// controls are neither final nor given edges, so none of their
/// configurations are accepted.
pub fn dead_configs_excluding(
    pds: &PushdownSystem,
    excluded: &BTreeSet<u32>,
) -> ConfigAutomaton {
    let mut ca = ConfigAutomaton::new(pds);
    let univ = ca.add_aux();
    let triggers: HashSet<(u32, u32)> =
        pds.rules().iter().map(|r| (r.from, r.sym)).collect();
    for p in 0..pds.control_count() as u32 {
        if excluded.contains(&p) {
            continue;
        }
        ca.mark_final(p);
        for g in 0..pds.sym_count() as u32 {
            if !triggers.contains(&(p, g)) {
                ca.add_edge(p, g, univ);
            }
        }
    }
    for g in 0..pds.sym_count() as u32 {
        ca.add_edge(univ, g, univ);
    }
    ca.mark_final(univ);
    ca
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counter system: (p,BOT)->(p,g BOT), (p,g)->(p,g g), (p,g)->(q,ε),
    /// (q,g)->(q,ε); reaches (q, BOT) from every (p, gⁿ BOT).
    fn counter() -> PushdownSystem {
        let mut pds = PushdownSystem::new("counter");
        pds.add_rule_named("p", "BOT", "p", &["g", "BOT"]);
        pds.add_rule_named("p", "g", "p", &["g", "g"]);
        pds.add_rule_named("p", "g", "q", &[]);
        pds.add_rule_named("q", "g", "q", &[]);
        pds
    }

    fn stack(pds: &PushdownSystem, syms: &[&str]) -> Vec<u32> {
        syms.iter().map(|s| pds.sym_id(s).unwrap()).collect()
    }

    #[test]
    fn pre_star_with_no_rules_accepts_exactly_the_target() {
        let mut pds = PushdownSystem::new("inert");
        let p = pds.intern_control("p");
        let q = pds.intern_control("q");
        let g = pds.intern_sym("g");
        let mut target = ConfigAutomaton::new(&pds);
        let aux = target.add_aux();
        target.add_edge(p, g, aux);
        target.mark_final(aux);
        let sat = pre_star(&pds, &target).unwrap();
        assert!(sat.accepts(p, &[g]).unwrap());
        assert!(!sat.accepts(p, &[g, g]).unwrap());
        assert!(!sat.accepts(q, &[g]).unwrap());
        assert!(!sat.accepts(p, &[]).unwrap());
    }

    #[test]
    fn single_pop_rule_adds_one_predecessor() {
        let mut pds = PushdownSystem::new("single");
        let p = pds.intern_control("p");
        let q = pds.intern_control("q");
        let g = pds.intern_sym("g");
        pds.add_rule(p, g, q, &[]);
        // target {(q, ε)}
        let mut target = ConfigAutomaton::new(&pds);
        target.mark_final(q);
        let sat = pre_star(&pds, &target).unwrap();
        assert!(sat.accepts(q, &[]).unwrap());
        assert!(sat.accepts(p, &[g]).unwrap());
        assert!(!sat.accepts(p, &[g, g]).unwrap());
        assert!(!sat.accepts(q, &[g]).unwrap());
    }

    #[test]
    fn counter_system_reaches_bottom() {
        let pds = counter();
        let p = pds.control_id("p").unwrap();
        let q = pds.control_id("q").unwrap();
        let bot = pds.sym_id("BOT").unwrap();
        let mut target = ConfigAutomaton::new(&pds);
        let aux = target.add_aux();
        target.add_edge(q, bot, aux);
        target.mark_final(aux);
        let sat = pre_star(&pds, &target).unwrap();
        for n in 0..=4 {
            let mut w = vec![pds.sym_id("g").unwrap(); n];
            w.push(bot);
            assert!(sat.accepts(p, &w).unwrap(), "(p, g^{n} BOT)");
            assert!(sat.accepts(q, &w).unwrap(), "(q, g^{n} BOT)");
        }
        // a control with no rules only gets in via the target itself
        assert!(!sat.accepts(p, &[bot, bot]).unwrap());
    }

    #[test]
    fn counter_trace_replays_to_target() {
        let pds = counter();
        let p = pds.control_id("p").unwrap();
        let bot = pds.sym_id("BOT").unwrap();
        let g = pds.sym_id("g").unwrap();
        let mut target = ConfigAutomaton::new(&pds);
        let aux = target.add_aux();
        target.add_edge(pds.control_id("q").unwrap(), bot, aux);
        target.mark_final(aux);
        let sat = pre_star(&pds, &target).unwrap();
        let rules = sat.trace(p, &[bot], 1000).unwrap().unwrap();
        // replay the rules and confirm we land on (q, BOT)
        let mut control = p;
        let mut stack = vec![bot];
        for ri in rules {
            let r = &pds.rules()[ri];
            assert_eq!(r.from, control);
            assert_eq!(stack[0], r.sym);
            let mut s2 = r.push.clone();
            s2.extend_from_slice(&stack[1..]);
            control = r.to;
            stack = s2;
        }
        assert_eq!(control, pds.control_id("q").unwrap());
        assert_eq!(stack, vec![bot]);
        // non-members have no trace
        assert_eq!(sat.trace(p, &[bot, g], 1000).unwrap(), None);
    }

    #[test]
    fn pre_star_extensivity_and_one_step_closure_on_counter() {
        let pds = counter();
        let g = pds.sym_id("g").unwrap();
        let bot = pds.sym_id("BOT").unwrap();
        let q = pds.control_id("q").unwrap();
        let mut target = ConfigAutomaton::new(&pds);
        let aux = target.add_aux();
        target.add_edge(q, bot, aux);
        target.mark_final(aux);
        let sat = pre_star(&pds, &target).unwrap();
        // extensivity
        assert!(sat.accepts(q, &[bot]).unwrap());
        // one-step closure on words up to length 4
        let words = short_words(&[g, bot], 4);
        for r in pds.rules() {
            for w in &words {
                let mut pushed = r.push.clone();
                pushed.extend_from_slice(w);
                if sat.accepts(r.to, &pushed).unwrap() {
                    let mut trig = vec![r.sym];
                    trig.extend_from_slice(w);
                    assert!(sat.accepts(r.from, &trig).unwrap());
                }
            }
        }
    }

    /// A saturated automaton is not a valid pre_star target (pop rules give
    /// it edges into controls), so idempotence is stated on the accepted
    /// set: rebuild a fresh automaton for the bounded slice of the result
    /// and saturate again.
    #[test]
    fn pre_star_idempotence_on_counter() {
        let pds = counter();
        let g = pds.sym_id("g").unwrap();
        let bot = pds.sym_id("BOT").unwrap();
        let q = pds.control_id("q").unwrap();
        let mut target = ConfigAutomaton::new(&pds);
        let aux = target.add_aux();
        target.add_edge(q, bot, aux);
        target.mark_final(aux);
        let once = pre_star(&pds, &target).unwrap();

        let mut slice: Vec<(u32, Vec<u32>)> = Vec::new();
        for c in 0..pds.control_count() as u32 {
            for w in short_words(&[g, bot], 6) {
                if once.accepts(c, &w).unwrap() {
                    slice.push((c, w));
                }
            }
        }
        let rebuilt = trie_ca(&pds, &slice);
        let twice = pre_star(&pds, &rebuilt).unwrap();
        for c in 0..pds.control_count() as u32 {
            for w in short_words(&[g, bot], 6) {
                assert_eq!(
                    once.accepts(c, &w).unwrap(),
                    twice.accepts(c, &w).unwrap(),
                    "control {c}, word {w:?}"
                );
            }
        }
    }

    /// A well-formed automaton accepting exactly the given configurations:
    /// one fresh branch per word, no sharing, no edges into controls.
    fn trie_ca(pds: &PushdownSystem, configs: &[(u32, Vec<u32>)]) -> ConfigAutomaton {
        let mut ca = ConfigAutomaton::new(pds);
        for (c, w) in configs {
            if w.is_empty() {
                ca.mark_final(*c);
                continue;
            }
            let mut cur = *c;
            for (i, sym) in w.iter().enumerate() {
                let next = ca.add_aux();
                ca.add_edge(cur, *sym, next);
                if i == w.len() - 1 {
                    ca.mark_final(next);
                }
                cur = next;
            }
        }
        ca
    }

    fn short_words(syms: &[u32], max_len: usize) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for s in syms {
                    let mut w2 = w.clone();
                    w2.push(*s);
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn config_acceptance_boundaries() {
        let mut pds = PushdownSystem::new("plain");
        let p = pds.intern_control("p");
        let q = pds.intern_control("q");
        let g = pds.intern_sym("g");
        let d = pds.intern_sym("d");
        // an automaton with no edges and no finals accepts nothing
        let empty = ConfigAutomaton::new(&pds);
        assert!(!empty.accepts(p, &[]).unwrap());
        assert!(!empty.accepts(q, &[g, d]).unwrap());
        // (q, anything): final q plus a universal loop state
        let mut univ = ConfigAutomaton::new(&pds);
        let u = univ.add_aux();
        univ.mark_final(q);
        univ.mark_final(u);
        for sym in [g, d] {
            univ.add_edge(q, sym, u);
            univ.add_edge(u, sym, u);
        }
        assert!(univ.accepts(q, &[]).unwrap());
        assert!(univ.accepts(q, &[d, g, g]).unwrap());
        assert!(!univ.accepts(p, &[g]).unwrap());
        // querying a non-control state id is an error
        assert_eq!(
            univ.accepts(99, &[g]).unwrap_err(),
            PdsError::UnknownControl { id: 99 }
        );
    }

    #[test]
    fn malformed_target_is_rejected() {
        let mut pds = PushdownSystem::new("bad");
        let p = pds.intern_control("p");
        let g = pds.intern_sym("g");
        let mut target = ConfigAutomaton::new(&pds);
        target.add_edge(p, g, p);
        assert_eq!(
            pre_star(&pds, &target).unwrap_err(),
            PdsError::EdgeIntoControl { state: "p".to_string() }
        );
    }

    #[test]
    fn normalize_splits_long_replacements() {
        let mut pds = PushdownSystem::new("long");
        pds.add_rule_named("p", "a", "q", &["x", "y", "z"]);
        let (norm, origins) = normalize(&pds);
        assert!(norm.is_normalized());
        assert_eq!(norm.rule_count(), 2);
        assert_eq!(norm.control_count(), 3); // p, q, one fresh state
        assert_eq!(origins[0], RuleOrigin { source: 0, leading: true });
        assert_eq!(origins[1], RuleOrigin { source: 0, leading: false });

        // already-normalized systems come back rule-for-rule
        let c = counter();
        let (n, o) = normalize(&c);
        assert_eq!(n.rule_count(), c.rule_count());
        assert!(o.iter().all(|x| x.leading));
    }

    #[test]
    fn normalize_preserves_bounded_reachability() {
        let mut pds = PushdownSystem::new("long");
        pds.add_rule_named("p", "a", "q", &["x", "y", "z", "a"]);
        pds.add_rule_named("q", "x", "q", &[]);
        pds.add_rule_named("q", "y", "p", &["y"]);
        let (norm, _) = normalize(&pds);
        let p = pds.control_id("p").unwrap();
        let q = pds.control_id("q").unwrap();
        let a = pds.sym_id("a").unwrap();
        let x = pds.sym_id("x").unwrap();
        let y = pds.sym_id("y").unwrap();
        let z = pds.sym_id("z").unwrap();
        // target {(p, y z a)}: path p -y-> aux0 -z-> aux1 -a-> aux2(final)
        let mut target = ConfigAutomaton::new(&norm);
        let aux0 = target.add_aux();
        let aux1 = target.add_aux();
        let aux2 = target.add_aux();
        target.add_edge(p, y, aux0);
        target.add_edge(aux0, z, aux1);
        target.add_edge(aux1, a, aux2);
        target.mark_final(aux2);
        let sat = pre_star(&norm, &target).unwrap();
        // (p, a) => (q, x y z a) => (q, y z a) => (p, y z a): member
        assert!(sat.accepts(p, &[a]).unwrap());
        assert!(sat.accepts(q, &[x, y, z, a]).unwrap());
        assert!(sat.accepts(q, &[y, z, a]).unwrap());
        assert!(!sat.accepts(q, &[a]).unwrap());
    }

    #[test]
    fn repeating_heads_examples() {
        // single self-push
        let mut pds = PushdownSystem::new("grow");
        pds.add_rule_named("p", "g", "p", &["g", "g"]);
        let p = pds.control_id("p").unwrap();
        let g = pds.sym_id("g").unwrap();
        assert_eq!(repeating_heads(&pds).unwrap(), BTreeSet::from([(p, g)]));

        // pop-only: nothing repeats
        let mut pds = PushdownSystem::new("shrink");
        pds.add_rule_named("p", "g", "p", &[]);
        assert!(repeating_heads(&pds).unwrap().is_empty());

        // two-rule rewrite cycle
        let mut pds = PushdownSystem::new("cycle");
        pds.add_rule_named("p", "g", "q", &["g"]);
        pds.add_rule_named("q", "g", "p", &["g"]);
        let p = pds.control_id("p").unwrap();
        let q = pds.control_id("q").unwrap();
        let g = pds.sym_id("g").unwrap();
        assert_eq!(
            repeating_heads(&pds).unwrap(),
            BTreeSet::from([(p, g), (q, g)])
        );
    }

    #[test]
    fn repeating_heads_needs_the_pop_composition() {
        // (p,a) -> (q, b a): head repeats only because b can be consumed:
        // (q,b) -> (p, ε) ... then (p, a ...) again
        let mut pds = PushdownSystem::new("updown");
        pds.add_rule_named("p", "a", "q", &["b", "a"]);
        pds.add_rule_named("q", "b", "p", &[]);
        let p = pds.control_id("p").unwrap();
        let a = pds.sym_id("a").unwrap();
        let rep = repeating_heads(&pds).unwrap();
        assert!(rep.contains(&(p, a)), "rep = {rep:?}");
        // and agrees with the pre*-based route
        assert_eq!(rep, repeating_heads_via_prestar(&pds).unwrap());
    }

    #[test]
    fn head_graph_and_prestar_routes_agree_on_counter() {
        let pds = counter();
        assert_eq!(
            repeating_heads(&pds).unwrap(),
            repeating_heads_via_prestar(&pds).unwrap()
        );
    }

    #[test]
    fn infinite_run_examples() {
        // growing stack: (p, g BOT) runs forever
        let mut pds = PushdownSystem::new("grow");
        pds.add_rule_named("p", "g", "p", &["g", "g"]);
        let p = pds.control_id("p").unwrap();
        let g = pds.sym_id("g").unwrap();
        let bot = pds.intern_sym("BOT");
        let inf = has_infinite_run(&pds).unwrap();
        assert!(inf.accepts(p, &[g, bot]).unwrap());
        assert!(!inf.accepts(p, &[bot]).unwrap());

        // pop-only: no infinite runs anywhere
        let mut pds = PushdownSystem::new("shrink");
        pds.add_rule_named("p", "g", "p", &[]);
        let p = pds.control_id("p").unwrap();
        let g = pds.sym_id("g").unwrap();
        let inf = has_infinite_run(&pds).unwrap();
        assert!(!inf.accepts(p, &[g, g, g]).unwrap());

        // counter without the exit: (p, BOT) loops forever; with only the
        // draining rules, (q, g g BOT) halts after two steps
        let mut pds = PushdownSystem::new("counter_noexit");
        pds.add_rule_named("p", "BOT", "p", &["g", "BOT"]);
        pds.add_rule_named("p", "g", "p", &["g", "g"]);
        pds.add_rule_named("q", "g", "q", &[]);
        let p = pds.control_id("p").unwrap();
        let q = pds.control_id("q").unwrap();
        let g = pds.sym_id("g").unwrap();
        let bot = pds.sym_id("BOT").unwrap();
        let inf = has_infinite_run(&pds).unwrap();
        assert!(inf.accepts(p, &[bot]).unwrap());
        assert!(!inf.accepts(q, &[g, g, bot]).unwrap());
    }

    #[test]
    fn dead_config_examples() {
        let mut pds = PushdownSystem::new("partial");
        pds.add_rule_named("p", "g", "p", &["g"]);
        let p = pds.control_id("p").unwrap();
        let g = pds.sym_id("g").unwrap();
        let d = pds.intern_sym("d");
        let bot = pds.intern_sym("BOT");
        let dead = dead_configs(&pds);
        assert!(dead.accepts(p, &[d, bot]).unwrap());
        assert!(!dead.accepts(p, &[g, bot]).unwrap());
        assert!(dead.accepts(p, &[]).unwrap());

        // empty rule set: everything is dead
        let mut pds = PushdownSystem::new("empty");
        let p = pds.intern_control("p");
        let g = pds.intern_sym("g");
        let dead = dead_configs(&pds);
        assert!(dead.accepts(p, &[]).unwrap());
        assert!(dead.accepts(p, &[g, g]).unwrap());

        // exclusion removes a control entirely
        let mut pds = PushdownSystem::new("anyrules");
        let p = pds.intern_control("p");
        let b = pds.intern_control("bad");
        let g = pds.intern_sym("g");
        let dead = dead_configs_excluding(&pds, &BTreeSet::from([b]));
        assert!(dead.accepts(p, &[g]).unwrap());
        assert!(!dead.accepts(b, &[g]).unwrap());
        assert!(!dead.accepts(b, &[]).unwrap());
    }

    #[test]
    fn dump_is_sorted_and_stable() {
        let pds = counter();
        let q = pds.control_id("q").unwrap();
        let bot = pds.sym_id("BOT").unwrap();
        let mut target = ConfigAutomaton::new(&pds);
        let aux = target.add_aux();
        target.add_edge(q, bot, aux);
        target.mark_final(aux);
        let a = pre_star(&pds, &target).unwrap().ca().dump();
        let b = pre_star(&pds, &target).unwrap().ca().dump();
        assert_eq!(a, b);
        assert!(a.starts_with("final aux:0\n"));
        assert!(a.ends_with("\n"));
    }

    #[test]
    fn unnormalized_rules_are_refused() {
        let mut pds = PushdownSystem::new("wide");
        pds.add_rule_named("p", "a", "q", &["x", "y", "z"]);
        let target = ConfigAutomaton::new(&pds);
        assert!(matches!(
            pre_star(&pds, &target),
            Err(PdsError::NotNormalized { .. })
        ));
    }
}
