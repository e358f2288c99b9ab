//! Visibly pushdown automata. The alphabet is partitioned into call, return
//! and internal letters; calls always push one symbol, returns pop one (or
//! leave the bottom marker in place), internals ignore the stack. This
//! discipline makes the class closed under determinization: the subset
//! construction tracks summary pairs (state before the last pending call,
//! state now) so matched call/return segments compose.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::AutomatonError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LetterClass {
    Call,
    Return,
    Internal,
}

#[derive(Debug, Clone)]
pub struct VpaAutomaton {
    name: String,
    deterministic: bool,
    complete: bool,
    states: Vec<String>,
    state_ids: HashMap<String, u32>,
    letters: Vec<(String, LetterClass)>,
    letter_ids: HashMap<String, u32>,
    stack_syms: Vec<String>,
    sym_ids: HashMap<String, u32>,
    bottom: Option<u32>,
    // (from, call letter, pushed symbol, to)
    call_rules: Vec<(u32, u32, u32, u32)>,
    // (from, return letter, popped symbol or bottom, to)
    return_rules: Vec<(u32, u32, u32, u32)>,
    // (from, internal letter, to)
    internal_rules: Vec<(u32, u32, u32)>,
    initial: Option<u32>,
    finals: BTreeSet<u32>,
}

impl VpaAutomaton {
    pub fn new(name: &str, deterministic: bool) -> VpaAutomaton {
        VpaAutomaton {
            name: name.to_string(),
            deterministic,
            complete: false,
            states: Vec::new(),
            state_ids: HashMap::new(),
            letters: Vec::new(),
            letter_ids: HashMap::new(),
            stack_syms: Vec::new(),
            sym_ids: HashMap::new(),
            bottom: None,
            call_rules: Vec::new(),
            return_rules: Vec::new(),
            internal_rules: Vec::new(),
            initial: None,
            finals: BTreeSet::new(),
        }
    }

    fn invalid(&self, msg: impl Into<String>) -> AutomatonError {
        AutomatonError::Invalid { name: self.name.clone(), msg: msg.into() }
    }

    pub fn add_state(&mut self, name: &str) -> Result<u32, AutomatonError> {
        if self.state_ids.contains_key(name) {
            return Err(self.invalid(format!("duplicate state `{name}`")));
        }
        let id = self.states.len() as u32;
        self.states.push(name.to_string());
        self.state_ids.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_letter(&mut self, name: &str, class: LetterClass) -> Result<u32, AutomatonError> {
        if self.letter_ids.contains_key(name) {
            return Err(self.invalid(format!("duplicate letter `{name}`")));
        }
        let id = self.letters.len() as u32;
        self.letters.push((name.to_string(), class));
        self.letter_ids.insert(name.to_string(), id);
        Ok(id)
    }

    /// Declares a stack symbol; the first one registered via `set_bottom`
    /// becomes the bottom marker, which return rules may test but never pop.
    pub fn add_stack_sym(&mut self, name: &str) -> Result<u32, AutomatonError> {
        if self.sym_ids.contains_key(name) {
            return Err(self.invalid(format!("duplicate stack symbol `{name}`")));
        }
        let id = self.stack_syms.len() as u32;
        self.stack_syms.push(name.to_string());
        self.sym_ids.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn set_bottom(&mut self, name: &str) -> Result<(), AutomatonError> {
        let id = self.sym_id(name)?;
        self.bottom = Some(id);
        Ok(())
    }

    pub fn set_initial(&mut self, name: &str) -> Result<(), AutomatonError> {
        self.initial = Some(self.state_id(name)?);
        Ok(())
    }

    pub fn add_final(&mut self, name: &str) -> Result<(), AutomatonError> {
        let id = self.state_id(name)?;
        self.finals.insert(id);
        Ok(())
    }

    pub fn add_call_rule(
        &mut self,
        from: &str,
        letter: &str,
        push: &str,
        to: &str,
    ) -> Result<(), AutomatonError> {
        let rule = (self.state_id(from)?, self.letter_id(letter)?, self.sym_id(push)?, self.state_id(to)?);
        if self.letters[rule.1 as usize].1 != LetterClass::Call {
            return Err(self.invalid(format!("`{letter}` is not a call letter")));
        }
        if !self.call_rules.contains(&rule) {
            self.call_rules.push(rule);
        }
        Ok(())
    }

    pub fn add_return_rule(
        &mut self,
        from: &str,
        letter: &str,
        top: &str,
        to: &str,
    ) -> Result<(), AutomatonError> {
        let rule = (self.state_id(from)?, self.letter_id(letter)?, self.sym_id(top)?, self.state_id(to)?);
        if self.letters[rule.1 as usize].1 != LetterClass::Return {
            return Err(self.invalid(format!("`{letter}` is not a return letter")));
        }
        if !self.return_rules.contains(&rule) {
            self.return_rules.push(rule);
        }
        Ok(())
    }

    pub fn add_internal_rule(
        &mut self,
        from: &str,
        letter: &str,
        to: &str,
    ) -> Result<(), AutomatonError> {
        let rule = (self.state_id(from)?, self.letter_id(letter)?, self.state_id(to)?);
        if self.letters[rule.1 as usize].1 != LetterClass::Internal {
            return Err(self.invalid(format!("`{letter}` is not an internal letter")));
        }
        if !self.internal_rules.contains(&rule) {
            self.internal_rules.push(rule);
        }
        Ok(())
    }

    pub fn state_id(&self, name: &str) -> Result<u32, AutomatonError> {
        self.state_ids
            .get(name)
            .copied()
            .ok_or_else(|| self.invalid(format!("unknown state `{name}`")))
    }

    pub fn letter_id(&self, name: &str) -> Result<u32, AutomatonError> {
        self.letter_ids.get(name).copied().ok_or_else(|| AutomatonError::UnknownLetter {
            name: self.name.clone(),
            letter: name.to_string(),
        })
    }

    pub fn sym_id(&self, name: &str) -> Result<u32, AutomatonError> {
        self.sym_ids
            .get(name)
            .copied()
            .ok_or_else(|| self.invalid(format!("unknown stack symbol `{name}`")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn deterministic(&self) -> bool {
        self.deterministic
    }

    /// Drops the determinism claim without touching the rules; the language
    /// is unchanged, only the advertised kind weakens.
    pub fn forget_determinism(&mut self) {
        self.deterministic = false;
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn letters(&self) -> &[(String, LetterClass)] {
        &self.letters
    }

    pub fn letter_class(&self, letter: u32) -> LetterClass {
        self.letters[letter as usize].1
    }

    pub fn stack_syms(&self) -> &[String] {
        &self.stack_syms
    }

    pub fn bottom(&self) -> Option<u32> {
        self.bottom
    }

    pub fn initial(&self) -> Option<u32> {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<u32> {
        &self.finals
    }

    pub fn call_rules(&self) -> &[(u32, u32, u32, u32)] {
        &self.call_rules
    }

    pub fn return_rules(&self) -> &[(u32, u32, u32, u32)] {
        &self.return_rules
    }

    pub fn internal_rules(&self) -> &[(u32, u32, u32)] {
        &self.internal_rules
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn rule_count(&self) -> usize {
        self.call_rules.len() + self.return_rules.len() + self.internal_rules.len()
    }

    /// Checks structural invariants: a bottom marker exists, calls never push
    /// it, and (for the deterministic kind) no two rules share a trigger.
    /// Refreshes the `complete` flag.
    pub fn validate(&mut self) -> Result<(), AutomatonError> {
        if self.initial.is_none() {
            return Err(self.invalid("no initial state"));
        }
        let bottom = self.bottom.ok_or_else(|| self.invalid("no bottom stack symbol"))?;
        for (_, _, push, _) in &self.call_rules {
            if *push == bottom {
                return Err(self.invalid(format!(
                    "call rule pushes the bottom marker `{}`",
                    self.stack_syms[bottom as usize]
                )));
            }
        }
        if self.deterministic {
            let mut calls = BTreeSet::new();
            for (f, l, _, _) in &self.call_rules {
                if !calls.insert((*f, *l)) {
                    return Err(self.invalid(format!(
                        "two call rules for ({}, {})",
                        self.states[*f as usize], self.letters[*l as usize].0
                    )));
                }
            }
            let mut rets = BTreeSet::new();
            for (f, l, g, _) in &self.return_rules {
                if !rets.insert((*f, *l, *g)) {
                    return Err(self.invalid(format!(
                        "two return rules for ({}, {}, {})",
                        self.states[*f as usize],
                        self.letters[*l as usize].0,
                        self.stack_syms[*g as usize]
                    )));
                }
            }
            let mut ints = BTreeSet::new();
            for (f, l, _) in &self.internal_rules {
                if !ints.insert((*f, *l)) {
                    return Err(self.invalid(format!(
                        "two internal rules for ({}, {})",
                        self.states[*f as usize], self.letters[*l as usize].0
                    )));
                }
            }
        }
        self.complete = self.compute_complete();
        Ok(())
    }

    fn compute_complete(&self) -> bool {
        let Some(bottom) = self.bottom else { return false };
        let calls: BTreeSet<(u32, u32)> =
            self.call_rules.iter().map(|(f, l, _, _)| (*f, *l)).collect();
        let rets: BTreeSet<(u32, u32, u32)> =
            self.return_rules.iter().map(|(f, l, g, _)| (*f, *l, *g)).collect();
        let ints: BTreeSet<(u32, u32)> =
            self.internal_rules.iter().map(|(f, l, _)| (*f, *l)).collect();
        for q in 0..self.states.len() as u32 {
            for (l, (_, class)) in self.letters.iter().enumerate() {
                let l = l as u32;
                let ok = match class {
                    LetterClass::Call => calls.contains(&(q, l)),
                    LetterClass::Internal => ints.contains(&(q, l)),
                    LetterClass::Return => {
                        rets.contains(&(q, l, bottom))
                            && (0..self.stack_syms.len() as u32)
                                .all(|g| g == bottom || rets.contains(&(q, l, g)))
                    }
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Runs the automaton on a word of letter names; nondeterminism is
    /// resolved by tracking the full set of (state, stack) configurations.
    pub fn accepts(&self, word: &[&str]) -> Result<bool, AutomatonError> {
        let initial = self.initial.ok_or_else(|| self.invalid("no initial state"))?;
        let bottom = self.bottom.ok_or_else(|| self.invalid("no bottom stack symbol"))?;
        // stacks are top-first
        let mut configs: BTreeSet<(u32, Vec<u32>)> = BTreeSet::from([(initial, vec![bottom])]);
        for w in word {
            let l = self.letter_id(w)?;
            let class = self.letters[l as usize].1;
            let mut next = BTreeSet::new();
            for (q, stack) in &configs {
                match class {
                    LetterClass::Call => {
                        for (f, ll, push, t) in &self.call_rules {
                            if *f == *q && *ll == l {
                                let mut s2 = Vec::with_capacity(stack.len() + 1);
                                s2.push(*push);
                                s2.extend_from_slice(stack);
                                next.insert((*t, s2));
                            }
                        }
                    }
                    LetterClass::Internal => {
                        for (f, ll, t) in &self.internal_rules {
                            if *f == *q && *ll == l {
                                next.insert((*t, stack.clone()));
                            }
                        }
                    }
                    LetterClass::Return => {
                        let top = stack[0];
                        for (f, ll, g, t) in &self.return_rules {
                            if *f == *q && *ll == l && *g == top {
                                let s2 = if top == bottom {
                                    stack.clone()
                                } else {
                                    stack[1..].to_vec()
                                };
                                next.insert((*t, s2));
                            }
                        }
                    }
                }
            }
            configs = next;
            if configs.is_empty() {
                return Ok(false);
            }
        }
        Ok(configs.iter().any(|(q, _)| self.finals.contains(q)))
    }

    /// Determinizes via the summary construction. A derived state is a pair
    /// (S, R): R is the set of states reachable on the input so far, and S is
    /// the set of pairs (q, q') such that the automaton can go from q to q'
    /// reading the suffix since the last unmatched call. Pushed symbols are
    /// (S, R, call letter) snapshots, so a return can compose the summary
    /// across the matched segment. The result is deterministic and complete
    /// by construction. Errors if more than `cap` derived states appear.
    pub fn determinize(&self, cap: usize) -> Result<VpaAutomaton, AutomatonError> {
        type Summary = (BTreeSet<(u32, u32)>, BTreeSet<u32>);
        let initial = self.initial.ok_or_else(|| self.invalid("no initial state"))?;
        let bottom = self.bottom.ok_or_else(|| self.invalid("no bottom stack symbol"))?;

        let mut out = VpaAutomaton::new(&format!("{}_det", self.name), true);
        for (l, class) in &self.letters {
            out.add_letter(l, *class)?;
        }
        let bottom_name = self.stack_syms[bottom as usize].clone();
        out.add_stack_sym(&bottom_name)?;
        out.set_bottom(&bottom_name)?;

        let all_states: BTreeSet<u32> = (0..self.states.len() as u32).collect();
        let id_all: BTreeSet<(u32, u32)> = all_states.iter().map(|q| (*q, *q)).collect();

        let mut dstates: Vec<Summary> = Vec::new();
        let mut dstate_ids: HashMap<Summary, u32> = HashMap::new();
        // pushed symbols: (source summary state, call letter)
        let mut dsyms: Vec<(u32, u32)> = Vec::new();
        let mut dsym_ids: HashMap<(u32, u32), u32> = HashMap::new();

        fn intern_state(
            s: Summary,
            this: &VpaAutomaton,
            out: &mut VpaAutomaton,
            dstates: &mut Vec<Summary>,
            dstate_ids: &mut HashMap<Summary, u32>,
            queue: &mut VecDeque<u32>,
            cap: usize,
        ) -> Result<u32, AutomatonError> {
            if let Some(id) = dstate_ids.get(&s) {
                return Ok(*id);
            }
            if dstates.len() >= cap {
                return Err(AutomatonError::CapExceeded { name: this.name.clone(), cap });
            }
            let name = format!("d{}", dstates.len());
            let id = out.add_state(&name)?;
            if s.1.iter().any(|q| this.finals.contains(q)) {
                out.finals.insert(id);
            }
            dstates.push(s.clone());
            dstate_ids.insert(s, id);
            queue.push_back(id);
            Ok(id)
        }

        let mut queue: VecDeque<u32> = VecDeque::new();
        let start: Summary = (id_all.clone(), BTreeSet::from([initial]));
        let start_id = intern_state(
            start,
            self,
            &mut out,
            &mut dstates,
            &mut dstate_ids,
            &mut queue,
            cap,
        )?;
        out.initial = Some(start_id);

        // call targets per letter, independent of the source state: the
        // summary after a call restarts as the identity on these targets
        let mut call_targets: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for (_, l, _, t) in &self.call_rules {
            call_targets.entry(*l).or_default().insert(*t);
        }

        // (derived state, derived symbol) pairs whose return rules exist
        let mut ret_done: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut processed: Vec<u32> = Vec::new();

        while let Some(id) = queue.pop_front() {
            processed.push(id);
            let (s_cur, r_cur) = dstates[id as usize].clone();
            for (lidx, (_, class)) in self.letters.iter().enumerate() {
                let l = lidx as u32;
                match class {
                    LetterClass::Internal => {
                        let next = self.summary_step_internal(&s_cur, &r_cur, l);
                        let nid = intern_state(
                            next,
                            self,
                            &mut out,
                            &mut dstates,
                            &mut dstate_ids,
                            &mut queue,
                            cap,
                        )?;
                        out.internal_rules.push((id, l, nid));
                    }
                    LetterClass::Call => {
                        let key = (id, l);
                        let sym = match dsym_ids.get(&key) {
                            Some(s) => *s,
                            None => {
                                let name = format!("g{}", dsyms.len());
                                let s = out.add_stack_sym(&name)?;
                                dsyms.push(key);
                                dsym_ids.insert(key, s);
                                // returns popping the new symbol, for every
                                // already-processed derived state
                                for src in processed.clone() {
                                    self.emit_returns_for(
                                        src,
                                        s,
                                        &dsyms.clone(),
                                        bottom,
                                        &mut out,
                                        &mut dstates,
                                        &mut dstate_ids,
                                        &mut queue,
                                        &mut ret_done,
                                        cap,
                                    )?;
                                }
                                s
                            }
                        };
                        let targets =
                            call_targets.get(&l).cloned().unwrap_or_default();
                        let next: Summary =
                            (targets.iter().map(|q| (*q, *q)).collect(), {
                                let mut r2 = BTreeSet::new();
                                for (f, ll, _, t) in &self.call_rules {
                                    if *ll == l && r_cur.contains(f) {
                                        r2.insert(*t);
                                    }
                                }
                                r2
                            });
                        let nid = intern_state(
                            next,
                            self,
                            &mut out,
                            &mut dstates,
                            &mut dstate_ids,
                            &mut queue,
                            cap,
                        )?;
                        out.call_rules.push((id, l, sym, nid));
                    }
                    LetterClass::Return => {}
                }
            }
            // return rules for this state against every known symbol and the
            // bottom marker
            for sym in 0..out.stack_syms.len() as u32 {
                self.emit_returns_for(
                    id,
                    sym,
                    &dsyms.clone(),
                    bottom,
                    &mut out,
                    &mut dstates,
                    &mut dstate_ids,
                    &mut queue,
                    &mut ret_done,
                    cap,
                )?;
            }
        }

        out.deterministic = true;
        out.validate()?;
        debug_assert!(out.complete, "summary construction must be complete");
        Ok(out)
    }

    fn summary_step_internal(
        &self,
        s: &BTreeSet<(u32, u32)>,
        r: &BTreeSet<u32>,
        l: u32,
    ) -> (BTreeSet<(u32, u32)>, BTreeSet<u32>) {
        let mut s2 = BTreeSet::new();
        let mut r2 = BTreeSet::new();
        for (f, ll, t) in &self.internal_rules {
            if *ll != l {
                continue;
            }
            for (q, q2) in s {
                if q2 == f {
                    s2.insert((*q, *t));
                }
            }
            if r.contains(f) {
                r2.insert(*t);
            }
        }
        (s2, r2)
    }

    fn summary_step_return_bottom(
        &self,
        s: &BTreeSet<(u32, u32)>,
        r: &BTreeSet<u32>,
        l: u32,
        bottom: u32,
    ) -> (BTreeSet<(u32, u32)>, BTreeSet<u32>) {
        let mut s2 = BTreeSet::new();
        let mut r2 = BTreeSet::new();
        for (f, ll, g, t) in &self.return_rules {
            if *ll != l || *g != bottom {
                continue;
            }
            for (q, q2) in s {
                if q2 == f {
                    s2.insert((*q, *t));
                }
            }
            if r.contains(f) {
                r2.insert(*t);
            }
        }
        (s2, r2)
    }

    #[allow(clippy::too_many_arguments)]
    fn emit_returns_for(
        &self,
        src: u32,
        sym: u32,
        dsyms: &[(u32, u32)],
        bottom: u32,
        out: &mut VpaAutomaton,
        dstates: &mut Vec<(BTreeSet<(u32, u32)>, BTreeSet<u32>)>,
        dstate_ids: &mut HashMap<(BTreeSet<(u32, u32)>, BTreeSet<u32>), u32>,
        queue: &mut VecDeque<u32>,
        ret_done: &mut BTreeSet<(u32, u32)>,
        cap: usize,
    ) -> Result<(), AutomatonError> {
        if !ret_done.insert((src, sym)) {
            return Ok(());
        }
        let (s_cur, r_cur) = dstates[src as usize].clone();
        for (lidx, (_, class)) in self.letters.iter().enumerate() {
            if *class != LetterClass::Return {
                continue;
            }
            let l = lidx as u32;
            let next = if sym == 0 {
                // symbol 0 is always the bottom marker in the output
                self.summary_step_return_bottom(&s_cur, &r_cur, l, bottom)
            } else {
                // popped symbol encodes (state before the call, call letter)
                let (below_id, call_l) = dsyms[(sym - 1) as usize];
                let (s_below, r_below) = dstates[below_id as usize].clone();
                let mut s2 = BTreeSet::new();
                let mut r2 = BTreeSet::new();
                for (cf, cl, cg, ct) in &self.call_rules {
                    if *cl != call_l {
                        continue;
                    }
                    for (rf, rl, rg, rt) in &self.return_rules {
                        if *rl != l || rg != cg {
                            continue;
                        }
                        // q --(summary below)--> cf --call--> ct
                        //   --(summary inside: s_cur)--> rf --return--> rt
                        if !s_cur.iter().any(|(a, b)| a == ct && b == rf) {
                            continue;
                        }
                        for (q, q2) in &s_below {
                            if q2 == cf {
                                s2.insert((*q, *rt));
                            }
                        }
                        if r_below.contains(cf) {
                            r2.insert(*rt);
                        }
                    }
                }
                (s2, r2)
            };
            let nid = {
                if let Some(id) = dstate_ids.get(&next) {
                    *id
                } else {
                    if dstates.len() >= cap {
                        return Err(AutomatonError::CapExceeded {
                            name: self.name.clone(),
                            cap,
                        });
                    }
                    let name = format!("d{}", dstates.len());
                    let id = out.add_state(&name)?;
                    if next.1.iter().any(|q| self.finals.contains(q)) {
                        out.finals.insert(id);
                    }
                    dstates.push(next.clone());
                    dstate_ids.insert(next, id);
                    queue.push_back(id);
                    id
                }
            };
            out.return_rules.push((src, l, sym, nid));
        }
        Ok(())
    }

    /// Adds a non-final sink and routes every missing trigger to it; sink
    /// calls push a dedicated sink symbol so the visible discipline is kept.
    /// Requires the deterministic kind.
    pub fn complete(&self) -> Result<VpaAutomaton, AutomatonError> {
        if !self.deterministic {
            return Err(AutomatonError::KindMismatch {
                name: self.name.clone(),
                op: "complete",
                req: "a deterministic automaton (dvpa)",
            });
        }
        let mut out = self.clone();
        out.name = format!("{}_total", self.name);
        out.validate()?;
        if out.complete {
            return Ok(out);
        }
        let bottom = out.bottom.unwrap();
        let mut sink_name = "__sink".to_string();
        while out.state_ids.contains_key(&sink_name) {
            sink_name.push('_');
        }
        let sink = out.add_state(&sink_name)?;
        let has_calls =
            out.letters.iter().any(|(_, c)| *c == LetterClass::Call);
        let sink_sym = if has_calls {
            let mut n = "__sinkg".to_string();
            while out.sym_ids.contains_key(&n) {
                n.push('_');
            }
            Some(out.add_stack_sym(&n)?)
        } else {
            None
        };
        let calls: BTreeSet<(u32, u32)> =
            out.call_rules.iter().map(|(f, l, _, _)| (*f, *l)).collect();
        let rets: BTreeSet<(u32, u32, u32)> =
            out.return_rules.iter().map(|(f, l, g, _)| (*f, *l, *g)).collect();
        let ints: BTreeSet<(u32, u32)> =
            out.internal_rules.iter().map(|(f, l, _)| (*f, *l)).collect();
        for q in 0..out.states.len() as u32 {
            for (lidx, (_, class)) in out.letters.clone().iter().enumerate() {
                let l = lidx as u32;
                match class {
                    LetterClass::Call => {
                        if !calls.contains(&(q, l)) {
                            out.call_rules.push((q, l, sink_sym.unwrap(), sink));
                        }
                    }
                    LetterClass::Internal => {
                        if !ints.contains(&(q, l)) {
                            out.internal_rules.push((q, l, sink));
                        }
                    }
                    LetterClass::Return => {
                        for g in 0..out.stack_syms.len() as u32 {
                            if !rets.contains(&(q, l, g)) {
                                out.return_rules.push((q, l, g, sink));
                            }
                        }
                    }
                }
            }
        }
        let _ = bottom;
        out.complete = true;
        Ok(out)
    }

    /// Flips final states; requires a complete deterministic automaton.
    pub fn complement(&self) -> Result<VpaAutomaton, AutomatonError> {
        if !self.deterministic || !self.compute_complete() {
            return Err(AutomatonError::KindMismatch {
                name: self.name.clone(),
                op: "complement",
                req: "a complete dvpa",
            });
        }
        let mut out = self.clone();
        out.name = format!("{}_not", self.name);
        out.finals = (0..out.states.len() as u32).filter(|q| !self.finals.contains(q)).collect();
        out.complete = true;
        Ok(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Deterministic matcher for well-balanced p/c sequences with r noise:
    /// accepts exactly the prefixes where every p has been matched by a c.
    pub(crate) fn balanced() -> VpaAutomaton {
        let mut v = VpaAutomaton::new("nbu", true);
        v.add_letter("p", LetterClass::Call).unwrap();
        v.add_letter("c", LetterClass::Return).unwrap();
        v.add_letter("r", LetterClass::Internal).unwrap();
        v.add_stack_sym("Z").unwrap();
        v.add_stack_sym("G0").unwrap();
        v.add_stack_sym("G").unwrap();
        v.set_bottom("Z").unwrap();
        v.add_state("e").unwrap();
        v.add_state("n").unwrap();
        v.set_initial("e").unwrap();
        v.add_final("e").unwrap();
        v.add_call_rule("e", "p", "G0", "n").unwrap();
        v.add_call_rule("n", "p", "G", "n").unwrap();
        v.add_return_rule("n", "c", "G0", "e").unwrap();
        v.add_return_rule("n", "c", "G", "n").unwrap();
        v.add_internal_rule("e", "r", "e").unwrap();
        v.add_internal_rule("n", "r", "n").unwrap();
        v.validate().unwrap();
        v
    }

    /// Nondeterministic: accepts words over call a / return b with at least
    /// one a whose matching-depth point guesses acceptance. Language: a^n b^n
    /// for n >= 1 (b on bottom rejects by having no rule).
    pub(crate) fn anbn() -> VpaAutomaton {
        let mut v = VpaAutomaton::new("anbn", false);
        v.add_letter("a", LetterClass::Call).unwrap();
        v.add_letter("b", LetterClass::Return).unwrap();
        v.add_stack_sym("Z").unwrap();
        v.add_stack_sym("A0").unwrap();
        v.add_stack_sym("A").unwrap();
        v.set_bottom("Z").unwrap();
        for q in ["q0", "qa", "qb", "qf"] {
            v.add_state(q).unwrap();
        }
        v.set_initial("q0").unwrap();
        v.add_final("qf").unwrap();
        v.add_call_rule("q0", "a", "A0", "qa").unwrap();
        v.add_call_rule("qa", "a", "A", "qa").unwrap();
        v.add_return_rule("qa", "b", "A", "qb").unwrap();
        v.add_return_rule("qa", "b", "A0", "qf").unwrap();
        v.add_return_rule("qb", "b", "A", "qb").unwrap();
        v.add_return_rule("qb", "b", "A0", "qf").unwrap();
        v.validate().unwrap();
        v
    }

    fn words(alpha: &[&str], max_len: usize) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for a in alpha {
                    let mut w2: Vec<String> = w.clone();
                    w2.push(a.to_string());
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn balanced_acceptance() {
        let v = balanced();
        for (w, want) in [
            (vec![], true),
            (vec!["p", "c"], true),
            (vec!["p", "p", "c", "c"], true),
            (vec!["p", "r", "c"], true),
            (vec!["c"], false),
            (vec!["p"], false),
            (vec!["p", "c", "c"], false),
            (vec!["r"], true),
        ] {
            assert_eq!(v.accepts(&w).unwrap(), want, "word {w:?}");
        }
    }

    #[test]
    fn anbn_acceptance() {
        let v = anbn();
        assert!(!v.accepts(&[]).unwrap());
        assert!(v.accepts(&["a", "b"]).unwrap());
        assert!(v.accepts(&["a", "a", "b", "b"]).unwrap());
        assert!(!v.accepts(&["a", "b", "b"]).unwrap());
        assert!(!v.accepts(&["a", "a", "b"]).unwrap());
        assert!(!v.accepts(&["b"]).unwrap());
    }

    #[test]
    fn determinize_agrees_on_short_words() {
        for v in [balanced(), anbn()] {
            let d = v.determinize(1 << 16).unwrap();
            assert!(d.deterministic() && d.is_complete());
            let alpha: Vec<&str> = v.letters().iter().map(|(s, _)| s.as_str()).collect();
            for w in words(&alpha, 6) {
                let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
                assert_eq!(v.accepts(&w).unwrap(), d.accepts(&w).unwrap(), "word {w:?}");
            }
        }
    }

    #[test]
    fn complement_flips_acceptance_pointwise() {
        let d = anbn().determinize(1 << 16).unwrap();
        let c = d.complement().unwrap();
        for w in words(&["a", "b"], 7) {
            let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
            assert_eq!(d.accepts(&w).unwrap(), !c.accepts(&w).unwrap(), "word {w:?}");
        }
    }

    #[test]
    fn complete_keeps_language_and_totality() {
        // drop the balanced matcher's r self-loops to force incompleteness
        let mut v = balanced();
        v.internal_rules.clear();
        v.complete = false;
        let c = v.complete().unwrap();
        assert!(c.is_complete());
        for w in words(&["p", "c", "r"], 4) {
            let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
            assert_eq!(v.accepts(&w).unwrap(), c.accepts(&w).unwrap(), "word {w:?}");
        }
    }

    #[test]
    fn validation_rejects_bottom_pushes_and_trigger_clashes() {
        let mut v = balanced();
        v.add_call_rule("e", "p", "Z", "n").unwrap();
        assert!(matches!(v.validate(), Err(AutomatonError::Invalid { .. })));

        let mut v = balanced();
        v.add_call_rule("e", "p", "G", "e").unwrap();
        assert!(matches!(v.validate(), Err(AutomatonError::Invalid { .. })));
    }
}
