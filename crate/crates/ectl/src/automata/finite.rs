//! Finite word automata (dfa/nfa) with optional epsilon edges, the subset
//! construction, completion with an explicit sink, and complementation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::AutomatonError;
use crate::lts::is_ident;

/// A finite automaton over an explicit alphabet. `deterministic` marks the
/// dfa kind: no epsilon edges and at most one successor per (state, letter).
/// The `complete` flag is recomputed by `validate` and is true iff every
/// (state, letter) pair has exactly one successor.
#[derive(Debug, Clone)]
pub struct FiniteAutomaton {
    name: String,
    deterministic: bool,
    complete: bool,
    states: Vec<String>,
    state_ids: HashMap<String, u32>,
    alphabet: Vec<String>,
    letter_ids: HashMap<String, u32>,
    // (from, letter or None for epsilon, to)
    rules: Vec<(u32, Option<u32>, u32)>,
    initial: Option<u32>,
    finals: BTreeSet<u32>,
}

impl FiniteAutomaton {
    pub fn new(name: &str, deterministic: bool) -> FiniteAutomaton {
        FiniteAutomaton {
            name: name.to_string(),
            deterministic,
            complete: false,
            states: Vec::new(),
            state_ids: HashMap::new(),
            alphabet: Vec::new(),
            letter_ids: HashMap::new(),
            rules: Vec::new(),
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

    pub fn add_letter(&mut self, name: &str) -> Result<u32, AutomatonError> {
        if name == "eps" {
            return Err(self.invalid("`eps` is reserved for epsilon edges".to_string()));
        }
        if self.letter_ids.contains_key(name) {
            return Err(self.invalid(format!("duplicate letter `{name}`")));
        }
        let id = self.alphabet.len() as u32;
        self.alphabet.push(name.to_string());
        self.letter_ids.insert(name.to_string(), id);
        Ok(id)
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

    /// Adds a rule; `letter = None` is an epsilon edge (nfa only).
    pub fn add_rule(
        &mut self,
        from: &str,
        letter: Option<&str>,
        to: &str,
    ) -> Result<(), AutomatonError> {
        let f = self.state_id(from)?;
        let l = match letter {
            Some(l) => Some(self.letter_id(l)?),
            None => None,
        };
        let t = self.state_id(to)?;
        if !self.rules.contains(&(f, l, t)) {
            self.rules.push((f, l, t));
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

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn rules(&self) -> &[(u32, Option<u32>, u32)] {
        &self.rules
    }

    pub fn initial(&self) -> Option<u32> {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<u32> {
        &self.finals
    }

    pub fn is_final(&self, q: u32) -> bool {
        self.finals.contains(&q)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Checks structural invariants and refreshes the `complete` flag.
    pub fn validate(&mut self) -> Result<(), AutomatonError> {
        for s in &self.states {
            if !is_ident(s) {
                return Err(AutomatonError::Invalid {
                    name: self.name.clone(),
                    msg: format!("invalid state identifier `{s}`"),
                });
            }
        }
        if self.initial.is_none() {
            return Err(self.invalid("no initial state"));
        }
        if self.deterministic {
            let mut seen = BTreeSet::new();
            for (f, l, _) in &self.rules {
                match l {
                    None => return Err(self.invalid("epsilon edge in a dfa")),
                    Some(l) => {
                        if !seen.insert((*f, *l)) {
                            return Err(self.invalid(format!(
                                "two rules for ({}, {})",
                                self.states[*f as usize], self.alphabet[*l as usize]
                            )));
                        }
                    }
                }
            }
        }
        self.complete = self.compute_complete();
        Ok(())
    }

    fn compute_complete(&self) -> bool {
        if self.rules.iter().any(|(_, l, _)| l.is_none()) {
            return false;
        }
        let mut count: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for (f, l, _) in &self.rules {
            *count.entry((*f, l.unwrap())).or_default() += 1;
        }
        (0..self.states.len() as u32).all(|q| {
            (0..self.alphabet.len() as u32).all(|a| count.get(&(q, a)) == Some(&1))
        })
    }

    /// Epsilon closure of a state set.
    pub fn eps_closure(&self, set: &BTreeSet<u32>) -> BTreeSet<u32> {
        let mut out = set.clone();
        let mut queue: VecDeque<u32> = set.iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            for (f, l, t) in &self.rules {
                if *f == q && l.is_none() && out.insert(*t) {
                    queue.push_back(*t);
                }
            }
        }
        out
    }

    fn step(&self, set: &BTreeSet<u32>, letter: u32) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for (f, l, t) in &self.rules {
            if *l == Some(letter) && set.contains(f) {
                out.insert(*t);
            }
        }
        out
    }

    /// Runs the automaton on a word of letter names.
    pub fn accepts(&self, word: &[&str]) -> Result<bool, AutomatonError> {
        let initial = self.initial.ok_or_else(|| self.invalid("no initial state"))?;
        let mut cur = self.eps_closure(&BTreeSet::from([initial]));
        for w in word {
            let l = self.letter_id(w)?;
            cur = self.eps_closure(&self.step(&cur, l));
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.iter().any(|q| self.finals.contains(q)))
    }

    /// Removes epsilon edges without changing the language: edges become
    /// closure-then-step, and a state is final iff its closure meets a final.
    pub fn eliminate_epsilon(&self) -> FiniteAutomaton {
        let mut out = FiniteAutomaton::new(&self.name, false);
        out.states = self.states.clone();
        out.state_ids = self.state_ids.clone();
        out.alphabet = self.alphabet.clone();
        out.letter_ids = self.letter_ids.clone();
        out.initial = self.initial;
        for q in 0..self.states.len() as u32 {
            let cl = self.eps_closure(&BTreeSet::from([q]));
            if cl.iter().any(|s| self.finals.contains(s)) {
                out.finals.insert(q);
            }
            for (f, l, t) in &self.rules {
                if let Some(l) = l {
                    if cl.contains(f) && !out.rules.contains(&(q, Some(*l), *t)) {
                        out.rules.push((q, Some(*l), *t));
                    }
                }
            }
        }
        out.complete = out.compute_complete();
        out
    }

    /// Subset construction with epsilon closure. The result is a complete dfa
    /// whose states are the reachable closed subsets, named by joining the
    /// member names sorted (the empty subset is `__empty`). Errors if more
    /// than `cap` subset states appear.
    pub fn determinize(&self, cap: usize) -> Result<FiniteAutomaton, AutomatonError> {
        let initial = self.initial.ok_or_else(|| self.invalid("no initial state"))?;
        let mut out = FiniteAutomaton::new(&format!("{}_det", self.name), true);
        out.alphabet = self.alphabet.clone();
        out.letter_ids = self.letter_ids.clone();

        let mut subsets: Vec<BTreeSet<u32>> = Vec::new();
        let mut index: HashMap<BTreeSet<u32>, u32> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut used_names: BTreeSet<String> = BTreeSet::new();

        let intern = |set: BTreeSet<u32>,
                          subsets: &mut Vec<BTreeSet<u32>>,
                          index: &mut HashMap<BTreeSet<u32>, u32>,
                          out: &mut FiniteAutomaton,
                          queue: &mut VecDeque<u32>,
                          used: &mut BTreeSet<String>|
         -> Result<u32, AutomatonError> {
            if let Some(id) = index.get(&set) {
                return Ok(*id);
            }
            if subsets.len() >= cap {
                return Err(AutomatonError::CapExceeded { name: self.name.clone(), cap });
            }
            let mut name = if set.is_empty() {
                "__empty".to_string()
            } else {
                set.iter().map(|q| self.states[*q as usize].clone()).collect::<Vec<_>>().join("_")
            };
            while !used.insert(name.clone()) {
                name.push('_');
            }
            let id = out.add_state(&name)?;
            if set.iter().any(|q| self.finals.contains(q)) {
                out.finals.insert(id);
            }
            subsets.push(set.clone());
            index.insert(set, id);
            queue.push_back(id);
            Ok(id)
        };

        let start = self.eps_closure(&BTreeSet::from([initial]));
        let start_id =
            intern(start, &mut subsets, &mut index, &mut out, &mut queue, &mut used_names)?;
        out.initial = Some(start_id);

        while let Some(id) = queue.pop_front() {
            let set = subsets[id as usize].clone();
            for l in 0..self.alphabet.len() as u32 {
                let next = self.eps_closure(&self.step(&set, l));
                let nid = intern(
                    next,
                    &mut subsets,
                    &mut index,
                    &mut out,
                    &mut queue,
                    &mut used_names,
                )?;
                out.rules.push((id, Some(l), nid));
            }
        }
        out.complete = true;
        Ok(out)
    }

    /// Adds a non-final sink `__sink` and routes every missing (state, letter)
    /// pair to it. Requires a dfa; already-complete inputs come back unchanged
    /// apart from the completeness flag.
    pub fn complete(&self) -> Result<FiniteAutomaton, AutomatonError> {
        if !self.deterministic {
            return Err(AutomatonError::KindMismatch {
                name: self.name.clone(),
                op: "complete",
                req: "a deterministic automaton (dfa)",
            });
        }
        let mut out = self.clone();
        out.name = format!("{}_total", self.name);
        out.validate()?;
        if out.complete {
            return Ok(out);
        }
        let mut sink_name = "__sink".to_string();
        while out.state_ids.contains_key(&sink_name) {
            sink_name.push('_');
        }
        let sink = out.add_state(&sink_name)?;
        let have: BTreeSet<(u32, u32)> =
            self.rules.iter().map(|(f, l, _)| (*f, l.unwrap())).collect();
        for q in 0..out.states.len() as u32 {
            for a in 0..out.alphabet.len() as u32 {
                if q == sink || !have.contains(&(q, a)) {
                    out.rules.push((q, Some(a), sink));
                }
            }
        }
        out.complete = true;
        Ok(out)
    }

    /// Flips final states. Requires a complete dfa, making this an involution
    /// that negates acceptance pointwise.
    pub fn complement(&self) -> Result<FiniteAutomaton, AutomatonError> {
        if !self.deterministic || !self.compute_complete() {
            return Err(AutomatonError::KindMismatch {
                name: self.name.clone(),
                op: "complement",
                req: "a complete dfa",
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
mod tests {
    use super::*;

    /// NFA for (a|b)*a over {a,b}: guesses the final letter.
    fn last_is_a() -> FiniteAutomaton {
        let mut n = FiniteAutomaton::new("last_a", false);
        n.add_letter("a").unwrap();
        n.add_letter("b").unwrap();
        n.add_state("q0").unwrap();
        n.add_state("q1").unwrap();
        n.set_initial("q0").unwrap();
        n.add_final("q1").unwrap();
        n.add_rule("q0", Some("a"), "q0").unwrap();
        n.add_rule("q0", Some("b"), "q0").unwrap();
        n.add_rule("q0", Some("a"), "q1").unwrap();
        n.validate().unwrap();
        n
    }

    /// NFA with an epsilon chain: accepts exactly "a".
    fn eps_chain() -> FiniteAutomaton {
        let mut n = FiniteAutomaton::new("eps_chain", false);
        n.add_letter("a").unwrap();
        n.add_state("q0").unwrap();
        n.add_state("q1").unwrap();
        n.add_state("q2").unwrap();
        n.set_initial("q0").unwrap();
        n.add_final("q2").unwrap();
        n.add_rule("q0", None, "q1").unwrap();
        n.add_rule("q1", Some("a"), "q2").unwrap();
        n.validate().unwrap();
        n
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
    fn nfa_acceptance() {
        let n = last_is_a();
        assert!(n.accepts(&["a"]).unwrap());
        assert!(n.accepts(&["b", "a"]).unwrap());
        assert!(!n.accepts(&["a", "b"]).unwrap());
        assert!(!n.accepts(&[]).unwrap());
        assert!(matches!(n.accepts(&["c"]), Err(AutomatonError::UnknownLetter { .. })));
    }

    #[test]
    fn determinize_agrees_with_nfa_on_short_words() {
        for n in [last_is_a(), eps_chain()] {
            let d = n.determinize(1 << 16).unwrap();
            assert!(d.deterministic() && d.is_complete());
            let alpha: Vec<&str> = n.alphabet().iter().map(|s| s.as_str()).collect();
            for w in words(&alpha, 6) {
                let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
                assert_eq!(n.accepts(&w).unwrap(), d.accepts(&w).unwrap(), "word {w:?}");
            }
        }
    }

    #[test]
    fn determinize_already_deterministic_input() {
        let mut d = FiniteAutomaton::new("aa_star", false);
        d.add_letter("a").unwrap();
        d.add_state("e").unwrap();
        d.add_state("o").unwrap();
        d.set_initial("e").unwrap();
        d.add_final("e").unwrap();
        d.add_rule("e", Some("a"), "o").unwrap();
        d.add_rule("o", Some("a"), "e").unwrap();
        d.validate().unwrap();
        let det = d.determinize(1 << 16).unwrap();
        // same language, states renamed to singleton subsets
        assert_eq!(det.state_count(), 2);
        assert!(det.accepts(&[]).unwrap());
        assert!(!det.accepts(&["a"]).unwrap());
        assert!(det.accepts(&["a", "a"]).unwrap());
    }

    #[test]
    fn eps_elimination_preserves_language() {
        let n = eps_chain();
        let e = n.eliminate_epsilon();
        assert!(e.rules().iter().all(|(_, l, _)| l.is_some()));
        for w in words(&["a"], 4) {
            let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
            assert_eq!(n.accepts(&w).unwrap(), e.accepts(&w).unwrap());
        }
    }

    #[test]
    fn determinization_cap() {
        let n = last_is_a();
        assert!(matches!(n.determinize(1), Err(AutomatonError::CapExceeded { cap: 1, .. })));
    }

    #[test]
    fn completion_adds_sink_only_where_needed() {
        let mut d = FiniteAutomaton::new("just_a", true);
        d.add_letter("a").unwrap();
        d.add_letter("b").unwrap();
        d.add_state("q0").unwrap();
        d.add_state("q1").unwrap();
        d.set_initial("q0").unwrap();
        d.add_final("q1").unwrap();
        d.add_rule("q0", Some("a"), "q1").unwrap();
        d.validate().unwrap();
        assert!(!d.is_complete());
        let c = d.complete().unwrap();
        assert!(c.is_complete());
        assert_eq!(c.state_count(), 3);
        assert_eq!(c.accepts(&["a"]).unwrap(), true);
        assert_eq!(c.accepts(&["b"]).unwrap(), false);
        // completing a complete automaton changes nothing
        let c2 = c.complete().unwrap();
        assert_eq!(c2.state_count(), c.state_count());
        assert_eq!(c2.rule_count(), c.rule_count());
    }

    #[test]
    fn complement_flips_acceptance_pointwise() {
        let d = last_is_a().determinize(1 << 16).unwrap();
        let c = d.complement().unwrap();
        for w in words(&["a", "b"], 5) {
            let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
            assert_eq!(d.accepts(&w).unwrap(), !c.accepts(&w).unwrap());
        }
        // involution
        let cc = c.complement().unwrap();
        for w in words(&["a", "b"], 5) {
            let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
            assert_eq!(d.accepts(&w).unwrap(), cc.accepts(&w).unwrap());
        }
    }

    #[test]
    fn complement_requires_complete_dfa() {
        let n = last_is_a();
        assert!(matches!(n.complement(), Err(AutomatonError::KindMismatch { .. })));
    }
}
