//! Input pushdown automata (dpda/pda). Rules read one letter, test the top
//! of stack and replace it by a word (written top-first). A bottom marker
//! sits under every stack and is never popped: a rule whose tested top is the
//! marker must put it back exactly once, at the bottom of the replacement.

use std::collections::{BTreeSet, HashMap};

use super::AutomatonError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaRule {
    pub from: u32,
    pub letter: u32,
    pub top: u32,
    pub to: u32,
    /// Replacement for the popped top, top-first.
    pub replacement: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct PdaAutomaton {
    name: String,
    deterministic: bool,
    complete: bool,
    states: Vec<String>,
    state_ids: HashMap<String, u32>,
    alphabet: Vec<String>,
    letter_ids: HashMap<String, u32>,
    stack_syms: Vec<String>,
    sym_ids: HashMap<String, u32>,
    bottom: Option<u32>,
    rules: Vec<PdaRule>,
    initial: Option<u32>,
    finals: BTreeSet<u32>,
}

impl PdaAutomaton {
    pub fn new(name: &str, deterministic: bool) -> PdaAutomaton {
        PdaAutomaton {
            name: name.to_string(),
            deterministic,
            complete: false,
            states: Vec::new(),
            state_ids: HashMap::new(),
            alphabet: Vec::new(),
            letter_ids: HashMap::new(),
            stack_syms: Vec::new(),
            sym_ids: HashMap::new(),
            bottom: None,
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
        if self.letter_ids.contains_key(name) {
            return Err(self.invalid(format!("duplicate letter `{name}`")));
        }
        let id = self.alphabet.len() as u32;
        self.alphabet.push(name.to_string());
        self.letter_ids.insert(name.to_string(), id);
        Ok(id)
    }

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
        self.bottom = Some(self.sym_id(name)?);
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

    /// Adds a rule `(from, letter, top) -> (to, replacement)` with the
    /// replacement written top-first.
    pub fn add_rule(
        &mut self,
        from: &str,
        letter: &str,
        top: &str,
        to: &str,
        replacement: &[&str],
    ) -> Result<(), AutomatonError> {
        let rule = PdaRule {
            from: self.state_id(from)?,
            letter: self.letter_id(letter)?,
            top: self.sym_id(top)?,
            to: self.state_id(to)?,
            replacement: replacement
                .iter()
                .map(|s| self.sym_id(s))
                .collect::<Result<Vec<_>, _>>()?,
        };
        if !self.rules.contains(&rule) {
            self.rules.push(rule);
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

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
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

    pub fn rules(&self) -> &[PdaRule] {
        &self.rules
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Checks the bottom-marker discipline and, for the deterministic kind,
    /// that no two rules share a (state, letter, top) trigger. Refreshes the
    /// `complete` flag.
    pub fn validate(&mut self) -> Result<(), AutomatonError> {
        if self.initial.is_none() {
            return Err(self.invalid("no initial state"));
        }
        let bottom = self.bottom.ok_or_else(|| self.invalid("no bottom stack symbol"))?;
        for r in &self.rules {
            let bottoms = r.replacement.iter().filter(|s| **s == bottom).count();
            if r.top == bottom {
                if bottoms != 1 || r.replacement.last() != Some(&bottom) {
                    return Err(self.invalid(format!(
                        "rule on `{}` must keep the bottom marker exactly once, last",
                        self.stack_syms[bottom as usize]
                    )));
                }
            } else if bottoms != 0 {
                return Err(self.invalid(format!(
                    "rule re-introduces the bottom marker `{}`",
                    self.stack_syms[bottom as usize]
                )));
            }
        }
        if self.deterministic {
            let mut seen = BTreeSet::new();
            for r in &self.rules {
                if !seen.insert((r.from, r.letter, r.top)) {
                    return Err(self.invalid(format!(
                        "two rules for ({}, {}, {})",
                        self.states[r.from as usize],
                        self.alphabet[r.letter as usize],
                        self.stack_syms[r.top as usize]
                    )));
                }
            }
        }
        self.complete = self.compute_complete();
        Ok(())
    }

    fn compute_complete(&self) -> bool {
        let triggers: BTreeSet<(u32, u32, u32)> =
            self.rules.iter().map(|r| (r.from, r.letter, r.top)).collect();
        (0..self.states.len() as u32).all(|q| {
            (0..self.alphabet.len() as u32).all(|a| {
                (0..self.stack_syms.len() as u32).all(|g| triggers.contains(&(q, a, g)))
            })
        })
    }

    /// Runs the automaton on a word of letter names via the set of reachable
    /// (state, stack) configurations; stacks are top-first.
    pub fn accepts(&self, word: &[&str]) -> Result<bool, AutomatonError> {
        let initial = self.initial.ok_or_else(|| self.invalid("no initial state"))?;
        let bottom = self.bottom.ok_or_else(|| self.invalid("no bottom stack symbol"))?;
        let mut configs: BTreeSet<(u32, Vec<u32>)> = BTreeSet::from([(initial, vec![bottom])]);
        for w in word {
            let l = self.letter_id(w)?;
            let mut next = BTreeSet::new();
            for (q, stack) in &configs {
                let top = stack[0];
                for r in &self.rules {
                    if r.from == *q && r.letter == l && r.top == top {
                        let mut s2 = r.replacement.clone();
                        s2.extend_from_slice(&stack[1..]);
                        next.insert((r.to, s2));
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

    /// Adds a non-final sink and routes every missing (state, letter, top)
    /// trigger to it, leaving the tested top in place. Requires the
    /// deterministic kind.
    pub fn complete(&self) -> Result<PdaAutomaton, AutomatonError> {
        if !self.deterministic {
            return Err(AutomatonError::KindMismatch {
                name: self.name.clone(),
                op: "complete",
                req: "a deterministic automaton (dpda)",
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
        let triggers: BTreeSet<(u32, u32, u32)> =
            out.rules.iter().map(|r| (r.from, r.letter, r.top)).collect();
        for q in 0..out.states.len() as u32 {
            for a in 0..out.alphabet.len() as u32 {
                for g in 0..out.stack_syms.len() as u32 {
                    if !triggers.contains(&(q, a, g)) {
                        out.rules.push(PdaRule {
                            from: q,
                            letter: a,
                            top: g,
                            to: sink,
                            replacement: vec![g],
                        });
                    }
                }
            }
        }
        out.complete = true;
        Ok(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Deterministic matcher for a^n b a^n (n >= 0) over {a, b}.
    pub(crate) fn anban() -> PdaAutomaton {
        let mut p = PdaAutomaton::new("anban", true);
        p.add_letter("a").unwrap();
        p.add_letter("b").unwrap();
        p.add_stack_sym("Z").unwrap();
        p.add_stack_sym("A0").unwrap();
        p.add_stack_sym("A").unwrap();
        p.set_bottom("Z").unwrap();
        for q in ["q0", "q1", "q2"] {
            p.add_state(q).unwrap();
        }
        p.set_initial("q0").unwrap();
        p.add_final("q2").unwrap();
        p.add_rule("q0", "a", "Z", "q0", &["A0", "Z"]).unwrap();
        p.add_rule("q0", "a", "A0", "q0", &["A", "A0"]).unwrap();
        p.add_rule("q0", "a", "A", "q0", &["A", "A"]).unwrap();
        p.add_rule("q0", "b", "Z", "q2", &["Z"]).unwrap();
        p.add_rule("q0", "b", "A0", "q1", &["A0"]).unwrap();
        p.add_rule("q0", "b", "A", "q1", &["A"]).unwrap();
        p.add_rule("q1", "a", "A", "q1", &[]).unwrap();
        p.add_rule("q1", "a", "A0", "q2", &[]).unwrap();
        p.validate().unwrap();
        p
    }

    #[test]
    fn anban_acceptance() {
        let p = anban();
        assert!(p.accepts(&["b"]).unwrap());
        assert!(p.accepts(&["a", "b", "a"]).unwrap());
        assert!(p.accepts(&["a", "a", "b", "a", "a"]).unwrap());
        assert!(!p.accepts(&["a", "b"]).unwrap());
        assert!(!p.accepts(&["a", "a", "b", "a"]).unwrap());
        assert!(!p.accepts(&["a", "b", "a", "a"]).unwrap());
        assert!(!p.accepts(&[]).unwrap());
    }

    #[test]
    fn completion_preserves_language() {
        let p = anban();
        assert!(!p.is_complete());
        let c = p.complete().unwrap();
        assert!(c.is_complete());
        for w in [
            vec!["b"],
            vec!["a", "b", "a"],
            vec!["a", "b", "a", "a"],
            vec!["b", "b"],
            vec!["a", "a", "a", "b", "a", "a", "a"],
        ] {
            assert_eq!(p.accepts(&w).unwrap(), c.accepts(&w).unwrap(), "word {w:?}");
        }
    }

    #[test]
    fn bottom_discipline_is_enforced() {
        let mut p = anban();
        // popping the marker
        p.add_state("bad").unwrap();
        p.add_rule("bad", "a", "Z", "bad", &[]).unwrap();
        assert!(matches!(p.validate(), Err(AutomatonError::Invalid { .. })));

        let mut p = anban();
        // re-introducing the marker above the bottom
        p.add_state("bad").unwrap();
        p.add_rule("bad", "a", "A", "bad", &["Z", "A"]).unwrap();
        assert!(matches!(p.validate(), Err(AutomatonError::Invalid { .. })));
    }

    #[test]
    fn determinism_clash_is_rejected() {
        let mut p = anban();
        p.add_rule("q0", "a", "Z", "q1", &["Z"]).unwrap();
        assert!(matches!(p.validate(), Err(AutomatonError::Invalid { .. })));
    }
}
