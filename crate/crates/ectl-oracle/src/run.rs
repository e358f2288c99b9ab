//! A naive configuration-set simulator for all six automaton kinds. The
//! engines answer membership through ε-elimination, subset constructions,
//! and saturation; this module instead drags a set of raw configurations
//! through the word one letter at a time, so the two sides share nothing
//! but the automaton data itself.

use std::collections::BTreeSet;

use ectl::automata::Automaton;

use crate::OracleError;

/// One live run: the control state plus the stack, top first. Finite kinds
/// keep the stack empty.
type Config = (u32, Vec<u32>);

/// The set of configurations an automaton can be in after reading some
/// word. Stepping is pure: each step builds the next set.
#[derive(Debug, Clone)]
pub struct Sim<'a> {
    aut: &'a Automaton,
    configs: BTreeSet<Config>,
}

impl<'a> Sim<'a> {
    /// The configuration set before any letter is read: the ε-closure of
    /// the initial state, with `[bottom]` as the starting stack for the
    /// pushdown kinds.
    pub fn start(aut: &'a Automaton) -> Result<Sim<'a>, OracleError> {
        let mut configs = BTreeSet::new();
        match aut {
            Automaton::Finite(f) => {
                let init = f
                    .initial()
                    .ok_or_else(|| OracleError::BadAutomaton { name: f.name().to_string() })?;
                let mut seed = BTreeSet::new();
                seed.insert((init, Vec::new()));
                configs = eps_close(aut, seed);
            }
            Automaton::Vpa(v) => {
                let init = v
                    .initial()
                    .ok_or_else(|| OracleError::BadAutomaton { name: v.name().to_string() })?;
                let bottom = v
                    .bottom()
                    .ok_or_else(|| OracleError::BadAutomaton { name: v.name().to_string() })?;
                configs.insert((init, vec![bottom]));
            }
            Automaton::Pda(p) => {
                let init = p
                    .initial()
                    .ok_or_else(|| OracleError::BadAutomaton { name: p.name().to_string() })?;
                let bottom = p
                    .bottom()
                    .ok_or_else(|| OracleError::BadAutomaton { name: p.name().to_string() })?;
                configs.insert((init, vec![bottom]));
            }
        }
        Ok(Sim { aut, configs })
    }

    /// Reads one letter in every live configuration. A letter outside the
    /// automaton's alphabet kills every run: the set comes back empty.
    pub fn step(&self, letter: &str) -> Sim<'a> {
        let mut next = BTreeSet::new();
        match self.aut {
            Automaton::Finite(f) => {
                let lid = f.alphabet().iter().position(|l| l == letter).map(|i| i as u32);
                if let Some(lid) = lid {
                    for (q, _) in &self.configs {
                        for (from, on, to) in f.rules() {
                            if from == q && *on == Some(lid) {
                                next.insert((*to, Vec::new()));
                            }
                        }
                    }
                }
                next = eps_close(self.aut, next);
            }
            Automaton::Vpa(v) => {
                let found = v.letters().iter().position(|(l, _)| l == letter);
                if let Some(lidx) = found {
                    let lid = lidx as u32;
                    let class = v.letter_class(lid);
                    use ectl::automata::LetterClass;
                    for (q, stack) in &self.configs {
                        match class {
                            LetterClass::Internal => {
                                for (from, on, to) in v.internal_rules() {
                                    if from == q && *on == lid {
                                        next.insert((*to, stack.clone()));
                                    }
                                }
                            }
                            LetterClass::Call => {
                                for (from, on, push, to) in v.call_rules() {
                                    if from == q && *on == lid {
                                        let mut s2 = Vec::with_capacity(stack.len() + 1);
                                        s2.push(*push);
                                        s2.extend_from_slice(stack);
                                        next.insert((*to, s2));
                                    }
                                }
                            }
                            LetterClass::Return => {
                                let Some(&top) = stack.first() else { continue };
                                let at_bottom = Some(top) == v.bottom();
                                for (from, on, sym, to) in v.return_rules() {
                                    if from == q && *on == lid && *sym == top {
                                        // a return at the bottom reads the
                                        // marker but leaves it in place
                                        let s2 = if at_bottom {
                                            stack.clone()
                                        } else {
                                            stack[1..].to_vec()
                                        };
                                        next.insert((*to, s2));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Automaton::Pda(p) => {
                let lid = p.alphabet().iter().position(|l| l == letter).map(|i| i as u32);
                if let Some(lid) = lid {
                    for (q, stack) in &self.configs {
                        let Some(&top) = stack.first() else { continue };
                        for rule in p.rules() {
                            if rule.from == *q && rule.letter == lid && rule.top == top {
                                let mut s2 =
                                    Vec::with_capacity(rule.replacement.len() + stack.len() - 1);
                                s2.extend_from_slice(&rule.replacement);
                                s2.extend_from_slice(&stack[1..]);
                                next.insert((rule.to, s2));
                            }
                        }
                    }
                }
            }
        }
        Sim { aut: self.aut, configs: next }
    }

    /// Whether the word read so far is accepted: some live configuration
    /// sits in a final state (the stack does not matter).
    pub fn accepting(&self) -> bool {
        let finals: &BTreeSet<u32> = match self.aut {
            Automaton::Finite(f) => f.finals(),
            Automaton::Vpa(v) => v.finals(),
            Automaton::Pda(p) => p.finals(),
        };
        self.configs.iter().any(|(q, _)| finals.contains(q))
    }

    /// No run survived the word read so far; no extension is accepted.
    pub fn is_stuck(&self) -> bool {
        self.configs.is_empty()
    }

    /// A canonical key for loop detection in bounded searches.
    pub fn key(&self) -> Vec<Config> {
        self.configs.iter().cloned().collect()
    }
}

fn eps_close(aut: &Automaton, mut set: BTreeSet<Config>) -> BTreeSet<Config> {
    let Automaton::Finite(f) = aut else { return set };
    let mut work: Vec<u32> = set.iter().map(|(q, _)| *q).collect();
    while let Some(q) = work.pop() {
        for (from, on, to) in f.rules() {
            if *from == q && on.is_none() && set.insert((*to, Vec::new())) {
                work.push(*to);
            }
        }
    }
    set
}

/// Word membership decided purely by the configuration-set walk above.
pub fn accepts_word(aut: &Automaton, word: &[&str]) -> Result<bool, OracleError> {
    let mut sim = Sim::start(aut)?;
    for letter in word {
        sim = sim.step(letter);
        if sim.is_stuck() {
            return Ok(false);
        }
    }
    Ok(sim.accepting())
}

/// Enumerates every word over `letters` up to `max_len` and returns the
/// accepted ones, shortest first. The workhorse behind the emptiness and
/// determinization batteries.
pub fn enumerate_accepted(
    aut: &Automaton,
    letters: &[String],
    max_len: usize,
) -> Result<Vec<Vec<String>>, OracleError> {
    let mut found = Vec::new();
    let mut layer: Vec<(Vec<String>, Sim)> = vec![(Vec::new(), Sim::start(aut)?)];
    if layer[0].1.accepting() {
        found.push(Vec::new());
    }
    for _ in 0..max_len {
        let mut next_layer = Vec::new();
        for (word, sim) in &layer {
            for letter in letters {
                let next = sim.step(letter);
                if next.is_stuck() {
                    continue;
                }
                let mut w2 = word.clone();
                w2.push(letter.clone());
                if next.accepting() {
                    found.push(w2.clone());
                }
                next_layer.push((w2, next));
            }
        }
        if next_layer.is_empty() {
            break;
        }
        layer = next_layer;
    }
    Ok(found)
}

/// True when the control-state graph alone already separates every final
/// state from the initial one; the language is then empty no matter what
/// the stack does. The converse does not hold, so this is only used as the
/// one-sided emptiness certificate for randomized pushdown inputs.
pub fn finals_unreachable(aut: &Automaton) -> bool {
    let (init, edges, finals): (Option<u32>, Vec<(u32, u32)>, BTreeSet<u32>) = match aut {
        Automaton::Finite(f) => (
            f.initial(),
            f.rules().iter().map(|(a, _, b)| (*a, *b)).collect(),
            f.finals().clone(),
        ),
        Automaton::Vpa(v) => {
            let mut e: Vec<(u32, u32)> =
                v.internal_rules().iter().map(|(a, _, b)| (*a, *b)).collect();
            e.extend(v.call_rules().iter().map(|(a, _, _, b)| (*a, *b)));
            e.extend(v.return_rules().iter().map(|(a, _, _, b)| (*a, *b)));
            (v.initial(), e, v.finals().clone())
        }
        Automaton::Pda(p) => (
            p.initial(),
            p.rules().iter().map(|r| (r.from, r.to)).collect(),
            p.finals().clone(),
        ),
    };
    let Some(init) = init else { return true };
    let mut seen = BTreeSet::from([init]);
    let mut work = vec![init];
    while let Some(q) = work.pop() {
        if finals.contains(&q) {
            return false;
        }
        for (a, b) in &edges {
            if *a == q && seen.insert(*b) {
                work.push(*b);
            }
        }
    }
    true
}
