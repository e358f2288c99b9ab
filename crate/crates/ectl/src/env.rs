//! The automaton environment a formula is resolved against: automata by
//! name, plus derived automata (complements, compiled regexes, the built-in
//! single-step and unconstrained languages) built on demand and cached.
//!
//! The environment is fixed to one action alphabet — the one of the system
//! under scrutiny. Complements are taken relative to that alphabet joined
//! with the automaton's own, so letters the automaton never mentions count
//! as "not accepted" rather than being silently impossible.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::automata::regex::regex_to_nfa;
use crate::automata::{
    complement, complete, determinize, sigma, sigma_star, AutKind, Automaton,
    AutomatonError,
};
use crate::logic::LanguageRef;

/// Default bound on the state count of automata produced by subset
/// constructions; exceeding it aborts the check instead of thrashing.
pub const DEFAULT_CAP: usize = 65536;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("automaton `{name}` is not defined")]
    UnknownAutomaton { name: String },
    #[error("automaton `{name}` is already defined")]
    DuplicateAutomaton { name: String },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

pub struct Env {
    sigma: Vec<String>,
    cap: usize,
    base: HashMap<String, Arc<Automaton>>,
    derived: Mutex<HashMap<String, Arc<Automaton>>>,
}

impl Env {
    /// An environment over the given action alphabet with the default
    /// construction cap.
    pub fn new(sigma: &[String]) -> Env {
        Env::with_cap(sigma, DEFAULT_CAP)
    }

    pub fn with_cap(sigma: &[String], cap: usize) -> Env {
        Env {
            sigma: sigma.to_vec(),
            cap,
            base: HashMap::new(),
            derived: Mutex::new(HashMap::new()),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn sigma(&self) -> &[String] {
        &self.sigma
    }

    /// Registers a named automaton. Names are unique.
    pub fn insert(&mut self, aut: Automaton) -> Result<(), EnvError> {
        let name = aut.name().to_string();
        if self.base.contains_key(&name) {
            return Err(EnvError::DuplicateAutomaton { name });
        }
        self.base.insert(name, Arc::new(aut));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Arc<Automaton>> {
        self.base.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.base.keys().map(|s| s.as_str()).collect();
        names.sort();
        names
    }

    /// Resolves a language reference to a concrete automaton, building and
    /// caching derived ones (complement chains, compiled regexes, built-in
    /// languages) on first use.
    pub fn resolve(&self, lref: &LanguageRef) -> Result<Arc<Automaton>, EnvError> {
        match lref {
            LanguageRef::Named(name) => self
                .get(name)
                .ok_or_else(|| EnvError::UnknownAutomaton { name: name.clone() }),
            LanguageRef::Kinded(kind, name) => {
                let key = format!("{kind}:{name}");
                self.derived_or(&key, || {
                    let base = self
                        .get(name)
                        .ok_or_else(|| EnvError::UnknownAutomaton { name: name.clone() })?;
                    let actual = base.kind();
                    if actual == *kind {
                        return Ok((*base).clone());
                    }
                    // Only forgetting determinism is sound without changing
                    // the automaton; anything else is a kind violation.
                    let weakened = base.forget_determinism();
                    if weakened.kind() == *kind {
                        Ok(weakened)
                    } else {
                        Err(EnvError::Automaton(AutomatonError::KindMismatch {
                            name: name.clone(),
                            op: "reinterpret",
                            req: match kind {
                                AutKind::Nfa => "a finite automaton",
                                AutKind::Vpa => "visibly pushdown",
                                AutKind::Pda => "a pushdown automaton",
                                AutKind::Dfa => "a deterministic finite automaton",
                                AutKind::Dvpa => "deterministic visibly pushdown",
                                AutKind::Dpda => "a deterministic pushdown automaton",
                            },
                        }))
                    }
                })
            }
            LanguageRef::Complement(name) => {
                let key = format!("~{name}");
                self.derived_or(&key, || {
                    let base = self
                        .get(name)
                        .ok_or_else(|| EnvError::UnknownAutomaton { name: name.clone() })?;
                    Ok(self.build_complement(&base)?)
                })
            }
            LanguageRef::Regex(pattern) => {
                let key = format!("re:{pattern}");
                self.derived_or(&key, || {
                    let nfa = regex_to_nfa(pattern, &self.sigma, &key)?;
                    Ok(Automaton::Finite(nfa))
                })
            }
            LanguageRef::Sigma => {
                self.derived_or("__sigma", || Ok(sigma("__sigma", &self.sigma)))
            }
            LanguageRef::SigmaStar => {
                self.derived_or("__sigma_star", || Ok(sigma_star("__sigma_star", &self.sigma)))
            }
        }
    }

    fn derived_or(
        &self,
        key: &str,
        build: impl FnOnce() -> Result<Automaton, EnvError>,
    ) -> Result<Arc<Automaton>, EnvError> {
        if let Some(found) = self.derived.lock().expect("env cache lock").get(key) {
            return Ok(found.clone());
        }
        let built = Arc::new(build()?);
        let mut cache = self.derived.lock().expect("env cache lock");
        Ok(cache.entry(key.to_string()).or_insert(built).clone())
    }

    /// Complement pipeline: widen the alphabet to cover the system's
    /// actions, determinize if needed, complete, and flip. Only kinds with
    /// a decidable complement are allowed.
    fn build_complement(&self, base: &Automaton) -> Result<Automaton, AutomatonError> {
        let widened = widen_alphabet(base, &self.sigma)?;
        let det = match widened.kind() {
            AutKind::Dfa | AutKind::Dvpa => widened,
            AutKind::Nfa | AutKind::Vpa => determinize(&widened, self.cap)?,
            AutKind::Dpda | AutKind::Pda => {
                return Err(AutomatonError::KindMismatch {
                    name: base.name().to_string(),
                    op: "complement",
                    req: "a determinizable kind (finite or visibly pushdown)",
                });
            }
        };
        let total = complete(&det)?;
        complement(&total)
    }
}

/// Returns a copy of the automaton that also declares every given letter
/// (new letters get no rules, so they lead nowhere until completion). For a
/// visibly pushdown automaton new letters are taken as internal.
pub(crate) fn widen_alphabet(
    aut: &Automaton,
    letters: &[String],
) -> Result<Automaton, AutomatonError> {
    let mut out = aut.clone();
    match &mut out {
        Automaton::Finite(a) => {
            for l in letters {
                if !a.alphabet().contains(l) {
                    a.add_letter(l)?;
                }
            }
        }
        Automaton::Vpa(a) => {
            for l in letters {
                if !a.letters().iter().any(|(name, _)| name == l) {
                    a.add_letter(l, crate::automata::LetterClass::Internal)?;
                }
            }
        }
        Automaton::Pda(a) => {
            for l in letters {
                if !a.alphabet().contains(l) {
                    a.add_letter(l)?;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::FiniteAutomaton;

    fn actions() -> Vec<String> {
        vec!["a".to_string(), "b".to_string()]
    }

    /// NFA for (a|b)*a — words ending in a.
    fn ends_in_a() -> Automaton {
        let mut a = FiniteAutomaton::new("ends_a", false);
        a.add_state("s0").unwrap();
        a.add_state("s1").unwrap();
        a.add_letter("a").unwrap();
        a.add_letter("b").unwrap();
        a.set_initial("s0").unwrap();
        a.add_final("s1").unwrap();
        a.add_rule("s0", Some("a"), "s0").unwrap();
        a.add_rule("s0", Some("b"), "s0").unwrap();
        a.add_rule("s0", Some("a"), "s1").unwrap();
        a.validate().unwrap();
        Automaton::Finite(a)
    }

    fn words(max_len: usize) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = vec![Vec::new()];
        let mut layer: Vec<Vec<String>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for l in ["a", "b"] {
                    let mut w2 = w.clone();
                    w2.push(l.to_string());
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn named_lookup_and_duplicates() {
        let mut env = Env::new(&actions());
        env.insert(ends_in_a()).unwrap();
        assert!(env.get("ends_a").is_some());
        assert!(matches!(
            env.insert(ends_in_a()),
            Err(EnvError::DuplicateAutomaton { .. })
        ));
        let missing = env.resolve(&LanguageRef::Named("nope".to_string()));
        assert!(matches!(missing, Err(EnvError::UnknownAutomaton { .. })));
    }

    #[test]
    fn complement_is_pointwise_negation() {
        let mut env = Env::new(&actions());
        env.insert(ends_in_a()).unwrap();
        let plain = env.resolve(&LanguageRef::Named("ends_a".to_string())).unwrap();
        let comp = env.resolve(&LanguageRef::Complement("ends_a".to_string())).unwrap();
        assert_eq!(comp.kind(), AutKind::Dfa);
        assert!(comp.is_complete());
        for w in words(5) {
            let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
            assert_ne!(
                plain.accepts(&w).unwrap(),
                comp.accepts(&w).unwrap(),
                "word {w:?}"
            );
        }
    }

    #[test]
    fn complement_covers_system_actions_the_automaton_never_mentions() {
        // automaton only knows "a"; the system also has "b"
        let mut only_a = FiniteAutomaton::new("just_a", true);
        only_a.add_state("s0").unwrap();
        only_a.add_letter("a").unwrap();
        only_a.set_initial("s0").unwrap();
        only_a.add_final("s0").unwrap();
        only_a.add_rule("s0", Some("a"), "s0").unwrap();
        only_a.validate().unwrap();
        let mut env = Env::new(&actions());
        env.insert(Automaton::Finite(only_a)).unwrap();
        let comp = env.resolve(&LanguageRef::Complement("just_a".to_string())).unwrap();
        // a* is in the language, so its complement rejects those...
        assert!(!comp.accepts(&[]).unwrap());
        assert!(!comp.accepts(&["a", "a"]).unwrap());
        // ...but any word mentioning b is outside a*, hence accepted
        assert!(comp.accepts(&["b"]).unwrap());
        assert!(comp.accepts(&["a", "b", "a"]).unwrap());
    }

    #[test]
    fn derived_automata_are_cached() {
        let mut env = Env::new(&actions());
        env.insert(ends_in_a()).unwrap();
        let first = env.resolve(&LanguageRef::Complement("ends_a".to_string())).unwrap();
        let second = env.resolve(&LanguageRef::Complement("ends_a".to_string())).unwrap();
        assert!(Arc::ptr_eq(&first, &second));
    }

    #[test]
    fn regex_and_builtin_languages() {
        let env = Env::new(&actions());
        let re = env.resolve(&LanguageRef::Regex("ab*".to_string())).unwrap();
        assert!(re.accepts(&["a"]).unwrap());
        assert!(re.accepts(&["a", "b", "b"]).unwrap());
        assert!(!re.accepts(&["b"]).unwrap());

        let single = env.resolve(&LanguageRef::Sigma).unwrap();
        assert!(single.accepts(&["b"]).unwrap());
        assert!(!single.accepts(&[]).unwrap());
        assert!(!single.accepts(&["a", "a"]).unwrap());

        let any = env.resolve(&LanguageRef::SigmaStar).unwrap();
        assert!(any.accepts(&[]).unwrap());
        assert!(any.accepts(&["b", "a", "b"]).unwrap());
    }

    #[test]
    fn pushdown_complement_is_refused() {
        let mut env = Env::new(&actions());
        env.insert(Automaton::Pda(crate::automata::pda::tests::anban())).unwrap();
        let err = env.resolve(&LanguageRef::Complement("anban".to_string()));
        assert!(matches!(
            err,
            Err(EnvError::Automaton(AutomatonError::KindMismatch { .. }))
        ));
    }

    #[test]
    fn cap_limits_subset_construction() {
        // an NFA family whose determinization needs 2^n states: (a|b)* a (a|b)^(n-1)
        let mut a = FiniteAutomaton::new("big", false);
        let n = 12;
        for i in 0..=n {
            a.add_state(&format!("s{i}")).unwrap();
        }
        a.add_letter("a").unwrap();
        a.add_letter("b").unwrap();
        a.set_initial("s0").unwrap();
        a.add_final(&format!("s{n}")).unwrap();
        a.add_rule("s0", Some("a"), "s0").unwrap();
        a.add_rule("s0", Some("b"), "s0").unwrap();
        a.add_rule("s0", Some("a"), "s1").unwrap();
        for i in 1..n {
            a.add_rule(&format!("s{i}"), Some("a"), &format!("s{}", i + 1)).unwrap();
            a.add_rule(&format!("s{i}"), Some("b"), &format!("s{}", i + 1)).unwrap();
        }
        a.validate().unwrap();
        let mut env = Env::with_cap(&actions(), 64);
        env.insert(Automaton::Finite(a)).unwrap();
        let err = env.resolve(&LanguageRef::Complement("big".to_string()));
        assert!(matches!(
            err,
            Err(EnvError::Automaton(AutomatonError::CapExceeded { .. }))
        ));
    }
}
