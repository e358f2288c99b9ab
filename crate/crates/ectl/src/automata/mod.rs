//! Word automata used to annotate temporal operators: finite automata,
//! visibly pushdown automata and input pushdown automata behind one enum,
//! with kind-checked determinization, completion and complementation.

pub mod analysis;
pub mod finite;
pub mod pda;
pub mod regex;
pub mod vpa;

use std::fmt;

use thiserror::Error;

pub use finite::FiniteAutomaton;
pub use pda::{PdaAutomaton, PdaRule};
pub use regex::RegexError;
pub use vpa::{LetterClass, VpaAutomaton};

/// The six automaton kinds a `.aut` file may declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AutKind {
    Dfa,
    Nfa,
    Dvpa,
    Vpa,
    Dpda,
    Pda,
}

impl AutKind {
    pub fn parse(s: &str) -> Option<AutKind> {
        match s {
            "dfa" => Some(AutKind::Dfa),
            "nfa" => Some(AutKind::Nfa),
            "dvpa" => Some(AutKind::Dvpa),
            "vpa" => Some(AutKind::Vpa),
            "dpda" => Some(AutKind::Dpda),
            "pda" => Some(AutKind::Pda),
            _ => None,
        }
    }

    pub fn deterministic(self) -> bool {
        matches!(self, AutKind::Dfa | AutKind::Dvpa | AutKind::Dpda)
    }

    /// True for the kinds whose membership needs a stack.
    pub fn pushdown(self) -> bool {
        !matches!(self, AutKind::Dfa | AutKind::Nfa)
    }
}

impl fmt::Display for AutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AutKind::Dfa => "dfa",
            AutKind::Nfa => "nfa",
            AutKind::Dvpa => "dvpa",
            AutKind::Vpa => "vpa",
            AutKind::Dpda => "dpda",
            AutKind::Pda => "pda",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("automaton `{name}`: {msg}")]
    Invalid { name: String, msg: String },
    #[error("automaton `{name}`: letter `{letter}` is not in the alphabet")]
    UnknownLetter { name: String, letter: String },
    #[error("determinizing `{name}` exceeded the state cap ({cap})")]
    CapExceeded { name: String, cap: usize },
    #[error("cannot {op} `{name}`: it is not {req}")]
    KindMismatch { name: String, op: &'static str, req: &'static str },
    #[error("automaton `{name}` accepts no word at all")]
    EmptyLanguage { name: String },
    #[error("automaton `{name}` accepts unboundedly long words on a stack loop; no longest word exists to measure")]
    NoLongestWord { name: String },
    #[error(transparent)]
    Regex(Box<RegexError>),
}

/// A word automaton of any kind.
#[derive(Debug, Clone)]
pub enum Automaton {
    Finite(FiniteAutomaton),
    Vpa(VpaAutomaton),
    Pda(PdaAutomaton),
}

impl Automaton {
    pub fn kind(&self) -> AutKind {
        match self {
            Automaton::Finite(a) if a.deterministic() => AutKind::Dfa,
            Automaton::Finite(_) => AutKind::Nfa,
            Automaton::Vpa(a) if a.deterministic() => AutKind::Dvpa,
            Automaton::Vpa(_) => AutKind::Vpa,
            Automaton::Pda(a) if a.deterministic() => AutKind::Dpda,
            Automaton::Pda(_) => AutKind::Pda,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Automaton::Finite(a) => a.name(),
            Automaton::Vpa(a) => a.name(),
            Automaton::Pda(a) => a.name(),
        }
    }

    pub fn set_name(&mut self, name: &str) {
        match self {
            Automaton::Finite(a) => a.set_name(name),
            Automaton::Vpa(a) => a.set_name(name),
            Automaton::Pda(a) => a.set_name(name),
        }
    }

    /// A copy advertising the nondeterministic kind of the same family
    /// (dfa→nfa, dvpa→vpa, dpda→pda); the language is unchanged.
    pub fn forget_determinism(&self) -> Automaton {
        let mut out = self.clone();
        match &mut out {
            Automaton::Finite(a) => a.forget_determinism(),
            Automaton::Vpa(a) => a.forget_determinism(),
            Automaton::Pda(a) => a.forget_determinism(),
        }
        out
    }

    pub fn validate(&mut self) -> Result<(), AutomatonError> {
        match self {
            Automaton::Finite(a) => a.validate(),
            Automaton::Vpa(a) => a.validate(),
            Automaton::Pda(a) => a.validate(),
        }
    }

    pub fn accepts(&self, word: &[&str]) -> Result<bool, AutomatonError> {
        match self {
            Automaton::Finite(a) => a.accepts(word),
            Automaton::Vpa(a) => a.accepts(word),
            Automaton::Pda(a) => a.accepts(word),
        }
    }

    /// Alphabet letter names in declaration order.
    pub fn letters(&self) -> Vec<String> {
        match self {
            Automaton::Finite(a) => a.alphabet().to_vec(),
            Automaton::Vpa(a) => a.letters().iter().map(|(l, _)| l.clone()).collect(),
            Automaton::Pda(a) => a.alphabet().to_vec(),
        }
    }

    pub fn state_count(&self) -> usize {
        match self {
            Automaton::Finite(a) => a.state_count(),
            Automaton::Vpa(a) => a.state_count(),
            Automaton::Pda(a) => a.state_count(),
        }
    }

    pub fn rule_count(&self) -> usize {
        match self {
            Automaton::Finite(a) => a.rule_count(),
            Automaton::Vpa(a) => a.rule_count(),
            Automaton::Pda(a) => a.rule_count(),
        }
    }

    /// Size measure used when weighing annotated formulas: states plus rules.
    pub fn size(&self) -> usize {
        self.state_count() + self.rule_count()
    }

    pub fn is_complete(&self) -> bool {
        match self {
            Automaton::Finite(a) => a.is_complete(),
            Automaton::Vpa(a) => a.is_complete(),
            Automaton::Pda(a) => a.is_complete(),
        }
    }
}

/// Determinizes a finite or visibly pushdown automaton; the general pushdown
/// kinds have no determinization.
pub fn determinize(aut: &Automaton, cap: usize) -> Result<Automaton, AutomatonError> {
    match aut {
        Automaton::Finite(a) => Ok(Automaton::Finite(a.determinize(cap)?)),
        Automaton::Vpa(a) => Ok(Automaton::Vpa(a.determinize(cap)?)),
        Automaton::Pda(a) => Err(AutomatonError::KindMismatch {
            name: a.name().to_string(),
            op: "determinize",
            req: "a finite or visibly pushdown automaton",
        }),
    }
}

/// Completes a deterministic automaton of any kind.
pub fn complete(aut: &Automaton) -> Result<Automaton, AutomatonError> {
    match aut {
        Automaton::Finite(a) => Ok(Automaton::Finite(a.complete()?)),
        Automaton::Vpa(a) => Ok(Automaton::Vpa(a.complete()?)),
        Automaton::Pda(a) => Ok(Automaton::Pda(a.complete()?)),
    }
}

/// Complements a complete dfa or dvpa by flipping final states. General
/// pushdown automata are not closed under complement, so they are refused.
pub fn complement(aut: &Automaton) -> Result<Automaton, AutomatonError> {
    match aut {
        Automaton::Finite(a) => Ok(Automaton::Finite(a.complement()?)),
        Automaton::Vpa(a) => Ok(Automaton::Vpa(a.complement()?)),
        Automaton::Pda(a) => Err(AutomatonError::KindMismatch {
            name: a.name().to_string(),
            op: "complement",
            req: "a complete dfa or dvpa",
        }),
    }
}

/// The two-state matcher for exactly one letter of the given alphabet; this
/// is the implicit annotation of the next-step operators.
pub fn sigma(name: &str, letters: &[String]) -> Automaton {
    let mut a = FiniteAutomaton::new(name, true);
    for l in letters {
        a.add_letter(l).expect("alphabet letters are distinct");
    }
    a.add_state("i").expect("fresh");
    a.add_state("f").expect("fresh");
    a.set_initial("i").expect("declared");
    a.add_final("f").expect("declared");
    for l in letters {
        a.add_rule("i", Some(l), "f").expect("declared");
    }
    a.validate().expect("by construction");
    Automaton::Finite(a)
}

/// The one-state matcher accepting every word over the given alphabet; this
/// is the implicit annotation of unannotated temporal operators.
pub fn sigma_star(name: &str, letters: &[String]) -> Automaton {
    let mut a = FiniteAutomaton::new(name, true);
    for l in letters {
        a.add_letter(l).expect("alphabet letters are distinct");
    }
    a.add_state("i").expect("fresh");
    a.set_initial("i").expect("declared");
    a.add_final("i").expect("declared");
    for l in letters {
        a.add_rule("i", Some(l), "i").expect("declared");
    }
    a.validate().expect("by construction");
    Automaton::Finite(a)
}
