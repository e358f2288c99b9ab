//! Formulas of CTL with language-annotated until/release operators, their
//! desugaring into the EU/ER core, the size and depth measures, and the
//! classifier that decides which engine (and which determinization, if any)
//! each temporal node needs.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::automata::{analysis, AutKind};
use crate::env::{Env, EnvError};

/// The language annotation on a temporal operator. `Sigma` (single step)
/// and `SigmaStar` (unconstrained) are the defaults inserted for
/// unannotated operators; the others come from the concrete syntax.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LanguageRef {
    Named(String),
    /// A named automaton demanded at a weaker kind, `[pda:anban]`: the
    /// determinism claim is forgotten so the reference classifies (and is
    /// engine-dispatched) as the nondeterministic kind.
    Kinded(AutKind, String),
    Complement(String),
    Regex(String),
    Sigma,
    SigmaStar,
}

impl fmt::Display for LanguageRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageRef::Named(n) => write!(f, "[{n}]"),
            LanguageRef::Kinded(k, n) => write!(f, "[{k}:{n}]"),
            LanguageRef::Complement(n) => write!(f, "[~{n}]"),
            LanguageRef::Regex(p) => write!(f, "[re:{p}]"),
            LanguageRef::Sigma => write!(f, "[re:.]"),
            LanguageRef::SigmaStar => write!(f, "[re:.*]"),
        }
    }
}

impl LanguageRef {
    fn is_default_for_step(&self) -> bool {
        matches!(self, LanguageRef::Sigma)
    }

    fn is_default_for_path(&self) -> bool {
        matches!(self, LanguageRef::SigmaStar)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    EU(Box<Formula>, LanguageRef, Box<Formula>),
    ER(Box<Formula>, LanguageRef, Box<Formula>),
    AU(Box<Formula>, LanguageRef, Box<Formula>),
    AR(Box<Formula>, LanguageRef, Box<Formula>),
    EF(LanguageRef, Box<Formula>),
    AF(LanguageRef, Box<Formula>),
    EG(LanguageRef, Box<Formula>),
    AG(LanguageRef, Box<Formula>),
    EX(LanguageRef, Box<Formula>),
    AX(LanguageRef, Box<Formula>),
}

#[derive(Debug, Error)]
pub enum LogicError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("`{subformula}`: release with the nondeterministic pushdown automaton `{name}` is undecidable")]
    UndecidableRelease { subformula: String, name: String },
}

fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

/// Rewrites a formula into the core fragment: True/False/Prop/Not/And/Or
/// plus EU and ER. All-path operators become negated existentials, F/G
/// expand to until/release with tt/ff, and the step operators X become
/// single-step F (AX via its weak dual, so that `AX ff` holds exactly at
/// dead ends).
pub fn desugar(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => False,
        Prop(p) => Prop(p.clone()),
        Not(x) => not(desugar(x)),
        And(x, y) => And(Box::new(desugar(x)), Box::new(desugar(y))),
        Or(x, y) => Or(Box::new(desugar(x)), Box::new(desugar(y))),
        Implies(x, y) => Or(Box::new(not(desugar(x))), Box::new(desugar(y))),
        EU(x, l, y) => EU(Box::new(desugar(x)), l.clone(), Box::new(desugar(y))),
        ER(x, l, y) => ER(Box::new(desugar(x)), l.clone(), Box::new(desugar(y))),
        AU(x, l, y) => not(ER(
            Box::new(not(desugar(x))),
            l.clone(),
            Box::new(not(desugar(y))),
        )),
        AR(x, l, y) => not(EU(
            Box::new(not(desugar(x))),
            l.clone(),
            Box::new(not(desugar(y))),
        )),
        EF(l, x) => EU(Box::new(True), l.clone(), Box::new(desugar(x))),
        EG(l, x) => ER(Box::new(False), l.clone(), Box::new(desugar(x))),
        AF(l, x) => not(ER(Box::new(False), l.clone(), Box::new(not(desugar(x))))),
        AG(l, x) => not(EU(Box::new(True), l.clone(), Box::new(not(desugar(x))))),
        EX(l, x) => EU(Box::new(True), l.clone(), Box::new(desugar(x))),
        AX(l, x) => not(EU(Box::new(True), l.clone(), Box::new(not(desugar(x))))),
    }
}

/// The direct children of a node.
pub fn children(f: &Formula) -> Vec<&Formula> {
    use Formula::*;
    match f {
        True | False | Prop(_) => vec![],
        Not(x) => vec![x],
        And(x, y) | Or(x, y) | Implies(x, y) => vec![x, y],
        EU(x, _, y) | ER(x, _, y) | AU(x, _, y) | AR(x, _, y) => vec![x, y],
        EF(_, x) | AF(_, x) | EG(_, x) | AG(_, x) | EX(_, x) | AX(_, x) => vec![x],
    }
}

/// All distinct subformulas, children before parents.
pub fn subformulas(f: &Formula) -> Vec<&Formula> {
    let mut seen: HashSet<&Formula> = HashSet::new();
    let mut out = Vec::new();
    fn walk<'a>(f: &'a Formula, seen: &mut HashSet<&'a Formula>, out: &mut Vec<&'a Formula>) {
        if seen.contains(f) {
            return;
        }
        for c in children(f) {
            walk(c, seen, out);
        }
        seen.insert(f);
        out.push(f);
    }
    walk(f, &mut seen, &mut out);
    out
}

/// All language annotations appearing in the formula, deduplicated.
pub fn language_refs(f: &Formula) -> Vec<&LanguageRef> {
    use Formula::*;
    let mut seen: HashSet<&LanguageRef> = HashSet::new();
    let mut out = Vec::new();
    for sub in subformulas(f) {
        let lref = match sub {
            EU(_, l, _) | ER(_, l, _) | AU(_, l, _) | AR(_, l, _) => Some(l),
            EF(l, _) | AF(l, _) | EG(l, _) | AG(l, _) | EX(l, _) | AX(l, _) => Some(l),
            _ => None,
        };
        if let Some(l) = lref {
            if seen.insert(l) {
                out.push(l);
            }
        }
    }
    out
}

/// Number of distinct subformulas of the desugared core, plus the sizes
/// (states + rules) of the distinct automata referenced. Two references
/// count once iff they resolve to the same automaton.
pub fn formula_size(f: &Formula, env: &Env) -> Result<usize, LogicError> {
    let core = desugar(f);
    let mut size = subformulas(&core).len();
    let mut counted: HashSet<String> = HashSet::new();
    for lref in language_refs(&core) {
        let aut = env.resolve(lref)?;
        if counted.insert(aut.name().to_string()) {
            size += aut.size();
        }
    }
    Ok(size)
}

/// Maximum nesting depth of temporal operators.
pub fn temporal_depth(f: &Formula) -> usize {
    use Formula::*;
    let here = match f {
        EU(..) | ER(..) | AU(..) | AR(..) | EF(..) | AF(..) | EG(..) | AG(..) | EX(..)
        | AX(..) => 1,
        _ => 0,
    };
    here + children(f).iter().map(|c| temporal_depth(c)).max().unwrap_or(0)
}

/// Maximum word-length measure over all referenced automata (including the
/// implicit single-step and unconstrained languages); 0 when no temporal
/// operator occurs. Errors if a referenced automaton has an empty language.
pub fn automata_depth(f: &Formula, env: &Env) -> Result<usize, LogicError> {
    let mut depth = 0;
    for lref in language_refs(f) {
        let aut = env.resolve(lref)?;
        depth = depth.max(analysis::automaton_depth(&aut).map_err(EnvError::Automaton)?);
    }
    Ok(depth)
}

/// How a temporal node will be executed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanAction {
    /// Until supports every automaton kind directly.
    UntilEngine,
    /// Release on an already-deterministic complete-able kind.
    ReleaseDirect,
    /// Release on a kind that is determinized first.
    ReleaseDeterminize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub subformula: String,
    pub kind: AutKind,
    pub action: PlanAction,
}

/// Walks a desugared formula and decides, per temporal node, which engine
/// runs it. Rejects release nodes annotated with a nondeterministic
/// pushdown automaton — that combination has no decision procedure.
pub fn classify(core: &Formula, env: &Env) -> Result<Vec<PlanStep>, LogicError> {
    let mut plan = Vec::new();
    for sub in subformulas(core) {
        match sub {
            Formula::EU(_, l, _) => {
                let aut = env.resolve(l)?;
                plan.push(PlanStep {
                    subformula: sub.to_string(),
                    kind: aut.kind(),
                    action: PlanAction::UntilEngine,
                });
            }
            Formula::ER(_, l, _) => {
                let aut = env.resolve(l)?;
                let action = match aut.kind() {
                    AutKind::Dfa | AutKind::Dvpa | AutKind::Dpda => PlanAction::ReleaseDirect,
                    AutKind::Nfa | AutKind::Vpa => PlanAction::ReleaseDeterminize,
                    AutKind::Pda => {
                        return Err(LogicError::UndecidableRelease {
                            subformula: sub.to_string(),
                            name: aut.name().to_string(),
                        });
                    }
                };
                plan.push(PlanStep {
                    subformula: sub.to_string(),
                    kind: aut.kind(),
                    action,
                });
            }
            _ => {}
        }
    }
    Ok(plan)
}

/// Operator precedence for rendering: higher binds tighter.
fn precedence(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        Implies(..) => 1,
        Or(..) => 2,
        And(..) => 3,
        Not(_) | EF(..) | AF(..) | EG(..) | AG(..) | EX(..) | AX(..) => 4,
        _ => 5,
    }
}

impl fmt::Display for Formula {
    /// Concrete syntax; defaulted annotations (Σ* on path operators, Σ on
    /// step operators) are omitted, so parsed formulas print as written
    /// modulo whitespace. Explicit Σ/Σ* elsewhere fall back to `re:`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;

        fn lang(l: &LanguageRef, step: bool) -> String {
            let defaulted =
                if step { l.is_default_for_step() } else { l.is_default_for_path() };
            if defaulted {
                String::new()
            } else {
                l.to_string()
            }
        }

        fn child(f: &Formula, parent_prec: u8, strict: bool) -> String {
            let p = precedence(f);
            if p < parent_prec || (strict && p == parent_prec) {
                format!("({f})")
            } else {
                format!("{f}")
            }
        }

        match self {
            True => write!(f, "tt"),
            False => write!(f, "ff"),
            Prop(p) => write!(f, "{p}"),
            Not(x) => write!(f, "!{}", child(x, 5, false)),
            And(x, y) => write!(f, "{} & {}", child(x, 3, true), child(y, 3, false)),
            Or(x, y) => write!(f, "{} | {}", child(x, 2, true), child(y, 2, false)),
            Implies(x, y) => write!(f, "{} -> {}", child(x, 1, true), child(y, 1, false)),
            EU(x, l, y) => write!(f, "E({} U{} {})", x, lang(l, false), y),
            ER(x, l, y) => write!(f, "E({} R{} {})", x, lang(l, false), y),
            AU(x, l, y) => write!(f, "A({} U{} {})", x, lang(l, false), y),
            AR(x, l, y) => write!(f, "A({} R{} {})", x, lang(l, false), y),
            EF(l, x) => write!(f, "EF{} {}", lang(l, false), child(x, 4, false)),
            AF(l, x) => write!(f, "AF{} {}", lang(l, false), child(x, 4, false)),
            EG(l, x) => write!(f, "EG{} {}", lang(l, false), child(x, 4, false)),
            AG(l, x) => write!(f, "AG{} {}", lang(l, false), child(x, 4, false)),
            EX(l, x) => write!(f, "EX{} {}", lang(l, true), child(x, 4, false)),
            AX(l, x) => write!(f, "AX{} {}", lang(l, true), child(x, 4, false)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Automaton, FiniteAutomaton};

    fn prop(p: &str) -> Formula {
        Formula::Prop(p.to_string())
    }

    fn named(n: &str) -> LanguageRef {
        LanguageRef::Named(n.to_string())
    }

    /// 2 states, 2 rules: accepts a+.
    fn two_by_two() -> Automaton {
        let mut a = FiniteAutomaton::new("A", false);
        a.add_state("s0").unwrap();
        a.add_state("s1").unwrap();
        a.add_letter("a").unwrap();
        a.set_initial("s0").unwrap();
        a.add_final("s1").unwrap();
        a.add_rule("s0", Some("a"), "s1").unwrap();
        a.add_rule("s1", Some("a"), "s1").unwrap();
        a.validate().unwrap();
        Automaton::Finite(a)
    }

    fn env_with_a() -> Env {
        let mut env = Env::new(&["a".to_string(), "b".to_string()]);
        env.insert(two_by_two()).unwrap();
        env
    }

    #[test]
    fn desugar_rewrites_into_the_core() {
        use Formula::*;
        // EF[A] p becomes E(tt U[A] p)
        let f = EF(named("A"), Box::new(prop("p")));
        assert_eq!(
            desugar(&f),
            EU(Box::new(True), named("A"), Box::new(prop("p")))
        );
        // AX p becomes !E(tt U[Σ] !p) — the weak dual, true at dead ends
        let f = AX(LanguageRef::Sigma, Box::new(prop("p")));
        assert_eq!(
            desugar(&f),
            Not(Box::new(EU(
                Box::new(True),
                LanguageRef::Sigma,
                Box::new(Not(Box::new(prop("p"))))
            )))
        );
        // A(p U[A] q) becomes !E(!p R[A] !q)
        let f = AU(Box::new(prop("p")), named("A"), Box::new(prop("q")));
        assert_eq!(
            desugar(&f),
            Not(Box::new(ER(
                Box::new(Not(Box::new(prop("p")))),
                named("A"),
                Box::new(Not(Box::new(prop("q"))))
            )))
        );
        // AG[A] p becomes !E(tt U[A] !p)
        let f = AG(named("A"), Box::new(prop("p")));
        assert_eq!(
            desugar(&f),
            Not(Box::new(EU(
                Box::new(True),
                named("A"),
                Box::new(Not(Box::new(prop("p"))))
            )))
        );
        // implication is unfolded
        let f = Implies(Box::new(prop("p")), Box::new(prop("q")));
        assert_eq!(desugar(&f), Or(Box::new(Not(Box::new(prop("p")))), Box::new(prop("q"))));
    }

    #[test]
    fn desugar_is_idempotent() {
        use Formula::*;
        let formulas = vec![
            EF(named("A"), Box::new(prop("p"))),
            AX(LanguageRef::Sigma, Box::new(prop("p"))),
            AR(Box::new(prop("p")), LanguageRef::SigmaStar, Box::new(prop("q"))),
            AF(named("A"), Box::new(Implies(Box::new(prop("p")), Box::new(prop("q"))))),
            EG(LanguageRef::Regex("a*".into()), Box::new(prop("p"))),
        ];
        for f in formulas {
            let once = desugar(&f);
            assert_eq!(desugar(&once), once, "{f}");
        }
    }

    #[test]
    fn size_counts_unique_core_subformulas_plus_automata() {
        let env = env_with_a();
        assert_eq!(formula_size(&prop("q"), &env).unwrap(), 1);
        let f = Formula::Or(Box::new(prop("q")), Box::new(prop("q")));
        assert_eq!(formula_size(&f, &env).unwrap(), 2);
        // EF[A] q -> E(tt U[A] q): subformulas {tt, q, EU} = 3; A has
        // 2 states + 2 rules
        let f = Formula::EF(named("A"), Box::new(prop("q")));
        assert_eq!(formula_size(&f, &env).unwrap(), 7);
        // referencing A twice counts its size once
        let f = Formula::And(
            Box::new(Formula::EF(named("A"), Box::new(prop("q")))),
            Box::new(Formula::EG(named("A"), Box::new(prop("q")))),
        );
        // cores: EU(tt,A,q) and ER(ff,A,q): {tt, q, EU, ff, ER, And} = 6, +4
        assert_eq!(formula_size(&f, &env).unwrap(), 10);
    }

    #[test]
    fn depth_measures() {
        let env = env_with_a();
        let f = Formula::EF(named("A"), Box::new(prop("q")));
        assert_eq!(temporal_depth(&f), 1);
        assert_eq!(temporal_depth(&Formula::Or(Box::new(prop("q")), Box::new(prop("p")))), 0);
        let nested = Formula::AG(
            LanguageRef::SigmaStar,
            Box::new(Formula::EF(named("A"), Box::new(prop("q")))),
        );
        assert_eq!(temporal_depth(&nested), 2);

        // A accepts a+ (infinite): shortest word "a" -> depth 1
        assert_eq!(automata_depth(&f, &env).unwrap(), 1);
        // Σ* contributes 0; embedding f under it keeps the max
        assert_eq!(automata_depth(&nested, &env).unwrap(), 1);
        assert_eq!(automata_depth(&prop("q"), &env).unwrap(), 0);
        assert!(temporal_depth(&nested) >= temporal_depth(&f));
    }

    #[test]
    fn empty_language_reference_is_an_error() {
        let mut env = Env::new(&["a".to_string()]);
        let mut a = FiniteAutomaton::new("void", false);
        a.add_state("s0").unwrap();
        a.add_letter("a").unwrap();
        a.set_initial("s0").unwrap();
        a.validate().unwrap();
        env.insert(Automaton::Finite(a)).unwrap();
        let f = Formula::EF(named("void"), Box::new(prop("q")));
        assert!(matches!(
            automata_depth(&f, &env),
            Err(LogicError::Env(EnvError::Automaton(
                crate::automata::AutomatonError::EmptyLanguage { .. }
            )))
        ));
    }

    #[test]
    fn classify_dispatches_by_kind() {
        let mut env = env_with_a();
        env.insert(Automaton::Pda(crate::automata::pda::tests::anban())).unwrap();
        env.insert(Automaton::Vpa(crate::automata::vpa::tests::anbn())).unwrap();

        // until takes any kind, even the nondeterministic pushdown one
        let f = desugar(&Formula::EF(named("anban"), Box::new(prop("q"))));
        let plan = classify(&f, &env).unwrap();
        assert_eq!(plan.len(), 1);
        assert_eq!(plan[0].kind, AutKind::Dpda);
        assert_eq!(plan[0].action, PlanAction::UntilEngine);

        // release determinizes the nfa
        let f = desugar(&Formula::EG(named("A"), Box::new(prop("q"))));
        let plan = classify(&f, &env).unwrap();
        assert_eq!(plan[0].action, PlanAction::ReleaseDeterminize);

        // release on a vpa also determinizes
        let f = desugar(&Formula::AF(named("anbn"), Box::new(prop("q"))));
        let plan = classify(&f, &env).unwrap();
        assert_eq!(plan[0].kind, AutKind::Vpa);
        assert_eq!(plan[0].action, PlanAction::ReleaseDeterminize);
    }

    #[test]
    fn classify_rejects_nondeterministic_pushdown_release() {
        let mut env = env_with_a();
        // a genuinely nondeterministic pda: two rules on the same trigger
        let mut nd = crate::automata::PdaAutomaton::new("nd", false);
        nd.add_state("q0").unwrap();
        nd.add_state("q1").unwrap();
        nd.add_letter("a").unwrap();
        nd.add_stack_sym("Z").unwrap();
        nd.set_bottom("Z").unwrap();
        nd.set_initial("q0").unwrap();
        nd.add_final("q1").unwrap();
        nd.add_rule("q0", "a", "Z", "q0", &["Z"]).unwrap();
        nd.add_rule("q0", "a", "Z", "q1", &["Z"]).unwrap();
        nd.validate().unwrap();
        env.insert(Automaton::Pda(nd)).unwrap();

        let f = desugar(&Formula::EG(named("nd"), Box::new(prop("q"))));
        let err = classify(&f, &env).unwrap_err();
        match err {
            LogicError::UndecidableRelease { subformula, name } => {
                assert_eq!(name, "nd");
                assert!(subformula.contains("R[nd]"), "subformula = {subformula}");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn display_uses_concrete_syntax() {
        use Formula::*;
        let f = And(
            Box::new(Not(Box::new(prop("p")))),
            Box::new(Or(Box::new(prop("q")), Box::new(prop("r")))),
        );
        assert_eq!(f.to_string(), "!p & (q | r)");

        let f = EU(Box::new(prop("p")), named("A"), Box::new(prop("q")));
        assert_eq!(f.to_string(), "E(p U[A] q)");

        let f = ER(Box::new(prop("p")), LanguageRef::SigmaStar, Box::new(prop("q")));
        assert_eq!(f.to_string(), "E(p R q)");

        let f = AX(LanguageRef::Sigma, Box::new(False));
        assert_eq!(f.to_string(), "AX ff");

        let f = AX(named("A"), Box::new(False));
        assert_eq!(f.to_string(), "AX[A] ff");

        let f = AG(
            LanguageRef::Complement("L".to_string()),
            Box::new(EX(named("c"), Box::new(True))),
        );
        assert_eq!(f.to_string(), "AG[~L] EX[c] tt");

        let f = Implies(
            Box::new(prop("p")),
            Box::new(Implies(Box::new(prop("q")), Box::new(prop("r")))),
        );
        assert_eq!(f.to_string(), "p -> q -> r");
        let g = Implies(
            Box::new(Implies(Box::new(prop("p")), Box::new(prop("q")))),
            Box::new(prop("r")),
        );
        assert_eq!(g.to_string(), "(p -> q) -> r");
    }
}
