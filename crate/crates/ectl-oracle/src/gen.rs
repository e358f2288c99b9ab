//! Seeded instance generators and hand-built fixture automata for the
//! differential batteries: random systems, formulas, automata of every
//! kind, normalized pushdown systems, and a catalogue of languages whose
//! emptiness is known by construction.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ectl::automata::{Automaton, FiniteAutomaton, LetterClass, PdaAutomaton, VpaAutomaton};
use ectl::logic::{Formula, LanguageRef};
use ectl::lts::Lts;
use ectl::pds::PushdownSystem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random system over actions {a, b} and propositions {p, q}. States may
/// be dead ends; edges and labels are drawn independently.
pub fn random_lts(rng: &mut ChaCha8Rng, max_states: usize) -> Lts {
    let n = rng.gen_range(1..=max_states);
    let mut lts = Lts::new("sys").expect("identifier");
    lts.add_action("a").expect("fresh");
    lts.add_action("b").expect("fresh");
    lts.add_prop("p").expect("fresh");
    lts.add_prop("q").expect("fresh");
    for i in 0..n {
        let mut props: Vec<&str> = Vec::new();
        if rng.gen_bool(0.4) {
            props.push("p");
        }
        if rng.gen_bool(0.4) {
            props.push("q");
        }
        lts.add_state(&format!("s{i}"), &props).expect("fresh");
    }
    for i in 0..n {
        let out = rng.gen_range(0..=3);
        for _ in 0..out {
            let act = if rng.gen_bool(0.5) { "a" } else { "b" };
            let dst = rng.gen_range(0..n);
            lts.add_transition(&format!("s{i}"), act, &format!("s{dst}"))
                .expect("states exist");
        }
    }
    lts
}

/// A random plain formula (no annotations beyond the implicit defaults)
/// over the propositions of [`random_lts`], with operator nesting at most
/// `depth`.
pub fn random_plain_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
        0 => Formula::True,
        1 => Formula::False,
        2 => Formula::Prop("p".to_string()),
        _ => Formula::Prop("q".to_string()),
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_plain_formula(rng, depth - 1));
    match rng.gen_range(0..16) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Implies(sub(rng), sub(rng)),
        4 => Formula::EX(LanguageRef::Sigma, sub(rng)),
        5 => Formula::AX(LanguageRef::Sigma, sub(rng)),
        6 => Formula::EF(LanguageRef::SigmaStar, sub(rng)),
        7 => Formula::AF(LanguageRef::SigmaStar, sub(rng)),
        8 => Formula::EG(LanguageRef::SigmaStar, sub(rng)),
        9 => Formula::AG(LanguageRef::SigmaStar, sub(rng)),
        10 => Formula::EU(sub(rng), LanguageRef::SigmaStar, sub(rng)),
        11 => Formula::AU(sub(rng), LanguageRef::SigmaStar, sub(rng)),
        12 => Formula::ER(sub(rng), LanguageRef::SigmaStar, sub(rng)),
        13 => Formula::AR(sub(rng), LanguageRef::SigmaStar, sub(rng)),
        _ => leaf(rng),
    }
}

/// A random finite automaton. Deterministic instances get at most one rule
/// per (state, letter) and no ε edges; nondeterministic ones draw an
/// arbitrary rule soup, with ε edges when `allow_eps` is set.
pub fn random_finite(
    rng: &mut ChaCha8Rng,
    name: &str,
    max_states: usize,
    deterministic: bool,
    allow_eps: bool,
    letters: &[&str],
) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let mut f = FiniteAutomaton::new(name, deterministic);
    for l in letters {
        f.add_letter(l).expect("fresh letter");
    }
    for i in 0..n {
        f.add_state(&format!("q{i}")).expect("fresh state");
    }
    f.set_initial("q0").expect("exists");
    for i in 0..n {
        if rng.gen_bool(0.35) {
            f.add_final(&format!("q{i}")).expect("exists");
        }
    }
    if deterministic {
        for i in 0..n {
            for l in letters {
                if rng.gen_bool(0.85) {
                    let dst = rng.gen_range(0..n);
                    f.add_rule(&format!("q{i}"), Some(l), &format!("q{dst}"))
                        .expect("parts exist");
                }
            }
        }
    } else {
        let rules = rng.gen_range(0..=2 * n * letters.len());
        for _ in 0..rules {
            let src = rng.gen_range(0..n);
            let dst = rng.gen_range(0..n);
            let letter = if allow_eps && rng.gen_bool(0.2) {
                None
            } else {
                Some(*letters.choose(rng).expect("nonempty"))
            };
            f.add_rule(&format!("q{src}"), letter, &format!("q{dst}"))
                .expect("parts exist");
        }
    }
    let mut aut = Automaton::Finite(f);
    aut.validate().expect("generated automaton is well-formed");
    aut
}

/// A random visibly pushdown automaton over the fixed partition
/// a = call, b = return, c = internal, with stack symbols {x, y}.
pub fn random_vpa(
    rng: &mut ChaCha8Rng,
    name: &str,
    max_states: usize,
    deterministic: bool,
) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let mut v = VpaAutomaton::new(name, deterministic);
    v.add_letter("a", LetterClass::Call).expect("fresh");
    v.add_letter("b", LetterClass::Return).expect("fresh");
    v.add_letter("c", LetterClass::Internal).expect("fresh");
    v.add_stack_sym("x").expect("fresh");
    v.add_stack_sym("y").expect("fresh");
    v.add_stack_sym("bot").expect("fresh");
    v.set_bottom("bot").expect("exists");
    for i in 0..n {
        v.add_state(&format!("q{i}")).expect("fresh");
    }
    v.set_initial("q0").expect("exists");
    for i in 0..n {
        if rng.gen_bool(0.35) {
            v.add_final(&format!("q{i}")).expect("exists");
        }
    }
    let q = |i: usize| format!("q{i}");
    for i in 0..n {
        // calls: push x or y
        if rng.gen_bool(0.8) {
            let push = if rng.gen_bool(0.5) { "x" } else { "y" };
            v.add_call_rule(&q(i), "a", push, &q(rng.gen_range(0..n))).expect("parts");
            if !deterministic && rng.gen_bool(0.3) {
                v.add_call_rule(&q(i), "a", "y", &q(rng.gen_range(0..n))).expect("parts");
            }
        }
        // returns: one rule per tested top, dropped at random
        for top in ["x", "y", "bot"] {
            if rng.gen_bool(0.6) {
                v.add_return_rule(&q(i), "b", top, &q(rng.gen_range(0..n))).expect("parts");
            }
        }
        if rng.gen_bool(0.7) {
            v.add_internal_rule(&q(i), "c", &q(rng.gen_range(0..n))).expect("parts");
        }
        if !deterministic && rng.gen_bool(0.3) {
            v.add_internal_rule(&q(i), "c", &q(rng.gen_range(0..n))).expect("parts");
        }
    }
    let mut aut = Automaton::Vpa(v);
    aut.validate().expect("generated automaton is well-formed");
    aut
}

/// A random input pushdown automaton over {a, b} with stack symbols {x, y}.
/// Deterministic instances keep at most one rule per (state, letter, top).
pub fn random_pda(
    rng: &mut ChaCha8Rng,
    name: &str,
    max_states: usize,
    deterministic: bool,
) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let mut p = PdaAutomaton::new(name, deterministic);
    p.add_letter("a").expect("fresh");
    p.add_letter("b").expect("fresh");
    p.add_stack_sym("x").expect("fresh");
    p.add_stack_sym("y").expect("fresh");
    p.add_stack_sym("bot").expect("fresh");
    p.set_bottom("bot").expect("exists");
    for i in 0..n {
        p.add_state(&format!("q{i}")).expect("fresh");
    }
    p.set_initial("q0").expect("exists");
    for i in 0..n {
        if rng.gen_bool(0.35) {
            p.add_final(&format!("q{i}")).expect("exists");
        }
    }
    let q = |i: usize| format!("q{i}");
    let mut keys = std::collections::BTreeSet::new();
    let rules = rng.gen_range(1..=3 * n);
    for _ in 0..rules {
        let src = rng.gen_range(0..n);
        let letter = if rng.gen_bool(0.5) { "a" } else { "b" };
        let top = *["x", "y", "bot"].choose(rng).expect("nonempty");
        if deterministic && !keys.insert((src, letter, top)) {
            continue;
        }
        let dst = rng.gen_range(0..n);
        // on the bottom marker the replacement must keep it, last
        let repl: Vec<&str> = if top == "bot" {
            match rng.gen_range(0..3) {
                0 => vec!["bot"],
                1 => vec!["x", "bot"],
                _ => vec!["y", "bot"],
            }
        } else {
            match rng.gen_range(0..5) {
                0 => vec![],
                1 => vec!["x"],
                2 => vec!["y"],
                3 => vec!["x", "x"],
                _ => vec!["y", "x"],
            }
        };
        p.add_rule(&q(src), letter, top, &q(dst), &repl).expect("parts");
    }
    let mut aut = Automaton::Pda(p);
    aut.validate().expect("generated automaton is well-formed");
    aut
}

/// A random until/release instance for the finite-product battery: a named
/// dfa or nfa over a subset of the system actions, and a formula applying
/// it to two shallow plain operands.
pub fn random_annotated_instance(rng: &mut ChaCha8Rng) -> (Formula, Automaton) {
    let letters: &[&str] = if rng.gen_bool(0.7) { &["a", "b"] } else { &["a"] };
    let deterministic = rng.gen_bool(0.5);
    let aut = random_finite(rng, "k4aut", 5, deterministic, !deterministic, letters);
    let x = Box::new(random_plain_formula(rng, 2));
    let y = Box::new(random_plain_formula(rng, 2));
    let annot = LanguageRef::Named("k4aut".to_string());
    let formula = if rng.gen_bool(0.5) {
        Formula::EU(x, annot, y)
    } else {
        Formula::ER(x, annot, y)
    };
    (formula, aut)
}

/// A random normalized pushdown system: at most `max_controls` controls,
/// `max_syms` stack symbols, `max_rules` rules, every push of length ≤ 2.
pub fn random_pds(
    rng: &mut ChaCha8Rng,
    max_controls: usize,
    max_syms: usize,
    max_rules: usize,
) -> PushdownSystem {
    let nc = rng.gen_range(1..=max_controls);
    let ns = rng.gen_range(1..=max_syms);
    let mut pds = PushdownSystem::new("rnd");
    let c = |i: usize| format!("p{i}");
    let g = |i: usize| format!("g{i}");
    for i in 0..nc {
        pds.intern_control(&c(i));
    }
    for i in 0..ns {
        pds.intern_sym(&g(i));
    }
    let rules = rng.gen_range(1..=max_rules);
    for _ in 0..rules {
        let from = c(rng.gen_range(0..nc));
        let sym = g(rng.gen_range(0..ns));
        let to = c(rng.gen_range(0..nc));
        let push: Vec<String> = match rng.gen_range(0..4) {
            0 => vec![],
            1 => vec![g(rng.gen_range(0..ns))],
            _ => vec![g(rng.gen_range(0..ns)), g(rng.gen_range(0..ns))],
        };
        let push_refs: Vec<&str> = push.iter().map(|s| s.as_str()).collect();
        pds.add_rule_named(&from, &sym, &to, &push_refs);
    }
    pds
}

// ---------------------------------------------------------------------
// fixture automata with known languages
// ---------------------------------------------------------------------

/// `{ aⁿbⁿ : n ≥ 1 }` as a (nondeterministically declared) visibly
/// pushdown automaton: a calls, b returns, first call pushes a marker so
/// the last return can land in the accepting state.
pub fn vpa_anbn() -> Automaton {
    let mut v = VpaAutomaton::new("anbn", false);
    v.add_letter("a", LetterClass::Call).expect("fresh");
    v.add_letter("b", LetterClass::Return).expect("fresh");
    v.add_stack_sym("f").expect("fresh");
    v.add_stack_sym("x").expect("fresh");
    v.add_stack_sym("bot").expect("fresh");
    v.set_bottom("bot").expect("exists");
    for s in ["q0", "qa", "qb", "qf"] {
        v.add_state(s).expect("fresh");
    }
    v.set_initial("q0").expect("exists");
    v.add_final("qf").expect("exists");
    v.add_call_rule("q0", "a", "f", "qa").expect("parts");
    v.add_call_rule("qa", "a", "x", "qa").expect("parts");
    v.add_return_rule("qa", "b", "x", "qb").expect("parts");
    v.add_return_rule("qa", "b", "f", "qf").expect("parts");
    v.add_return_rule("qb", "b", "x", "qb").expect("parts");
    v.add_return_rule("qb", "b", "f", "qf").expect("parts");
    let mut aut = Automaton::Vpa(v);
    aut.validate().expect("well-formed");
    aut
}

/// `{ aⁿbaⁿ : n ≥ 0 }` as a deterministic input pushdown automaton; the
/// first push is a marker so the final pop is visible.
pub fn dpda_anban() -> Automaton {
    let mut p = PdaAutomaton::new("anban", true);
    p.add_letter("a").expect("fresh");
    p.add_letter("b").expect("fresh");
    p.add_stack_sym("f").expect("fresh");
    p.add_stack_sym("x").expect("fresh");
    p.add_stack_sym("bot").expect("fresh");
    p.set_bottom("bot").expect("exists");
    for s in ["q0", "q1", "qf"] {
        p.add_state(s).expect("fresh");
    }
    p.set_initial("q0").expect("exists");
    p.add_final("qf").expect("exists");
    p.add_rule("q0", "a", "bot", "q0", &["f", "bot"]).expect("parts");
    p.add_rule("q0", "a", "f", "q0", &["x", "f"]).expect("parts");
    p.add_rule("q0", "a", "x", "q0", &["x", "x"]).expect("parts");
    p.add_rule("q0", "b", "bot", "qf", &["bot"]).expect("parts");
    p.add_rule("q0", "b", "f", "q1", &["f"]).expect("parts");
    p.add_rule("q0", "b", "x", "q1", &["x"]).expect("parts");
    p.add_rule("q1", "a", "x", "q1", &[]).expect("parts");
    p.add_rule("q1", "a", "f", "qf", &[]).expect("parts");
    let mut aut = Automaton::Pda(p);
    aut.validate().expect("well-formed");
    aut
}

/// Balanced produce/consume traces with interleaved refreshes: p calls,
/// c returns, r internal; a word is accepted when every produce has been
/// consumed and no consume ever ran ahead.
pub fn dvpa_nbu() -> Automaton {
    let mut v = VpaAutomaton::new("nbu", true);
    v.add_letter("p", LetterClass::Call).expect("fresh");
    v.add_letter("c", LetterClass::Return).expect("fresh");
    v.add_letter("r", LetterClass::Internal).expect("fresh");
    v.add_stack_sym("f").expect("fresh");
    v.add_stack_sym("x").expect("fresh");
    v.add_stack_sym("bot").expect("fresh");
    v.set_bottom("bot").expect("exists");
    v.add_state("bal").expect("fresh");
    v.add_state("open").expect("fresh");
    v.set_initial("bal").expect("exists");
    v.add_final("bal").expect("exists");
    v.add_call_rule("bal", "p", "f", "open").expect("parts");
    v.add_call_rule("open", "p", "x", "open").expect("parts");
    v.add_return_rule("open", "c", "x", "open").expect("parts");
    v.add_return_rule("open", "c", "f", "bal").expect("parts");
    v.add_internal_rule("bal", "r", "bal").expect("parts");
    v.add_internal_rule("open", "r", "open").expect("parts");
    let mut aut = Automaton::Vpa(v);
    aut.validate().expect("well-formed");
    aut
}

/// Odd-length words over {a}, declared as a (nondeterministic-kind) input
/// pushdown automaton so until checks take the product route.
pub fn pda_odd_len() -> Automaton {
    let mut p = PdaAutomaton::new("podd", false);
    p.add_letter("a").expect("fresh");
    p.add_stack_sym("bot").expect("fresh");
    p.set_bottom("bot").expect("exists");
    p.add_state("q0").expect("fresh");
    p.add_state("q1").expect("fresh");
    p.set_initial("q0").expect("exists");
    p.add_final("q1").expect("exists");
    p.add_rule("q0", "a", "bot", "q1", &["bot"]).expect("parts");
    p.add_rule("q1", "a", "bot", "q0", &["bot"]).expect("parts");
    let mut aut = Automaton::Pda(p);
    aut.validate().expect("well-formed");
    aut
}

/// Even-length words over {a} (including ε) as a deterministic input
/// pushdown automaton, for the direct release route.
pub fn dpda_even_len() -> Automaton {
    let mut p = PdaAutomaton::new("deven", true);
    p.add_letter("a").expect("fresh");
    p.add_stack_sym("bot").expect("fresh");
    p.set_bottom("bot").expect("exists");
    p.add_state("q0").expect("fresh");
    p.add_state("q1").expect("fresh");
    p.set_initial("q0").expect("exists");
    p.add_final("q0").expect("exists");
    p.add_rule("q0", "a", "bot", "q1", &["bot"]).expect("parts");
    p.add_rule("q1", "a", "bot", "q0", &["bot"]).expect("parts");
    let mut aut = Automaton::Pda(p);
    aut.validate().expect("well-formed");
    aut
}

fn finite_fixture(name: &str, deterministic: bool, build: impl FnOnce(&mut FiniteAutomaton)) -> Automaton {
    let mut f = FiniteAutomaton::new(name, deterministic);
    build(&mut f);
    let mut aut = Automaton::Finite(f);
    aut.validate().expect("well-formed");
    aut
}

fn vpa_fixture(name: &str, deterministic: bool, build: impl FnOnce(&mut VpaAutomaton)) -> Automaton {
    let mut v = VpaAutomaton::new(name, deterministic);
    build(&mut v);
    let mut aut = Automaton::Vpa(v);
    aut.validate().expect("well-formed");
    aut
}

fn pda_fixture(name: &str, deterministic: bool, build: impl FnOnce(&mut PdaAutomaton)) -> Automaton {
    let mut p = PdaAutomaton::new(name, deterministic);
    build(&mut p);
    let mut aut = Automaton::Pda(p);
    aut.validate().expect("well-formed");
    aut
}

/// A fixture automaton paired with its known emptiness verdict.
pub struct LangFixture {
    pub aut: Automaton,
    pub empty: bool,
}

/// Hand-built languages in all six kinds: the universal language, the
/// empty language and even-length a-blocks per kind, plus the three
/// pushdown classics. Emptiness is known by construction.
pub fn emptiness_catalogue() -> Vec<LangFixture> {
    let mut out = Vec::new();
    let mut push = |aut: Automaton, empty: bool| out.push(LangFixture { aut, empty });

    for det in [true, false] {
        let tag = if det { "d" } else { "n" };
        push(
            finite_fixture(&format!("{tag}fin_all"), det, |f| {
                f.add_letter("a").unwrap();
                f.add_letter("b").unwrap();
                f.add_state("z").unwrap();
                f.set_initial("z").unwrap();
                f.add_final("z").unwrap();
                f.add_rule("z", Some("a"), "z").unwrap();
                f.add_rule("z", Some("b"), "z").unwrap();
            }),
            false,
        );
        push(
            finite_fixture(&format!("{tag}fin_void"), det, |f| {
                f.add_letter("a").unwrap();
                f.add_state("z").unwrap();
                f.add_state("island").unwrap();
                f.set_initial("z").unwrap();
                f.add_final("island").unwrap();
                f.add_rule("z", Some("a"), "z").unwrap();
            }),
            true,
        );
        push(
            finite_fixture(&format!("{tag}fin_even"), det, |f| {
                f.add_letter("a").unwrap();
                f.add_state("e").unwrap();
                f.add_state("o").unwrap();
                f.set_initial("e").unwrap();
                f.add_final("e").unwrap();
                f.add_rule("e", Some("a"), "o").unwrap();
                f.add_rule("o", Some("a"), "e").unwrap();
            }),
            false,
        );
        push(
            vpa_fixture(&format!("{tag}vpa_all"), det, |v| {
                v.add_letter("a", LetterClass::Call).unwrap();
                v.add_letter("b", LetterClass::Return).unwrap();
                v.add_letter("c", LetterClass::Internal).unwrap();
                v.add_stack_sym("x").unwrap();
                v.add_stack_sym("bot").unwrap();
                v.set_bottom("bot").unwrap();
                v.add_state("z").unwrap();
                v.set_initial("z").unwrap();
                v.add_final("z").unwrap();
                v.add_call_rule("z", "a", "x", "z").unwrap();
                v.add_return_rule("z", "b", "x", "z").unwrap();
                v.add_return_rule("z", "b", "bot", "z").unwrap();
                v.add_internal_rule("z", "c", "z").unwrap();
            }),
            false,
        );
        push(
            vpa_fixture(&format!("{tag}vpa_void"), det, |v| {
                v.add_letter("c", LetterClass::Internal).unwrap();
                v.add_stack_sym("bot").unwrap();
                v.set_bottom("bot").unwrap();
                v.add_state("z").unwrap();
                v.set_initial("z").unwrap();
                v.add_internal_rule("z", "c", "z").unwrap();
            }),
            true,
        );
        push(
            vpa_fixture(&format!("{tag}vpa_even"), det, |v| {
                v.add_letter("a", LetterClass::Internal).unwrap();
                v.add_stack_sym("bot").unwrap();
                v.set_bottom("bot").unwrap();
                v.add_state("e").unwrap();
                v.add_state("o").unwrap();
                v.set_initial("e").unwrap();
                v.add_final("e").unwrap();
                v.add_internal_rule("e", "a", "o").unwrap();
                v.add_internal_rule("o", "a", "e").unwrap();
            }),
            false,
        );
        push(
            pda_fixture(&format!("{tag}pda_all"), det, |p| {
                p.add_letter("a").unwrap();
                p.add_letter("b").unwrap();
                p.add_stack_sym("bot").unwrap();
                p.set_bottom("bot").unwrap();
                p.add_state("z").unwrap();
                p.set_initial("z").unwrap();
                p.add_final("z").unwrap();
                p.add_rule("z", "a", "bot", "z", &["bot"]).unwrap();
                p.add_rule("z", "b", "bot", "z", &["bot"]).unwrap();
            }),
            false,
        );
        push(
            pda_fixture(&format!("{tag}pda_void"), det, |p| {
                p.add_letter("a").unwrap();
                p.add_stack_sym("bot").unwrap();
                p.set_bottom("bot").unwrap();
                p.add_state("z").unwrap();
                p.set_initial("z").unwrap();
                p.add_rule("z", "a", "bot", "z", &["bot"]).unwrap();
            }),
            true,
        );
        push(
            pda_fixture(&format!("{tag}pda_even"), det, |p| {
                p.add_letter("a").unwrap();
                p.add_stack_sym("bot").unwrap();
                p.set_bottom("bot").unwrap();
                p.add_state("e").unwrap();
                p.add_state("o").unwrap();
                p.set_initial("e").unwrap();
                p.add_final("e").unwrap();
                p.add_rule("e", "a", "bot", "o", &["bot"]).unwrap();
                p.add_rule("o", "a", "bot", "e", &["bot"]).unwrap();
            }),
            false,
        );
    }
    push(vpa_anbn(), false);
    push(dpda_anban(), false);
    push(dvpa_nbu(), false);
    out
}

/// Unary-alphabet annotation pool with word-length measures assigned by
/// hand: (automaton, measure) pairs over the single letter a.
pub fn unary_pool() -> Vec<(Automaton, usize)> {
    let chain = |name: &str, len: usize, finals: &[usize], loop_back: Option<(usize, usize)>| {
        finite_fixture(name, true, |f| {
            f.add_letter("a").unwrap();
            for i in 0..=len {
                f.add_state(&format!("n{i}")).unwrap();
            }
            f.set_initial("n0").unwrap();
            for i in finals {
                f.add_final(&format!("n{i}")).unwrap();
            }
            for i in 0..len {
                f.add_rule(&format!("n{i}"), Some("a"), &format!("n{}", i + 1)).unwrap();
            }
            if let Some((from, to)) = loop_back {
                f.add_rule(&format!("n{from}"), Some("a"), &format!("n{to}")).unwrap();
            }
        })
    };
    vec![
        // infinite languages measure by their shortest word
        (chain("u_star", 0, &[0], Some((0, 0))), 0),
        (chain("u_even", 1, &[0], Some((1, 0))), 0),
        (chain("u_plus", 1, &[1], Some((1, 1))), 1),
        (chain("u_odd", 1, &[1], Some((1, 0))), 1),
        (chain("u_evenplus", 2, &[2], Some((2, 1))), 2),
        // finite languages measure by their longest word
        (chain("u_one", 1, &[1], None), 1),
        (chain("u_eps_or_a", 1, &[0, 1], None), 1),
        (chain("u_aa", 2, &[2], None), 2),
        (chain("u_upto2", 2, &[0, 1, 2], None), 2),
    ]
}

/// A random formula over the proposition q with temporal nesting below
/// `td_cap` and every annotation drawn from `refs` (which the caller has
/// filtered to measures below the intended bound).
pub fn random_ladder_formula(
    rng: &mut ChaCha8Rng,
    td_cap: usize,
    refs: &[LanguageRef],
) -> Formula {
    let mut fuel = 14usize;
    ladder_go(rng, td_cap.saturating_sub(1), refs, &mut fuel)
}

fn ladder_go(
    rng: &mut ChaCha8Rng,
    td_budget: usize,
    refs: &[LanguageRef],
    fuel: &mut usize,
) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::Prop("q".to_string()),
    };
    if *fuel == 0 || rng.gen_bool(0.2) {
        return leaf(rng);
    }
    *fuel -= 1;
    let pick = if td_budget == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..13) };
    let sub = |rng: &mut ChaCha8Rng, td: usize, fuel: &mut usize| {
        Box::new(ladder_go(rng, td, refs, fuel))
    };
    let annot = |rng: &mut ChaCha8Rng| refs.choose(rng).expect("nonempty pool").clone();
    match pick {
        0 => Formula::Not(sub(rng, td_budget, fuel)),
        1 => Formula::And(sub(rng, td_budget, fuel), sub(rng, td_budget, fuel)),
        2 => Formula::Or(sub(rng, td_budget, fuel), sub(rng, td_budget, fuel)),
        3 => Formula::EX(annot(rng), sub(rng, td_budget - 1, fuel)),
        4 => Formula::AX(annot(rng), sub(rng, td_budget - 1, fuel)),
        5 => Formula::EF(annot(rng), sub(rng, td_budget - 1, fuel)),
        6 => Formula::AF(annot(rng), sub(rng, td_budget - 1, fuel)),
        7 => Formula::EG(annot(rng), sub(rng, td_budget - 1, fuel)),
        8 => Formula::AG(annot(rng), sub(rng, td_budget - 1, fuel)),
        9 => Formula::EU(sub(rng, td_budget - 1, fuel), annot(rng), sub(rng, td_budget - 1, fuel)),
        10 => Formula::AU(sub(rng, td_budget - 1, fuel), annot(rng), sub(rng, td_budget - 1, fuel)),
        11 => Formula::ER(sub(rng, td_budget - 1, fuel), annot(rng), sub(rng, td_budget - 1, fuel)),
        _ => Formula::AR(sub(rng, td_budget - 1, fuel), annot(rng), sub(rng, td_budget - 1, fuel)),
    }
}

// ---------------------------------------------------------------------
// fixture systems
// ---------------------------------------------------------------------

/// The straight chain c0 → … → c{n-1} with the proposition `even` on the
/// even positions, used by the scaling battery.
pub fn slope_chain(n: usize) -> Lts {
    let mut lts = Lts::new("chain").expect("identifier");
    lts.add_action("a").expect("fresh");
    lts.add_prop("even").expect("fresh");
    for i in 0..n {
        let props: &[&str] = if i % 2 == 0 { &["even"] } else { &[] };
        lts.add_state(&format!("c{i}"), props).expect("fresh");
    }
    for i in 0..n - 1 {
        lts.add_transition(&format!("c{i}"), "a", &format!("c{}", i + 1)).expect("exists");
    }
    lts.add_designated("c0").expect("exists");
    lts
}

/// The fixed scaling formula: reach, across an odd number of steps, a
/// state from which every even-length continuation sits on `even`.
pub fn slope_formula() -> Formula {
    Formula::EU(
        Box::new(Formula::True),
        LanguageRef::Named("podd".to_string()),
        Box::new(Formula::ER(
            Box::new(Formula::False),
            LanguageRef::Named("deven".to_string()),
            Box::new(Formula::Prop("even".to_string())),
        )),
    )
}

/// The truncated counter machine: a spine a0 → … → a{k} of produce steps;
/// from each a_i a drain of i consume steps ends in a dead end. A run
/// spelling aⁿbⁿ ends exactly at a dead end.
pub fn truncated_counter(k: usize) -> Lts {
    let mut lts = Lts::new("counter_trunc").expect("identifier");
    lts.add_action("a").expect("fresh");
    lts.add_action("b").expect("fresh");
    for i in 0..=k {
        lts.add_state(&format!("a{i}"), &[]).expect("fresh");
    }
    for i in 1..=k {
        for j in 1..=i {
            lts.add_state(&format!("b{i}_{j}"), &[]).expect("fresh");
        }
    }
    for i in 0..k {
        lts.add_transition(&format!("a{i}"), "a", &format!("a{}", i + 1)).expect("exists");
    }
    for i in 1..=k {
        lts.add_transition(&format!("a{i}"), "b", &format!("b{i}_1")).expect("exists");
        for j in 1..i {
            lts.add_transition(&format!("b{i}_{j}"), "b", &format!("b{i}_{}", j + 1))
                .expect("exists");
        }
    }
    lts.add_designated("a0").expect("exists");
    lts
}

/// The truncated mirror machine: a spine a0 → … → a{k}; from each a_i one
/// b step starts an echo of i more a steps ending dead. A run spelling
/// aⁿbaⁿ ends exactly at a dead end.
pub fn truncated_mirror(k: usize) -> Lts {
    let mut lts = Lts::new("mirror_trunc").expect("identifier");
    lts.add_action("a").expect("fresh");
    lts.add_action("b").expect("fresh");
    for i in 0..=k {
        lts.add_state(&format!("a{i}"), &[]).expect("fresh");
    }
    for i in 0..=k {
        for j in 0..=i {
            lts.add_state(&format!("c{i}_{j}"), &[]).expect("fresh");
        }
    }
    for i in 0..k {
        lts.add_transition(&format!("a{i}"), "a", &format!("a{}", i + 1)).expect("exists");
    }
    for i in 0..=k {
        lts.add_transition(&format!("a{i}"), "b", &format!("c{i}_0")).expect("exists");
        for j in 0..i {
            lts.add_transition(&format!("c{i}_{j}"), "a", &format!("c{i}_{}", j + 1))
                .expect("exists");
        }
    }
    lts.add_designated("a0").expect("exists");
    lts
}
