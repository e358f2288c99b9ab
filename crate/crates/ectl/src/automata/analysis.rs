//! Language analysis shared by formula measures and diagnostics: emptiness,
//! shortest accepted word, and longest accepted word length.
//!
//! Finite kinds get plain graph analysis (trimming, cycle detection, path
//! search). Pushdown kinds are letter-erased into a pushdown system whose
//! reachability is decided by saturation; the shortest word then falls out
//! of a breadth-first search over configurations pruned to the useful cone.
//! Whether a pushdown language is finite is not decided here, so asking for
//! its longest word is an error.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::pds::{normalize, pre_star, tarjan_scc, ConfigAutomaton, PushdownSystem, SaturatedCa};

use super::finite::FiniteAutomaton;
use super::pda::PdaAutomaton;
use super::vpa::VpaAutomaton;
use super::{Automaton, AutomatonError};

/// True iff the automaton accepts no word at all.
pub fn is_empty(aut: &Automaton) -> bool {
    match aut {
        Automaton::Finite(a) => finite_trim(a).is_none(),
        Automaton::Vpa(a) => vpa_search(a).is_none(),
        Automaton::Pda(a) => pda_search(a).is_none(),
    }
}

/// A minimum-length accepted word, or `None` for the empty language.
pub fn shortest_word(aut: &Automaton) -> Option<Vec<String>> {
    match aut {
        Automaton::Finite(a) => {
            finite_trim(a)?;
            Some(finite_shortest(a))
        }
        Automaton::Vpa(a) => {
            let search = vpa_search(a)?;
            let letters = search.shortest(|state, stack| {
                let mut out = Vec::new();
                let Some(&top) = stack.first() else { return out };
                for (from, letter, push, to) in a.call_rules() {
                    if *from == state {
                        let mut s2 = vec![*push];
                        s2.extend_from_slice(stack);
                        out.push((*letter, *to, s2));
                    }
                }
                for (from, letter, to) in a.internal_rules() {
                    if *from == state {
                        out.push((*letter, *to, stack.to_vec()));
                    }
                }
                let on_bottom = Some(top) == a.bottom();
                for (from, letter, ret_top, to) in a.return_rules() {
                    if *from == state && *ret_top == top {
                        let s2 = if on_bottom { stack.to_vec() } else { stack[1..].to_vec() };
                        out.push((*letter, *to, s2));
                    }
                }
                out
            });
            Some(letters.into_iter().map(|l| a.letters()[l as usize].0.clone()).collect())
        }
        Automaton::Pda(a) => {
            let search = pda_search(a)?;
            let letters = search.shortest(|state, stack| {
                let mut out = Vec::new();
                let Some(&top) = stack.first() else { return out };
                for rule in a.rules() {
                    if rule.from == state && rule.top == top {
                        let mut s2 = rule.replacement.clone();
                        s2.extend_from_slice(&stack[1..]);
                        out.push((rule.letter, rule.to, s2));
                    }
                }
                out
            });
            Some(letters.into_iter().map(|l| a.alphabet()[l as usize].clone()).collect())
        }
    }
}

/// Length of a longest accepted word. Errors on the empty language, on
/// finite-kind automata whose language is infinite, and on pushdown kinds
/// (no finiteness detection).
pub fn longest_word_length(aut: &Automaton) -> Result<usize, AutomatonError> {
    match aut {
        Automaton::Finite(a) => {
            let trimmed = finite_trim(a).ok_or_else(|| AutomatonError::EmptyLanguage {
                name: a.name().to_string(),
            })?;
            finite_longest(a, &trimmed).ok_or_else(|| AutomatonError::NoLongestWord {
                name: a.name().to_string(),
            })
        }
        Automaton::Vpa(_) | Automaton::Pda(_) => {
            Err(AutomatonError::NoLongestWord { name: aut.name().to_string() })
        }
    }
}

/// The word-length measure of an automaton: longest accepted word when the
/// language is finite, otherwise shortest. Pushdown kinds always use the
/// shortest word. Errors on the empty language.
pub fn automaton_depth(aut: &Automaton) -> Result<usize, AutomatonError> {
    let empty = || AutomatonError::EmptyLanguage { name: aut.name().to_string() };
    match aut {
        Automaton::Finite(a) => {
            let trimmed = finite_trim(a).ok_or_else(empty)?;
            match finite_longest(a, &trimmed) {
                Some(n) => Ok(n),
                None => Ok(finite_shortest(a).len()),
            }
        }
        _ => Ok(shortest_word(aut).ok_or_else(empty)?.len()),
    }
}

/// States that lie on some accepting path (reachable and co-reachable),
/// or `None` if there are none — i.e. the language is empty.
fn finite_trim(a: &FiniteAutomaton) -> Option<Vec<bool>> {
    let n = a.state_count();
    let Some(init) = a.initial() else { return None };
    let mut fwd = vec![false; n];
    let mut queue = VecDeque::from([init]);
    fwd[init as usize] = true;
    while let Some(q) = queue.pop_front() {
        for (f, _, t) in a.rules() {
            if *f == q && !fwd[*t as usize] {
                fwd[*t as usize] = true;
                queue.push_back(*t);
            }
        }
    }
    let mut bwd = vec![false; n];
    let mut queue: VecDeque<u32> = a.finals().iter().copied().collect();
    for q in &queue {
        bwd[*q as usize] = true;
    }
    while let Some(q) = queue.pop_front() {
        for (f, _, t) in a.rules() {
            if *t == q && !bwd[*f as usize] {
                bwd[*f as usize] = true;
                queue.push_back(*f);
            }
        }
    }
    let trimmed: Vec<bool> = (0..n).map(|i| fwd[i] && bwd[i]).collect();
    if trimmed[init as usize] {
        Some(trimmed)
    } else {
        None
    }
}

/// Shortest accepted word of a nonempty finite-kind automaton: BFS counting
/// letter edges, with ε-closure folded into each step.
fn finite_shortest(a: &FiniteAutomaton) -> Vec<String> {
    let n = a.state_count();
    let closures: Vec<Vec<u32>> = (0..n as u32)
        .map(|q| a.eps_closure(&std::iter::once(q).collect()).into_iter().collect())
        .collect();
    let accepting_by_closure: Vec<bool> =
        closures.iter().map(|c| c.iter().any(|q| a.is_final(*q))).collect();
    let init = a.initial().expect("nonempty language has an initial state");
    // parent[q] = (previous state, letter taken)
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[init as usize] = true;
    let mut queue = VecDeque::from([init]);
    let mut hit = None;
    if accepting_by_closure[init as usize] {
        hit = Some(init);
    }
    'bfs: while let Some(q) = queue.pop_front() {
        if hit.is_some() {
            break;
        }
        for mid in &closures[q as usize] {
            for (f, l, t) in a.rules() {
                let Some(letter) = l else { continue };
                if *f != *mid || seen[*t as usize] {
                    continue;
                }
                seen[*t as usize] = true;
                parent[*t as usize] = Some((q, *letter));
                if accepting_by_closure[*t as usize] {
                    hit = Some(*t);
                    break 'bfs;
                }
                queue.push_back(*t);
            }
        }
    }
    let mut cur = hit.expect("trimmed automaton reaches a final state");
    let mut word = Vec::new();
    while let Some((prev, letter)) = parent[cur as usize] {
        word.push(a.alphabet()[letter as usize].clone());
        cur = prev;
    }
    word.reverse();
    word
}

/// Longest accepted word length over the trimmed subgraph, or `None` when
/// the language is infinite (a cycle on an accepting path reads a letter).
fn finite_longest(a: &FiniteAutomaton, trimmed: &[bool]) -> Option<usize> {
    let n = a.state_count();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (f, _, t) in a.rules() {
        if trimmed[*f as usize] && trimmed[*t as usize] {
            succ[*f as usize].push(*t as usize);
        }
    }
    let comp = tarjan_scc(&succ);
    for (f, l, t) in a.rules() {
        if l.is_some()
            && trimmed[*f as usize]
            && trimmed[*t as usize]
            && comp[*f as usize] == comp[*t as usize]
        {
            return None;
        }
    }
    // Longest path over the condensation. Components are numbered in
    // reverse topological order, so walking indices downward visits
    // sources before sinks.
    let n_comp = comp.iter().max().map(|m| m + 1).unwrap_or(0);
    let init = a.initial().expect("trimmed automaton has an initial state");
    let mut dist: Vec<Option<usize>> = vec![None; n_comp];
    dist[comp[init as usize]] = Some(0);
    for c in (0..n_comp).rev() {
        let Some(d) = dist[c] else { continue };
        for (f, l, t) in a.rules() {
            if !trimmed[*f as usize] || !trimmed[*t as usize] || comp[*f as usize] != c {
                continue;
            }
            let w = if l.is_some() { 1 } else { 0 };
            let tc = comp[*t as usize];
            if tc != c && dist[tc].map_or(true, |cur| cur < d + w) {
                dist[tc] = Some(d + w);
            }
        }
    }
    let mut best = None;
    for q in a.finals() {
        if trimmed[*q as usize] {
            let d = dist[comp[*q as usize]].expect("final state reachable in trimmed graph");
            best = Some(best.map_or(d, |b: usize| b.max(d)));
        }
    }
    best
}

/// A prepared pushdown search: the useful-cone membership test plus the
/// initial configuration. Present only when the language is nonempty.
struct PushdownSearch {
    sat: SaturatedCa,
    init_control: u32,
    init_stack: Vec<u32>,
    finals: HashSet<u32>,
}

impl PushdownSearch {
    /// Shortest accepted word, as letter ids, via breadth-first search over
    /// configurations restricted to those that can still reach acceptance.
    /// `moves(state, stack)` enumerates (letter, state', stack').
    fn shortest<F>(&self, moves: F) -> Vec<u32>
    where
        F: Fn(u32, &[u32]) -> Vec<(u32, u32, Vec<u32>)>,
    {
        let start = (self.init_control, self.init_stack.clone());
        let mut parent: HashMap<(u32, Vec<u32>), ((u32, Vec<u32>), u32)> = HashMap::new();
        let mut queue = VecDeque::from([start.clone()]);
        let mut goal = None;
        if self.finals.contains(&start.0) {
            goal = Some(start.clone());
        }
        'bfs: while let Some(cfg) = queue.pop_front() {
            if goal.is_some() {
                break;
            }
            for (letter, state, stack) in moves(cfg.0, &cfg.1) {
                let next = (state, stack);
                if parent.contains_key(&next) || next == start {
                    continue;
                }
                if !self.sat.accepts(next.0, &next.1).expect("controls come from the system") {
                    continue;
                }
                parent.insert(next.clone(), (cfg.clone(), letter));
                if self.finals.contains(&next.0) {
                    goal = Some(next);
                    break 'bfs;
                }
                queue.push_back(next);
            }
        }
        let mut cur = goal.expect("useful cone reaches acceptance");
        let mut letters = Vec::new();
        while let Some((prev, letter)) = parent.get(&cur) {
            letters.push(*letter);
            cur = prev.clone();
        }
        letters.reverse();
        letters
    }
}

/// Letter-erased system for a VPA plus the saturated useful cone; `None`
/// when no final state is reachable from the initial configuration.
fn vpa_search(a: &VpaAutomaton) -> Option<PushdownSearch> {
    let (initial, bottom) = (a.initial()?, a.bottom()?);
    let mut pds = PushdownSystem::new(a.name());
    for s in a.states() {
        pds.intern_control(s);
    }
    for s in a.stack_syms() {
        pds.intern_sym(s);
    }
    let n_syms = a.stack_syms().len() as u32;
    for (from, _, push, to) in a.call_rules() {
        for sym in 0..n_syms {
            pds.add_rule(*from, sym, *to, &[*push, sym]);
        }
    }
    for (from, _, to) in a.internal_rules() {
        for sym in 0..n_syms {
            pds.add_rule(*from, sym, *to, &[sym]);
        }
    }
    for (from, _, top, to) in a.return_rules() {
        if *top == bottom {
            pds.add_rule(*from, *top, *to, &[*top]);
        } else {
            pds.add_rule(*from, *top, *to, &[]);
        }
    }
    let finals: HashSet<u32> = a.finals().iter().copied().collect();
    prepare(&pds, initial, bottom, &finals)
}

fn pda_search(a: &PdaAutomaton) -> Option<PushdownSearch> {
    let (initial, bottom) = (a.initial()?, a.bottom()?);
    let mut pds = PushdownSystem::new(a.name());
    for s in a.states() {
        pds.intern_control(s);
    }
    for s in a.stack_syms() {
        pds.intern_sym(s);
    }
    for r in a.rules() {
        pds.add_rule(r.from, r.top, r.to, &r.replacement);
    }
    let finals: HashSet<u32> = a.finals().iter().copied().collect();
    prepare(&pds, initial, bottom, &finals)
}

/// Saturates the predecessors of "stopped in a final state" and keeps the
/// search handle only if the initial configuration is among them.
fn prepare(
    pds: &PushdownSystem,
    initial: u32,
    bottom: u32,
    finals: &HashSet<u32>,
) -> Option<PushdownSearch> {
    let (norm, _) = normalize(pds);
    let mut target = ConfigAutomaton::new(&norm);
    let univ = target.add_aux();
    target.mark_final(univ);
    for sym in 0..norm.sym_count() as u32 {
        target.add_edge(univ, sym, univ);
    }
    for f in finals {
        target.mark_final(*f);
        for sym in 0..norm.sym_count() as u32 {
            target.add_edge(*f, sym, univ);
        }
    }
    let sat = pre_star(&norm, &target).expect("letter-erased system is normalized");
    if !sat.accepts(initial, &[bottom]).expect("initial control exists") {
        return None;
    }
    Some(PushdownSearch {
        sat,
        init_control: initial,
        init_stack: vec![bottom],
        finals: finals.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{pda, sigma_star, vpa};
    use super::*;

    fn dfa_ab_abc() -> Automaton {
        let mut a = FiniteAutomaton::new("ab_abc", true);
        for s in ["s0", "s1", "s2", "s3"] {
            a.add_state(s).unwrap();
        }
        for l in ["a", "b", "c"] {
            a.add_letter(l).unwrap();
        }
        a.set_initial("s0").unwrap();
        a.add_rule("s0", Some("a"), "s1").unwrap();
        a.add_rule("s1", Some("b"), "s2").unwrap();
        a.add_rule("s2", Some("c"), "s3").unwrap();
        a.add_final("s2").unwrap();
        a.add_final("s3").unwrap();
        a.validate().unwrap();
        Automaton::Finite(a)
    }

    #[test]
    fn finite_language_uses_longest_word() {
        let a = dfa_ab_abc();
        assert!(!is_empty(&a));
        assert_eq!(shortest_word(&a).unwrap(), vec!["a", "b"]);
        assert_eq!(longest_word_length(&a).unwrap(), 3);
        assert_eq!(automaton_depth(&a).unwrap(), 3);
    }

    #[test]
    fn infinite_language_uses_shortest_word() {
        let a = sigma_star("all", &["a".into(), "b".into()]);
        assert!(!is_empty(&a));
        assert_eq!(shortest_word(&a).unwrap(), Vec::<String>::new());
        assert_eq!(automaton_depth(&a).unwrap(), 0);
        assert!(matches!(
            longest_word_length(&a),
            Err(AutomatonError::NoLongestWord { .. })
        ));
    }

    #[test]
    fn unreachable_or_unproductive_finals_mean_empty() {
        let mut a = FiniteAutomaton::new("void", false);
        a.add_state("s0").unwrap();
        a.add_state("island").unwrap();
        a.add_letter("a").unwrap();
        a.set_initial("s0").unwrap();
        a.add_rule("s0", Some("a"), "s0").unwrap();
        a.add_final("island").unwrap();
        a.validate().unwrap();
        let a = Automaton::Finite(a);
        assert!(is_empty(&a));
        assert_eq!(shortest_word(&a), None);
        assert!(matches!(
            automaton_depth(&a),
            Err(AutomatonError::EmptyLanguage { .. })
        ));
    }

    #[test]
    fn eps_cycle_does_not_make_the_language_infinite() {
        let mut a = FiniteAutomaton::new("loopy", false);
        for s in ["s0", "s1", "s2"] {
            a.add_state(s).unwrap();
        }
        a.add_letter("a").unwrap();
        a.set_initial("s0").unwrap();
        a.add_rule("s0", None, "s1").unwrap();
        a.add_rule("s1", None, "s0").unwrap();
        a.add_rule("s1", Some("a"), "s2").unwrap();
        a.add_final("s2").unwrap();
        a.validate().unwrap();
        let a = Automaton::Finite(a);
        assert_eq!(shortest_word(&a).unwrap(), vec!["a"]);
        assert_eq!(longest_word_length(&a).unwrap(), 1);
        assert_eq!(automaton_depth(&a).unwrap(), 1);
    }

    #[test]
    fn vpa_depth_is_the_shortest_word() {
        let a = Automaton::Vpa(vpa::tests::anbn());
        assert!(!is_empty(&a));
        assert_eq!(shortest_word(&a).unwrap(), vec!["a", "b"]);
        assert_eq!(automaton_depth(&a).unwrap(), 2);
        assert!(matches!(
            longest_word_length(&a),
            Err(AutomatonError::NoLongestWord { .. })
        ));

        // the balanced-prefix matcher accepts ε
        let b = Automaton::Vpa(vpa::tests::balanced());
        assert_eq!(shortest_word(&b).unwrap(), Vec::<String>::new());
        assert_eq!(automaton_depth(&b).unwrap(), 0);
    }

    #[test]
    fn dpda_depth_is_the_shortest_word() {
        let a = Automaton::Pda(pda::tests::anban());
        assert!(!is_empty(&a));
        assert_eq!(shortest_word(&a).unwrap(), vec!["b"]);
        assert_eq!(automaton_depth(&a).unwrap(), 1);
    }

    #[test]
    fn pushdown_empty_language_is_detected() {
        // calls only, final state unreachable
        let mut a = VpaAutomaton::new("climb", true);
        a.add_state("q0").unwrap();
        a.add_state("qf").unwrap();
        a.add_letter("p", crate::automata::LetterClass::Call).unwrap();
        a.add_stack_sym("Z").unwrap();
        a.add_stack_sym("G").unwrap();
        a.set_bottom("Z").unwrap();
        a.set_initial("q0").unwrap();
        a.add_final("qf").unwrap();
        a.add_call_rule("q0", "p", "G", "q0").unwrap();
        a.validate().unwrap();
        let a = Automaton::Vpa(a);
        assert!(is_empty(&a));
        assert_eq!(shortest_word(&a), None);
        assert!(matches!(
            automaton_depth(&a),
            Err(AutomatonError::EmptyLanguage { .. })
        ));
    }

    #[test]
    fn shortest_words_are_accepted() {
        for aut in [
            dfa_ab_abc(),
            Automaton::Vpa(vpa::tests::anbn()),
            Automaton::Pda(pda::tests::anban()),
        ] {
            let w = shortest_word(&aut).unwrap();
            let w: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
            assert!(aut.accepts(&w).unwrap(), "{} should accept {:?}", aut.name(), w);
        }
    }
}
