//! A three-valued bounded-path oracle for the desugared core. Annotated
//! operators are settled by walking the system and the annotation's
//! configuration sets side by side: finite kinds are explored to closure
//! (so their verdicts are exact), pushdown kinds up to a depth horizon
//! (so `Unknown` can remain). Verdicts are monotone in the horizon: a
//! decided true/false never flips when the horizon grows.

use std::collections::{HashMap, HashSet};

use ectl::automata::Automaton;
use ectl::env::Env;
use ectl::logic::{Formula, LanguageRef};
use ectl::lts::Lts;

use crate::run::Sim;
use crate::OracleError;

/// Kleene's strong three-valued logic, ordered False < Unknown < True.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum V3 {
    False,
    Unknown,
    True,
}

impl V3 {
    pub fn from_bool(b: bool) -> V3 {
        if b {
            V3::True
        } else {
            V3::False
        }
    }

    fn not(self) -> V3 {
        match self {
            V3::True => V3::False,
            V3::False => V3::True,
            V3::Unknown => V3::Unknown,
        }
    }

    fn and(self, other: V3) -> V3 {
        self.min(other)
    }

    fn or(self, other: V3) -> V3 {
        self.max(other)
    }
}

/// Per-state three-valued verdicts together with the horizon they were
/// computed at.
#[derive(Debug, Clone)]
pub struct BoundedVerdict {
    pub values: Vec<V3>,
    pub horizon: usize,
}

/// Evaluates a desugared core formula (booleans plus EU/ER only) with
/// bounded exploration of pushdown annotations. Named annotations are
/// looked up in `env`; regex and complement references are refused since
/// resolving them would lean on the engine's own constructions.
pub fn bounded_path_check(
    lts: &Lts,
    f: &Formula,
    env: &Env,
    depth: usize,
) -> Result<BoundedVerdict, OracleError> {
    let values = eval(lts, f, env, depth)?;
    Ok(BoundedVerdict { values, horizon: depth })
}

fn eval(lts: &Lts, f: &Formula, env: &Env, depth: usize) -> Result<Vec<V3>, OracleError> {
    let n = lts.state_count();
    match f {
        Formula::True => Ok(vec![V3::True; n]),
        Formula::False => Ok(vec![V3::False; n]),
        Formula::Prop(p) => {
            let pid = lts
                .prop_id(p)
                .map_err(|_| OracleError::UnknownProposition { name: p.clone() })?;
            Ok((0..n as u32).map(|s| V3::from_bool(lts.has_prop(s, pid))).collect())
        }
        Formula::Not(a) => Ok(eval(lts, a, env, depth)?.iter().map(|v| v.not()).collect()),
        Formula::And(a, b) => {
            let va = eval(lts, a, env, depth)?;
            let vb = eval(lts, b, env, depth)?;
            Ok(va.iter().zip(&vb).map(|(x, y)| x.and(*y)).collect())
        }
        Formula::Or(a, b) => {
            let va = eval(lts, a, env, depth)?;
            let vb = eval(lts, b, env, depth)?;
            Ok(va.iter().zip(&vb).map(|(x, y)| x.or(*y)).collect())
        }
        Formula::Implies(a, b) => {
            let va = eval(lts, a, env, depth)?;
            let vb = eval(lts, b, env, depth)?;
            Ok(va.iter().zip(&vb).map(|(x, y)| x.not().or(*y)).collect())
        }
        Formula::EU(x, l, y) => {
            let vx = eval(lts, x, env, depth)?;
            let vy = eval(lts, y, env, depth)?;
            match l {
                LanguageRef::SigmaStar => Ok(eu_plain(lts, &vx, &vy)),
                LanguageRef::Sigma => {
                    Ok((0..n as u32)
                        .map(|s| vx[s as usize].and(ex_plain(lts, &vy, s)))
                        .collect())
                }
                LanguageRef::Named(name) | LanguageRef::Kinded(_, name) => {
                    let aut = env
                        .get(name)
                        .ok_or_else(|| OracleError::BadAutomaton { name: name.clone() })?;
                    Ok((0..n as u32)
                        .map(|s| eu_bounded(lts, &vx, &aut, &vy, s, depth))
                        .collect::<Result<_, _>>()?)
                }
                _ => Err(OracleError::AnnotatedOperator { formula: f.to_string() }),
            }
        }
        Formula::ER(x, l, y) => {
            let vx = eval(lts, x, env, depth)?;
            let vy = eval(lts, y, env, depth)?;
            match l {
                LanguageRef::SigmaStar => Ok(er_plain(lts, &vx, &vy)),
                LanguageRef::Sigma => Ok((0..n as u32)
                    .map(|s| {
                        let d = V3::from_bool(is_dead(lts, s));
                        vx[s as usize].or(d).or(ex_plain(lts, &vy, s))
                    })
                    .collect()),
                LanguageRef::Named(name) | LanguageRef::Kinded(_, name) => {
                    let aut = env
                        .get(name)
                        .ok_or_else(|| OracleError::BadAutomaton { name: name.clone() })?;
                    Ok((0..n as u32)
                        .map(|s| er_bounded(lts, &vx, &aut, &vy, s, depth))
                        .collect::<Result<_, _>>()?)
                }
                _ => Err(OracleError::AnnotatedOperator { formula: f.to_string() }),
            }
        }
        _ => Err(OracleError::NotCore { formula: f.to_string() }),
    }
}

fn is_dead(lts: &Lts, s: u32) -> bool {
    lts.successors(s).expect("state id from iteration").is_empty()
}

fn ex_plain(lts: &Lts, v: &[V3], s: u32) -> V3 {
    let mut acc = V3::False;
    for (_, t) in lts.successors(s).expect("state id from iteration") {
        acc = acc.or(v[*t as usize]);
    }
    acc
}

/// Plain E(x U y), Kleene least fixpoint from all-False.
fn eu_plain(lts: &Lts, x: &[V3], y: &[V3]) -> Vec<V3> {
    let mut z = vec![V3::False; x.len()];
    loop {
        let mut changed = false;
        for s in 0..x.len() as u32 {
            let next = y[s as usize].or(x[s as usize].and(ex_plain(lts, &z, s)));
            if next != z[s as usize] {
                z[s as usize] = next;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// Plain E(x R y), Kleene greatest fixpoint from all-True.
fn er_plain(lts: &Lts, x: &[V3], y: &[V3]) -> Vec<V3> {
    let mut z = vec![V3::True; x.len()];
    loop {
        let mut changed = false;
        for s in 0..x.len() as u32 {
            let d = V3::from_bool(is_dead(lts, s));
            let next = y[s as usize].and(x[s as usize].or(d).or(ex_plain(lts, &z, s)));
            if next != z[s as usize] {
                z[s as usize] = next;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// One node of the synchronous walk: the automaton's configuration set
/// (canonical key) plus the system state.
type NodeKey = (Vec<(u32, Vec<u32>)>, u32);

/// E(x U[A] y) at one state. Two sweeps over the synchronous product:
/// a strict one that only extends prefixes through definitely-x states
/// (its hits are definite witnesses), and an optimistic one that also
/// walks through Unknowns (its exhaustion without a hit is a definite
/// miss, provided the walk closed rather than being cut at the horizon).
fn eu_bounded(
    lts: &Lts,
    x: &[V3],
    aut: &Automaton,
    y: &[V3],
    s0: u32,
    depth: usize,
) -> Result<V3, OracleError> {
    let finite = !aut.kind().pushdown();
    let limit = if finite { usize::MAX } else { depth };

    let sweep = |optimistic: bool| -> Result<(bool, bool), OracleError> {
        // returns (witness found, walk closed)
        let extend_ok =
            |v: V3| if optimistic { v >= V3::Unknown } else { v == V3::True };
        let accept_ok = |v: V3| if optimistic { v >= V3::Unknown } else { v == V3::True };
        let mut seen: HashSet<NodeKey> = HashSet::new();
        let mut layer: Vec<(Sim, u32)> = vec![(Sim::start(aut)?, s0)];
        seen.insert((layer[0].0.key(), s0));
        let mut closed = true;
        let mut d = 0usize;
        while !layer.is_empty() {
            let mut next_layer = Vec::new();
            for (sim, s) in &layer {
                if sim.accepting() && accept_ok(y[*s as usize]) {
                    return Ok((true, true));
                }
                if !extend_ok(x[*s as usize]) {
                    continue;
                }
                if d >= limit {
                    closed = false;
                    continue;
                }
                for (a, t) in lts.successors(*s).expect("state id from iteration") {
                    let nsim = sim.step(lts.action_name(*a));
                    if nsim.is_stuck() {
                        continue;
                    }
                    let key = (nsim.key(), *t);
                    if seen.insert(key) {
                        next_layer.push((nsim, *t));
                    }
                }
            }
            layer = next_layer;
            d += 1;
        }
        Ok((false, closed))
    };

    let (clean_hit, _) = sweep(false)?;
    if clean_hit {
        return Ok(V3::True);
    }
    let (loose_hit, closed) = sweep(true)?;
    if !loose_hit && closed {
        return Ok(V3::False);
    }
    Ok(V3::Unknown)
}

/// E(x R[A] y) at one state: explore the synchronous product to the
/// horizon, then run a three-valued greatest fixpoint over the explored
/// graph. Cut-off nodes contribute Unknown for their continuations.
fn er_bounded(
    lts: &Lts,
    x: &[V3],
    aut: &Automaton,
    y: &[V3],
    s0: u32,
    depth: usize,
) -> Result<V3, OracleError> {
    let finite = !aut.kind().pushdown();
    let limit = if finite { usize::MAX } else { depth };

    struct Node {
        obligation: V3,
        release: V3,
        halts: bool,
        cut: bool,
        succs: Vec<usize>,
    }

    let mut ids: HashMap<NodeKey, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut layer: Vec<(Sim, u32)> = Vec::new();

    let start = Sim::start(aut)?;
    let mk = |sim: &Sim, s: u32, cut: bool, lts: &Lts, x: &[V3], y: &[V3]| Node {
        obligation: if sim.accepting() { y[s as usize] } else { V3::True },
        release: x[s as usize],
        halts: is_dead(lts, s),
        cut,
        succs: Vec::new(),
    };
    ids.insert((start.key(), s0), 0);
    nodes.push(mk(&start, s0, false, lts, x, y));
    layer.push((start, s0));

    let mut d = 0usize;
    while !layer.is_empty() {
        let mut next_layer = Vec::new();
        for (sim, s) in &layer {
            let id = ids[&(sim.key(), *s)];
            if d >= limit {
                nodes[id].cut = true;
                continue;
            }
            let mut succs = Vec::new();
            for (a, t) in lts.successors(*s).expect("state id from iteration") {
                let nsim = sim.step(lts.action_name(*a));
                // a stranded automaton accepts no further prefix: keep a
                // single stuck node so the path still counts as maximal
                let key = (nsim.key(), *t);
                let nid = match ids.get(&key) {
                    Some(i) => *i,
                    None => {
                        let i = nodes.len();
                        ids.insert(key, i);
                        nodes.push(mk(&nsim, *t, false, lts, x, y));
                        next_layer.push((nsim, *t));
                        i
                    }
                };
                succs.push(nid);
            }
            nodes[id].succs = succs;
        }
        layer = next_layer;
        d += 1;
    }

    // greatest fixpoint from the optimistic end
    let mut v = vec![V3::True; nodes.len()];
    loop {
        let mut changed = false;
        for (i, node) in nodes.iter().enumerate() {
            let cont = if node.halts {
                V3::True
            } else if node.cut {
                V3::Unknown
            } else {
                let mut acc = V3::False;
                for s in &node.succs {
                    acc = acc.or(v[*s]);
                }
                acc
            };
            let next = node.obligation.and(node.release.or(cont));
            if next != v[i] {
                v[i] = next;
                changed = true;
            }
        }
        if !changed {
            return Ok(v[0]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ectl::logic::desugar;
    use ectl::text::aut_format::parse_aut;
    use ectl::text::formula::parse_formula;
    use ectl::text::lts_format::parse_lts;

    fn anbn() -> Automaton {
        parse_aut(
            "kind vpa\nname anbn\ncalls a\nreturns b\nstack Z g\nbottom Z\n\
             states i p f\ninitial i\nfinal f\n\
             rule i a push g p\nrule p a push g p\n\
             rule p b pop g f\nrule f b pop g f\n",
        )
        .unwrap()
    }

    fn env_with(lts: &Lts, auts: Vec<Automaton>) -> Env {
        let mut env = Env::new(lts.actions());
        for a in auts {
            env.insert(a).unwrap();
        }
        env
    }

    fn check(lts: &Lts, env: &Env, src: &str, depth: usize) -> Vec<V3> {
        let f = desugar(&parse_formula(src).unwrap());
        bounded_path_check(lts, &f, env, depth).unwrap().values
    }

    /// The a^n b^n spine of length 2: s0 -a-> s1 -a-> s2, each spine node
    /// after i a-steps sprouting i b-steps that end dead.
    fn truncated_counter() -> Lts {
        parse_lts(
            "system trunc\nactions a b\nprops none\n\
             state s0 []\nstate s1 []\nstate s2 []\n\
             state t1 []\nstate t2 []\nstate t3 []\n\
             trans s0 a s1\ntrans s1 a s2\n\
             trans s1 b t1\n\
             trans s2 b t2\ntrans t2 b t3\n\
             init s0\n",
        )
        .unwrap()
    }

    #[test]
    fn shallow_horizons_stay_unknown_then_turn_true() {
        let l = truncated_counter();
        let env = env_with(&l, vec![anbn()]);
        let src = "EF[anbn] AX ff";
        let at0 = check(&l, &env, src, 0);
        assert_eq!(at0[0], V3::Unknown);
        let at4 = check(&l, &env, src, 4);
        assert_eq!(at4[0], V3::True); // witness a b at depth 2
        // monotone: deeper horizons keep the verdict
        let at9 = check(&l, &env, src, 9);
        assert_eq!(at9[0], V3::True);
    }

    #[test]
    fn depth_zero_until_is_true_only_by_the_empty_word() {
        let l = truncated_counter();
        let env = env_with(&l, vec![anbn()]);
        // ε is not in a^n b^n (n ≥ 1), so nothing is decided at depth 0
        let got = check(&l, &env, "E(tt U[anbn] tt)", 0);
        assert!(got.iter().all(|v| *v == V3::Unknown));
    }

    #[test]
    fn release_refutations_appear_within_the_horizon() {
        // one a-loop state; every even prefix must end in q, but q is
        // nowhere: the ε prefix already violates
        let l = parse_lts(
            "system loop\nactions a\nprops q\nstate s0 []\ntrans s0 a s0\ninit s0\n",
        )
        .unwrap();
        let mut even = ectl::automata::FiniteAutomaton::new("even", true);
        even.add_state("e").unwrap();
        even.add_state("o").unwrap();
        even.add_letter("a").unwrap();
        even.set_initial("e").unwrap();
        even.add_final("e").unwrap();
        even.add_rule("e", Some("a"), "o").unwrap();
        even.add_rule("o", Some("a"), "e").unwrap();
        let mut aut = Automaton::Finite(even);
        aut.validate().unwrap();
        let env = env_with(&l, vec![aut]);
        let got = check(&l, &env, "E(ff R[even] q)", 3);
        assert_eq!(got, [V3::False]);
        // with q present the loop satisfies the release exactly
        let l2 = parse_lts(
            "system loop2\nactions a\nprops q\nstate s0 [q]\ntrans s0 a s0\ninit s0\n",
        )
        .unwrap();
        let mut even = ectl::automata::FiniteAutomaton::new("even", true);
        even.add_state("e").unwrap();
        even.add_state("o").unwrap();
        even.add_letter("a").unwrap();
        even.set_initial("e").unwrap();
        even.add_final("e").unwrap();
        even.add_rule("e", Some("a"), "o").unwrap();
        even.add_rule("o", Some("a"), "e").unwrap();
        let mut aut = Automaton::Finite(even);
        aut.validate().unwrap();
        let env2 = env_with(&l2, vec![aut]);
        assert_eq!(check(&l2, &env2, "E(ff R[even] q)", 3), [V3::True]);
    }

    #[test]
    fn plain_core_operators_are_exact_at_any_depth() {
        let l = truncated_counter();
        let env = env_with(&l, vec![]);
        let got = check(&l, &env, "E(tt U tt)", 0);
        assert!(got.iter().all(|v| *v == V3::True));
        let ax = check(&l, &env, "AX ff", 0);
        // dead ends satisfy AX ff; spine and sprout-starts do not
        assert_eq!(
            ax,
            [V3::False, V3::False, V3::False, V3::True, V3::False, V3::True]
        );
    }

    #[test]
    fn regex_annotations_are_out_of_scope_here() {
        let l = truncated_counter();
        let env = env_with(&l, vec![]);
        let f = desugar(&parse_formula("EF[re:ab] tt").unwrap());
        assert!(bounded_path_check(&l, &f, &env, 3).is_err());
    }
}
