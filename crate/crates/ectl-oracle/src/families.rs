//! Generated system families for the batteries and the corpus: the
//! fairness ladder pair (two systems that low-depth formulas cannot tell
//! apart; only the closing edge at the top level separates them) and the
//! corridor-tiling instances (a one-state system whose runs spell tilings,
//! plus the automaton recognizing the violating prefixes).

use std::collections::BTreeSet;

use ectl::automata::{Automaton, FiniteAutomaton};
use ectl::logic::{Formula, LanguageRef};
use ectl::lts::Lts;

use crate::OracleError;

/// Builds the ladder pair (T, S) with levels 0..=n and rungs 0..=k+1 over
/// the single action `a`:
///
/// * every level is a forward chain `x_{l,0} → … → x_{l,k+1}`,
/// * every rung except the head `x_{l,0}` has a self-loop,
/// * the chain tail descends one level: `x_{l,k+1} → x_{l-1,0}`,
/// * the proposition `q` marks exactly the heads `x_{l,0}`.
///
/// S is T plus one closing edge `s_{n,k+1} → s_{n,0}`, which creates the
/// only cycle through a q-state. The designated state is the top head.
pub fn gen_fairness_family(n: usize, k: usize) -> (Lts, Lts) {
    let t = ladder("T", n, k, false);
    let s = ladder("S", n, k, true);
    (t, s)
}

fn ladder(tag: &str, n: usize, k: usize, close: bool) -> Lts {
    let prefix = tag.to_ascii_lowercase();
    let name = format!("fairness_{tag}_{n}_{k}");
    let mut lts = Lts::new(&name).expect("family name is an identifier");
    lts.add_action("a").expect("fresh action");
    lts.add_prop("q").expect("fresh proposition");
    let state = |l: usize, m: usize| format!("{prefix}{l}_{m}");
    for l in 0..=n {
        for m in 0..=k + 1 {
            let props: &[&str] = if m == 0 { &["q"] } else { &[] };
            lts.add_state(&state(l, m), props).expect("fresh state");
        }
    }
    for l in 0..=n {
        for m in 0..=k {
            lts.add_transition(&state(l, m), "a", &state(l, m + 1)).expect("chain edge");
        }
        for m in 1..=k + 1 {
            lts.add_transition(&state(l, m), "a", &state(l, m)).expect("self-loop");
        }
        if l > 0 {
            lts.add_transition(&state(l, k + 1), "a", &state(l - 1, 0)).expect("descent");
        }
    }
    if close {
        lts.add_transition(&state(n, k + 1), "a", &state(n, 0)).expect("closing edge");
    }
    lts.add_designated(&state(n, 0)).expect("top head exists");
    lts
}

/// A corridor-tiling instance scaled down to toy size: `n` columns per
/// row, at most three tiles, adjacency relations H (within a row) and V
/// (between consecutive rows, same column) given as index pairs into the
/// tile list.
#[derive(Debug, Clone)]
pub struct TilingInstance {
    pub n: usize,
    pub tiles: Vec<String>,
    pub horizontal: BTreeSet<(usize, usize)>,
    pub vertical: BTreeSet<(usize, usize)>,
}

impl TilingInstance {
    pub fn new(
        n: usize,
        tile_count: usize,
        horizontal: &[(usize, usize)],
        vertical: &[(usize, usize)],
    ) -> Result<TilingInstance, OracleError> {
        if !(1..=3).contains(&n) || !(1..=3).contains(&tile_count) {
            return Err(OracleError::AboveMicroScale { n, tiles: tile_count });
        }
        let ok = |r: &[(usize, usize)]| r.iter().all(|(a, b)| *a < tile_count && *b < tile_count);
        if !ok(horizontal) || !ok(vertical) {
            return Err(OracleError::AboveMicroScale { n, tiles: tile_count });
        }
        Ok(TilingInstance {
            n,
            tiles: (0..tile_count).map(|i| format!("t{i}")).collect(),
            horizontal: horizontal.iter().copied().collect(),
            vertical: vertical.iter().copied().collect(),
        })
    }
}

/// Builds the one-state system whose infinite runs spell row-by-row
/// tilings, the automaton accepting exactly the prefixes that end on an
/// adjacency violation, and the formula `EG[viol] ff` asking for a run
/// with no violating prefix. The formula is true iff the corridor has a
/// valid tiling.
pub fn gen_micro_tiling(inst: &TilingInstance) -> (Lts, Formula, Automaton) {
    let mut lts = Lts::new("corridor").expect("name");
    for t in &inst.tiles {
        lts.add_action(t).expect("tile action");
    }
    lts.add_state("s", &[]).expect("state");
    for t in &inst.tiles {
        lts.add_transition("s", t, "s").expect("loop");
    }
    lts.add_designated("s").expect("designated");

    let aut = violation_nfa(inst);
    let formula = Formula::EG(
        LanguageRef::Named(aut.name().to_string()),
        Box::new(Formula::False),
    );
    (lts, formula, aut)
}

/// The violating-prefix language, with rows of length `n` listed
/// back-to-back:
///
/// * vertical: `T* t T^{n-1} t'` for every pair (t,t') outside V — the
///   second tile sits exactly one row below the first,
/// * horizontal: `(T^n)* T^i t t'` with `i ≤ n-2` for every pair outside
///   H — the two tiles are adjacent within one row.
///
/// States: a start that feeds both branches by ε, a `T*` loop plus a
/// counting chain per bad vertical pair, a position tracker modulo `n`
/// with one intermediate state per (offset, tile) for the horizontal
/// side, and a single accepting sink with no outgoing rules, so exactly
/// the violating prefixes are accepted.
fn violation_nfa(inst: &TilingInstance) -> Automaton {
    let n = inst.n;
    let tiles = &inst.tiles;
    let mut f = FiniteAutomaton::new("viol", false);
    for t in tiles {
        f.add_letter(t).expect("tile letter");
    }
    f.add_state("start").expect("state");
    f.set_initial("start").expect("initial");
    f.add_state("acc").expect("state");
    f.add_final("acc").expect("final");

    let bad_v: Vec<(usize, usize)> = pairs_outside(tiles.len(), &inst.vertical);
    let bad_h: Vec<(usize, usize)> = pairs_outside(tiles.len(), &inst.horizontal);

    if !bad_v.is_empty() {
        f.add_state("vskip").expect("state");
        f.add_rule("start", None, "vskip").expect("rule");
        for t in tiles {
            f.add_rule("vskip", Some(t), "vskip").expect("rule");
        }
        for (a, b) in &bad_v {
            // after reading tile a, count n-1 arbitrary tiles, then tile b
            let mut prev = format!("v{a}x{b}_0");
            f.add_state(&prev).expect("state");
            f.add_rule("vskip", Some(&tiles[*a]), &prev).expect("rule");
            for j in 1..n {
                let next = format!("v{a}x{b}_{j}");
                f.add_state(&next).expect("state");
                for t in tiles {
                    f.add_rule(&prev, Some(t), &next).expect("rule");
                }
                prev = next;
            }
            f.add_rule(&prev, Some(&tiles[*b]), "acc").expect("rule");
        }
    }

    if !bad_h.is_empty() && n >= 2 {
        for j in 0..n {
            f.add_state(&format!("p{j}")).expect("state");
        }
        f.add_rule("start", None, "p0").expect("rule");
        for j in 0..n {
            for t in tiles {
                f.add_rule(&format!("p{j}"), Some(t), &format!("p{}", (j + 1) % n))
                    .expect("rule");
            }
        }
        // one intermediate per (offset, left tile) shared by its bad pairs
        for (a, b) in &bad_h {
            for j in 0..=n - 2 {
                let mid = format!("h{j}_{a}");
                if f.state_id(&mid).is_err() {
                    f.add_state(&mid).expect("state");
                    f.add_rule(&format!("p{j}"), Some(&tiles[*a]), &mid).expect("rule");
                }
                f.add_rule(&mid, Some(&tiles[*b]), "acc").expect("rule");
            }
        }
    }

    let mut aut = Automaton::Finite(f);
    aut.validate().expect("violation automaton is well-formed");
    aut
}

fn pairs_outside(count: usize, rel: &BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..count {
        for b in 0..count {
            if !rel.contains(&(a, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Decides the corridor-tiling instance by brute force: enumerate the
/// rows whose inner pairs respect H, connect rows that match pointwise
/// under V, and look for any cycle — an infinite corridor exists exactly
/// when the row graph has one.
pub fn tiling_exists_brute(inst: &TilingInstance) -> bool {
    let n = inst.n;
    let t = inst.tiles.len();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut cur = vec![0usize; n];
    'enumerate: loop {
        let ok = (0..n.saturating_sub(1)).all(|j| inst.horizontal.contains(&(cur[j], cur[j + 1])));
        if ok {
            rows.push(cur.clone());
        }
        for j in (0..n).rev() {
            cur[j] += 1;
            if cur[j] < t {
                continue 'enumerate;
            }
            cur[j] = 0;
        }
        break;
    }
    let compatible = |r1: &[usize], r2: &[usize]| {
        (0..n).all(|j| inst.vertical.contains(&(r1[j], r2[j])))
    };
    // cycle search in the row graph
    let m = rows.len();
    let mut color = vec![0u8; m];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..m {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        stack.push((root, 0));
        while let Some((v, i)) = stack.pop() {
            if i < m {
                stack.push((v, i + 1));
                if compatible(&rows[v], &rows[i]) {
                    match color[i] {
                        0 => {
                            color[i] = 1;
                            stack.push((i, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                }
            } else {
                color[v] = 2;
            }
        }
    }
    false
}
