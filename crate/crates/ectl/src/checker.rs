//! The model checker. Formulas are desugared into the EU/ER core and
//! labeled bottom-up; boolean nodes are set operations, and each temporal
//! node runs one of two engines:
//!
//! * **until** — builds the product pushdown system of the transition
//!   system with the annotation automaton (any kind, no determinization),
//!   saturates the target `F × Sat(ψ) × Γ*` with pre*, and reads off the
//!   states whose initial configuration is accepted.
//! * **release** — requires a deterministic complete automaton (finite and
//!   visibly pushdown annotations are determinized on the fly, the
//!   alphabet widened to the system's actions first). The product gets a
//!   `g` control for runs released by φ and a `b` control for violated
//!   obligations; a state satisfies release iff its configuration can
//!   reach a safe halt or sustain an infinite run in the b-free product.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Instant;

use thiserror::Error;

use crate::automata::{complete, determinize, AutKind, Automaton, AutomatonError, LetterClass};
use crate::env::{widen_alphabet, Env};
use crate::logic::{self, desugar, Formula, LanguageRef, LogicError};
use crate::lts::{Lts, LtsError, StateSet};
use crate::pds::{
    normalize, pre_star, repeating_heads, ConfigAutomaton, PdsError, PushdownSystem, RuleOrigin,
    SaturatedCa,
};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("internal saturation fault: {0}")]
    Pds(#[from] PdsError),
    #[error("proposition `{name}` is not declared by system `{system}`")]
    UnknownProp { name: String, system: String },
    #[error("witness replay failed: {detail}")]
    WitnessInvalid { detail: String },
}

impl From<crate::env::EnvError> for CheckError {
    fn from(e: crate::env::EnvError) -> CheckError {
        CheckError::Logic(LogicError::Env(e))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    /// Collect the saturated configuration automaton of every temporal
    /// node, keyed by the node's printed form.
    pub dump_ca: bool,
}

/// Shape and cost of one temporal node's engine run.
#[derive(Debug, Clone)]
pub struct NodeReport {
    pub subformula: String,
    pub engine: &'static str,
    pub kind: AutKind,
    pub det_states_before: Option<usize>,
    pub det_states_after: Option<usize>,
    pub product_controls: usize,
    pub product_rules: usize,
    pub saturation_edges: usize,
    pub wall_ms: u128,
}

#[derive(Debug)]
pub struct CheckResult {
    /// The desugared core that was actually evaluated.
    pub core: Formula,
    /// States of the system satisfying the formula.
    pub sat: StateSet,
    /// One report per distinct temporal node, sorted by printed form.
    pub nodes: Vec<NodeReport>,
    pub wall_ms: u128,
    /// `(subformula, dump)` pairs when [`CheckOptions::dump_ca`] is set.
    pub dumps: Vec<(String, String)>,
}

/// A finite path certifying an until formula: `states[0]` is the queried
/// state and `actions` spell a word of the annotation language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub actions: Vec<String>,
    pub states: Vec<String>,
}

pub fn check(lts: &Lts, env: &Env, f: &Formula) -> Result<CheckResult, CheckError> {
    check_with(lts, env, f, CheckOptions::default())
}

pub fn check_with(
    lts: &Lts,
    env: &Env,
    f: &Formula,
    opts: CheckOptions,
) -> Result<CheckResult, CheckError> {
    let t0 = Instant::now();
    let core = desugar(f);
    logic::classify(&core, env)?;
    let ctx = Ctx {
        lts,
        env,
        opts,
        memo: Mutex::new(HashMap::new()),
        nodes: Mutex::new(Vec::new()),
        dumps: Mutex::new(Vec::new()),
    };
    let sat = ctx.eval(&core)?;
    let mut nodes = ctx.nodes.into_inner().expect("node reports");
    nodes.sort_by(|a, b| a.subformula.cmp(&b.subformula));
    let mut dumps = ctx.dumps.into_inner().expect("dumps");
    dumps.sort();
    Ok(CheckResult { core, sat, nodes, wall_ms: t0.elapsed().as_millis(), dumps })
}

/// Extracts a certifying path for a formula whose core is an until, at one
/// state. `None` when the core is not an until or the state does not
/// satisfy it. The path is replayed against the system and the automaton
/// before it is returned.
pub fn witness(
    lts: &Lts,
    env: &Env,
    f: &Formula,
    state: u32,
) -> Result<Option<Witness>, CheckError> {
    let core = desugar(f);
    let Formula::EU(x, l, y) = &core else {
        return Ok(None);
    };
    logic::classify(&core, env)?;
    let ctx = Ctx {
        lts,
        env,
        opts: CheckOptions::default(),
        memo: Mutex::new(HashMap::new()),
        nodes: Mutex::new(Vec::new()),
        dumps: Mutex::new(Vec::new()),
    };
    let sat_x = ctx.eval(x)?;
    let sat_y = ctx.eval(y)?;
    let aut = env.resolve(l).map_err(LogicError::from)?;
    let run = build_until(lts, &aut, &sat_x, &sat_y)?;

    let c0 = run.control(run.init_q, state);
    let Some(rule_idxs) = run.sat.trace(c0, &run.stack0, env.cap())? else {
        return Ok(None);
    };

    let mut actions: Vec<u32> = Vec::new();
    let mut states: Vec<u32> = vec![state];
    for ri in rule_idxs {
        let origin = run.origins[ri];
        if origin.leading {
            let (a, t) = run.meta[origin.source];
            actions.push(a);
            states.push(t);
        }
    }

    // Replay: every step must be a transition, the word must belong to the
    // language, intermediates must satisfy φ and the end state ψ.
    for (i, (&a, &t)) in actions.iter().zip(states[1..].iter()).enumerate() {
        let s = states[i];
        if !lts.successors(s)?.contains(&(a, t)) {
            return Err(CheckError::WitnessInvalid {
                detail: format!(
                    "step {} ({} --{}--> {}) is not a transition",
                    i,
                    lts.state_name(s),
                    lts.action_name(a),
                    lts.state_name(t)
                ),
            });
        }
        if !sat_x.contains(s) {
            return Err(CheckError::WitnessInvalid {
                detail: format!("intermediate state {} does not satisfy `{x}`", lts.state_name(s)),
            });
        }
    }
    let word: Vec<&str> = actions.iter().map(|&a| lts.action_name(a)).collect();
    if !aut.accepts(&word)? {
        return Err(CheckError::WitnessInvalid {
            detail: format!("the automaton `{}` rejects the action word {:?}", aut.name(), word),
        });
    }
    let end = *states.last().expect("nonempty");
    if !sat_y.contains(end) {
        return Err(CheckError::WitnessInvalid {
            detail: format!("end state {} does not satisfy `{y}`", lts.state_name(end)),
        });
    }

    Ok(Some(Witness {
        actions: word.iter().map(|s| s.to_string()).collect(),
        states: states.iter().map(|&s| lts.state_name(s).to_string()).collect(),
    }))
}

struct Ctx<'a> {
    lts: &'a Lts,
    env: &'a Env,
    opts: CheckOptions,
    memo: Mutex<HashMap<Formula, StateSet>>,
    nodes: Mutex<Vec<NodeReport>>,
    dumps: Mutex<Vec<(String, String)>>,
}

impl Ctx<'_> {
    fn eval(&self, f: &Formula) -> Result<StateSet, CheckError> {
        if let Some(hit) = self.memo.lock().expect("memo").get(f) {
            return Ok(hit.clone());
        }
        let n = self.lts.state_count();
        let out = match f {
            Formula::True => StateSet::full(n),
            Formula::False => StateSet::empty(n),
            Formula::Prop(p) => {
                let id = self.lts.prop_id(p).map_err(|_| CheckError::UnknownProp {
                    name: p.clone(),
                    system: self.lts.name().to_string(),
                })?;
                self.lts.sat_prop(id)
            }
            Formula::Not(x) => self.eval(x)?.complement(),
            Formula::And(x, y) => {
                let (a, b) = rayon::join(|| self.eval(x), || self.eval(y));
                a?.intersection(&b?)
            }
            Formula::Or(x, y) => {
                let (a, b) = rayon::join(|| self.eval(x), || self.eval(y));
                a?.union(&b?)
            }
            Formula::EU(x, l, y) => {
                let (a, b) = rayon::join(|| self.eval(x), || self.eval(y));
                self.run_until(f, l, &a?, &b?)?
            }
            Formula::ER(x, l, y) => {
                let (a, b) = rayon::join(|| self.eval(x), || self.eval(y));
                self.run_release(f, l, &a?, &b?)?
            }
            other => unreachable!("formula `{other}` survived desugaring"),
        };
        self.memo.lock().expect("memo").insert(f.clone(), out.clone());
        Ok(out)
    }

    fn run_until(
        &self,
        node: &Formula,
        l: &LanguageRef,
        sat_x: &StateSet,
        sat_y: &StateSet,
    ) -> Result<StateSet, CheckError> {
        let t0 = Instant::now();
        let aut = self.env.resolve(l).map_err(LogicError::from)?;
        let run = build_until(self.lts, &aut, sat_x, sat_y)?;
        let mut out = StateSet::empty(self.lts.state_count());
        for s in 0..self.lts.state_count() as u32 {
            if run.sat.accepts(run.control(run.init_q, s), &run.stack0)? {
                out.insert(s);
            }
        }
        self.report(NodeReport {
            subformula: node.to_string(),
            engine: "until",
            kind: aut.kind(),
            det_states_before: None,
            det_states_after: None,
            product_controls: run.product_controls,
            product_rules: run.product_rules,
            saturation_edges: run.sat.ca().edge_count(),
            wall_ms: t0.elapsed().as_millis(),
        });
        if self.opts.dump_ca {
            self.dumps.lock().expect("dumps").push((node.to_string(), run.sat.ca().dump()));
        }
        Ok(out)
    }

    fn run_release(
        &self,
        node: &Formula,
        l: &LanguageRef,
        sat_x: &StateSet,
        sat_y: &StateSet,
    ) -> Result<StateSet, CheckError> {
        let t0 = Instant::now();
        let aut = self.env.resolve(l).map_err(LogicError::from)?;
        let kind = aut.kind();
        let widened = widen_alphabet(&aut, self.lts.actions())?;
        let (det, det_before, det_after) = match kind {
            AutKind::Dfa | AutKind::Dvpa | AutKind::Dpda => (widened, None, None),
            AutKind::Nfa | AutKind::Vpa => {
                let d = determinize(&widened, self.env.cap())?;
                let after = d.state_count();
                (d, Some(aut.state_count()), Some(after))
            }
            AutKind::Pda => {
                return Err(LogicError::UndecidableRelease {
                    subformula: node.to_string(),
                    name: aut.name().to_string(),
                }
                .into())
            }
        };
        let total = complete(&det)?;
        let run = build_release(self.lts, &total, sat_x, sat_y)?;
        let mut out = StateSet::empty(self.lts.state_count());
        for s in 0..self.lts.state_count() as u32 {
            if run.sat.accepts(run.control(run.init_q, s), &[run.bottom])? {
                out.insert(s);
            }
        }
        self.report(NodeReport {
            subformula: node.to_string(),
            engine: "release",
            kind,
            det_states_before: det_before,
            det_states_after: det_after,
            product_controls: run.product_controls,
            product_rules: run.product_rules,
            saturation_edges: run.sat.ca().edge_count(),
            wall_ms: t0.elapsed().as_millis(),
        });
        if self.opts.dump_ca {
            self.dumps.lock().expect("dumps").push((node.to_string(), run.sat.ca().dump()));
        }
        Ok(out)
    }

    fn report(&self, r: NodeReport) {
        let mut nodes = self.nodes.lock().expect("node reports");
        if !nodes.iter().any(|n: &NodeReport| n.subformula == r.subformula) {
            nodes.push(r);
        }
    }
}

/// The until product and its saturation, kept around for witness replay.
struct UntilRun {
    product_controls: usize,
    product_rules: usize,
    origins: Vec<RuleOrigin>,
    /// Per product rule: the action taken and the destination state.
    meta: Vec<(u32, u32)>,
    sat: SaturatedCa,
    controls: Vec<u32>,
    n_lts: usize,
    init_q: u32,
    stack0: Vec<u32>,
}

impl UntilRun {
    fn control(&self, q: u32, s: u32) -> u32 {
        self.controls[q as usize * self.n_lts + s as usize]
    }
}

/// Lemma-style product for until: controls `Q × S`, moves synchronized on
/// actions and restricted to source states satisfying φ, target
/// `F × Sat(ψ) × Γ*`.
fn build_until(
    lts: &Lts,
    aut: &Automaton,
    sat_x: &StateSet,
    sat_y: &StateSet,
) -> Result<UntilRun, CheckError> {
    // Epsilon edges would desynchronize the product; eliminate them first.
    let finite_owned;
    let aut = match aut {
        Automaton::Finite(a) if a.rules().iter().any(|(_, l, _)| l.is_none()) => {
            finite_owned = Automaton::Finite(a.eliminate_epsilon());
            &finite_owned
        }
        other => other,
    };

    let n_lts = lts.state_count();
    let (n_q, init_q, finals, syms, bottom) = shape_of(aut);

    let mut pds = PushdownSystem::new("until_product");
    let mut controls = Vec::with_capacity(n_q * n_lts);
    for q in 0..n_q {
        for s in 0..n_lts {
            controls.push(pds.intern_control(&format!("q{q}_s{s}")));
        }
    }
    for (i, name) in syms.iter().enumerate() {
        let id = pds.intern_sym(name);
        debug_assert_eq!(id as usize, i);
    }
    let n_syms = syms.len() as u32;
    let control = |q: u32, s: u32| controls[q as usize * n_lts + s as usize];

    let mut meta: Vec<(u32, u32)> = Vec::new();
    let mut add = |pds: &mut PushdownSystem, from: u32, g: u32, to: u32, w: &[u32], a: u32, t: u32| {
        let before = pds.rule_count();
        pds.add_rule(from, g, to, w);
        if pds.rule_count() > before {
            meta.push((a, t));
        }
    };

    for (s, a, t) in lts.transitions() {
        if !sat_x.contains(s) {
            continue;
        }
        let action = lts.action_name(a);
        match aut {
            Automaton::Finite(fa) => {
                let Ok(l) = fa.letter_id(action) else { continue };
                for &(q, ml, q2) in fa.rules() {
                    if ml == Some(l) {
                        add(&mut pds, control(q, s), 0, control(q2, t), &[0], a, t);
                    }
                }
            }
            Automaton::Vpa(va) => {
                let Ok(l) = va.letter_id(action) else { continue };
                match va.letter_class(l) {
                    LetterClass::Call => {
                        for &(q, rl, push, q2) in va.call_rules() {
                            if rl == l {
                                for d in 0..n_syms {
                                    add(&mut pds, control(q, s), d, control(q2, t), &[push, d], a, t);
                                }
                            }
                        }
                    }
                    LetterClass::Return => {
                        for &(q, rl, top, q2) in va.return_rules() {
                            if rl == l {
                                if top == bottom {
                                    add(&mut pds, control(q, s), top, control(q2, t), &[bottom], a, t);
                                } else {
                                    add(&mut pds, control(q, s), top, control(q2, t), &[], a, t);
                                }
                            }
                        }
                    }
                    LetterClass::Internal => {
                        for &(q, rl, q2) in va.internal_rules() {
                            if rl == l {
                                for d in 0..n_syms {
                                    add(&mut pds, control(q, s), d, control(q2, t), &[d], a, t);
                                }
                            }
                        }
                    }
                }
            }
            Automaton::Pda(pa) => {
                let Ok(l) = pa.letter_id(action) else { continue };
                for r in pa.rules() {
                    if r.letter == l {
                        add(&mut pds, control(r.from, s), r.top, control(r.to, t), &r.replacement, a, t);
                    }
                }
            }
        }
    }

    let product_controls = pds.control_count();
    let product_rules = pds.rule_count();
    let (norm, origins) = normalize(&pds);

    let mut target = ConfigAutomaton::new(&norm);
    let acc = target.add_aux();
    target.mark_final(acc);
    for g in 0..n_syms {
        target.add_edge(acc, g, acc);
    }
    for q in 0..n_q as u32 {
        if !finals[q as usize] {
            continue;
        }
        for s in sat_y.iter() {
            let c = control(q, s);
            target.mark_final(c);
            for g in 0..n_syms {
                target.add_edge(c, g, acc);
            }
        }
    }

    let sat = pre_star(&norm, &target)?;
    Ok(UntilRun {
        product_controls,
        product_rules,
        origins,
        meta,
        sat,
        controls,
        n_lts,
        init_q,
        stack0: vec![bottom],
    })
}

struct ReleaseRun {
    product_controls: usize,
    product_rules: usize,
    sat: SaturatedCa,
    controls: Vec<u32>,
    n_lts: usize,
    init_q: u32,
    bottom: u32,
}

impl ReleaseRun {
    fn control(&self, q: u32, s: u32) -> u32 {
        self.controls[q as usize * self.n_lts + s as usize]
    }
}

/// Lemma-style product for release over a deterministic complete
/// automaton. A control `(p,s)` with a violated obligation (`p` final but
/// `s` not satisfying ψ) moves only to `b`; a released control (`s`
/// satisfies φ, obligation intact) moves only to `g`; all others take the
/// synchronized steps. A state satisfies release iff its configuration, in
/// the product without the `b` moves, can reach a dead safe configuration
/// or has an infinite run.
fn build_release(
    lts: &Lts,
    aut: &Automaton,
    sat_x: &StateSet,
    sat_y: &StateSet,
) -> Result<ReleaseRun, CheckError> {
    let n_lts = lts.state_count();
    let (n_q, init_q, finals, syms, bottom) = shape_of(aut);
    let n_syms = syms.len() as u32;

    let mut pds = PushdownSystem::new("release_product");
    let mut controls = Vec::with_capacity(n_q * n_lts);
    for q in 0..n_q {
        for s in 0..n_lts {
            controls.push(pds.intern_control(&format!("q{q}_s{s}")));
        }
    }
    let good = pds.intern_control("g");
    let bad = pds.intern_control("b");
    for (i, name) in syms.iter().enumerate() {
        let id = pds.intern_sym(name);
        debug_assert_eq!(id as usize, i);
    }
    let control = |q: u32, s: u32| controls[q as usize * n_lts + s as usize];

    // Deterministic successor tables; completeness guarantees totality.
    let mut fin_next: HashMap<(u32, u32), u32> = HashMap::new();
    let mut call_next: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    let mut ret_next: HashMap<(u32, u32, u32), u32> = HashMap::new();
    let mut int_next: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pda_next: HashMap<(u32, u32, u32), (u32, Vec<u32>)> = HashMap::new();
    match aut {
        Automaton::Finite(a) => {
            for &(q, l, q2) in a.rules() {
                fin_next.insert((q, l.expect("complete dfa has no epsilon")), q2);
            }
        }
        Automaton::Vpa(a) => {
            for &(q, l, push, q2) in a.call_rules() {
                call_next.insert((q, l), (q2, push));
            }
            for &(q, l, top, q2) in a.return_rules() {
                ret_next.insert((q, l, top), q2);
            }
            for &(q, l, q2) in a.internal_rules() {
                int_next.insert((q, l), q2);
            }
        }
        Automaton::Pda(a) => {
            for r in a.rules() {
                pda_next.insert((r.from, r.letter, r.top), (r.to, r.replacement.clone()));
            }
        }
    }
    let letter_of = |action: &str| -> u32 {
        match aut {
            Automaton::Finite(a) => a.letter_id(action),
            Automaton::Vpa(a) => a.letter_id(action),
            Automaton::Pda(a) => a.letter_id(action),
        }
        .expect("the release automaton was widened over the system's actions")
    };

    // Triggers of the full product (b moves included) decide which
    // configurations count as dead; the saturated system omits the b moves.
    let mut triggers_full: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
    for q in 0..n_q as u32 {
        for s in 0..n_lts as u32 {
            let c = control(q, s);
            let violated = finals[q as usize] && !sat_y.contains(s);
            let released = sat_x.contains(s);
            if violated {
                for g in 0..n_syms {
                    triggers_full.insert((c, g));
                    // moves to b are failure halts: not added to the system
                }
                continue;
            }
            if released {
                for g in 0..n_syms {
                    triggers_full.insert((c, g));
                    pds.add_rule(c, g, good, &[]);
                }
                continue;
            }
            for &(a, t) in lts.successors(s)? {
                let l = letter_of(lts.action_name(a));
                match aut {
                    Automaton::Finite(_) => {
                        let q2 = fin_next[&(q, l)];
                        triggers_full.insert((c, bottom));
                        pds.add_rule(c, bottom, control(q2, t), &[bottom]);
                    }
                    Automaton::Vpa(va) => match va.letter_class(l) {
                        LetterClass::Call => {
                            let (q2, push) = call_next[&(q, l)];
                            for g in 0..n_syms {
                                triggers_full.insert((c, g));
                                pds.add_rule(c, g, control(q2, t), &[push, g]);
                            }
                        }
                        LetterClass::Return => {
                            for g in 0..n_syms {
                                let q2 = ret_next[&(q, l, g)];
                                triggers_full.insert((c, g));
                                if g == bottom {
                                    pds.add_rule(c, g, control(q2, t), &[bottom]);
                                } else {
                                    pds.add_rule(c, g, control(q2, t), &[]);
                                }
                            }
                        }
                        LetterClass::Internal => {
                            let q2 = int_next[&(q, l)];
                            for g in 0..n_syms {
                                triggers_full.insert((c, g));
                                pds.add_rule(c, g, control(q2, t), &[g]);
                            }
                        }
                    },
                    Automaton::Pda(_) => {
                        for g in 0..n_syms {
                            let (q2, repl) = pda_next[&(q, l, g)].clone();
                            triggers_full.insert((c, g));
                            pds.add_rule(c, g, control(q2, t), &repl);
                        }
                    }
                }
            }
        }
    }

    let product_controls = pds.control_count();
    // count the omitted b moves as part of the product's size
    let b_rules: usize = (0..n_q as u32)
        .flat_map(|q| (0..n_lts as u32).map(move |s| (q, s)))
        .filter(|&(q, s)| finals[q as usize] && !sat_y.contains(s))
        .count()
        * n_syms as usize;
    let product_rules = pds.rule_count() + b_rules;

    let (norm, _origins) = normalize(&pds);

    let mut target = ConfigAutomaton::new(&norm);
    let univ = target.add_aux();
    target.mark_final(univ);
    for g in 0..n_syms {
        target.add_edge(univ, g, univ);
    }
    // dead safe halts: original controls other than b, on untriggered tops
    for c in 0..product_controls as u32 {
        if c == bad {
            continue;
        }
        target.mark_final(c);
        for g in 0..n_syms {
            if !triggers_full.contains(&(c, g)) {
                target.add_edge(c, g, univ);
            }
        }
    }
    // heads that can repeat sustain an infinite run
    for (p, g) in repeating_heads(&norm)? {
        target.add_edge(p, g, univ);
    }

    let sat = pre_star(&norm, &target)?;
    Ok(ReleaseRun {
        product_controls,
        product_rules,
        sat,
        controls,
        n_lts,
        init_q,
        bottom,
    })
}

/// (state count, initial, final flags, stack symbol names, bottom id) of an
/// automaton, with finite kinds lifted to a one-symbol stack they never
/// touch.
fn shape_of(aut: &Automaton) -> (usize, u32, Vec<bool>, Vec<String>, u32) {
    match aut {
        Automaton::Finite(a) => {
            let finals = (0..a.state_count() as u32).map(|q| a.is_final(q)).collect();
            (
                a.state_count(),
                a.initial().expect("validated automaton"),
                finals,
                vec!["__bot".to_string()],
                0,
            )
        }
        Automaton::Vpa(a) => {
            let finals = (0..a.state_count() as u32).map(|q| a.finals().contains(&q)).collect();
            (
                a.state_count(),
                a.initial().expect("validated automaton"),
                finals,
                a.stack_syms().to_vec(),
                a.bottom().expect("validated automaton"),
            )
        }
        Automaton::Pda(a) => {
            let finals = (0..a.state_count() as u32).map(|q| a.finals().contains(&q)).collect();
            (
                a.state_count(),
                a.initial().expect("validated automaton"),
                finals,
                a.stack_syms().to_vec(),
                a.bottom().expect("validated automaton"),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::FiniteAutomaton;
    use crate::text::formula::parse_formula;
    use crate::text::lts_format::parse_lts;

    fn f(src: &str) -> Formula {
        parse_formula(src).unwrap()
    }

    fn env_for(lts: &Lts) -> Env {
        Env::new(lts.actions())
    }

    fn verdicts(lts: &Lts, env: &Env, src: &str) -> Vec<bool> {
        let r = check(lts, env, &f(src)).unwrap();
        (0..lts.state_count() as u32).map(|s| r.sat.contains(s)).collect()
    }

    /// Single state, self-loops on a and b.
    fn universal_loop() -> Lts {
        parse_lts("system u\nactions a b\nstate s0\ntrans s0 a s0\ntrans s0 b s0\ninit s0\n")
            .unwrap()
    }

    #[test]
    fn until_reachability_matches_language_emptiness() {
        let lts = universal_loop();
        let mut env = env_for(&lts);
        // (aa)* — nonempty
        let mut even = FiniteAutomaton::new("even", true);
        even.add_state("e0").unwrap();
        even.add_state("e1").unwrap();
        even.add_letter("a").unwrap();
        even.set_initial("e0").unwrap();
        even.add_final("e0").unwrap();
        even.add_rule("e0", Some("a"), "e1").unwrap();
        even.add_rule("e1", Some("a"), "e0").unwrap();
        even.validate().unwrap();
        env.insert(Automaton::Finite(even)).unwrap();
        // no final state — empty
        let mut void = FiniteAutomaton::new("void", false);
        void.add_state("v").unwrap();
        void.add_letter("a").unwrap();
        void.set_initial("v").unwrap();
        void.validate().unwrap();
        env.insert(Automaton::Finite(void)).unwrap();
        env.insert(Automaton::Vpa(crate::automata::vpa::tests::anbn())).unwrap();
        env.insert(Automaton::Pda(crate::automata::pda::tests::anban())).unwrap();

        assert_eq!(verdicts(&lts, &env, "EF[even] tt"), [true]);
        assert_eq!(verdicts(&lts, &env, "EF[void] tt"), [false]);
        assert_eq!(verdicts(&lts, &env, "EF[anbn] tt"), [true]);
        assert_eq!(verdicts(&lts, &env, "EF[anban] tt"), [true]);
    }

    #[test]
    fn empty_word_in_language_keeps_target_states() {
        // s0 is a dead end satisfying q; epsilon is in a*, so E(p U q)
        // holds at s0 without p holding anywhere.
        let lts = parse_lts("system m\nactions a\nprops q\nstate s0 [q]\ninit s0\n").unwrap();
        let env = env_for(&lts);
        assert_eq!(verdicts(&lts, &env, "E(ff U[re:a*] q)"), [true]);
        // without q the same state fails
        assert_eq!(verdicts(&lts, &env, "E(ff U[re:a*] !q)"), [false]);
    }

    #[test]
    fn until_without_any_target_is_empty() {
        let lts = universal_loop();
        let env = env_for(&lts);
        assert_eq!(verdicts(&lts, &env, "E(tt U[re:a*] ff)"), [false]);
    }

    #[test]
    fn release_with_empty_language_holds_everywhere() {
        // complete dfa with no final state: no prefix ever lands in L, so
        // E(ff R[L] ff) is vacuously true at every state.
        let lts = universal_loop();
        let mut env = env_for(&lts);
        let mut none = FiniteAutomaton::new("none", true);
        none.add_state("n").unwrap();
        none.add_letter("a").unwrap();
        none.add_letter("b").unwrap();
        none.set_initial("n").unwrap();
        none.add_rule("n", Some("a"), "n").unwrap();
        none.add_rule("n", Some("b"), "n").unwrap();
        none.validate().unwrap();
        env.insert(Automaton::Finite(none)).unwrap();
        assert_eq!(verdicts(&lts, &env, "E(ff R[none] ff)"), [true]);
    }

    #[test]
    fn parity_of_a_self_loop_shows_in_release() {
        // one state looping on a; q does not hold, and epsilon lands in
        // (aa)*, so EG[(aa)*] q fails immediately
        let lts = parse_lts("system m\nactions a\nprops q\nstate s0 []\ntrans s0 a s0\ninit s0\n")
            .unwrap();
        let env = env_for(&lts);
        assert_eq!(verdicts(&lts, &env, "EG[re:(aa)*] q"), [false]);
        // with q holding, the infinite loop satisfies every checkpoint
        let lts2 =
            parse_lts("system m\nactions a\nprops q\nstate s0 [q]\ntrans s0 a s0\ninit s0\n")
                .unwrap();
        let env2 = env_for(&lts2);
        assert_eq!(verdicts(&lts2, &env2, "EG[re:(aa)*] q"), [true]);
    }

    #[test]
    fn two_cycle_distinguishes_even_checkpoints() {
        let lts = parse_lts(
            "system m\nactions a\nprops q\nstate s0 [q]\nstate s1 []\ntrans s0 a s1\ntrans s1 a s0\ninit s0\n",
        )
        .unwrap();
        let env = env_for(&lts);
        // from s0 every even-length word returns to s0 where q holds;
        // from s1 the empty word already violates
        assert_eq!(verdicts(&lts, &env, "AG[re:(aa)*] q"), [true, false]);
    }

    #[test]
    fn step_operators_respect_dead_ends() {
        let lts =
            parse_lts("system m\nactions a\nstate s0\nstate s1\ntrans s0 a s1\ninit s0\n").unwrap();
        let env = env_for(&lts);
        assert_eq!(verdicts(&lts, &env, "EX tt"), [true, false]);
        assert_eq!(verdicts(&lts, &env, "AX ff"), [false, true]);
        // the universal step operator is true at dead ends over any letter
        assert_eq!(verdicts(&lts, &env, "AX[re:a] ff"), [false, true]);
    }

    #[test]
    fn buffer_loop_property_verdicts() {
        let lts = parse_lts(
            "system buffer_loop\nactions p c r\nstate s0\ntrans s0 p s0\ntrans s0 c s0\ntrans s0 r s0\ninit s0\n",
        )
        .unwrap();
        let mut env = env_for(&lts);
        let mut nbu = Automaton::Vpa(crate::automata::vpa::tests::balanced());
        nbu.set_name("nbu");
        env.insert(nbu).unwrap();

        let one = "AG EX[re:p] tt";
        let two = "AG[nbu] (AX[re:c] ff & EX[re:r] tt)";
        let three = "AG[~nbu] (EX[re:c] tt & AX[re:r] ff)";
        assert_eq!(verdicts(&lts, &env, one), [true]);
        assert_eq!(verdicts(&lts, &env, two), [false]);
        assert_eq!(verdicts(&lts, &env, three), [false]);
        let conjunction = format!("({one}) & ({two}) & ({three})");
        assert_eq!(verdicts(&lts, &env, &conjunction), [false]);
    }

    #[test]
    fn witness_replays_on_the_system_and_automaton() {
        let lts = parse_lts(
            "system m\nactions a b\nprops q\nstate s0 []\nstate s1 []\nstate s2 []\nstate s3 [q]\n\
             trans s0 a s1\ntrans s1 a s2\ntrans s2 b s3\ninit s0\n",
        )
        .unwrap();
        let env = env_for(&lts);
        let w = witness(&lts, &env, &f("E(tt U[re:aab] q)"), 0).unwrap().unwrap();
        assert_eq!(w.actions, ["a", "a", "b"]);
        assert_eq!(w.states, ["s0", "s1", "s2", "s3"]);

        // a state that does not satisfy the formula has no witness
        assert!(witness(&lts, &env, &f("E(tt U[re:aab] q)"), 1).unwrap().is_none());
        // non-until roots have none either
        assert!(witness(&lts, &env, &f("AG q"), 0).unwrap().is_none());
        // the zero-step witness is the empty word
        let w = witness(&lts, &env, &f("E(tt U[re:a*] q)"), 3).unwrap().unwrap();
        assert!(w.actions.is_empty());
        assert_eq!(w.states, ["s3"]);
    }

    #[test]
    fn truncated_counter_chain_reaches_its_dead_end() {
        // s0 -a-> s1 -a-> s2 -a-> s3 -b-> s4 -b-> s5 -b-> s6 (dead):
        // the word aaabbb belongs to the matched-count language, and the
        // only state where AX ff holds is the dead end s6.
        let mut src = String::from("system chain\nactions a b\n");
        for i in 0..7 {
            src.push_str(&format!("state s{i}\n"));
        }
        for i in 0..3 {
            src.push_str(&format!("trans s{} a s{}\n", i, i + 1));
        }
        for i in 3..6 {
            src.push_str(&format!("trans s{} b s{}\n", i, i + 1));
        }
        src.push_str("init s0\n");
        let lts = parse_lts(&src).unwrap();
        let mut env = env_for(&lts);
        env.insert(Automaton::Vpa(crate::automata::vpa::tests::anbn())).unwrap();

        let r = check(&lts, &env, &f("EF[anbn] AX ff")).unwrap();
        assert!(r.sat.contains(0));
        // mid-chain states see an unbalanced suffix only
        assert!(!r.sat.contains(1));
        assert!(!r.sat.contains(2));

        let w = witness(&lts, &env, &f("EF[anbn] AX ff"), 0).unwrap().unwrap();
        assert_eq!(w.actions, ["a", "a", "a", "b", "b", "b"]);
        assert_eq!(w.states.last().unwrap(), "s6");
    }

    #[test]
    fn nondeterministic_pushdown_release_is_refused() {
        let lts = universal_loop();
        let mut env = env_for(&lts);
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

        let err = check(&lts, &env, &f("EG[nd] tt")).unwrap_err();
        match err {
            CheckError::Logic(LogicError::UndecidableRelease { name, subformula }) => {
                assert_eq!(name, "nd");
                assert!(subformula.contains("R[nd]"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn reports_and_dumps_describe_each_temporal_node() {
        let lts = universal_loop();
        let mut env = env_for(&lts);
        let mut nfa = FiniteAutomaton::new("enda", false);
        nfa.add_state("n0").unwrap();
        nfa.add_state("n1").unwrap();
        nfa.add_letter("a").unwrap();
        nfa.set_initial("n0").unwrap();
        nfa.add_final("n1").unwrap();
        nfa.add_rule("n0", Some("a"), "n0").unwrap();
        nfa.add_rule("n0", Some("a"), "n1").unwrap();
        nfa.validate().unwrap();
        env.insert(Automaton::Finite(nfa)).unwrap();

        let r = check_with(
            &lts,
            &env,
            &f("EF[enda] tt & EG[enda] tt"),
            CheckOptions { dump_ca: true },
        )
        .unwrap();
        assert_eq!(r.nodes.len(), 2);
        let until = r.nodes.iter().find(|n| n.engine == "until").unwrap();
        let release = r.nodes.iter().find(|n| n.engine == "release").unwrap();
        assert_eq!(until.kind, AutKind::Nfa);
        assert!(until.det_states_before.is_none());
        assert_eq!(release.det_states_before, Some(2));
        assert!(release.det_states_after.is_some());
        assert!(until.product_controls > 0 && until.product_rules > 0);
        assert!(release.saturation_edges > 0);
        assert_eq!(r.dumps.len(), 2);
        assert!(r.dumps.iter().all(|(_, d)| d.contains("final")));
    }

    #[test]
    fn determinization_cap_surfaces_as_an_error() {
        let lts = universal_loop();
        let sigma: Vec<String> = lts.actions().to_vec();
        let mut env = Env::with_cap(&sigma, 2);
        // (a|b)*a(a|b)(a|b): needs 8 subset states
        let mut nfa = FiniteAutomaton::new("wide", false);
        for i in 0..4 {
            nfa.add_state(&format!("n{i}")).unwrap();
        }
        nfa.add_letter("a").unwrap();
        nfa.add_letter("b").unwrap();
        nfa.set_initial("n0").unwrap();
        nfa.add_final("n3").unwrap();
        for l in ["a", "b"] {
            nfa.add_rule("n0", Some(l), "n0").unwrap();
            nfa.add_rule("n1", Some(l), "n2").unwrap();
            nfa.add_rule("n2", Some(l), "n3").unwrap();
        }
        nfa.add_rule("n0", Some("a"), "n1").unwrap();
        nfa.validate().unwrap();
        env.insert(Automaton::Finite(nfa)).unwrap();

        let err = check(&lts, &env, &f("EG[wide] tt")).unwrap_err();
        assert!(matches!(err, CheckError::Automaton(AutomatonError::CapExceeded { .. })));
    }

    #[test]
    fn unknown_proposition_is_reported_with_the_system() {
        let lts = universal_loop();
        let env = env_for(&lts);
        let err = check(&lts, &env, &f("EF zzz")).unwrap_err();
        match err {
            CheckError::UnknownProp { name, system } => {
                assert_eq!(name, "zzz");
                assert_eq!(system, "u");
            }
            other => panic!("unexpected error: {other}"),
        }
    }
}
