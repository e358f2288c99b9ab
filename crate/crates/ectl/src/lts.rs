//! Finite labeled transition systems: named states carrying proposition sets,
//! action-labeled transitions, and the successor structure every engine walks.
//!
//! Paths through a system are maximal: they are infinite unless they reach a
//! state without successors. `is_dead_end` is the primitive that semantics
//! built on maximal paths keeps coming back to.

use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

pub type StateId = u32;
pub type ActionId = u32;
pub type PropId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtsError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("invalid identifier `{0}` (identifiers are [A-Za-z0-9_]+)")]
    BadIdent(String),
    #[error("state index {0} out of range")]
    BadIndex(u32),
}

/// True iff `s` is a valid token for the text formats: nonempty, `[A-Za-z0-9_]+`.
pub fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// A bit-packed set of states of one particular system. Sets remember the
/// state count they were created for, so complements are well-defined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    len: usize,
    bits: Vec<u64>,
}

impl StateSet {
    pub fn empty(len: usize) -> Self {
        StateSet { len, bits: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(i as StateId);
        }
        s
    }

    pub fn from_iter<I: IntoIterator<Item = StateId>>(len: usize, it: I) -> Self {
        let mut s = Self::empty(len);
        for i in it {
            s.insert(i);
        }
        s
    }

    /// Number of states of the underlying system (not the cardinality).
    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: StateId) {
        debug_assert!((i as usize) < self.len);
        self.bits[i as usize / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: StateId) {
        self.bits[i as usize / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: StateId) -> bool {
        (i as usize) < self.len && self.bits[i as usize / 64] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn complement(&self) -> StateSet {
        let mut out = StateSet { len: self.len, bits: self.bits.iter().map(|b| !b).collect() };
        // Mask off the padding bits above `len`.
        if self.len % 64 != 0 {
            if let Some(last) = out.bits.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
        out
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|b| *b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.len as StateId).filter(|i| self.contains(*i))
    }
}

/// A finite labeled transition system. Transitions form a set (duplicates in
/// input are merged); successor lists are kept sorted for deterministic walks.
#[derive(Debug, Clone)]
pub struct Lts {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    props: Vec<String>,
    state_ids: HashMap<String, StateId>,
    action_ids: HashMap<String, ActionId>,
    prop_ids: HashMap<String, PropId>,
    labels: Vec<BTreeSet<PropId>>,
    transitions: BTreeSet<(StateId, ActionId, StateId)>,
    succ: Vec<Vec<(ActionId, StateId)>>,
    designated: Vec<StateId>,
}

impl Lts {
    pub fn new(name: &str) -> Result<Lts, LtsError> {
        if !is_ident(name) {
            return Err(LtsError::BadIdent(name.to_string()));
        }
        Ok(Lts {
            name: name.to_string(),
            states: Vec::new(),
            actions: Vec::new(),
            props: Vec::new(),
            state_ids: HashMap::new(),
            action_ids: HashMap::new(),
            prop_ids: HashMap::new(),
            labels: Vec::new(),
            transitions: BTreeSet::new(),
            succ: Vec::new(),
            designated: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_action(&mut self, name: &str) -> Result<ActionId, LtsError> {
        if !is_ident(name) {
            return Err(LtsError::BadIdent(name.to_string()));
        }
        if let Some(id) = self.action_ids.get(name) {
            return Ok(*id); // repeated declarations merge
        }
        let id = self.actions.len() as ActionId;
        self.actions.push(name.to_string());
        self.action_ids.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_prop(&mut self, name: &str) -> Result<PropId, LtsError> {
        if !is_ident(name) {
            return Err(LtsError::BadIdent(name.to_string()));
        }
        if let Some(id) = self.prop_ids.get(name) {
            return Ok(*id);
        }
        let id = self.props.len() as PropId;
        self.props.push(name.to_string());
        self.prop_ids.insert(name.to_string(), id);
        Ok(id)
    }

    /// Declares a state with its proposition labels (which must be declared).
    pub fn add_state(&mut self, name: &str, props: &[&str]) -> Result<StateId, LtsError> {
        if !is_ident(name) {
            return Err(LtsError::BadIdent(name.to_string()));
        }
        if self.state_ids.contains_key(name) {
            return Err(LtsError::Duplicate { kind: "state", name: name.to_string() });
        }
        let mut label = BTreeSet::new();
        for p in props {
            let id =
                *self.prop_ids.get(*p).ok_or_else(|| LtsError::UnknownProp(p.to_string()))?;
            label.insert(id);
        }
        let id = self.states.len() as StateId;
        self.states.push(name.to_string());
        self.state_ids.insert(name.to_string(), id);
        self.labels.push(label);
        self.succ.push(Vec::new());
        Ok(id)
    }

    pub fn add_transition(&mut self, src: &str, action: &str, dst: &str) -> Result<(), LtsError> {
        let s = self.state_id(src)?;
        let a = self.action_id(action)?;
        let t = self.state_id(dst)?;
        if self.transitions.insert((s, a, t)) {
            let list = &mut self.succ[s as usize];
            let pos = list.binary_search(&(a, t)).unwrap_err();
            list.insert(pos, (a, t));
        }
        Ok(())
    }

    /// Appends a designated (initial/query) state; duplicates are ignored.
    pub fn add_designated(&mut self, name: &str) -> Result<(), LtsError> {
        let id = self.state_id(name)?;
        if !self.designated.contains(&id) {
            self.designated.push(id);
        }
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn state_id(&self, name: &str) -> Result<StateId, LtsError> {
        self.state_ids.get(name).copied().ok_or_else(|| LtsError::UnknownState(name.to_string()))
    }

    pub fn action_id(&self, name: &str) -> Result<ActionId, LtsError> {
        self.action_ids
            .get(name)
            .copied()
            .ok_or_else(|| LtsError::UnknownAction(name.to_string()))
    }

    pub fn prop_id(&self, name: &str) -> Result<PropId, LtsError> {
        self.prop_ids.get(name).copied().ok_or_else(|| LtsError::UnknownProp(name.to_string()))
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id as usize]
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.actions[id as usize]
    }

    pub fn label(&self, s: StateId) -> &BTreeSet<PropId> {
        &self.labels[s as usize]
    }

    pub fn has_prop(&self, s: StateId, p: PropId) -> bool {
        self.labels[s as usize].contains(&p)
    }

    /// All states labeled with `p`, as a set.
    pub fn sat_prop(&self, p: PropId) -> StateSet {
        StateSet::from_iter(
            self.state_count(),
            (0..self.state_count() as StateId).filter(|s| self.has_prop(*s, p)),
        )
    }

    /// Action-labeled successors of `s`, sorted by (action, target).
    pub fn successors(&self, s: StateId) -> Result<&[(ActionId, StateId)], LtsError> {
        self.succ.get(s as usize).map(|v| v.as_slice()).ok_or(LtsError::BadIndex(s))
    }

    /// True iff `s` has no outgoing transition, i.e. every maximal path
    /// reaching `s` ends there.
    pub fn is_dead_end(&self, s: StateId) -> Result<bool, LtsError> {
        Ok(self.successors(s)?.is_empty())
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, ActionId, StateId)> + '_ {
        self.transitions.iter().copied()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn designated(&self) -> &[StateId] {
        &self.designated
    }
}
