//! Classical CTL labeling by explicit least/greatest fixpoints. This is
//! the reference for the unannotated fragment: it works on the surface
//! formula (no desugaring), walks plain `Vec<bool>` tables, and never
//! touches an automaton. Dead ends follow the maximal-path reading: a
//! finite path that stops in a dead end is a legitimate path.

use ectl::logic::{Formula, LanguageRef};
use ectl::lts::Lts;

use crate::OracleError;

/// Evaluates a plain formula at every state. Any annotation other than
/// the defaults (`Σ*` on path operators, `Σ` on step operators) is
/// rejected, because this oracle deliberately knows nothing about
/// automata.
pub fn ctl_fixpoint_check(lts: &Lts, f: &Formula) -> Result<Vec<bool>, OracleError> {
    let n = lts.state_count();
    match f {
        Formula::True => Ok(vec![true; n]),
        Formula::False => Ok(vec![false; n]),
        Formula::Prop(p) => {
            let pid = lts
                .prop_id(p)
                .map_err(|_| OracleError::UnknownProposition { name: p.clone() })?;
            Ok((0..n as u32).map(|s| lts.has_prop(s, pid)).collect())
        }
        Formula::Not(a) => {
            let va = ctl_fixpoint_check(lts, a)?;
            Ok(va.iter().map(|b| !b).collect())
        }
        Formula::And(a, b) => {
            let va = ctl_fixpoint_check(lts, a)?;
            let vb = ctl_fixpoint_check(lts, b)?;
            Ok(va.iter().zip(&vb).map(|(x, y)| *x && *y).collect())
        }
        Formula::Or(a, b) => {
            let va = ctl_fixpoint_check(lts, a)?;
            let vb = ctl_fixpoint_check(lts, b)?;
            Ok(va.iter().zip(&vb).map(|(x, y)| *x || *y).collect())
        }
        Formula::Implies(a, b) => {
            let va = ctl_fixpoint_check(lts, a)?;
            let vb = ctl_fixpoint_check(lts, b)?;
            Ok(va.iter().zip(&vb).map(|(x, y)| !*x || *y).collect())
        }
        Formula::EX(l, a) => {
            step_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            Ok(pre_some(lts, &va))
        }
        Formula::AX(l, a) => {
            step_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            Ok(pre_all(lts, &va))
        }
        Formula::EF(l, a) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            Ok(eu(lts, &vec![true; n], &va))
        }
        Formula::AF(l, a) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            Ok(au(lts, &vec![true; n], &va))
        }
        Formula::EG(l, a) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            Ok(er(lts, &vec![false; n], &va))
        }
        Formula::AG(l, a) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            Ok(ar(lts, &vec![false; n], &va))
        }
        Formula::EU(a, l, b) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            let vb = ctl_fixpoint_check(lts, b)?;
            Ok(eu(lts, &va, &vb))
        }
        Formula::AU(a, l, b) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            let vb = ctl_fixpoint_check(lts, b)?;
            Ok(au(lts, &va, &vb))
        }
        Formula::ER(a, l, b) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            let vb = ctl_fixpoint_check(lts, b)?;
            Ok(er(lts, &va, &vb))
        }
        Formula::AR(a, l, b) => {
            path_default(l, f)?;
            let va = ctl_fixpoint_check(lts, a)?;
            let vb = ctl_fixpoint_check(lts, b)?;
            Ok(ar(lts, &va, &vb))
        }
    }
}

fn step_default(l: &LanguageRef, f: &Formula) -> Result<(), OracleError> {
    if matches!(l, LanguageRef::Sigma) {
        Ok(())
    } else {
        Err(OracleError::AnnotatedOperator { formula: f.to_string() })
    }
}

fn path_default(l: &LanguageRef, f: &Formula) -> Result<(), OracleError> {
    if matches!(l, LanguageRef::SigmaStar) {
        Ok(())
    } else {
        Err(OracleError::AnnotatedOperator { formula: f.to_string() })
    }
}

fn succs(lts: &Lts, s: u32) -> &[(u32, u32)] {
    lts.successors(s).expect("state id from iteration")
}

/// Some successor satisfies `v`; false at dead ends.
fn pre_some(lts: &Lts, v: &[bool]) -> Vec<bool> {
    (0..lts.state_count() as u32)
        .map(|s| succs(lts, s).iter().any(|(_, t)| v[*t as usize]))
        .collect()
}

/// Every successor satisfies `v`; vacuously true at dead ends.
fn pre_all(lts: &Lts, v: &[bool]) -> Vec<bool> {
    (0..lts.state_count() as u32)
        .map(|s| succs(lts, s).iter().all(|(_, t)| v[*t as usize]))
        .collect()
}

fn dead(lts: &Lts, s: u32) -> bool {
    succs(lts, s).is_empty()
}

/// E(x U y): least fixpoint of Z = y ∨ (x ∧ EX Z).
fn eu(lts: &Lts, x: &[bool], y: &[bool]) -> Vec<bool> {
    let mut z = y.to_vec();
    loop {
        let pre = pre_some(lts, &z);
        let mut changed = false;
        for s in 0..z.len() {
            if !z[s] && x[s] && pre[s] {
                z[s] = true;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// A(x U y): least fixpoint of Z = y ∨ (x ∧ ¬dead ∧ AX Z). The dead-end
/// conjunct matters: the path stopping there never reaches a y-state.
fn au(lts: &Lts, x: &[bool], y: &[bool]) -> Vec<bool> {
    let mut z = y.to_vec();
    loop {
        let pre = pre_all(lts, &z);
        let mut changed = false;
        for s in 0..z.len() {
            if !z[s] && x[s] && !dead(lts, s as u32) && pre[s] {
                z[s] = true;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// E(x R y): greatest fixpoint of Z = y ∧ (x ∨ dead ∨ EX Z). A dead end
/// labeled y carries the release on its own: the maximal path ends there
/// with every obligation met.
fn er(lts: &Lts, x: &[bool], y: &[bool]) -> Vec<bool> {
    let mut z = vec![true; y.len()];
    loop {
        let pre = pre_some(lts, &z);
        let mut changed = false;
        for s in 0..z.len() {
            let keep = y[s] && (x[s] || dead(lts, s as u32) || pre[s]);
            if z[s] && !keep {
                z[s] = false;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// A(x R y): greatest fixpoint of Z = y ∧ (x ∨ AX Z); AX is vacuous at
/// dead ends, so a y-labeled dead end satisfies the release.
fn ar(lts: &Lts, x: &[bool], y: &[bool]) -> Vec<bool> {
    let mut z = vec![true; y.len()];
    loop {
        let pre = pre_all(lts, &z);
        let mut changed = false;
        for s in 0..z.len() {
            let keep = y[s] && (x[s] || pre[s]);
            if z[s] && !keep {
                z[s] = false;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ectl::text::formula::parse_formula;
    use ectl::text::lts_format::parse_lts;

    /// s0 -a-> s1 -a-> s2 (dead), with a b-loop s1 -b-> s1; q on s2.
    fn chain() -> Lts {
        parse_lts(
            "system chain\nactions a b\nprops q\n\
             state s0 []\nstate s1 []\nstate s2 [q]\n\
             trans s0 a s1\ntrans s1 a s2\ntrans s1 b s1\ninit s0\n",
        )
        .unwrap()
    }

    fn eval(lts: &Lts, src: &str) -> Vec<bool> {
        ctl_fixpoint_check(lts, &parse_formula(src).unwrap()).unwrap()
    }

    #[test]
    fn hand_checked_three_state_cases() {
        let l = chain();
        assert_eq!(eval(&l, "EF q"), [true, true, true]);
        assert_eq!(eval(&l, "AF q"), [false, false, true]); // s1 may loop on b forever
        assert_eq!(eval(&l, "EG !q"), [true, true, false]);
        assert_eq!(eval(&l, "AG !q"), [false, false, false]);
        assert_eq!(eval(&l, "EX q"), [false, true, false]);
        assert_eq!(eval(&l, "AX q"), [false, false, true]); // dead end: vacuous
        assert_eq!(eval(&l, "A(tt U q)"), [false, false, true]);
        assert_eq!(eval(&l, "E(q R !q)"), [true, true, false]);
    }

    #[test]
    fn dead_ends_follow_the_maximal_path_reading() {
        let l = parse_lts(
            "system dots\nactions a\nprops y\nstate d0 [y]\nstate d1 []\ninit d0\n",
        )
        .unwrap();
        // both states are dead ends: the only maximal path is the empty one
        assert_eq!(eval(&l, "A(tt U y)"), [true, false]);
        assert_eq!(eval(&l, "E(ff R y)"), [true, false]);
        assert_eq!(eval(&l, "A(ff R y)"), [true, false]);
        assert_eq!(eval(&l, "EG tt"), [true, true]);
    }

    #[test]
    fn annotations_are_refused() {
        let l = chain();
        let f = parse_formula("EF[re:ab] q").unwrap();
        let err = ctl_fixpoint_check(&l, &f).unwrap_err();
        assert!(err.to_string().contains("annotated"), "{err}");
    }
}
