//! The transition-system file format. A file declares one system:
//!
//! ```text
//! system buffer
//! actions p c r
//! props full
//! state s0 []
//! state s1 [full]
//! trans s0 p s1
//! trans s1 c s0
//! init s0
//! ```
//!
//! Directives may appear in any order; states may list no propositions
//! either as `[]` or by omitting the brackets.

use super::{split_lines, Line, ParseError};
use crate::lts::Lts;

pub fn parse_lts(src: &str) -> Result<Lts, ParseError> {
    let lines = split_lines(src);

    for l in &lines {
        let d = l.head().text;
        if !matches!(d, "system" | "actions" | "props" | "state" | "trans" | "init") {
            return Err(l.err(format!("unknown directive `{d}`")));
        }
    }

    let mut system: Option<&Line> = None;
    for l in &lines {
        if l.head().text == "system" {
            if system.is_some() {
                return Err(l.err("more than one `system` line"));
            }
            l.expect_len(2, "system NAME")?;
            system = Some(l);
        }
    }
    let system = match system {
        Some(l) => l,
        None => return Err(ParseError::new(1, 1, "missing `system NAME` line")),
    };
    let mut lts = Lts::new(system.rest()[0].text)
        .map_err(|e| ParseError::new(system.no, system.rest()[0].col, e.to_string()))?;

    for l in &lines {
        if l.head().text == "actions" {
            for f in l.rest() {
                lts.add_action(f.text).map_err(|e| ParseError::new(l.no, f.col, e.to_string()))?;
            }
        }
    }
    for l in &lines {
        if l.head().text == "props" {
            for f in l.rest() {
                lts.add_prop(f.text).map_err(|e| ParseError::new(l.no, f.col, e.to_string()))?;
            }
        }
    }
    for l in &lines {
        if l.head().text == "state" {
            let rest = l.rest();
            if rest.is_empty() {
                return Err(l.err("expected `state NAME [prop ...]`"));
            }
            let name = rest[0];
            let props: Vec<&str> = match rest.len() {
                1 => vec![],
                _ => {
                    if rest[1].text != "[" || rest[rest.len() - 1].text != "]" {
                        return Err(ParseError::new(
                            l.no,
                            rest[1].col,
                            "expected a bracketed proposition list",
                        ));
                    }
                    rest[2..rest.len() - 1].iter().map(|f| f.text).collect()
                }
            };
            lts.add_state(name.text, &props)
                .map_err(|e| ParseError::new(l.no, name.col, e.to_string()))?;
        }
    }
    for l in &lines {
        if l.head().text == "trans" {
            l.expect_len(4, "trans SRC ACTION DST")?;
            let r = l.rest();
            lts.add_transition(r[0].text, r[1].text, r[2].text)
                .map_err(|e| ParseError::new(l.no, r[0].col, e.to_string()))?;
        }
    }
    for l in &lines {
        if l.head().text == "init" {
            if l.rest().is_empty() {
                return Err(l.err("expected `init STATE ...`"));
            }
            for f in l.rest() {
                lts.add_designated(f.text)
                    .map_err(|e| ParseError::new(l.no, f.col, e.to_string()))?;
            }
        }
    }
    Ok(lts)
}

pub fn write_lts(lts: &Lts) -> String {
    let mut out = String::new();
    out.push_str(&format!("system {}\n", lts.name()));
    if !lts.actions().is_empty() {
        out.push_str(&format!("actions {}\n", lts.actions().join(" ")));
    }
    if !lts.props().is_empty() {
        out.push_str(&format!("props {}\n", lts.props().join(" ")));
    }
    for (i, s) in lts.states().iter().enumerate() {
        let props: Vec<&str> =
            lts.label(i as u32).iter().map(|&p| lts.props()[p as usize].as_str()).collect();
        out.push_str(&format!("state {} [{}]\n", s, props.join(" ")));
    }
    for (s, a, t) in lts.transitions() {
        out.push_str(&format!(
            "trans {} {} {}\n",
            lts.state_name(s),
            lts.action_name(a),
            lts.state_name(t)
        ));
    }
    if !lts.designated().is_empty() {
        let names: Vec<&str> = lts.designated().iter().map(|&s| lts.state_name(s)).collect();
        out.push_str(&format!("init {}\n", names.join(" ")));
    }
    out
}
