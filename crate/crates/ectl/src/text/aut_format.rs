//! The automaton file format. The `kind` directive picks one of the six
//! supported kinds and fixes which other directives and rule shapes are
//! legal:
//!
//! ```text
//! kind dvpa            # nfa | dfa | vpa | dvpa | pda | dpda
//! name nbu
//! calls p              # vpa kinds classify their letters
//! returns c
//! internals r
//! stack Z G
//! bottom Z
//! states e n
//! initial e
//! final e
//! rule e p push G n    # call: push a symbol
//! rule n c pop G e     # return: pop the top
//! rule e r e           # internal: leave the stack alone
//! ```
//!
//! Finite kinds use `alphabet` and three-field rules (`rule q a q2`, with
//! the reserved letter name `eps` for an epsilon edge); the pushdown kinds
//! use `rule q a G -> q2 G1 G2` with the replacement written top-first.

use super::{split_lines, Line, ParseError};
use crate::automata::{
    AutKind, Automaton, FiniteAutomaton, LetterClass, PdaAutomaton, VpaAutomaton,
};

fn first<'a, 'b>(lines: &'a [Line<'b>], directive: &str) -> Option<&'a Line<'b>> {
    lines.iter().find(|l| l.head().text == directive)
}

fn wrap<T>(
    r: Result<T, crate::automata::AutomatonError>,
    line: usize,
    col: usize,
) -> Result<T, ParseError> {
    r.map_err(|e| ParseError::new(line, col, e.to_string()))
}

pub fn parse_aut(src: &str) -> Result<Automaton, ParseError> {
    let lines = split_lines(src);

    let kind_line = first(&lines, "kind")
        .ok_or_else(|| ParseError::new(1, 1, "missing `kind` directive"))?;
    kind_line.expect_len(2, "kind nfa|dfa|vpa|dvpa|pda|dpda")?;
    let kind = AutKind::parse(kind_line.rest()[0].text).ok_or_else(|| {
        ParseError::new(
            kind_line.no,
            kind_line.rest()[0].col,
            format!("unknown automaton kind `{}`", kind_line.rest()[0].text),
        )
    })?;
    if lines.iter().filter(|l| l.head().text == "kind").count() > 1 {
        return Err(kind_line.err("more than one `kind` line"));
    }

    let name_line = first(&lines, "name")
        .ok_or_else(|| ParseError::new(1, 1, "missing `name` directive"))?;
    name_line.expect_len(2, "name IDENT")?;
    let name = name_line.rest()[0].text;

    let allowed: &[&str] = match kind {
        AutKind::Dfa | AutKind::Nfa => {
            &["kind", "name", "alphabet", "states", "initial", "final", "rule"]
        }
        AutKind::Dvpa | AutKind::Vpa => &[
            "kind", "name", "calls", "returns", "internals", "stack", "bottom", "states",
            "initial", "final", "rule",
        ],
        AutKind::Dpda | AutKind::Pda => &[
            "kind", "name", "alphabet", "stack", "bottom", "states", "initial", "final", "rule",
        ],
    };
    for l in &lines {
        let d = l.head().text;
        if !allowed.contains(&d) {
            return Err(l.err(format!("directive `{d}` is not valid for kind `{kind}`")));
        }
    }

    let initial_line = first(&lines, "initial")
        .ok_or_else(|| ParseError::new(1, 1, "missing `initial` directive"))?;
    initial_line.expect_len(2, "initial STATE")?;

    match kind {
        AutKind::Dfa | AutKind::Nfa => parse_finite(&lines, kind, name, kind_line),
        AutKind::Dvpa | AutKind::Vpa => parse_vpa(&lines, kind, name, kind_line),
        AutKind::Dpda | AutKind::Pda => parse_pda(&lines, kind, name, kind_line),
    }
}

fn parse_finite(
    lines: &[Line],
    kind: AutKind,
    name: &str,
    kind_line: &Line,
) -> Result<Automaton, ParseError> {
    let mut a = FiniteAutomaton::new(name, kind.deterministic());
    for l in lines {
        match l.head().text {
            "alphabet" => {
                for f in l.rest() {
                    if f.text == "eps" {
                        return Err(ParseError::new(
                            l.no,
                            f.col,
                            "`eps` is reserved for epsilon edges",
                        ));
                    }
                    wrap(a.add_letter(f.text), l.no, f.col)?;
                }
            }
            "states" => {
                for f in l.rest() {
                    wrap(a.add_state(f.text), l.no, f.col)?;
                }
            }
            _ => {}
        }
    }
    for l in lines {
        match l.head().text {
            "initial" => wrap(a.set_initial(l.rest()[0].text), l.no, l.rest()[0].col)?,
            "final" => {
                for f in l.rest() {
                    wrap(a.add_final(f.text), l.no, f.col)?;
                }
            }
            "rule" => {
                l.expect_len(4, "rule FROM LETTER TO")?;
                let r = l.rest();
                let letter = if r[1].text == "eps" { None } else { Some(r[1].text) };
                wrap(a.add_rule(r[0].text, letter, r[2].text), l.no, r[0].col)?;
            }
            _ => {}
        }
    }
    wrap(a.validate(), kind_line.no, kind_line.head().col)?;
    Ok(Automaton::Finite(a))
}

fn parse_vpa(
    lines: &[Line],
    kind: AutKind,
    name: &str,
    kind_line: &Line,
) -> Result<Automaton, ParseError> {
    let mut a = VpaAutomaton::new(name, kind.deterministic());
    for l in lines {
        let class = match l.head().text {
            "calls" => LetterClass::Call,
            "returns" => LetterClass::Return,
            "internals" => LetterClass::Internal,
            "states" => {
                for f in l.rest() {
                    wrap(a.add_state(f.text), l.no, f.col)?;
                }
                continue;
            }
            "stack" => {
                for f in l.rest() {
                    wrap(a.add_stack_sym(f.text), l.no, f.col)?;
                }
                continue;
            }
            _ => continue,
        };
        for f in l.rest() {
            wrap(a.add_letter(f.text, class), l.no, f.col)?;
        }
    }
    for l in lines {
        match l.head().text {
            "bottom" => {
                l.expect_len(2, "bottom SYM")?;
                wrap(a.set_bottom(l.rest()[0].text), l.no, l.rest()[0].col)?;
            }
            "initial" => wrap(a.set_initial(l.rest()[0].text), l.no, l.rest()[0].col)?,
            "final" => {
                for f in l.rest() {
                    wrap(a.add_final(f.text), l.no, f.col)?;
                }
            }
            "rule" => {
                let r = l.rest();
                match r.len() {
                    3 => wrap(a.add_internal_rule(r[0].text, r[1].text, r[2].text), l.no, r[0].col)?,
                    5 if r[2].text == "push" => {
                        wrap(a.add_call_rule(r[0].text, r[1].text, r[3].text, r[4].text), l.no, r[0].col)?
                    }
                    5 if r[2].text == "pop" => {
                        wrap(a.add_return_rule(r[0].text, r[1].text, r[3].text, r[4].text), l.no, r[0].col)?
                    }
                    _ => {
                        return Err(l.err(
                            "expected `rule FROM LETTER TO`, `rule FROM LETTER push SYM TO`, or `rule FROM LETTER pop SYM TO`",
                        ))
                    }
                }
            }
            _ => {}
        }
    }
    wrap(a.validate(), kind_line.no, kind_line.head().col)?;
    Ok(Automaton::Vpa(a))
}

fn parse_pda(
    lines: &[Line],
    kind: AutKind,
    name: &str,
    kind_line: &Line,
) -> Result<Automaton, ParseError> {
    let mut a = PdaAutomaton::new(name, kind.deterministic());
    for l in lines {
        match l.head().text {
            "alphabet" => {
                for f in l.rest() {
                    wrap(a.add_letter(f.text), l.no, f.col)?;
                }
            }
            "states" => {
                for f in l.rest() {
                    wrap(a.add_state(f.text), l.no, f.col)?;
                }
            }
            "stack" => {
                for f in l.rest() {
                    wrap(a.add_stack_sym(f.text), l.no, f.col)?;
                }
            }
            _ => {}
        }
    }
    for l in lines {
        match l.head().text {
            "bottom" => {
                l.expect_len(2, "bottom SYM")?;
                wrap(a.set_bottom(l.rest()[0].text), l.no, l.rest()[0].col)?;
            }
            "initial" => wrap(a.set_initial(l.rest()[0].text), l.no, l.rest()[0].col)?,
            "final" => {
                for f in l.rest() {
                    wrap(a.add_final(f.text), l.no, f.col)?;
                }
            }
            "rule" => {
                let r = l.rest();
                if r.len() < 5 || r[3].text != "->" {
                    return Err(l.err("expected `rule FROM LETTER TOP -> TO [SYM ...]`"));
                }
                let replacement: Vec<&str> = r[5..].iter().map(|f| f.text).collect();
                wrap(
                    a.add_rule(r[0].text, r[1].text, r[2].text, r[4].text, &replacement),
                    l.no,
                    r[0].col,
                )?;
            }
            _ => {}
        }
    }
    wrap(a.validate(), kind_line.no, kind_line.head().col)?;
    Ok(Automaton::Pda(a))
}

pub fn write_aut(a: &Automaton) -> String {
    let mut out = String::new();
    out.push_str(&format!("kind {}\n", a.kind()));
    out.push_str(&format!("name {}\n", a.name()));
    match a {
        Automaton::Finite(a) => {
            if !a.alphabet().is_empty() {
                out.push_str(&format!("alphabet {}\n", a.alphabet().join(" ")));
            }
            out.push_str(&format!("states {}\n", a.states().join(" ")));
            out.push_str(&format!("initial {}\n", a.states()[a.initial().unwrap() as usize]));
            push_finals(&mut out, a.finals().iter().map(|&q| a.states()[q as usize].as_str()));
            for &(f, l, t) in a.rules() {
                let letter = match l {
                    Some(l) => a.alphabet()[l as usize].as_str(),
                    None => "eps",
                };
                out.push_str(&format!(
                    "rule {} {} {}\n",
                    a.states()[f as usize],
                    letter,
                    a.states()[t as usize]
                ));
            }
        }
        Automaton::Vpa(a) => {
            for (directive, class) in [
                ("calls", LetterClass::Call),
                ("returns", LetterClass::Return),
                ("internals", LetterClass::Internal),
            ] {
                let letters: Vec<&str> = a
                    .letters()
                    .iter()
                    .filter(|(_, c)| *c == class)
                    .map(|(n, _)| n.as_str())
                    .collect();
                if !letters.is_empty() {
                    out.push_str(&format!("{} {}\n", directive, letters.join(" ")));
                }
            }
            out.push_str(&format!("stack {}\n", a.stack_syms().join(" ")));
            out.push_str(&format!("bottom {}\n", a.stack_syms()[a.bottom().unwrap() as usize]));
            out.push_str(&format!("states {}\n", a.states().join(" ")));
            out.push_str(&format!("initial {}\n", a.states()[a.initial().unwrap() as usize]));
            push_finals(&mut out, a.finals().iter().map(|&q| a.states()[q as usize].as_str()));
            for &(f, l, g, t) in a.call_rules() {
                out.push_str(&format!(
                    "rule {} {} push {} {}\n",
                    a.states()[f as usize],
                    a.letters()[l as usize].0,
                    a.stack_syms()[g as usize],
                    a.states()[t as usize]
                ));
            }
            for &(f, l, g, t) in a.return_rules() {
                out.push_str(&format!(
                    "rule {} {} pop {} {}\n",
                    a.states()[f as usize],
                    a.letters()[l as usize].0,
                    a.stack_syms()[g as usize],
                    a.states()[t as usize]
                ));
            }
            for &(f, l, t) in a.internal_rules() {
                out.push_str(&format!(
                    "rule {} {} {}\n",
                    a.states()[f as usize],
                    a.letters()[l as usize].0,
                    a.states()[t as usize]
                ));
            }
        }
        Automaton::Pda(a) => {
            out.push_str(&format!("alphabet {}\n", a.alphabet().join(" ")));
            out.push_str(&format!("stack {}\n", a.stack_syms().join(" ")));
            out.push_str(&format!("bottom {}\n", a.stack_syms()[a.bottom().unwrap() as usize]));
            out.push_str(&format!("states {}\n", a.states().join(" ")));
            out.push_str(&format!("initial {}\n", a.states()[a.initial().unwrap() as usize]));
            push_finals(&mut out, a.finals().iter().map(|&q| a.states()[q as usize].as_str()));
            for r in a.rules() {
                let mut line = format!(
                    "rule {} {} {} -> {}",
                    a.states()[r.from as usize],
                    a.alphabet()[r.letter as usize],
                    a.stack_syms()[r.top as usize],
                    a.states()[r.to as usize]
                );
                for &s in &r.replacement {
                    line.push(' ');
                    line.push_str(&a.stack_syms()[s as usize]);
                }
                line.push('\n');
                out.push_str(&line);
            }
        }
    }
    out
}

fn push_finals<'a>(out: &mut String, finals: impl Iterator<Item = &'a str>) {
    let names: Vec<&str> = finals.collect();
    if !names.is_empty() {
        out.push_str(&format!("final {}\n", names.join(" ")));
    }
}
