//! Compiles regular expressions to epsilon-NFAs. Letters are single
//! characters and must belong to the alphabet the caller supplies; `.`
//! stands for any alphabet letter. Supported operators: concatenation,
//! alternation `|`, grouping `(...)`, and the postfix `*`, `+`, `?`.

use super::finite::FiniteAutomaton;
use super::AutomatonError;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("regex `{pattern}` at byte {pos}: {msg}")]
pub struct RegexError {
    pub pattern: String,
    pub pos: usize,
    pub msg: String,
}

/// One Thompson fragment: a single entry and a single exit state.
#[derive(Clone, Copy)]
struct Frag {
    start: u32,
    end: u32,
}

struct Builder<'a> {
    pattern: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    alphabet: Vec<String>,
    // (from, letter index or None for epsilon, to)
    edges: Vec<(u32, Option<u32>, u32)>,
    next_state: u32,
}

impl<'a> Builder<'a> {
    fn err(&self, msg: impl Into<String>) -> RegexError {
        let byte = self.chars.get(self.pos).map(|(b, _)| *b).unwrap_or(self.pattern.len());
        RegexError { pattern: self.pattern.to_string(), pos: byte, msg: msg.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn fresh(&mut self) -> u32 {
        let s = self.next_state;
        self.next_state += 1;
        s
    }

    fn eps(&mut self, from: u32, to: u32) {
        self.edges.push((from, None, to));
    }

    fn frag_eps(&mut self) -> Frag {
        let s = self.fresh();
        let t = self.fresh();
        self.eps(s, t);
        Frag { start: s, end: t }
    }

    fn frag_letter(&mut self, letter: u32) -> Frag {
        let s = self.fresh();
        let t = self.fresh();
        self.edges.push((s, Some(letter), t));
        Frag { start: s, end: t }
    }

    fn frag_any(&mut self) -> Frag {
        let s = self.fresh();
        let t = self.fresh();
        for l in 0..self.alphabet.len() as u32 {
            self.edges.push((s, Some(l), t));
        }
        Frag { start: s, end: t }
    }

    // alt := cat ('|' cat)*
    fn parse_alt(&mut self) -> Result<Frag, RegexError> {
        let mut frags = vec![self.parse_cat()?];
        while self.peek() == Some('|') {
            self.bump();
            frags.push(self.parse_cat()?);
        }
        if frags.len() == 1 {
            return Ok(frags[0]);
        }
        let s = self.fresh();
        let t = self.fresh();
        for f in frags {
            self.eps(s, f.start);
            self.eps(f.end, t);
        }
        Ok(Frag { start: s, end: t })
    }

    // cat := rep*   (an empty concatenation matches the empty word)
    fn parse_cat(&mut self) -> Result<Frag, RegexError> {
        let mut cur: Option<Frag> = None;
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let next = self.parse_rep()?;
            cur = Some(match cur {
                None => next,
                Some(prev) => {
                    self.eps(prev.end, next.start);
                    Frag { start: prev.start, end: next.end }
                }
            });
        }
        Ok(match cur {
            Some(f) => f,
            None => self.frag_eps(),
        })
    }

    // rep := atom ('*' | '+' | '?')*
    fn parse_rep(&mut self) -> Result<Frag, RegexError> {
        let mut frag = self.parse_atom()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.bump();
                    let s = self.fresh();
                    let t = self.fresh();
                    self.eps(s, frag.start);
                    self.eps(s, t);
                    self.eps(frag.end, frag.start);
                    self.eps(frag.end, t);
                    frag = Frag { start: s, end: t };
                }
                '+' => {
                    self.bump();
                    let s = self.fresh();
                    let t = self.fresh();
                    self.eps(s, frag.start);
                    self.eps(frag.end, frag.start);
                    self.eps(frag.end, t);
                    frag = Frag { start: s, end: t };
                }
                '?' => {
                    self.bump();
                    let s = self.fresh();
                    let t = self.fresh();
                    self.eps(s, frag.start);
                    self.eps(s, t);
                    self.eps(frag.end, t);
                    frag = Frag { start: s, end: t };
                }
                _ => break,
            }
        }
        Ok(frag)
    }

    // atom := '(' alt ')' | '.' | letter
    fn parse_atom(&mut self) -> Result<Frag, RegexError> {
        match self.peek() {
            None => Err(self.err("expected a letter, `(` or `.`")),
            Some('(') => {
                self.bump();
                let frag = self.parse_alt()?;
                if self.peek() != Some(')') {
                    return Err(self.err("unclosed `(`"));
                }
                self.bump();
                Ok(frag)
            }
            Some(')') => Err(self.err("unmatched `)`")),
            Some(c @ ('*' | '+' | '?')) => Err(self.err(format!("`{c}` needs something to repeat"))),
            Some('.') => {
                self.bump();
                Ok(self.frag_any())
            }
            Some(c) => {
                let letter = self
                    .alphabet
                    .iter()
                    .position(|l| l.as_str() == c.to_string())
                    .ok_or_else(|| self.err(format!("letter `{c}` is not in the alphabet")))?;
                self.bump();
                Ok(self.frag_letter(letter as u32))
            }
        }
    }
}

/// Compiles `pattern` over the given alphabet. Every alphabet entry must be a
/// single character, since patterns spell letters without separators.
pub fn regex_to_nfa(
    pattern: &str,
    alphabet: &[String],
    name: &str,
) -> Result<FiniteAutomaton, AutomatonError> {
    for l in alphabet {
        if l.chars().count() != 1 {
            return Err(AutomatonError::Invalid {
                name: name.to_string(),
                msg: format!("alphabet letter `{l}` is not a single character, so it cannot appear in a regular expression"),
            });
        }
    }
    let mut b = Builder {
        pattern,
        chars: pattern.char_indices().collect(),
        pos: 0,
        alphabet: alphabet.to_vec(),
        edges: Vec::new(),
        next_state: 0,
    };
    let frag = b.parse_alt().map_err(|e| AutomatonError::Regex(Box::new(e)))?;
    if b.pos != b.chars.len() {
        return Err(AutomatonError::Regex(Box::new(b.err("trailing input"))));
    }

    let mut nfa = FiniteAutomaton::new(name, false);
    for l in alphabet {
        nfa.add_letter(l)?;
    }
    let state_name = |q: u32| format!("n{q}");
    for q in 0..b.next_state {
        nfa.add_state(&state_name(q))?;
    }
    nfa.set_initial(&state_name(frag.start))?;
    nfa.add_final(&state_name(frag.end))?;
    for (f, l, t) in &b.edges {
        let letter = l.map(|l| b.alphabet[l as usize].clone());
        nfa.add_rule(&state_name(*f), letter.as_deref(), &state_name(*t))?;
    }
    nfa.validate()?;
    Ok(nfa)
}
