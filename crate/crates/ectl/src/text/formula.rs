//! The formula expression syntax.
//!
//! ```text
//! phi ::= "tt" | "ff" | IDENT
//!       | "!" phi | phi "&" phi | phi "|" phi | phi "->" phi
//!       | "(" phi ")"
//!       | ("E" | "A") "(" phi ("U" | "R") lang? phi ")"
//!       | ("EF" | "AF" | "EG" | "AG" | "EX" | "AX") lang? phi
//! lang ::= "[" IDENT "]" | "[" "~" IDENT "]" | "[" "re:" REGEX "]"
//!        | "[" KIND ":" IDENT "]"
//! ```
//!
//! `!` binds tighter than `&`, `&` than `|`, `|` than `->`; the binary
//! connectives associate to the right. The prefix operators take a unary
//! operand, so `EF p & q` is `(EF p) & q`. An omitted annotation means the
//! single-step language on `EX`/`AX` and the unconstrained language
//! everywhere else. A `KIND ":"` prefix (`[pda:anban]`) demands the named
//! automaton at that kind; only forgetting determinism is allowed.
//! `#` starts a comment.

use super::ParseError;
use crate::automata::AutKind;
use crate::logic::{Formula, LanguageRef};
use crate::lts::is_ident;

const RESERVED: [&str; 12] = ["tt", "ff", "E", "A", "U", "R", "EF", "AF", "EG", "AG", "EX", "AX"];

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Word(String),
    Lang(LanguageRef),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Word(w) => format!("`{w}`"),
            TokKind::Lang(l) => format!("`{l}`"),
            TokKind::Not => "`!`".to_string(),
            TokKind::And => "`&`".to_string(),
            TokKind::Or => "`|`".to_string(),
            TokKind::Implies => "`->`".to_string(),
            TokKind::LParen => "`(`".to_string(),
            TokKind::RParen => "`)`".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(src: &str) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            match c {
                Some('\n') => {
                    line += 1;
                    col = 1;
                }
                Some(_) => col += 1,
                None => {}
            }
            c
        }};
    }

    loop {
        let (l, c0) = (line, col);
        let c = match chars.peek() {
            Some(&c) => c,
            None => break,
        };
        match c {
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            c if c.is_whitespace() => {
                bump!();
            }
            '!' => {
                bump!();
                toks.push(Tok { kind: TokKind::Not, line: l, col: c0 });
            }
            '&' => {
                bump!();
                toks.push(Tok { kind: TokKind::And, line: l, col: c0 });
            }
            '|' => {
                bump!();
                toks.push(Tok { kind: TokKind::Or, line: l, col: c0 });
            }
            '(' => {
                bump!();
                toks.push(Tok { kind: TokKind::LParen, line: l, col: c0 });
            }
            ')' => {
                bump!();
                toks.push(Tok { kind: TokKind::RParen, line: l, col: c0 });
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    toks.push(Tok { kind: TokKind::Implies, line: l, col: c0 });
                } else {
                    return Err(ParseError::new(l, c0, "expected `->`"));
                }
            }
            '[' => {
                bump!();
                let mut body = String::new();
                loop {
                    match bump!() {
                        Some(']') => break,
                        Some('\n') | None => {
                            return Err(ParseError::new(
                                l,
                                c0,
                                "unterminated language annotation",
                            ))
                        }
                        Some(c) => body.push(c),
                    }
                }
                let lang = if let Some(pattern) = body.strip_prefix("re:") {
                    LanguageRef::Regex(pattern.to_string())
                } else if let Some(name) = body.strip_prefix('~') {
                    if !is_ident(name) {
                        return Err(ParseError::new(
                            l,
                            c0,
                            format!("`{name}` is not an automaton name"),
                        ));
                    }
                    LanguageRef::Complement(name.to_string())
                } else if let Some((kind, name)) = body.split_once(':') {
                    let Some(kind) = AutKind::parse(kind) else {
                        return Err(ParseError::new(
                            l,
                            c0,
                            format!("`{kind}` is not an automaton kind"),
                        ));
                    };
                    if !is_ident(name) {
                        return Err(ParseError::new(
                            l,
                            c0,
                            format!("`{name}` is not an automaton name"),
                        ));
                    }
                    LanguageRef::Kinded(kind, name.to_string())
                } else {
                    if !is_ident(&body) {
                        return Err(ParseError::new(
                            l,
                            c0,
                            format!("`{body}` is not an automaton name"),
                        ));
                    }
                    LanguageRef::Named(body)
                };
                toks.push(Tok { kind: TokKind::Lang(lang), line: l, col: c0 });
            }
            c if is_word_char(c) => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    w.push(c);
                    bump!();
                }
                toks.push(Tok { kind: TokKind::Word(w), line: l, col: c0 });
            }
            other => {
                return Err(ParseError::new(l, c0, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&TokKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, msg)
    }

    fn expect(&mut self, kind: TokKind) -> Result<(), ParseError> {
        match self.peek() {
            Some(k) if *k == kind => {
                self.bump();
                Ok(())
            }
            Some(k) => Err(self.err_here(format!("expected {}, found {}", kind.describe(), k.describe()))),
            None => Err(self.err_here(format!("expected {}, found end of input", kind.describe()))),
        }
    }

    /// Consumes a `[...]` annotation if one is next; otherwise the default.
    fn lang_or(&mut self, default: LanguageRef) -> LanguageRef {
        if let Some(TokKind::Lang(_)) = self.peek() {
            match self.bump().unwrap().kind {
                TokKind::Lang(l) => l,
                _ => unreachable!(),
            }
        } else {
            default
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if let Some(TokKind::Implies) = self.peek() {
            self.bump();
            let right = self.implies()?;
            Ok(Formula::Implies(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let left = self.and()?;
        if let Some(TokKind::Or) = self.peek() {
            self.bump();
            let right = self.or()?;
            Ok(Formula::Or(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        if let Some(TokKind::And) = self.peek() {
            self.bump();
            let right = self.and()?;
            Ok(Formula::And(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(TokKind::Not) => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(TokKind::Word(w)) if matches!(w.as_str(), "EF" | "AF" | "EG" | "AG") => {
                let op = w.clone();
                self.bump();
                let lang = self.lang_or(LanguageRef::SigmaStar);
                let x = Box::new(self.unary()?);
                Ok(match op.as_str() {
                    "EF" => Formula::EF(lang, x),
                    "AF" => Formula::AF(lang, x),
                    "EG" => Formula::EG(lang, x),
                    _ => Formula::AG(lang, x),
                })
            }
            Some(TokKind::Word(w)) if matches!(w.as_str(), "EX" | "AX") => {
                let op = w.clone();
                self.bump();
                let lang = self.lang_or(LanguageRef::Sigma);
                let x = Box::new(self.unary()?);
                Ok(if op == "EX" { Formula::EX(lang, x) } else { Formula::AX(lang, x) })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let (line, col) = self.here();
        match self.bump().map(|t| t.kind) {
            Some(TokKind::Word(w)) => match w.as_str() {
                "tt" => Ok(Formula::True),
                "ff" => Ok(Formula::False),
                "E" | "A" => {
                    self.expect(TokKind::LParen)?;
                    let x = Box::new(self.implies()?);
                    let op = match self.bump().map(|t| t.kind) {
                        Some(TokKind::Word(op)) if op == "U" || op == "R" => op,
                        _ => {
                            return Err(ParseError::new(
                                line,
                                col,
                                format!("expected `U` or `R` inside `{w}(...)`"),
                            ))
                        }
                    };
                    let lang = self.lang_or(LanguageRef::SigmaStar);
                    let y = Box::new(self.implies()?);
                    self.expect(TokKind::RParen)?;
                    Ok(match (w.as_str(), op.as_str()) {
                        ("E", "U") => Formula::EU(x, lang, y),
                        ("E", "R") => Formula::ER(x, lang, y),
                        ("A", "U") => Formula::AU(x, lang, y),
                        _ => Formula::AR(x, lang, y),
                    })
                }
                w if RESERVED.contains(&w) => Err(ParseError::new(
                    line,
                    col,
                    format!("`{w}` is a reserved word, not a proposition"),
                )),
                _ => Ok(Formula::Prop(w)),
            },
            Some(TokKind::LParen) => {
                let x = self.implies()?;
                self.expect(TokKind::RParen)?;
                Ok(x)
            }
            Some(k) => Err(ParseError::new(
                line,
                col,
                format!("expected a formula, found {}", k.describe()),
            )),
            None => Err(ParseError::new(line, col, "expected a formula, found end of input")),
        }
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let toks = lex(src)?;
    let lines = src.lines().count().max(1);
    let end = (lines, src.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1));
    let mut p = Parser { toks, pos: 0, end };
    let f = p.implies()?;
    if let Some(k) = p.peek() {
        return Err(p.err_here(format!("unexpected {} after the formula", k.describe())));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Formula::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn prop(s: &str) -> Formula {
        Prop(s.to_string())
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            p("p & q | r"),
            Or(Box::new(And(Box::new(prop("p")), Box::new(prop("q")))), Box::new(prop("r")))
        );
        assert_eq!(
            p("!p & q"),
            And(Box::new(Not(Box::new(prop("p")))), Box::new(prop("q")))
        );
        assert_eq!(p("p -> q -> r"), p("p -> (q -> r)"));
        assert_eq!(p("p & q & r"), p("p & (q & r)"));
        assert_eq!(p("(p | q) & r"), And(Box::new(p("p | q")), Box::new(prop("r"))));
    }

    #[test]
    fn temporal_operators_and_annotations() {
        assert_eq!(
            p("E(p U q)"),
            EU(Box::new(prop("p")), LanguageRef::SigmaStar, Box::new(prop("q")))
        );
        assert_eq!(
            p("E(p U[A] q)"),
            EU(Box::new(prop("p")), LanguageRef::Named("A".into()), Box::new(prop("q")))
        );
        assert_eq!(
            p("A(p R[~A] q)"),
            AR(Box::new(prop("p")), LanguageRef::Complement("A".into()), Box::new(prop("q")))
        );
        assert_eq!(
            p("EF[re:(aa)*] p"),
            EF(LanguageRef::Regex("(aa)*".into()), Box::new(prop("p")))
        );
        assert_eq!(p("AX ff"), AX(LanguageRef::Sigma, Box::new(False)));
        assert_eq!(p("EX[c] tt"), EX(LanguageRef::Named("c".into()), Box::new(True)));
        assert_eq!(
            p("AG EX tt"),
            AG(LanguageRef::SigmaStar, Box::new(EX(LanguageRef::Sigma, Box::new(True))))
        );
    }

    #[test]
    fn prefix_operators_take_a_unary_operand() {
        assert_eq!(p("EF p & q"), And(Box::new(p("EF p")), Box::new(prop("q"))));
        assert_eq!(p("EF (p & q)"), EF(LanguageRef::SigmaStar, Box::new(p("p & q"))));
        assert_eq!(p("!EF p"), Not(Box::new(p("EF p"))));
        assert_eq!(p("EF !p"), EF(LanguageRef::SigmaStar, Box::new(Not(Box::new(prop("p"))))));
    }

    #[test]
    fn comments_and_multiline_input() {
        let src = "\
# producer/consumer sanity
AG (full -> # only a consume leaves a full buffer
    EX[c] tt)
";
        assert_eq!(
            p(src),
            AG(
                LanguageRef::SigmaStar,
                Box::new(Implies(
                    Box::new(prop("full")),
                    Box::new(EX(LanguageRef::Named("c".into()), Box::new(True)))
                ))
            )
        );
    }

    #[test]
    fn display_round_trips() {
        let sources = [
            "p & (q | r)",
            "!p -> q",
            "E(p U q)",
            "E(p U[A] q)",
            "A(p R[~A] !q)",
            "EF[re:(aa)*] p",
            "AG (full -> EX[c] tt)",
            "AX ff",
            "A(tt U[B] (p -> q))",
            "EG EF p",
            "AG[L] (AX[c] ff & EX[r] tt)",
        ];
        for s in sources {
            let f = p(s);
            let printed = f.to_string();
            assert_eq!(p(&printed), f, "source `{s}` printed as `{printed}`");
        }
    }

    #[test]
    fn error_positions_and_messages() {
        let e = parse_formula("p &").unwrap_err();
        assert_eq!((e.line, e.col), (1, 4));
        assert!(e.msg.contains("end of input"));

        let e = parse_formula("E p").unwrap_err();
        assert!(e.msg.contains("`(`"));

        let e = parse_formula("U & p").unwrap_err();
        assert!(e.msg.contains("reserved"));

        let e = parse_formula("p % q").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));

        let e = parse_formula("E(p U[A q)").unwrap_err();
        assert!(e.msg.contains("unterminated"));

        let e = parse_formula("EF[re:a*] p q").unwrap_err();
        assert!(e.msg.contains("after the formula"));

        let e = parse_formula("EF[b@d] p").unwrap_err();
        assert!(e.msg.contains("not an automaton name"));

        let e = parse_formula("p - q").unwrap_err();
        assert!(e.msg.contains("->"));
    }
}
