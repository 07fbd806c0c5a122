//! Parser for the `.dl` text format.
//!
//! ```text
//! file      := "[tbox]" axiom* "[abox]" assertion*
//! axiom     := cexpr "<=" cexpr | cexpr "<=" "func" role "." cexpr
//! cexpr     := conj
//! conj      := unary ("&" unary)*
//! unary     := "top" | "bot" | NAME | "(" cexpr ")" | "not" unary
//!            | "exists" role ["." unary] | "forall" role "." unary
//! role      := NAME | NAME "-"
//! assertion := NAME "(" NAME ")" | NAME "(" NAME "," NAME ")"
//! ```
//!
//! `#` starts a comment. Prefix operators bind tighter than `&`, so
//! `exists r.A & B` is `(exists r.A) & B`; parenthesize the filler to get the
//! other reading. Sugar is expanded during parsing: `bot` is `not top`,
//! `forall r.C` is `not exists r.(not C)` and `exists r` is `exists r.top`.

use std::collections::BTreeMap;

use super::{ABox, Assertion, Axiom, Concept, ConceptName, Individual, Kb, Role, RoleName, TBox};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    SyntaxError { line: u32, col: u32, expected: String },
    #[error("namespace clash: `{name}` used both as {first} and as {second}")]
    NamespaceClash { name: String, first: &'static str, second: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LBracketSection(String), // [tbox] / [abox]
    Name(String),
    Subsumes, // <=
    Amp,
    Dot,
    Comma,
    LParen,
    RParen,
    Minus,
    KwTop,
    KwBot,
    KwNot,
    KwExists,
    KwForall,
    KwFunc,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::SyntaxError { line: self.line, col: self.col, expected: expected.to_string() }
    }

    fn bump(&mut self, ch: char) {
        self.pos += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump(c);
                continue;
            }
            if c == '#' {
                while let Some(c) = self.peek() {
                    self.bump(c);
                    if c == '\n' {
                        break;
                    }
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match c {
                '[' => {
                    self.bump(c);
                    let mut section = String::new();
                    while let Some(c) = self.peek() {
                        if c == ']' {
                            break;
                        }
                        section.push(c);
                        self.bump(c);
                    }
                    match self.peek() {
                        Some(']') => self.bump(']'),
                        _ => return Err(self.error("`]`")),
                    }
                    Tok::LBracketSection(section)
                }
                '<' => {
                    self.bump(c);
                    match self.peek() {
                        Some('=') => {
                            self.bump('=');
                            Tok::Subsumes
                        }
                        _ => return Err(self.error("`<=`")),
                    }
                }
                '&' => {
                    self.bump(c);
                    Tok::Amp
                }
                '.' => {
                    self.bump(c);
                    Tok::Dot
                }
                ',' => {
                    self.bump(c);
                    Tok::Comma
                }
                '(' => {
                    self.bump(c);
                    Tok::LParen
                }
                ')' => {
                    self.bump(c);
                    Tok::RParen
                }
                '-' => {
                    self.bump(c);
                    Tok::Minus
                }
                c if c.is_alphanumeric() || c == '_' => {
                    let mut name = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_alphanumeric() || c == '_' {
                            name.push(c);
                            self.bump(c);
                        } else {
                            break;
                        }
                    }
                    match name.as_str() {
                        "top" => Tok::KwTop,
                        "bot" => Tok::KwBot,
                        "not" => Tok::KwNot,
                        "exists" => Tok::KwExists,
                        "forall" => Tok::KwForall,
                        "func" => Tok::KwFunc,
                        _ => Tok::Name(name),
                    }
                }
                _ => return Err(self.error("a token")),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum NameKind {
    Concept,
    Row,
    Ind,
}

impl NameKind {
    fn label(self) -> &'static str {
        match self {
            NameKind::Concept => "a concept name",
            NameKind::Row => "a role name",
            NameKind::Ind => "an individual name",
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    namespaces: BTreeMap<String, NameKind>,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &str) -> ParseError {
        match self.peek().or_else(|| self.toks.last()) {
            Some(s) => ParseError::SyntaxError {
                line: s.line,
                col: s.col,
                expected: expected.to_string(),
            },
            None => ParseError::SyntaxError { line: 1, col: 1, expected: expected.to_string() },
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(s) if s.tok == tok => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error_here(expected))
            }
        }
    }

    fn register(&mut self, name: &str, kind: NameKind) -> Result<(), ParseError> {
        match self.namespaces.get(name) {
            None => {
                self.namespaces.insert(name.to_string(), kind);
                Ok(())
            }
            Some(prev) if *prev == kind => Ok(()),
            Some(prev) => Err(ParseError::NamespaceClash {
                name: name.to_string(),
                first: prev.label(),
                second: kind.label(),
            }),
        }
    }

    fn name(&mut self, kind: NameKind) -> Result<String, ParseError> {
        match self.next() {
            Some(Spanned { tok: Tok::Name(n), .. }) => {
                self.register(&n, kind)?;
                Ok(n)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error_here(kind.label()))
            }
        }
    }

    fn role(&mut self) -> Result<Role, ParseError> {
        let n = self.name(NameKind::Row)?;
        let inverted = matches!(self.peek(), Some(Spanned { tok: Tok::Minus, .. }));
        if inverted {
            self.next();
        }
        Ok(Role { name: RoleName::new(n), inverted })
    }

    fn unary(&mut self) -> Result<Concept, ParseError> {
        match self.next() {
            Some(Spanned { tok: Tok::KwTop, .. }) => Ok(Concept::Top),
            Some(Spanned { tok: Tok::KwBot, .. }) => Ok(Concept::bot()),
            Some(Spanned { tok: Tok::KwNot, .. }) => Ok(Concept::not(self.unary()?)),
            Some(Spanned { tok: Tok::KwExists, .. }) => {
                let role = self.role()?;
                if matches!(self.peek(), Some(Spanned { tok: Tok::Dot, .. })) {
                    self.next();
                    Ok(Concept::exists(role, self.unary()?))
                } else {
                    Ok(Concept::exists_top(role))
                }
            }
            Some(Spanned { tok: Tok::KwForall, .. }) => {
                let role = self.role()?;
                self.expect(Tok::Dot, "`.` after forall role")?;
                Ok(Concept::forall(role, self.unary()?))
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let inner = self.cexpr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Spanned { tok: Tok::Name(n), .. }) => {
                self.register(&n, NameKind::Concept)?;
                Ok(Concept::name(n.as_str()))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error_here("a concept expression"))
            }
        }
    }

    fn cexpr(&mut self) -> Result<Concept, ParseError> {
        let mut parts = vec![self.unary()?];
        while matches!(self.peek(), Some(Spanned { tok: Tok::Amp, .. })) {
            self.next();
            parts.push(self.unary()?);
        }
        Ok(Concept::and(parts))
    }

    fn axiom(&mut self) -> Result<Axiom, ParseError> {
        let lhs = self.cexpr()?;
        self.expect(Tok::Subsumes, "`<=`")?;
        if matches!(self.peek(), Some(Spanned { tok: Tok::KwFunc, .. })) {
            self.next();
            let role = self.role()?;
            self.expect(Tok::Dot, "`.` after func role")?;
            let filler = self.cexpr()?;
            Ok(Axiom::funct(lhs, role, filler))
        } else {
            Ok(Axiom::ci(lhs, self.cexpr()?))
        }
    }

    fn assertion(&mut self) -> Result<Assertion, ParseError> {
        // The predicate's namespace depends on arity, so defer registration.
        let pred = match self.next() {
            Some(Spanned { tok: Tok::Name(n), .. }) => n,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error_here("a concept or role name"));
            }
        };
        self.expect(Tok::LParen, "`(`")?;
        let first = self.name(NameKind::Ind)?;
        match self.next() {
            Some(Spanned { tok: Tok::RParen, .. }) => {
                self.register(&pred, NameKind::Concept)?;
                Ok(Assertion::Concept(ConceptName::new(pred), Individual::new(first)))
            }
            Some(Spanned { tok: Tok::Comma, .. }) => {
                self.register(&pred, NameKind::Row)?;
                let second = self.name(NameKind::Ind)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Assertion::Role(RoleName::new(pred), Individual::new(first), Individual::new(second)))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error_here("`)` or `,`"))
            }
        }
    }
}

/// Parse a knowledge base from `.dl` text.
pub fn parse_kb(text: &str) -> Result<Kb, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0, namespaces: BTreeMap::new() };

    match p.next() {
        Some(Spanned { tok: Tok::LBracketSection(s), .. }) if s == "tbox" => {}
        _ => {
            p.pos = p.pos.saturating_sub(1);
            return Err(p.error_here("`[tbox]`"));
        }
    }
    let mut tbox = TBox::default();
    loop {
        match p.peek() {
            Some(Spanned { tok: Tok::LBracketSection(s), .. }) if s == "abox" => {
                p.next();
                break;
            }
            None => return Err(p.error_here("`[abox]`")),
            _ => {
                tbox.insert(p.axiom()?);
            }
        }
    }
    let mut abox = ABox::default();
    while p.peek().is_some() {
        abox.assertions.insert(p.assertion()?);
    }
    Ok(Kb::new(tbox, abox))
}

#[cfg(test)]
mod tests {
    use super::super::serialize_kb;
    use super::*;

    #[test]
    fn empty_sections() {
        let kb = parse_kb("[tbox]\n[abox]\n").unwrap();
        assert!(kb.tbox.is_empty());
        assert!(kb.abox.is_empty());
    }

    #[test]
    fn example_three_text() {
        let kb = parse_kb(
            "# finite C impossible\n\
             [tbox]\n\
             C <= exists r . top\n\
             exists r- . top <= C\n\
             top <= func r- . top\n\
             [abox]\n\
             r(a,a)\n\
             r(a,b)\n",
        )
        .unwrap();
        assert_eq!(kb.tbox.len(), 3);
        assert_eq!(kb.abox.assertions.len(), 2);
        assert_eq!(kb.abox.individuals().len(), 2);
        assert!(kb.tbox.axioms.contains(&Axiom::funct(
            Concept::Top,
            Role::inverse_of("r"),
            Concept::Top
        )));
    }

    #[test]
    fn unqualified_exists_sugar() {
        let kb = parse_kb("[tbox]\nC <= exists r\n[abox]\n").unwrap();
        let expected = Axiom::ci(Concept::name("C"), Concept::exists_top(Role::plain("r")));
        assert!(kb.tbox.axioms.contains(&expected));
    }

    #[test]
    fn forall_and_bot_sugar() {
        let kb = parse_kb("[tbox]\nnot C <= forall r . C\nA & B <= bot\n[abox]\n").unwrap();
        let fa = Axiom::ci(
            Concept::not(Concept::name("C")),
            Concept::forall(Role::plain("r"), Concept::name("C")),
        );
        assert!(kb.tbox.axioms.contains(&fa));
        let disj = Axiom::ci(
            Concept::and([Concept::name("A"), Concept::name("B")]),
            Concept::bot(),
        );
        assert!(kb.tbox.axioms.contains(&disj));
    }

    #[test]
    fn precedence_and_parens() {
        let kb = parse_kb("[tbox]\nexists r . A & B <= exists r . (A & B)\n[abox]\n").unwrap();
        let lhs = Concept::and([Concept::exists(Role::plain("r"), Concept::name("A")), Concept::name("B")]);
        let rhs = Concept::exists(
            Role::plain("r"),
            Concept::and([Concept::name("A"), Concept::name("B")]),
        );
        assert!(kb.tbox.axioms.contains(&Axiom::ci(lhs, rhs)));
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_kb("[tbox]\nC <= \n[abox]\n").unwrap_err();
        match err {
            ParseError::SyntaxError { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn namespace_clash() {
        let err = parse_kb("[tbox]\nC <= exists C . top\n[abox]\n").unwrap_err();
        assert!(matches!(err, ParseError::NamespaceClash { .. }));
        // Individual vs concept clash across sections.
        let err = parse_kb("[tbox]\nC <= top\n[abox]\nD(C)\n").unwrap_err();
        assert!(matches!(err, ParseError::NamespaceClash { .. }));
    }

    #[test]
    fn round_trip_is_identity() {
        let text = "[tbox]\nC <= exists r . (A & B)\nnot A <= forall s- . C\ntop <= func r . A\n[abox]\nC(a)\nr(a,b)\n";
        let kb = parse_kb(text).unwrap();
        let printed = serialize_kb(&kb);
        let back = parse_kb(&printed).unwrap();
        assert_eq!(kb, back);
        // Fixpoint after one round trip.
        assert_eq!(serialize_kb(&back), printed);
    }
}
