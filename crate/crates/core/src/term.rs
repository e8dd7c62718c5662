//! Syntax of the scattered-function calculus.
//!
//! Terms are built from the atoms `empty`, `one`, `min(α+1)`, `max(α)`, the
//! two non-scattered sentinels `idq`/`idbaire`, and the constructors finite
//! gluing, ω-gluing, pointed gluing of a constant sequence and wedge.
//!
//! The derived [`Ord`] is the fixed syntactic order used to canonicalize
//! multisets and to break ties; it has no semantic meaning.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError, OrdinalParser};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Empty,
    One,
    IdQ,
    IdBaire,
    /// Finite gluing; summands are kept sorted so equal multisets compare equal.
    Glue(Vec<Term>),
    /// Gluing of ω copies of the body.
    Omega(Box<Term>),
    /// Pointed gluing of the constant sequence `⊕members`.
    PglSet(BTreeSet<Term>),
    /// `⋁(⊕F₀, …, ⊕F_k | ⊕D)`; the vertical family is kept sorted.
    Wedge {
        verticals: Vec<BTreeSet<Term>>,
        diagonal: BTreeSet<Term>,
    },
    MinFn(Ordinal),
    MaxFn(Ordinal),
}

impl Term {
    pub fn glue(summands: impl IntoIterator<Item = Term>) -> Term {
        let mut v: Vec<Term> = summands.into_iter().collect();
        v.sort();
        Term::Glue(v)
    }

    pub fn omega(body: Term) -> Term {
        Term::Omega(Box::new(body))
    }

    pub fn pgl(members: impl IntoIterator<Item = Term>) -> Term {
        Term::PglSet(members.into_iter().collect())
    }

    pub fn wedge(
        verticals: impl IntoIterator<Item = BTreeSet<Term>>,
        diagonal: impl IntoIterator<Item = Term>,
    ) -> Term {
        let mut v: Vec<BTreeSet<Term>> = verticals.into_iter().collect();
        v.sort();
        Term::Wedge {
            verticals: v,
            diagonal: diagonal.into_iter().collect(),
        }
    }

    /// `n` copies of `t` glued together.
    pub fn copies(n: usize, t: &Term) -> Term {
        Term::glue(std::iter::repeat_n(t.clone(), n))
    }

    /// `V_{α}` for successor `α`.
    pub fn min(rank: Ordinal) -> Term {
        Term::MinFn(rank)
    }

    /// `Λ_α`.
    pub fn max(rank: Ordinal) -> Term {
        Term::MaxFn(rank)
    }

    pub fn is_sentinel(&self) -> bool {
        matches!(self, Term::IdQ | Term::IdBaire)
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Term::Glue(ts) => ts.iter().map(Term::size).sum(),
            Term::Omega(t) => t.size(),
            Term::PglSet(ms) => ms.iter().map(Term::size).sum(),
            Term::Wedge { verticals, diagonal } => {
                verticals.iter().flatten().chain(diagonal).map(Term::size).sum()
            }
            _ => 0,
        }
    }

    pub fn depth(&self) -> usize {
        let children = match self {
            Term::Glue(ts) => ts.iter().map(Term::depth).max(),
            Term::Omega(t) => Some(t.depth()),
            Term::PglSet(ms) => ms.iter().map(Term::depth).max(),
            Term::Wedge { verticals, diagonal } => {
                verticals.iter().flatten().chain(diagonal).map(Term::depth).max()
            }
            _ => None,
        };
        1 + children.unwrap_or(0)
    }

    /// The summand multiset of a gluing; any other term is its own single summand.
    pub fn summands(&self) -> &[Term] {
        match self {
            Term::Glue(ts) => ts,
            other => std::slice::from_ref(other),
        }
    }
}

pub fn format_term(t: &Term) -> String {
    t.to_string()
}

pub fn syntactic_cmp(a: &Term, b: &Term) -> std::cmp::Ordering {
    a.cmp(b)
}

pub fn term_size(t: &Term) -> usize {
    t.size()
}

fn write_list<'a>(
    f: &mut fmt::Formatter<'_>,
    items: impl IntoIterator<Item = &'a Term>,
) -> fmt::Result {
    for (i, t) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Empty => f.write_str("empty"),
            Term::One => f.write_str("one"),
            Term::IdQ => f.write_str("idq"),
            Term::IdBaire => f.write_str("idbaire"),
            Term::MinFn(a) => write!(f, "min({a})"),
            Term::MaxFn(a) => write!(f, "max({a})"),
            Term::Glue(ts) => {
                f.write_str("glue(")?;
                write_list(f, ts)?;
                f.write_str(")")
            }
            Term::Omega(t) => write!(f, "omega({t})"),
            Term::PglSet(ms) => {
                f.write_str("pgl{")?;
                write_list(f, ms)?;
                f.write_str("}")
            }
            Term::Wedge { verticals, diagonal } => {
                f.write_str("wedge(")?;
                for (i, v) in verticals.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str("{")?;
                    write_list(f, v)?;
                    f.write_str("}")?;
                }
                f.write_str(" | {")?;
                write_list(f, diagonal)?;
                f.write_str("})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("bad ordinal: {0}")]
    Ordinal(#[from] OrdinalError),
    #[error("min({rank}) at {pos}: rank must be a successor ordinal")]
    MinRankNotSuccessor { pos: usize, rank: Ordinal },
    #[error("empty pointed gluing at {pos}")]
    EmptyPgl { pos: usize },
    #[error("empty vertical set in wedge at {pos}")]
    EmptyVertical { pos: usize },
    #[error("duplicate vertical set in wedge at {pos}")]
    DuplicateVertical { pos: usize },
    #[error("non-scattered atom {atom} at {pos} cannot occur inside a constructor")]
    NestedSentinel { pos: usize, atom: &'static str },
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    text.parse()
}

impl FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let t = p.term(0)?;
        p.skip_ws();
        if p.pos < s.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn ordinal(&mut self) -> Result<Ordinal, ParseError> {
        let mut op = OrdinalParser::new(self.src, self.pos);
        let o = op.parse()?;
        self.pos = op.pos;
        Ok(o)
    }

    fn list(&mut self, close: u8, depth: usize) -> Result<Vec<Term>, ParseError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.term(depth)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(b',')?;
        }
    }

    fn set(&mut self, depth: usize) -> Result<BTreeSet<Term>, ParseError> {
        self.expect(b'{')?;
        Ok(self.list(b'}', depth)?.into_iter().collect())
    }

    /// `depth` counts enclosing constructors; sentinels are only legal at 0.
    fn term(&mut self, depth: usize) -> Result<Term, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let bytes = self.src.as_bytes();
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: usize = self.src[start..self.pos].parse().map_err(|_| ParseError::Syntax {
                pos: start,
                msg: "count out of range".into(),
            })?;
            self.expect(b'*')?;
            let body = self.term(depth + 1)?;
            return Ok(Term::copies(n, &body));
        }
        let word = self.word().to_string();
        let t = match word.as_str() {
            "empty" => Term::Empty,
            "one" => Term::One,
            "idq" | "idbaire" => {
                if depth > 0 {
                    return Err(ParseError::NestedSentinel {
                        pos: start,
                        atom: if word == "idq" { "idq" } else { "idbaire" },
                    });
                }
                if word == "idq" {
                    Term::IdQ
                } else {
                    Term::IdBaire
                }
            }
            "min" | "max" => {
                self.expect(b'(')?;
                let rank = self.ordinal()?;
                self.expect(b')')?;
                if word == "min" {
                    if !rank.is_successor() {
                        return Err(ParseError::MinRankNotSuccessor { pos: start, rank });
                    }
                    Term::MinFn(rank)
                } else {
                    Term::MaxFn(rank)
                }
            }
            "glue" => {
                self.expect(b'(')?;
                Term::glue(self.list(b')', depth + 1)?)
            }
            "omega" => {
                self.expect(b'(')?;
                let body = self.term(depth + 1)?;
                self.expect(b')')?;
                Term::omega(body)
            }
            "pgl" => {
                self.expect(b'{')?;
                let members = self.list(b'}', depth + 1)?;
                if members.is_empty() {
                    return Err(ParseError::EmptyPgl { pos: start });
                }
                Term::pgl(members)
            }
            "wedge" => {
                self.expect(b'(')?;
                let mut verticals: Vec<BTreeSet<Term>> = Vec::new();
                loop {
                    let at = {
                        self.skip_ws();
                        self.pos
                    };
                    let v = self.set(depth + 1)?;
                    if v.is_empty() {
                        return Err(ParseError::EmptyVertical { pos: at });
                    }
                    if verticals.contains(&v) {
                        return Err(ParseError::DuplicateVertical { pos: at });
                    }
                    verticals.push(v);
                    if self.eat(b'|') {
                        break;
                    }
                    self.expect(b',')?;
                }
                let diagonal = self.set(depth + 1)?;
                self.expect(b')')?;
                Term::wedge(verticals, diagonal)
            }
            "" => return Err(self.error("expected a term")),
            _ => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unknown constructor '{word}'"),
                })
            }
        };
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(t("min(w+1)"), Term::MinFn(o("w+1")));
        assert_eq!(
            t("glue(one, omega(one))"),
            Term::glue([Term::One, Term::omega(Term::One)])
        );
        assert_eq!(
            t("wedge({max(w)} | {min(w+1)})"),
            Term::wedge([BTreeSet::from([Term::MaxFn(o("w"))])], [Term::MinFn(o("w+1"))])
        );
        assert_eq!(t("3*one"), Term::glue([Term::One, Term::One, Term::One]));
        assert_eq!(t(" pgl{ one ,omega(one) } "), Term::pgl([Term::One, Term::omega(Term::One)]));
        assert_eq!(t("wedge({one}, {empty} | {})"), Term::wedge(
            [BTreeSet::from([Term::One]), BTreeSet::from([Term::Empty])],
            [],
        ));
    }

    #[test]
    fn glue_is_a_multiset() {
        assert_eq!(t("glue(omega(one), one)"), t("glue(one, omega(one))"));
        assert_ne!(t("glue(one, one)"), t("glue(one)"));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_term("min(w)"), Err(ParseError::MinRankNotSuccessor { .. })));
        assert!(matches!(parse_term("min(0)"), Err(ParseError::MinRankNotSuccessor { .. })));
        assert!(matches!(parse_term("pgl{}"), Err(ParseError::EmptyPgl { pos: 0 })));
        assert!(matches!(
            parse_term("wedge({one}, {one} | {})"),
            Err(ParseError::DuplicateVertical { pos: 13 })
        ));
        assert!(matches!(parse_term("wedge({} | {})"), Err(ParseError::EmptyVertical { .. })));
        assert!(matches!(parse_term("glue(idq)"), Err(ParseError::NestedSentinel { pos: 5, .. })));
        assert!(matches!(parse_term("glue(one"), Err(ParseError::Syntax { pos: 8, .. })));
        assert!(matches!(parse_term("foo"), Err(ParseError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_term("max(w^0)"), Err(ParseError::Ordinal(_))));
        assert!(parse_term("one one").is_err());
    }

    #[test]
    fn format_and_size() {
        assert_eq!(format_term(&Term::One), "one");
        assert_eq!(syntactic_cmp(&Term::Empty, &Term::One), std::cmp::Ordering::Less);
        assert_eq!(term_size(&t("glue(one, one)")), 3);
        assert_eq!(term_size(&t("wedge({max(w)} | {min(w+1)})")), 3);
        assert_eq!(t("omega(pgl{max(w)})").depth(), 3);
        let s = "wedge({max(w)}, {one, omega(one)} | {min(w+1)})";
        assert_eq!(t(&format_term(&t(s))), t(s));
    }
}
