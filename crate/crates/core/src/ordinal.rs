//! Ordinals below ω^ω in Cantor normal form.
//!
//! An [`Ordinal`] is stored as a strictly decreasing list of `(exponent,
//! coefficient)` pairs with exponents `>= 1`, followed by a finite part. Every
//! value has exactly one representation, so derived equality is ordinal
//! equality and [`Ord`] is the ordinal order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent 0 at {pos}: write the finite part as a plain integer")]
    ZeroExponent { pos: usize },
    #[error("ordinal {0} is not a successor")]
    NotSuccessor(Ordinal),
    #[error("supremum of an empty list")]
    EmptySup,
    #[error("ordinal arithmetic overflow")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
    finite: u64,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal::default()
    }

    pub fn finite(n: u64) -> Self {
        Ordinal {
            terms: Vec::new(),
            finite: n,
        }
    }

    /// ω^exp · coeff, with `exp = 0` meaning the integer `coeff`.
    pub fn omega_pow(exp: u32, coeff: u64) -> Self {
        if exp == 0 || coeff == 0 {
            return Ordinal::finite(if exp == 0 { coeff } else { 0 });
        }
        Ordinal {
            terms: vec![(exp, coeff)],
            finite: 0,
        }
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(1, 1)
    }

    /// Builds an ordinal from CNF pairs given in any order; pairs with equal
    /// exponents are merged and zero coefficients dropped.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u64)>, finite: u64) -> Self {
        let mut acc = Ordinal::finite(0);
        let mut pairs: Vec<(u32, u64)> = terms.into_iter().filter(|&(_, c)| c > 0).collect();
        pairs.sort_by_key(|p| std::cmp::Reverse(p.0));
        for (e, c) in pairs {
            acc = acc.add(&Ordinal::omega_pow(e, c));
        }
        acc.add(&Ordinal::finite(finite))
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn finite_part(&self) -> u64 {
        self.finite
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.finite == 0
    }

    pub fn is_finite(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_finite(&self) -> Option<u64> {
        self.is_finite().then_some(self.finite)
    }

    pub fn kind(&self) -> OrdinalKind {
        if self.is_zero() {
            OrdinalKind::Zero
        } else if self.finite > 0 {
            OrdinalKind::Successor
        } else {
            OrdinalKind::Limit
        }
    }

    pub fn is_successor(&self) -> bool {
        self.kind() == OrdinalKind::Successor
    }

    pub fn is_limit(&self) -> bool {
        self.kind() == OrdinalKind::Limit
    }

    pub fn succ(&self) -> Self {
        self.add_finite(1)
    }

    pub fn add_finite(&self, n: u64) -> Self {
        let mut out = self.clone();
        out.finite = out.finite.checked_add(n).expect("ordinal finite part overflow");
        out
    }

    pub fn pred(&self) -> Result<Self, OrdinalError> {
        if !self.is_successor() {
            return Err(OrdinalError::NotSuccessor(self.clone()));
        }
        let mut out = self.clone();
        out.finite -= 1;
        Ok(out)
    }

    /// Left-absorbing ordinal sum `self + rhs`.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(&(lead_exp, lead_coeff)) = rhs.terms.first() else {
            return self.add_finite(rhs.finite);
        };
        // Every term of `self` below ω^lead_exp is absorbed.
        let mut terms: Vec<(u32, u64)> = self
            .terms
            .iter()
            .copied()
            .take_while(|&(e, _)| e >= lead_exp)
            .collect();
        match terms.last_mut() {
            Some((e, c)) if *e == lead_exp => {
                *c = c.checked_add(lead_coeff).expect("ordinal coefficient overflow");
            }
            _ => terms.push((lead_exp, lead_coeff)),
        }
        terms.extend_from_slice(&rhs.terms[1..]);
        Ordinal {
            terms,
            finite: rhs.finite,
        }
    }

    /// The decomposition `self = λ + n` with λ limit or zero.
    pub fn split(&self) -> (Ordinal, u64) {
        (
            Ordinal {
                terms: self.terms.clone(),
                finite: 0,
            },
            self.finite,
        )
    }

    /// `λ + 2n` where `self = λ + n`.
    pub fn double(&self) -> Ordinal {
        let (limit, n) = self.split();
        limit.add_finite(n.checked_mul(2).expect("ordinal finite part overflow"))
    }

    pub fn sup<'a>(items: impl IntoIterator<Item = &'a Ordinal>) -> Result<Ordinal, OrdinalError> {
        items.into_iter().max().cloned().ok_or(OrdinalError::EmptySup)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            let ord = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        match self.terms.len().cmp(&other.terms.len()) {
            Ordering::Equal => self.finite.cmp(&other.finite),
            ord => ord,
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(e, c) in &self.terms {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            f.write_str("w")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
            if c > 1 {
                write!(f, "*{c}")?;
            }
        }
        if self.finite > 0 || first {
            if !first {
                f.write_str("+")?;
            }
            write!(f, "{}", self.finite)?;
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = OrdinalParser::new(s, 0);
        let o = p.parse()?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(o)
    }
}

pub fn parse_ordinal(text: &str) -> Result<Ordinal, OrdinalError> {
    text.parse()
}

pub fn format_ordinal(a: &Ordinal) -> String {
    a.to_string()
}

pub fn cmp_ordinal(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

/// Recursive-descent reader for `w^E*C + ... + N`. Also used by the term
/// parser, which hands over its cursor.
pub(crate) struct OrdinalParser<'a> {
    bytes: &'a [u8],
    pub(crate) pos: usize,
}

impl<'a> OrdinalParser<'a> {
    pub(crate) fn new(src: &'a str, pos: usize) -> Self {
        OrdinalParser {
            bytes: src.as_bytes(),
            pos,
        }
    }

    fn error(&self, msg: &str) -> OrdinalError {
        OrdinalError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| OrdinalError::Syntax {
                pos: start,
                msg: "integer out of range".into(),
            })
    }

    fn atom(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let mut exp = 1u64;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let at = self.pos;
                    exp = self.int()?;
                    if exp == 0 {
                        return Err(OrdinalError::ZeroExponent { pos: at });
                    }
                }
                let mut coeff = 1u64;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    coeff = self.int()?;
                }
                let exp = u32::try_from(exp).map_err(|_| self.error("exponent out of range"))?;
                Ok(Ordinal::omega_pow(exp, coeff))
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.int()?)),
            _ => Err(self.error("expected 'w' or integer")),
        }
    }

    pub(crate) fn parse(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            acc = acc.add(&self.atom()?);
        }
        Ok(acc)
    }
}
