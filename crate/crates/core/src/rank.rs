//! Cantor–Bendixson invariants of terms.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::term::Term;

/// CB-degree: a natural number or ω. `Fin(n) < Omega` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Degree {
    Fin(u64),
    Omega,
}

impl Degree {
    pub fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Fin(a), Degree::Fin(b)) => Degree::Fin(a.saturating_add(b)),
            _ => Degree::Omega,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Degree::Fin(0)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Fin(n) => write!(f, "{n}"),
            Degree::Omega => f.write_str("w"),
        }
    }
}

/// `tp(f)`; the derived order is the lexicographic one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CbType {
    pub rank: Ordinal,
    pub degree: Degree,
}

impl CbType {
    fn new(rank: Ordinal, degree: Degree) -> Self {
        CbType { rank, degree }
    }
}

impl fmt::Display for CbType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rank, self.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("rank undefined for non-scattered function {0}")]
    NotScattered(Term),
    #[error("term is not in normal form: {0}")]
    NotNormalized(Term),
}

/// Type of the gluing of `parts`: sup of ranks, degrees of the top pieces added.
fn glue_type<'a>(parts: impl IntoIterator<Item = &'a Term>) -> Result<CbType, RankError> {
    let types = parts.into_iter().map(cb_type).collect::<Result<Vec<_>, _>>()?;
    let Some(rank) = types.iter().map(|t| &t.rank).max().cloned() else {
        return Ok(CbType::new(Ordinal::zero(), Degree::Fin(0)));
    };
    if !rank.is_successor() {
        return Ok(CbType::new(rank, Degree::Fin(0)));
    }
    let degree = types
        .iter()
        .filter(|t| t.rank == rank)
        .fold(Degree::Fin(0), |d, t| d.add(t.degree));
    Ok(CbType::new(rank, degree))
}

pub fn cb_type(t: &Term) -> Result<CbType, RankError> {
    Ok(match t {
        Term::IdQ | Term::IdBaire => return Err(RankError::NotScattered(t.clone())),
        Term::Empty => CbType::new(Ordinal::zero(), Degree::Fin(0)),
        Term::One => CbType::new(Ordinal::finite(1), Degree::Fin(1)),
        Term::Glue(ts) => glue_type(ts)?,
        Term::Omega(body) => {
            let inner = cb_type(body)?;
            let degree = if inner.degree.is_zero() { inner.degree } else { Degree::Omega };
            CbType::new(inner.rank, degree)
        }
        Term::PglSet(ms) => CbType::new(glue_type(ms)?.rank.succ(), Degree::Fin(1)),
        Term::Wedge { verticals, diagonal } => {
            let mut vert = Ordinal::zero();
            for v in verticals {
                vert = vert.max(glue_type(v)?.rank.succ());
            }
            let diag = glue_type(diagonal)?;
            let rank = vert.clone().max(diag.rank.clone());
            let mut degree = Degree::Fin(u64::from(vert == rank));
            if diag.rank == rank && !diag.degree.is_zero() {
                degree = degree.add(Degree::Omega);
            }
            CbType::new(rank, degree)
        }
        Term::MinFn(a) => CbType::new(a.clone(), Degree::Fin(1)),
        Term::MaxFn(a) => {
            let degree = if a.is_successor() { Degree::Omega } else { Degree::Fin(0) };
            CbType::new(a.clone(), degree)
        }
    })
}

pub fn rank(t: &Term) -> Result<Ordinal, RankError> {
    cb_type(t).map(|tp| tp.rank)
}

pub fn is_simple(t: &Term) -> Result<bool, RankError> {
    Ok(cb_type(t)?.degree == Degree::Fin(1))
}

/// Shape check for the output of normalization; not a full fixpoint test.
pub fn looks_normalized(t: &Term) -> bool {
    match t {
        Term::MinFn(a) => a.is_successor() && a.pred().is_ok_and(|p| p.is_limit()),
        Term::MaxFn(a) => a.is_limit(),
        Term::Glue(ts) => {
            ts.len() >= 2
                && ts.iter().all(|s| {
                    !matches!(s, Term::Glue(_) | Term::Empty) && !s.is_sentinel() && looks_normalized(s)
                })
        }
        Term::Omega(b) => {
            !matches!(**b, Term::Glue(_) | Term::Empty | Term::Omega(_)) && looks_normalized(b)
        }
        Term::PglSet(ms) => {
            !ms.is_empty()
                && ms
                    .iter()
                    .all(|m| !matches!(m, Term::Glue(_) | Term::Empty | Term::Wedge { .. }) && looks_normalized(m))
        }
        Term::Wedge { verticals, diagonal } => {
            !verticals.is_empty()
                && verticals
                    .iter()
                    .flatten()
                    .chain(diagonal)
                    .all(|m| !matches!(m, Term::Glue(_)) && looks_normalized(m))
        }
        _ => true,
    }
}

/// Centeredness of a normalized scattered term, read off its head constructor.
pub fn is_centered(t: &Term) -> Result<bool, RankError> {
    if t.is_sentinel() {
        return Err(RankError::NotScattered(t.clone()));
    }
    if !looks_normalized(t) {
        return Err(RankError::NotNormalized(t.clone()));
    }
    Ok(matches!(t, Term::One | Term::MinFn(_) | Term::PglSet(_)))
}

pub fn is_compact_domain(t: &Term) -> Result<bool, RankError> {
    Ok(match t {
        Term::IdQ | Term::IdBaire => return Err(RankError::NotScattered(t.clone())),
        Term::Empty | Term::One | Term::MinFn(_) => true,
        Term::Glue(ts) => all_compact(ts)?,
        Term::PglSet(ms) => all_compact(ms)?,
        Term::Omega(_) | Term::Wedge { .. } => false,
        Term::MaxFn(a) => a.is_zero(),
    })
}

fn all_compact<'a>(ts: impl IntoIterator<Item = &'a Term>) -> Result<bool, RankError> {
    for t in ts {
        if !is_compact_domain(t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Some(α)` when the normalized `t` is the normal form of `Λ_α`.
pub fn max_level(t: &Term) -> Option<Ordinal> {
    match t {
        Term::Empty => Some(Ordinal::zero()),
        Term::MaxFn(a) if a.is_limit() => Some(a.clone()),
        Term::Omega(b) => match &**b {
            Term::One => Some(Ordinal::finite(1)),
            Term::PglSet(ms) if ms.len() == 1 => {
                let m = ms.iter().next()?;
                let beta = max_level(m)?;
                (!beta.is_zero()).then(|| beta.succ())
            }
            _ => None,
        },
        _ => None,
    }
}

/// `Some(α)` when the normalized `t` is the normal form of `V_α`.
pub fn min_level(t: &Term) -> Option<Ordinal> {
    match t {
        Term::One => Some(Ordinal::finite(1)),
        Term::MinFn(a) => Some(a.clone()),
        Term::PglSet(ms) if ms.len() == 1 => min_level(ms.iter().next()?).map(|b| b.succ()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn tp(s: &str) -> String {
        cb_type(&t(s)).unwrap().to_string()
    }

    #[test]
    fn types() {
        assert_eq!(tp("min(w+1)"), "(w+1, 1)");
        assert_eq!(tp("empty"), "(0, 0)");
        assert_eq!(tp("glue(one, one, one)"), "(1, 3)");
        assert_eq!(tp("pgl{max(w)}"), "(w+1, 1)");
        assert_eq!(tp("omega(pgl{max(w)})"), "(w+1, w)");
        assert_eq!(tp("wedge({max(w)} | {min(w+1)})"), "(w+1, w)");
        assert_eq!(tp("max(w+1)"), "(w+1, w)");
        assert_eq!(tp("max(w)"), "(w, 0)");
        assert_eq!(tp("omega(max(w))"), "(w, 0)");
        assert_eq!(tp("glue(min(w+1), max(w))"), "(w+1, 1)");
        assert_eq!(tp("wedge({one} | {})"), "(2, 1)");
        assert_eq!(tp("wedge({one} | {omega(pgl{one})})"), "(2, w)");
        assert_eq!(tp("wedge({one} | {max(w)})"), "(w, 0)");
        assert!(cb_type(&Term::IdQ).is_err());
    }

    #[test]
    fn degree_order_and_arith() {
        assert!(Degree::Fin(1_000_000) < Degree::Omega);
        assert_eq!(Degree::Fin(2).add(Degree::Fin(3)), Degree::Fin(5));
        assert_eq!(Degree::Fin(2).add(Degree::Omega), Degree::Omega);
    }

    #[test]
    fn predicates() {
        assert!(is_simple(&t("pgl{one}")).unwrap());
        assert!(is_simple(&t("glue(min(w+1), max(w))")).unwrap());
        assert!(!is_simple(&t("omega(one)")).unwrap());

        assert!(is_centered(&t("pgl{max(w)}")).unwrap());
        assert!(!is_centered(&t("omega(min(w+1))")).unwrap());
        assert!(is_centered(&t("one")).unwrap());
        assert!(!is_centered(&t("max(w)")).unwrap());
        assert!(!is_centered(&t("empty")).unwrap());
        assert!(matches!(is_centered(&t("min(3)")), Err(RankError::NotNormalized(_))));
        assert!(matches!(is_centered(&t("glue(one)")), Err(RankError::NotNormalized(_))));

        assert!(is_compact_domain(&t("min(w^2+1)")).unwrap());
        assert!(!is_compact_domain(&t("omega(one)")).unwrap());
        assert!(is_compact_domain(&t("glue(min(2), pgl{one})")).unwrap());
        assert!(!is_compact_domain(&t("max(w)")).unwrap());
        assert!(is_compact_domain(&t("max(0)")).unwrap());
    }

    #[test]
    fn recognizers() {
        assert_eq!(max_level(&t("omega(pgl{omega(one)})")), Some(Ordinal::finite(2)));
        assert_eq!(max_level(&t("omega(pgl{max(w)})")), Some(t_ord("w+1")));
        assert_eq!(max_level(&t("omega(pgl{one})")), None);
        assert_eq!(min_level(&t("pgl{pgl{min(w+1)}}")), Some(t_ord("w+3")));
        assert_eq!(min_level(&t("pgl{one}")), Some(Ordinal::finite(2)));
        assert_eq!(min_level(&t("pgl{one, omega(one)}")), None);
    }

    fn t_ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }
}
