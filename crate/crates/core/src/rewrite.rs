//! Normalization by oriented equivalences.
//!
//! `R-minmax` unfolds successor-indexed minimum and maximum functions first;
//! the remaining rules then run bottom-up to a fixpoint under a step cap.
//! Several rules are guarded by domination side conditions that are
//! discharged by the comparison engine.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::compare::wedge_pieces;
use crate::engine::{default_engine, Ctx, Engine};
use crate::ordinal::Ordinal;
use crate::term::Term;

pub const RULES: [&str; 7] = [
    "R-flat",
    "R-minmax",
    "R-omega",
    "R-pgl-members",
    "R-pgl-wedge",
    "R-pgl-absorb",
    "R-wedge-reduce",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rewrite step cap {cap} exceeded while normalizing {term}")]
    CapExceeded { term: Term, cap: usize },
    #[error("normalization nested too deeply at {0}")]
    TooDeep(Term),
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("min({0}) needs a successor rank")]
    BadMinRank(Ordinal),
}

struct Budget {
    used: usize,
    cap: usize,
}

impl Engine {
    pub fn normalize(&self, t: &Term) -> Result<Term, RewriteError> {
        let mut ctx = Ctx::default();
        self.norm(t, &mut ctx)
    }

    /// Normalization with its own step budget inside an ongoing search.
    pub(crate) fn norm(&self, t: &Term, ctx: &mut Ctx) -> Result<Term, RewriteError> {
        if let Some(n) = self.norm_memo.get(t) {
            return Ok(n.clone());
        }
        if ctx.depth >= 3 * self.config.depth {
            ctx.taint += 1;
            return Err(RewriteError::TooDeep(t.clone()));
        }
        let mut budget = Budget {
            used: 0,
            cap: self.config.cap_factor * t.size(),
        };
        ctx.depth += 1;
        let r = self.norm_in(t, ctx, &mut budget);
        ctx.depth -= 1;
        r
    }

    fn norm_in(&self, t: &Term, ctx: &mut Ctx, budget: &mut Budget) -> Result<Term, RewriteError> {
        if let Some(n) = self.norm_memo.get(t) {
            return Ok(n.clone());
        }
        let taint = ctx.taint;
        let nf = match t {
            Term::Empty | Term::One | Term::IdQ | Term::IdBaire => t.clone(),
            Term::MinFn(_) | Term::MaxFn(_) => {
                let mut cur = t.clone();
                while let Some(next) = minmax_step(&cur)? {
                    cur = next;
                }
                if matches!(cur, Term::MinFn(_) | Term::MaxFn(_)) {
                    cur
                } else {
                    self.norm_in(&cur, ctx, budget)?
                }
            }
            _ => {
                let node = self.norm_children(t, ctx, budget)?;
                self.fix_node(node, ctx, budget)?
            }
        };
        if ctx.taint == taint {
            self.norm_memo.insert(nf.clone(), nf.clone());
            self.norm_memo.insert(t.clone(), nf.clone());
        }
        Ok(nf)
    }

    fn norm_children(&self, t: &Term, ctx: &mut Ctx, budget: &mut Budget) -> Result<Term, RewriteError> {
        let set = |ms: &BTreeSet<Term>, ctx: &mut Ctx, budget: &mut Budget| {
            ms.iter()
                .map(|m| self.norm_in(m, ctx, budget))
                .collect::<Result<BTreeSet<_>, _>>()
        };
        Ok(match t {
            Term::Glue(ts) => Term::glue(
                ts.iter()
                    .map(|s| self.norm_in(s, ctx, budget))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Term::Omega(b) => Term::omega(self.norm_in(b, ctx, budget)?),
            Term::PglSet(ms) => Term::PglSet(set(ms, ctx, budget)?),
            Term::Wedge { verticals, diagonal } => {
                let mut vs = Vec::with_capacity(verticals.len());
                for v in verticals {
                    vs.push(set(v, ctx, budget)?);
                }
                Term::wedge(vs, set(diagonal, ctx, budget)?)
            }
            Term::MinFn(_) | Term::MaxFn(_) => self.norm_in(t, ctx, budget)?,
            _ => t.clone(),
        })
    }

    /// Applies node-level rules at the root until none fires.
    fn fix_node(&self, mut node: Term, ctx: &mut Ctx, budget: &mut Budget) -> Result<Term, RewriteError> {
        loop {
            let Some(next) = self.node_step(&node, ctx) else {
                return Ok(node);
            };
            budget.used += 1;
            if budget.used > budget.cap {
                return Err(RewriteError::CapExceeded { term: node, cap: budget.cap });
            }
            node = self.norm_children(&next, ctx, budget)?;
        }
    }

    fn node_step(&self, t: &Term, ctx: &mut Ctx) -> Option<Term> {
        RULES
            .iter()
            .filter(|r| **r != "R-minmax")
            .find_map(|r| self.rule_at(r, t, ctx))
    }

    /// One application of `rule` at the root of `t`.
    fn rule_at(&self, rule: &str, t: &Term, ctx: &mut Ctx) -> Option<Term> {
        match rule {
            "R-flat" => flat_step(t),
            "R-minmax" => minmax_step(t).ok().flatten(),
            "R-omega" => self.omega_step(t, ctx),
            "R-pgl-members" => self.pgl_members_step(t, ctx),
            "R-pgl-wedge" => pgl_wedge_step(t),
            "R-pgl-absorb" => self.pgl_absorb_step(t, ctx),
            "R-wedge-reduce" => self.wedge_reduce_step(t, ctx),
            _ => None,
        }
    }

    /// One outermost-leftmost application of the named rule.
    pub fn apply_rule(&self, t: &Term, rule: &str) -> Result<Option<Term>, RewriteError> {
        if !RULES.contains(&rule) {
            return Err(RewriteError::UnknownRule(rule.to_string()));
        }
        if let Term::MinFn(a) = t {
            if !a.is_successor() {
                return Err(RewriteError::BadMinRank(a.clone()));
            }
        }
        let mut ctx = Ctx::default();
        Ok(self.apply_at(t, rule, &mut ctx))
    }

    fn apply_at(&self, t: &Term, rule: &str, ctx: &mut Ctx) -> Option<Term> {
        if let Some(r) = self.rule_at(rule, t, ctx) {
            return Some(r);
        }
        match t {
            Term::Glue(ts) => (0..ts.len()).find_map(|i| {
                let r = self.apply_at(&ts[i], rule, ctx)?;
                let mut v = ts.clone();
                v[i] = r;
                Some(Term::glue(v))
            }),
            Term::Omega(b) => self.apply_at(b, rule, ctx).map(Term::omega),
            Term::PglSet(ms) => self.apply_in_set(ms, rule, ctx).map(Term::PglSet),
            Term::Wedge { verticals, diagonal } => {
                for (i, v) in verticals.iter().enumerate() {
                    if let Some(nv) = self.apply_in_set(v, rule, ctx) {
                        let mut vs = verticals.clone();
                        vs[i] = nv;
                        return Some(Term::wedge(vs, diagonal.iter().cloned()));
                    }
                }
                let nd = self.apply_in_set(diagonal, rule, ctx)?;
                Some(Term::wedge(verticals.clone(), nd))
            }
            _ => None,
        }
    }

    fn apply_in_set(&self, ms: &BTreeSet<Term>, rule: &str, ctx: &mut Ctx) -> Option<BTreeSet<Term>> {
        ms.iter().find_map(|m| {
            let r = self.apply_at(m, rule, ctx)?;
            let mut out = ms.clone();
            out.remove(m);
            out.insert(r);
            Some(out)
        })
    }

    fn le(&self, a: &Term, b: &Term, ctx: &mut Ctx) -> bool {
        self.le_holds(a, b, ctx)
    }

    /// Index of an element to drop from `items`: one that reduces to another,
    /// keeping the syntactically least of mutually reducible pairs.
    fn dominated(&self, items: &[&Term], ctx: &mut Ctx) -> Option<usize> {
        for (i, a) in items.iter().enumerate() {
            for (j, b) in items.iter().enumerate() {
                if i == j || a == b {
                    continue;
                }
                if self.le(a, b, ctx) && (a > b || !self.le(b, a, ctx)) {
                    return Some(i);
                }
            }
        }
        None
    }

    fn omega_step(&self, t: &Term, ctx: &mut Ctx) -> Option<Term> {
        match t {
            Term::Omega(b) => match &**b {
                Term::Empty => Some(Term::Empty),
                Term::Omega(_) => Some((**b).clone()),
                Term::Glue(ms) => Some(Term::glue(ms.iter().cloned().map(Term::omega))),
                _ => None,
            },
            Term::Glue(ts) => {
                let bodies: Vec<&Term> = ts
                    .iter()
                    .filter_map(|s| match s {
                        Term::Omega(h) => Some(&**h),
                        _ => None,
                    })
                    .collect();
                if bodies.is_empty() {
                    return None;
                }
                // duplicates and bare copies of an ω-body
                for (i, s) in ts.iter().enumerate() {
                    let dup = matches!(s, Term::Omega(_)) && ts[..i].contains(s);
                    if dup || bodies.contains(&s) {
                        return Some(remove_at(ts, i));
                    }
                }
                for (i, s) in ts.iter().enumerate() {
                    let absorbed = match s {
                        Term::Omega(h) => bodies.iter().any(|b| {
                            *b != &**h && self.le(h, b, ctx) && (&**h > *b || !self.le(b, h, ctx))
                        }),
                        _ => bodies.iter().any(|b| self.le(s, b, ctx)),
                    };
                    if absorbed {
                        return Some(remove_at(ts, i));
                    }
                }
                None
            }
            _ => None,
        }
    }

    fn pgl_members_step(&self, t: &Term, ctx: &mut Ctx) -> Option<Term> {
        let Term::PglSet(ms) = t else { return None };
        if let Some(flat) = flatten_set(ms) {
            return Some(if flat.is_empty() { Term::One } else { Term::PglSet(flat) });
        }
        let items: Vec<&Term> = ms.iter().collect();
        let i = self.dominated(&items, ctx)?;
        let mut out = ms.clone();
        out.remove(items[i]);
        Some(Term::PglSet(out))
    }

    fn pgl_absorb_step(&self, t: &Term, ctx: &mut Ctx) -> Option<Term> {
        let Term::Glue(ts) = t else { return None };
        let k = ts.len();
        for p in ts {
            let Term::PglSet(fs) = p else { continue };
            let copies = Term::glue((0..k).flat_map(|_| fs.iter().cloned()));
            for (i, s) in ts.iter().enumerate() {
                if s != p && self.le(s, &copies, ctx) {
                    return Some(remove_at(ts, i));
                }
            }
        }
        None
    }

    fn wedge_reduce_step(&self, t: &Term, ctx: &mut Ctx) -> Option<Term> {
        let Term::Wedge { verticals, diagonal } = t else { return None };
        // structural cleanup
        let mut changed = false;
        let mut vs: Vec<BTreeSet<Term>> = Vec::new();
        for v in verticals {
            let nv = match flatten_set(v) {
                Some(f) if f.is_empty() => BTreeSet::from([Term::Empty]),
                Some(f) => f,
                None => v.clone(),
            };
            changed |= nv != *v;
            if !vs.contains(&nv) {
                vs.push(nv);
            } else {
                changed = true;
            }
        }
        let diag = flatten_set(diagonal);
        if changed || diag.is_some() {
            return Some(Term::wedge(vs, diag.unwrap_or_else(|| diagonal.clone())));
        }

        if let Some(r) = self.wedge_verticals_step(t, ctx) {
            return Some(r);
        }

        // dominated verticals
        let sums: Vec<Term> = verticals.iter().map(|v| Term::glue(v.iter().cloned())).collect();
        if let Some(i) = self.dominated(&sums.iter().collect::<Vec<_>>(), ctx) {
            let mut vs = verticals.clone();
            vs.remove(i);
            return Some(Term::wedge(vs, diagonal.iter().cloned()));
        }

        // diagonal members below a vertical or another diagonal member
        let ds: Vec<&Term> = diagonal.iter().collect();
        for (i, h) in ds.iter().enumerate() {
            let below_vertical = sums.iter().any(|s| self.le(h, s, ctx));
            let below_other = ds.iter().enumerate().any(|(j, h2)| {
                j != i && self.le(h, h2, ctx) && (h > h2 || !self.le(h2, h, ctx))
            });
            if below_vertical || below_other {
                let mut nd = diagonal.clone();
                nd.remove(*h);
                return Some(Term::wedge(verticals.clone(), nd));
            }
        }

        // verticals whose pointed gluing is already below the diagonal
        if !diagonal.is_empty() {
            let d = Term::glue(diagonal.iter().cloned());
            let keep: Vec<BTreeSet<Term>> = verticals
                .iter()
                .filter(|v| !self.le(&Term::PglSet((*v).clone()), &d, ctx))
                .cloned()
                .collect();
            if keep.is_empty() {
                return Some(Term::glue(diagonal.iter().cloned().map(Term::omega)));
            }
            if keep.len() < verticals.len() {
                return Some(Term::wedge(keep, diagonal.iter().cloned()));
            }
        }

        if verticals.len() == 1 && diagonal.is_empty() {
            return Some(Term::PglSet(verticals[0].clone()));
        }
        None
    }

    /// Domination reduction inside each vertical set.
    fn wedge_verticals_step(&self, t: &Term, ctx: &mut Ctx) -> Option<Term> {
        let Term::Wedge { verticals, diagonal } = t else { return None };
        for (i, v) in verticals.iter().enumerate() {
            let items: Vec<&Term> = v.iter().collect();
            if let Some(j) = self.dominated(&items, ctx) {
                let mut nv = v.clone();
                nv.remove(items[j]);
                let mut vs = verticals.clone();
                vs[i] = nv;
                vs.dedup();
                return Some(Term::wedge(dedup_sets(vs), diagonal.iter().cloned()));
            }
        }
        None
    }
}

fn dedup_sets(mut vs: Vec<BTreeSet<Term>>) -> Vec<BTreeSet<Term>> {
    vs.sort();
    vs.dedup();
    vs
}

fn remove_at(ts: &[Term], i: usize) -> Term {
    let mut v = ts.to_vec();
    v.remove(i);
    Term::glue(v)
}

/// Splices glued members into the set and drops empty ones; `None` if already flat.
fn flatten_set(ms: &BTreeSet<Term>) -> Option<BTreeSet<Term>> {
    if !ms.iter().any(|m| matches!(m, Term::Glue(_) | Term::Empty)) {
        return None;
    }
    let mut out = BTreeSet::new();
    let mut stack: Vec<&Term> = ms.iter().collect();
    while let Some(m) = stack.pop() {
        match m {
            Term::Glue(ts) => stack.extend(ts),
            Term::Empty => {}
            other => {
                out.insert(other.clone());
            }
        }
    }
    Some(out)
}

fn flat_step(t: &Term) -> Option<Term> {
    let Term::Glue(ts) = t else { return None };
    if let Some(i) = ts.iter().position(|s| matches!(s, Term::Glue(_))) {
        let mut v = ts.clone();
        let Term::Glue(inner) = v.remove(i) else { unreachable!() };
        v.extend(inner);
        return Some(Term::glue(v));
    }
    if let Some(i) = ts.iter().position(|s| *s == Term::Empty) {
        return Some(remove_at(ts, i));
    }
    match ts.len() {
        0 => Some(Term::Empty),
        1 => Some(ts[0].clone()),
        _ => None,
    }
}

fn minmax_step(t: &Term) -> Result<Option<Term>, RewriteError> {
    Ok(match t {
        Term::MinFn(a) => {
            let p = a.pred().map_err(|_| RewriteError::BadMinRank(a.clone()))?;
            if p.is_zero() {
                Some(Term::One)
            } else if p.is_successor() {
                Some(Term::pgl([Term::MinFn(p)]))
            } else {
                None
            }
        }
        Term::MaxFn(a) => {
            if a.is_zero() {
                Some(Term::Empty)
            } else if *a == Ordinal::finite(1) {
                Some(Term::omega(Term::One))
            } else if a.is_successor() {
                Some(Term::omega(Term::pgl([Term::MaxFn(a.pred().expect("successor"))])))
            } else {
                None
            }
        }
        _ => None,
    })
}

fn pgl_wedge_step(t: &Term) -> Option<Term> {
    let Term::PglSet(ms) = t else { return None };
    let w = ms.iter().find(|m| matches!(m, Term::Wedge { .. }))?;
    let Term::Wedge { verticals, diagonal } = w else { unreachable!() };
    let mut out = ms.clone();
    out.remove(w);
    for p in wedge_pieces(verticals, diagonal) {
        match p {
            Term::Omega(body) => out.extend(match *body {
                Term::Glue(hs) => hs.into_iter().map(Term::omega).collect::<Vec<_>>(),
                h => vec![Term::omega(h)],
            }),
            other => {
                out.insert(other);
            }
        }
    }
    Some(Term::PglSet(out))
}

pub fn normalize(t: &Term) -> Result<Term, RewriteError> {
    default_engine().normalize(t)
}

pub fn apply_rule(t: &Term, rule: &str) -> Result<Option<Term>, RewriteError> {
    default_engine().apply_rule(t, rule)
}
