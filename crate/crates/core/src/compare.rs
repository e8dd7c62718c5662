//! Three-valued decision procedure for continuous reducibility.
//!
//! `Le` and `NotLe` are only returned with a derivation; anything the rule
//! table cannot settle is `Unknown` together with the sub-queries that
//! blocked it. Derivations of one polarity only expand premises of the same
//! polarity; side conditions of the other polarity are cited by text.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{default_engine, Ctx, Engine};
use crate::ordinal::Ordinal;
use crate::rank::{cb_type, is_centered, is_compact_domain, is_simple, max_level, min_level, CbType, Degree};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    #[serde(rename = "LE")]
    Le,
    #[serde(rename = "NOT_LE")]
    NotLe,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Le => "LE",
            Outcome::NotLe => "NOT_LE",
            Outcome::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: &'static str,
    pub lhs: Term,
    pub rhs: Term,
    pub premises: Vec<Arc<Step>>,
    /// Side conditions used but not expanded.
    pub cites: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockReason {
    Depth,
    Cycle,
    NoRule,
    NotScattered,
    Rewrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Blocker {
    pub lhs: Term,
    pub rhs: Term,
    pub reason: BlockReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub derivation: Option<Arc<Step>>,
    pub blockers: Vec<Blocker>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceLine {
    pub rule: &'static str,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cites: Vec<String>,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} <= {}", self.rule, self.lhs, self.rhs)?;
        for c in &self.cites {
            write!(f, " [{c}]")?;
        }
        Ok(())
    }
}

impl Verdict {
    fn proved(outcome: Outcome, step: Step) -> Verdict {
        Verdict {
            outcome,
            derivation: Some(Arc::new(step)),
            blockers: Vec::new(),
        }
    }

    fn blocked(blockers: Vec<Blocker>) -> Verdict {
        Verdict {
            outcome: Outcome::Unknown,
            derivation: None,
            blockers,
        }
    }

    pub fn is_le(&self) -> bool {
        self.outcome == Outcome::Le
    }

    pub fn is_not_le(&self) -> bool {
        self.outcome == Outcome::NotLe
    }

    /// Derivation flattened in pre-order, shared sub-derivations listed once.
    pub fn trace(&self) -> Vec<TraceLine> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        if let Some(step) = &self.derivation {
            flatten(step, &mut out, &mut seen);
        }
        out
    }

    /// Every rule identifier used in the derivation.
    pub fn rules(&self) -> Vec<&'static str> {
        self.trace().into_iter().map(|l| l.rule).collect()
    }
}

fn flatten(step: &Step, out: &mut Vec<TraceLine>, seen: &mut HashSet<(Term, Term, &'static str)>) {
    if !seen.insert((step.lhs.clone(), step.rhs.clone(), step.rule)) {
        return;
    }
    out.push(TraceLine {
        rule: step.rule,
        lhs: step.lhs.to_string(),
        rhs: step.rhs.to_string(),
        cites: step.cites.clone(),
    });
    for p in &step.premises {
        flatten(p, out, seen);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("{0} is not a non-empty compact-domain scattered term")]
    NotCompact(Term),
}

const MAX_BLOCKERS: usize = 8;

fn step(rule: &'static str, f: &Term, g: &Term, premises: Vec<Arc<Step>>) -> Step {
    Step {
        rule,
        lhs: f.clone(),
        rhs: g.clone(),
        premises,
        cites: Vec::new(),
    }
}

fn le(rule: &'static str, f: &Term, g: &Term, premises: Vec<Arc<Step>>) -> Verdict {
    Verdict::proved(Outcome::Le, step(rule, f, g, premises))
}

fn not_le(rule: &'static str, f: &Term, g: &Term, premises: Vec<Arc<Step>>, cites: Vec<String>) -> Verdict {
    let mut s = step(rule, f, g, premises);
    s.cites = cites;
    Verdict::proved(Outcome::NotLe, s)
}

/// Blockers of unresolved sub-queries, kept for the final `Unknown`.
#[derive(Default)]
struct Pending {
    blockers: Vec<Blocker>,
}

impl Pending {
    fn absorb(&mut self, v: &Verdict) {
        for b in &v.blockers {
            if self.blockers.len() >= MAX_BLOCKERS {
                return;
            }
            if !self.blockers.contains(b) {
                self.blockers.push(b.clone());
            }
        }
    }
}

/// One target of an L-glue style matching.
struct Slot {
    term: Term,
    /// `None` means unbounded.
    cap: Option<usize>,
}

/// The closed axiom table instantiated at one level `λ` (limit or 1).
struct Axioms {
    lambda: Term,
    v: Term,
    pgl_lambda: Term,
    v_plus_lambda: Term,
    wedge: Term,
    omega_pgl_lambda: Term,
}

impl Axioms {
    fn at(level: &Ordinal) -> Axioms {
        let lambda = if level.is_limit() { Term::MaxFn(level.clone()) } else { Term::omega(Term::One) };
        let v = if level.is_limit() { Term::MinFn(level.succ()) } else { Term::pgl([Term::One]) };
        let pgl_lambda = Term::pgl([lambda.clone()]);
        Axioms {
            v_plus_lambda: Term::glue([v.clone(), lambda.clone()]),
            wedge: Term::wedge([[lambda.clone()].into()], [v.clone()]),
            omega_pgl_lambda: Term::omega(pgl_lambda.clone()),
            lambda,
            v,
            pgl_lambda,
        }
    }

    fn lookup(&self, f: &Term, g: &Term) -> Option<(&'static str, Outcome)> {
        let table: [(&'static str, Outcome, &Term, &Term); 5] = [
            ("A1", Outcome::Le, &self.lambda, &self.v),
            ("A3", Outcome::NotLe, &self.omega_pgl_lambda, &self.wedge),
            ("A4", Outcome::NotLe, &self.pgl_lambda, &self.v),
            ("A5a", Outcome::NotLe, &self.v_plus_lambda, &self.v),
            ("A5b", Outcome::NotLe, &self.pgl_lambda, &self.v_plus_lambda),
        ];
        table
            .into_iter()
            .find(|(_, _, l, r)| *l == f && *r == g)
            .map(|(name, o, _, _)| (name, o))
    }
}

/// Levels at which axioms are tried for a pair of ranks.
fn axiom_levels(a: &Ordinal, b: &Ordinal) -> Vec<Ordinal> {
    let mut out = vec![Ordinal::finite(1)];
    for r in [a, b] {
        let (lambda, _) = r.split();
        if !lambda.is_zero() && !out.contains(&lambda) {
            out.push(lambda);
        }
    }
    out
}

/// The pieces `PglSet(Fᵢ)` and `Omega(⊕D)` bounding a wedge, unnormalized.
pub(crate) fn wedge_pieces(verticals: &[std::collections::BTreeSet<Term>], diagonal: &std::collections::BTreeSet<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = verticals.iter().map(|v| Term::PglSet(v.clone())).collect();
    if !diagonal.is_empty() {
        out.push(Term::omega(Term::glue(diagonal.iter().cloned())));
    }
    out
}

/// Replaces every wedge summand by its upper-bound pieces; `None` if there is none.
fn wedge_upper(t: &Term) -> Option<Term> {
    let mut changed = false;
    let mut parts = Vec::new();
    for s in t.summands() {
        if let Term::Wedge { verticals, diagonal } = s {
            changed = true;
            parts.extend(wedge_pieces(verticals, diagonal));
        } else {
            parts.push(s.clone());
        }
    }
    changed.then(|| Term::glue(parts))
}

enum Split {
    Below(Option<Arc<Step>>),
    NoneBelow(Vec<Arc<Step>>),
}

fn omega_of_centered(t: &Term) -> bool {
    matches!(t, Term::Omega(h) if is_centered(h).unwrap_or(false))
}

fn strip_omega(t: &Term) -> &Term {
    match t {
        Term::Omega(b) => b,
        other => other,
    }
}

impl Engine {
    pub fn compare(&self, f: &Term, g: &Term) -> Verdict {
        let mut ctx = Ctx::default();
        self.query(f, g, &mut ctx)
    }

    pub fn le_compact(&self, f: &Term, g: &Term) -> Result<bool, CompareError> {
        for t in [f, g] {
            let ok = is_compact_domain(t).unwrap_or(false) && !cb_type(t).map(|tp| tp.rank.is_zero()).unwrap_or(true);
            if !ok {
                return Err(CompareError::NotCompact(t.clone()));
            }
        }
        Ok(cb_type(f).ok() <= cb_type(g).ok())
    }

    pub fn equivalent(&self, f: &Term, g: &Term) -> Equivalence {
        let a = self.compare(f, g).outcome;
        if a == Outcome::NotLe {
            return Equivalence::No;
        }
        match (a, self.compare(g, f).outcome) {
            (_, Outcome::NotLe) => Equivalence::No,
            (Outcome::Le, Outcome::Le) => Equivalence::Yes,
            _ => Equivalence::Unknown,
        }
    }

    /// Domination of `fs` by `gs`: every member of `fs` reduces to some member of `gs`.
    pub fn dominates(&self, fs: &[Term], gs: &[Term]) -> Outcome {
        let mut result = Outcome::Le;
        for f in fs {
            let outs: Vec<Outcome> = gs.iter().map(|g| self.compare(f, g).outcome).collect();
            if outs.contains(&Outcome::Le) {
                continue;
            }
            if outs.iter().all(|o| *o == Outcome::NotLe) {
                return Outcome::NotLe;
            }
            result = Outcome::Unknown;
        }
        result
    }

    /// Comparison of raw terms inside an ongoing search.
    pub(crate) fn query(&self, f: &Term, g: &Term, ctx: &mut Ctx) -> Verdict {
        let nf = match self.norm(f, ctx) {
            Ok(t) => t,
            Err(_) => return self.rewrite_blocked(f, g, ctx),
        };
        let ng = match self.norm(g, ctx) {
            Ok(t) => t,
            Err(_) => return self.rewrite_blocked(f, g, ctx),
        };
        self.cmp_nf(&nf, &ng, ctx)
    }

    fn rewrite_blocked(&self, f: &Term, g: &Term, ctx: &mut Ctx) -> Verdict {
        ctx.taint += 1;
        Verdict::blocked(vec![Blocker {
            lhs: f.clone(),
            rhs: g.clone(),
            reason: BlockReason::Rewrite,
        }])
    }

    pub(crate) fn le_holds(&self, f: &Term, g: &Term, ctx: &mut Ctx) -> bool {
        self.query(f, g, ctx).is_le()
    }

    /// Normalizes a derived term; failures surface as `None`.
    fn derived(&self, t: Term, ctx: &mut Ctx) -> Option<Term> {
        match self.norm(&t, ctx) {
            Ok(n) => Some(n),
            Err(_) => {
                ctx.taint += 1;
                None
            }
        }
    }

    /// Comparison of normalized terms: memo, cycle and depth handling.
    pub(crate) fn cmp_nf(&self, f: &Term, g: &Term, ctx: &mut Ctx) -> Verdict {
        let key = (f.clone(), g.clone());
        if let Some(v) = self.cmp_memo.get(&key) {
            return v.clone();
        }
        let reason = if ctx.in_progress.contains(&key) {
            Some(BlockReason::Cycle)
        } else if ctx.depth >= self.config.depth {
            Some(BlockReason::Depth)
        } else {
            None
        };
        if let Some(reason) = reason {
            ctx.taint += 1;
            return Verdict::blocked(vec![Blocker {
                lhs: f.clone(),
                rhs: g.clone(),
                reason,
            }]);
        }
        let taint = ctx.taint;
        ctx.in_progress.insert(key.clone());
        ctx.depth += 1;
        let v = self.decide(f, g, ctx);
        ctx.depth -= 1;
        ctx.in_progress.remove(&key);
        if v.outcome != Outcome::Unknown || ctx.taint == taint {
            self.cmp_memo.insert(key, v.clone());
        }
        v
    }

    fn decide(&self, f: &Term, g: &Term, ctx: &mut Ctx) -> Verdict {
        if let Some(v) = sentinel_rules(f, g) {
            return v;
        }
        let (tf, tg) = match (cb_type(f), cb_type(g)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                return Verdict::blocked(vec![Blocker {
                    lhs: f.clone(),
                    rhs: g.clone(),
                    reason: BlockReason::NotScattered,
                }])
            }
        };
        if tf > tg {
            return not_le("N-lex", f, g, vec![], vec![format!("tp {tf} >lex {tg}")]);
        }
        if f == g {
            return le("L-refl", f, g, vec![]);
        }
        for level in axiom_levels(&tf.rank, &tg.rank) {
            if let Some((name, outcome)) = Axioms::at(&level).lookup(f, g) {
                return Verdict::proved(outcome, step(name, f, g, vec![]));
            }
        }
        let mut pending = Pending::default();
        if let Some(v) = self.le_rules(f, g, &tf, &tg, ctx, &mut pending) {
            return v;
        }
        if let Some(v) = self.not_le_rules(f, g, &tf, &tg, ctx, &mut pending) {
            return v;
        }
        let mut blockers = vec![Blocker {
            lhs: f.clone(),
            rhs: g.clone(),
            reason: BlockReason::NoRule,
        }];
        blockers.extend(pending.blockers);
        Verdict::blocked(blockers)
    }

    fn le_rules(&self, f: &Term, g: &Term, tf: &CbType, tg: &CbType, ctx: &mut Ctx, pending: &mut Pending) -> Option<Verdict> {
        if *f == Term::Empty {
            return Some(le("L-glue", f, g, vec![]));
        }
        let (rf, rg) = (&tf.rank, &tg.rank);
        let gst = (rg.is_limit() && rf <= rg)
            || rf.double() < *rg
            || (rf.is_finite() && rg.is_finite() && rf.double() <= *rg);
        if gst {
            return Some(le("L-gst", f, g, vec![]));
        }
        if max_level(g).is_some_and(|a| *rf <= a) {
            return Some(le("L-max", f, g, vec![]));
        }
        if let Term::PglSet(ms) = g {
            if ms.len() == 1 {
                let alpha = max_level(ms.iter().next().unwrap());
                if alpha.is_some_and(|a| *rf <= a.succ()) && tf.degree == Degree::Fin(1) {
                    return Some(le("L-max-simple", f, g, vec![]));
                }
            }
        }
        if min_level(f).is_some_and(|a| a <= *rg) {
            return Some(le("L-min", f, g, vec![]));
        }
        if is_compact_domain(f).unwrap_or(false) && is_compact_domain(g).unwrap_or(false) {
            // both non-empty here and tp(f) ≤lex tp(g) already holds
            return Some(le("L-compact", f, g, vec![]));
        }

        let g_spreads = matches!(g, Term::Glue(_) | Term::Omega(_));
        if matches!(f, Term::Glue(_)) || g_spreads {
            let slots = g
                .summands()
                .iter()
                .map(|s| Slot {
                    term: s.clone(),
                    cap: if matches!(s, Term::Omega(_)) { None } else { Some(1) },
                })
                .collect::<Vec<_>>();
            if let Some(premises) = self.glue_match(f, g, f.summands(), &slots, ctx, pending) {
                return Some(le("L-glue", f, g, premises));
            }
        }

        if let Term::PglSet(gs) = g {
            if let Some(lower) = self.derived(Term::omega(Term::glue(gs.iter().cloned())), ctx) {
                let v = self.cmp_nf(f, &lower, ctx);
                if v.is_le() {
                    return Some(le("L-pgl-lower", f, g, v.derivation.into_iter().collect()));
                }
                pending.absorb(&v);
            }
            if let Term::Glue(fs) = f {
                let mut slots = vec![Slot { term: g.clone(), cap: Some(1) }];
                slots.extend(gs.iter().map(|m| Slot {
                    term: m.clone(),
                    cap: if matches!(m, Term::Omega(_)) { None } else { Some(fs.len() - 1) },
                }));
                if let Some(premises) = self.glue_match(f, g, fs, &slots, ctx, pending) {
                    return Some(le("L-pgl-split", f, g, premises));
                }
            }
            if let Term::PglSet(fs) = f {
                if let Some(v) = self.pgl_mono(f, g, fs, gs, ctx, pending) {
                    return Some(v);
                }
            }
        }

        if let (
            Term::Wedge { verticals: fv, diagonal: fd },
            Term::Wedge { verticals: gv, diagonal: gd },
        ) = (f, g)
        {
            if let Some(v) = self.wedge_mono(f, g, (fv, fd), (gv, gd), ctx, pending) {
                return Some(v);
            }
        }

        if let Term::Wedge { verticals, diagonal } = g {
            for piece in wedge_pieces(verticals, diagonal) {
                let Some(lower) = self.derived(piece, ctx) else { continue };
                if lower == *f {
                    return Some(le("L-wedge-bounds", f, g, vec![]));
                }
                let v = self.cmp_nf(f, &lower, ctx);
                if v.is_le() {
                    let bound = Arc::new(step("L-wedge-bounds", &lower, g, vec![]));
                    return Some(le("L-trans", f, g, vec![v.derivation.unwrap(), bound]));
                }
                pending.absorb(&v);
            }
        }
        if let Some(upper) = wedge_upper(f).and_then(|u| self.derived(u, ctx)) {
            if upper != *g {
                let v = self.cmp_nf(&upper, g, ctx);
                if v.is_le() {
                    let bound = Arc::new(step("L-wedge-bounds", f, &upper, vec![]));
                    return Some(le("L-trans", f, g, vec![bound, v.derivation.unwrap()]));
                }
                pending.absorb(&v);
            }
        }
        None
    }

    /// Every member of `F` (split into wedge pieces) reduces to `⊕G`.
    fn pgl_mono(
        &self,
        f: &Term,
        g: &Term,
        fs: &std::collections::BTreeSet<Term>,
        gs: &std::collections::BTreeSet<Term>,
        ctx: &mut Ctx,
        pending: &mut Pending,
    ) -> Option<Verdict> {
        let target = self.derived(Term::glue(gs.iter().cloned()), ctx)?;
        let mut premises = Vec::new();
        for m in fs {
            let pieces = match m {
                Term::Wedge { verticals, diagonal } => wedge_pieces(verticals, diagonal),
                other => vec![other.clone()],
            };
            for p in pieces {
                let v = self.query(&p, &target, ctx);
                if !v.is_le() {
                    pending.absorb(&v);
                    return None;
                }
                premises.extend(v.derivation);
            }
        }
        Some(le("L-pgl-mono", f, g, premises))
    }

    #[allow(clippy::type_complexity)]
    fn wedge_mono(
        &self,
        f: &Term,
        g: &Term,
        (fv, fd): (&Vec<std::collections::BTreeSet<Term>>, &std::collections::BTreeSet<Term>),
        (gv, gd): (&Vec<std::collections::BTreeSet<Term>>, &std::collections::BTreeSet<Term>),
        ctx: &mut Ctx,
        pending: &mut Pending,
    ) -> Option<Verdict> {
        if !fd.is_empty() && gd.is_empty() {
            return None;
        }
        let gvs = gv
            .iter()
            .map(|v| self.derived(Term::glue(v.iter().cloned()), ctx))
            .collect::<Option<Vec<_>>>()?;
        let mut premises = Vec::new();
        for v in fv {
            let lhs = self.derived(Term::glue(v.iter().cloned()), ctx)?;
            let mut found = false;
            for rhs in &gvs {
                let r = self.cmp_nf(&lhs, rhs, ctx);
                if r.is_le() {
                    premises.extend(r.derivation);
                    found = true;
                    break;
                }
                pending.absorb(&r);
            }
            if !found {
                return None;
            }
        }
        if !fd.is_empty() {
            let r = self.query(&Term::glue(fd.iter().cloned()), &Term::glue(gd.iter().cloned()), ctx);
            if !r.is_le() {
                pending.absorb(&r);
                return None;
            }
            premises.extend(r.derivation);
        }
        Some(le("L-wedge-mono", f, g, premises))
    }

    /// Assigns every source to a slot it reduces to, respecting slot capacities.
    fn glue_match(
        &self,
        f: &Term,
        g: &Term,
        sources: &[Term],
        slots: &[Slot],
        ctx: &mut Ctx,
        pending: &mut Pending,
    ) -> Option<Vec<Arc<Step>>> {
        let mut premises = Vec::new();
        let mut bounded: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut edge_cache: Vec<(Term, Option<Arc<Step>>, Vec<usize>)> = Vec::new();
        for (i, s) in sources.iter().enumerate() {
            if let Some((_, free, edges)) = edge_cache.iter().find(|(t, _, _)| t == s) {
                match free {
                    Some(_) => {}
                    None if edges.is_empty() => return None,
                    None => bounded.push((i, edges.clone())),
                }
                continue;
            }
            let mut free = None;
            for slot in slots.iter().filter(|sl| sl.cap.is_none()) {
                let (a, b) = if (s, &slot.term) == (f, g) {
                    (strip_omega(s), strip_omega(&slot.term))
                } else {
                    (s, &slot.term)
                };
                if (a, b) == (f, g) {
                    continue;
                }
                let v = self.cmp_nf(a, b, ctx);
                if v.is_le() {
                    free = v.derivation;
                    break;
                }
                pending.absorb(&v);
            }
            let mut edges = Vec::new();
            if let Some(d) = &free {
                premises.push(d.clone());
            } else {
                for (j, slot) in slots.iter().enumerate() {
                    if slot.cap.is_none() || (s, &slot.term) == (f, g) {
                        continue;
                    }
                    let v = self.cmp_nf(s, &slot.term, ctx);
                    if v.is_le() {
                        premises.extend(v.derivation);
                        edges.push(j);
                    } else {
                        pending.absorb(&v);
                    }
                }
                if edges.is_empty() {
                    return None;
                }
                bounded.push((i, edges.clone()));
            }
            edge_cache.push((s.clone(), free, edges));
        }
        let caps: Vec<usize> = slots.iter().map(|s| s.cap.unwrap_or(0)).collect();
        let adj: Vec<Vec<usize>> = bounded.into_iter().map(|(_, e)| e).collect();
        capacitated_matching(&adj, &caps).then_some(premises)
    }

    fn not_le_rules(&self, f: &Term, g: &Term, tf: &CbType, tg: &CbType, ctx: &mut Ctx, pending: &mut Pending) -> Option<Verdict> {
        if let Some(v) = self.n_centered(f, g, ctx, pending) {
            return Some(v);
        }
        if let Some(v) = self.n_capacity(f, g, tf, tg, ctx, pending) {
            return Some(v);
        }
        if let (Term::PglSet(fs), Term::PglSet(gs)) = (f, g) {
            if tf.rank == tg.rank {
                if let Some(v) = self.n_pgl_rays(f, g, fs, gs, ctx, pending) {
                    return Some(v);
                }
            }
        }
        self.n_mono(f, g, ctx, pending)
    }

    fn n_centered(&self, f: &Term, g: &Term, ctx: &mut Ctx, pending: &mut Pending) -> Option<Verdict> {
        if !matches!(g, Term::Glue(_) | Term::Omega(_)) {
            return None;
        }
        let candidates: Vec<Term> = if is_centered(f).unwrap_or(false) {
            g.summands().iter().map(|s| strip_omega(s).clone()).collect()
        } else if omega_of_centered(f) && matches!(g, Term::Glue(_)) {
            // infinitely many copies share one summand
            g.summands().to_vec()
        } else {
            return None;
        };
        match self.split_below(f, candidates, ctx, pending)? {
            Split::Below(d) => Some(le("L-glue", f, g, d.into_iter().collect())),
            Split::NoneBelow(premises) => {
                let cite = format!("{f} is centered or w copies of a centered term");
                Some(not_le("N-centered", f, g, premises, vec![cite]))
            }
        }
    }

    /// Whether `f` lies below one of `candidates`; None when some verdict is open.
    fn split_below(&self, f: &Term, mut candidates: Vec<Term>, ctx: &mut Ctx, pending: &mut Pending) -> Option<Split> {
        candidates.sort();
        candidates.dedup();
        let mut premises = Vec::new();
        let mut unknown = false;
        for c in &candidates {
            let v = self.cmp_nf(f, c, ctx);
            match v.outcome {
                Outcome::Le => return Some(Split::Below(v.derivation)),
                Outcome::NotLe => premises.extend(v.derivation),
                Outcome::Unknown => {
                    unknown = true;
                    pending.absorb(&v);
                }
            }
        }
        (!unknown).then_some(Split::NoneBelow(premises))
    }

    fn n_capacity(&self, f: &Term, g: &Term, tf: &CbType, tg: &CbType, ctx: &mut Ctx, pending: &mut Pending) -> Option<Verdict> {
        if tf.rank != tg.rank || !tf.rank.is_successor() {
            return None;
        }
        let top: Vec<&Term> = f
            .summands()
            .iter()
            .filter(|s| cb_type(s).is_ok_and(|t| t.rank == tf.rank))
            .collect();
        let all_ok = top
            .iter()
            .all(|s| is_simple(s).unwrap_or(false) && is_centered(s).unwrap_or(false));
        if !all_ok {
            return None;
        }
        let targets = g.summands();
        let caps: Vec<usize> = targets
            .iter()
            .map(|s| match cb_type(s).map(|t| t.degree) {
                Ok(Degree::Fin(n)) => n as usize,
                Ok(Degree::Omega) => top.len(),
                Err(_) => 0,
            })
            .collect();
        let mut adj = Vec::with_capacity(top.len());
        let mut premises = Vec::new();
        let mut cites = Vec::new();
        for m in &top {
            let mut edges = Vec::new();
            for (j, s) in targets.iter().enumerate() {
                if (*m, s) == (f, g) {
                    edges.push(j);
                    continue;
                }
                let v = self.cmp_nf(m, s, ctx);
                match v.outcome {
                    Outcome::NotLe => premises.extend(v.derivation),
                    Outcome::Le => {
                        cites.push(format!("{m} <= {s}"));
                        edges.push(j);
                    }
                    Outcome::Unknown => {
                        pending.absorb(&v);
                        edges.push(j);
                    }
                }
            }
            adj.push(edges);
        }
        if capacitated_matching(&adj, &caps) {
            return None;
        }
        cites.push("top summands simple and centered".to_string());
        Some(not_le("N-capacity", f, g, premises, cites))
    }

    fn n_pgl_rays(
        &self,
        f: &Term,
        g: &Term,
        fs: &std::collections::BTreeSet<Term>,
        gs: &std::collections::BTreeSet<Term>,
        ctx: &mut Ctx,
        pending: &mut Pending,
    ) -> Option<Verdict> {
        let sf = self.derived(Term::glue(fs.iter().cloned()), ctx)?;
        let sg = self.derived(Term::glue(gs.iter().cloned()), ctx)?;
        let (tsf, tsg) = (cb_type(&sf).ok()?, cb_type(&sg).ok()?);
        if tsf.rank == tsg.rank
            && tsf.rank.is_successor()
            && tsf.degree == Degree::Omega
            && tsg.degree != Degree::Omega
        {
            let cite = format!("deg {sf} = w, deg {sg} finite");
            return Some(not_le("N-pgl-rays", f, g, vec![], vec![cite]));
        }
        // a finite multiple of ⊕G has the summands of ⊕G
        if is_centered(&sf).unwrap_or(false) || omega_of_centered(&sf) {
            let summands = sg.summands().to_vec();
            if let Some(Split::NoneBelow(premises)) = self.split_below(&sf, summands, ctx, pending) {
                let cite = format!("{sf} fits below no summand of {sg}");
                return Some(not_le("N-pgl-rays", f, g, premises, vec![cite]));
            }
        }
        let wide = self.derived(Term::omega(sg), ctx)?;
        let v = self.cmp_nf(&sf, &wide, ctx);
        if v.is_not_le() {
            return Some(not_le("N-pgl-rays", f, g, v.derivation.into_iter().collect(), vec![]));
        }
        pending.absorb(&v);
        None
    }

    fn n_mono(&self, f: &Term, g: &Term, ctx: &mut Ctx, pending: &mut Pending) -> Option<Verdict> {
        let mut lowers: Vec<Term> = Vec::new();
        match f {
            Term::Glue(ts) => lowers.extend(ts.iter().cloned()),
            Term::Omega(h) => lowers.push((**h).clone()),
            Term::PglSet(ms) => lowers.extend(self.derived(Term::omega(Term::glue(ms.iter().cloned())), ctx)),
            Term::Wedge { verticals, diagonal } => {
                for p in wedge_pieces(verticals, diagonal) {
                    lowers.extend(self.derived(p, ctx));
                }
            }
            _ => {}
        }
        for lower in lowers {
            if lower == *f {
                continue;
            }
            let v = self.cmp_nf(&lower, g, ctx);
            if v.is_not_le() {
                let cite = format!("{lower} <= {f}");
                return Some(not_le("N-mono", f, g, v.derivation.into_iter().collect(), vec![cite]));
            }
            pending.absorb(&v);
        }
        if let Some(upper) = wedge_upper(g).and_then(|u| self.derived(u, ctx)) {
            if upper != *g {
                let v = self.cmp_nf(f, &upper, ctx);
                if v.is_not_le() {
                    let cite = format!("{g} <= {upper}");
                    return Some(not_le("N-mono", f, g, v.derivation.into_iter().collect(), vec![cite]));
                }
                pending.absorb(&v);
            }
        }
        None
    }
}

fn sentinel_rules(f: &Term, g: &Term) -> Option<Verdict> {
    match (f, g) {
        (_, Term::IdBaire) => Some(le("L-sent", f, g, vec![])),
        (Term::IdBaire, _) => Some(not_le("N-scat", f, g, vec![], vec![])),
        (Term::IdQ, Term::IdQ) => Some(le("L-refl", f, g, vec![])),
        (Term::IdQ, _) => Some(not_le("N-scat", f, g, vec![], vec![])),
        (_, Term::IdQ) => Some(le("L-sent", f, g, vec![])),
        _ => None,
    }
}

/// Whether every left vertex can be matched along `adj` with slot `j` used at most `caps[j]` times.
fn capacitated_matching(adj: &[Vec<usize>], caps: &[usize]) -> bool {
    let mut owner: Vec<Vec<usize>> = vec![Vec::new(); caps.len()];
    for u in 0..adj.len() {
        let mut seen = vec![false; caps.len()];
        if !augment(u, adj, caps, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(u: usize, adj: &[Vec<usize>], caps: &[usize], owner: &mut [Vec<usize>], seen: &mut [bool]) -> bool {
    for &j in &adj[u] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].len() < caps[j] {
            owner[j].push(u);
            return true;
        }
        for k in 0..owner[j].len() {
            let w = owner[j][k];
            if augment(w, adj, caps, owner, seen) {
                owner[j][k] = u;
                return true;
            }
        }
    }
    false
}

pub fn compare(f: &Term, g: &Term) -> Verdict {
    default_engine().compare(f, g)
}

pub fn le_compact(f: &Term, g: &Term) -> Result<bool, CompareError> {
    default_engine().le_compact(f, g)
}

pub fn equivalent(f: &Term, g: &Term) -> Equivalence {
    default_engine().equivalent(f, g)
}

pub fn dominates(fs: &[Term], gs: &[Term]) -> Outcome {
    default_engine().dominates(fs, gs)
}
