//! Centered sets `C_α`, generator sets `G_α` and Hasse diagrams.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::compare::{Equivalence, Outcome};
use crate::engine::{default_engine, Engine};
use crate::ordinal::Ordinal;
use crate::rank::cb_type;
use crate::rewrite::RewriteError;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("level {level} needs {needed} raw terms, above the bound {bound}")]
    Infeasible { level: Ordinal, needed: String, bound: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("undecided pair: {0} vs {1}")]
    Undecided(Term, Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    /// Normal form of the first member.
    pub representative: Term,
    pub members: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    pub level: Ordinal,
    pub raw: Vec<Term>,
    /// Lower-level members added before classification (`Λ_λ` at `λ+n`).
    pub cross_level: Vec<Term>,
    pub classes: Vec<Class>,
    pub undecided_pairs: Vec<(Term, Term)>,
}

/// Raw size of `C_{λ+n}` before syntactic deduplication, saturating.
fn centered_count(lambda: &Ordinal, n: u64) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut c: u128 = if lambda.is_zero() { 1 } else { 2 };
    for _ in 1..n {
        c = c.saturating_add(pow2_minus_one(c.saturating_mul(2)));
    }
    c
}

fn pow2_minus_one(e: u128) -> u128 {
    if e >= 127 {
        u128::MAX
    } else {
        (1u128 << e) - 1
    }
}

fn generator_count(lambda: &Ordinal, n: u64) -> u128 {
    if n == 0 {
        return u128::from(!lambda.is_zero());
    }
    let c = centered_count(lambda, n);
    let prev = generator_count(lambda, n - 1);
    let families = pow2_minus_one(pow2_minus_one(prev));
    let diagonals = pow2_minus_one(c).saturating_add(1);
    c.saturating_mul(2).saturating_add(families.saturating_mul(diagonals))
}

fn check(level: &Ordinal, count: u128, bound: usize) -> Result<(), GenError> {
    if count > bound as u128 {
        let needed = if count == u128::MAX { "more than 2^127".to_string() } else { count.to_string() };
        return Err(GenError::Infeasible {
            level: level.clone(),
            needed,
            bound,
        });
    }
    Ok(())
}

/// Non-empty subsets of `items` in bitmask order.
fn nonempty_subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (1u64..(1u64 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect()
        })
        .collect()
}

fn push_unique(out: &mut Vec<Term>, t: Term) {
    if !out.contains(&t) {
        out.push(t);
    }
}

/// Raw members of `C_α`, in construction order.
pub fn centered_raw(alpha: &Ordinal, max_raw: usize) -> Result<Vec<Term>, GenError> {
    let (lambda, n) = alpha.split();
    check(alpha, centered_count(&lambda, n), max_raw)?;
    Ok(centered_unchecked(&lambda, n))
}

fn centered_unchecked(lambda: &Ordinal, n: u64) -> Vec<Term> {
    match n {
        0 => Vec::new(),
        1 if lambda.is_zero() => vec![Term::One],
        1 => vec![Term::MinFn(lambda.succ()), Term::pgl([Term::MaxFn(lambda.clone())])],
        _ => {
            let mut out = centered_unchecked(lambda, n - 1);
            let base: Vec<Term> = out.iter().cloned().chain(out.iter().cloned().map(Term::omega)).collect();
            for s in nonempty_subsets(&base) {
                push_unique(&mut out, Term::PglSet(s));
            }
            out
        }
    }
}

/// Raw members of `G_α`: centered terms, their ω-gluings, then wedges.
pub fn generator_raw(alpha: &Ordinal, max_raw: usize) -> Result<Vec<Term>, GenError> {
    let (lambda, n) = alpha.split();
    check(alpha, generator_count(&lambda, n), max_raw)?;
    Ok(generators_unchecked(&lambda, n))
}

fn generators_unchecked(lambda: &Ordinal, n: u64) -> Vec<Term> {
    if n == 0 {
        return if lambda.is_zero() { Vec::new() } else { vec![Term::MaxFn(lambda.clone())] };
    }
    let centered = centered_unchecked(lambda, n);
    let mut out = centered.clone();
    for c in &centered {
        push_unique(&mut out, Term::omega(c.clone()));
    }
    let prev = generators_unchecked(lambda, n - 1);
    let vertical_sets = nonempty_subsets(&prev);
    let diagonals: Vec<BTreeSet<Term>> = std::iter::once(BTreeSet::new())
        .chain(nonempty_subsets(&centered))
        .collect();
    for family in nonempty_subsets(&vertical_sets) {
        for d in &diagonals {
            push_unique(&mut out, Term::wedge(family.iter().cloned(), d.iter().cloned()));
        }
    }
    out
}

/// `Λ_λ` for levels `λ+n` with `λ` a limit and `n ≥ 1`.
pub fn cross_level(alpha: &Ordinal) -> Vec<Term> {
    let (lambda, n) = alpha.split();
    if lambda.is_limit() && n >= 1 {
        vec![Term::MaxFn(lambda)]
    } else {
        Vec::new()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let p = self.0[i];
        if p == i {
            return i;
        }
        let r = self.find(p);
        self.0[i] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Distinct normal forms, and for each input the index of its normal form.
fn distinct_normal_forms(engine: &Engine, terms: &[Term]) -> Result<(Vec<Term>, Vec<usize>), GenError> {
    let mut forms: Vec<Term> = Vec::new();
    let mut index = Vec::with_capacity(terms.len());
    for t in terms {
        let nf = engine.normalize(t)?;
        let i = forms.iter().position(|f| *f == nf).unwrap_or_else(|| {
            forms.push(nf);
            forms.len() - 1
        });
        index.push(i);
    }
    Ok((forms, index))
}

/// Classes plus the representative pairs left undecided.
pub type Classification = (Vec<Class>, Vec<(Term, Term)>);

/// Groups `terms` into equivalence classes; Unknown pairs never merge.
pub fn classify(engine: &Engine, terms: &[Term]) -> Result<Classification, GenError> {
    let (forms, index) = distinct_normal_forms(engine, terms)?;
    let pairs: Vec<(usize, usize)> = (0..forms.len())
        .flat_map(|i| (i + 1..forms.len()).map(move |j| (i, j)))
        .collect();
    let verdicts: Vec<Equivalence> = pairs
        .par_iter()
        .map(|&(i, j)| engine.equivalent(&forms[i], &forms[j]))
        .collect();
    let mut uf = UnionFind((0..forms.len()).collect());
    for (&(i, j), v) in pairs.iter().zip(&verdicts) {
        if *v == Equivalence::Yes {
            uf.union(i, j);
        }
    }
    let mut classes: Vec<Class> = Vec::new();
    let mut class_of_root: Vec<Option<usize>> = vec![None; forms.len()];
    for (t, &fi) in terms.iter().zip(&index) {
        let root = uf.find(fi);
        match class_of_root[root] {
            Some(c) => classes[c].members.push(t.clone()),
            None => {
                class_of_root[root] = Some(classes.len());
                classes.push(Class {
                    representative: forms[fi].clone(),
                    members: vec![t.clone()],
                });
            }
        }
    }
    let mut undecided = Vec::new();
    let mut seen = BTreeSet::new();
    for (&(i, j), v) in pairs.iter().zip(&verdicts) {
        let (ci, cj) = (class_of_root[uf.find(i)], class_of_root[uf.find(j)]);
        if *v == Equivalence::Unknown && ci != cj && seen.insert((ci.min(cj), ci.max(cj))) {
            let (ci, cj) = (ci.expect("class"), cj.expect("class"));
            undecided.push((classes[ci].representative.clone(), classes[cj].representative.clone()));
        }
    }
    Ok((classes, undecided))
}

impl Engine {
    pub fn centered_set(&self, alpha: &Ordinal) -> Result<GeneratorSet, GenError> {
        let raw = centered_raw(alpha, self.config.max_raw)?;
        self.assemble(alpha, raw, Vec::new())
    }

    pub fn generator_set(&self, alpha: &Ordinal) -> Result<GeneratorSet, GenError> {
        let raw = generator_raw(alpha, self.config.max_raw)?;
        self.assemble(alpha, raw, cross_level(alpha))
    }

    fn assemble(&self, alpha: &Ordinal, raw: Vec<Term>, cross: Vec<Term>) -> Result<GeneratorSet, GenError> {
        let all: Vec<Term> = cross.iter().chain(&raw).cloned().collect();
        let (classes, undecided_pairs) = classify(self, &all)?;
        Ok(GeneratorSet {
            level: alpha.clone(),
            raw,
            cross_level: cross,
            classes,
            undecided_pairs,
        })
    }

    pub fn hasse(&self, terms: &[Term]) -> Result<Hasse, GenError> {
        let (classes, undecided) = classify(self, terms)?;
        if let Some((a, b)) = undecided.into_iter().next() {
            return Err(GenError::Undecided(a, b));
        }
        let reps: Vec<&Term> = classes.iter().map(|c| &c.representative).collect();
        let k = reps.len();
        let cells: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        let outcomes: Vec<Outcome> = cells
            .par_iter()
            .map(|&(i, j)| self.compare(reps[i], reps[j]).outcome)
            .collect();
        let mut below = vec![vec![false; k]; k];
        for (&(i, j), o) in cells.iter().zip(&outcomes) {
            match o {
                Outcome::Le => below[i][j] = true,
                Outcome::NotLe => {}
                Outcome::Unknown => return Err(GenError::Undecided(reps[i].clone(), reps[j].clone())),
            }
        }
        // distinct classes are never mutually below each other, so this is strict
        let mut edges = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if below[i][j] && !(0..k).any(|m| m != i && m != j && below[i][m] && below[m][j]) {
                    edges.push((i, j));
                }
            }
        }
        Ok(Hasse { classes, edges })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hasse {
    pub classes: Vec<Class>,
    /// Covering pairs `(lower, upper)` of class indices.
    pub edges: Vec<(usize, usize)>,
}

/// Stable node identifier derived from the formatted normal form.
pub fn node_id(t: &Term) -> String {
    let digest = Sha256::digest(t.to_string().as_bytes());
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("n{hex}")
}

#[derive(Serialize)]
struct JsonNode {
    id: String,
    term: String,
    #[serde(rename = "type")]
    tp: String,
    members: Vec<String>,
}

#[derive(Serialize)]
struct JsonEdge {
    from: String,
    to: String,
}

#[derive(Serialize)]
struct JsonHasse {
    schema: u32,
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

impl Hasse {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for c in &self.classes {
            let label = c.representative.to_string().replace('"', "\\\"");
            out.push_str(&format!("  {} [label=\"{}\"];\n", node_id(&c.representative), label));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!(
                "  {} -> {};\n",
                node_id(&self.classes[a].representative),
                node_id(&self.classes[b].representative)
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonHasse {
            schema: 1,
            nodes: self
                .classes
                .iter()
                .map(|c| JsonNode {
                    id: node_id(&c.representative),
                    term: c.representative.to_string(),
                    tp: cb_type(&c.representative).map(|t| t.to_string()).unwrap_or_default(),
                    members: c.members.iter().map(Term::to_string).collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| JsonEdge {
                    from: node_id(&self.classes[a].representative),
                    to: node_id(&self.classes[b].representative),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    /// Covering pairs as formatted representatives.
    pub fn edge_terms(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| {
                (
                    self.classes[a].representative.to_string(),
                    self.classes[b].representative.to_string(),
                )
            })
            .collect()
    }
}

pub fn centered_set(alpha: &Ordinal) -> Result<GeneratorSet, GenError> {
    default_engine().centered_set(alpha)
}

pub fn generator_set(alpha: &Ordinal) -> Result<GeneratorSet, GenError> {
    default_engine().generator_set(alpha)
}

pub fn hasse(terms: &[Term]) -> Result<Hasse, GenError> {
    default_engine().hasse(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::rank;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn base_cases() {
        assert_eq!(centered_set(&o("1")).unwrap().raw, vec![Term::One]);
        assert_eq!(
            centered_set(&o("w+1")).unwrap().raw,
            vec![t("min(w+1)"), t("pgl{max(w)}")]
        );
        assert_eq!(generator_set(&o("1")).unwrap().raw, vec![t("one"), t("omega(one)")]);
        assert_eq!(generator_set(&o("w")).unwrap().raw, vec![t("max(w)")]);
        assert!(generator_set(&o("0")).unwrap().raw.is_empty());
        assert!(centered_set(&o("w")).unwrap().raw.is_empty());
    }

    #[test]
    fn centered_two_has_three_classes() {
        let c = centered_set(&o("2")).unwrap();
        assert_eq!(c.raw.len(), 4);
        assert_eq!(c.classes.len(), 3);
        let sizes: Vec<usize> = c.classes.iter().map(|c| c.members.len()).collect();
        assert_eq!(sizes, vec![1, 1, 2]);
        assert!(c.undecided_pairs.is_empty());
    }

    #[test]
    fn counts() {
        assert_eq!(generator_raw(&o("2"), 100_000).unwrap().len(), 120);
        assert_eq!(generator_raw(&o("w+1"), 100_000).unwrap().len(), 8);
        assert_eq!(centered_raw(&o("w+2"), 100_000).unwrap().len(), 17);
        assert_eq!(centered_raw(&o("3"), 100_000).unwrap().len(), 256);
        assert_eq!(generator_count(&Ordinal::zero(), 2), 120);
        assert!(matches!(generator_raw(&o("3"), 100_000), Err(GenError::Infeasible { .. })));
        assert!(matches!(generator_raw(&o("w+2"), 100_000), Err(GenError::Infeasible { .. })));
        assert!(matches!(generator_raw(&o("2"), 100), Err(GenError::Infeasible { .. })));
    }

    #[test]
    fn nesting_and_rank_bounds() {
        let sub = |a: &[Term], b: &[Term]| a.iter().all(|x| b.contains(x));
        assert!(sub(&centered_raw(&o("1"), 1000).unwrap(), &centered_raw(&o("2"), 1000).unwrap()));
        assert!(sub(&centered_raw(&o("w+1"), 1000).unwrap(), &centered_raw(&o("w+2"), 1000).unwrap()));
        assert!(sub(&generator_raw(&o("1"), 1000).unwrap(), &generator_raw(&o("2"), 1000).unwrap()));
        for (level, lo) in [("2", "0"), ("w+1", "w"), ("w*2+1", "w*2"), ("w+2", "w")] {
            let raw = match generator_raw(&o(level), 100_000) {
                Ok(r) => r,
                Err(_) => centered_raw(&o(level), 100_000).unwrap(),
            };
            for g in raw {
                let r = rank(&g).unwrap();
                assert!(o(lo) <= r && r <= o(level), "{g} at {level}");
            }
        }
    }

    #[test]
    fn hasse_small() {
        let h = hasse(&[t("one"), t("omega(one)")]).unwrap();
        assert_eq!(h.edge_terms(), vec![("one".to_string(), "omega(one)".to_string())]);
        let h = hasse(&[t("empty")]).unwrap();
        assert!(h.edges.is_empty());
        let dot = h.to_dot();
        assert!(dot.contains(&node_id(&Term::Empty)));
        assert!(dot.starts_with("digraph"));
        let json: serde_json::Value = serde_json::from_str(&hasse(&[t("one")]).unwrap().to_json()).unwrap();
        assert_eq!(json["schema"], 1);
    }

    #[test]
    fn node_ids_are_stable() {
        assert_eq!(node_id(&Term::One), node_id(&t("one")));
        assert_ne!(node_id(&Term::One), node_id(&Term::Empty));
        assert_eq!(node_id(&Term::One).len(), 13);
    }

    #[test]
    fn second_centered_levels_fully_decided() {
        for (level, classes) in [("3", 8), ("w+2", 7), ("w^2+2", 7)] {
            let set = Engine::default().centered_set(&o(level)).unwrap();
            assert_eq!(set.classes.len(), classes, "{level}");
            assert!(set.undecided_pairs.is_empty(), "{level}: {:?}", set.undecided_pairs);
        }
    }
}
