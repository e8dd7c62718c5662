//! Seeded random terms for property checks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::Engine;
use crate::ordinal::Ordinal;
use crate::rank::{cb_type, rank};
use crate::term::Term;

const MIN_RANKS: [&str; 7] = ["1", "2", "3", "w+1", "w+2", "w*2+1", "w^2+1"];
const MAX_RANKS: [&str; 8] = ["0", "1", "2", "w", "w+1", "w+2", "w*2", "w^2"];

pub struct Sampler {
    rng: ChaCha8Rng,
    max_depth: usize,
    min_ranks: Vec<Ordinal>,
    max_ranks: Vec<Ordinal>,
}

impl Sampler {
    pub fn new(seed: u64, max_depth: usize) -> Self {
        let parse = |xs: &[&str]| xs.iter().map(|s| s.parse().expect("ordinal literal")).collect();
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_depth: max_depth.max(1),
            min_ranks: parse(&MIN_RANKS),
            max_ranks: parse(&MAX_RANKS),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A scattered term of depth at most `max_depth`.
    pub fn term(&mut self) -> Term {
        let depth = self.max_depth;
        self.node(depth)
    }

    /// Like [`Sampler::term`] but occasionally a standalone sentinel.
    pub fn any_term(&mut self) -> Term {
        match self.rng.gen_range(0..40) {
            0 => Term::IdQ,
            1 => Term::IdBaire,
            _ => self.term(),
        }
    }

    /// A non-empty set of terms, for pointed gluings.
    pub fn member_set(&mut self, max: usize) -> BTreeSet<Term> {
        let depth = self.max_depth.saturating_sub(1).max(1);
        let n = self.rng.gen_range(1..=max);
        (0..n).map(|_| self.node(depth)).collect()
    }

    fn leaf(&mut self) -> Term {
        match self.rng.gen_range(0..10) {
            0 => Term::Empty,
            1..=3 => Term::One,
            4..=6 => Term::MinFn(self.min_ranks.choose(&mut self.rng).expect("non-empty").clone()),
            _ => Term::MaxFn(self.max_ranks.choose(&mut self.rng).expect("non-empty").clone()),
        }
    }

    fn set(&mut self, depth: usize, lo: usize, hi: usize) -> BTreeSet<Term> {
        let n = self.rng.gen_range(lo..=hi);
        (0..n).map(|_| self.node(depth)).collect()
    }

    fn node(&mut self, depth: usize) -> Term {
        if depth <= 1 || self.rng.gen_bool(0.35) {
            return self.leaf();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..4) {
            0 => {
                let n = self.rng.gen_range(2..=3);
                Term::glue((0..n).map(|_| self.node(d)))
            }
            1 => Term::omega(self.node(d)),
            2 => Term::PglSet(self.set(d, 1, 2)),
            _ => {
                let k = self.rng.gen_range(1..=2);
                let mut verticals: Vec<BTreeSet<Term>> = Vec::new();
                for _ in 0..k {
                    let v = self.set(d, 1, 2);
                    if !verticals.contains(&v) {
                        verticals.push(v);
                    }
                }
                let diagonal = self.set(d, 0, 2);
                Term::wedge(verticals, diagonal)
            }
        }
    }
}

/// Outcome of one sampled property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs the sampled property suite on `samples` random terms.
pub fn check(engine: &Engine, seed: u64, samples: usize) -> Vec<PropertyResult> {
    let mut s = Sampler::new(seed, 5);
    let terms: Vec<Term> = (0..samples).map(|_| s.term()).collect();
    let n = terms.len().max(1);
    let pick = |i: usize, a: usize, b: usize| &terms[(i * a + b) % n];

    let mut norm = PropertyResult { name: "normalize", checked: 0, violations: Vec::new() };
    for t in &terms {
        norm.checked += 1;
        match engine.normalize(t) {
            Ok(nf) => {
                if engine.normalize(&nf).as_ref() != Ok(&nf) {
                    norm.violations.push(format!("not idempotent: {t}"));
                } else if cb_type(&nf) != cb_type(t) {
                    norm.violations.push(format!("type changed: {t}"));
                }
            }
            Err(e) => norm.violations.push(format!("{t}: {e}")),
        }
    }

    let mut lex = PropertyResult { name: "type-guard", checked: 0, violations: Vec::new() };
    let mut tri = PropertyResult { name: "transitivity", checked: 0, violations: Vec::new() };
    let mut gst = PropertyResult { name: "rank-gap", checked: 0, violations: Vec::new() };
    for (i, f) in terms.iter().enumerate() {
        let (g, h) = (pick(i, 7, 3), pick(i, 13, 5));
        let fg = engine.compare(f, g);
        lex.checked += 1;
        if fg.is_le() && cb_type(f).ok() > cb_type(g).ok() {
            lex.violations.push(format!("{f} <= {g}"));
        }
        tri.checked += 1;
        if fg.is_le() && engine.compare(g, h).is_le() && engine.compare(f, h).is_not_le() {
            tri.violations.push(format!("{f} <= {g} <= {h}"));
        }
        if let (Ok(rf), Ok(rg)) = (rank(f), rank(g)) {
            if rf.double() < rg {
                gst.checked += 1;
                if !fg.is_le() {
                    gst.violations.push(format!("{f} vs {g}: {}", fg.outcome));
                }
            }
        }
    }

    let mut pgl = PropertyResult { name: "glue-below-pgl", checked: 0, violations: Vec::new() };
    for _ in 0..samples.min(1000) {
        let members = s.member_set(3);
        let glue = Term::glue(members.iter().cloned());
        let pointed = Term::PglSet(members);
        pgl.checked += 1;
        if !engine.compare(&glue, &pointed).is_le() {
            pgl.violations.push(format!("{glue} vs {pointed}"));
        }
    }
    vec![norm, lex, tri, gst, pgl]
}
