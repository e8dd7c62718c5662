//! Shared state for normalization and comparison.
//!
//! The two procedures are mutually recursive: rewriting consults the
//! comparison engine for its domination side conditions and comparison
//! normalizes every sub-query. Both memo tables live here.

use std::collections::HashSet;
use std::sync::OnceLock;

use dashmap::DashMap;

use crate::compare::Verdict;
use crate::term::Term;

#[derive(Debug, Clone)]
pub struct Config {
    /// Maximum nesting of comparison sub-queries.
    pub depth: usize,
    /// Rewrite steps allowed per normalization, as a multiple of term size.
    pub cap_factor: usize,
    /// Feasibility bound for generator enumeration.
    pub max_raw: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            depth: 64,
            cap_factor: 10,
            max_raw: 100_000,
        }
    }
}

#[derive(Debug, Default)]
pub struct Engine {
    pub(crate) config: Config,
    pub(crate) norm_memo: DashMap<Term, Term>,
    pub(crate) cmp_memo: DashMap<(Term, Term), Verdict>,
}

/// Per-query search state.
#[derive(Debug, Default)]
pub(crate) struct Ctx {
    pub(crate) in_progress: HashSet<(Term, Term)>,
    pub(crate) depth: usize,
    /// Bumped whenever a result depended on a cycle or the depth bound.
    pub(crate) taint: u64,
}

impl Engine {
    pub fn new(config: Config) -> Self {
        Engine {
            config,
            ..Default::default()
        }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn clear(&self) {
        self.norm_memo.clear();
        self.cmp_memo.clear();
    }

    pub fn memo_sizes(&self) -> (usize, usize) {
        (self.norm_memo.len(), self.cmp_memo.len())
    }
}

/// Process-wide engine with the default configuration.
pub fn default_engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(Engine::default)
}
