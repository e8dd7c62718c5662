//! Symbolic calculus for scattered continuous functions under continuous
//! reducibility: ordinals below ω^ω, terms built from gluing, pointed gluing
//! and wedge, Cantor–Bendixson types, normalization, a three-valued
//! comparison engine, generator sets and a finite brute-force oracle.

pub mod cli;
pub mod compare;
pub mod engine;
pub mod generators;
pub mod oracle;
pub mod ordinal;
pub mod rank;
pub mod rewrite;
pub mod sample;
pub mod term;

pub use compare::{compare, equivalent, le_compact, Equivalence, Outcome, Verdict};
pub use engine::{Config, Engine};
pub use ordinal::Ordinal;
pub use rank::{cb_type, CbType, Degree};
pub use rewrite::normalize;
pub use term::Term;
