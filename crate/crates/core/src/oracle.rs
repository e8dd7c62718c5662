//! Ground truth for rank ≤ 1: functions between finite discrete spaces.
//!
//! On a finite discrete space every map is continuous, so `f ≤ g` holds iff
//! some `σ: dom f → dom g` makes `g(σ(x)) ↦ f(x)` a well-defined map `τ`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteFn {
    dom_size: usize,
    cod_size: usize,
    values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteFnError {
    #[error("expected \"a b v0 .. v(a-1)\": {0}")]
    Syntax(String),
    #[error("domain and codomain sizes must be positive")]
    EmptySpace,
    #[error("expected {expected} values, found {found}")]
    Length { expected: usize, found: usize },
    #[error("value {value} at index {index} is not below codomain size {cod}")]
    OutOfRange { index: usize, value: usize, cod: usize },
}

impl FiniteFn {
    pub fn new(cod_size: usize, values: Vec<usize>) -> Result<Self, FiniteFnError> {
        if values.is_empty() || cod_size == 0 {
            return Err(FiniteFnError::EmptySpace);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| **v >= cod_size) {
            return Err(FiniteFnError::OutOfRange { index, value, cod: cod_size });
        }
        Ok(FiniteFn {
            dom_size: values.len(),
            cod_size,
            values,
        })
    }

    pub fn dom_size(&self) -> usize {
        self.dom_size
    }

    pub fn cod_size(&self) -> usize {
        self.cod_size
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn image_size(&self) -> usize {
        self.values.iter().collect::<BTreeSet<_>>().len()
    }

    /// Every function with the given domain and codomain sizes.
    pub fn all(dom_size: usize, cod_size: usize) -> Vec<FiniteFn> {
        let mut out = Vec::new();
        let mut values = vec![0; dom_size];
        loop {
            out.push(FiniteFn {
                dom_size,
                cod_size,
                values: values.clone(),
            });
            let mut i = 0;
            loop {
                if i == dom_size {
                    return out;
                }
                values[i] += 1;
                if values[i] < cod_size {
                    break;
                }
                values[i] = 0;
                i += 1;
            }
        }
    }
}

impl fmt::Display for FiniteFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.dom_size, self.cod_size)?;
        for v in &self.values {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

impl FromStr for FiniteFn {
    type Err = FiniteFnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let nums = s
            .split_whitespace()
            .map(|w| w.parse::<usize>().map_err(|_| FiniteFnError::Syntax(format!("bad number '{w}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        let [a, b, values @ ..] = nums.as_slice() else {
            return Err(FiniteFnError::Syntax("missing sizes".into()));
        };
        if *a == 0 || *b == 0 {
            return Err(FiniteFnError::EmptySpace);
        }
        if values.len() != *a {
            return Err(FiniteFnError::Length {
                expected: *a,
                found: values.len(),
            });
        }
        FiniteFn::new(*b, values.to_vec())
    }
}

/// Exhaustive search for `σ`, extending a partial `τ` point by point.
pub fn brute_force_le(f: &FiniteFn, g: &FiniteFn) -> bool {
    let mut tau: Vec<Option<usize>> = vec![None; g.cod_size];
    extend(0, f, g, &mut tau)
}

fn extend(x: usize, f: &FiniteFn, g: &FiniteFn, tau: &mut [Option<usize>]) -> bool {
    if x == f.dom_size {
        return true;
    }
    for y in 0..g.dom_size {
        let gv = g.values[y];
        match tau[gv] {
            Some(v) if v != f.values[x] => continue,
            Some(_) => {
                if extend(x + 1, f, g, tau) {
                    return true;
                }
            }
            None => {
                tau[gv] = Some(f.values[x]);
                if extend(x + 1, f, g, tau) {
                    return true;
                }
                tau[gv] = None;
            }
        }
    }
    false
}

pub fn image_formula_le(f: &FiniteFn, g: &FiniteFn) -> bool {
    f.image_size() <= g.image_size()
}

/// The identity on `|im f|` points, written as a gluing of `one`.
pub fn term_of(f: &FiniteFn) -> Term {
    match f.image_size() {
        1 => Term::One,
        n => Term::copies(n, &Term::One),
    }
}
