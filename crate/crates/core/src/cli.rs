//! The `scat` command line.
//!
//! Exit codes: 0/1/2 for LE/NOT_LE/UNKNOWN (0/1 for YES/NO), 64 for bad
//! input, 65 when enumeration is infeasible or a Hasse pair is undecided.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::compare::{BlockReason, Outcome, TraceLine};
use crate::engine::{Config, Engine};
use crate::generators::{centered_raw, cross_level, generator_raw, GenError, GeneratorSet};
use crate::oracle::{brute_force_le, FiniteFn};
use crate::ordinal::Ordinal;
use crate::rank::cb_type;
use crate::sample;
use crate::term::Term;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Parser, Debug)]
#[command(name = "scat", version, about = "Scattered-function calculus: normalize, compare, enumerate")]
struct Cli {
    /// Maximum nesting of comparison sub-queries.
    #[arg(long, global = true, value_name = "N")]
    depth: Option<usize>,
    /// Largest raw generator set to enumerate.
    #[arg(long = "max-raw", global = true, value_name = "N")]
    max_raw: Option<usize>,
    /// Seed for `check`.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the Cantor-Bendixson type "(rank, degree)".
    Type { term: String },
    /// Print the normal form.
    Normalize { term: String },
    /// Decide `lhs <= rhs`.
    Compare {
        lhs: String,
        rhs: String,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// List generators (or centered terms) at a level.
    Generators {
        ordinal: String,
        #[command(flatten)]
        set: SetArgs,
        /// Raw enumeration, before deduplication.
        #[arg(long, conflicts_with = "classes")]
        raw: bool,
        /// Each representative followed by its indented members.
        #[arg(long)]
        classes: bool,
    },
    /// Covering relation of the classes at a level.
    Hasse {
        ordinal: String,
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Brute-force reducibility between finite functions "a b v0 .. v(a-1)".
    Oracle { f: String, g: String },
    /// Run the sampled property suite.
    Check {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct SetArgs {
    /// Use the centered set instead of the generators.
    #[arg(long)]
    centered: bool,
}

#[derive(Serialize)]
struct CompareJson<'a> {
    schema: u32,
    outcome: Outcome,
    trace: Vec<TraceLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    blockers: Vec<BlockerJson<'a>>,
}

#[derive(Serialize)]
struct BlockerJson<'a> {
    lhs: String,
    rhs: String,
    reason: &'a BlockReason,
}

struct Failure(i32, String);

type Out = Result<(i32, String), Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_USAGE, format!("error: {msg}"))
}

fn data(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_DATA, format!("error: {msg}"))
}

fn term(s: &str) -> Result<Term, Failure> {
    s.parse().map_err(|e| usage(format!("{s:?}: {e}")))
}

fn ordinal(s: &str) -> Result<Ordinal, Failure> {
    s.parse().map_err(|e| usage(format!("{s:?}: {e}")))
}

fn gen_failure(e: GenError) -> Failure {
    match e {
        GenError::Undecided(a, b) => data(format!("undecided pair: {a} | {b}")),
        e => data(e),
    }
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

/// Runs one command; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let mut config = Config::default();
    if let Some(d) = cli.depth {
        config.depth = d;
    }
    if let Some(m) = cli.max_raw {
        config.max_raw = m;
    }
    let engine = Engine::new(config);
    match dispatch(&engine, cli.seed, cli.cmd) {
        Ok(r) => r,
        Err(Failure(code, msg)) => (code, msg + "\n"),
    }
}

fn dispatch(engine: &Engine, seed: u64, cmd: Cmd) -> Out {
    match cmd {
        Cmd::Type { term: t } => {
            let t = term(&t)?;
            let tp = cb_type(&t).map_err(data)?;
            Ok((0, format!("{tp}\n")))
        }
        Cmd::Normalize { term: t } => {
            let nf = engine.normalize(&term(&t)?).map_err(data)?;
            Ok((0, format!("{nf}\n")))
        }
        Cmd::Compare { lhs, rhs, trace, json } => {
            let (f, g) = (term(&lhs)?, term(&rhs)?);
            let v = engine.compare(&f, &g);
            let code = match v.outcome {
                Outcome::Le => 0,
                Outcome::NotLe => 1,
                Outcome::Unknown => 2,
            };
            if json {
                let doc = CompareJson {
                    schema: 1,
                    outcome: v.outcome,
                    trace: v.trace(),
                    blockers: v
                        .blockers
                        .iter()
                        .map(|b| BlockerJson {
                            lhs: b.lhs.to_string(),
                            rhs: b.rhs.to_string(),
                            reason: &b.reason,
                        })
                        .collect(),
                };
                let text = serde_json::to_string_pretty(&doc).expect("serializable");
                return Ok((code, text + "\n"));
            }
            let mut out = format!("{}\n", v.outcome);
            if trace {
                out += &lines(v.trace().iter().map(|l| format!("  {l}")));
                out += &lines(
                    v.blockers
                        .iter()
                        .map(|b| format!("  blocked ({:?}): {} <= {}", b.reason, b.lhs, b.rhs)),
                );
            }
            Ok((code, out))
        }
        Cmd::Generators { ordinal: o, set, raw, classes } => {
            let alpha = ordinal(&o)?;
            if raw {
                let terms = if set.centered {
                    centered_raw(&alpha, engine.config().max_raw)
                } else {
                    generator_raw(&alpha, engine.config().max_raw)
                }
                .map_err(gen_failure)?;
                return Ok((0, lines(terms.iter().map(Term::to_string))));
            }
            let gs = level_set(engine, &alpha, set.centered)?;
            let mut out = String::new();
            for c in &gs.classes {
                out += &format!("{}\n", c.representative);
                if classes {
                    out += &lines(c.members.iter().map(|m| format!("  {m}")));
                }
            }
            Ok((0, out))
        }
        Cmd::Hasse { ordinal: o, set, dot: _, json } => {
            let alpha = ordinal(&o)?;
            let terms = if set.centered {
                centered_raw(&alpha, engine.config().max_raw).map_err(gen_failure)?
            } else {
                let mut ts = cross_level(&alpha);
                ts.extend(generator_raw(&alpha, engine.config().max_raw).map_err(gen_failure)?);
                ts
            };
            let h = engine.hasse(&terms).map_err(gen_failure)?;
            Ok((0, if json { h.to_json() + "\n" } else { h.to_dot() }))
        }
        Cmd::Oracle { f, g } => {
            let parse = |s: &str| s.parse::<FiniteFn>().map_err(|e| usage(format!("{s:?}: {e}")));
            let (f, g) = (parse(&f)?, parse(&g)?);
            Ok(if brute_force_le(&f, &g) {
                (0, "YES\n".into())
            } else {
                (1, "NO\n".into())
            })
        }
        Cmd::Check { samples } => {
            let results = sample::check(engine, seed, samples);
            let mut out = String::new();
            for r in &results {
                let status = if r.passed() { "ok" } else { "FAIL" };
                out += &format!("{}: {status} ({} checked, {} violations)\n", r.name, r.checked, r.violations.len());
                out += &lines(r.violations.iter().take(5).map(|v| format!("  {v}")));
            }
            let code = if results.iter().all(|r| r.passed()) { 0 } else { 1 };
            Ok((code, out))
        }
    }
}

fn level_set(engine: &Engine, alpha: &Ordinal, centered: bool) -> Result<GeneratorSet, Failure> {
    if centered {
        engine.centered_set(alpha)
    } else {
        engine.generator_set(alpha)
    }
    .map_err(gen_failure)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scat(args: &[&str]) -> (i32, String) {
        run(std::iter::once("scat").chain(args.iter().copied()))
    }

    #[test]
    fn examples() {
        assert_eq!(scat(&["type", "pgl{max(w)}"]), (0, "(w+1, 1)\n".into()));
        assert_eq!(scat(&["compare", "pgl{max(w)}", "omega(min(w+1))"]), (1, "NOT_LE\n".into()));
        assert_eq!(scat(&["generators", "1"]), (0, "one\nomega(one)\n".into()));
        assert_eq!(scat(&["generators", "1", "--raw"]), (0, "one\nomega(one)\n".into()));
        assert_eq!(scat(&["oracle", "3 2 0 1 1", "5 3 0 1 2 2 1"]), (0, "YES\n".into()));
        assert_eq!(scat(&["oracle", "3 3 0 1 2", "4 2 0 1 1 0"]), (1, "NO\n".into()));
    }

    #[test]
    fn errors() {
        assert_eq!(scat(&["type", "glue("]).0, EXIT_USAGE);
        assert_eq!(scat(&["generators", "w+"]).0, EXIT_USAGE);
        assert_eq!(scat(&["oracle", "2 2 0", "1 1 0"]).0, EXIT_USAGE);
        assert_eq!(scat(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(scat(&["type", "idq"]).0, EXIT_DATA);
        assert_eq!(scat(&["--max-raw", "10", "generators", "2"]).0, EXIT_DATA);
        assert_eq!(scat(&["--help"]).0, 0);
    }

    #[test]
    fn compare_json_and_trace() {
        let (code, out) = scat(&["compare", "one", "omega(one)", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["outcome"], "LE");
        assert!(!v["trace"].as_array().unwrap().is_empty());

        let (code, out) = scat(&["compare", "omega(one)", "one", "--trace"]);
        assert_eq!(code, 1);
        assert!(out.starts_with("NOT_LE\n"));
        assert!(out.lines().count() > 1);
    }

    #[test]
    fn output_reparses() {
        let (_, out) = scat(&["normalize", "glue(empty, pgl{one, one}, max(0))"]);
        let t: Term = out.trim().parse().unwrap();
        assert_eq!(scat(&["normalize", &t.to_string()]).1, out);

        let (code, out) = scat(&["generators", "2", "--classes"]);
        assert_eq!(code, 0);
        for l in out.lines() {
            l.trim().parse::<Term>().unwrap();
        }
        let (_, out) = scat(&["type", "wedge({one}, {max(w)} | {one})"]);
        let body = out.trim().trim_start_matches('(').trim_end_matches(')');
        let (r, _) = body.split_once(", ").unwrap();
        r.parse::<Ordinal>().unwrap();
    }

    #[test]
    fn hasse_formats() {
        let (code, dot) = scat(&["hasse", "1", "--dot"]);
        assert_eq!(code, 0);
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 1);
        let (code, json) = scat(&["hasse", "2", "--centered", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
    }
}
