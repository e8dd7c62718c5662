//! Acceptance criteria, one pass/fail line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the report.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scat_core::cli;
use scat_core::generators::{classify, cross_level, generator_raw};
use scat_core::oracle::{brute_force_le, image_formula_le, term_of, FiniteFn};
use scat_core::rank::rank;
use scat_core::sample::Sampler;
use scat_core::*;

const SEED: u64 = 20_240_917;

fn t(s: &str) -> Term {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

struct Report {
    lines: Vec<String>,
    failed: usize,
}

impl Report {
    fn run(&mut self, id: u32, name: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let result = body();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        if !ok {
            self.failed += 1;
        }
        let line = format!(
            "[{}] {id}. {name}: {detail} ({:.3}s, limit {:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs_f64()
        );
        println!("{line}");
        self.lines.push(line);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn generator_base_case() -> Result<String, String> {
    let (code, out) = cli::run(["scat", "generators", "1", "--raw"]);
    ensure(code == 0, || format!("exit {code}"))?;
    let got: BTreeSet<Term> = out.lines().map(t).collect();
    let want: BTreeSet<Term> = [Term::One, Term::omega(Term::One)].into();
    ensure(out.lines().count() == 2 && got == want, || format!("got {out:?}"))?;
    Ok("{one, omega(one)}".into())
}

fn centered_level_two() -> Result<String, String> {
    let engine = Engine::default();
    let set = engine.centered_set(&o("2")).map_err(|e| e.to_string())?;
    ensure(set.undecided_pairs.is_empty(), || format!("undecided {:?}", set.undecided_pairs))?;
    let rank_two = set
        .classes
        .iter()
        .filter(|c| rank(&c.representative).ok() == Some(o("2")))
        .count();
    ensure(set.classes.len() == 3 && rank_two == 2, || {
        format!("{} classes, {rank_two} of rank 2", set.classes.len())
    })?;
    Ok("3 classes, 2 of rank 2".into())
}

/// The six generators at `λ+1` and the covering pairs of their diagram.
fn six_set(lambda: &str) -> (Vec<Term>, Vec<(usize, usize)>) {
    let succ = o(lambda).succ().to_string();
    let six = vec![
        t(&format!("max({lambda})")),
        t(&format!("min({succ})")),
        t(&format!("omega(min({succ}))")),
        t(&format!("pgl{{max({lambda})}}")),
        t(&format!("wedge({{max({lambda})}} | {{min({succ})}})")),
        t(&format!("max({succ})")),
    ];
    let edges = vec![(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 5)];
    (six, edges)
}

fn hasse_at_successor_of_limit() -> Result<String, String> {
    for lambda in ["w", "w*2"] {
        let engine = Engine::default();
        let alpha = o(lambda).succ();
        let (six, want) = six_set(lambda);
        let mut terms = cross_level(&alpha);
        terms.extend(generator_raw(&alpha, 100_000).map_err(|e| e.to_string())?);
        terms.extend(six.iter().cloned());

        let (_, undecided) = classify(&engine, &six).map_err(|e| e.to_string())?;
        ensure(undecided.is_empty(), || format!("λ={lambda}: undecided among six: {undecided:?}"))?;

        let h = engine.hasse(&terms).map_err(|e| format!("λ={lambda}: {e}"))?;
        ensure(h.classes.len() == 6, || format!("λ={lambda}: {} classes", h.classes.len()))?;
        let class_of = |x: &Term| h.classes.iter().position(|c| c.members.contains(x));
        let idx: Vec<Option<usize>> = six.iter().map(class_of).collect();
        let distinct: BTreeSet<_> = idx.iter().flatten().collect();
        ensure(distinct.len() == 6, || format!("λ={lambda}: six-set classes {idx:?}"))?;
        let idx: Vec<usize> = idx.into_iter().flatten().collect();
        let got: BTreeSet<(usize, usize)> = h.edges.iter().copied().collect();
        let want: BTreeSet<(usize, usize)> = want.iter().map(|&(a, b)| (idx[a], idx[b])).collect();
        ensure(got == want, || format!("λ={lambda}: edges {:?}", h.edge_terms()))?;
        let pair = [engine.compare(&six[2], &six[3]), engine.compare(&six[3], &six[2])];
        ensure(pair.iter().all(|v| v.is_not_le()), || format!("λ={lambda}: pair not incomparable"))?;
    }
    Ok("6 classes, figure edges, λ ∈ {ω, ω·2}".into())
}

fn simple_chain() -> Result<String, String> {
    for lambda in ["1", "w"] {
        let engine = Engine::default();
        let succ = o(lambda).succ();
        let chain = [
            t(&format!("min({succ})")),
            t(&format!("glue(min({succ}), max({lambda}))")),
            t(&format!("pgl{{max({lambda})}}")),
        ];
        for w in chain.windows(2) {
            let up = engine.compare(&w[0], &w[1]);
            ensure(up.is_le() && up.derivation.is_some(), || format!("{} <= {}: {}", w[0], w[1], up.outcome))?;
            let down = engine.compare(&w[1], &w[0]);
            ensure(down.is_not_le(), || format!("{} <= {}: {}", w[1], w[0], down.outcome))?;
        }
    }
    Ok("strict at λ ∈ {1, ω}".into())
}

/// `ω²·a + ω·b + c` with `a < 3`.
fn small_ordinal(rng: &mut ChaCha8Rng) -> (u64, u64, u64) {
    (rng.gen_range(0..3), rng.gen_range(0..6), rng.gen_range(0..6))
}

fn ordinal_text((a, b, c): (u64, u64, u64)) -> String {
    format!("w^2*{a}+w*{b}+{c}")
}

fn compact_fragment() -> Result<String, String> {
    let engine = Engine::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = Vec::new();
    let mut le_count = 0;
    for _ in 0..1000 {
        let (x, y) = (small_ordinal(&mut rng), small_ordinal(&mut rng));
        let (m, n) = (rng.gen_range(1..=9usize), rng.gen_range(1..=9usize));
        let f = Term::copies(m, &Term::MinFn(o(&ordinal_text(x)).succ()));
        let g = Term::copies(n, &Term::MinFn(o(&ordinal_text(y)).succ()));
        // (α+1, m) vs (β+1, n), with α+1 encoded by its digits
        let want = (x.0, x.1, x.2 + 1, m) <= (y.0, y.1, y.2 + 1, n);
        let got = engine.le_compact(&f, &g).map_err(|e| e.to_string())?;
        if got != want {
            mismatches.push(format!("{f} vs {g}"));
        }
        if got {
            le_count += 1;
            if !engine.compare(&f, &g).is_le() {
                mismatches.push(format!("compare {f} vs {g}"));
            }
        }
    }
    ensure(mismatches.is_empty(), || format!("{} mismatches, first {}", mismatches.len(), mismatches[0]))?;
    Ok(format!("1000 pairs, {le_count} LE, 0 mismatches"))
}

fn oracle_equivalence() -> Result<String, String> {
    let engine = Engine::default();
    let fns: Vec<FiniteFn> = (1..=4)
        .flat_map(|a| (1..=4).flat_map(move |b| FiniteFn::all(a, b)))
        .collect();
    let mut pairs = 0usize;
    let mut bad = Vec::new();
    for f in &fns {
        let tf = term_of(f);
        for g in &fns {
            pairs += 1;
            let brute = brute_force_le(f, g);
            if brute != image_formula_le(f, g) {
                bad.push(format!("formula {f} | {g}"));
            }
            let v = engine.compare(&tf, &term_of(g));
            let want = if brute { Outcome::Le } else { Outcome::NotLe };
            if v.outcome != want {
                bad.push(format!("compare {f} | {g}: {}", v.outcome));
            }
        }
    }
    ensure(bad.is_empty(), || format!("{} mismatches, first {}", bad.len(), bad[0]))?;
    Ok(format!("{} functions, {pairs} pairs", fns.len()))
}

fn antichain() -> Result<String, String> {
    let engine = Engine::default();
    let a = t("pgl{pgl{max(w)}}");
    let b = t("pgl{omega(min(w+1))}");
    let terms: Vec<Term> = (0..=3)
        .map(|k| Term::glue(std::iter::repeat_n(a.clone(), k).chain(std::iter::repeat_n(b.clone(), 3 - k))))
        .collect();
    let mut verdicts = 0;
    for (i, f) in terms.iter().enumerate() {
        for (j, g) in terms.iter().enumerate() {
            if i == j {
                continue;
            }
            let v = engine.compare(f, g);
            let top = v.rules().first().copied().unwrap_or("-");
            ensure(v.is_not_le() && matches!(top, "N-capacity" | "N-lex"), || {
                format!("{f} vs {g}: {} via {top}", v.outcome)
            })?;
            verdicts += 1;
        }
    }
    ensure(verdicts == 12, || format!("{verdicts} verdicts"))?;
    Ok("12 NOT_LE".into())
}

fn generator_count() -> Result<String, String> {
    // |C_1| = 1, |C_2| = |C_1| + (2^(2|C_1|) - 1), |G_1| = 2
    let c2 = 1 + ((1u64 << 2) - 1);
    let vertical_sets = (1u64 << 2) - 1;
    let families = (1u64 << vertical_sets) - 1;
    let diagonals = 1u64 << c2;
    let want = c2 + c2 + families * diagonals;
    let raw = generator_raw(&o("2"), 100_000).map_err(|e| e.to_string())?;
    let distinct: BTreeSet<&Term> = raw.iter().collect();
    ensure(want == 120 && raw.len() == 120 && distinct.len() == 120, || {
        format!("{} raw, {} distinct, expected {want}", raw.len(), distinct.len())
    })?;
    Ok("120 raw terms".into())
}

fn property_suites() -> Result<String, String> {
    const N: usize = 10_000;
    let engine = Engine::default();
    let mut s = Sampler::new(SEED, 5);
    let terms: Vec<Term> = (0..N).map(|_| s.term()).collect();
    ensure(terms.iter().all(|x| x.depth() <= 5), || "depth above 5".into())?;
    let at = |i: usize| &terms[i % N];

    for x in &terms {
        let nf = engine.normalize(x).map_err(|e| format!("(a) {x}: {e}"))?;
        let again = engine.normalize(&nf).map_err(|e| format!("(a) {nf}: {e}"))?;
        ensure(again == nf, || format!("(a) not idempotent on {x}"))?;
        ensure(cb_type(&nf) == cb_type(x), || format!("(a) type changed on {x}"))?;
    }

    let mut le = 0;
    let mut gap = 0;
    for i in 0..N {
        let (f, g, h) = (at(i), at(7 * i + 3), at(13 * i + 5));
        let fg = engine.compare(f, g);
        if fg.is_le() {
            le += 1;
            let (tf, tg) = (cb_type(f).map_err(|e| e.to_string())?, cb_type(g).map_err(|e| e.to_string())?);
            ensure(tf <= tg, || format!("(b) {f} <= {g} against types {tf} > {tg}"))?;
            ensure(!(engine.compare(g, h).is_le() && engine.compare(f, h).is_not_le()), || {
                format!("(c) {f} <= {g} <= {h} but NOT_LE")
            })?;
        }
        let (rf, rg) = (rank(f).map_err(|e| e.to_string())?, rank(g).map_err(|e| e.to_string())?);
        if rf.double() < rg {
            gap += 1;
            ensure(fg.is_le(), || format!("(d) {f} vs {g}: {}", fg.outcome))?;
        }
    }
    ensure(gap > 0, || "(d) vacuous".into())?;

    for _ in 0..1000 {
        let members = s.member_set(3);
        let glue = Term::glue(members.iter().cloned());
        let pointed = Term::PglSet(members);
        ensure(engine.compare(&glue, &pointed).is_le(), || format!("(e) {glue} vs {pointed}"))?;
    }
    Ok(format!("{N} terms, {le} LE pairs, {gap} rank-gap pairs, 1000 member sets"))
}

#[test]
fn acceptance() {
    let mut r = Report { lines: Vec::new(), failed: 0 };
    let secs = Duration::from_secs_f64;
    r.run(1, "generator base case", secs(0.1), generator_base_case);
    r.run(2, "centered functions at level 2", secs(1.0), centered_level_two);
    r.run(3, "Hasse diagram at λ+1", secs(5.0), hasse_at_successor_of_limit);
    r.run(4, "strict simple chain", secs(1.0), simple_chain);
    r.run(5, "compact fragment", secs(2.0), compact_fragment);
    r.run(6, "finite oracle equivalence", secs(10.0), oracle_equivalence);
    r.run(7, "four-term antichain", secs(2.0), antichain);
    r.run(8, "generator count at level 2", secs(1.0), generator_count);
    r.run(9, "property suites", secs(60.0), property_suites);
    assert_eq!(r.failed, 0, "failed criteria:\n{}", r.lines.join("\n"));
}
