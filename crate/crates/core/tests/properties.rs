use std::collections::BTreeSet;

use proptest::prelude::*;

use scat_core::rank::rank;
use scat_core::*;

fn leaf() -> impl Strategy<Value = Term> {
    const MIN_RANKS: [&str; 5] = ["1", "2", "w+1", "w*2+1", "w^2+3"];
    const MAX_RANKS: [&str; 6] = ["0", "1", "3", "w", "w+1", "w^2"];
    prop_oneof![
        Just(Term::Empty),
        Just(Term::One),
        prop::sample::select(&MIN_RANKS[..]).prop_map(|r| Term::MinFn(r.parse().unwrap())),
        prop::sample::select(&MAX_RANKS[..]).prop_map(|r| Term::MaxFn(r.parse().unwrap())),
    ]
}

fn term() -> impl Strategy<Value = Term> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        let set = |lo, hi| prop::collection::btree_set(inner.clone(), lo..=hi);
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Term::glue),
            inner.clone().prop_map(Term::omega),
            set(1, 2).prop_map(Term::PglSet),
            (prop::collection::vec(set(1, 2), 1..=2), set(0, 2)).prop_map(|(vs, d)| {
                let vs: Vec<BTreeSet<Term>> = vs.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
                Term::wedge(vs, d)
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn format_parse_round_trip(t in term()) {
        let back: Term = t.to_string().parse().unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn normalize_idempotent_and_type_preserving(t in term()) {
        let nf = normalize(&t).unwrap();
        prop_assert_eq!(normalize(&nf).unwrap(), nf.clone());
        prop_assert_eq!(cb_type(&nf), cb_type(&t));
    }

    #[test]
    fn compare_is_reflexive(t in term()) {
        prop_assert!(compare(&t, &t).is_le());
    }

    #[test]
    fn le_respects_types(f in term(), g in term()) {
        if compare(&f, &g).is_le() {
            prop_assert!(cb_type(&f).unwrap() <= cb_type(&g).unwrap());
        }
    }

    #[test]
    fn outcome_invariant_under_normalization(f in term(), g in term()) {
        let (nf, ng) = (normalize(&f).unwrap(), normalize(&g).unwrap());
        prop_assert_eq!(compare(&f, &g).outcome, compare(&nf, &ng).outcome);
    }

    #[test]
    fn constructions_are_upper_bounds(f in term(), g in term()) {
        prop_assert!(compare(&f, &Term::glue([f.clone(), g.clone()])).is_le());
        prop_assert!(compare(&f, &Term::omega(f.clone())).is_le());
        let members: BTreeSet<Term> = [f.clone(), g.clone()].into();
        prop_assert!(compare(&Term::glue(members.iter().cloned()), &Term::PglSet(members)).is_le());
    }

    #[test]
    fn rank_of_constructions(f in term(), g in term()) {
        let (rf, rg) = (rank(&f).unwrap(), rank(&g).unwrap());
        prop_assert_eq!(rank(&Term::glue([f.clone(), g.clone()])).unwrap(), rf.clone().max(rg));
        prop_assert_eq!(rank(&Term::omega(f.clone())).unwrap(), rf.clone());
        if f != Term::Empty {
            prop_assert_eq!(rank(&Term::PglSet([f].into())).unwrap(), rf.succ());
        }
    }

    #[test]
    fn no_transitivity_violations(f in term(), g in term(), h in term()) {
        if compare(&f, &g).is_le() && compare(&g, &h).is_le() {
            prop_assert!(!compare(&f, &h).is_not_le());
        }
    }
}
