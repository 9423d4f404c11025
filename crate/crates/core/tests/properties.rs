use std::collections::BTreeSet;

use proptest::prelude::*;

use picalc::encoders::{encode, Encoder, EncoderId};
use picalc::harness::{check_compositionality, find_enabling_comm_witness, gen_terms, NAME_POOL};
use picalc::semantics::{
    always_reaches_success, canonical, explore, has_divergence, reaches_success, successors, Bounds, Truth,
};
use picalc::{
    alpha_eq, apply_subst, format_term, free_names, is_successful, lift_substitution, parse_term, ung_sub, well_formed,
    CalculusId, Name, Process, RenamingPolicy, Substitution,
};

const MATCH_FREE: [CalculusId; 5] =
    [CalculusId::Pix, CalculusId::PiPoly, CalculusId::Ambients, CalculusId::PiBlock, CalculusId::PiSelect];

fn term(calc: CalculusId, depth: usize) -> impl Strategy<Value = Process> {
    any::<u64>().prop_map(move |seed| gen_terms(seed, depth, calc, 1).remove(0))
}

fn pool_name() -> impl Strategy<Value = Name> {
    prop::sample::select(NAME_POOL.to_vec()).prop_map(Name::new)
}

fn substitution() -> impl Strategy<Value = Substitution> {
    prop::collection::vec((pool_name(), pool_name()), 0..3).prop_map(Substitution::from_pairs)
}

// A match sitting unguarded in a choice operand: its translation commits the
// choice with an internal step the source never takes.
fn match_under_choice(p: &Process) -> bool {
    fn unguarded_match(p: &Process) -> bool {
        match p {
            Process::Match(..) => true,
            Process::Sum(l, r) | Process::Par(l, r) => unguarded_match(l) || unguarded_match(r),
            Process::Restrict(_, q) | Process::Repl(q) => unguarded_match(q),
            _ => false,
        }
    }
    match p {
        Process::Sum(l, r) => {
            unguarded_match(l) || unguarded_match(r) || match_under_choice(l) || match_under_choice(r)
        }
        Process::Par(l, r) => match_under_choice(l) || match_under_choice(r),
        Process::Input(_, _, q)
        | Process::SelectiveInput(_, _, _, q)
        | Process::Output(_, _, q)
        | Process::Tau(q)
        | Process::Match(_, _, q)
        | Process::Restrict(_, q)
        | Process::Repl(q)
        | Process::Ambient(_, q)
        | Process::CapIn(_, q)
        | Process::CapOut(_, q)
        | Process::CapOpen(_, q)
        | Process::AnonInput(_, q)
        | Process::Block(q, _) => match_under_choice(q),
        Process::Nil | Process::Success | Process::AnonOutput(_) | Process::Hole(_) => false,
    }
}

fn small(max_steps: usize) -> Bounds {
    Bounds { max_steps, max_states: 2000, repl_copies: 2 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip(calc in prop::sample::select(CalculusId::ALL.to_vec()), seed in any::<u64>()) {
        let p = gen_terms(seed, 4, calc, 1).remove(0);
        let q = parse_term(&format_term(&p), calc).unwrap();
        prop_assert!(alpha_eq(&p, &q), "{p} vs {q}");
    }

    #[test]
    fn alpha_eq_is_an_equivalence(p in term(CalculusId::Pi, 4), q in term(CalculusId::Pi, 4)) {
        let p2 = picalc::freshen_binders(&p);
        prop_assert!(alpha_eq(&p, &p));
        prop_assert!(alpha_eq(&p, &p2) && alpha_eq(&p2, &p));
        prop_assert_eq!(alpha_eq(&p, &q), alpha_eq(&q, &p));
        prop_assert_eq!(alpha_eq(&p2, &q), alpha_eq(&p, &q));
    }

    #[test]
    fn free_names_commute_with_substitution(p in term(CalculusId::Pi, 4), sigma in substitution()) {
        let expected: BTreeSet<Name> = free_names(&p).iter().map(|n| sigma.get(n).clone()).collect();
        prop_assert_eq!(free_names(&apply_subst(&sigma, &p)), expected);
    }

    #[test]
    fn ung_sub_is_transitive(p in term(CalculusId::Pi, 4)) {
        let outer = ung_sub(&p);
        for q in &outer {
            prop_assert!(ung_sub(q).is_subset(&outer), "{q} in {p}");
        }
    }

    #[test]
    fn success_is_substitution_invariant_without_match(
        calc in prop::sample::select(MATCH_FREE.to_vec()),
        seed in any::<u64>(),
        sigma in substitution(),
    ) {
        let p = gen_terms(seed, 4, calc, 1).remove(0);
        prop_assert_eq!(is_successful(&apply_subst(&sigma, &p)), is_successful(&p));
    }

    #[test]
    fn success_is_preserved_forward_with_match(p in term(CalculusId::Pi, 4), sigma in substitution()) {
        if is_successful(&p) {
            prop_assert!(is_successful(&apply_subst(&sigma, &p)));
        }
    }

    #[test]
    fn canonicalization_is_idempotent_and_alpha_invariant(p in term(CalculusId::Pi, 4)) {
        let c = canonical(&p);
        prop_assert_eq!(canonical(&c), c.clone());
        prop_assert_eq!(canonical(&picalc::freshen_binders(&p)), c);
    }

    #[test]
    fn steps_survive_substitution(
        calc in prop::sample::select(vec![CalculusId::Pi, CalculusId::Pix, CalculusId::PiPoly, CalculusId::PiSelect, CalculusId::Ambients]),
        seed in any::<u64>(),
        sigma in substitution(),
    ) {
        let p = gen_terms(seed, 3, calc, 1).remove(0);
        let image = explore(&apply_subst(&sigma, &p), calc, small(1)).unwrap();
        for q in successors(&p, calc, 2).unwrap() {
            let target = canonical(&apply_subst(&sigma, &q));
            let found = image.id_of(&target).is_some_and(|i| i != image.root());
            prop_assert!(found || target == image.state(image.root()).clone(), "{p} -> {q} under {sigma}");
        }
    }

    #[test]
    fn verdicts_are_monotone_in_bounds(p in term(CalculusId::Pi, 4)) {
        let (lo, hi) = (small(2), small(8));
        type Check = fn(&Process, CalculusId, Bounds) -> picalc::Result<picalc::semantics::Verdict>;
        let checks: [Check; 3] = [reaches_success, always_reaches_success, has_divergence];
        for check in checks {
            let (a, b) = (check(&p, CalculusId::Pi, lo).unwrap(), check(&p, CalculusId::Pi, hi).unwrap());
            if a.is_definite() {
                prop_assert_eq!(a.value, b.value, "{}", p);
            }
        }
    }

    #[test]
    fn enabled_success_has_a_comm_witness(p in term(CalculusId::Pix, 3), sigma in substitution()) {
        let b = small(12);
        let before = reaches_success(&p, CalculusId::Pix, b).unwrap();
        let after = reaches_success(&apply_subst(&sigma, &p), CalculusId::Pix, b).unwrap();
        if before.is_no() && after.is_yes() {
            let w = find_enabling_comm_witness(&p, &sigma, CalculusId::Pix, b).unwrap().unwrap();
            prop_assert_ne!(&w.input_subject, &w.output_subject);
            prop_assert_eq!(sigma.get(&w.input_subject), sigma.get(&w.output_subject));
            let free = free_names(&p);
            prop_assert!(free.contains(&w.input_subject) && free.contains(&w.output_subject));
        }
    }

    #[test]
    fn encodings_are_well_formed_and_compositional(p in term(CalculusId::Pi, 4)) {
        for id in EncoderId::ALL {
            let e = Encoder::new(id);
            let t = encode(&e, &p).unwrap();
            prop_assert!(well_formed(&t, e.target), "{id:?}: {t}");
            prop_assert!(check_compositionality(&e, &p).unwrap().verdict.is_yes());
        }
    }

    #[test]
    fn guaranteed_success_survives_positive_encodings(p in term(CalculusId::Pi, 3)) {
        let b = small(12);
        if !match_under_choice(&p) && always_reaches_success(&p, CalculusId::Pi, b).unwrap().is_yes() {
            for id in EncoderId::POSITIVE {
                let e = Encoder::new(id);
                let v = always_reaches_success(&encode(&e, &p).unwrap(), e.target, b).unwrap();
                prop_assert_ne!(v.value, Truth::No, "{:?} on {}", id, p);
            }
        }
    }

    #[test]
    fn identity_policy_lifts_to_itself(sigma in substitution()) {
        prop_assert_eq!(lift_substitution(&RenamingPolicy::identity(), &sigma), sigma);
    }
}

#[test]
fn match_breaks_backward_success_invariance() {
    let p = parse_term("[a=b]ok", CalculusId::Pi).unwrap();
    let sigma = Substitution::single(Name::new("a"), Name::new("b"));
    assert!(!is_successful(&p));
    assert!(is_successful(&apply_subst(&sigma, &p)));
}

#[test]
fn match_under_choice_loses_guaranteed_success() {
    let p = parse_term("tau.ok + [x=x]0 + x(z).0", CalculusId::Pi).unwrap();
    assert!(match_under_choice(&p));
    assert!(always_reaches_success(&p, CalculusId::Pi, small(12)).unwrap().is_yes());
    for id in EncoderId::POSITIVE {
        let e = Encoder::new(id);
        let v = always_reaches_success(&encode(&e, &p).unwrap(), e.target, small(12)).unwrap();
        assert!(v.is_no(), "{id:?}");
    }
    assert!(!match_under_choice(&parse_term("tau.ok + a(z).[x=x]0 | [a=b]ok", CalculusId::Pi).unwrap()));
}

#[test]
fn blocking_can_disable_a_step_under_substitution() {
    let p = parse_term("(c!<d>.0)\\a | c(z).ok", CalculusId::PiBlock).unwrap();
    assert_eq!(successors(&p, CalculusId::PiBlock, 2).unwrap().len(), 1);
    let sigma = Substitution::single(Name::new("c"), Name::new("a"));
    assert!(successors(&apply_subst(&sigma, &p), CalculusId::PiBlock, 2).unwrap().is_empty());
}
