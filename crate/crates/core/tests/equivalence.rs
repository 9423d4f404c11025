use picalc::equivalence::weak_reduction_bisim;
use picalc::semantics::{always_reaches_success, Bounds, Truth};
use picalc::{parse_term, CalculusId};

const B: Bounds = Bounds { max_steps: 12, max_states: 20000, repl_copies: 3 };

fn verdicts(l: &str, r: &str) -> (Truth, Truth, Truth) {
    let (p, q) = (parse_term(l, CalculusId::Pix).unwrap(), parse_term(r, CalculusId::Pix).unwrap());
    let bisim = weak_reduction_bisim(&p, &q, CalculusId::Pix, B).unwrap().verdict.value;
    let a = always_reaches_success(&p, CalculusId::Pix, B).unwrap().value;
    let b = always_reaches_success(&q, CalculusId::Pix, B).unwrap().value;
    (bisim, a, b)
}

#[test]
fn bisimilar_convergent_terms_agree_on_guaranteed_success() {
    for (l, r) in [("tau.ok", "ok"), ("new a.(a!<a>.0 | a(x).ok)", "tau.ok"), ("tau.tau.0", "0")] {
        let (bisim, a, b) = verdicts(l, r);
        assert_eq!(bisim, Truth::Yes, "{l} vs {r}");
        assert_eq!(a, b, "{l} vs {r}");
    }
}

#[test]
fn divergence_separates_guaranteed_success_from_bisimilarity() {
    // No finite maximal execution, so guaranteed success holds vacuously.
    let (bisim, a, b) = verdicts("!tau.0", "0");
    assert_eq!(bisim, Truth::Yes);
    assert_eq!((a, b), (Truth::Yes, Truth::No));
}

#[test]
fn choice_that_can_lose_success_is_distinguished() {
    let (bisim, a, b) = verdicts("tau.ok + tau.0", "tau.ok");
    assert_eq!(bisim, Truth::No);
    assert_eq!((a, b), (Truth::No, Truth::Yes));
}
