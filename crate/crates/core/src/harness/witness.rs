//! Locating the communication a substitution enables.

use crate::error::{ensure_well_formed, Error, Result};
use crate::semantics::{communication_pairs, explore, reaches_success_in, Bounds, Execution};
use crate::syntax::{apply_subst, free_names, CalculusId, Name, Process, Substitution};

/// An unguarded input on `input_subject` facing an output on
/// `output_subject`, reachable from the tested term along `trace`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CommWitness {
    pub derivative: Process,
    pub input_subject: Name,
    pub output_subject: Name,
    pub trace: Execution,
}

/// The first derivative of `p`, in breadth-first order, with distinct free
/// subjects `a` and `b` facing each other such that `σ(a) = σ(b)`.
///
/// Requires `p` not to reach success while `σ(p)` does, both definitely.
pub fn find_enabling_comm_witness(
    p: &Process,
    sigma: &Substitution,
    calc: CalculusId,
    bounds: Bounds,
) -> Result<Option<CommWitness>> {
    ensure_well_formed(p, calc)?;
    match calc {
        CalculusId::Pi => return Err(Error::Precondition("the calculus must be match-free".into())),
        CalculusId::Ambients => return Err(Error::Precondition("ambients have no channel subjects to unify".into())),
        _ => {}
    }
    let g = explore(p, calc, bounds)?;
    let before = reaches_success_in(&g, g.root());
    let image = explore(&apply_subst(sigma, p), calc, bounds)?;
    let after = reaches_success_in(&image, image.root());
    if !before.is_no() || !after.is_yes() {
        return Err(Error::Precondition(format!(
            "need a term that does not reach success whose image does; got {before} and {after}"
        )));
    }
    let free = free_names(p);
    for i in g.reachable(g.root()) {
        for (input, output) in communication_pairs(g.state(i), bounds.repl_copies) {
            if input.len() != output.len() || input == output {
                continue;
            }
            if input.map(|n| sigma.get(n).clone()) != output.map(|n| sigma.get(n).clone()) {
                continue;
            }
            let Some((a, b)) = input.parts().iter().zip(output.parts()).find(|(a, b)| a != b) else {
                continue;
            };
            if !free.contains(a) || !free.contains(b) {
                continue;
            }
            let path = g.path_from(g.root(), |k| k == i).expect("reachable state has a path");
            return Ok(Some(CommWitness {
                derivative: g.state(i).clone(),
                input_subject: a.clone(),
                output_subject: b.clone(),
                trace: g.execution(&path),
            }));
        }
    }
    Err(Error::Inconsistency(format!("no enabling communication found for {p} under {sigma}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_process;

    const B: Bounds = Bounds { max_steps: 12, max_states: 20000, repl_copies: 3 };

    fn ba() -> Substitution {
        Substitution::single(Name::new("a"), Name::new("b"))
    }

    fn find(t: &str) -> Result<Option<CommWitness>> {
        find_enabling_comm_witness(&parse_process(t).unwrap(), &ba(), CalculusId::Pix, B)
    }

    #[test]
    fn at_root() {
        let w = find("a(y).ok | b!<t>.0").unwrap().unwrap();
        assert_eq!((w.input_subject.to_string(), w.output_subject.to_string()), ("a".into(), "b".into()));
        assert_eq!(w.trace.steps(), 0);
    }

    #[test]
    fn after_tau() {
        let w = find("tau.(a(y).ok) | b!<t>.0").unwrap().unwrap();
        assert_eq!(w.input_subject, Name::new("a"));
        assert_eq!(w.output_subject, Name::new("b"));
        assert_eq!(w.trace.steps(), 1);
    }

    #[test]
    fn successful_term_is_rejected() {
        assert!(matches!(find("ok"), Err(Error::Precondition(_))));
    }

    #[test]
    fn pi_is_rejected() {
        let r = find_enabling_comm_witness(&parse_process("0").unwrap(), &ba(), CalculusId::Pi, B);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn polyadic_subjects() {
        let p = parse_process("(x*a)(y).ok | (x*b)!<t>.0").unwrap();
        let w = find_enabling_comm_witness(&p, &ba(), CalculusId::PiPoly, B).unwrap().unwrap();
        assert_eq!(w.input_subject, Name::new("a"));
    }
}
