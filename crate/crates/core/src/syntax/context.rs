use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::process::{fill_holes, Process};

/// A process with numbered holes `[·]1 .. [·]k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Context {
    body: Process,
    arity: usize,
}

impl Context {
    /// Hole ordinals must be exactly `1..=k` for some `k`.
    pub fn new(body: Process) -> Result<Self> {
        let mut ords = BTreeSet::new();
        body.hole_ordinals(&mut ords);
        let arity = ords.len();
        if ords.iter().copied().ne(1..=arity) {
            return Err(Error::Context(format!("hole ordinals {ords:?} are not 1..{arity}")));
        }
        Ok(Context { body, arity })
    }

    pub fn body(&self) -> &Process {
        &self.body
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn fill(&self, fills: &[Process]) -> Result<Process> {
        if fills.len() != self.arity {
            return Err(Error::Context(format!("context of arity {} filled with {} terms", self.arity, fills.len())));
        }
        Ok(fill_holes(&self.body, fills))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::process::ung_sub;

    #[test]
    fn ordinals_must_be_contiguous() {
        assert!(Context::new(Process::par(Process::Hole(1), Process::Hole(3))).is_err());
        let c = Context::new(Process::par(Process::Hole(1), Process::Hole(2))).unwrap();
        assert_eq!(c.arity(), 2);
        let filled = c.fill(&[Process::Success, Process::Nil]).unwrap();
        assert_eq!(filled, Process::par(Process::Success, Process::Nil));
        assert!(c.fill(&[Process::Nil]).is_err());
    }

    #[test]
    fn hole_is_its_own_unguarded_subterm() {
        assert_eq!(ung_sub(&Process::Hole(1)), [Process::Hole(1)].into());
        let guarded = Process::tau(Process::Hole(1));
        assert!(!ung_sub(&guarded).contains(&Process::Hole(1)));
    }
}
