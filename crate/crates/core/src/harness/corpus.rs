//! Test corpora: seeded random terms, the pinned terms and substitution samples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{CalculusId, ChannelSubject, Name, Process, Substitution};
use crate::text::parse_process;

pub const NAME_POOL: [&str; 4] = ["a", "b", "c", "x"];

pub const PINNED: [&str; 10] = [
    "x!<a>.0 | x(b).[a=b]ok",
    "new a.(x!<a>.0) | x(b).[a=b]ok",
    "x!<a>.0 | new a.(x(b).[a=b]ok)",
    "new a.(x!<a>.0 | x(b).[a=b]ok)",
    "[a=b]ok | [b=a]ok",
    "[a=b]ok",
    "[a=b]0",
    "[a=a]ok",
    "[a=b](ok | c!<c>.0)",
    "x!<b>.0 | x(b).[a=b]ok",
];

pub fn pinned_terms() -> Vec<Process> {
    PINNED.iter().map(|s| parse_process(s).expect("pinned terms parse")).collect()
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_DEPTH: usize = 4;
pub const DEFAULT_COUNT: usize = 30;

/// Pinned terms followed by the seeded π terms.
pub fn default_corpus() -> Vec<Process> {
    let mut out = pinned_terms();
    out.extend(gen_terms(DEFAULT_SEED, DEFAULT_DEPTH, CalculusId::Pi, DEFAULT_COUNT));
    out
}

/// `{b/a}`, `{a/b}`, `{c/a, c/b}`, `id` and the cycle `{b/a, c/b, a/c}`.
pub fn default_substitutions() -> Vec<Substitution> {
    let n = Name::new;
    vec![
        Substitution::single(n("a"), n("b")),
        Substitution::single(n("b"), n("a")),
        Substitution::from_pairs([(n("a"), n("c")), (n("b"), n("c"))]),
        Substitution::identity(),
        Substitution::from_pairs([(n("a"), n("b")), (n("b"), n("c")), (n("c"), n("a"))]),
    ]
}

/// Deterministic random terms of `calc` of height at most `max_depth`.
pub fn gen_terms(seed: u64, max_depth: usize, calc: CalculusId, count: usize) -> Vec<Process> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), calc, next_binder: 0 };
    (0..count).map(|_| g.term(max_depth.max(1), &mut Vec::new())).collect()
}

#[derive(Clone, Copy)]
enum Shape {
    Leaf,
    Tau,
    Output,
    Input,
    Match,
    Sum,
    Par,
    Restrict,
    Repl,
    Block,
    Selective,
    Ambient,
    Cap,
    AnonIn,
    AnonOut,
}

struct Gen {
    rng: ChaCha8Rng,
    calc: CalculusId,
    next_binder: u32,
}

impl Gen {
    fn shapes(&self) -> Vec<(Shape, u32)> {
        use CalculusId as C;
        use Shape::*;
        let mut s = vec![(Leaf, 3), (Tau, 2), (Sum, 2), (Par, 3), (Restrict, 2), (Repl, 1)];
        match self.calc {
            C::Ambients => s.extend([(Ambient, 3), (Cap, 3), (AnonIn, 2), (AnonOut, 2)]),
            _ => s.extend([(Output, 3), (Input, 3)]),
        }
        match self.calc {
            C::Pi => s.push((Match, 5)),
            C::PiBlock => s.push((Block, 2)),
            C::PiSelect => s.push((Selective, 2)),
            _ => {}
        }
        s
    }

    fn binder(&mut self) -> Name {
        self.next_binder += 1;
        Name::indexed("z", self.next_binder)
    }

    fn name(&mut self, scope: &[Name]) -> Name {
        let k = self.rng.gen_range(0..NAME_POOL.len() + scope.len());
        if k < NAME_POOL.len() {
            Name::new(NAME_POOL[k])
        } else {
            scope[k - NAME_POOL.len()].clone()
        }
    }

    fn subject(&mut self, scope: &[Name]) -> ChannelSubject {
        let len = if self.calc == CalculusId::PiPoly { self.rng.gen_range(1..=2) } else { 1 };
        ChannelSubject((0..len).map(|_| self.name(scope)).collect())
    }

    fn leaf(&mut self) -> Process {
        if self.rng.gen_bool(0.5) {
            Process::Nil
        } else {
            Process::Success
        }
    }

    fn under(&mut self, depth: usize, scope: &mut Vec<Name>, x: &Name) -> Process {
        scope.push(x.clone());
        let body = self.term(depth, scope);
        scope.pop();
        body
    }

    fn term(&mut self, depth: usize, scope: &mut Vec<Name>) -> Process {
        if depth == 0 {
            return self.leaf();
        }
        let shapes = self.shapes();
        let shape = shapes.choose_weighted(&mut self.rng, |s| s.1).expect("non-empty weights").0;
        let d = depth - 1;
        match shape {
            Shape::Leaf => self.leaf(),
            Shape::Tau => Process::tau(self.term(d, scope)),
            Shape::Output => {
                let (s, y) = (self.subject(scope), self.name(scope));
                Process::output(s, y, self.term(d, scope))
            }
            Shape::Input => {
                let s = self.subject(scope);
                let x = self.binder();
                let body = self.under(d, scope, &x);
                Process::input(s, x, body)
            }
            Shape::Selective => {
                let s = self.subject(scope);
                let allowed = (0..self.rng.gen_range(1..=2)).map(|_| self.name(scope)).collect();
                let x = self.binder();
                let body = self.under(d, scope, &x);
                Process::SelectiveInput(s, x, allowed, Box::new(body))
            }
            Shape::Match => {
                let a = self.name(scope);
                let b = if self.rng.gen_bool(0.3) { a.clone() } else { self.name(scope) };
                Process::matching(a, b, self.term(d, scope))
            }
            Shape::Sum => Process::sum(self.term(d, scope), self.term(d, scope)),
            Shape::Par => Process::par(self.term(d, scope), self.term(d, scope)),
            Shape::Restrict => {
                let x = self.binder();
                let body = self.under(d, scope, &x);
                Process::restrict(x, body)
            }
            Shape::Repl => Process::repl(self.term(d, scope)),
            Shape::Block => {
                let n = self.name(scope);
                Process::block(self.term(d, scope), n)
            }
            Shape::Ambient => {
                let n = self.name(scope);
                Process::ambient(n, self.term(d, scope))
            }
            Shape::Cap => {
                let n = self.name(scope);
                let cont = Box::new(self.term(d, scope));
                match self.rng.gen_range(0..3) {
                    0 => Process::CapIn(n, cont),
                    1 => Process::CapOut(n, cont),
                    _ => Process::CapOpen(n, cont),
                }
            }
            Shape::AnonIn => {
                let x = self.binder();
                let body = self.under(d, scope, &x);
                Process::AnonInput(x, Box::new(body))
            }
            Shape::AnonOut => Process::AnonOutput(self.name(scope)),
        }
    }
}
