//! Compositional translations of the match prefix into match-free calculi.
//!
//! Each encoder translates `[a=b]P` by its own clause and every other
//! operator homomorphically. The ambient encoder also maps π channels to
//! message ambients: `c!<y>.P` becomes `new k.(c[<y> | k[]] | open k.P)` and
//! `c(z).P` becomes `open c.(z).P`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_well_formed, Error, Result};
use crate::syntax::{free_names, fresh_name, CalculusId, ChannelSubject, Context, Name, Process, RenamingPolicy};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderId {
    Polyadic,
    Ambients,
    Blocking,
    Selective,
    NaivePix,
}

impl EncoderId {
    pub const ALL: [EncoderId; 5] =
        [EncoderId::Polyadic, EncoderId::Ambients, EncoderId::Blocking, EncoderId::Selective, EncoderId::NaivePix];

    pub const POSITIVE: [EncoderId; 4] =
        [EncoderId::Polyadic, EncoderId::Ambients, EncoderId::Blocking, EncoderId::Selective];

    pub fn tag(self) -> &'static str {
        match self {
            EncoderId::Polyadic => "polyadic",
            EncoderId::Ambients => "ambients",
            EncoderId::Blocking => "blocking",
            EncoderId::Selective => "selective",
            EncoderId::NaivePix => "naive",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "naive_pix" | "naive-pix" => Some(EncoderId::NaivePix),
            _ => Self::ALL.into_iter().find(|e| e.tag() == s),
        }
    }

    pub fn target(self) -> CalculusId {
        match self {
            EncoderId::Polyadic => CalculusId::PiPoly,
            EncoderId::Ambients => CalculusId::Ambients,
            EncoderId::Blocking => CalculusId::PiBlock,
            EncoderId::Selective => CalculusId::PiSelect,
            EncoderId::NaivePix => CalculusId::Pix,
        }
    }
}

impl fmt::Display for EncoderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Encoder {
    pub id: EncoderId,
    pub source: CalculusId,
    pub target: CalculusId,
    pub policy: RenamingPolicy,
    /// Names the translation may use besides policy images.
    pub reserved: BTreeSet<Name>,
}

impl Encoder {
    pub fn new(id: EncoderId) -> Self {
        Encoder {
            id,
            source: CalculusId::Pi,
            target: id.target(),
            policy: RenamingPolicy::identity(),
            reserved: BTreeSet::new(),
        }
    }

    pub fn with_policy(mut self, policy: RenamingPolicy) -> Self {
        self.policy = policy;
        self
    }
}

pub fn list_encoders() -> Vec<Encoder> {
    EncoderId::ALL.into_iter().map(Encoder::new).collect()
}

/// A source operator together with its non-process arguments.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Operator {
    Nil,
    Success,
    Input(ChannelSubject, Name),
    Output(ChannelSubject, Name),
    Tau,
    Match(Name, Name),
    Sum,
    Par,
    Restrict(Name),
    Repl,
}

impl Operator {
    /// The top operator of a π term and its immediate subterms.
    pub fn split(p: &Process) -> Result<(Operator, Vec<&Process>)> {
        use Process::*;
        Ok(match p {
            Nil => (Operator::Nil, vec![]),
            Success => (Operator::Success, vec![]),
            Input(s, x, c) => (Operator::Input(s.clone(), x.clone()), vec![c]),
            Output(s, y, c) => (Operator::Output(s.clone(), y.clone()), vec![c]),
            Tau(c) => (Operator::Tau, vec![c]),
            Match(a, b, c) => (Operator::Match(a.clone(), b.clone()), vec![c]),
            Sum(l, r) => (Operator::Sum, vec![l, r]),
            Par(l, r) => (Operator::Par, vec![l, r]),
            Restrict(z, c) => (Operator::Restrict(z.clone()), vec![c]),
            Repl(c) => (Operator::Repl, vec![c]),
            other => return Err(Error::IllFormed { constructor: other.constructor_name(), calculus: CalculusId::Pi }),
        })
    }
}

struct Fresh {
    avoid: BTreeSet<Name>,
}

impl Fresh {
    fn take(&mut self, hint: &str) -> Name {
        let n = fresh_name(hint, &self.avoid);
        self.avoid.insert(n.clone());
        n
    }
}

fn channel(s: &ChannelSubject) -> Name {
    s.parts()[0].clone()
}

/// The context translating `op` when its operands have free names `free`.
pub fn extract_context(e: &Encoder, op: &Operator, free: &BTreeSet<Name>) -> Context {
    use Process as P;
    let hole = || P::Hole(1);
    let mut avoid = free.clone();
    avoid.extend(e.reserved.iter().cloned());
    if let Operator::Match(a, b) = op {
        avoid.insert(a.clone());
        avoid.insert(b.clone());
    }
    let mut fresh = Fresh { avoid };
    let body = match op {
        Operator::Nil => P::Nil,
        Operator::Success => P::Success,
        Operator::Tau => P::tau(hole()),
        Operator::Sum => P::sum(hole(), P::Hole(2)),
        Operator::Par => P::par(hole(), P::Hole(2)),
        Operator::Restrict(z) => P::restrict(z.clone(), hole()),
        Operator::Repl => P::repl(hole()),
        Operator::Input(s, x) if e.id == EncoderId::Ambients => {
            P::CapOpen(channel(s), Box::new(P::AnonInput(x.clone(), Box::new(hole()))))
        }
        Operator::Output(s, y) if e.id == EncoderId::Ambients => {
            let k = fresh.take("k");
            let message = P::ambient(channel(s), P::par(P::AnonOutput(y.clone()), P::ambient(k.clone(), P::Nil)));
            P::restrict(k.clone(), P::par(message, P::CapOpen(k, Box::new(hole()))))
        }
        Operator::Input(s, x) => P::input(s.clone(), x.clone(), hole()),
        Operator::Output(s, y) => P::output(s.clone(), y.clone(), hole()),
        Operator::Match(a, b) => match_clause(e.id, a, b, &mut fresh),
    };
    Context::new(body).expect("encoder contexts number their holes from 1")
}

fn match_clause(id: EncoderId, a: &Name, b: &Name, fresh: &mut Fresh) -> Process {
    use Process as P;
    let hole = || P::Hole(1);
    let (a, b) = (a.clone(), b.clone());
    match id {
        EncoderId::Polyadic => {
            let (x, y, z) = (fresh.take("x"), fresh.take("y"), fresh.take("z"));
            let send = P::output(ChannelSubject(vec![x.clone(), b]), y, P::Nil);
            let recv = P::input(ChannelSubject(vec![x.clone(), a]), z, hole());
            P::restrict(x, P::par(send, recv))
        }
        EncoderId::Selective => {
            let (x, y) = (fresh.take("x"), fresh.take("y"));
            let send = P::output(x.clone(), a, P::Nil);
            let recv = P::SelectiveInput(x.clone().into(), y, [b].into(), Box::new(hole()));
            P::restrict(x, P::par(send, recv))
        }
        EncoderId::Blocking => {
            let (w, y, z) = (fresh.take("w"), fresh.take("y"), fresh.take("z"));
            let pair = P::par(
                P::output(a.clone(), y.clone(), P::Nil),
                P::input(b.clone(), z.clone(), P::output(w.clone(), y, P::Nil)),
            );
            let blocked = P::block(P::block(pair, a), b);
            P::restrict(w.clone(), P::par(blocked, P::input(w, z, hole())))
        }
        EncoderId::Ambients => {
            let (x, y) = (fresh.take("x"), fresh.take("y"));
            let probe = P::CapOpen(a, Box::new(P::ambient(y.clone(), P::CapOut(x.clone(), Box::new(P::Nil)))));
            let cell = P::ambient(x.clone(), P::par(probe, P::ambient(b, P::Nil)));
            let wait = P::CapOpen(y.clone(), Box::new(P::CapOpen(x.clone(), Box::new(hole()))));
            P::restrict_all([x, y], P::par(cell, wait))
        }
        EncoderId::NaivePix => {
            let (t, z) = (fresh.take("t"), fresh.take("z"));
            P::restrict(t.clone(), P::par(P::output(a, t, P::Nil), P::input(b, z, hole())))
        }
    }
}

/// Translate a π term.
pub fn encode(e: &Encoder, s: &Process) -> Result<Process> {
    ensure_well_formed(s, e.source)?;
    encode_rec(e, s)
}

fn encode_rec(e: &Encoder, s: &Process) -> Result<Process> {
    let (op, kids) = Operator::split(s)?;
    let ctx = extract_context(e, &op, &free_names(s));
    let filled: Vec<Process> = kids.into_iter().map(|k| encode_rec(e, k)).collect::<Result<_>>()?;
    ctx.fill(&filled)
}
