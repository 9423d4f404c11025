use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::name::Name;

/// Composite channel subject. Length 1 everywhere except polyadic synchronisation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ChannelSubject(pub Vec<Name>);

impl ChannelSubject {
    pub fn single(n: Name) -> Self {
        ChannelSubject(vec![n])
    }

    pub fn parts(&self) -> &[Name] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, n: &Name) -> bool {
        self.0.contains(n)
    }

    pub fn map(&self, f: impl Fn(&Name) -> Name) -> Self {
        ChannelSubject(self.0.iter().map(f).collect())
    }
}

impl From<Name> for ChannelSubject {
    fn from(n: Name) -> Self {
        ChannelSubject::single(n)
    }
}

/// The calculi handled by the workbench.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum CalculusId {
    /// Full pi-calculus with match.
    Pi,
    /// Match-free fragment.
    Pix,
    /// Polyadic synchronisation.
    PiPoly,
    /// Mobile ambients.
    Ambients,
    /// Pi with the blocking operator.
    PiBlock,
    /// Pi with selective input.
    PiSelect,
}

impl CalculusId {
    pub const ALL: [CalculusId; 6] = [
        CalculusId::Pi,
        CalculusId::Pix,
        CalculusId::PiPoly,
        CalculusId::Ambients,
        CalculusId::PiBlock,
        CalculusId::PiSelect,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            CalculusId::Pi => "pi",
            CalculusId::Pix => "pix",
            CalculusId::PiPoly => "poly",
            CalculusId::Ambients => "ambients",
            CalculusId::PiBlock => "block",
            CalculusId::PiSelect => "select",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        CalculusId::ALL.into_iter().find(|c| c.tag() == s)
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Unified process syntax for all six calculi. Which constructors are legal
/// in which calculus is decided by [`well_formed`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Process {
    Nil,
    Success,
    Input(ChannelSubject, Name, Box<Process>),
    SelectiveInput(ChannelSubject, Name, BTreeSet<Name>, Box<Process>),
    Output(ChannelSubject, Name, Box<Process>),
    Tau(Box<Process>),
    Match(Name, Name, Box<Process>),
    Sum(Box<Process>, Box<Process>),
    Par(Box<Process>, Box<Process>),
    Restrict(Name, Box<Process>),
    Repl(Box<Process>),
    Ambient(Name, Box<Process>),
    CapIn(Name, Box<Process>),
    CapOut(Name, Box<Process>),
    CapOpen(Name, Box<Process>),
    AnonInput(Name, Box<Process>),
    AnonOutput(Name),
    Block(Box<Process>, Name),
    Hole(usize),
}

use Process::*;

// Shorthand constructors. They keep test fixtures and encoders readable.
impl Process {
    pub fn input(subject: impl Into<ChannelSubject>, param: Name, cont: Process) -> Self {
        Input(subject.into(), param, Box::new(cont))
    }

    pub fn output(subject: impl Into<ChannelSubject>, object: Name, cont: Process) -> Self {
        Output(subject.into(), object, Box::new(cont))
    }

    pub fn tau(cont: Process) -> Self {
        Tau(Box::new(cont))
    }

    pub fn matching(a: Name, b: Name, cont: Process) -> Self {
        Match(a, b, Box::new(cont))
    }

    pub fn sum(l: Process, r: Process) -> Self {
        Sum(Box::new(l), Box::new(r))
    }

    pub fn par(l: Process, r: Process) -> Self {
        Par(Box::new(l), Box::new(r))
    }

    pub fn restrict(z: Name, body: Process) -> Self {
        Restrict(z, Box::new(body))
    }

    pub fn restrict_all(binders: impl IntoIterator<Item = Name>, body: Process) -> Self {
        let binders: Vec<Name> = binders.into_iter().collect();
        binders.into_iter().rev().fold(body, |acc, z| Process::restrict(z, acc))
    }

    pub fn repl(body: Process) -> Self {
        Repl(Box::new(body))
    }

    pub fn ambient(n: Name, body: Process) -> Self {
        Ambient(n, Box::new(body))
    }

    pub fn block(body: Process, n: Name) -> Self {
        Block(Box::new(body), n)
    }

    /// Left-nested parallel composition; `0` for an empty list.
    pub fn par_all(items: impl IntoIterator<Item = Process>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Nil,
            Some(first) => it.fold(first, Process::par),
        }
    }

    /// Left-nested choice; `0` for an empty list.
    pub fn sum_all(items: impl IntoIterator<Item = Process>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Nil,
            Some(first) => it.fold(first, Process::sum),
        }
    }

    pub fn constructor_name(&self) -> &'static str {
        match self {
            Nil => "nil",
            Success => "success",
            Input(..) => "input",
            SelectiveInput(..) => "selective input",
            Output(..) => "output",
            Tau(..) => "tau",
            Match(..) => "match",
            Sum(..) => "sum",
            Par(..) => "parallel",
            Restrict(..) => "restriction",
            Repl(..) => "replication",
            Ambient(..) => "ambient",
            CapIn(..) => "in capability",
            CapOut(..) => "out capability",
            CapOpen(..) => "open capability",
            AnonInput(..) => "anonymous input",
            AnonOutput(..) => "anonymous output",
            Block(..) => "blocking",
            Hole(..) => "hole",
        }
    }

    pub fn children(&self) -> Vec<&Process> {
        match self {
            Nil | Success | AnonOutput(_) | Hole(_) => vec![],
            Input(_, _, c)
            | SelectiveInput(_, _, _, c)
            | Output(_, _, c)
            | Tau(c)
            | Match(_, _, c)
            | Restrict(_, c)
            | Repl(c)
            | Ambient(_, c)
            | CapIn(_, c)
            | CapOut(_, c)
            | CapOpen(_, c)
            | AnonInput(_, c)
            | Block(c, _) => vec![c],
            Sum(l, r) | Par(l, r) => vec![l, r],
        }
    }

    /// Nesting height, counting `0` and `ok` as height 0 but reporting at least 1.
    pub fn depth(&self) -> usize {
        fn height(p: &Process) -> usize {
            match p {
                Nil | Success => 0,
                _ => 1 + p.children().into_iter().map(height).max().unwrap_or(0),
            }
        }
        height(self).max(1)
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Process::size).sum::<usize>()
    }

    pub fn contains_hole(&self) -> bool {
        matches!(self, Hole(_)) || self.children().into_iter().any(Process::contains_hole)
    }

    pub fn hole_ordinals(&self, acc: &mut BTreeSet<usize>) {
        if let Hole(i) = self {
            acc.insert(*i);
        }
        for c in self.children() {
            c.hole_ordinals(acc);
        }
    }
}

/// Does `calc` admit every constructor in `p` (and its subject lengths)?
pub fn well_formed(p: &Process, calc: CalculusId) -> bool {
    first_ill_formed(p, calc).is_none()
}

/// The first constructor rejected by `calc`, in pre-order.
pub fn first_ill_formed(p: &Process, calc: CalculusId) -> Option<&'static str> {
    use CalculusId as C;
    let pi_core = |p: &Process| {
        matches!(p, Nil | Success | Input(..) | Output(..) | Tau(..) | Sum(..) | Par(..) | Restrict(..) | Repl(..))
    };
    let ok_here = match calc {
        C::Pi => pi_core(p) || matches!(p, Match(..)),
        C::Pix | C::PiPoly => pi_core(p),
        C::PiBlock => pi_core(p) || matches!(p, Block(..)),
        C::PiSelect => pi_core(p) || matches!(p, SelectiveInput(..)),
        C::Ambients => matches!(
            p,
            Nil | Success
                | Par(..)
                | Restrict(..)
                | Repl(..)
                | Ambient(..)
                | CapIn(..)
                | CapOut(..)
                | CapOpen(..)
                | AnonInput(..)
                | AnonOutput(..)
                | Sum(..)
                | Tau(..)
        ),
    };
    if !ok_here {
        return Some(p.constructor_name());
    }
    if let Input(s, ..) | Output(s, ..) | SelectiveInput(s, ..) = p {
        let len_ok = if calc == C::PiPoly { !s.is_empty() } else { s.len() == 1 };
        if !len_ok {
            return Some("composite subject");
        }
    }
    p.children().into_iter().find_map(|c| first_ill_formed(c, calc))
}

/// Free names. Restriction and the input forms bind; blocking, ambient and
/// capability names are free.
pub fn free_names(p: &Process) -> BTreeSet<Name> {
    let mut acc = BTreeSet::new();
    collect_free(p, &mut Vec::new(), &mut acc);
    acc
}

fn collect_free(p: &Process, bound: &mut Vec<Name>, acc: &mut BTreeSet<Name>) {
    let mut add = |n: &Name, bound: &Vec<Name>| {
        if !bound.contains(n) {
            acc.insert(n.clone());
        }
    };
    match p {
        Nil | Success | Hole(_) => {}
        Input(s, x, c) | SelectiveInput(s, x, _, c) => {
            for n in s.parts() {
                add(n, bound);
            }
            if let SelectiveInput(_, _, allowed, _) = p {
                for n in allowed {
                    add(n, bound);
                }
            }
            bound.push(x.clone());
            collect_free(c, bound, acc);
            bound.pop();
        }
        Output(s, y, c) => {
            for n in s.parts() {
                add(n, bound);
            }
            add(y, bound);
            collect_free(c, bound, acc);
        }
        Match(a, b, c) => {
            add(a, bound);
            add(b, bound);
            collect_free(c, bound, acc);
        }
        Ambient(n, c) | CapIn(n, c) | CapOut(n, c) | CapOpen(n, c) | Block(c, n) => {
            add(n, bound);
            collect_free(c, bound, acc);
        }
        AnonOutput(y) => add(y, bound),
        Restrict(x, c) | AnonInput(x, c) => {
            bound.push(x.clone());
            collect_free(c, bound, acc);
            bound.pop();
        }
        Tau(c) | Repl(c) => collect_free(c, bound, acc),
        Sum(l, r) | Par(l, r) => {
            collect_free(l, bound, acc);
            collect_free(r, bound, acc);
        }
    }
}

/// Every name occurring in `p`, free or bound.
pub fn all_names(p: &Process) -> BTreeSet<Name> {
    let mut acc = BTreeSet::new();
    collect_all(p, &mut acc);
    acc
}

fn collect_all(p: &Process, acc: &mut BTreeSet<Name>) {
    match p {
        Input(s, x, _) | Output(s, x, _) => {
            acc.extend(s.parts().iter().cloned());
            acc.insert(x.clone());
        }
        SelectiveInput(s, x, allowed, _) => {
            acc.extend(s.parts().iter().cloned());
            acc.insert(x.clone());
            acc.extend(allowed.iter().cloned());
        }
        Match(a, b, _) => {
            acc.insert(a.clone());
            acc.insert(b.clone());
        }
        Restrict(n, _)
        | Ambient(n, _)
        | CapIn(n, _)
        | CapOut(n, _)
        | CapOpen(n, _)
        | AnonInput(n, _)
        | AnonOutput(n)
        | Block(_, n) => {
            acc.insert(n.clone());
        }
        _ => {}
    }
    for c in p.children() {
        collect_all(c, acc);
    }
}

/// Bound names (binders of restriction and the input forms).
pub fn bound_names(p: &Process) -> BTreeSet<Name> {
    let mut acc = BTreeSet::new();
    fn go(p: &Process, acc: &mut BTreeSet<Name>) {
        match p {
            Input(_, x, _) | SelectiveInput(_, x, _, _) | Restrict(x, _) | AnonInput(x, _) => {
                acc.insert(x.clone());
            }
            _ => {}
        }
        for c in p.children() {
            go(c, acc);
        }
    }
    go(p, &mut acc);
    acc
}

/// Equality up to consistent renaming of bound names.
pub fn alpha_eq(p: &Process, q: &Process) -> bool {
    AlphaCmp::default().eq(p, q)
}

#[derive(Default)]
struct AlphaCmp {
    left: Vec<Name>,
    right: Vec<Name>,
}

#[derive(PartialEq)]
enum Resolved<'a> {
    Bound(usize),
    Free(&'a Name),
}

impl AlphaCmp {
    fn resolve<'a>(env: &[Name], n: &'a Name) -> Resolved<'a> {
        match env.iter().rposition(|b| b == n) {
            Some(i) => Resolved::Bound(i),
            None => Resolved::Free(n),
        }
    }

    fn name_eq(&self, a: &Name, b: &Name) -> bool {
        Self::resolve(&self.left, a) == Self::resolve(&self.right, b)
    }

    fn subj_eq(&self, a: &ChannelSubject, b: &ChannelSubject) -> bool {
        a.len() == b.len() && a.parts().iter().zip(b.parts()).all(|(x, y)| self.name_eq(x, y))
    }

    fn set_eq(&self, a: &BTreeSet<Name>, b: &BTreeSet<Name>) -> bool {
        let ra: Vec<_> = a.iter().map(|n| Self::resolve(&self.left, n)).collect();
        let rb: Vec<_> = b.iter().map(|n| Self::resolve(&self.right, n)).collect();
        ra.len() == rb.len() && ra.iter().all(|x| rb.contains(x)) && rb.iter().all(|x| ra.contains(x))
    }

    fn under(&mut self, x: &Name, y: &Name, p: &Process, q: &Process) -> bool {
        self.left.push(x.clone());
        self.right.push(y.clone());
        let r = self.eq(p, q);
        self.left.pop();
        self.right.pop();
        r
    }

    fn eq(&mut self, p: &Process, q: &Process) -> bool {
        match (p, q) {
            (Nil, Nil) | (Success, Success) => true,
            (Hole(i), Hole(j)) => i == j,
            (Input(s1, x1, c1), Input(s2, x2, c2)) => self.subj_eq(s1, s2) && self.under(x1, x2, c1, c2),
            (SelectiveInput(s1, x1, v1, c1), SelectiveInput(s2, x2, v2, c2)) => {
                self.subj_eq(s1, s2) && self.set_eq(v1, v2) && self.under(x1, x2, c1, c2)
            }
            (Output(s1, y1, c1), Output(s2, y2, c2)) => self.subj_eq(s1, s2) && self.name_eq(y1, y2) && self.eq(c1, c2),
            (Tau(c1), Tau(c2)) | (Repl(c1), Repl(c2)) => self.eq(c1, c2),
            (Match(a1, b1, c1), Match(a2, b2, c2)) => self.name_eq(a1, a2) && self.name_eq(b1, b2) && self.eq(c1, c2),
            (Sum(l1, r1), Sum(l2, r2)) | (Par(l1, r1), Par(l2, r2)) => self.eq(l1, l2) && self.eq(r1, r2),
            (Restrict(x1, c1), Restrict(x2, c2)) | (AnonInput(x1, c1), AnonInput(x2, c2)) => self.under(x1, x2, c1, c2),
            (Ambient(n1, c1), Ambient(n2, c2))
            | (CapIn(n1, c1), CapIn(n2, c2))
            | (CapOut(n1, c1), CapOut(n2, c2))
            | (CapOpen(n1, c1), CapOpen(n2, c2))
            | (Block(c1, n1), Block(c2, n2)) => self.name_eq(n1, n2) && self.eq(c1, c2),
            (AnonOutput(y1), AnonOutput(y2)) => self.name_eq(y1, y2),
            _ => false,
        }
    }
}

/// Unguarded subterms. Satisfied matches, choice, parallel, restriction and
/// replication descend; ambient and blocking bodies descend too. Everything
/// else (prefixes, unsatisfied matches, holes) contributes only itself.
pub fn ung_sub(p: &Process) -> BTreeSet<Process> {
    let mut acc = BTreeSet::new();
    collect_ung(p, &mut acc);
    acc
}

fn collect_ung(p: &Process, acc: &mut BTreeSet<Process>) {
    if !acc.insert(p.clone()) {
        return;
    }
    match p {
        Match(a, b, q) if a == b => collect_ung(q, acc),
        Sum(l, r) | Par(l, r) => {
            collect_ung(l, acc);
            collect_ung(r, acc);
        }
        Restrict(_, q) | Repl(q) | Ambient(_, q) | Block(q, _) => collect_ung(q, acc),
        _ => {}
    }
}

/// `p` has an unguarded occurrence of success.
pub fn is_successful(p: &Process) -> bool {
    match p {
        Success => true,
        Match(a, b, q) if a == b => is_successful(q),
        Sum(l, r) | Par(l, r) => is_successful(l) || is_successful(r),
        Restrict(_, q) | Repl(q) | Ambient(_, q) | Block(q, _) => is_successful(q),
        _ => false,
    }
}

/// Replace holes by the given processes (ordinal `i` takes `fills[i - 1]`).
/// Filling is syntactic: the context may capture free names of the fillers.
pub fn fill_holes(p: &Process, fills: &[Process]) -> Process {
    map_children(p, &mut |c| fill_holes(c, fills), |h| fills.get(h - 1).cloned())
}

/// Rebuild `p` with `f` applied to each direct child. `hole` handles `Hole`.
pub(crate) fn map_children(
    p: &Process,
    f: &mut impl FnMut(&Process) -> Process,
    hole: impl Fn(usize) -> Option<Process>,
) -> Process {
    let b = |c: &Process, f: &mut dyn FnMut(&Process) -> Process| Box::new(f(c));
    match p {
        Nil => Nil,
        Success => Success,
        Hole(i) => hole(*i).unwrap_or(Hole(*i)),
        AnonOutput(y) => AnonOutput(y.clone()),
        Input(s, x, c) => Input(s.clone(), x.clone(), b(c, f)),
        SelectiveInput(s, x, v, c) => SelectiveInput(s.clone(), x.clone(), v.clone(), b(c, f)),
        Output(s, y, c) => Output(s.clone(), y.clone(), b(c, f)),
        Tau(c) => Tau(b(c, f)),
        Match(x, y, c) => Match(x.clone(), y.clone(), b(c, f)),
        Sum(l, r) => {
            let l = b(l, f);
            Sum(l, b(r, f))
        }
        Par(l, r) => {
            let l = b(l, f);
            Par(l, b(r, f))
        }
        Restrict(x, c) => Restrict(x.clone(), b(c, f)),
        Repl(c) => Repl(b(c, f)),
        Ambient(n, c) => Ambient(n.clone(), b(c, f)),
        CapIn(n, c) => CapIn(n.clone(), b(c, f)),
        CapOut(n, c) => CapOut(n.clone(), b(c, f)),
        CapOpen(n, c) => CapOpen(n.clone(), b(c, f)),
        AnonInput(x, c) => AnonInput(x.clone(), b(c, f)),
        Block(c, n) => Block(b(c, f), n.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    fn names(ns: &[&str]) -> BTreeSet<Name> {
        ns.iter().map(|n| Name::new(n)).collect()
    }

    #[test]
    fn admissibility() {
        assert!(!well_formed(&p("[a=b]ok"), CalculusId::Pix));
        assert!(well_formed(&p("a(z).ok + tau.0"), CalculusId::Pi));
        assert!(!well_formed(&p("x[ok]"), CalculusId::Pi));
        assert!(well_formed(&p("x[ok]"), CalculusId::Ambients));
        assert!(!well_formed(&p("(x*a)(z).ok"), CalculusId::Pix));
        assert!(well_formed(&p("(x*a)(z).ok"), CalculusId::PiPoly));
        assert!(!well_formed(&Process::Hole(1), CalculusId::Pi));
    }

    #[test]
    fn free_name_examples() {
        assert!(free_names(&p("new z.z!<z>.0")).is_empty());
        assert_eq!(free_names(&p("a(z).z!<b>.0")), names(&["a", "b"]));
        assert_eq!(free_names(&p("((a!<y>.0 | b(z).0)\\a)\\b")), names(&["a", "b", "y"]));
        assert_eq!(bound_names(&p("a(z).new w.0")), names(&["w", "z"]));
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&p("new a.a(x).0"), &p("new b.b(y).0")));
        assert!(alpha_eq(&p("a(x).x!<x>.0"), &p("a(y).y!<y>.0")));
        assert!(!alpha_eq(&p("a(x).0"), &p("b(x).0")));
        assert!(!alpha_eq(&p("a(x).x!<y>.0"), &p("a(y).y!<y>.0")));
    }

    #[test]
    fn unguarded_subterms() {
        let set = |ts: &[&str]| ts.iter().map(|t| p(t)).collect::<BTreeSet<_>>();
        assert_eq!(ung_sub(&p("ok + 0")), set(&["ok + 0", "ok", "0"]));
        assert_eq!(ung_sub(&p("new z.z!<z>.0")), set(&["new z.z!<z>.0", "z!<z>.0"]));
        assert_eq!(ung_sub(&p("[a=b]ok")), set(&["[a=b]ok"]));
        assert!(ung_sub(&Process::par(Process::Hole(1), Process::Nil)).contains(&Process::Hole(1)));
    }

    #[test]
    fn success_examples() {
        assert!(is_successful(&p("ok | 0")));
        assert!(is_successful(&p("[a=a]ok")));
        assert!(!is_successful(&p("x(z).ok")));
        assert!(is_successful(&p("a[ok]")));
        assert!(is_successful(&p("ok\\a")));
        assert!(!is_successful(&p("open a.ok")));
    }

    #[test]
    fn holes() {
        let c = Process::par(Process::Hole(1), Process::tau(Process::Hole(2)));
        let mut ords = BTreeSet::new();
        c.hole_ordinals(&mut ords);
        assert_eq!(ords, [1, 2].into());
        assert_eq!(fill_holes(&c, &[p("ok"), p("0")]), p("ok | tau.0"));
    }

    #[test]
    fn measures() {
        assert_eq!(p("0").depth(), 1);
        assert_eq!(p("tau.a!<b>.ok").depth(), 2);
        assert_eq!(p("tau.ok | 0").size(), 4);
    }
}
