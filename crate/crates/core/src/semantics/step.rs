//! One-step reduction.
//!
//! Redexes are found by asking each parallel component what it offers: a
//! π output or input, an anonymous output or input, an ambient, a
//! capability, or an ambient that wants to move. An offer carries the
//! residual process left behind once it is consumed. Restrictions crossed on
//! the way up are extruded under fresh names, which is sound because every
//! successor is canonicalised afterwards.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{ensure_well_formed, Result};
use crate::syntax::{
    all_names, apply_subst, fill_holes, fresh_name, CalculusId, ChannelSubject, Name, Process, Substitution,
};

use super::canon::canonical;

/// A visible action of a π-calculus term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    Internal,
    Input(ChannelSubject),
    Output(ChannelSubject, Name),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subj = |s: &ChannelSubject| s.parts().iter().map(Name::to_string).collect::<Vec<_>>().join("*");
        match self {
            Label::Internal => f.write_str("tau"),
            Label::Input(s) => write!(f, "{}(_)", subj(s)),
            Label::Output(s, y) => write!(f, "{}!<{y}>", subj(s)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dir {
    In,
    Out,
}

#[derive(Clone, Debug)]
enum Kind {
    Out {
        subj: ChannelSubject,
        obj: Name,
    },
    /// `abs` is `AnonInput(param, cont)`, kept as a binder so renaming respects it.
    In {
        subj: ChannelSubject,
        abs: Process,
        allowed: Option<BTreeSet<Name>>,
        blocked: BTreeSet<Name>,
    },
    AnonOut {
        obj: Name,
    },
    AnonIn {
        abs: Process,
    },
    Amb {
        name: Name,
        body: Process,
    },
    Cap {
        dir: Option<Dir>,
        target: Name,
    },
    Mover {
        dir: Dir,
        target: Name,
        moved: Process,
    },
}

/// `resid` holds `Hole(1)` for the input forms and for `Amb`.
#[derive(Clone, Debug)]
struct Offer {
    kind: Kind,
    extruded: Vec<Name>,
    resid: Process,
}

impl Offer {
    fn new(kind: Kind, resid: Process) -> Self {
        Offer { kind, extruded: vec![], resid }
    }

    fn key(&self) -> Vec<&Name> {
        match &self.kind {
            Kind::Out { subj, .. } | Kind::In { subj, .. } => subj.parts().iter().collect(),
            Kind::Amb { name, .. } => vec![name],
            Kind::Cap { target, .. } | Kind::Mover { target, .. } => vec![target],
            Kind::AnonOut { .. } | Kind::AnonIn { .. } => vec![],
        }
    }

    fn rename(&self, sigma: &Substitution) -> Offer {
        let s = |p: &Process| apply_subst(sigma, p);
        let n = |x: &Name| sigma.get(x).clone();
        let kind = match &self.kind {
            Kind::Out { subj, obj } => Kind::Out { subj: subj.map(n), obj: n(obj) },
            Kind::In { subj, abs, allowed, blocked } => Kind::In {
                subj: subj.map(n),
                abs: s(abs),
                allowed: allowed.as_ref().map(|a| a.iter().map(n).collect()),
                blocked: blocked.iter().map(n).collect(),
            },
            Kind::AnonOut { obj } => Kind::AnonOut { obj: n(obj) },
            Kind::AnonIn { abs } => Kind::AnonIn { abs: s(abs) },
            Kind::Amb { name, body } => Kind::Amb { name: n(name), body: s(body) },
            Kind::Cap { dir, target } => Kind::Cap { dir: *dir, target: n(target) },
            Kind::Mover { dir, target, moved } => Kind::Mover { dir: *dir, target: n(target), moved: s(moved) },
        };
        Offer { kind, extruded: self.extruded.clone(), resid: s(&self.resid) }
    }

    fn map_resid(mut self, f: impl FnOnce(Process) -> Process) -> Offer {
        self.resid = f(self.resid);
        self
    }
}

fn instantiate(abs: &Process, y: &Name) -> Process {
    match abs {
        Process::AnonInput(x, c) => apply_subst(&Substitution::single(x.clone(), y.clone()), c),
        _ => unreachable!("input abstraction"),
    }
}

struct Stepper {
    avoid: BTreeSet<Name>,
    copies: usize,
}

impl Stepper {
    fn fresh(&mut self, hint: &Name) -> Name {
        let n = fresh_name(hint.base(), &self.avoid);
        self.avoid.insert(n.clone());
        n
    }

    fn offers(&mut self, p: &Process) -> Vec<Offer> {
        use Process::*;
        let hole = || Hole(1);
        match p {
            Output(s, y, c) => vec![Offer::new(Kind::Out { subj: s.clone(), obj: y.clone() }, (**c).clone())],
            Input(s, x, c) => vec![Offer::new(
                Kind::In {
                    subj: s.clone(),
                    abs: AnonInput(x.clone(), c.clone()),
                    allowed: None,
                    blocked: BTreeSet::new(),
                },
                hole(),
            )],
            SelectiveInput(s, x, allowed, c) => vec![Offer::new(
                Kind::In {
                    subj: s.clone(),
                    abs: AnonInput(x.clone(), c.clone()),
                    allowed: Some(allowed.clone()),
                    blocked: BTreeSet::new(),
                },
                hole(),
            )],
            AnonOutput(y) => vec![Offer::new(Kind::AnonOut { obj: y.clone() }, Nil)],
            AnonInput(..) => vec![Offer::new(Kind::AnonIn { abs: p.clone() }, hole())],
            CapIn(n, c) => vec![Offer::new(Kind::Cap { dir: Some(Dir::In), target: n.clone() }, (**c).clone())],
            CapOut(n, c) => vec![Offer::new(Kind::Cap { dir: Some(Dir::Out), target: n.clone() }, (**c).clone())],
            CapOpen(n, c) => vec![Offer::new(Kind::Cap { dir: None, target: n.clone() }, (**c).clone())],
            Ambient(m, body) => {
                let mut out = vec![Offer::new(Kind::Amb { name: m.clone(), body: (**body).clone() }, hole())];
                for o in self.offers(body) {
                    if let Kind::Cap { dir: Some(dir), target } = o.kind {
                        let moved = Process::ambient(m.clone(), o.resid);
                        out.push(Offer { kind: Kind::Mover { dir, target, moved }, extruded: o.extruded, resid: Nil });
                    }
                }
                out
            }
            Match(a, b, c) if a == b => self.offers(c),
            Sum(l, r) => {
                let mut out = self.offers(l);
                out.extend(self.offers(r));
                out
            }
            Par(l, r) => {
                let mut out: Vec<Offer> =
                    self.offers(l).into_iter().map(|o| o.map_resid(|x| Process::par(x, (**r).clone()))).collect();
                out.extend(self.offers(r).into_iter().map(|o| o.map_resid(|x| Process::par((**l).clone(), x))));
                out
            }
            Restrict(z, c) => {
                let mut out = Vec::new();
                for o in self.offers(c) {
                    if o.key().contains(&z) {
                        continue;
                    }
                    let z2 = self.fresh(z);
                    let mut o = o.rename(&Substitution::single(z.clone(), z2.clone()));
                    o.extruded.insert(0, z2);
                    out.push(o);
                }
                out
            }
            Block(c, n) => self
                .offers(c)
                .into_iter()
                .filter_map(|mut o| {
                    match &mut o.kind {
                        Kind::Out { subj, obj } if subj.contains(n) || obj == n => return None,
                        Kind::In { subj, .. } if subj.contains(n) => return None,
                        Kind::In { blocked, .. } => {
                            blocked.insert(n.clone());
                        }
                        _ => {}
                    }
                    Some(o.map_resid(|x| Process::block(x, n.clone())))
                })
                .collect(),
            Repl(c) if self.copies >= 1 => {
                self.offers(c).into_iter().map(|o| o.map_resid(|x| Process::par(x, p.clone()))).collect()
            }
            _ => vec![],
        }
    }

    fn steps(&mut self, p: &Process) -> Vec<Process> {
        use Process::*;
        match p {
            Tau(c) => vec![(**c).clone()],
            Match(a, b, c) if a == b => self.steps(c),
            Sum(l, r) => {
                let mut out = self.steps(l);
                out.extend(self.steps(r));
                out
            }
            Par(l, r) => {
                let mut out: Vec<Process> = self.steps(l).into_iter().map(|s| Process::par(s, (**r).clone())).collect();
                out.extend(self.steps(r).into_iter().map(|s| Process::par((**l).clone(), s)));
                let lo = self.offers(l);
                let ro = self.offers(r);
                out.extend(interactions(&lo, &ro));
                out
            }
            Restrict(z, c) => self.steps(c).into_iter().map(|s| Process::restrict(z.clone(), s)).collect(),
            Block(c, n) => self.steps(c).into_iter().map(|s| Process::block(s, n.clone())).collect(),
            Ambient(n, body) => {
                let mut out: Vec<Process> =
                    self.steps(body).into_iter().map(|s| Process::ambient(n.clone(), s)).collect();
                for o in self.offers(body) {
                    if let Kind::Mover { dir: Dir::Out, target, moved } = &o.kind {
                        if target == n {
                            let left = Process::par(moved.clone(), Process::ambient(n.clone(), o.resid.clone()));
                            out.push(Process::restrict_all(o.extruded.clone(), left));
                        }
                    }
                }
                out
            }
            Repl(c) if self.copies >= 1 => {
                let mut out: Vec<Process> = self.steps(c).into_iter().map(|s| Process::par(s, p.clone())).collect();
                if self.copies >= 2 {
                    let first = self.offers(c);
                    let second = self.offers(c);
                    out.extend(interactions(&first, &second).into_iter().map(|s| Process::par(s, p.clone())));
                }
                out
            }
            _ => vec![],
        }
    }
}

fn interactions(left: &[Offer], right: &[Offer]) -> Vec<Process> {
    let mut out = Vec::new();
    for a in left {
        for b in right {
            for (x, y) in [(a, b), (b, a)] {
                if let Some(r) = sync(x, y) {
                    let binders = x.extruded.iter().chain(&y.extruded).cloned();
                    out.push(Process::restrict_all(binders, r));
                }
            }
        }
    }
    out
}

/// The combined residual when `a` acts on `b`.
fn sync(a: &Offer, b: &Offer) -> Option<Process> {
    let fill = |ctx: &Process, p: Process| fill_holes(ctx, &[p]);
    match (&a.kind, &b.kind) {
        (Kind::Out { subj, obj }, Kind::In { subj: s2, abs, allowed, blocked }) => {
            let admitted = allowed.as_ref().is_none_or(|v| v.contains(obj));
            (subj == s2 && admitted && !blocked.contains(obj))
                .then(|| Process::par(a.resid.clone(), fill(&b.resid, instantiate(abs, obj))))
        }
        (Kind::AnonOut { obj }, Kind::AnonIn { abs }) => {
            Some(Process::par(a.resid.clone(), fill(&b.resid, instantiate(abs, obj))))
        }
        (Kind::Cap { dir: None, target }, Kind::Amb { name, body }) if target == name => {
            Some(Process::par(a.resid.clone(), fill(&b.resid, body.clone())))
        }
        (Kind::Mover { dir: Dir::In, target, moved }, Kind::Amb { name, body }) if target == name => {
            let entered = Process::ambient(name.clone(), Process::par(body.clone(), moved.clone()));
            Some(Process::par(a.resid.clone(), fill(&b.resid, entered)))
        }
        _ => None,
    }
}

/// Canonical one-step successors of `p`, sorted and without duplicates.
pub fn successors(p: &Process, calc: CalculusId, repl_copies: usize) -> Result<Vec<Process>> {
    ensure_well_formed(p, calc)?;
    Ok(successors_unchecked(p, repl_copies))
}

pub(crate) fn successors_unchecked(p: &Process, repl_copies: usize) -> Vec<Process> {
    let start = canonical(p);
    let mut stepper = Stepper { avoid: all_names(&start), copies: repl_copies };
    let set: BTreeSet<Process> = stepper.steps(&start).iter().map(canonical).collect();
    set.into_iter().collect()
}

/// Subject pairs `(input, output)` offered by distinct parallel components
/// of `p`, whether or not the subjects agree.
pub fn communication_pairs(p: &Process, repl_copies: usize) -> Vec<(ChannelSubject, ChannelSubject)> {
    let start = canonical(p);
    let mut stepper = Stepper { avoid: all_names(&start), copies: repl_copies };
    let mut out = BTreeSet::new();
    stepper.pairs(&start, &mut out);
    out.into_iter().collect()
}

impl Stepper {
    fn pairs(&mut self, p: &Process, acc: &mut BTreeSet<(ChannelSubject, ChannelSubject)>) {
        use Process::*;
        let mut cross = |left: &[Offer], right: &[Offer]| {
            for a in left {
                for b in right {
                    for (x, y) in [(a, b), (b, a)] {
                        if let (Kind::In { subj: i, .. }, Kind::Out { subj: o, .. }) = (&x.kind, &y.kind) {
                            acc.insert((i.clone(), o.clone()));
                        }
                    }
                }
            }
        };
        match p {
            Par(l, r) => {
                let (lo, ro) = (self.offers(l), self.offers(r));
                cross(&lo, &ro);
                self.pairs(l, acc);
                self.pairs(r, acc);
            }
            Repl(c) if self.copies >= 1 => {
                if self.copies >= 2 {
                    let (first, second) = (self.offers(c), self.offers(c));
                    cross(&first, &second);
                }
                self.pairs(c, acc);
            }
            Sum(l, r) => {
                self.pairs(l, acc);
                self.pairs(r, acc);
            }
            Restrict(_, c) | Block(c, _) | Ambient(_, c) => self.pairs(c, acc),
            Match(a, b, c) if a == b => self.pairs(c, acc),
            _ => {}
        }
    }
}

/// A visible π capability together with what remains after it fires.
#[derive(Clone, Debug)]
pub struct Capability {
    label: Label,
    offer: Offer,
}

impl Capability {
    pub fn label(&self) -> &Label {
        &self.label
    }

    /// Names whose restriction was crossed; the residual lives under them.
    pub fn extruded(&self) -> &[Name] {
        &self.offer.extruded
    }

    /// Residual after receiving `y`. `None` for outputs or refused objects.
    pub fn after_input(&self, y: &Name) -> Option<Process> {
        match &self.offer.kind {
            Kind::In { abs, allowed, blocked, .. } => {
                let admitted = allowed.as_ref().is_none_or(|v| v.contains(y)) && !blocked.contains(y);
                admitted.then(|| fill_holes(&self.offer.resid, &[instantiate(abs, y)]))
            }
            _ => None,
        }
    }

    /// Residual after the output fires. `None` for inputs.
    pub fn after_output(&self) -> Option<Process> {
        match &self.offer.kind {
            Kind::Out { .. } => Some(self.offer.resid.clone()),
            _ => None,
        }
    }
}

/// The visible input and output capabilities of the canonical form of `p`.
pub fn capabilities(p: &Process, calc: CalculusId, repl_copies: usize) -> Result<Vec<Capability>> {
    ensure_well_formed(p, calc)?;
    let start = canonical(p);
    let mut stepper = Stepper { avoid: all_names(&start), copies: repl_copies };
    let mut caps: Vec<Capability> = stepper
        .offers(&start)
        .into_iter()
        .filter_map(|o| {
            let label = match &o.kind {
                Kind::Out { subj, obj } => Label::Output(subj.clone(), obj.clone()),
                Kind::In { subj, .. } => Label::Input(subj.clone()),
                _ => return None,
            };
            Some(Capability { label, offer: o })
        })
        .collect();
    caps.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_process;

    fn succ(s: &str, copies: usize) -> Vec<Process> {
        successors_unchecked(&parse_process(s).unwrap(), copies)
    }

    fn canon(s: &str) -> Process {
        canonical(&parse_process(s).unwrap())
    }

    fn expect(s: &str, outs: &[&str]) {
        let mut want: Vec<Process> = outs.iter().map(|o| canon(o)).collect();
        want.sort();
        want.dedup();
        assert_eq!(succ(s, 3), want, "{s}");
    }

    #[test]
    fn tau_commits() {
        expect("tau.ok", &["ok"]);
    }

    #[test]
    fn communication_with_choice() {
        expect("x!<y>.0 + tau.0 | x(z).z!<z>.0 + 0", &["y!<y>.0", "x(z).z!<z>.0"]);
    }

    #[test]
    fn distinct_subjects_do_not_meet() {
        expect("a!<t> | b(z).ok", &[]);
    }

    #[test]
    fn restricted_object_is_extruded() {
        expect("new a.x!<a>.0 | x(b).b!<b>", &["new a.a!<a>"]);
    }

    #[test]
    fn restricted_subject_has_no_capability() {
        let caps = capabilities(&parse_process("new a.a!<t>.0").unwrap(), CalculusId::Pix, 3).unwrap();
        assert!(caps.is_empty());
    }

    #[test]
    fn input_capability_through_sum() {
        let caps = capabilities(&parse_process("a(z).z!<z> + tau.0").unwrap(), CalculusId::Pix, 3).unwrap();
        assert_eq!(caps.len(), 1);
        assert_eq!(caps[0].label(), &Label::Input(Name::new("a").into()));
        assert_eq!(caps[0].after_input(&Name::new("q")).unwrap(), parse_process("q!<q>").unwrap());
        assert!(caps[0].after_output().is_none());
    }

    #[test]
    fn blocking_filters_capabilities() {
        let p = parse_process("(a!<y>.0 | b(z).0)\\a").unwrap();
        let caps = capabilities(&p, CalculusId::PiBlock, 3).unwrap();
        let labels: Vec<&Label> = caps.iter().map(Capability::label).collect();
        assert_eq!(labels, vec![&Label::Input(Name::new("b").into())]);
        assert!(caps[0].after_input(&Name::new("a")).is_none());
    }

    #[test]
    fn blocking_keeps_internal_steps() {
        expect("(a!<y>.0 | a(z).ok)\\a", &["ok\\a"]);
    }

    #[test]
    fn selective_input_checks_object() {
        expect("x!<a> | x(y in {b}).ok", &[]);
        expect("x!<b> | x(y in {b}).ok", &["ok"]);
    }

    #[test]
    fn polyadic_subjects_compare_componentwise() {
        expect("(x*b)!<y> | (x*a)(z).ok", &[]);
        expect("(x*a)!<y> | (x*a)(z).ok", &["ok"]);
    }

    #[test]
    fn pairs_ignore_subject_equality() {
        let pairs = communication_pairs(&parse_process("a(y).ok | b!<t> + c!<t>").unwrap(), 3);
        let s = |n: &str| ChannelSubject::single(Name::new(n));
        assert_eq!(pairs, vec![(s("a"), s("b")), (s("a"), s("c"))]);
        assert!(communication_pairs(&parse_process("a(y).ok + b!<t>").unwrap(), 3).is_empty());
    }

    #[test]
    fn ambient_rules() {
        expect("m[in n.ok | a[]] | n[b[]]", &["n[m[ok | a[]] | b[]]"]);
        expect("n[m[out n.ok | a[]] | b[]]", &["m[ok | a[]] | n[b[]]"]);
        expect("open n.ok | n[a[]]", &["ok | a[]"]);
        expect("(z).z[] | <y>", &["y[]"]);
        expect("m[(z).z[]] | <y>", &[]);
    }

    #[test]
    fn replication_unfolds_for_redex_search() {
        expect("!tau.0", &["!tau.0"]);
        assert!(succ("!tau.0", 0).is_empty());
        expect("!(a!<b> + a(x).ok)", &["ok | !(a!<b> + a(x).ok)"]);
        assert!(succ("!(a!<b> + a(x).ok)", 1).is_empty());
    }
}
