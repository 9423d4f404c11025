use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::name::{fresh_name, Name};
use super::process::{all_names, ChannelSubject, Process};

/// Finite name map. Fixpoints are never stored, so `dom` and `codom` are exact.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Substitution {
    entries: BTreeMap<Name, Name>,
}

impl Substitution {
    pub fn identity() -> Self {
        Self::default()
    }

    /// `{to/from}` for a single pair.
    pub fn single(from: Name, to: Name) -> Self {
        let mut s = Self::default();
        s.insert(from, to);
        s
    }

    /// Build from `(from, to)` pairs; a later pair for the same source wins.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Name)>) -> Self {
        let mut s = Self::default();
        for (from, to) in pairs {
            s.insert(from, to);
        }
        s
    }

    pub fn insert(&mut self, from: Name, to: Name) {
        if from == to {
            self.entries.remove(&from);
        } else {
            self.entries.insert(from, to);
        }
    }

    pub fn get<'a>(&'a self, n: &'a Name) -> &'a Name {
        self.entries.get(n).unwrap_or(n)
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Name, &Name)> {
        self.entries.iter()
    }

    pub fn dom(&self) -> BTreeSet<Name> {
        self.entries.keys().cloned().collect()
    }

    pub fn codom(&self) -> BTreeSet<Name> {
        self.entries.values().cloned().collect()
    }

    pub fn names(&self) -> BTreeSet<Name> {
        let mut n = self.dom();
        n.extend(self.codom());
        n
    }

    /// Injective on `names` (σ is treated as total via identity).
    pub fn is_injective_on(&self, names: &BTreeSet<Name>) -> bool {
        let mut scope = names.clone();
        scope.extend(self.dom());
        let images: BTreeSet<&Name> = scope.iter().map(|n| self.get(n)).collect();
        images.len() == scope.len()
    }

    fn without(&self, x: &Name) -> Substitution {
        let mut s = self.clone();
        s.entries.remove(x);
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("id");
        }
        f.write_str("{")?;
        for (i, (from, to)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{to}/{from}")?;
        }
        f.write_str("}")
    }
}

/// Capture-avoiding simultaneous substitution of free names.
pub fn apply_subst(sigma: &Substitution, p: &Process) -> Process {
    if sigma.is_identity() {
        return p.clone();
    }
    use Process::*;
    let n = |x: &Name| sigma.get(x).clone();
    let subj = |s: &ChannelSubject| s.map(|x| sigma.get(x).clone());
    match p {
        Nil => Nil,
        Success => Success,
        Hole(i) => Hole(*i),
        AnonOutput(y) => AnonOutput(n(y)),
        Input(s, x, c) => {
            let (x, c) = under_binder(sigma, x, c);
            Input(subj(s), x, Box::new(c))
        }
        SelectiveInput(s, x, allowed, c) => {
            let allowed = allowed.iter().map(n).collect();
            let (x, c) = under_binder(sigma, x, c);
            SelectiveInput(subj(s), x, allowed, Box::new(c))
        }
        Output(s, y, c) => Output(subj(s), n(y), Box::new(apply_subst(sigma, c))),
        Tau(c) => Tau(Box::new(apply_subst(sigma, c))),
        Match(a, b, c) => Match(n(a), n(b), Box::new(apply_subst(sigma, c))),
        Sum(l, r) => Process::sum(apply_subst(sigma, l), apply_subst(sigma, r)),
        Par(l, r) => Process::par(apply_subst(sigma, l), apply_subst(sigma, r)),
        Restrict(x, c) => {
            let (x, c) = under_binder(sigma, x, c);
            Restrict(x, Box::new(c))
        }
        AnonInput(x, c) => {
            let (x, c) = under_binder(sigma, x, c);
            AnonInput(x, Box::new(c))
        }
        Repl(c) => Repl(Box::new(apply_subst(sigma, c))),
        Ambient(m, c) => Ambient(n(m), Box::new(apply_subst(sigma, c))),
        CapIn(m, c) => CapIn(n(m), Box::new(apply_subst(sigma, c))),
        CapOut(m, c) => CapOut(n(m), Box::new(apply_subst(sigma, c))),
        CapOpen(m, c) => CapOpen(n(m), Box::new(apply_subst(sigma, c))),
        Block(c, m) => Block(Box::new(apply_subst(sigma, c)), n(m)),
    }
}

fn under_binder(sigma: &Substitution, x: &Name, body: &Process) -> (Name, Process) {
    let inner = sigma.without(x);
    if inner.is_identity() {
        return (x.clone(), body.clone());
    }
    if !inner.codom().contains(x) {
        return (x.clone(), apply_subst(&inner, body));
    }
    let mut avoid = all_names(body);
    avoid.extend(inner.names());
    avoid.insert(x.clone());
    let fresh = fresh_name(x.base(), &avoid);
    let mut renamed = inner;
    renamed.insert(x.clone(), fresh.clone());
    (fresh, apply_subst(&renamed, body))
}

/// Rename every binder to a distinct name that is not free anywhere in `p`.
pub fn freshen_binders(p: &Process) -> Process {
    let mut avoid = all_names(p);
    freshen(p, &mut avoid)
}

fn freshen(p: &Process, avoid: &mut BTreeSet<Name>) -> Process {
    use Process::*;
    let rebind = |x: &Name, c: &Process, avoid: &mut BTreeSet<Name>| {
        let fresh = fresh_name(x.base(), avoid);
        avoid.insert(fresh.clone());
        let body = apply_subst(&Substitution::single(x.clone(), fresh.clone()), c);
        (fresh, Box::new(freshen(&body, avoid)))
    };
    match p {
        Input(s, x, c) => {
            let (x, c) = rebind(x, c, avoid);
            Input(s.clone(), x, c)
        }
        SelectiveInput(s, x, v, c) => {
            let (x, c) = rebind(x, c, avoid);
            SelectiveInput(s.clone(), x, v.clone(), c)
        }
        Restrict(x, c) => {
            let (x, c) = rebind(x, c, avoid);
            Restrict(x, c)
        }
        AnonInput(x, c) => {
            let (x, c) = rebind(x, c, avoid);
            AnonInput(x, c)
        }
        _ => super::process::map_children(p, &mut |c| freshen(c, avoid), |_| None),
    }
}

/// Renaming policy: every source name maps to a vector of `arity` target
/// names. Component `i` of the image of `n` is `n` with `i` primes appended
/// to its base. Primes never occur in parsed names, so images of distinct
/// source names are disjoint and the components of one image are distinct.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RenamingPolicy {
    arity: usize,
}

impl RenamingPolicy {
    pub fn identity() -> Self {
        RenamingPolicy { arity: 1 }
    }

    pub fn tagged(arity: usize) -> Self {
        assert!(arity >= 1, "renaming policy arity must be positive");
        RenamingPolicy { arity }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_identity(&self) -> bool {
        self.arity == 1
    }

    pub fn image(&self, n: &Name) -> Vec<Name> {
        (0..self.arity)
            .map(|i| {
                if i == 0 {
                    n.clone()
                } else {
                    let base = format!("{}{}", n.base(), "'".repeat(i));
                    Name::indexed(&base, n.index())
                }
            })
            .collect()
    }

    /// Check the component-distinctness and disjointness invariants on a
    /// finite set of source names.
    pub fn invariants_hold_on(&self, names: &BTreeSet<Name>) -> bool {
        let mut seen = BTreeSet::new();
        for n in names {
            let img = self.image(n);
            let distinct: BTreeSet<_> = img.iter().collect();
            if distinct.len() != img.len() {
                return false;
            }
            for m in img {
                if !seen.insert(m) {
                    return false;
                }
            }
        }
        true
    }
}

/// Translate `sigma` through the policy: `image(a)_i ↦ image(σ(a))_i`.
pub fn lift_substitution(policy: &RenamingPolicy, sigma: &Substitution) -> Substitution {
    let mut out = Substitution::identity();
    for (from, to) in sigma.entries() {
        for (a, b) in policy.image(from).into_iter().zip(policy.image(to)) {
            out.insert(a, b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::process::{alpha_eq, free_names};

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn direct_replacement() {
        let p = Process::output(n("x"), n("x"), Process::Nil);
        let q = apply_subst(&Substitution::single(n("x"), n("y")), &p);
        assert_eq!(q, Process::output(n("y"), n("y"), Process::Nil));
    }

    #[test]
    fn capture_forces_binder_renaming() {
        // {y/x} new y. x!<y>.0  ==  new y'. y!<y'>.0
        let p = Process::restrict(n("y"), Process::output(n("x"), n("y"), Process::Nil));
        let q = apply_subst(&Substitution::single(n("x"), n("y")), &p);
        let expected = Process::restrict(n("w"), Process::output(n("y"), n("w"), Process::Nil));
        assert!(alpha_eq(&q, &expected), "{q:?}");
        assert_eq!(free_names(&q), [n("y")].into());
    }

    #[test]
    fn match_variables_are_substituted() {
        let p = Process::matching(n("a"), n("b"), Process::Success);
        let q = apply_subst(&Substitution::single(n("a"), n("b")), &p);
        assert_eq!(q, Process::matching(n("b"), n("b"), Process::Success));
    }

    #[test]
    fn fixpoints_are_not_stored() {
        let s = Substitution::from_pairs([(n("a"), n("a")), (n("b"), n("c"))]);
        assert_eq!(s.dom(), [n("b")].into());
        assert_eq!(s.to_string(), "{c/b}");
    }

    #[test]
    fn blocked_and_ambient_names_are_rewritten() {
        let p = Process::block(Process::ambient(n("a"), Process::Nil), n("a"));
        let q = apply_subst(&Substitution::single(n("a"), n("b")), &p);
        assert_eq!(q, Process::block(Process::ambient(n("b"), Process::Nil), n("b")));
    }

    #[test]
    fn lift_identity_policy() {
        let s = Substitution::single(n("a"), n("b"));
        assert_eq!(lift_substitution(&RenamingPolicy::identity(), &s), s);
        assert!(lift_substitution(&RenamingPolicy::tagged(3), &Substitution::identity()).is_identity());
    }

    #[test]
    fn lift_componentwise() {
        let s = Substitution::single(n("a"), n("b"));
        let lifted = lift_substitution(&RenamingPolicy::tagged(2), &s);
        let expected = Substitution::from_pairs([(n("a"), n("b")), (n("a'"), n("b'"))]);
        assert_eq!(lifted, expected);
    }

    #[test]
    fn policy_invariants() {
        let names: BTreeSet<Name> = [n("a"), n("b"), Name::indexed("a", 2)].into();
        for k in 1..4 {
            assert!(RenamingPolicy::tagged(k).invariants_hold_on(&names));
        }
    }

    #[test]
    fn freshened_binders_are_distinct_from_free_names() {
        let p = crate::text::parse_process("a(a).new b.(a!<b> | c(b).0)").unwrap();
        let q = freshen_binders(&p);
        assert!(alpha_eq(&p, &q));
        let bound = crate::syntax::bound_names(&q);
        assert_eq!(bound.len(), 3);
        assert!(bound.is_disjoint(&free_names(&q)));
    }

    #[test]
    fn injectivity() {
        let names: BTreeSet<Name> = [n("a"), n("b")].into();
        assert!(!Substitution::single(n("a"), n("b")).is_injective_on(&names));
        assert!(Substitution::single(n("a"), n("c")).is_injective_on(&names));
        let swap = Substitution::from_pairs([(n("a"), n("b")), (n("b"), n("a"))]);
        assert!(swap.is_injective_on(&names));
    }
}
