//! Canonical representatives of structural-congruence classes.
//!
//! Normalisation runs in two passes. The first pass renames every binder to a
//! unique temporary, flattens `|` and `+`, drops `0` operands, consumes
//! satisfied matches and hoists restrictions to the enclosing parallel level,
//! discarding unused ones. The second pass names binders by nesting depth
//! and sorts components, so alpha-variants meet in one term.
//!
//! Replication is never unfolded, but `Q | !Q` is folded into `!Q`.

use std::collections::BTreeMap;

use crate::error::{ensure_well_formed, Result};
use crate::syntax::{apply_subst, free_names, CalculusId, Name, Process, Substitution};

const TEMP: &str = "%t";
const CANON: &str = "v";
const SELF: &str = "%self";
const OTHER: &str = "%other";
const MAX_ORDERINGS: usize = 120;

/// Canonical form of `p`, rejecting terms outside `calc`.
pub fn canonicalize(p: &Process, calc: CalculusId) -> Result<Process> {
    ensure_well_formed(p, calc)?;
    Ok(canonical(p))
}

/// Canonical form without the calculus check.
pub fn canonical(p: &Process) -> Process {
    let mut cur = canon_once(p);
    loop {
        let folded = absorb(&cur);
        if folded == cur {
            return cur;
        }
        cur = canon_once(&folded);
    }
}

fn canon_once(p: &Process) -> Process {
    let mut gen = 0u32;
    let flat = norm_proc(p, &mut gen);
    let offset = free_names(p).iter().filter(|n| n.base() == CANON).map(Name::index).max().unwrap_or(0);
    let namer = Namer { offset };
    namer.proc(&flat, 0, &BTreeMap::new())
}

// Pass 1.

struct Level {
    binders: Vec<Name>,
    comps: Vec<Process>,
}

impl Level {
    fn empty() -> Self {
        Level { binders: vec![], comps: vec![] }
    }

    fn one(p: Process) -> Self {
        Level { binders: vec![], comps: vec![p] }
    }

    fn build(self) -> Process {
        Process::restrict_all(self.binders, Process::par_all(self.comps))
    }
}

fn temp(gen: &mut u32) -> Name {
    *gen += 1;
    Name::indexed(TEMP, *gen)
}

fn rebind(x: &Name, body: &Process, gen: &mut u32) -> (Name, Process) {
    let t = temp(gen);
    let body = apply_subst(&Substitution::single(x.clone(), t.clone()), body);
    (t, body)
}

fn norm_proc(p: &Process, gen: &mut u32) -> Process {
    norm(p, gen).build()
}

fn norm(p: &Process, gen: &mut u32) -> Level {
    use Process::*;
    match p {
        Nil => Level::empty(),
        Par(l, r) => {
            let mut a = norm(l, gen);
            let b = norm(r, gen);
            a.binders.extend(b.binders);
            a.comps.extend(b.comps);
            a
        }
        Restrict(x, body) => {
            let (t, body) = rebind(x, body, gen);
            let mut lvl = norm(&body, gen);
            if lvl.comps.iter().any(|c| free_names(c).contains(&t)) {
                lvl.binders.insert(0, t);
            }
            lvl
        }
        Match(a, b, c) if a == b => norm(c, gen),
        Match(a, b, c) => Level::one(Match(a.clone(), b.clone(), Box::new(norm_proc(c, gen)))),
        Sum(..) => {
            let mut leaves = Vec::new();
            sum_leaves(p, &mut leaves);
            let mut levels: Vec<Level> =
                leaves.into_iter().map(|s| norm(s, gen)).filter(|l| !l.comps.is_empty()).collect();
            match levels.len() {
                0 => Level::empty(),
                1 => levels.pop().unwrap(),
                _ => Level::one(Process::sum_all(levels.into_iter().map(Level::build))),
            }
        }
        Block(c, n) => match norm_proc(c, gen) {
            Nil => Level::empty(),
            body => Level::one(Block(Box::new(body), n.clone())),
        },
        Input(s, x, c) => {
            let (t, c) = rebind(x, c, gen);
            Level::one(Input(s.clone(), t, Box::new(norm_proc(&c, gen))))
        }
        SelectiveInput(s, x, allowed, c) => {
            let (t, c) = rebind(x, c, gen);
            Level::one(SelectiveInput(s.clone(), t, allowed.clone(), Box::new(norm_proc(&c, gen))))
        }
        AnonInput(x, c) => {
            let (t, c) = rebind(x, c, gen);
            Level::one(AnonInput(t, Box::new(norm_proc(&c, gen))))
        }
        Output(s, y, c) => Level::one(Output(s.clone(), y.clone(), Box::new(norm_proc(c, gen)))),
        Tau(c) => Level::one(Tau(Box::new(norm_proc(c, gen)))),
        Repl(c) => Level::one(Repl(Box::new(norm_proc(c, gen)))),
        Ambient(n, c) => Level::one(Ambient(n.clone(), Box::new(norm_proc(c, gen)))),
        CapIn(n, c) => Level::one(CapIn(n.clone(), Box::new(norm_proc(c, gen)))),
        CapOut(n, c) => Level::one(CapOut(n.clone(), Box::new(norm_proc(c, gen)))),
        CapOpen(n, c) => Level::one(CapOpen(n.clone(), Box::new(norm_proc(c, gen)))),
        Success | AnonOutput(_) | Hole(_) => Level::one(p.clone()),
    }
}

fn sum_leaves<'a>(p: &'a Process, acc: &mut Vec<&'a Process>) {
    match p {
        Process::Sum(l, r) => {
            sum_leaves(l, acc);
            sum_leaves(r, acc);
        }
        _ => acc.push(p),
    }
}

fn par_leaves<'a>(p: &'a Process, acc: &mut Vec<&'a Process>) {
    match p {
        Process::Par(l, r) => {
            par_leaves(l, acc);
            par_leaves(r, acc);
        }
        Process::Nil => {}
        _ => acc.push(p),
    }
}

/// Split a term into its leading restriction chain and parallel components.
pub(crate) fn decompose(p: &Process) -> (Vec<Name>, Vec<&Process>) {
    let mut binders = Vec::new();
    let mut body = p;
    while let Process::Restrict(z, inner) = body {
        binders.push(z.clone());
        body = inner;
    }
    let mut comps = Vec::new();
    par_leaves(body, &mut comps);
    (binders, comps)
}

// Pass 2.

type Renaming = BTreeMap<Name, Name>;

struct Namer {
    offset: u32,
}

impl Namer {
    fn at(&self, depth: u32) -> Name {
        Name::indexed(CANON, 1 + self.offset + depth)
    }

    fn proc(&self, p: &Process, depth: u32, ren: &Renaming) -> Process {
        let (binders, comps) = decompose(p);
        self.level(&binders, &comps, depth, ren)
    }

    fn level(&self, binders: &[Name], comps: &[&Process], depth: u32, ren: &Renaming) -> Process {
        let inner = depth + binders.len() as u32;
        let sorted_comps = |ren: &Renaming| {
            let mut out: Vec<Process> = comps.iter().map(|c| self.comp(c, inner, ren)).collect();
            out.sort();
            out
        };
        if binders.is_empty() {
            return Process::par_all(sorted_comps(ren));
        }
        let mut keyed: Vec<(Vec<Process>, &Name)> = binders
            .iter()
            .map(|b| {
                let mut r = ren.clone();
                for o in binders {
                    r.insert(o.clone(), Name::new(if o == b { SELF } else { OTHER }));
                }
                (sorted_comps(&r), b)
            })
            .collect();
        keyed.sort_by(|x, y| x.0.cmp(&y.0));
        let mut groups: Vec<Vec<&Name>> = Vec::new();
        for (i, (sig, b)) in keyed.iter().enumerate() {
            if i > 0 && keyed[i - 1].0 == *sig {
                groups.last_mut().unwrap().push(b);
            } else {
                groups.push(vec![b]);
            }
        }
        let mut best: Option<Process> = None;
        for order in orderings(&groups) {
            let mut r = ren.clone();
            let names: Vec<Name> = (0..order.len()).map(|i| self.at(depth + i as u32)).collect();
            for (b, n) in order.iter().zip(&names) {
                r.insert((*b).clone(), n.clone());
            }
            let candidate = Process::restrict_all(names, Process::par_all(sorted_comps(&r)));
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        }
        best.expect("at least one ordering")
    }

    fn comp(&self, p: &Process, depth: u32, ren: &Renaming) -> Process {
        use Process::*;
        let r = |n: &Name| ren.get(n).cloned().unwrap_or_else(|| n.clone());
        let bind = |x: &Name, c: &Process| {
            let v = self.at(depth);
            let mut inner = ren.clone();
            inner.insert(x.clone(), v.clone());
            (v, Box::new(self.proc(c, depth + 1, &inner)))
        };
        let cont = |c: &Process| Box::new(self.proc(c, depth, ren));
        match p {
            Nil => Nil,
            Success => Success,
            Hole(i) => Hole(*i),
            AnonOutput(y) => AnonOutput(r(y)),
            Output(s, y, c) => Output(s.map(r), r(y), cont(c)),
            Input(s, x, c) => {
                let (v, c) = bind(x, c);
                Input(s.map(r), v, c)
            }
            SelectiveInput(s, x, allowed, c) => {
                let (v, c) = bind(x, c);
                SelectiveInput(s.map(r), v, allowed.iter().map(r).collect(), c)
            }
            AnonInput(x, c) => {
                let (v, c) = bind(x, c);
                AnonInput(v, c)
            }
            Tau(c) => Tau(cont(c)),
            Match(a, b, c) => Match(r(a), r(b), cont(c)),
            Repl(c) => Repl(cont(c)),
            Ambient(n, c) => Ambient(r(n), cont(c)),
            CapIn(n, c) => CapIn(r(n), cont(c)),
            CapOut(n, c) => CapOut(r(n), cont(c)),
            CapOpen(n, c) => CapOpen(r(n), cont(c)),
            Block(c, n) => Block(cont(c), r(n)),
            Sum(..) => {
                let mut leaves = Vec::new();
                sum_leaves(p, &mut leaves);
                let mut out: Vec<Process> = leaves.into_iter().map(|s| self.proc(s, depth, ren)).collect();
                out.sort();
                Process::sum_all(out)
            }
            Par(..) | Restrict(..) => self.proc(p, depth, ren),
        }
    }
}

/// Every ordering that permutes binders only within their tie group, capped.
fn orderings<'a>(groups: &[Vec<&'a Name>]) -> Vec<Vec<&'a Name>> {
    let mut acc: Vec<Vec<&'a Name>> = vec![vec![]];
    for g in groups {
        let perms = permutations(g);
        let mut next = Vec::new();
        'outer: for prefix in &acc {
            for perm in &perms {
                if next.len() >= MAX_ORDERINGS {
                    break 'outer;
                }
                let mut o = prefix.clone();
                o.extend(perm.iter().copied());
                next.push(o);
            }
        }
        acc = next;
    }
    acc
}

fn permutations<'a>(items: &[&'a Name]) -> Vec<Vec<&'a Name>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            if out.len() >= MAX_ORDERINGS {
                return out;
            }
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Fold `Q | !Q` into `!Q` at every parallel level.
fn absorb(p: &Process) -> Process {
    match p {
        Process::Par(..) | Process::Restrict(..) => {
            let (binders, comps) = decompose(p);
            let mut comps: Vec<Process> = comps.into_iter().map(absorb_inside).collect();
            let bodies: Vec<Process> = comps
                .iter()
                .filter_map(|c| match c {
                    Process::Repl(b) => Some((**b).clone()),
                    _ => None,
                })
                .collect();
            comps.retain(|c| !bodies.contains(c));
            Process::restrict_all(binders, Process::par_all(comps))
        }
        _ => absorb_inside(p),
    }
}

fn absorb_inside(p: &Process) -> Process {
    crate::syntax::process::map_children(p, &mut |c| absorb(c), |_| None)
}
