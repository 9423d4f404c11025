//! Success-respecting weak reduction bisimilarity on bounded graphs.
//!
//! Two approximations bracket the true relation. Partition refinement with
//! every truncated state isolated gives a relation that is certainly a
//! bisimulation, so shared classes mean YES. A greatest-fixpoint pair
//! elimination that lets truncated states match anything only discards pairs
//! that certainly differ, so discarded pairs mean NO.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use petgraph::graph::DiGraph;

use crate::error::Result;
use crate::semantics::graph::success_reachability;
use crate::semantics::{explore_many, Bounds, Execution, StateGraph, Truth, Verdict};
use crate::syntax::{CalculusId, Process};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BisimResult {
    pub verdict: Verdict,
    /// Present only for NO: executions from each side that cannot be matched.
    pub distinguishing: Option<(Execution, Execution)>,
}

/// Weak bisimilarity of `t1` and `t2` explored in one shared graph.
pub fn weak_reduction_bisim(t1: &Process, t2: &Process, calc: CalculusId, bounds: Bounds) -> Result<BisimResult> {
    let g = explore_many(&[t1.clone(), t2.clone()], calc, bounds)?;
    let b = Bisimulator::new(&g);
    Ok(b.relate(g.roots()[0], g.roots()[1]))
}

/// Precomputed classes and weak closures for one graph.
pub struct Bisimulator<'g> {
    g: &'g StateGraph,
    success: Vec<Truth>,
    closure: Vec<FixedBitSet>,
    open: Vec<bool>,
    class: Vec<usize>,
}

impl<'g> Bisimulator<'g> {
    pub fn new(g: &'g StateGraph) -> Self {
        let success = success_reachability(g);
        let closure = weak_closures(g);
        let open = closure.iter().map(|c| c.ones().any(|j| g.is_frontier(j))).collect();
        let class = refine(g, &success, &closure);
        Bisimulator { g, success, closure, open, class }
    }

    pub fn graph(&self) -> &StateGraph {
        self.g
    }

    /// Certainly bisimilar.
    pub fn same_class(&self, s: usize, t: usize) -> bool {
        self.class[s] == self.class[t]
    }

    /// Identifier of the certain-bisimilarity class of `s`.
    pub fn class_id(&self, s: usize) -> usize {
        self.class[s]
    }

    /// States weakly reachable from `s`, including `s`.
    pub fn closure(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.closure[s].ones()
    }

    pub fn refutation(&self, left: usize, right: usize) -> Refutation {
        Refutation::compute(self, left, right)
    }

    pub fn relate(&self, s: usize, t: usize) -> BisimResult {
        if self.same_class(s, t) {
            return BisimResult { verdict: Verdict::yes(), distinguishing: None };
        }
        let r = self.refutation(s, t);
        match r.witness(s, t) {
            Some((a, b)) => BisimResult {
                verdict: Verdict::no(),
                distinguishing: Some((self.g.execution(&a), self.g.execution(&b))),
            },
            None => BisimResult { verdict: Verdict::unknown(self.g.truncation_reason()), distinguishing: None },
        }
    }
}

fn weak_closures(g: &StateGraph) -> Vec<FixedBitSet> {
    let n = g.len();
    let mut dg = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| dg.add_node(())).collect();
    for (i, j) in g.edges() {
        dg.add_edge(nodes[i], nodes[j], ());
    }
    let mut closure = vec![FixedBitSet::with_capacity(n); n];
    // Tarjan yields components sinks first, so successors are already done.
    for scc in petgraph::algo::tarjan_scc(&dg) {
        let mut set = FixedBitSet::with_capacity(n);
        for v in &scc {
            set.insert(v.index());
        }
        for v in &scc {
            for &j in g.successors(v.index()) {
                if !set.contains(j) {
                    set.union_with(&closure[j]);
                }
            }
        }
        for v in &scc {
            closure[v.index()] = set.clone();
        }
    }
    closure
}

fn refine(g: &StateGraph, success: &[Truth], closure: &[FixedBitSet]) -> Vec<usize> {
    let n = g.len();
    // Classes 0 and 1 hold definite No and Yes; everything uncertain is a singleton.
    let mut class: Vec<usize> = (0..n)
        .map(|i| match success[i] {
            _ if g.is_frontier(i) => 2 + i,
            Truth::No => 0,
            Truth::Yes => 1,
            Truth::Unknown => 2 + i,
        })
        .collect();
    let mut count = usize::MAX;
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mut reach: Vec<usize> = closure[i].ones().map(|j| class[j]).collect();
            reach.sort_unstable();
            reach.dedup();
            let fresh = ids.len();
            next.push(*ids.entry((class[i], reach)).or_insert(fresh));
        }
        let new_count = ids.len();
        class = next;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

#[derive(Clone, Copy, Debug)]
enum Why {
    Success,
    Left(usize),
    Right(usize),
}

/// Pairs over `reach(left) × reach(right)` proven not bisimilar.
pub struct Refutation {
    left: Vec<usize>,
    right: Vec<usize>,
    lpos: HashMap<usize, usize>,
    rpos: HashMap<usize, usize>,
    removed: Vec<Option<(u32, Why)>>,
}

impl Refutation {
    fn compute(b: &Bisimulator<'_>, l: usize, r: usize) -> Self {
        let g = b.g;
        let left = g.reachable(l);
        let right = g.reachable(r);
        let lpos: HashMap<usize, usize> = left.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let rpos: HashMap<usize, usize> = right.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let w = right.len();
        let mut removed: Vec<Option<(u32, Why)>> = vec![None; left.len() * w];
        for (a, &s) in left.iter().enumerate() {
            for (c, &t) in right.iter().enumerate() {
                let (x, y) = (b.success[s], b.success[t]);
                if x != Truth::Unknown && y != Truth::Unknown && x != y {
                    removed[a * w + c] = Some((0, Why::Success));
                }
            }
        }
        let mut round = 0;
        loop {
            round += 1;
            let mut changes = Vec::new();
            for (a, &s) in left.iter().enumerate() {
                for (c, &t) in right.iter().enumerate() {
                    if removed[a * w + c].is_some() {
                        continue;
                    }
                    let alive = |s2: usize, t2: usize| removed[lpos[&s2] * w + rpos[&t2]].is_none();
                    let why = if g.is_frontier(s) || b.open[t] {
                        None
                    } else {
                        g.successors(s)
                            .iter()
                            .find(|&&s2| !b.closure[t].ones().any(|t2| alive(s2, t2)))
                            .map(|&s2| Why::Left(s2))
                    };
                    let why = why.or_else(|| {
                        if g.is_frontier(t) || b.open[s] {
                            return None;
                        }
                        g.successors(t)
                            .iter()
                            .find(|&&t2| !b.closure[s].ones().any(|s2| alive(s2, t2)))
                            .map(|&t2| Why::Right(t2))
                    });
                    if let Some(why) = why {
                        changes.push((a * w + c, why));
                    }
                }
            }
            if changes.is_empty() {
                break;
            }
            for (k, why) in changes {
                removed[k] = Some((round, why));
            }
        }
        Refutation { left, right, lpos, rpos, removed }
    }

    fn entry(&self, s: usize, t: usize) -> Option<(u32, Why)> {
        let (a, c) = (self.lpos.get(&s)?, self.rpos.get(&t)?);
        self.removed[a * self.right.len() + c]
    }

    /// `s` and `t` are certainly not bisimilar.
    pub fn is_refuted(&self, s: usize, t: usize) -> bool {
        self.entry(s, t).is_some()
    }

    /// The moves that separate `s` from `t`, one state path per side.
    pub fn witness(&self, s: usize, t: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut entry = self.entry(s, t)?;
        let (mut ls, mut rs) = (vec![s], vec![t]);
        let (mut cs, mut ct) = (s, t);
        loop {
            match entry.1 {
                Why::Success => return Some((ls, rs)),
                Why::Left(s2) => {
                    cs = s2;
                    ls.push(s2);
                }
                Why::Right(t2) => {
                    ct = t2;
                    rs.push(t2);
                }
            }
            entry = self.entry(cs, ct).expect("a removed pair is justified by an earlier removal");
        }
    }

    pub fn domain_size(&self) -> usize {
        self.left.len() * self.right.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_process;

    const B: Bounds = Bounds { max_steps: 12, max_states: 20000, repl_copies: 3 };

    fn bisim(a: &str, b: &str) -> BisimResult {
        weak_reduction_bisim(&parse_process(a).unwrap(), &parse_process(b).unwrap(), CalculusId::Pix, B).unwrap()
    }

    #[test]
    fn reflexive() {
        assert!(bisim("ok", "ok").verdict.is_yes());
    }

    #[test]
    fn weak_tau() {
        assert!(bisim("tau.ok", "ok").verdict.is_yes());
    }

    #[test]
    fn success_respect_with_witness() {
        let r = bisim("ok", "0");
        assert!(r.verdict.is_no());
        let (l, rr) = r.distinguishing.unwrap();
        assert_eq!(l.states, vec![Process::Success]);
        assert_eq!(rr.states, vec![Process::Nil]);
    }

    #[test]
    fn internal_choice_is_distinguished() {
        // tau.ok + tau.0 can commit to a state that has lost success.
        let r = bisim("tau.ok + tau.0", "tau.ok");
        assert!(r.verdict.is_no());
        let (l, _) = r.distinguishing.unwrap();
        assert_eq!(l.states.last(), Some(&Process::Nil));
    }

    #[test]
    fn restricted_handshake_is_a_tau() {
        assert!(bisim("new a.(a!<a>.0 | a(x).ok)", "tau.ok").verdict.is_yes());
    }

    #[test]
    fn truncation_gives_unknown() {
        let tight = Bounds { max_steps: 1, ..B };
        let r = weak_reduction_bisim(
            &parse_process("tau.tau.tau.ok").unwrap(),
            &parse_process("tau.tau.tau.0").unwrap(),
            CalculusId::Pix,
            tight,
        )
        .unwrap();
        assert_eq!(r.verdict.value, Truth::Unknown);
        assert!(r.distinguishing.is_none());
    }
}
