//! Bounded exploration and three-valued verdicts.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_well_formed, Result};
use crate::syntax::{is_successful, CalculusId, Process};

use super::canon::canonical;
use super::step::successors_unchecked;

/// Exploration limits.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Bounds {
    /// States at this distance from a root are not expanded further.
    pub max_steps: usize,
    pub max_states: usize,
    /// 0 disables replication, 1 lets one copy act, 2 or more lets two copies interact.
    pub repl_copies: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_steps: 12, max_states: 20000, repl_copies: 3 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::Yes => "yes",
            Truth::No => "no",
            Truth::Unknown => "unknown",
        })
    }
}

/// A three-valued answer; `reason` names the exhausted bound when unknown.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verdict {
    pub value: Truth,
    pub reason: Option<String>,
}

impl Verdict {
    pub fn yes() -> Self {
        Verdict { value: Truth::Yes, reason: None }
    }

    pub fn no() -> Self {
        Verdict { value: Truth::No, reason: None }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        Verdict { value: Truth::Unknown, reason: Some(reason.into()) }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::yes()
        } else {
            Self::no()
        }
    }

    pub fn is_yes(&self) -> bool {
        self.value == Truth::Yes
    }

    pub fn is_no(&self) -> bool {
        self.value == Truth::No
    }

    pub fn is_definite(&self) -> bool {
        self.value != Truth::Unknown
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            Some(r) => write!(f, "{} ({r})", self.value),
            None => write!(f, "{}", self.value),
        }
    }
}

/// A path of states, each consecutive pair an edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Execution {
    pub states: Vec<Process>,
}

impl Execution {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }
}

/// Reduction graph over canonical states. State ids are BFS discovery order.
#[derive(Clone, Debug)]
pub struct StateGraph {
    states: Vec<Process>,
    index: HashMap<Process, usize>,
    succ: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    roots: Vec<usize>,
    successful: Vec<bool>,
    terminal: Vec<bool>,
    frontier: Vec<bool>,
    exhausted: BTreeSet<&'static str>,
    bounds: Bounds,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn root(&self) -> usize {
        self.roots[0]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn state(&self, i: usize) -> &Process {
        &self.states[i]
    }

    pub fn states(&self) -> &[Process] {
        &self.states
    }

    pub fn id_of(&self, p: &Process) -> Option<usize> {
        self.index.get(&canonical(p)).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, ss) in self.succ.iter().enumerate() {
            out.extend(ss.iter().map(|&j| (i, j)));
        }
        out
    }

    pub fn is_successful(&self, i: usize) -> bool {
        self.successful[i]
    }

    pub fn is_terminal(&self, i: usize) -> bool {
        self.terminal[i]
    }

    pub fn is_frontier(&self, i: usize) -> bool {
        self.frontier[i]
    }

    pub fn has_frontier(&self) -> bool {
        self.frontier.iter().any(|&f| f)
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Which bounds cut the exploration, e.g. `"max_steps"`.
    pub fn exhausted(&self) -> Vec<&'static str> {
        self.exhausted.iter().copied().collect()
    }

    pub(crate) fn truncation_reason(&self) -> String {
        let names: Vec<String> = self
            .exhausted
            .iter()
            .map(|b| match *b {
                "max_steps" => format!("max_steps={} exhausted", self.bounds.max_steps),
                "max_states" => format!("max_states={} exhausted", self.bounds.max_states),
                other => other.to_string(),
            })
            .collect();
        names.join(", ")
    }

    /// Ids reachable from `from`, including itself, in BFS order.
    pub fn reachable(&self, from: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![from];
        seen[from] = true;
        let mut k = 0;
        while k < order.len() {
            for &j in &self.succ[order[k]] {
                if !seen[j] {
                    seen[j] = true;
                    order.push(j);
                }
            }
            k += 1;
        }
        order
    }

    /// Shortest path from `from` to the first state satisfying `goal`.
    pub fn path_from(&self, from: usize, goal: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut prev: Vec<Option<usize>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(i) = queue.pop_front() {
            if goal(i) {
                let mut path = vec![i];
                let mut cur = i;
                while let Some(p) = prev[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &j in &self.succ[i] {
                if !seen[j] {
                    seen[j] = true;
                    prev[j] = Some(i);
                    queue.push_back(j);
                }
            }
        }
        None
    }

    /// The BFS-tree path from a root to `i`.
    pub fn path_to(&self, i: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut cur = i;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn execution(&self, path: &[usize]) -> Execution {
        Execution { states: path.iter().map(|&i| self.states[i].clone()).collect() }
    }
}

/// Breadth-first closure of the canonical successors of `p`.
pub fn explore(p: &Process, calc: CalculusId, bounds: Bounds) -> Result<StateGraph> {
    explore_many(std::slice::from_ref(p), calc, bounds)
}

/// One graph shared by several roots. Equal canonical states are shared.
pub fn explore_many(roots: &[Process], calc: CalculusId, bounds: Bounds) -> Result<StateGraph> {
    for r in roots {
        ensure_well_formed(r, calc)?;
    }
    let mut g = StateGraph {
        states: vec![],
        index: HashMap::new(),
        succ: vec![],
        parent: vec![],
        roots: vec![],
        successful: vec![],
        terminal: vec![],
        frontier: vec![],
        exhausted: BTreeSet::new(),
        bounds,
    };
    let mut depth = Vec::new();
    let mut queue = VecDeque::new();
    for r in roots {
        let c = canonical(r);
        let id = match g.index.get(&c) {
            Some(&id) => id,
            None => {
                let id = add_state(&mut g, c, None);
                depth.push(0);
                queue.push_back(id);
                id
            }
        };
        g.roots.push(id);
    }
    while let Some(i) = queue.pop_front() {
        let next = successors_unchecked(&g.states[i], bounds.repl_copies);
        if next.is_empty() {
            g.terminal[i] = true;
            continue;
        }
        let unseen = next.iter().filter(|s| !g.index.contains_key(*s)).count();
        if unseen > 0 && depth[i] >= bounds.max_steps {
            g.frontier[i] = true;
            g.exhausted.insert("max_steps");
            continue;
        }
        if g.states.len() + unseen > bounds.max_states {
            g.frontier[i] = true;
            g.exhausted.insert("max_states");
            continue;
        }
        let mut out = Vec::with_capacity(next.len());
        for s in next {
            let j = match g.index.get(&s) {
                Some(&j) => j,
                None => {
                    let j = add_state(&mut g, s, Some(i));
                    depth.push(depth[i] + 1);
                    queue.push_back(j);
                    j
                }
            };
            out.push(j);
        }
        g.succ[i] = out;
    }
    Ok(g)
}

fn add_state(g: &mut StateGraph, p: Process, parent: Option<usize>) -> usize {
    let id = g.states.len();
    g.successful.push(is_successful(&p));
    g.index.insert(p.clone(), id);
    g.states.push(p);
    g.succ.push(vec![]);
    g.parent.push(parent);
    g.terminal.push(false);
    g.frontier.push(false);
    id
}

/// `⇓✓` per state: some successful state is reachable.
pub(crate) fn success_reachability(g: &StateGraph) -> Vec<Truth> {
    // Backward propagation from successful states and from frontier states.
    let n = g.len();
    let mut pred: Vec<Vec<usize>> = vec![vec![]; n];
    for (i, ss) in g.succ.iter().enumerate() {
        for &j in ss {
            pred[j].push(i);
        }
    }
    let spread = |seeds: Vec<usize>| {
        let mut mark = vec![false; n];
        let mut stack = seeds;
        while let Some(i) = stack.pop() {
            if !mark[i] {
                mark[i] = true;
                stack.extend(pred[i].iter().copied());
            }
        }
        mark
    };
    let yes = spread((0..n).filter(|&i| g.successful[i]).collect());
    let maybe = spread((0..n).filter(|&i| g.frontier[i]).collect());
    (0..n)
        .map(|i| {
            if yes[i] {
                Truth::Yes
            } else if maybe[i] {
                Truth::Unknown
            } else {
                Truth::No
            }
        })
        .collect()
}

fn verdict_at(g: &StateGraph, t: Truth) -> Verdict {
    match t {
        Truth::Unknown => Verdict::unknown(g.truncation_reason()),
        Truth::Yes => Verdict::yes(),
        Truth::No => Verdict::no(),
    }
}

pub fn reaches_success_in(g: &StateGraph, from: usize) -> Verdict {
    verdict_at(g, success_reachability(g)[from])
}

pub fn always_reaches_success_in(g: &StateGraph, from: usize) -> Verdict {
    let mut tainted = vec![false; g.len()];
    let mut stack = vec![from];
    let mut frontier = false;
    while let Some(i) = stack.pop() {
        if tainted[i] || g.successful[i] {
            continue;
        }
        tainted[i] = true;
        if g.terminal[i] {
            return Verdict::no();
        }
        frontier |= g.frontier[i];
        stack.extend(g.succ[i].iter().copied());
    }
    if frontier {
        Verdict::unknown(g.truncation_reason())
    } else {
        Verdict::yes()
    }
}

pub fn has_divergence_in(g: &StateGraph, from: usize) -> Verdict {
    let reach = g.reachable(from);
    let mut sub = petgraph::graphmap::DiGraphMap::<usize, ()>::new();
    for &i in &reach {
        sub.add_node(i);
        for &j in &g.succ[i] {
            sub.add_edge(i, j, ());
        }
    }
    if petgraph::algo::is_cyclic_directed(&sub) {
        Verdict::yes()
    } else if reach.iter().any(|&i| g.frontier[i]) {
        Verdict::unknown(g.truncation_reason())
    } else {
        Verdict::no()
    }
}

pub fn reaches_success(p: &Process, calc: CalculusId, bounds: Bounds) -> Result<Verdict> {
    let g = explore(p, calc, bounds)?;
    Ok(reaches_success_in(&g, g.root()))
}

pub fn always_reaches_success(p: &Process, calc: CalculusId, bounds: Bounds) -> Result<Verdict> {
    let g = explore(p, calc, bounds)?;
    Ok(always_reaches_success_in(&g, g.root()))
}

pub fn has_divergence(p: &Process, calc: CalculusId, bounds: Bounds) -> Result<Verdict> {
    let g = explore(p, calc, bounds)?;
    Ok(has_divergence_in(&g, g.root()))
}

/// A shortest execution from the root to a successful state.
pub fn trace_to_success(p: &Process, calc: CalculusId, bounds: Bounds) -> Result<Option<Execution>> {
    let g = explore(p, calc, bounds)?;
    Ok(g.path_from(g.root(), |i| g.is_successful(i)).map(|path| g.execution(&path)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    const B: Bounds = Bounds { max_steps: 12, max_states: 20000, repl_copies: 3 };

    #[test]
    fn tau_ok_graph() {
        let g = explore(&p("tau.ok"), CalculusId::Pix, B).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert!(g.is_successful(1) && g.is_terminal(1));
        assert!(!g.has_frontier());
    }

    #[test]
    fn guarded_match_is_stuck() {
        let g = explore(&p("[a=b]ok"), CalculusId::Pi, B).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.is_terminal(0) && !g.is_successful(0));
    }

    #[test]
    fn replicated_tau_loops() {
        let g = explore(&p("!(tau.0)"), CalculusId::Pix, B).unwrap();
        assert_eq!(g.edges(), vec![(0, 0)]);
        assert!(has_divergence_in(&g, 0).is_yes());
    }

    #[test]
    fn verdicts() {
        let v = |s: &str, calc| reaches_success(&p(s), calc, B).unwrap().value;
        assert_eq!(v("x!<a>.0 | x(b).[a=b]ok", CalculusId::Pi), Truth::Yes);
        assert_eq!(v("new a.(x!<a>.0) | x(b).[a=b]ok", CalculusId::Pi), Truth::No);
        assert_eq!(v("[a=b]ok | [b=a]ok", CalculusId::Pi), Truth::No);
        let a = |s: &str| always_reaches_success(&p(s), CalculusId::Pix, B).unwrap().value;
        assert_eq!(a("tau.ok + tau.0"), Truth::No);
        assert_eq!(a("ok + 0"), Truth::Yes);
        assert_eq!(a("tau.ok"), Truth::Yes);
        let d = |s: &str| has_divergence(&p(s), CalculusId::Pix, B).unwrap().value;
        assert_eq!(d("tau.0"), Truth::No);
        assert_eq!(d("!(a(x).0)"), Truth::No);
    }

    #[test]
    fn truncation_is_unknown_with_reason() {
        let tight = Bounds { max_steps: 1, ..B };
        let v = reaches_success(&p("tau.tau.ok"), CalculusId::Pix, tight).unwrap();
        assert_eq!(v.value, Truth::Unknown);
        assert_eq!(v.reason.as_deref(), Some("max_steps=1 exhausted"));
        let tiny = Bounds { max_states: 2, ..B };
        let v = reaches_success(&p("tau.tau.ok"), CalculusId::Pix, tiny).unwrap();
        assert_eq!(v.reason.as_deref(), Some("max_states=2 exhausted"));
    }

    #[test]
    fn traces() {
        let t = trace_to_success(&p("tau.tau.ok"), CalculusId::Pix, B).unwrap().unwrap();
        assert_eq!(t.states.len(), 3);
        let t = trace_to_success(&p("x!<a>.0 | x(b).[a=b]ok"), CalculusId::Pi, B).unwrap().unwrap();
        assert_eq!(t.states.len(), 2);
        assert!(trace_to_success(&p("[a=b]ok"), CalculusId::Pi, B).unwrap().is_none());
    }

    #[test]
    fn shared_roots() {
        let g = explore_many(&[p("tau.ok"), p("ok")], CalculusId::Pix, B).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.roots(), &[0, 1]);
    }
}
