//! Bounded, three-valued checks of the five encoding criteria.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::encoders::{encode, extract_context, Encoder, Operator};
use crate::equivalence::{weak_reduction_bisim, Bisimulator, Refutation};
use crate::error::{ensure_well_formed, Result};
use crate::semantics::{
    explore, explore_many, has_divergence_in, reaches_success_in, Bounds, StateGraph, Truth, Verdict,
};
use crate::syntax::{alpha_eq, apply_subst, free_names, lift_substitution, Process, Substitution};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Compositionality,
    NameInvariance,
    OperationalCompleteness,
    OperationalSoundness,
    DivergenceReflection,
    SuccessSensitiveness,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Compositionality,
        Criterion::NameInvariance,
        Criterion::OperationalCompleteness,
        Criterion::OperationalSoundness,
        Criterion::DivergenceReflection,
        Criterion::SuccessSensitiveness,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Criterion::Compositionality => "compositionality",
            Criterion::NameInvariance => "name_invariance",
            Criterion::OperationalCompleteness => "operational_completeness",
            Criterion::OperationalSoundness => "operational_soundness",
            Criterion::DivergenceReflection => "divergence_reflection",
            Criterion::SuccessSensitiveness => "success_sensitiveness",
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Complete,
    Sound,
}

/// Evidence attached to a verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub term: Process,
    pub substitution: Option<Substitution>,
    pub trace: Vec<Process>,
    pub note: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PropertyResult {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl PropertyResult {
    fn yes() -> Self {
        PropertyResult { verdict: Verdict::yes(), witness: None }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        PropertyResult { verdict: Verdict::unknown(reason), witness: None }
    }

    fn no(w: Witness) -> Self {
        PropertyResult { verdict: Verdict::no(), witness: Some(w) }
    }

    fn with_witness(verdict: Verdict, w: Witness) -> Self {
        PropertyResult { verdict, witness: Some(w) }
    }
}

fn witness(term: &Process, trace: Vec<Process>, note: impl Into<String>) -> Witness {
    Witness { term: term.clone(), substitution: None, trace, note: note.into() }
}

pub fn check_compositionality(e: &Encoder, s: &Process) -> Result<PropertyResult> {
    ensure_well_formed(s, e.source)?;
    compositional(e, s)
}

fn compositional(e: &Encoder, s: &Process) -> Result<PropertyResult> {
    let (op, kids) = Operator::split(s)?;
    let ctx = extract_context(e, &op, &free_names(s));
    let filled: Vec<Process> = kids.iter().map(|k| encode(e, k)).collect::<Result<_>>()?;
    let whole = encode(e, s)?;
    let expected = ctx.fill(&filled)?;
    if !alpha_eq(&whole, &expected) {
        return Ok(PropertyResult::no(witness(s, vec![whole, expected], "encoding differs from its context filling")));
    }
    for k in kids {
        let r = compositional(e, k)?;
        if !r.verdict.is_yes() {
            return Ok(r);
        }
    }
    Ok(PropertyResult::yes())
}

pub fn check_name_invariance(e: &Encoder, s: &Process, sigma: &Substitution, bounds: Bounds) -> Result<PropertyResult> {
    ensure_well_formed(s, e.source)?;
    let lifted = lift_substitution(&e.policy, sigma);
    let left = encode(e, &apply_subst(sigma, s))?;
    let right = apply_subst(&lifted, &encode(e, s)?);
    let mut w = witness(s, vec![left.clone(), right.clone()], String::new());
    w.substitution = Some(sigma.clone());
    if sigma.is_injective_on(&free_names(s)) {
        if alpha_eq(&left, &right) {
            return Ok(PropertyResult::yes());
        }
        w.note = "injective substitution: translations are not alpha-equal".into();
        return Ok(PropertyResult::no(w));
    }
    let r = weak_reduction_bisim(&left, &right, e.target, bounds)?;
    if r.verdict.is_no() {
        if let Some((l, rr)) = r.distinguishing {
            w.trace = l.states;
            w.note = format!("not bisimilar; other side: {}", render(&rr.states));
        }
        return Ok(PropertyResult::no(w));
    }
    Ok(PropertyResult { verdict: r.verdict, witness: None })
}

fn render(states: &[Process]) -> String {
    states.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" -> ")
}

/// Source graph, encoded states and their joint target graph.
struct Correspondence {
    source: StateGraph,
    /// Source state ids in BFS order.
    src_states: Vec<usize>,
    target: StateGraph,
    /// Target state of each encoded source state, aligned with `src_states`.
    images: Vec<usize>,
}

fn correspondence(e: &Encoder, s: &Process, bounds: Bounds) -> Result<Correspondence> {
    let source = explore(s, e.source, bounds)?;
    let src_states = source.reachable(source.root());
    let mut roots = vec![encode(e, s)?];
    for &i in &src_states {
        roots.push(encode(e, source.state(i))?);
    }
    let target = explore_many(&roots, e.target, bounds)?;
    let images = target.roots()[1..].to_vec();
    Ok(Correspondence { source, src_states, target, images })
}

pub fn check_operational_correspondence(
    e: &Encoder,
    s: &Process,
    direction: Direction,
    bounds: Bounds,
) -> Result<PropertyResult> {
    ensure_well_formed(s, e.source)?;
    let c = correspondence(e, s, bounds)?;
    let b = Bisimulator::new(&c.target);
    let root = c.target.roots()[0];
    match direction {
        Direction::Complete => Ok(complete(s, &c, &b, root)),
        Direction::Sound => Ok(sound(s, &c, &b, root)),
    }
}

fn source_open(c: &Correspondence) -> bool {
    c.src_states.iter().any(|&i| c.source.is_frontier(i))
}

fn unknown_reason(c: &Correspondence) -> String {
    let mut parts = Vec::new();
    for (side, g) in [("source", &c.source), ("target", &c.target)] {
        let r = g.truncation_reason();
        if !r.is_empty() {
            parts.push(format!("{side}: {r}"));
        }
    }
    if parts.is_empty() {
        "bisimilarity undecided".into()
    } else {
        parts.join("; ")
    }
}

fn is_open(b: &Bisimulator<'_>, t: usize) -> bool {
    b.closure(t).any(|j| b.graph().is_frontier(j))
}

fn complete(s: &Process, c: &Correspondence, b: &Bisimulator<'_>, root: usize) -> PropertyResult {
    let reach: Vec<usize> = b.closure(root).collect();
    let mut undecided = false;
    for (k, &img) in c.images.iter().enumerate() {
        if reach.iter().any(|&t| b.same_class(t, img)) {
            continue;
        }
        let refuted = !is_open(b, root) && {
            let r = b.refutation(root, img);
            reach.iter().all(|&t| r.is_refuted(t, img))
        };
        if refuted {
            let src = c.src_states[k];
            let trace = c.source.execution(&c.source.path_from(c.source.root(), |i| i == src).unwrap_or_default());
            return PropertyResult::no(witness(
                s,
                trace.states,
                format!("no target derivative is bisimilar to the translation of {}", c.source.state(src)),
            ));
        }
        undecided = true;
    }
    if undecided || source_open(c) {
        PropertyResult::unknown(unknown_reason(c))
    } else {
        PropertyResult::yes()
    }
}

fn sound(s: &Process, c: &Correspondence, b: &Bisimulator<'_>, root: usize) -> PropertyResult {
    let classes: BTreeSet<usize> = c.images.iter().map(|&img| b.class_id(img)).collect();
    let mut refutations: HashMap<usize, Refutation> = HashMap::new();
    let mut undecided = false;
    for t in c.target.reachable(root) {
        if b.closure(t).any(|t2| classes.contains(&b.class_id(t2))) {
            continue;
        }
        let refuted = !is_open(b, t)
            && !source_open(c)
            && c.images.iter().all(|&img| {
                let r = refutations.entry(img).or_insert_with(|| b.refutation(root, img));
                b.closure(t).all(|t2| r.is_refuted(t2, img))
            });
        if refuted {
            let path = c.target.path_from(root, |i| i == t).unwrap_or_default();
            return PropertyResult::no(witness(
                s,
                c.target.execution(&path).states,
                "target derivative matches no source derivative".to_string(),
            ));
        }
        undecided = true;
    }
    if undecided {
        PropertyResult::unknown(unknown_reason(c))
    } else {
        PropertyResult::yes()
    }
}

pub fn check_divergence_reflection(e: &Encoder, s: &Process, bounds: Bounds) -> Result<PropertyResult> {
    ensure_well_formed(s, e.source)?;
    let sg = explore(s, e.source, bounds)?;
    let tg = explore(&encode(e, s)?, e.target, bounds)?;
    let (src, tgt) = (has_divergence_in(&sg, sg.root()), has_divergence_in(&tg, tg.root()));
    if tgt.is_no() || src.is_yes() {
        return Ok(PropertyResult::yes());
    }
    if tgt.is_yes() && src.is_no() {
        let trace = divergent_trace(&tg).unwrap_or_default();
        return Ok(PropertyResult::no(witness(s, trace, "target diverges, source does not")));
    }
    let reason = if src.is_definite() { tgt.reason } else { src.reason };
    Ok(PropertyResult::unknown(reason.unwrap_or_default()))
}

/// A path from the root into a cycle, closed by repeating the cycle's entry.
fn divergent_trace(g: &StateGraph) -> Option<Vec<Process>> {
    let reach = g.reachable(g.root());
    for &i in &reach {
        for &j in g.successors(i) {
            if let Some(back) = g.path_from(j, |k| k == i) {
                let mut path = g.path_from(g.root(), |k| k == i)?;
                path.extend(back);
                return Some(g.execution(&path).states);
            }
        }
    }
    None
}

pub fn check_success_sensitiveness(e: &Encoder, s: &Process, bounds: Bounds) -> Result<PropertyResult> {
    ensure_well_formed(s, e.source)?;
    let sg = explore(s, e.source, bounds)?;
    let tg = explore(&encode(e, s)?, e.target, bounds)?;
    let (src, tgt) = (reaches_success_in(&sg, sg.root()), reaches_success_in(&tg, tg.root()));
    let note = format!("source reaches success: {src}; target reaches success: {tgt}");
    match (src.value, tgt.value) {
        (Truth::Unknown, _) | (_, Truth::Unknown) => {
            let reason = if src.is_definite() { tgt.reason } else { src.reason };
            Ok(PropertyResult::unknown(reason.unwrap_or_default()))
        }
        (a, b) => {
            let (g, side) = if tgt.is_yes() { (&tg, "target") } else { (&sg, "source") };
            let trace =
                g.path_from(g.root(), |i| g.is_successful(i)).map(|p| g.execution(&p).states).unwrap_or_default();
            let w = witness(s, trace, format!("{note}; trace is the {side} run to success"));
            if a == b {
                Ok(PropertyResult::with_witness(Verdict::yes(), w))
            } else {
                Ok(PropertyResult::no(w))
            }
        }
    }
}

/// Combine per-substitution verdicts: any NO wins, then any UNKNOWN.
pub(crate) fn combine(results: Vec<PropertyResult>) -> PropertyResult {
    let mut unknown = None;
    for r in results {
        match r.verdict.value {
            Truth::No => return r,
            Truth::Unknown if unknown.is_none() => unknown = Some(r),
            _ => {}
        }
    }
    unknown.unwrap_or_else(PropertyResult::yes)
}

/// All criteria for one term, in [`Criterion::ALL`] order.
pub(crate) fn check_all(
    e: &Encoder,
    s: &Process,
    sigmas: &[Substitution],
    bounds: Bounds,
) -> Result<BTreeMap<Criterion, PropertyResult>> {
    let mut out = BTreeMap::new();
    out.insert(Criterion::Compositionality, check_compositionality(e, s)?);
    let ni = sigmas.iter().map(|sigma| check_name_invariance(e, s, sigma, bounds)).collect::<Result<Vec<_>>>()?;
    out.insert(Criterion::NameInvariance, combine(ni));
    let c = correspondence(e, s, bounds)?;
    let b = Bisimulator::new(&c.target);
    let root = c.target.roots()[0];
    out.insert(Criterion::OperationalCompleteness, complete(s, &c, &b, root));
    out.insert(Criterion::OperationalSoundness, sound(s, &c, &b, root));
    out.insert(Criterion::DivergenceReflection, check_divergence_reflection(e, s, bounds)?);
    out.insert(Criterion::SuccessSensitiveness, check_success_sensitiveness(e, s, bounds)?);
    Ok(out)
}

/// Keep a successful-witness only where it explains a failure.
pub(crate) fn strip_positive(mut r: PropertyResult) -> PropertyResult {
    if !r.verdict.is_no() {
        r.witness = None;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::EncoderId;
    use crate::text::parse_process;

    const B: Bounds = Bounds { max_steps: 12, max_states: 20000, repl_copies: 3 };

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    fn enc(id: EncoderId) -> Encoder {
        Encoder::new(id)
    }

    #[test]
    fn compositionality_examples() {
        for (id, t) in
            [(EncoderId::Polyadic, "[a=b]ok | 0"), (EncoderId::Ambients, "!(tau.0)"), (EncoderId::NaivePix, "[a=b]ok")]
        {
            assert!(check_compositionality(&enc(id), &p(t)).unwrap().verdict.is_yes(), "{t}");
        }
    }

    #[test]
    fn compositionality_rejects_ill_formed() {
        assert!(check_compositionality(&enc(EncoderId::Polyadic), &p("a[ok]")).is_err());
    }

    #[test]
    fn name_invariance_examples() {
        let e = enc(EncoderId::Polyadic);
        let n = crate::syntax::Name::new;
        let inj = Substitution::single(n("a"), n("c"));
        let non = Substitution::single(n("a"), n("b"));
        for sigma in [inj, non, Substitution::identity()] {
            assert!(check_name_invariance(&e, &p("[a=b]ok"), &sigma, B).unwrap().verdict.is_yes(), "{sigma}");
        }
    }

    #[test]
    fn correspondence_examples() {
        let poly = enc(EncoderId::Polyadic);
        let r = check_operational_correspondence(&poly, &p("tau.[a=a]ok"), Direction::Complete, B).unwrap();
        assert!(r.verdict.is_yes());
        let r = check_operational_correspondence(&poly, &p("[a=b]ok"), Direction::Sound, B).unwrap();
        assert!(r.verdict.is_yes());
        let amb = enc(EncoderId::Ambients);
        let r = check_operational_correspondence(&amb, &p("[a=a]ok"), Direction::Complete, B).unwrap();
        assert!(r.verdict.is_yes());
    }

    #[test]
    fn divergence_examples() {
        let r = check_divergence_reflection(&enc(EncoderId::Polyadic), &p("[a=b]ok"), B).unwrap();
        assert!(r.verdict.is_yes());
        for id in EncoderId::ALL {
            assert!(check_divergence_reflection(&enc(id), &p("!(tau.0)"), B).unwrap().verdict.is_yes());
        }
        let r = check_divergence_reflection(&enc(EncoderId::Blocking), &p("[a=a]ok"), B).unwrap();
        assert!(r.verdict.is_yes());
    }

    #[test]
    fn success_sensitiveness_examples() {
        let r = check_success_sensitiveness(&enc(EncoderId::Polyadic), &p("[a=a]ok"), B).unwrap();
        assert!(r.verdict.is_yes());
        let r = check_success_sensitiveness(&enc(EncoderId::Ambients), &p("[a=b]ok"), B).unwrap();
        assert!(r.verdict.is_yes());
        let r = check_success_sensitiveness(&enc(EncoderId::NaivePix), &p("[a=b]ok | [b=a]ok"), B).unwrap();
        assert!(r.verdict.is_no());
        let w = r.witness.unwrap();
        assert_eq!(w.trace.len(), 2);
        assert!(crate::syntax::is_successful(&w.trace[1]));
    }

    #[test]
    fn truncated_success_is_unknown() {
        let tight = Bounds { max_steps: 1, ..B };
        let r = check_success_sensitiveness(&enc(EncoderId::Polyadic), &p("tau.tau.[a=a]ok"), tight).unwrap();
        assert_eq!(r.verdict.value, Truth::Unknown);
        assert!(r.verdict.reason.unwrap().contains("max_steps"));
    }

    #[test]
    fn combine_prefers_no_then_unknown() {
        let w = witness(&Process::Nil, vec![], "");
        let r = combine(vec![PropertyResult::yes(), PropertyResult::unknown("x"), PropertyResult::no(w)]);
        assert!(r.verdict.is_no());
        let r = combine(vec![PropertyResult::yes(), PropertyResult::unknown("x")]);
        assert_eq!(r.verdict.value, Truth::Unknown);
        assert!(combine(vec![]).verdict.is_yes());
    }
}
