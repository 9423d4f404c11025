//! Encoding criteria over a corpus, corpus generation and witness search.

mod corpus;
mod criteria;
mod witness;

use std::collections::BTreeMap;

use serde::Serialize;

pub use corpus::{default_corpus, default_substitutions, gen_terms, pinned_terms, NAME_POOL, PINNED};
pub use criteria::{
    check_compositionality, check_divergence_reflection, check_name_invariance, check_operational_correspondence,
    check_success_sensitiveness, Criterion, Direction, PropertyResult, Witness,
};
pub use witness::{find_enabling_comm_witness, CommWitness};

use crate::encoders::Encoder;
use crate::error::{ensure_well_formed, Result};
use crate::semantics::{Bounds, Truth};
use crate::syntax::{freshen_binders, Process, Substitution};

/// The equivalence every correspondence and invariance verdict is relative to.
pub const EQUIVALENCE: &str = "bounded weak reduction bisimilarity respecting success";

#[derive(Clone, Copy, PartialEq, Eq, Default, Debug, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
}

impl Tally {
    fn add(&mut self, t: Truth) {
        match t {
            Truth::Yes => self.pass += 1,
            Truth::No => self.fail += 1,
            Truth::Unknown => self.unknown += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.unknown
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct WitnessRecord {
    pub trace: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substitution: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ResultRecord {
    pub term: String,
    pub criterion: Criterion,
    pub verdict: Truth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CriteriaReport {
    pub encoder: String,
    pub bounds: Bounds,
    pub equivalence: &'static str,
    pub corpus_size: usize,
    pub tallies: BTreeMap<Criterion, Tally>,
    pub results: Vec<ResultRecord>,
}

impl CriteriaReport {
    pub fn failures(&self) -> impl Iterator<Item = &ResultRecord> {
        self.results.iter().filter(|r| r.verdict == Truth::No)
    }

    pub fn tally(&self, c: Criterion) -> Tally {
        self.tallies.get(&c).copied().unwrap_or_default()
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }
}

fn record(term: &Process, c: Criterion, r: &PropertyResult) -> ResultRecord {
    ResultRecord {
        term: term.to_string(),
        criterion: c,
        verdict: r.verdict.value,
        reason: r.verdict.reason.clone(),
        witness: r.witness.as_ref().map(|w| WitnessRecord {
            trace: w.trace.iter().map(|p| p.to_string()).collect(),
            substitution: w.substitution.as_ref().map(|s| s.to_string()),
            note: w.note.clone(),
        }),
    }
}

/// Every criterion on every corpus term, results in corpus then criterion order.
pub fn run_gorla_suite(
    e: &Encoder,
    corpus: &[Process],
    sigmas: &[Substitution],
    bounds: Bounds,
) -> Result<CriteriaReport> {
    for s in corpus {
        ensure_well_formed(s, e.source)?;
    }
    let mut tallies: BTreeMap<Criterion, Tally> = Criterion::ALL.iter().map(|&c| (c, Tally::default())).collect();
    let mut results = Vec::new();
    for s in corpus {
        let fresh = freshen_binders(s);
        for (c, r) in criteria::check_all(e, &fresh, sigmas, bounds)? {
            let r = criteria::strip_positive(r);
            tallies.get_mut(&c).expect("every criterion is tallied").add(r.verdict.value);
            results.push(record(s, c, &r));
        }
    }
    Ok(CriteriaReport {
        encoder: e.id.tag().to_string(),
        bounds,
        equivalence: EQUIVALENCE,
        corpus_size: corpus.len(),
        tallies,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::EncoderId;
    use crate::text::parse_process;

    const B: Bounds = Bounds { max_steps: 12, max_states: 20000, repl_copies: 3 };

    #[test]
    fn empty_corpus() {
        let r = run_gorla_suite(&Encoder::new(EncoderId::Polyadic), &[], &default_substitutions(), B).unwrap();
        assert!(r.results.is_empty());
        assert!(r.tallies.values().all(|t| t.total() == 0));
    }

    #[test]
    fn naive_separation() {
        let corpus = [parse_process("[a=b]ok | [b=a]ok").unwrap()];
        let r = run_gorla_suite(&Encoder::new(EncoderId::NaivePix), &corpus, &default_substitutions(), B).unwrap();
        assert_eq!(r.tally(Criterion::SuccessSensitiveness).fail, 1);
        let f = r.failures().find(|f| f.criterion == Criterion::SuccessSensitiveness).unwrap();
        assert_eq!(f.witness.as_ref().unwrap().trace.len(), 2);
    }

    #[test]
    fn pinned_polyadic_is_clean() {
        let corpus = pinned_terms();
        let r = run_gorla_suite(&Encoder::new(EncoderId::Polyadic), &corpus, &default_substitutions(), B).unwrap();
        for c in Criterion::ALL {
            assert_eq!(r.tally(c).total(), corpus.len());
            assert_eq!(r.tally(c).pass, corpus.len(), "{c}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn ill_formed_corpus_is_rejected() {
        let corpus = [parse_process("a[ok]").unwrap()];
        assert!(run_gorla_suite(&Encoder::new(EncoderId::Polyadic), &corpus, &[], B).is_err());
    }
}
