//! Invariant-seeded completion search and the census of the isomorphism
//! classes it reaches.

pub mod complete;
pub mod invariant;

use std::collections::BTreeMap;

use crate::autgroup::{analyze, Certificate};
use crate::canonical::{canonical_header, check_lemma_zero_pattern};
use crate::error::Result;
use crate::matrix::IncidenceMatrix;
use crate::params::BiplaneParams;
use crate::twospace::TwoSpace;

pub use complete::{complete, complete_with, CompletionStats, RowOrder, SearchConfig};
pub use invariant::{apply_invariant, builtin_d12, builtin_invariant, Builtin, StructuralInvariant};

/// Completions grouped into one isomorphism class.
#[derive(Clone, Debug)]
pub struct IsoClass {
    pub certificate: Certificate,
    pub aut_order: u128,
    /// First completion of this class in emission order.
    pub representative: IncidenceMatrix,
    pub completions: u64,
    pub symmetric: u64,
    pub full_trace: u64,
    /// Completions violating the trace-`v` zero pattern (only counted for
    /// full-trace matrices).
    pub lemma_violations: u64,
}

impl IsoClass {
    pub fn all_symmetric(&self) -> bool {
        self.symmetric == self.completions
    }

    pub fn none_symmetric(&self) -> bool {
        self.symmetric == 0
    }

    pub fn all_full_trace(&self) -> bool {
        self.full_trace == self.completions
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionResult {
    pub params: BiplaneParams,
    pub invariant: String,
    pub trace_restriction: bool,
    /// Classes sorted by automorphism order, then certificate.
    pub classes: Vec<IsoClass>,
    pub stats: CompletionStats,
}

impl ConstructionResult {
    pub fn aut_orders(&self) -> Vec<u128> {
        self.classes.iter().map(|c| c.aut_order).collect()
    }

    pub fn is_exhaustive(&self) -> bool {
        self.stats.exhaustive
    }
}

/// Per-task accumulator: classes keyed by certificate, in first-seen order.
#[derive(Default)]
struct Classes {
    order: Vec<Certificate>,
    map: BTreeMap<Certificate, IsoClass>,
}

impl Classes {
    fn add(&mut self, m: IncidenceMatrix) {
        let a = analyze(&m);
        let v = m.params().v;
        let symmetric = m.is_symmetric();
        let full = m.trace() == v;
        let lemma_bad = full && check_lemma_zero_pattern(&m).is_err();
        let entry = self.map.entry(a.certificate.clone()).or_insert_with(|| {
            self.order.push(a.certificate.clone());
            IsoClass {
                certificate: a.certificate,
                aut_order: a.aut.group_order,
                representative: m,
                completions: 0,
                symmetric: 0,
                full_trace: 0,
                lemma_violations: 0,
            }
        });
        entry.completions += 1;
        entry.symmetric += symmetric as u64;
        entry.full_trace += full as u64;
        entry.lemma_violations += lemma_bad as u64;
    }

    fn merge(mut self, other: Classes) -> Classes {
        for cert in other.order {
            let c = &other.map[&cert];
            match self.map.get_mut(&cert) {
                Some(mine) => {
                    mine.completions += c.completions;
                    mine.symmetric += c.symmetric;
                    mine.full_trace += c.full_trace;
                    mine.lemma_violations += c.lemma_violations;
                }
                None => {
                    self.order.push(cert.clone());
                    self.map.insert(cert, c.clone());
                }
            }
        }
        self
    }
}

/// Runs the completion search over `space` from the invariant's partial
/// matrix and groups the completions by certificate as they are emitted.
pub fn construct_in_space(
    inv: &StructuralInvariant,
    space: &TwoSpace,
    trace_restriction: bool,
    config: &SearchConfig,
) -> Result<ConstructionResult> {
    let params = space.params();
    let header = canonical_header(params);
    let pm = apply_invariant(&header, inv, trace_restriction)?;
    let (accs, stats) = complete_with(&pm, space, config, Classes::default, |acc, m| acc.add(m));
    let merged = accs.into_iter().fold(Classes::default(), Classes::merge);
    let mut classes: Vec<IsoClass> = merged.map.into_values().collect();
    classes.sort_by(|a, b| {
        a.aut_order
            .cmp(&b.aut_order)
            .then_with(|| a.certificate.cmp(&b.certificate))
    });
    Ok(ConstructionResult {
        params,
        invariant: inv.name.clone(),
        trace_restriction,
        classes,
        stats,
    })
}

/// The space a search draws its rows from: the diagonal subsets under the
/// trace restriction, the unrestricted ones otherwise.
pub fn search_space(params: BiplaneParams, trace_restriction: bool) -> TwoSpace {
    if trace_restriction {
        TwoSpace::build(params)
    } else {
        TwoSpace::build_unrestricted(params)
    }
}

/// Applies the invariant, completes, and groups by isomorphism class.
pub fn construct_census(
    params: BiplaneParams,
    inv: &StructuralInvariant,
    trace_restriction: bool,
    config: &SearchConfig,
) -> Result<ConstructionResult> {
    inv.validate(params)?;
    let space = search_space(params, trace_restriction);
    construct_in_space(inv, &space, trace_restriction, config)
}
