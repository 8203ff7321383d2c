//! Level sets of 2-space vectors and the regular-vector classification.
//!
//! For a vector `a` in subset `i`, its level set in subset `j` is the set of
//! vectors of subset `j` meeting `a` in exactly two points. A vector is
//! *regular* when one level-set size (its modal value) is shared by enough
//! of the non-exceptional subsets. Subset indices are 0-based row indices.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitrow::BitRow;
use crate::construct::{construct_in_space, ConstructionResult, SearchConfig, StructuralInvariant};
use crate::error::Result;
use crate::params::BiplaneParams;
use crate::twospace::TwoSpace;

/// The subsets exempt from the regularity classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub params: BiplaneParams,
    /// 0-based row indices.
    pub indices: BTreeSet<usize>,
}

impl ExceptionalSet {
    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    /// The same set numbered from 1.
    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `2k-2, 3k-5, 4k-9, ...` (1-based): gaps shrink by one from `k-3` down to 1,
/// ending at `v`.
pub fn exceptional_indices(params: BiplaneParams) -> ExceptionalSet {
    let k = params.k;
    let mut a = 2 * k - 2;
    let mut indices = BTreeSet::from([a - 1]);
    for t in 1..k - 2 {
        a += k - 2 - t;
        indices.insert(a - 1);
    }
    debug_assert_eq!(a, params.v);
    ExceptionalSet { params, indices }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelProfile {
    pub vector: BitRow,
    pub home: usize,
    /// Level-set size in every other subset.
    pub counts: BTreeMap<usize, u32>,
    pub modal_value: u32,
    pub modal_multiplicity: u32,
}

/// Most frequent value and its multiplicity; ties go to the larger value.
fn modal<I: IntoIterator<Item = u32>>(values: I) -> (u32, u32) {
    let mut freq: BTreeMap<u32, u32> = BTreeMap::new();
    for x in values {
        *freq.entry(x).or_default() += 1;
    }
    freq.into_iter()
        .map(|(x, n)| (n, x))
        .max()
        .map_or((0, 0), |(n, x)| (x, n))
}

fn level_count(a: u128, subset: &[BitRow]) -> u32 {
    subset.iter().filter(|b| (a & b.word()).count_ones() == 2).count() as u32
}

/// Level-set sizes of `a` against every subset other than `home`; the modal
/// statistics only look at non-exceptional subsets.
pub fn level_profile(a: &BitRow, home: usize, space: &TwoSpace) -> LevelProfile {
    let e = exceptional_indices(space.params());
    let counts: BTreeMap<usize, u32> = space
        .subsets()
        .iter()
        .filter(|(&j, _)| j != home)
        .map(|(&j, s)| (j, level_count(a.word(), s)))
        .collect();
    let (modal_value, modal_multiplicity) =
        modal(counts.iter().filter(|(j, _)| !e.contains(**j)).map(|(_, &c)| c));
    LevelProfile {
        vector: a.clone(),
        home,
        counts,
        modal_value,
        modal_multiplicity,
    }
}

/// Level-set sizes of every vector of every subset, keyed by home subset;
/// `counts[i][x][t]` is the size for vector `x` of subset `i` against the
/// `t`-th subset of the space (0 on the diagonal).
pub fn level_counts(space: &TwoSpace) -> BTreeMap<usize, Vec<Vec<u32>>> {
    let idx: Vec<usize> = space.indices().collect();
    let words: Vec<Vec<u128>> = idx
        .iter()
        .map(|&i| space.subset(i).iter().map(BitRow::word).collect())
        .collect();
    let n = idx.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (s + 1..n).map(move |t| (s, t))).collect();
    let blocks: Vec<(Vec<u32>, Vec<u32>)> = pairs
        .par_iter()
        .map(|&(s, t)| {
            let mut cs = vec![0u32; words[s].len()];
            let mut ct = vec![0u32; words[t].len()];
            for (x, &a) in words[s].iter().enumerate() {
                for (y, &b) in words[t].iter().enumerate() {
                    if (a & b).count_ones() == 2 {
                        cs[x] += 1;
                        ct[y] += 1;
                    }
                }
            }
            (cs, ct)
        })
        .collect();
    let mut out: Vec<Vec<Vec<u32>>> = words.iter().map(|w| vec![vec![0u32; n]; w.len()]).collect();
    for (&(s, t), (cs, ct)) in pairs.iter().zip(blocks) {
        for (x, c) in cs.into_iter().enumerate() {
            out[s][x][t] = c;
        }
        for (y, c) in ct.into_iter().enumerate() {
            out[t][y][s] = c;
        }
    }
    idx.into_iter().zip(out).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    Alpha,
    Beta,
    Other,
}

/// Regular vectors sharing one modal value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelBin {
    pub tag: ClassTag,
    pub q: u32,
    pub per_subset: BTreeMap<usize, u64>,
    pub total: u64,
}

impl LevelBin {
    /// The per-subset count when it is the same for every subset.
    pub fn constant_count(&self) -> Option<u64> {
        let mut it = self.per_subset.values().copied();
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorSummary {
    pub modal_value: u32,
    pub modal_multiplicity: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub modal_value: u32,
    pub multiplicity: u32,
    pub vectors: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorClassCensus {
    pub order: usize,
    /// Minimum number of non-exceptional level sets sharing the modal value;
    /// by default the largest multiplicity attained.
    pub threshold: u32,
    pub exceptional: ExceptionalSet,
    /// Regular bins, by decreasing total.
    pub bins: Vec<LevelBin>,
    /// Vectors below the threshold, per subset.
    pub irregular: BTreeMap<usize, u64>,
    /// Every (modal value, multiplicity) pair with its number of vectors.
    pub histogram: Vec<HistogramEntry>,
    /// Per-vector modal statistics of the non-exceptional subsets, in subset order.
    #[serde(skip)]
    pub summaries: BTreeMap<usize, Vec<VectorSummary>>,
}

impl VectorClassCensus {
    pub fn bin(&self, tag: ClassTag) -> Option<&LevelBin> {
        self.bins.iter().find(|b| b.tag == tag)
    }

    pub fn alpha(&self) -> Option<&LevelBin> {
        self.bin(ClassTag::Alpha)
    }

    pub fn beta(&self) -> Option<&LevelBin> {
        self.bin(ClassTag::Beta)
    }

    pub fn is_regular(&self, s: &VectorSummary) -> bool {
        s.modal_multiplicity >= self.threshold
    }
}

/// Strict majority of the non-exceptional subsets other than the home one.
pub fn majority_threshold(params: BiplaneParams) -> u32 {
    let e = exceptional_indices(params);
    let foreign = (params.v - params.k) - e.len() - 1;
    (foreign / 2 + 1) as u32
}

/// The largest modal multiplicity any vector attains: only the most
/// regular vectors count as regular.
pub fn max_multiplicity(summaries: &BTreeMap<usize, Vec<VectorSummary>>) -> u32 {
    summaries
        .values()
        .flatten()
        .map(|s| s.modal_multiplicity)
        .max()
        .unwrap_or(0)
}

/// Classifies the vectors of the non-exceptional subsets by their modal
/// level-set size over the other non-exceptional subsets.
pub fn classify_vectors(space: &TwoSpace, threshold: Option<u32>) -> VectorClassCensus {
    let params = space.params();
    let e = exceptional_indices(params);
    let idx: Vec<usize> = space.indices().collect();
    let counts = level_counts(space);
    let summaries: BTreeMap<usize, Vec<VectorSummary>> = counts
        .into_iter()
        .filter(|(i, _)| !e.contains(*i))
        .map(|(i, rows)| {
            let s = rows
                .iter()
                .map(|row| {
                    let (modal_value, modal_multiplicity) = modal(
                        idx.iter()
                            .zip(row)
                            .filter(|(&j, _)| j != i && !e.contains(j))
                            .map(|(_, &c)| c),
                    );
                    VectorSummary {
                        modal_value,
                        modal_multiplicity,
                    }
                })
                .collect();
            (i, s)
        })
        .collect();
    let r = threshold.unwrap_or_else(|| max_multiplicity(&summaries));
    census_from_summaries(params, e, r, summaries)
}

fn census_from_summaries(
    params: BiplaneParams,
    exceptional: ExceptionalSet,
    threshold: u32,
    summaries: BTreeMap<usize, Vec<VectorSummary>>,
) -> VectorClassCensus {
    let mut by_q: BTreeMap<u32, BTreeMap<usize, u64>> = BTreeMap::new();
    let mut irregular = BTreeMap::new();
    let mut hist: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (&i, list) in &summaries {
        let mut bad = 0;
        for s in list {
            *hist.entry((s.modal_value, s.modal_multiplicity)).or_default() += 1;
            if s.modal_multiplicity >= threshold {
                *by_q.entry(s.modal_value).or_default().entry(i).or_default() += 1;
            } else {
                bad += 1;
            }
        }
        irregular.insert(i, bad);
    }
    let mut bins: Vec<LevelBin> = by_q
        .into_iter()
        .map(|(q, per_subset)| LevelBin {
            tag: ClassTag::Other,
            q,
            total: per_subset.values().sum(),
            per_subset,
        })
        .collect();
    bins.sort_by(|a, b| b.total.cmp(&a.total).then(b.q.cmp(&a.q)));
    match bins.len() {
        0 => {}
        1 => bins[0].tag = ClassTag::Alpha,
        _ => {
            let (hi, lo) = if bins[0].q > bins[1].q { (0, 1) } else { (1, 0) };
            bins[hi].tag = ClassTag::Alpha;
            bins[lo].tag = ClassTag::Beta;
        }
    }
    VectorClassCensus {
        order: params.order,
        threshold,
        exceptional,
        bins,
        irregular,
        histogram: hist
            .into_iter()
            .map(|((modal_value, multiplicity), vectors)| HistogramEntry {
                modal_value,
                multiplicity,
                vectors,
            })
            .collect(),
        summaries,
    }
}

/// Classification from a sample: `per_subset` evenly spaced vectors of each
/// non-exceptional subset are profiled against the full space.
pub fn classify_sampled(space: &TwoSpace, threshold: Option<u32>, per_subset: usize) -> VectorClassCensus {
    let params = space.params();
    let e = exceptional_indices(params);
    let summaries: BTreeMap<usize, Vec<VectorSummary>> = space
        .subsets()
        .iter()
        .filter(|(i, _)| !e.contains(**i))
        .map(|(&i, s)| {
            let step = (s.len() / per_subset.max(1)).max(1);
            let picked: Vec<&BitRow> = s.iter().step_by(step).take(per_subset).collect();
            let list = picked
                .par_iter()
                .map(|a| {
                    let p = level_profile(a, i, space);
                    VectorSummary {
                        modal_value: p.modal_value,
                        modal_multiplicity: p.modal_multiplicity,
                    }
                })
                .collect();
            (i, list)
        })
        .collect();
    let r = threshold.unwrap_or_else(|| max_multiplicity(&summaries));
    census_from_summaries(params, e, r, summaries)
}

/// Keeps only regular vectors in the non-exceptional subsets; exceptional
/// subsets are copied as they are.
pub fn restricted_space(space: &TwoSpace, census: &VectorClassCensus) -> TwoSpace {
    let subsets = space
        .subsets()
        .iter()
        .map(|(&i, s)| {
            let kept = match census.summaries.get(&i) {
                Some(sum) if !census.exceptional.contains(i) => s
                    .iter()
                    .zip(sum)
                    .filter(|(_, x)| census.is_regular(x))
                    .map(|(b, _)| b.clone())
                    .collect(),
                _ => s.clone(),
            };
            (i, kept)
        })
        .collect();
    TwoSpace::from_subsets(space.header().clone(), space.is_diagonal(), subsets)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub digest: String,
    pub aut_order: u128,
    pub completions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub order: usize,
    pub threshold: u32,
    pub restricted_sizes: BTreeMap<usize, usize>,
    pub classes_full: Vec<ClassSummary>,
    pub classes_restricted: Vec<ClassSummary>,
    /// Same set of isomorphism classes on both sides.
    pub equal: bool,
    /// False when a budget cut either search short; `equal` is then not conclusive.
    pub exhaustive: bool,
}

fn summarize(r: &ConstructionResult) -> Vec<ClassSummary> {
    let mut v: Vec<ClassSummary> = r
        .classes
        .iter()
        .map(|c| ClassSummary {
            digest: c.certificate.digest(),
            aut_order: c.aut_order,
            completions: c.completions,
        })
        .collect();
    v.sort_by(|a, b| a.digest.cmp(&b.digest));
    v
}

/// Completes the bare canonical header over the diagonal 2-space and over
/// its regular restriction, and compares the isomorphism classes found.
pub fn conjecture_check(
    order: usize,
    threshold: Option<u32>,
    config: &SearchConfig,
) -> Result<ConjectureReport> {
    let params = BiplaneParams::from_order(order)?;
    let full = TwoSpace::build(params);
    let census = classify_vectors(&full, threshold);
    let restricted = restricted_space(&full, &census);
    let inv = StructuralInvariant::empty(params);
    let a = construct_in_space(&inv, &full, true, config)?;
    let b = construct_in_space(&inv, &restricted, true, config)?;
    let classes_full = summarize(&a);
    let classes_restricted = summarize(&b);
    let digests = |v: &[ClassSummary]| v.iter().map(|c| c.digest.clone()).collect::<BTreeSet<_>>();
    Ok(ConjectureReport {
        order,
        threshold: census.threshold,
        restricted_sizes: restricted.cardinalities(),
        equal: digests(&classes_full) == digests(&classes_restricted),
        classes_full,
        classes_restricted,
        exhaustive: a.is_exhaustive() && b.is_exhaustive(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(order: usize) -> BiplaneParams {
        BiplaneParams::from_order(order).unwrap()
    }

    #[test]
    fn exceptional_sets() {
        assert_eq!(exceptional_indices(params(4)).one_based(), vec![10, 13, 15, 16]);
        assert_eq!(
            exceptional_indices(params(7)).one_based(),
            vec![16, 22, 27, 31, 34, 36, 37]
        );
        for order in 1..=11 {
            let p = params(order);
            let e = exceptional_indices(p);
            assert_eq!(e.len(), p.k - 2);
            assert!(e.contains(p.v - 1));
            assert!(e.indices.iter().all(|&i| i >= p.k && i < p.v));
            if p.k >= 4 {
                assert!(e.contains(p.v - 2));
            }
        }
    }

    #[test]
    fn modal_prefers_frequency_then_value() {
        assert_eq!(modal([3, 1, 3, 1]), (3, 2));
        assert_eq!(modal([2, 2, 5]), (2, 2));
        assert_eq!(modal(Vec::new()), (0, 0));
    }

    #[test]
    fn order_four_vectors_are_regular() {
        let space = TwoSpace::build(params(4));
        let c = classify_vectors(&space, None);
        assert_eq!(c.bins.len(), 1);
        let a = c.alpha().unwrap();
        assert_eq!(a.q, 1);
        assert_eq!(a.constant_count(), Some(1));
        assert!(c.irregular.values().all(|&x| x == 0));
        let home = 6;
        let p = level_profile(&space.subset(home)[0], home, &space);
        assert!(p.counts.values().all(|&x| x == 1));
        assert_eq!(p.counts.len(), 9);
    }

    #[test]
    fn pairwise_counts_match_direct_profiles() {
        let space = TwoSpace::build(params(4));
        let all = level_counts(&space);
        let idx: Vec<usize> = space.indices().collect();
        for (&i, rows) in &all {
            for (x, row) in rows.iter().enumerate() {
                let p = level_profile(&space.subset(i)[x], i, &space);
                for (t, &j) in idx.iter().enumerate() {
                    if j != i {
                        assert_eq!(p.counts[&j], row[t]);
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_keeps_exceptional_subsets() {
        let space = TwoSpace::build(params(4));
        let c = classify_vectors(&space, None);
        let r = restricted_space(&space, &c);
        assert_eq!(r.subsets(), space.subsets());
    }
}
