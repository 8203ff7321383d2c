//! Enumeration of the 2-space: candidate rows meeting every canonical
//! header row in exactly two points.
//!
//! A candidate for row `r >= k` carries the canonical prefix of `r` in the
//! first `k` columns. Beyond that, a column `c >= k` is the pair `(a, x)` of
//! header rows with `1 <= a < x`, so choosing the rest of the row means
//! choosing, for each header row `a` in turn, the ones it still needs inside
//! its own column block (partners `x > a`). The search walks the blocks in
//! column order, trying `0` before `1`, so vectors come out in ascending
//! lexicographic order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitrow::BitRow;
use crate::canonical::{canonical_header, CanonicalHeader};
use crate::error::Result;
use crate::params::BiplaneParams;
use crate::partial::CellConstraint;

struct Walker<'a, F: FnMut(BitRow)> {
    header: &'a CanonicalHeader,
    ones: u128,
    zeros: u128,
    dots: [u8; 16],
    bits: u128,
    visit: F,
}

impl<F: FnMut(BitRow)> Walker<'_, F> {
    fn k(&self) -> usize {
        self.header.params().k
    }

    /// Fills the block owned by header row `a` (column block `a + 1`).
    fn owner(&mut self, a: usize) {
        let k = self.k();
        if a + 1 >= k {
            if self.dots[..k].iter().all(|&d| d == 2) {
                (self.visit)(BitRow::from_word(self.header.params().v, self.bits));
            }
            return;
        }
        // vertices after `a` must still be able to reach two: each later
        // owner contributes at most one, plus their own block
        for x in a + 1..k {
            let need = 2 - self.dots[x] as usize;
            let reach = (x - a) + (k - 1 - x);
            if need > reach {
                return;
            }
        }
        let need = 2usize.saturating_sub(self.dots[a] as usize);
        if self.dots[a] > 2 {
            return;
        }
        let start = self.header.blocks().col_block(a + 1).start;
        self.choose(a, start, a + 1, need);
    }

    /// Decides columns of owner `a` from partner `x` on, `need` ones missing.
    fn choose(&mut self, a: usize, start: usize, x: usize, need: usize) {
        let k = self.k();
        if x == k {
            if need == 0 {
                self.owner(a + 1);
            }
            return;
        }
        if need > k - x {
            return;
        }
        let c = start + (x - a - 1);
        let bit = 1u128 << c;
        let forced_one = self.ones & bit != 0;
        if !forced_one {
            self.choose(a, start, x + 1, need);
        }
        if need > 0 && self.zeros & bit == 0 && self.dots[x] < 2 {
            self.dots[x] += 1;
            self.dots[a] += 1;
            self.bits |= bit;
            self.choose(a, start, x + 1, need - 1);
            self.bits &= !bit;
            self.dots[a] -= 1;
            self.dots[x] -= 1;
        }
    }
}

/// Visits every candidate for `row` in ascending lexicographic order.
///
/// With `diagonal` the candidates have a one at column `row` (the subsets
/// used for trace-`v` constructions); `constraint` adds forced cells.
pub fn visit_row_space<F: FnMut(BitRow)>(
    header: &CanonicalHeader,
    row: usize,
    diagonal: bool,
    constraint: &CellConstraint,
    visit: F,
) {
    let p = header.params();
    assert!(row >= p.k && row < p.v, "row {row} is not below the header");
    let prefix = header.prefix(row);
    let mut ones = constraint.ones.word();
    if diagonal {
        ones |= 1u128 << row;
    }
    let zeros = constraint.zeros.word();
    let prefix_mask = header.prefix_mask().word();
    if ones & zeros != 0
        || ones & prefix_mask & !prefix.word() != 0
        || zeros & prefix.word() != 0
    {
        return;
    }
    let mut dots = [0u8; 16];
    for (h, hrow) in header.rows().iter().enumerate() {
        dots[h] = hrow.dot(&prefix) as u8;
    }
    let mut walker = Walker {
        header,
        ones,
        zeros,
        dots,
        bits: prefix.word(),
        visit,
    };
    walker.owner(1);
}

pub fn enumerate_row_space(
    header: &CanonicalHeader,
    row: usize,
    diagonal: bool,
    constraint: &CellConstraint,
) -> Vec<BitRow> {
    let mut out = Vec::new();
    visit_row_space(header, row, diagonal, constraint, |b| out.push(b));
    out
}

pub fn count_row_space(
    header: &CanonicalHeader,
    row: usize,
    diagonal: bool,
    constraint: &CellConstraint,
) -> u64 {
    let mut n = 0u64;
    visit_row_space(header, row, diagonal, constraint, |_| n += 1);
    n
}

/// The subset `M̀_row`: candidates with a one on the diagonal, optionally
/// narrowed by forced cells (column budgets enter as forced zeros).
pub fn enumerate_subset(
    header: &CanonicalHeader,
    row: usize,
    constraint: Option<&CellConstraint>,
) -> Vec<BitRow> {
    let none = CellConstraint::none(header.params().v);
    enumerate_row_space(header, row, true, constraint.unwrap_or(&none))
}

/// Candidate rows grouped by row index.
#[derive(Clone, Debug)]
pub struct TwoSpace {
    header: CanonicalHeader,
    diagonal: bool,
    subsets: BTreeMap<usize, Vec<BitRow>>,
}

impl TwoSpace {
    /// The diagonal-restricted subsets for every row below the header.
    pub fn build(params: BiplaneParams) -> Self {
        Self::build_with(params, true)
    }

    /// The subsets without the diagonal condition.
    pub fn build_unrestricted(params: BiplaneParams) -> Self {
        Self::build_with(params, false)
    }

    fn build_with(params: BiplaneParams, diagonal: bool) -> Self {
        let header = canonical_header(params);
        let none = CellConstraint::none(params.v);
        let subsets = (params.k..params.v)
            .into_par_iter()
            .map(|i| (i, enumerate_row_space(&header, i, diagonal, &none)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        TwoSpace {
            header,
            diagonal,
            subsets,
        }
    }

    pub fn from_subsets(
        header: CanonicalHeader,
        diagonal: bool,
        subsets: BTreeMap<usize, Vec<BitRow>>,
    ) -> Self {
        TwoSpace {
            header,
            diagonal,
            subsets,
        }
    }

    pub fn params(&self) -> BiplaneParams {
        self.header.params()
    }

    pub fn header(&self) -> &CanonicalHeader {
        &self.header
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn subset(&self, i: usize) -> &[BitRow] {
        self.subsets.get(&i).map_or(&[], |s| s.as_slice())
    }

    pub fn subsets(&self) -> &BTreeMap<usize, Vec<BitRow>> {
        &self.subsets
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.subsets.keys().copied()
    }

    pub fn cardinalities(&self) -> BTreeMap<usize, usize> {
        self.subsets.iter().map(|(&i, s)| (i, s.len())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetCensus {
    pub order: usize,
    /// Common cardinality of all subsets, `None` if they differ.
    pub q: Option<u64>,
    pub per_subset: BTreeMap<usize, u64>,
    pub bound: Option<u128>,
}

impl SubsetCensus {
    pub fn is_constant(&self) -> bool {
        self.q.is_some()
    }
}

/// Counts every diagonal-restricted subset without materializing vectors.
pub fn q_census(order: usize) -> Result<SubsetCensus> {
    let params = BiplaneParams::from_order(order)?;
    let header = canonical_header(params);
    let none = CellConstraint::none(params.v);
    let per_subset: BTreeMap<usize, u64> = (params.k..params.v)
        .into_par_iter()
        .map(|i| (i, count_row_space(&header, i, true, &none)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let mut values = per_subset.values().copied();
    let first = values.next();
    let q = first.filter(|f| values.all(|x| x == *f));
    Ok(SubsetCensus {
        order,
        q,
        per_subset,
        bound: cardinality_bound(params),
    })
}

pub(crate) fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `C(k-2, 2) * C(v-3k+5, k-5)`; `None` when `k < 5` or `v - 3k + 5 < 0`.
pub fn cardinality_bound(params: BiplaneParams) -> Option<u128> {
    let (k, v) = (params.k as i64, params.v as i64);
    if k < 5 || v - 3 * k + 5 < 0 {
        return None;
    }
    Some(binomial((k - 2) as u64, 2) * binomial((v - 3 * k + 5) as u64, (k - 5) as u64))
}
