//! The canonical form of a biplane incidence matrix: the fixed first `k`
//! rows and columns, the block layout of the remainder, and the zero
//! pattern forced on the `D` blocks when the trace equals `v`.
//!
//! Layout (0-based). Column block 0 is column 0. Column block `j`
//! (`1 <= j < k`) has width `k - j`; header row `j - 1` is all ones there and
//! header rows `j..k` carry an identity. Row group `b` (`1 <= b <= k - 2`)
//! holds the `k - 1 - b` rows below the header that sit under column block
//! `b + 1`, so `D^{b,b}` is square and contains the diagonal.
//!
//! Every column `c >= 1` meets the header in exactly two rows; those two
//! header rows are the column's *pair*. Every row below the header has its
//! two ones inside columns `1..k` at the pair of its own diagonal column.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bitrow::BitRow;
use crate::matrix::IncidenceMatrix;
use crate::params::BiplaneParams;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIndex {
    params: BiplaneParams,
    col_blocks: Vec<Range<usize>>,
    row_groups: Vec<Range<usize>>,
}

impl BlockIndex {
    pub fn new(params: BiplaneParams) -> Self {
        let k = params.k;
        let mut col_blocks = vec![0..1];
        let mut start = 1;
        for j in 1..k {
            col_blocks.push(start..start + (k - j));
            start += k - j;
        }
        debug_assert_eq!(start, params.v);
        // row group b aligns with column block b + 1
        let row_groups = (1..=k - 2).map(|b| col_blocks[b + 1].clone()).collect();
        BlockIndex {
            params,
            col_blocks,
            row_groups,
        }
    }

    pub fn params(&self) -> BiplaneParams {
        self.params
    }

    /// Column block `j`, `0 <= j < k`.
    pub fn col_block(&self, j: usize) -> Range<usize> {
        self.col_blocks[j].clone()
    }

    pub fn col_blocks(&self) -> &[Range<usize>] {
        &self.col_blocks
    }

    /// Row group `b`, `1 <= b <= k - 2`.
    pub fn row_group(&self, b: usize) -> Range<usize> {
        assert!(b >= 1 && b <= self.params.k - 2, "row group {b} out of range");
        self.row_groups[b - 1].clone()
    }

    pub fn num_groups(&self) -> usize {
        self.params.k - 2
    }

    /// Row and column ranges of `D^{i,j}`, `1 <= i, j <= k - 2`.
    pub fn d_block(&self, i: usize, j: usize) -> (Range<usize>, Range<usize>) {
        assert!(j >= 1 && j <= self.params.k - 2, "block column {j} out of range");
        (self.row_group(i), self.col_block(j + 1))
    }

    /// The header-row pair of column `c >= 1`.
    pub fn column_pair(&self, c: usize) -> (usize, usize) {
        assert!(c >= 1 && c < self.params.v, "column {c} has no pair");
        let j = self.col_blocks.iter().position(|r| r.contains(&c)).unwrap();
        let t = c - self.col_blocks[j].start;
        (j - 1, j + t)
    }

    /// Column carrying the header-row pair `(a, b)`, `a < b`.
    pub fn pair_column(&self, a: usize, b: usize) -> usize {
        assert!(a < b && b < self.params.k);
        self.col_blocks[a + 1].start + (b - a - 1)
    }

    /// The header-row pair of row `r >= k`; equals the pair of column `r`.
    pub fn row_pair(&self, r: usize) -> (usize, usize) {
        assert!(r >= self.params.k && r < self.params.v, "row {r} is not below the header");
        self.column_pair(r)
    }

    /// `(group, position)` of a row below the header.
    pub fn row_location(&self, r: usize) -> (usize, usize) {
        let (a, b) = self.row_pair(r);
        (a, b - a - 1)
    }
}

/// The first `k` rows of a canonical incidence matrix together with its
/// block layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalHeader {
    rows: Vec<BitRow>,
    blocks: BlockIndex,
}

pub fn canonical_header(params: BiplaneParams) -> CanonicalHeader {
    let (k, v) = (params.k, params.v);
    let blocks = BlockIndex::new(params);
    let mut rows = vec![BitRow::zeros(v); k];
    for row in rows.iter_mut() {
        row.set(0, true);
    }
    for j in 1..k {
        for (t, c) in blocks.col_block(j).enumerate() {
            rows[j - 1].set(c, true);
            rows[j + t].set(c, true);
        }
    }
    CanonicalHeader { rows, blocks }
}

impl CanonicalHeader {
    pub fn params(&self) -> BiplaneParams {
        self.blocks.params
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn blocks(&self) -> &BlockIndex {
        &self.blocks
    }

    /// Entries of row `r >= k` in the first `k` columns: ones at the two
    /// columns of block 1 named by the row's pair.
    pub fn prefix(&self, r: usize) -> BitRow {
        let (a, b) = self.blocks.row_pair(r);
        BitRow::from_ones(self.params().v, [a, b])
    }

    /// Mask of the first `k` columns.
    pub fn prefix_mask(&self) -> BitRow {
        BitRow::from_ones(self.params().v, 0..self.params().k)
    }

    /// True when row `r >= k` agrees with the canonical first-k-column pattern.
    pub fn has_canonical_prefix(&self, r: usize, row: &BitRow) -> bool {
        let mask = self.prefix_mask().word();
        row.word() & mask == self.prefix(r).word()
    }
}

/// Which of the two zero relations failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaRelation {
    /// `D^{i,j}[j-i, l] = 0` (row form) or its transpose.
    Row,
    /// `D^{i,j}[j-i+l, l] = 0` (diagonal form) or its transpose.
    Diagonal,
}

/// Location of a nonzero where the trace-`v` zero pattern requires a zero.
/// `i`, `j`, `l` use the 1-based block indexing of `D^{i,j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaViolation {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub relation: LemmaRelation,
    pub row: usize,
    pub column: usize,
}

/// Every cell `(row, column)` that must be zero in a canonical matrix of
/// trace `v`, tagged with its block coordinates. Row-major within each block.
pub fn lemma_zero_cells(params: BiplaneParams) -> Vec<LemmaViolation> {
    let blocks = BlockIndex::new(params);
    let g = params.k - 2;
    let mut cells = Vec::new();
    for i in 1..=g {
        for j in 1..=g {
            if i == j {
                continue;
            }
            let (rows, cols) = blocks.d_block(i, j);
            let (h, w) = (rows.len(), cols.len());
            let mut push = |r: usize, c: usize, l: usize, relation| {
                cells.push(LemmaViolation {
                    i,
                    j,
                    l,
                    relation,
                    row: rows.start + r,
                    column: cols.start + c,
                })
            };
            if i < j {
                let d = j - i;
                for l in 1..=w {
                    push(d - 1, l - 1, l, LemmaRelation::Row);
                }
                for l in 1..=w {
                    if d + l <= h {
                        push(d + l - 1, l - 1, l, LemmaRelation::Diagonal);
                    }
                }
            } else {
                let d = i - j;
                for l in 1..=h {
                    push(l - 1, d - 1, l, LemmaRelation::Row);
                }
                for l in 1..=h {
                    if d + l <= w {
                        push(l - 1, d + l - 1, l, LemmaRelation::Diagonal);
                    }
                }
            }
        }
    }
    cells
}

/// Checks the zero pattern that trace `v` forces on the `D` blocks of a
/// canonical matrix. Returns the first offending cell.
pub fn check_lemma_zero_pattern(m: &IncidenceMatrix) -> Result<(), LemmaViolation> {
    match lemma_zero_cells(m.params())
        .into_iter()
        .find(|cell| m.get(cell.row, cell.column))
    {
        Some(cell) => Err(cell),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn params(order: usize) -> BiplaneParams {
        BiplaneParams::from_order(order).unwrap()
    }

    #[test]
    fn order_four_header_matches_b4c() {
        let h = canonical_header(params(4));
        let b4c = fixtures::b4c();
        assert_eq!(h.rows(), &b4c.rows()[..6]);
        assert_eq!(h.rows()[1].ones().collect::<Vec<_>>(), vec![0, 1, 6, 7, 8, 9]);
        for r in 6..16 {
            assert!(h.has_canonical_prefix(r, &b4c.row(r)), "row {r}");
        }
    }

    #[test]
    fn order_one_header() {
        let h = canonical_header(params(1));
        let rows: Vec<String> = h.rows().iter().map(|r| r.to_string()).collect();
        assert_eq!(rows, vec!["1110", "1101", "1011"]);
    }

    #[test]
    fn block_layout() {
        let b = BlockIndex::new(params(4));
        assert_eq!(b.col_block(0), 0..1);
        assert_eq!(b.col_block(1), 1..6);
        assert_eq!(b.col_block(2), 6..10);
        assert_eq!(b.col_block(5), 15..16);
        assert_eq!(b.row_group(1), 6..10);
        assert_eq!(b.row_group(4), 15..16);
        assert_eq!(b.d_block(1, 2), (6..10, 10..13));
        assert_eq!(b.row_pair(6), (1, 2));
        assert_eq!(b.row_pair(15), (4, 5));
        assert_eq!(b.column_pair(3), (0, 3));
        assert_eq!(b.pair_column(2, 4), 11);
        assert_eq!(b.row_location(12), (2, 2));
    }

    #[test]
    fn lemma_holds_on_b4c() {
        assert_eq!(check_lemma_zero_pattern(&fixtures::b4c()), Ok(()));
    }

    #[test]
    fn planted_one_is_reported() {
        let m = fixtures::b4c();
        let mut rows = m.rows().to_vec();
        let (r, c) = BlockIndex::new(m.params()).d_block(1, 2);
        rows[r.start].set(c.start, true);
        let bad = IncidenceMatrix::new(m.params(), rows).unwrap();
        let err = check_lemma_zero_pattern(&bad).unwrap_err();
        assert_eq!((err.i, err.j, err.l), (1, 2, 1));
        assert_eq!(err.relation, LemmaRelation::Row);
    }

    proptest! {
        #[test]
        fn header_rows_pairwise_meet_in_two(order in 1usize..=11) {
            let p = params(order);
            let h = canonical_header(p);
            prop_assert_eq!(h.rows().len(), p.k);
            for (a, ra) in h.rows().iter().enumerate() {
                prop_assert_eq!(ra.weight() as usize, p.k);
                for rb in &h.rows()[a + 1..] {
                    prop_assert_eq!(ra.dot(rb), 2);
                }
            }
            let mut sums = vec![0usize; p.v];
            for r in h.rows() {
                for c in r.ones() {
                    sums[c] += 1;
                }
            }
            prop_assert_eq!(sums[0], p.k);
            prop_assert!(sums[1..].iter().all(|&s| s == 2));
        }

        #[test]
        fn blocks_partition_the_matrix(order in 1usize..=11) {
            let p = params(order);
            let b = BlockIndex::new(p);
            let cols: Vec<usize> = b.col_blocks().iter().flat_map(|r| r.clone()).collect();
            prop_assert_eq!(cols, (0..p.v).collect::<Vec<_>>());
            let rows: Vec<usize> = (1..=p.k - 2).flat_map(|g| b.row_group(g)).collect();
            prop_assert_eq!(rows, (p.k..p.v).collect::<Vec<_>>());
            for i in 1..=p.k - 2 {
                for j in 1..=p.k - 2 {
                    let (r, c) = b.d_block(i, j);
                    prop_assert_eq!((r.len(), c.len()), (p.k - 1 - i, p.k - 1 - j));
                }
            }
            for c in 1..p.v {
                let (x, y) = b.column_pair(c);
                prop_assert_eq!(b.pair_column(x, y), c);
            }
        }
    }
}
