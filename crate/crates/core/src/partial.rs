//! Partially filled incidence matrices: the canonical header, rows fixed so
//! far, per-cell constraints and the column-sum ledger.

use std::collections::BTreeMap;

use crate::bitrow::BitRow;
use crate::canonical::CanonicalHeader;
use crate::error::{Error, Result};
use crate::params::BiplaneParams;

/// Forced ones and forced zeros for a single row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellConstraint {
    pub ones: BitRow,
    pub zeros: BitRow,
}

impl CellConstraint {
    pub fn none(len: usize) -> Self {
        CellConstraint {
            ones: BitRow::zeros(len),
            zeros: BitRow::zeros(len),
        }
    }

    pub fn allows(&self, row: &BitRow) -> bool {
        row.word() & self.ones.word() == self.ones.word() && row.word() & self.zeros.word() == 0
    }

    pub fn forced_cells(&self) -> u32 {
        self.ones.weight() + self.zeros.weight()
    }

    /// Adds the constraints of `other`; `None` on a one/zero clash.
    pub fn merge(&self, other: &CellConstraint) -> Option<CellConstraint> {
        let ones = self.ones.word() | other.ones.word();
        let zeros = self.zeros.word() | other.zeros.word();
        (ones & zeros == 0).then(|| CellConstraint {
            ones: BitRow::from_word(self.ones.len(), ones),
            zeros: BitRow::from_word(self.ones.len(), zeros),
        })
    }
}

#[derive(Clone, Debug)]
pub struct PartialMatrix {
    header: CanonicalHeader,
    fixed: BTreeMap<usize, BitRow>,
    col_remaining: Vec<u32>,
    constraints: Vec<CellConstraint>,
}

impl PartialMatrix {
    /// A partial matrix holding only the canonical header rows.
    pub fn from_header(header: CanonicalHeader) -> Self {
        let p = header.params();
        let mut col_remaining = vec![p.k as u32; p.v];
        let mut fixed = BTreeMap::new();
        for (r, row) in header.rows().iter().enumerate() {
            for c in row.ones() {
                col_remaining[c] -= 1;
            }
            fixed.insert(r, *row);
        }
        PartialMatrix {
            header,
            fixed,
            col_remaining,
            constraints: vec![CellConstraint::none(p.v); p.v],
        }
    }

    pub fn params(&self) -> BiplaneParams {
        self.header.params()
    }

    pub fn header(&self) -> &CanonicalHeader {
        &self.header
    }

    pub fn fixed_rows(&self) -> &BTreeMap<usize, BitRow> {
        &self.fixed
    }

    pub fn is_fixed(&self, row: usize) -> bool {
        self.fixed.contains_key(&row)
    }

    /// Rows below the header that are not fixed yet, ascending.
    pub fn free_rows(&self) -> Vec<usize> {
        let p = self.params();
        (p.k..p.v).filter(|r| !self.is_fixed(*r)).collect()
    }

    pub fn col_remaining(&self) -> &[u32] {
        &self.col_remaining
    }

    /// Columns that already hold `k` ones.
    pub fn exhausted_columns(&self) -> BitRow {
        let v = self.params().v;
        BitRow::from_ones(v, (0..v).filter(|&c| self.col_remaining[c] == 0))
    }

    pub fn constraint(&self, row: usize) -> CellConstraint {
        self.constraints[row]
    }

    /// Forces a single cell. Header rows cannot be constrained.
    pub fn force(&mut self, row: usize, col: usize, bit: bool) -> Result<()> {
        let p = self.params();
        if row < p.k || row >= p.v || col >= p.v {
            return Err(Error::InvalidDimensions(format!(
                "cell ({row}, {col}) is not below the header"
            )));
        }
        let c = &mut self.constraints[row];
        let (same, other) = if bit {
            (&mut c.ones, c.zeros)
        } else {
            (&mut c.zeros, c.ones)
        };
        if other.get(col) {
            return Err(Error::Infeasible(format!(
                "cell ({row}, {col}) is forced to both 0 and 1"
            )));
        }
        same.set(col, true);
        if let Some(existing) = self.fixed.get(&row) {
            if existing.get(col) != bit {
                return Err(Error::Infeasible(format!(
                    "cell ({row}, {col}) contradicts a fixed row"
                )));
            }
        }
        Ok(())
    }

    /// Fixes a row after checking its constraint, the column budgets and
    /// its intersection with every fixed row.
    pub fn fix_row(&mut self, row: usize, value: BitRow) -> Result<()> {
        let p = self.params();
        if row < p.k || row >= p.v || value.len() != p.v {
            return Err(Error::InvalidDimensions(format!("cannot fix row {row}")));
        }
        if self.is_fixed(row) {
            return Err(Error::Infeasible(format!("row {row} is already fixed")));
        }
        if !self.constraints[row].allows(&value) {
            return Err(Error::Infeasible(format!("row {row} violates its cell constraints")));
        }
        if let Some(c) = value.ones().find(|&c| self.col_remaining[c] == 0) {
            return Err(Error::Infeasible(format!("column {c} is already full")));
        }
        if let Some((other, _)) = self.fixed.iter().find(|(_, r)| r.dot(&value) != 2) {
            return Err(Error::Infeasible(format!(
                "row {row} does not meet row {other} in two points"
            )));
        }
        for c in value.ones() {
            self.col_remaining[c] -= 1;
        }
        self.fixed.insert(row, value);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_header;
    use crate::fixtures;

    #[test]
    fn header_ledger() {
        let p = BiplaneParams::from_order(4).unwrap();
        let pm = PartialMatrix::from_header(canonical_header(p));
        assert_eq!(pm.col_remaining()[0], 0);
        assert!(pm.col_remaining()[1..].iter().all(|&r| r == 4));
        assert_eq!(pm.free_rows(), (6..16).collect::<Vec<_>>());
        assert_eq!(pm.exhausted_columns().ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn fixing_b4c_rows_drains_budgets() {
        let m = fixtures::b4c();
        let mut pm = PartialMatrix::from_header(canonical_header(m.params()));
        for r in 6..16 {
            pm.fix_row(r, m.row(r)).unwrap();
        }
        assert!(pm.col_remaining().iter().all(|&r| r == 0));
        assert!(pm.free_rows().is_empty());
    }

    #[test]
    fn rejects_conflicts() {
        let m = fixtures::b4c();
        let mut pm = PartialMatrix::from_header(canonical_header(m.params()));
        pm.force(6, 6, true).unwrap();
        assert!(pm.force(6, 6, false).is_err());
        assert!(pm.force(2, 6, true).is_err());
        pm.force(7, 7, false).unwrap();
        assert!(pm.fix_row(7, m.row(7)).is_err());
        pm.fix_row(6, m.row(6)).unwrap();
        // row 8 of b4c would be fine, but a copy of row 6 meets it in 6 points
        assert!(pm.fix_row(8, m.row(6)).is_err());
    }

    #[test]
    fn constraint_merge() {
        let a = CellConstraint {
            ones: BitRow::from_ones(8, [1]),
            zeros: BitRow::from_ones(8, [2]),
        };
        let b = CellConstraint {
            ones: BitRow::from_ones(8, [2]),
            zeros: BitRow::zeros(8),
        };
        assert!(a.merge(&b).is_none());
        let c = a.merge(&CellConstraint::none(8)).unwrap();
        assert_eq!(c, a);
        assert_eq!(c.forced_cells(), 2);
    }
}
