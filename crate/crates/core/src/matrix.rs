//! Incidence matrices, the biplane axioms and the plain-text matrix format.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitrow::BitRow;
use crate::canonical::canonical_header;
use crate::error::{Error, Result};
use crate::params::BiplaneParams;

/// A square `v x v` 0/1 matrix with declared biplane parameters. Row `r`
/// is a point, column `c` a line. Construction only checks the shape; use
/// [`IncidenceMatrix::verify`] for the axioms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IncidenceMatrix {
    params: BiplaneParams,
    rows: Vec<BitRow>,
}

/// First failing axiom found by [`IncidenceMatrix::verify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RowSum { row: usize, sum: u32, expected: usize },
    ColumnSum { column: usize, sum: u32, expected: usize },
    RowDot { first: usize, second: usize, dot: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { row, sum, expected } => {
                write!(f, "row {row} has sum {sum}, expected {expected}")
            }
            Violation::ColumnSum {
                column,
                sum,
                expected,
            } => write!(f, "column {column} has sum {sum}, expected {expected}"),
            Violation::RowDot { first, second, dot } => {
                write!(f, "rows {first} and {second} meet in {dot} points, expected 2")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixStats {
    pub trace: usize,
    pub symmetric: bool,
    pub canonical_header: bool,
}

impl IncidenceMatrix {
    pub fn new(params: BiplaneParams, rows: Vec<BitRow>) -> Result<Self> {
        if rows.len() != params.v || rows.iter().any(|r| r.len() != params.v) {
            return Err(Error::InvalidDimensions(format!(
                "expected a {v}x{v} matrix for order {}",
                params.order,
                v = params.v
            )));
        }
        Ok(IncidenceMatrix { params, rows })
    }

    pub fn params(&self) -> BiplaneParams {
        self.params
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> BitRow {
        self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn column_sums(&self) -> Vec<u32> {
        let mut sums = vec![0; self.params.v];
        for row in &self.rows {
            for c in row.ones() {
                sums[c] += 1;
            }
        }
        sums
    }

    /// Checks row sums, column sums and pairwise row intersections, reporting
    /// the first violation in that order.
    pub fn verify(&self) -> std::result::Result<(), Violation> {
        let k = self.params.k;
        for (r, row) in self.rows.iter().enumerate() {
            if row.weight() as usize != k {
                return Err(Violation::RowSum {
                    row: r,
                    sum: row.weight(),
                    expected: k,
                });
            }
        }
        for (c, &sum) in self.column_sums().iter().enumerate() {
            if sum as usize != k {
                return Err(Violation::ColumnSum {
                    column: c,
                    sum,
                    expected: k,
                });
            }
        }
        for a in 0..self.rows.len() {
            for b in a + 1..self.rows.len() {
                let dot = self.rows[a].dot(&self.rows[b]);
                if dot != 2 {
                    return Err(Violation::RowDot {
                        first: a,
                        second: b,
                        dot,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_biplane(&self) -> bool {
        self.verify().is_ok()
    }

    pub fn trace(&self) -> usize {
        (0..self.params.v).filter(|&i| self.get(i, i)).count()
    }

    pub fn transpose(&self) -> IncidenceMatrix {
        let v = self.params.v;
        let mut cols = vec![BitRow::zeros(v); v];
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                cols[c].set(r, true);
            }
        }
        IncidenceMatrix {
            params: self.params,
            rows: cols,
        }
    }

    /// The dual biplane: points and lines exchanged.
    pub fn dual(&self) -> IncidenceMatrix {
        self.transpose()
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose().rows == self.rows
    }

    pub fn has_canonical_header(&self) -> bool {
        let header = canonical_header(self.params);
        header.rows() == &self.rows[..self.params.k]
    }

    pub fn stats(&self) -> MatrixStats {
        MatrixStats {
            trace: self.trace(),
            symmetric: self.is_symmetric(),
            canonical_header: self.has_canonical_header(),
        }
    }

    /// Applies a relabeling: point `r` moves to row `row_perm[r]`, line `c`
    /// to column `col_perm[c]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> IncidenceMatrix {
        let v = self.params.v;
        let mut rows = vec![BitRow::zeros(v); v];
        for (r, row) in self.rows.iter().enumerate() {
            let target = &mut rows[row_perm[r]];
            for c in row.ones() {
                target.set(col_perm[c], true);
            }
        }
        IncidenceMatrix {
            params: self.params,
            rows,
        }
    }

    /// Serializes in the text format: `order=<n>` then one `0`/`1` line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("order={}\n", self.params.order);
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text format. `.` and `·` read as `0`; blank lines, spaces
    /// and `#` comment lines are skipped; the `order=` header is optional.
    pub fn from_text(text: &str) -> Result<Self> {
        let parsed = parse_bit_lines(text)?;
        let mut order = None;
        let mut rows = Vec::new();
        for line in parsed {
            match line {
                TextLine::Directive { line, key, value } => {
                    if key != "order" {
                        return Err(Error::parse(line, format!("unexpected directive `{key}`")));
                    }
                    let n = value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| Error::parse(line, format!("bad order `{value}`")))?;
                    order = Some(n);
                }
                TextLine::Bits { line, bits } => rows.push((line, bits)),
                TextLine::Block { line, .. } => {
                    return Err(Error::parse(line, "block directive in a matrix file"))
                }
            }
        }
        let params = match order {
            Some(n) => BiplaneParams::from_order(n)?,
            None => BiplaneParams::from_point_count(rows.len())?,
        };
        if rows.len() != params.v {
            return Err(Error::InvalidDimensions(format!(
                "{} rows, expected {} for order {}",
                rows.len(),
                params.v,
                params.order
            )));
        }
        let rows = rows
            .into_iter()
            .map(|(line, bits)| {
                if bits.len() != params.v {
                    Err(Error::parse(
                        line,
                        format!("{} columns, expected {}", bits.len(), params.v),
                    ))
                } else {
                    Ok(BitRow::from_bools(&bits))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        IncidenceMatrix::new(params, rows)
    }
}

impl fmt::Debug for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IncidenceMatrix(order {})\n{}", self.params.order, self.to_text())
    }
}

pub(crate) enum TextLine {
    Directive {
        line: usize,
        key: String,
        value: String,
    },
    Block {
        line: usize,
        i: usize,
        j: usize,
    },
    Bits {
        line: usize,
        bits: Vec<bool>,
    },
}

/// Shared tokenizer for matrix and invariant files. Line numbers are 1-based.
pub(crate) fn parse_bit_lines(text: &str) -> Result<Vec<TextLine>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = trimmed.split_once('=') {
            out.push(TextLine::Directive {
                line,
                key: key.trim().to_string(),
                value: value.trim().to_string(),
            });
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("block") {
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(line, format!("bad block directive `{trimmed}`")))?;
            if nums.len() != 2 {
                return Err(Error::parse(line, "block directive needs two indices"));
            }
            out.push(TextLine::Block {
                line,
                i: nums[0],
                j: nums[1],
            });
            continue;
        }
        let mut bits = Vec::with_capacity(trimmed.len());
        for ch in trimmed.chars() {
            match ch {
                '1' => bits.push(true),
                '0' | '.' | '·' => bits.push(false),
                c if c.is_whitespace() => {}
                c => return Err(Error::parse(line, format!("unexpected character `{c}`"))),
            }
        }
        out.push(TextLine::Bits { line, bits });
    }
    Ok(out)
}
