//! Small dense 0/1 matrices and the named generator matrices used to build
//! canonical headers and structural invariants.

use std::fmt;

use crate::error::{Error, Result};

/// Dense row-major 0/1 matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = BinMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::InvalidDimensions(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &x) in row.iter().enumerate() {
                if x > 1 {
                    return Err(Error::InvalidDimensions(format!("entry ({r}, {c}) is {x}")));
                }
                m.set(r, c, x == 1);
            }
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BinMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.cols + c] == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r * self.cols + c] = value as u8;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = BinMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Boolean-free integer product; entries must stay 0/1.
    pub fn mul(&self, rhs: &BinMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidDimensions(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = BinMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let s: usize = (0..self.cols)
                    .map(|t| (self.get(r, t) && rhs.get(t, c)) as usize)
                    .sum();
                if s > 1 {
                    return Err(Error::InvalidDimensions(format!(
                        "product entry ({r}, {c}) is {s}, not binary"
                    )));
                }
                out.set(r, c, s == 1);
            }
        }
        Ok(out)
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &BinMatrix) -> Result<Self> {
        if self.cols != below.cols {
            return Err(Error::InvalidDimensions(format!(
                "vstack of widths {} and {}",
                self.cols, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(BinMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `right` next to `self`.
    pub fn hstack(&self, right: &BinMatrix) -> Result<Self> {
        if self.rows != right.rows {
            return Err(Error::InvalidDimensions(format!(
                "hstack of heights {} and {}",
                self.rows, right.rows
            )));
        }
        let mut out = BinMatrix::zeros(self.rows, self.cols + right.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..right.cols {
                out.set(r, self.cols + c, right.get(r, c));
            }
        }
        Ok(out)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The named generator matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `(m+1) x n`: `m - n` zero rows, one all-ones row, then `I_n`.
    K { m: usize, n: usize },
    Identity(usize),
    /// All-ones `J_{m,n}`.
    Unit { m: usize, n: usize },
    Zero { m: usize, n: usize },
    /// Permutation matrix of the n-cycle raised to the i-th power.
    Cyclic { n: usize, i: usize },
    /// Order-reversing permutation matrix.
    Anticyclic(usize),
    /// `diag(I_i, C_{n-i}^2)`.
    T { n: usize, i: usize },
    /// Adjacency matrix of the n-vertex path with loops at both ends.
    Path(usize),
    /// `Path(n)` with its columns reversed.
    L(usize),
    ReverseColumns(Box<Generator>),
}

pub fn build_generator(kind: &Generator) -> Result<BinMatrix> {
    let bad = |msg: String| Err(Error::InvalidDimensions(msg));
    match *kind {
        Generator::K { m, n } => {
            if n == 0 || m < n {
                return bad(format!("K({m},{n}) requires m >= n >= 1"));
            }
            BinMatrix::zeros(m - n, n)
                .vstack(&BinMatrix::from_rows(&[vec![1u8; n]])?)?
                .vstack(&BinMatrix::identity(n))
        }
        Generator::Identity(n) => Ok(BinMatrix::identity(n)),
        Generator::Unit { m, n } => {
            let mut j = BinMatrix::zeros(m, n);
            j.data.fill(1);
            Ok(j)
        }
        Generator::Zero { m, n } => Ok(BinMatrix::zeros(m, n)),
        Generator::Cyclic { n, i } => {
            if n == 0 {
                return bad("cyclic matrix of size 0".into());
            }
            let mut c = BinMatrix::zeros(n, n);
            for r in 0..n {
                c.set(r, (r + i) % n, true);
            }
            Ok(c)
        }
        Generator::Anticyclic(n) => {
            let mut a = BinMatrix::zeros(n, n);
            for r in 0..n {
                a.set(r, n - 1 - r, true);
            }
            Ok(a)
        }
        Generator::T { n, i } => {
            if i > n {
                return bad(format!("T({n},{i}) requires i <= n"));
            }
            let mut t = BinMatrix::zeros(n, n);
            for r in 0..i {
                t.set(r, r, true);
            }
            if n > i {
                let tail = build_generator(&Generator::Cyclic { n: n - i, i: 2 })?;
                for r in 0..n - i {
                    for c in 0..n - i {
                        t.set(i + r, i + c, tail.get(r, c));
                    }
                }
            }
            Ok(t)
        }
        Generator::Path(n) => {
            if n < 2 {
                return bad(format!("path matrix needs n >= 2, got {n}"));
            }
            let mut p = BinMatrix::zeros(n, n);
            p.set(0, 0, true);
            p.set(n - 1, n - 1, true);
            for r in 0..n - 1 {
                p.set(r, r + 1, true);
                p.set(r + 1, r, true);
            }
            Ok(p)
        }
        Generator::L(n) => build_generator(&Generator::ReverseColumns(Box::new(Generator::Path(n)))),
        Generator::ReverseColumns(ref inner) => {
            let m = build_generator(inner)?;
            m.mul(&build_generator(&Generator::Anticyclic(m.cols()))?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &BinMatrix) -> Vec<Vec<u8>> {
        m.to_rows()
    }

    #[test]
    fn k_generator() {
        let k = build_generator(&Generator::K { m: 5, n: 3 }).unwrap();
        assert_eq!(
            rows(&k),
            vec![
                vec![0, 0, 0],
                vec![0, 0, 0],
                vec![1, 1, 1],
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1]
            ]
        );
        assert!(build_generator(&Generator::K { m: 2, n: 3 }).is_err());
        assert!(build_generator(&Generator::K { m: 2, n: 0 }).is_err());
    }

    #[test]
    fn path_and_l() {
        let p3 = build_generator(&Generator::Path(3)).unwrap();
        assert_eq!(rows(&p3), vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        let l3 = build_generator(&Generator::L(3)).unwrap();
        assert_eq!(rows(&l3), vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        let l4 = build_generator(&Generator::L(4)).unwrap();
        assert_eq!(
            rows(&l4),
            vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![1, 1, 0, 0]]
        );
        // reversing L undoes the reversal
        let back = build_generator(&Generator::ReverseColumns(Box::new(Generator::L(4)))).unwrap();
        assert_eq!(back, build_generator(&Generator::Path(4)).unwrap());
        let p4_rev =
            build_generator(&Generator::ReverseColumns(Box::new(Generator::Path(4)))).unwrap();
        assert_eq!(
            rows(&p4_rev),
            vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![1, 1, 0, 0]]
        );
    }

    #[test]
    fn cyclic_and_t() {
        let c = build_generator(&Generator::Cyclic { n: 4, i: 1 }).unwrap();
        assert_eq!(c.row(0), &[0, 1, 0, 0]);
        assert_eq!(c.row(3), &[1, 0, 0, 0]);
        let c0 = build_generator(&Generator::Cyclic { n: 4, i: 4 }).unwrap();
        assert_eq!(c0, BinMatrix::identity(4));
        let t = build_generator(&Generator::T { n: 5, i: 2 }).unwrap();
        assert_eq!(t.row(0), &[1, 0, 0, 0, 0]);
        assert_eq!(t.row(2), &[0, 0, 0, 0, 1]);
        assert_eq!(t.row(3), &[0, 0, 1, 0, 0]);
        let a = build_generator(&Generator::Anticyclic(3)).unwrap();
        assert_eq!(rows(&a), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(a.mul(&a).unwrap(), BinMatrix::identity(3));
    }

    #[test]
    fn stacking_checks_dimensions() {
        let a = BinMatrix::zeros(2, 3);
        assert!(a.vstack(&BinMatrix::zeros(1, 2)).is_err());
        assert!(a.hstack(&BinMatrix::zeros(3, 2)).is_err());
        assert_eq!(a.hstack(&BinMatrix::identity(2)).unwrap().cols(), 5);
    }
}
