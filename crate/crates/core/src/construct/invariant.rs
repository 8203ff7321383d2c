//! Structural invariants: fixed `D` blocks that seed a completion search.

use std::fmt;
use std::str::FromStr;

use crate::canonical::{lemma_zero_cells, CanonicalHeader};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::generators::{build_generator, BinMatrix, Generator};
use crate::matrix::{parse_bit_lines, TextLine};
use crate::params::BiplaneParams;
use crate::partial::PartialMatrix;

/// One fixed block `D^{i,j}` (1-based block indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockAssignment {
    pub i: usize,
    pub j: usize,
    pub matrix: BinMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralInvariant {
    pub name: String,
    pub order: usize,
    pub blocks: Vec<BlockAssignment>,
}

/// The invariants that ship with the library.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    A,
    B,
    C,
    FigB7,
    FigB9c,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [Builtin::A, Builtin::B, Builtin::C, Builtin::FigB7, Builtin::FigB9c];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::A => "A",
            Builtin::B => "B",
            Builtin::C => "C",
            Builtin::FigB7 => "FIG_B7",
            Builtin::FigB9c => "FIG_B9C",
        }
    }

    pub fn order(self) -> usize {
        match self {
            Builtin::A => 4,
            Builtin::B | Builtin::FigB7 => 7,
            Builtin::C | Builtin::FigB9c => 9,
        }
    }

    /// Whether searches seeded by this invariant use the trace-`v`
    /// restriction unless told otherwise. Under it `B` and `FigB9c` have no
    /// completion and `C` only reaches the symmetric class.
    pub fn default_trace(self) -> bool {
        !matches!(self, Builtin::B | Builtin::C | Builtin::FigB9c)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownInvariant(s.to_string()))
    }
}

fn gen(g: Generator) -> BinMatrix {
    build_generator(&g).expect("builtin generator dimensions are valid")
}

/// `0_{1,2n}` over `[0_n X; Y 0_n]`.
fn two_by_two(n: usize, upper_right: BinMatrix, lower_left: BinMatrix) -> BinMatrix {
    let zero = gen(Generator::Zero { m: n, n });
    let top = zero.hstack(&upper_right).unwrap();
    let bottom = lower_left.hstack(&zero).unwrap();
    gen(Generator::Zero { m: 1, n: 2 * n })
        .vstack(&top)
        .unwrap()
        .vstack(&bottom)
        .unwrap()
}

/// The `D^{1,2}` block of a builtin invariant.
pub fn builtin_d12(b: Builtin) -> BinMatrix {
    match b {
        Builtin::A => gen(Generator::Zero { m: 1, n: 3 })
            .vstack(&gen(Generator::L(3)))
            .unwrap(),
        Builtin::B => two_by_two(3, gen(Generator::L(3)), gen(Generator::L(3))),
        Builtin::C => two_by_two(
            4,
            gen(Generator::ReverseColumns(Box::new(Generator::L(4)))),
            gen(Generator::L(4)),
        ),
        Builtin::FigB7 => fixtures::block_from_strs(&fixtures::FIG_B7_D12),
        Builtin::FigB9c => fixtures::block_from_strs(&fixtures::FIG_B9C_D12),
    }
}

/// `D^{1,1} = I_{k-2}` together with the named `D^{1,2}`.
pub fn builtin_invariant(b: Builtin, params: BiplaneParams) -> Result<StructuralInvariant> {
    if params.order != b.order() {
        return Err(Error::InvariantOrder {
            name: b.name().to_string(),
            expected: b.order(),
            order: params.order,
        });
    }
    Ok(StructuralInvariant::seeded(b.name(), params, builtin_d12(b)))
}

impl StructuralInvariant {
    /// `D^{1,1} = I_{k-2}` plus a given `D^{1,2}`.
    pub fn seeded(name: &str, params: BiplaneParams, d12: BinMatrix) -> Self {
        StructuralInvariant {
            name: name.to_string(),
            order: params.order,
            blocks: vec![
                BlockAssignment {
                    i: 1,
                    j: 1,
                    matrix: BinMatrix::identity(params.k - 2),
                },
                BlockAssignment {
                    i: 1,
                    j: 2,
                    matrix: d12,
                },
            ],
        }
    }

    /// An invariant with no fixed blocks.
    pub fn empty(params: BiplaneParams) -> Self {
        StructuralInvariant {
            name: "none".to_string(),
            order: params.order,
            blocks: Vec::new(),
        }
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&BinMatrix> {
        self.blocks.iter().find(|b| b.i == i && b.j == j).map(|b| &b.matrix)
    }

    /// Checks every block against the `D^{i,j}` dimensions of `params`.
    pub fn validate(&self, params: BiplaneParams) -> Result<()> {
        if self.order != params.order {
            return Err(Error::InvariantOrder {
                name: self.name.clone(),
                expected: self.order,
                order: params.order,
            });
        }
        let g = params.k - 2;
        for b in &self.blocks {
            if b.i == 0 || b.j == 0 || b.i > g || b.j > g {
                return Err(Error::InvalidDimensions(format!(
                    "block ({}, {}) outside 1..={g}",
                    b.i, b.j
                )));
            }
            let want = (params.k - 1 - b.i, params.k - 1 - b.j);
            if (b.matrix.rows(), b.matrix.cols()) != want {
                return Err(Error::InvalidDimensions(format!(
                    "block ({}, {}) is {}x{}, expected {}x{}",
                    b.i,
                    b.j,
                    b.matrix.rows(),
                    b.matrix.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(())
    }

    /// Parses the invariant file format: optional `name=` and `order=`
    /// directives, then `block i j` lines each followed by the block rows.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut name = None;
        let mut order = None;
        let mut blocks: Vec<(usize, usize, usize, Vec<Vec<u8>>)> = Vec::new();
        for line in parse_bit_lines(text)? {
            match line {
                TextLine::Directive { line, key, value } => match key.as_str() {
                    "name" => name = Some(value),
                    "order" => {
                        order = Some(value.parse::<usize>().map_err(|_| {
                            Error::parse(line, format!("bad order `{value}`"))
                        })?)
                    }
                    _ => return Err(Error::parse(line, format!("unexpected directive `{key}`"))),
                },
                TextLine::Block { line, i, j } => blocks.push((line, i, j, Vec::new())),
                TextLine::Bits { line, bits } => match blocks.last_mut() {
                    Some((_, _, _, rows)) => rows.push(bits.into_iter().map(u8::from).collect()),
                    None => return Err(Error::parse(line, "matrix row before any block line")),
                },
            }
        }
        let (first_line, first_i, _, first_rows) = blocks
            .first()
            .ok_or_else(|| Error::parse(1, "no block in invariant file"))?;
        let order = match order {
            Some(o) => o,
            // D^{i,j} has k - 1 - i rows and k = order + 2
            None => (first_rows.len() + first_i + 1)
                .checked_sub(2)
                .filter(|&o| o > 0)
                .ok_or_else(|| Error::parse(*first_line, "cannot infer the order"))?,
        };
        let params = BiplaneParams::from_order(order)?;
        let blocks = blocks
            .into_iter()
            .map(|(line, i, j, rows)| {
                BinMatrix::from_rows(&rows)
                    .map(|matrix| BlockAssignment { i, j, matrix })
                    .map_err(|e| Error::parse(line, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let inv = StructuralInvariant {
            name: name.unwrap_or_else(|| "custom".to_string()),
            order,
            blocks,
        };
        inv.validate(params)?;
        Ok(inv)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("name={}\norder={}\n", self.name, self.order);
        for b in &self.blocks {
            out.push_str(&format!("block {} {}\n", b.i, b.j));
            for r in 0..b.matrix.rows() {
                out.extend(b.matrix.row(r).iter().map(|&x| if x == 1 { '1' } else { '0' }));
                out.push('\n');
            }
        }
        out
    }
}

/// Turns an invariant into cell constraints on a fresh partial matrix. With
/// `trace_restriction` every diagonal cell below the header is forced to one
/// and the trace-`v` zero pattern of the `D` blocks is planted.
pub fn apply_invariant(
    header: &CanonicalHeader,
    inv: &StructuralInvariant,
    trace_restriction: bool,
) -> Result<PartialMatrix> {
    let params = header.params();
    inv.validate(params)?;
    let mut pm = PartialMatrix::from_header(header.clone());
    if trace_restriction {
        for r in params.k..params.v {
            pm.force(r, r, true)?;
        }
        for cell in lemma_zero_cells(params) {
            pm.force(cell.row, cell.column, false)?;
        }
    }
    let blocks = header.blocks();
    for b in &inv.blocks {
        let (rows, cols) = blocks.d_block(b.i, b.j);
        for (dr, r) in rows.enumerate() {
            for (dc, c) in cols.clone().enumerate() {
                pm.force(r, c, b.matrix.get(dr, dc)).map_err(|e| match e {
                    Error::Infeasible(msg) => Error::Infeasible(format!(
                        "invariant {} at D^{{{},{}}}[{}, {}]: {msg}",
                        inv.name,
                        b.i,
                        b.j,
                        dr + 1,
                        dc + 1
                    )),
                    other => other,
                })?;
            }
        }
    }
    Ok(pm)
}
