//! Reference matrices used by tests, the acceptance suite and the CLI.

use crate::generators::BinMatrix;
use crate::matrix::IncidenceMatrix;

/// Canonical incidence matrix of the order-4 biplane with 11520
/// automorphisms and trace 16.
pub const B4C_TEXT: &str = "order=4
1111110000000000
1100001111000000
1010001000111000
1001000100100110
1000100010010101
1000010001001011
0110001000000111
0101000100011001
0100100010101010
0100010001110100
0011000011100001
0010100101010010
0010010110001100
0001101001001100
0001011010010010
0000111100100001
";

pub fn b4c() -> IncidenceMatrix {
    IncidenceMatrix::from_text(B4C_TEXT).expect("fixture parses")
}

/// `D^{1,2}` block of the `FIG_B7` invariant (7 x 6).
pub const FIG_B7_D12: [&str; 7] = [
    "000000", "010100", "001010", "100001", "100010", "010001", "001100",
];

/// `D^{1,2}` block of the `FIG_B9C` invariant (9 x 8).
pub const FIG_B9C_D12: [&str; 9] = [
    "00000000", "01000001", "00101000", "00010100", "10000010", "10000100", "01000010",
    "00100001", "00011000",
];

pub(crate) fn block_from_strs(rows: &[&str]) -> BinMatrix {
    let rows: Vec<Vec<u8>> = rows
        .iter()
        .map(|r| r.bytes().map(|b| b - b'0').collect())
        .collect();
    BinMatrix::from_rows(&rows).expect("fixture block parses")
}
