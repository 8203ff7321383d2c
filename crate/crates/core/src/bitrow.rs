//! Fixed-length 0/1 row vectors packed into a single `u128`.

use std::cmp::Ordering;
use std::fmt;

/// Maximum supported row length.
pub const MAX_LEN: usize = 128;

/// A 0/1 vector of length at most 128. Bit `c` of the word holds column `c`.
///
/// Ordering is lexicographic on the column string (`"0110..."`), so sorting
/// rows sorts them the way they read on the page.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitRow {
    bits: u128,
    len: u8,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_LEN, "row length {len} exceeds {MAX_LEN}");
        BitRow {
            bits: 0,
            len: len as u8,
        }
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut row = BitRow::zeros(len);
        for c in ones {
            row.set(c, true);
        }
        row
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        BitRow::from_ones(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(c, _)| c))
    }

    /// Builds a row from a raw word; bits at or above `len` are rejected.
    pub fn from_word(len: usize, bits: u128) -> Self {
        let row = BitRow::zeros(len);
        assert!(bits & !row.full_mask() == 0, "bits set beyond row length");
        BitRow { bits, ..row }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn word(&self) -> u128 {
        self.bits
    }

    fn full_mask(&self) -> u128 {
        if self.len as usize == MAX_LEN {
            u128::MAX
        } else {
            (1u128 << self.len) - 1
        }
    }

    #[inline]
    pub fn get(&self, c: usize) -> bool {
        debug_assert!(c < self.len());
        self.bits >> c & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, c: usize, value: bool) {
        assert!(c < self.len(), "column {c} out of range for length {}", self.len);
        if value {
            self.bits |= 1 << c;
        } else {
            self.bits &= !(1 << c);
        }
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Scalar product, i.e. the size of the common support.
    #[inline]
    pub fn dot(&self, other: &BitRow) -> u32 {
        debug_assert_eq!(self.len, other.len);
        (self.bits & other.bits).count_ones()
    }

    pub fn ones(&self) -> Ones {
        Ones { bits: self.bits }
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|c| self.get(c)).collect()
    }

    /// The columns `start..start + width` as a new row of length `width`.
    pub fn slice(&self, start: usize, width: usize) -> BitRow {
        assert!(start + width <= self.len());
        let shifted = if start >= MAX_LEN { 0 } else { self.bits >> start };
        let mask = if width == MAX_LEN {
            u128::MAX
        } else {
            (1u128 << width) - 1
        };
        BitRow {
            bits: shifted & mask,
            len: width as u8,
        }
    }

    /// Key whose integer order equals the lexicographic column order.
    #[inline]
    fn lex_key(&self) -> u128 {
        self.bits.reverse_bits()
    }
}

impl Ord for BitRow {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_key()
            .cmp(&other.lex_key())
            .then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for BitRow {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in 0..self.len() {
            f.write_str(if self.get(c) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitRow {
    type Err = String;

    /// Parses a `0`/`1` string such as `"0110"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_LEN {
            return Err(format!("row longer than {MAX_LEN}"));
        }
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(format!("unexpected character {ch:?}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BitRow::from_bools(&bits))
    }
}

impl serde::Serialize for BitRow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BitRow {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow({self})")
    }
}

/// Iterator over the set columns of a row, ascending.
pub struct Ones {
    bits: u128,
}

impl Iterator for Ones {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let c = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row_strategy() -> impl Strategy<Value = (BitRow, BitRow)> {
        (1usize..=128).prop_flat_map(|len| {
            let bits = proptest::collection::vec(any::<bool>(), len);
            (bits.clone(), bits).prop_map(|(a, b)| (BitRow::from_bools(&a), BitRow::from_bools(&b)))
        })
    }

    proptest! {
        #[test]
        fn dot_is_symmetric_and_bounded((a, b) in row_strategy()) {
            prop_assert_eq!(a.dot(&b), b.dot(&a));
            prop_assert!(a.dot(&b) <= a.weight().min(b.weight()));
            prop_assert_eq!(a.weight(), a.dot(&a));
        }

        #[test]
        fn ordering_matches_string_order((a, b) in row_strategy()) {
            prop_assert_eq!(a.cmp(&b), a.to_string().cmp(&b.to_string()));
        }
    }

    #[test]
    fn ones_and_slice() {
        let r = BitRow::from_ones(16, [0, 1, 6, 7, 8, 9]);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![0, 1, 6, 7, 8, 9]);
        assert_eq!(r.to_string(), "1100001111000000");
        assert_eq!(r.slice(6, 4).to_string(), "1111");
        assert_eq!(r.slice(10, 6).weight(), 0);
        let full = BitRow::from_ones(128, [127]);
        assert!(full.get(127));
        assert_eq!(full.slice(120, 8).to_string(), "00000001");
    }
}
