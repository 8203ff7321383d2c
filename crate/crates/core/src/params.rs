use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order handled by the toolkit. Rows are stored in a single `u128`,
/// and order 11 (v = 79) is the largest order with a known biplane.
pub const MAX_ORDER: usize = 11;

/// Parameters of a biplane of a given order: `k = order + 2` points per line
/// and `v = 1 + k(k-1)/2` points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BiplaneParams {
    pub order: usize,
    pub k: usize,
    pub v: usize,
}

impl BiplaneParams {
    pub fn from_order(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroOrder);
        }
        if order > MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                order,
                max: MAX_ORDER,
            });
        }
        let k = order + 2;
        Ok(BiplaneParams {
            order,
            k,
            v: 1 + k * (k - 1) / 2,
        })
    }

    /// Recovers the parameters from a point count, if `v` is of the form `1 + C(k, 2)`.
    pub fn from_point_count(v: usize) -> Result<Self> {
        (3..=MAX_ORDER + 2)
            .find(|k| 1 + k * (k - 1) / 2 == v)
            .map(|k| BiplaneParams::from_order(k - 2))
            .unwrap_or_else(|| {
                Err(Error::InvalidDimensions(format!(
                    "{v} is not the point count of a supported biplane"
                )))
            })
    }

    /// Number of rows below the canonical header, `C(k-1, 2)`.
    pub fn free_rows(&self) -> usize {
        self.v - self.k
    }
}

pub fn params_from_order(order: usize) -> Result<BiplaneParams> {
    BiplaneParams::from_order(order)
}
