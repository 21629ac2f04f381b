//! Lattice geometry: sites, anti-diagonal indexing, path steps.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A site of the planar integer lattice. Negative coordinates are legal
/// (curve profiles extend into the second and fourth quadrants); the
/// boundary-model machinery restricts itself to the first quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub k: i64,
    pub l: i64,
}

impl LatticePoint {
    pub const fn new(k: i64, l: i64) -> Self {
        Self { k, l }
    }

    /// Coordinate-wise partial order.
    #[inline]
    pub fn dominates(&self, other: &LatticePoint) -> bool {
        self.k >= other.k && self.l >= other.l
    }

    #[inline]
    pub fn is_bulk(&self) -> bool {
        self.k >= 1 && self.l >= 1
    }
}

impl From<(i64, i64)> for LatticePoint {
    fn from((k, l): (i64, i64)) -> Self {
        Self { k, l }
    }
}

/// The anti-diagonal parametrization `[x]_t = (floor(t) + floor(x), floor(t) - floor(x))`.
///
/// Rejects `|x| > t`, which would leave the quadrant.
pub fn antidiag(x: f64, t: f64) -> Result<LatticePoint> {
    if x.abs() > t {
        return Err(Error::OutsideQuadrant { x, t });
    }
    Ok(antidiag_indices(x.floor() as i64, t.floor() as i64))
}

/// Integer form of the anti-diagonal map: `[i]_m = (m + i, m - i)`.
#[inline]
pub fn antidiag_indices(i: i64, m: i64) -> LatticePoint {
    LatticePoint::new(m + i, m - i)
}
