use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid of points of `[0, 1]^d` whose coordinates are multiples of `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub eta: f64,
    pub dimension: usize,
}

/// Integer coordinates of a lattice point; identifies the cube around it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CubeIndex(pub Vec<u32>);

impl Lattice {
    pub fn new(eta: f64, dimension: usize) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidEta(eta));
        }
        Ok(Self { eta, dimension })
    }

    /// Largest coordinate index along one axis.
    pub fn max_coord(&self) -> u32 {
        (1.0 / self.eta).ceil() as u32
    }

    pub fn cube_of(&self, weights: &[f64]) -> CubeIndex {
        CubeIndex(
            weights
                .iter()
                .map(|&v| nearest_half_down(v / self.eta))
                .collect(),
        )
    }

    pub fn center(&self, cube: &CubeIndex) -> Vec<f64> {
        cube.0.iter().map(|&k| f64::from(k) * self.eta).collect()
    }
}

/// Nearest integer, with exact halves going down.
fn nearest_half_down(x: f64) -> u32 {
    (x - 0.5).ceil().max(0.0) as u32
}

/// Cube containing `weights` in the lattice of spacing `eta`.
///
/// Each coordinate maps to the nearest multiple of `eta`; a value exactly
/// halfway between two lattice points goes to the lower one.
pub fn cube_of(weights: &[f64], eta: f64) -> Result<CubeIndex> {
    Ok(Lattice::new(eta, weights.len())?.cube_of(weights))
}

/// `ceil(x)`, except values within a relative 1e-9 of an integer snap to it.
///
/// Keeps `4 / (1/5)` at 20 instead of 21 when the quotient lands one ulp high.
pub fn snapped_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}
