use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::IntensityMatrix;

/// Raw detector data for one programmed matrix, before normalisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Entry `(j, i)`: power at output `j` for light injected at input `i`, watts.
    pub intensities: IntensityMatrix,
    /// Launched power, watts.
    pub input_power: f64,
    pub seed: u64,
}

impl MeasurementRecord {
    pub fn new(intensities: IntensityMatrix, input_power: f64, seed: u64) -> Result<Self> {
        if !(input_power > 0.0 && input_power.is_finite()) {
            return Err(Error::invalid("input power must be positive"));
        }
        Ok(Self {
            intensities,
            input_power,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.intensities.n()
    }
}
