//! Device-backend abstraction.
//!
//! Calibration and experiments talk to hardware only through
//! [`DeviceBackend`]: program heater voltages, read the photodiode array,
//! and query static device information. [`SimulatedDevice`] implements it
//! on top of a [`HardwareModel`]; a driver for a physical instrument only
//! needs to implement the same three methods.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::model::HardwareModel;
use super::params::VoltagePlan;
use super::simulate::{detect, phases_from_voltages, realize_settings, simulate_transfer, IntensityMatrix};
use crate::error::{Error, Result};
use crate::mesh::UnitCellAddress;
use crate::rng::{self, Rng, Stream};
use crate::ComplexMatrix;

/// Static description a backend reports about itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceInfo {
    pub n: usize,
    pub topology: Vec<UnitCellAddress>,
    /// Electrical resistance of every heater, ohms, in actuator-index order.
    pub heater_resistance: Vec<f64>,
    pub compliance_voltage: f64,
    /// Optical power launched into the selected input, watts.
    pub input_power: f64,
    /// Photodiode readings with the source off, watts, per output port.
    pub dark_offset: Vec<f64>,
    /// Relative intensity noise of the photodiodes.
    pub detector_noise_sigma: f64,
}

impl DeviceInfo {
    pub fn actuator_count(&self) -> usize {
        2 * self.topology.len()
    }

    /// Additive uncertainty on a dark-subtracted reading at port `j`.
    pub fn noise_floor(&self, j: usize) -> f64 {
        self.detector_noise_sigma * self.dark_offset[j]
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn fingerprint(&self) -> String {
        let text = serde_json::to_string(self).expect("device info serialises");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub trait DeviceBackend {
    fn info(&self) -> DeviceInfo;

    /// Apply a full voltage plan; every actuator is driven.
    fn set_voltages(&mut self, plan: &VoltagePlan) -> Result<()>;

    /// Read every output port for light injected at every input in turn.
    fn read_outputs(&mut self) -> Result<IntensityMatrix>;
}

/// Launched power used when none is given.
pub const DEFAULT_INPUT_POWER_W: f64 = 1e-3;

/// A session on a simulated device.
///
/// Phase-setting errors are drawn once per session from the phase-noise
/// stream of the seed, in actuator order, and stay fixed while voltages
/// change; they behave like a static calibration error. Detector noise is
/// drawn fresh on every read.
pub struct SimulatedDevice {
    model: HardwareModel,
    input_power: f64,
    phase_errors: Vec<f64>,
    transfer: ComplexMatrix,
    detector_rng: Rng,
}

impl SimulatedDevice {
    pub fn new(model: HardwareModel, seed: u64) -> Result<Self> {
        Self::with_input_power(model, seed, DEFAULT_INPUT_POWER_W)
    }

    pub fn with_input_power(model: HardwareModel, seed: u64, input_power: f64) -> Result<Self> {
        if !(input_power > 0.0 && input_power.is_finite()) {
            return Err(Error::invalid("input power must be positive"));
        }
        let zero = VoltagePlan::zeros(model.actuator_count());
        let base = phases_from_voltages(&model, &zero)?;
        let mut phase_rng = rng::rng(seed, Stream::PhaseNoise);
        let noisy = realize_settings(&model, &base, &mut phase_rng)?;
        let phase_errors = noisy
            .actuator_phases()
            .iter()
            .zip(base.actuator_phases())
            .map(|(a, b)| {
                // recover the signed error from wrapped phases
                let d = crate::scalar::wrap_phase(a - b);
                if d > std::f64::consts::PI {
                    d - std::f64::consts::TAU
                } else {
                    d
                }
            })
            .collect();
        let transfer = simulate_transfer(&model, &base)?;
        let mut dev = Self {
            model,
            input_power,
            phase_errors,
            transfer,
            detector_rng: rng::rng(seed, Stream::DetectorNoise),
        };
        dev.set_voltages(&zero)?;
        Ok(dev)
    }

    pub fn model(&self) -> &HardwareModel {
        &self.model
    }

    /// Transfer matrix currently programmed, including phase errors.
    pub fn transfer(&self) -> &ComplexMatrix {
        &self.transfer
    }
}

impl DeviceBackend for SimulatedDevice {
    fn info(&self) -> DeviceInfo {
        DeviceInfo {
            n: self.model.n(),
            topology: self.model.topology(),
            heater_resistance: self.model.heaters().map(|h| h.resistance).collect(),
            compliance_voltage: self.model.compliance_voltage,
            input_power: self.input_power,
            dark_offset: self.model.detector.dark_offset.clone(),
            detector_noise_sigma: self.model.detector.noise_sigma,
        }
    }

    fn set_voltages(&mut self, plan: &VoltagePlan) -> Result<()> {
        if let Some((k, &v)) = plan
            .voltages()
            .iter()
            .enumerate()
            .find(|(_, &v)| v > self.model.compliance_voltage)
        {
            return Err(Error::Range {
                actuator: super::params::ActuatorId::from_index(k).to_string(),
                required: v,
                limit: self.model.compliance_voltage,
            });
        }
        let ideal = phases_from_voltages(&self.model, plan)?;
        let phases: Vec<f64> = ideal
            .actuator_phases()
            .iter()
            .zip(&self.phase_errors)
            .map(|(p, e)| p + e)
            .collect();
        let realized = ideal.with_actuator_phases(&phases)?;
        self.transfer = simulate_transfer(&self.model, &realized)?;
        Ok(())
    }

    fn read_outputs(&mut self) -> Result<IntensityMatrix> {
        let n = self.model.n();
        let sigma = self.model.detector.noise_sigma;
        let mut columns = Vec::with_capacity(n);
        for i in 0..n {
            let col = (0..n)
                .map(|j| {
                    let signal = self.transfer[(j, i)].norm_sqr() * self.input_power;
                    detect(signal, self.model.detector.dark_offset[j], sigma, &mut self.detector_rng)
                })
                .collect::<Vec<_>>();
            columns.push(col);
        }
        IntensityMatrix::from_columns(&columns)
    }
}
