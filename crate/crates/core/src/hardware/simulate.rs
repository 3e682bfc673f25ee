//! Forward physics of the imperfect mesh.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::model::HardwareModel;
use super::params::{ActuatorId, VoltagePlan};
use crate::error::{Error, Result};
use crate::mesh::{physical_cell_block, reconstruct_matrix};
use crate::rng::{self, Rng, Stream};
use crate::{ComplexMatrix, MeshSettings};

/// Detected powers, watts. Entry `(j, i)` is output port `j` with light
/// injected at input `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl IntensityMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::invalid(format!("intensity matrix needs {n}x{n} entries")));
        }
        if data.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(Error::data("intensities must be finite and >= 0"));
        }
        Ok(Self { n, data })
    }

    /// Assemble from one output vector per input mode.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::invalid("every column needs one value per output port"));
        }
        let data = (0..n).flat_map(|j| columns.iter().map(move |c| c[j])).collect();
        Self::new(n, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, output: usize, input: usize) -> f64 {
        self.data[output * self.n + input]
    }

    /// Output powers for one input mode.
    pub fn column(&self, input: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get(j, input)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn check_topology(model: &HardwareModel, settings: &MeshSettings) -> Result<()> {
    if settings.n() != model.n() {
        return Err(Error::invalid(format!(
            "settings are for {} modes but the model has {}",
            settings.n(),
            model.n()
        )));
    }
    // MeshSettings and HardwareModel both hold cells in topology order.
    let same = settings
        .cells()
        .iter()
        .zip(model.cells())
        .all(|(s, h)| s.address == h.address);
    if !same {
        return Err(Error::invalid("settings topology does not match the model"));
    }
    Ok(())
}

/// Complex field transfer matrix of the device programmed with `settings`,
/// phases taken exactly as given (no phase-setting noise).
///
/// `T = diag(out) · a_prop · D(output phases) · (physical cells) · diag(in)`,
/// with `in`/`out` the facet field amplitudes and `a_prop` the common
/// propagation amplitude.
pub fn simulate_transfer(model: &HardwareModel, settings: &MeshSettings) -> Result<ComplexMatrix> {
    check_topology(model, settings)?;
    let hw = model.cells();
    let mut idx = 0;
    let mut t = reconstruct_matrix(settings, |cell| {
        let h = &hw[idx];
        idx += 1;
        physical_cell_block(cell.theta, cell.phi, h.couplers[0].kappa, h.couplers[1].kappa)
    })?;
    let n = model.n();
    let prop = model.loss.propagation_amplitude();
    for j in 0..n {
        let out = model.loss.output_amplitude(j) * prop;
        for i in 0..n {
            t[(j, i)] *= out * model.loss.input_amplitude(i);
        }
    }
    Ok(t)
}

/// Settings with Gaussian phase-setting error of std
/// `model.phase_set_noise_sigma` added to every actuator phase, drawn in
/// actuator-index order from `rng`. Output phases are left alone.
pub fn realize_settings(model: &HardwareModel, settings: &MeshSettings, rng: &mut Rng) -> Result<MeshSettings> {
    let sigma = model.phase_set_noise_sigma;
    if sigma == 0.0 {
        return Ok(settings.clone());
    }
    let noisy: Vec<f64> = settings
        .actuator_phases()
        .into_iter()
        .map(|p| p + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    settings.with_actuator_phases(&noisy)
}

/// Phases the heaters produce for `plan` under the model's heater law,
/// as mesh settings with zero output phases.
pub fn phases_from_voltages(model: &HardwareModel, plan: &VoltagePlan) -> Result<MeshSettings> {
    if plan.len() != model.actuator_count() {
        return Err(Error::invalid(format!(
            "voltage plan has {} entries, device has {} actuators",
            plan.len(),
            model.actuator_count()
        )));
    }
    let phases: Vec<f64> = plan
        .voltages()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let id = ActuatorId::from_index(k);
            model.cells()[id.cell].heater(id.kind).phase_at(v)
        })
        .collect();
    MeshSettings::uniform(model.n(), 0.0, 0.0)?.with_actuator_phases(&phases)
}

/// Heater voltages that realise `settings` on `model`, smallest
/// non-negative solution per actuator.
pub fn phases_to_voltages(settings: &MeshSettings, model: &HardwareModel) -> Result<VoltagePlan> {
    check_topology(model, settings)?;
    let voltages: Vec<f64> = settings
        .actuator_phases()
        .iter()
        .enumerate()
        .map(|(k, &phase)| {
            let id = ActuatorId::from_index(k);
            model.cells()[id.cell].heater(id.kind).voltage_for(phase)
        })
        .collect();
    VoltagePlan::new(voltages, model.compliance_voltage)
}

/// Photodiode reading model shared by [`measure_output`] and the simulated
/// backend: `signal (1 + σ g₁) + dark (1 + σ g₂)`, floored at zero.
pub(crate) fn detect(signal: f64, dark: f64, sigma: f64, rng: &mut Rng) -> f64 {
    if sigma == 0.0 {
        return signal + dark;
    }
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    (signal * (1.0 + sigma * g1) + dark * (1.0 + sigma * g2)).max(0.0)
}

/// Detected powers at every output port for light of `input_power` watts
/// injected at `input_mode`.
///
/// Phase-setting errors come from the phase-noise stream of `seed` and are
/// therefore identical for every `input_mode` under the same seed;
/// detector noise comes from a separate stream keyed by seed and input.
pub fn measure_output(
    model: &HardwareModel,
    settings: &MeshSettings,
    input_mode: usize,
    input_power: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = model.n();
    if input_mode >= n {
        return Err(Error::invalid(format!("input mode {input_mode} out of range for {n} modes")));
    }
    if !(input_power > 0.0 && input_power.is_finite()) {
        return Err(Error::invalid("input power must be positive"));
    }
    let mut phase_rng = rng::rng(seed, Stream::PhaseNoise);
    let realized = realize_settings(model, settings, &mut phase_rng)?;
    let t = simulate_transfer(model, &realized)?;
    let mut det_rng = rng::rng(rng::derive_seed(seed, input_mode as u64, 0), Stream::DetectorNoise);
    Ok((0..n)
        .map(|j| {
            let signal = t[(j, input_mode)].norm_sqr() * input_power;
            detect(signal, model.detector.dark_offset[j], model.detector.noise_sigma, &mut det_rng)
        })
        .collect())
}
