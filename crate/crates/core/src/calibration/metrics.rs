//! Extinction ratio, insertion loss and measurement normalisation.

use serde::{Deserialize, Serialize};

use super::scan::FringeScan;
use crate::error::{Error, Result};
use crate::experiment::MeasurementRecord;
use crate::hardware::{db_to_power, DetectorParams, DeviceBackend, HardwareModel};
use crate::AmplitudeMatrix;

/// Ceiling reported when the minimum of a fringe is at or below zero.
pub const EXTINCTION_CAP_DB: f64 = 100.0;

/// Dark-subtracted value, with negatives inside the noise band clamped to
/// zero. `scale` is a reference magnitude for round-off.
fn corrected(raw: f64, dark: f64, noise_floor: f64, scale: f64) -> Result<f64> {
    let v = raw - dark;
    if v >= 0.0 {
        return Ok(v);
    }
    if -v <= 3.0 * noise_floor + 1e-12 * scale {
        Ok(0.0)
    } else {
        Err(Error::data(format!(
            "reading {raw:.4e} W is below the dark level {dark:.4e} W by more than the noise allows"
        )))
    }
}

/// `10 log10(I_max / I_min)` of the dark-subtracted trace at `port`,
/// capped at [`EXTINCTION_CAP_DB`].
pub fn extinction_ratio(scan: &FringeScan, port: usize) -> Result<f64> {
    if port >= scan.n_ports() {
        return Err(Error::invalid(format!("port {port} out of range")));
    }
    let raw = scan.trace(port);
    let scale = raw.iter().copied().fold(0.0, f64::max);
    let values = raw
        .iter()
        .map(|&r| corrected(r, scan.dark_offset[port], scan.noise_floor[port], scale))
        .collect::<Result<Vec<_>>>()?;
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) {
        return Err(Error::data(format!("no light at port {port} during the scan")));
    }
    if min <= 0.0 {
        return Ok(EXTINCTION_CAP_DB);
    }
    Ok((10.0 * (max / min).log10()).min(EXTINCTION_CAP_DB))
}

/// Through loss of `mode`, dB. The device must already be programmed to
/// route every input straight to its own output.
pub fn measure_insertion_loss<B: DeviceBackend + ?Sized>(backend: &mut B, mode: usize) -> Result<f64> {
    let info = backend.info();
    if mode >= info.n {
        return Err(Error::invalid(format!("mode {mode} out of range for {} modes", info.n)));
    }
    let reading = backend
        .read_outputs()
        .map_err(|e| Error::device(format!("insertion loss of mode {mode}"), e))?;
    let p_out = reading.get(mode, mode) - info.dark_offset[mode];
    if !(p_out > 0.0) {
        return Err(Error::data(format!("no light detected at output {mode}")));
    }
    Ok(10.0 * (info.input_power / p_out).log10())
}

/// Linear power transmission of every input and output facet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortEfficiencies {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

impl PortEfficiencies {
    pub fn new(input: Vec<f64>, output: Vec<f64>) -> Result<Self> {
        if input.is_empty() || input.len() != output.len() {
            return Err(Error::invalid("need one efficiency per input and per output"));
        }
        if input.iter().chain(&output).any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::invalid("port efficiencies must lie in (0, 1]"));
        }
        Ok(Self { input, output })
    }

    pub fn unity(n: usize) -> Self {
        Self {
            input: vec![1.0; n],
            output: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.input.len()
    }

    /// Efficiencies implied by a model's loss budget. Propagation loss is
    /// common to every path and is lumped into the outputs.
    pub fn from_model(model: &HardwareModel) -> Self {
        let prop = db_to_power(model.loss.propagation_db());
        Self {
            input: model.loss.input_coupling_db.iter().map(|&d| db_to_power(d)).collect(),
            output: model.loss.output_coupling_db.iter().map(|&d| db_to_power(d) * prop).collect(),
        }
    }

    /// Split each mode's measured through loss equally between its input
    /// and output facet.
    pub fn from_insertion_losses(losses_db: &[f64]) -> Result<Self> {
        let half: Vec<f64> = losses_db.iter().map(|&d| db_to_power(d / 2.0)).collect();
        Self::new(half.clone(), half)
    }
}

/// Dark-subtract, undo port efficiencies, take square roots and scale each
/// column to unit norm.
///
/// Small negatives (within three noise floors of the dark level) are
/// clamped to zero; anything lower is a data error, as is a column with no
/// light left after correction.
pub fn normalize_measurements(
    raw: &MeasurementRecord,
    dark: &DetectorParams,
    eff: &PortEfficiencies,
) -> Result<AmplitudeMatrix> {
    let n = raw.n();
    if dark.dark_offset.len() != n || eff.n() != n {
        return Err(Error::invalid(format!("detector and efficiency data must cover {n} ports")));
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let col = raw.intensities.column(i);
        let scale = col.iter().copied().fold(0.0, f64::max);
        for (j, &r) in col.iter().enumerate() {
            let v = corrected(r, dark.dark_offset[j], dark.noise_floor(j), scale)?;
            data[j * n + i] = (v / (eff.input[i] * eff.output[j])).sqrt();
        }
    }
    AmplitudeMatrix::from_unnormalized(n, data)
}
