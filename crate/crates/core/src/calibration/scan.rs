//! Actuator sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::{ActuatorId, DeviceBackend, VoltagePlan};

/// Fewest grid points a scan may have.
pub const MIN_SWEEP_POINTS: usize = 16;

/// Uniform voltage grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
}

impl SweepRange {
    pub fn new(v_min: f64, v_max: f64, points: usize) -> Result<Self> {
        if !(v_min >= 0.0 && v_max > v_min && v_max.is_finite()) {
            return Err(Error::invalid(format!("bad sweep range [{v_min}, {v_max}]")));
        }
        if points < MIN_SWEEP_POINTS {
            return Err(Error::invalid(format!("a sweep needs at least {MIN_SWEEP_POINTS} points")));
        }
        Ok(Self { v_min, v_max, points })
    }

    pub fn grid(&self) -> Vec<f64> {
        let step = (self.v_max - self.v_min) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.v_min + step * k as f64).collect()
    }
}

/// Output powers recorded while one heater is stepped, light injected at
/// a single input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub actuator: ActuatorId,
    pub input: usize,
    voltages: Vec<f64>,
    /// One vector of output-port powers (watts) per grid point.
    intensities: Vec<Vec<f64>>,
    /// Per-port dark reading, watts.
    pub dark_offset: Vec<f64>,
    /// Per-port additive noise level of a dark-subtracted reading, watts.
    pub noise_floor: Vec<f64>,
    /// Heater resistance reported by the device, ohms.
    pub resistance: f64,
}

impl FringeScan {
    pub fn new(
        actuator: ActuatorId,
        input: usize,
        voltages: Vec<f64>,
        intensities: Vec<Vec<f64>>,
        dark_offset: Vec<f64>,
        noise_floor: Vec<f64>,
        resistance: f64,
    ) -> Result<Self> {
        if voltages.len() < MIN_SWEEP_POINTS {
            return Err(Error::invalid(format!("a scan needs at least {MIN_SWEEP_POINTS} points")));
        }
        if voltages.windows(2).any(|w| !(w[1] > w[0])) || voltages.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("scan voltages must be finite and strictly increasing"));
        }
        if intensities.len() != voltages.len() {
            return Err(Error::invalid("one intensity vector per voltage is required"));
        }
        let ports = dark_offset.len();
        if ports == 0 || noise_floor.len() != ports || intensities.iter().any(|row| row.len() != ports) {
            return Err(Error::invalid("every reading needs one value per port"));
        }
        if intensities.iter().flatten().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(Error::data("scan intensities must be finite and >= 0"));
        }
        if !(resistance > 0.0 && resistance.is_finite()) {
            return Err(Error::invalid("resistance must be > 0"));
        }
        Ok(Self {
            actuator,
            input,
            voltages,
            intensities,
            dark_offset,
            noise_floor,
            resistance,
        })
    }

    /// Noise-free, dark-free scan with nominal resistance; used for
    /// synthetic data.
    pub fn synthetic(actuator: ActuatorId, voltages: Vec<f64>, intensities: Vec<Vec<f64>>, resistance: f64) -> Result<Self> {
        let ports = intensities.first().map_or(0, Vec::len);
        Self::new(actuator, 0, voltages, intensities, vec![0.0; ports], vec![0.0; ports], resistance)
    }

    pub fn voltages(&self) -> &[f64] {
        &self.voltages
    }

    pub fn intensities(&self) -> &[Vec<f64>] {
        &self.intensities
    }

    pub fn n_ports(&self) -> usize {
        self.dark_offset.len()
    }

    pub fn len(&self) -> usize {
        self.voltages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voltages.is_empty()
    }

    /// Raw powers seen at `port` along the sweep.
    pub fn trace(&self, port: usize) -> Vec<f64> {
        self.intensities.iter().map(|row| row[port]).collect()
    }

    /// Peak-to-peak variation at `port`.
    pub fn swing(&self, port: usize) -> f64 {
        let t = self.trace(port);
        let max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = t.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Peak-to-peak variation of the trace after a 7-point moving average,
    /// which keeps detector noise from masquerading as a fringe.
    pub fn smoothed_swing(&self, port: usize) -> f64 {
        let t = self.trace(port);
        let w = 7.min(t.len());
        let means: Vec<f64> = t.windows(w).map(|s| s.iter().sum::<f64>() / w as f64).collect();
        let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = means.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Port with the largest smoothed swing; ties go to the lower index.
    pub fn strongest_port(&self) -> usize {
        let s: Vec<f64> = (0..self.n_ports()).map(|p| self.smoothed_swing(p)).collect();
        (0..s.len()).fold(0, |best, p| if s[p] > s[best] { p } else { best })
    }

    /// Smoothed swing of the strongest port.
    pub fn strength(&self) -> f64 {
        self.smoothed_swing(self.strongest_port())
    }

    /// Scaled copy: every intensity, dark offset and noise floor times `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("scale must be > 0"));
        }
        let mut s = self.clone();
        s.intensities.iter_mut().flatten().for_each(|x| *x *= k);
        s.dark_offset.iter_mut().for_each(|x| *x *= k);
        s.noise_floor.iter_mut().for_each(|x| *x *= k);
        Ok(s)
    }

    /// CSV with header `voltage,port_0,...,port_{N-1}`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["voltage".to_string()];
        header.extend((0..self.n_ports()).map(|p| format!("port_{p}")));
        w.write_record(&header).map_err(csv_err)?;
        for (v, row) in self.voltages.iter().zip(&self.intensities) {
            let mut rec = vec![v.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::data(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::data(format!("csv: {e}"))
}

/// Step one actuator over `range` with every other actuator held at its
/// value in `held`, reading all outputs for every input at each point.
/// Returns one scan per input mode.
pub fn sweep_all_inputs<B: DeviceBackend + ?Sized>(
    backend: &mut B,
    held: &VoltagePlan,
    actuator: ActuatorId,
    range: SweepRange,
) -> Result<Vec<FringeScan>> {
    let info = backend.info();
    if actuator.index() >= info.actuator_count() || held.len() != info.actuator_count() {
        return Err(Error::invalid(format!("{actuator} is not an actuator of this device")));
    }
    if range.v_max > info.compliance_voltage {
        return Err(Error::Range {
            actuator: actuator.to_string(),
            required: range.v_max,
            limit: info.compliance_voltage,
        });
    }
    let context = || format!("sweeping {actuator}");
    let grid = range.grid();
    let mut per_input = vec![Vec::with_capacity(grid.len()); info.n];
    for &v in &grid {
        let plan = held.with(actuator, v, info.compliance_voltage)?;
        backend.set_voltages(&plan).map_err(|e| Error::device(context(), e))?;
        let reading = backend.read_outputs().map_err(|e| Error::device(context(), e))?;
        if reading.n() != info.n {
            return Err(Error::device(context(), Error::data("reading has the wrong size")));
        }
        for (i, rows) in per_input.iter_mut().enumerate() {
            rows.push(reading.column(i));
        }
    }
    backend.set_voltages(held).map_err(|e| Error::device(context(), e))?;
    let noise: Vec<f64> = (0..info.n).map(|j| info.noise_floor(j)).collect();
    let resistance = info.heater_resistance[actuator.index()];
    per_input
        .into_iter()
        .enumerate()
        .map(|(i, rows)| {
            FringeScan::new(actuator, i, grid.clone(), rows, info.dark_offset.clone(), noise.clone(), resistance)
        })
        .collect()
}

/// Sweep one actuator and keep the scan for light injected at `input`.
pub fn sweep_actuator<B: DeviceBackend + ?Sized>(
    backend: &mut B,
    held: &VoltagePlan,
    actuator: ActuatorId,
    range: SweepRange,
    input: usize,
) -> Result<FringeScan> {
    let n = backend.info().n;
    if input >= n {
        return Err(Error::invalid(format!("input {input} out of range for {n} modes")));
    }
    Ok(sweep_all_inputs(backend, held, actuator, range)?.swap_remove(input))
}
