//! Whole-device calibration and the calibration store.
//!
//! 1. Every heater is swept from zero to the compliance limit with all
//!    others at zero volts; the channel with the largest swing is fitted.
//!    Heaters whose sweep moves no channel (external heaters of the first
//!    column only add a phase to a single input) are listed as unobservable.
//! 2. Internal heaters are tuned one at a time, repeatedly, to maximise the
//!    total straight-through power. This reaches a state whose intensities
//!    are the identity. It need not have every cell in bar: a cell may be
//!    crossed or split if later cells on the same modes undo it.
//! 3. With that state held, each internal heater is swept again and the two
//!    ports that respond most are fitted. The shallower fringe gives an
//!    in-situ extinction ratio. A cell that is alone on its mode pair must
//!    be in bar, which fixes its heater's absolute zero-drive phase; other
//!    heaters keep the fringe phase from step 1.
//! 4. Per-mode insertion loss is read in the identity state and split equally
//!    between input and output facets.

use std::f64::consts::{PI, TAU};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::fit::{fit_fringe, fit_fringe_port, linear_part, HeaterCalibration};
use super::metrics::{extinction_ratio, measure_insertion_loss, PortEfficiencies};
use super::scan::{sweep_all_inputs, SweepRange};
use crate::error::{Error, Result};
use crate::hardware::{ActuatorId, ActuatorKind, DeviceBackend, DeviceInfo, VoltagePlan};
use crate::scalar::wrap_phase;

pub const STORE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOptions {
    /// Grid points per sweep.
    pub points: usize,
    /// Upper end of every sweep; the device compliance limit if unset.
    pub v_max: Option<f64>,
    /// Passes over the internal heaters when routing to the identity.
    pub max_routing_passes: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            points: 401,
            v_max: None,
            max_routing_passes: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellExtinction {
    pub column: usize,
    pub top_mode: usize,
    /// `10 log10((A + B) / (A - B))` of the shallower of the two fringes the
    /// cell produces in the identity state. Inside a mesh this includes
    /// leakage of the downstream cells.
    pub extinction_ratio_db: f64,
    /// Max over min of the same trace as sampled.
    pub sampled_extinction_ratio_db: f64,
}

/// Everything learned about one device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStore {
    pub format_version: u32,
    /// Seconds since the Unix epoch when the calibration started.
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub device_fingerprint: String,
    pub n: usize,
    pub heaters: Vec<HeaterCalibration>,
    pub unobservable: Vec<ActuatorId>,
    /// Voltages that route every input to its own output.
    pub identity_voltages: Vec<f64>,
    pub insertion_loss_db: Vec<f64>,
    pub port_efficiencies: PortEfficiencies,
    pub extinction_ratio_db: Vec<CellExtinction>,
}

impl CalibrationStore {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let store: Self = serde_json::from_str(text)?;
        if store.format_version != STORE_FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported calibration format version {}",
                store.format_version
            )));
        }
        Ok(store)
    }

    pub fn heater(&self, id: ActuatorId) -> Option<&HeaterCalibration> {
        self.heaters.iter().find(|h| h.actuator == id)
    }

    pub fn mean_extinction_db(&self) -> f64 {
        let e = &self.extinction_ratio_db;
        e.iter().map(|c| c.extinction_ratio_db).sum::<f64>() / e.len().max(1) as f64
    }

    pub fn mean_insertion_loss_db(&self) -> f64 {
        let l = &self.insertion_loss_db;
        l.iter().sum::<f64>() / l.len().max(1) as f64
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn through_power(reading: &crate::hardware::IntensityMatrix, info: &DeviceInfo) -> (f64, f64) {
    let n = info.n;
    let mut diag = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = (reading.get(j, i) - info.dark_offset[j]).max(0.0);
            total += v;
            if i == j {
                diag += v;
            }
        }
    }
    (diag, total)
}

/// Tune the internal heaters, one at a time and in repeated passes, to
/// maximise the summed straight-through power. Returns the plan reached.
pub fn route_identity<B: DeviceBackend + ?Sized>(
    backend: &mut B,
    heaters: &[HeaterCalibration],
    start: &VoltagePlan,
    max_passes: usize,
) -> Result<VoltagePlan> {
    const SAMPLES: usize = 8;
    let info = backend.info();
    let mut plan = start.clone();
    let thetas: Vec<&HeaterCalibration> = heaters.iter().filter(|h| h.actuator.kind == ActuatorKind::Theta).collect();
    if thetas.len() != info.topology.len() {
        return Err(Error::fit("every internal heater needs a calibration before routing"));
    }
    let ctx = |e| Error::device("routing to identity", e);
    let mut last = f64::NEG_INFINITY;
    for _ in 0..max_passes {
        for h in &thetas {
            let period = TAU * h.volts_sq_per_radian;
            let x: Vec<f64> = (0..SAMPLES).map(|k| period * k as f64 / SAMPLES as f64).collect();
            let mut y = Vec::with_capacity(SAMPLES);
            for &xk in &x {
                backend.set_voltages(&plan.with(h.actuator, xk.sqrt(), info.compliance_voltage)?).map_err(ctx)?;
                y.push(through_power(&backend.read_outputs().map_err(ctx)?, &info).0);
            }
            let (coef, _) = linear_part(&x, &y, h.omega()).ok_or_else(|| Error::fit("degenerate routing step"))?;
            let delta = (-coef[2]).atan2(coef[1]);
            let best = wrap_phase(-delta) * h.volts_sq_per_radian;
            plan = plan.with(h.actuator, best.sqrt(), info.compliance_voltage)?;
        }
        backend.set_voltages(&plan).map_err(ctx)?;
        let (diag, _) = through_power(&backend.read_outputs().map_err(ctx)?, &info);
        if (diag - last).abs() <= 1e-9 * diag {
            break;
        }
        last = diag;
    }
    backend.set_voltages(&plan).map_err(ctx)?;
    let (diag, total) = through_power(&backend.read_outputs().map_err(ctx)?, &info);
    if !(diag >= 0.9 * total) {
        return Err(Error::fit(format!(
            "identity routing stalled with {:.1}% of the light on the diagonal",
            100.0 * diag / total
        )));
    }
    Ok(plan)
}

pub fn calibrate_device<B: DeviceBackend + ?Sized>(backend: &mut B, options: CalibrationOptions) -> Result<CalibrationStore> {
    let started = unix_now();
    let info = backend.info();
    let v_max = options.v_max.unwrap_or(info.compliance_voltage);
    let range = SweepRange::new(0.0, v_max, options.points)?;
    let zero = VoltagePlan::zeros(info.actuator_count());

    let mut heaters = Vec::with_capacity(info.actuator_count());
    let mut unobservable = Vec::new();
    for k in 0..info.actuator_count() {
        let id = ActuatorId::from_index(k);
        let scans = sweep_all_inputs(backend, &zero, id, range)?;
        let best = scans
            .iter()
            .max_by(|a, b| a.strength().total_cmp(&b.strength()))
            .expect("device has at least one input");
        match fit_fringe(best) {
            Ok(cal) => heaters.push(cal),
            Err(Error::Fit(_)) => unobservable.push(id),
            Err(e) => return Err(e),
        }
    }
    if let Some(id) = unobservable.iter().find(|id| id.kind == ActuatorKind::Theta) {
        return Err(Error::fit(format!("{id} produced no fringe on any channel")));
    }

    let identity = route_identity(backend, &heaters, &zero, options.max_routing_passes)?;

    let mut extinction = Vec::with_capacity(info.topology.len());
    for (cell, address) in info.topology.iter().enumerate() {
        let id = ActuatorId::new(cell, ActuatorKind::Theta);
        let scans = sweep_all_inputs(backend, &identity, id, range)?;
        let scan = scans
            .iter()
            .max_by(|a, b| a.strength().total_cmp(&b.strength()))
            .expect("device has at least one input");
        let mut ports: Vec<usize> = (0..info.n).collect();
        ports.sort_by(|&a, &b| scan.smoothed_swing(b).total_cmp(&scan.smoothed_swing(a)));
        let fits = [fit_fringe_port(scan, ports[0])?, fit_fringe_port(scan, ports[1])?];
        let shallow = if fits[0].fringe_extinction_db() <= fits[1].fringe_extinction_db() { 0 } else { 1 };
        extinction.push(CellExtinction {
            column: address.column,
            top_mode: address.top_mode,
            extinction_ratio_db: fits[shallow].fringe_extinction_db(),
            sampled_extinction_ratio_db: extinction_ratio(scan, ports[shallow])?,
        });
        let sole = info
            .topology
            .iter()
            .filter(|a| a.top_mode == address.top_mode)
            .count()
            == 1;
        let slot = heaters.iter_mut().find(|h| h.actuator == id).expect("theta heaters were all fitted");
        if sole {
            // Only the bar state routes this pair straight through.
            let v = identity.get(id);
            slot.phi_offset = wrap_phase(PI - slot.omega() * v * v);
            slot.offset_absolute = true;
        }
    }

    backend
        .set_voltages(&identity)
        .map_err(|e| Error::device("insertion loss", e))?;
    let insertion_loss_db = (0..info.n)
        .map(|m| measure_insertion_loss(backend, m))
        .collect::<Result<Vec<_>>>()?;
    let port_efficiencies = PortEfficiencies::from_insertion_losses(&insertion_loss_db)?;

    Ok(CalibrationStore {
        format_version: STORE_FORMAT_VERSION,
        started_unix_s: started,
        finished_unix_s: unix_now(),
        device_fingerprint: info.fingerprint(),
        n: info.n,
        heaters,
        unobservable,
        identity_voltages: identity.voltages().to_vec(),
        insertion_loss_db,
        port_efficiencies,
        extinction_ratio_db: extinction,
    })
}
