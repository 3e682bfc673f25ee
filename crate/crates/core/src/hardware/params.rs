use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::UnitCellAddress;

/// Default heater resistance. Only the volts axis depends on it.
pub const DEFAULT_RESISTANCE_OHM: f64 = 100.0;
/// Electrical power for a 2π phase shift, averaged over the device.
pub const NOMINAL_P_TWO_PI_W: f64 = 0.310;
pub const DEFAULT_COMPLIANCE_V: f64 = 10.0;

/// Thermo-optic heater: `phase(V) = phi_offset + 2π (V²/R) / p_two_pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeaterParams {
    /// Ohms.
    pub resistance: f64,
    /// Watts dissipated for a 2π shift.
    pub p_two_pi: f64,
    /// Phase at zero drive, radians.
    pub phi_offset: f64,
}

impl Default for HeaterParams {
    fn default() -> Self {
        Self {
            resistance: DEFAULT_RESISTANCE_OHM,
            p_two_pi: NOMINAL_P_TWO_PI_W,
            phi_offset: 0.0,
        }
    }
}

impl HeaterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.resistance > 0.0 && self.resistance.is_finite()) {
            return Err(Error::invalid(format!("heater resistance must be > 0, got {}", self.resistance)));
        }
        if !(self.p_two_pi > 0.0 && self.p_two_pi.is_finite()) {
            return Err(Error::invalid(format!("heater p_two_pi must be > 0, got {}", self.p_two_pi)));
        }
        if !self.phi_offset.is_finite() {
            return Err(Error::invalid("heater phi_offset must be finite"));
        }
        Ok(())
    }

    #[inline]
    pub fn power(&self, volts: f64) -> f64 {
        volts * volts / self.resistance
    }

    /// Unwrapped phase produced at `volts`.
    #[inline]
    pub fn phase_at(&self, volts: f64) -> f64 {
        self.phi_offset + TAU * self.power(volts) / self.p_two_pi
    }

    /// Smallest non-negative voltage producing `phase` (mod 2π).
    ///
    /// The phase excess over the offset is reduced into `[0, 2π)` unless it
    /// already lies in `[0, 2π]`, so an explicit request for a full `2π`
    /// turn is honoured rather than folded to zero volts.
    pub fn voltage_for(&self, phase: f64) -> f64 {
        let mut excess = phase - self.phi_offset;
        if !(0.0..=TAU).contains(&excess) {
            excess = crate::scalar::wrap_phase(excess);
        }
        (self.p_two_pi * self.resistance * excess / TAU).sqrt()
    }
}

/// One directional coupler.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplerParams {
    /// Power coupling ratio, `0 < kappa < 1`.
    pub kappa: f64,
}

impl CouplerParams {
    pub const BALANCED: Self = Self { kappa: 0.5 };

    pub fn new(kappa: f64) -> Result<Self> {
        let c = Self { kappa };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa > 0.0 && self.kappa < 1.0 {
            Ok(())
        } else {
            Err(Error::invalid(format!("coupling ratio must lie in (0, 1), got {}", self.kappa)))
        }
    }
}

/// Loss budget. Facet losses may differ per port; propagation loss is one
/// mode-independent figure times the path length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    /// dB, one per input port.
    pub input_coupling_db: Vec<f64>,
    /// dB, one per output port.
    pub output_coupling_db: Vec<f64>,
    pub propagation_db_per_cm: f64,
    pub path_length_cm: f64,
}

impl LossBudget {
    pub fn lossless(n: usize) -> Self {
        Self::uniform(n, 0.0, 0.0, 0.0)
    }

    pub fn uniform(n: usize, facet_db: f64, propagation_db_per_cm: f64, path_length_cm: f64) -> Self {
        Self {
            input_coupling_db: vec![facet_db; n],
            output_coupling_db: vec![facet_db; n],
            propagation_db_per_cm,
            path_length_cm,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.input_coupling_db.len() != n || self.output_coupling_db.len() != n {
            return Err(Error::invalid(format!("loss budget needs {n} input and {n} output facet values")));
        }
        let all = self
            .input_coupling_db
            .iter()
            .chain(&self.output_coupling_db)
            .chain([&self.propagation_db_per_cm, &self.path_length_cm]);
        for &v in all {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("loss values must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn propagation_db(&self) -> f64 {
        self.propagation_db_per_cm * self.path_length_cm
    }

    /// Straight-through loss of mode `m`, dB.
    pub fn through_db(&self, m: usize) -> f64 {
        self.input_coupling_db[m] + self.propagation_db() + self.output_coupling_db[m]
    }

    pub fn input_amplitude(&self, i: usize) -> f64 {
        db_to_amplitude(self.input_coupling_db[i])
    }

    pub fn output_amplitude(&self, j: usize) -> f64 {
        db_to_amplitude(self.output_coupling_db[j])
    }

    pub fn propagation_amplitude(&self) -> f64 {
        db_to_amplitude(self.propagation_db())
    }
}

/// Field amplitude transmitted through `db` of loss.
#[inline]
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(-db / 20.0)
}

/// Power fraction transmitted through `db` of loss.
#[inline]
pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Reading with no light, watts, one per output port.
    pub dark_offset: Vec<f64>,
    /// Relative intensity noise, standard deviation. Zero disables noise.
    #[serde(default)]
    pub noise_sigma: f64,
}

impl DetectorParams {
    pub fn ideal(n: usize) -> Self {
        Self {
            dark_offset: vec![0.0; n],
            noise_sigma: 0.0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.dark_offset.len() != n {
            return Err(Error::invalid(format!("detector needs {n} dark offsets")));
        }
        if self.dark_offset.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::invalid("dark offsets must be finite and >= 0"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma must be finite and >= 0"));
        }
        Ok(())
    }

    /// Additive uncertainty on a dark-subtracted reading at port `j`.
    pub fn noise_floor(&self, j: usize) -> f64 {
        self.noise_sigma * self.dark_offset[j]
    }
}

/// Which of the two heaters in a unit cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActuatorKind {
    /// Internal MZI heater.
    Theta,
    /// External phase shifter.
    Phi,
}

/// Heater identifier. The flat index is `2 * cell + (0 for θ, 1 for φ)`,
/// matching [`MeshSettings::actuator_phases`](crate::mesh::MeshSettings::actuator_phases).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActuatorId {
    pub cell: usize,
    pub kind: ActuatorKind,
}

impl ActuatorId {
    pub fn new(cell: usize, kind: ActuatorKind) -> Self {
        Self { cell, kind }
    }

    pub fn index(&self) -> usize {
        2 * self.cell
            + match self.kind {
                ActuatorKind::Theta => 0,
                ActuatorKind::Phi => 1,
            }
    }

    pub fn from_index(index: usize) -> Self {
        let kind = if index.is_multiple_of(2) { ActuatorKind::Theta } else { ActuatorKind::Phi };
        Self { cell: index / 2, kind }
    }
}

impl fmt::Display for ActuatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ActuatorKind::Theta => "theta",
            ActuatorKind::Phi => "phi",
        };
        write!(f, "cell {} {kind}", self.cell)
    }
}

/// Hardware of one unit cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellHardware {
    pub address: UnitCellAddress,
    /// `[first, second]` coupler along the propagation direction.
    pub couplers: [CouplerParams; 2],
    pub theta_heater: HeaterParams,
    pub phi_heater: HeaterParams,
}

impl CellHardware {
    pub fn heater(&self, kind: ActuatorKind) -> &HeaterParams {
        match kind {
            ActuatorKind::Theta => &self.theta_heater,
            ActuatorKind::Phi => &self.phi_heater,
        }
    }
}

/// Per-actuator voltages, indexed like [`ActuatorId::index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoltagePlan {
    voltages: Vec<f64>,
}

impl VoltagePlan {
    pub fn new(voltages: Vec<f64>, compliance: f64) -> Result<Self> {
        for (i, &v) in voltages.iter().enumerate() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{}: voltage must be finite and >= 0, got {v}",
                    ActuatorId::from_index(i)
                )));
            }
            if v > compliance {
                return Err(Error::Range {
                    actuator: ActuatorId::from_index(i).to_string(),
                    required: v,
                    limit: compliance,
                });
            }
        }
        Ok(Self { voltages })
    }

    pub fn zeros(actuators: usize) -> Self {
        Self {
            voltages: vec![0.0; actuators],
        }
    }

    pub fn voltages(&self) -> &[f64] {
        &self.voltages
    }

    pub fn get(&self, id: ActuatorId) -> f64 {
        self.voltages[id.index()]
    }

    pub fn len(&self) -> usize {
        self.voltages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voltages.is_empty()
    }

    /// Copy with one actuator changed; checked against `compliance`.
    pub fn with(&self, id: ActuatorId, volts: f64, compliance: f64) -> Result<Self> {
        let mut v = self.voltages.clone();
        if id.index() >= v.len() {
            return Err(Error::invalid(format!("{id} is out of range")));
        }
        v[id.index()] = volts;
        Self::new(v, compliance)
    }
}
