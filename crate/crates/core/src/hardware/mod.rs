//! Simulated photonic processor: imperfect couplers, losses, heaters,
//! photodiodes, and the backend interface that drives them.

mod backend;
mod model;
mod params;
mod simulate;

pub use backend::{DeviceBackend, DeviceInfo, SimulatedDevice, DEFAULT_INPUT_POWER_W};
pub use model::{
    extinction_db_for_kappa, ideal_model, kappa_for_extinction_db, paper_model, reference, CellDefaults,
    CellOverride, DetectorConfig, HardwareModel, LossConfig, ModelConfig, PerPort,
};
pub use params::{
    db_to_amplitude, db_to_power, ActuatorId, ActuatorKind, CellHardware, CouplerParams, DetectorParams,
    HeaterParams, LossBudget, VoltagePlan, DEFAULT_COMPLIANCE_V, DEFAULT_RESISTANCE_OHM, NOMINAL_P_TWO_PI_W,
};
pub use simulate::{
    measure_output, phases_from_voltages, phases_to_voltages, realize_settings, simulate_transfer,
    IntensityMatrix,
};
