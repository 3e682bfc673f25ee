//! Device characterisation: heater sweeps and fits, extinction ratio,
//! insertion loss and normalisation of raw detector data.
//!
//! The measurement procedures here are reasonable stand-ins; the exact lab
//! procedures they imitate are not documented in detail.

mod fit;
mod metrics;
mod procedure;
mod scan;

pub use fit::{fit_cosine, fit_fringe, fit_fringe_port, CosineFit, HeaterCalibration};
pub use metrics::{
    extinction_ratio, measure_insertion_loss, normalize_measurements, PortEfficiencies, EXTINCTION_CAP_DB,
};
pub use procedure::{
    calibrate_device, route_identity, CalibrationOptions, CalibrationStore, CellExtinction, STORE_FORMAT_VERSION,
};
pub(crate) use scan::csv_err;
pub use scan::{sweep_actuator, sweep_all_inputs, FringeScan, SweepRange, MIN_SWEEP_POINTS};
