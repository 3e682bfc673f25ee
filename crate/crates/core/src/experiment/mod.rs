//! Haar-random fidelity benchmark: compile, drive the device, normalise,
//! score, aggregate.

mod record;
mod report;
mod run;

pub use record::MeasurementRecord;
pub use report::{histogram, histogram_csv, FidelityReport, HistogramBin, REPORT_SCHEMA_VERSION};
pub use run::{matrix_seeds, run_haar_experiment, run_single, HAAR_SEED_TAG, NOISE_SEED_TAG};
