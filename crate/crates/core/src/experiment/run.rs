use rayon::prelude::*;

use super::record::MeasurementRecord;
use super::report::FidelityReport;
use crate::calibration::{normalize_measurements, PortEfficiencies};
use crate::error::{Error, Result};
use crate::hardware::{phases_to_voltages, DeviceBackend, HardwareModel, SimulatedDevice, DEFAULT_INPUT_POWER_W};
use crate::linalg::{amplitude_fidelity, haar_random_unitary};
use crate::mesh::decompose;
use crate::rng::derive_seed;
use crate::Unitary;

/// Tag mixed into the master seed for the Haar draw of each matrix.
pub const HAAR_SEED_TAG: u64 = 0x4841_4152;
/// Tag mixed into the master seed for the device session of each matrix.
pub const NOISE_SEED_TAG: u64 = 0x4e4f_4953;

/// `(haar_seed, noise_seed)` of matrix `index` in a run seeded with `master`.
pub fn matrix_seeds(master: u64, index: u64) -> (u64, u64) {
    (
        derive_seed(master, index, HAAR_SEED_TAG),
        derive_seed(master, index, NOISE_SEED_TAG),
    )
}

/// Compile `u`, program it on a simulated device session seeded with
/// `seed`, read every input and score the normalised result.
///
/// Voltages come from the model's own heater parameters and the
/// normalisation uses the model's loss budget and dark offsets. The output
/// phase layer has no actuators; it does not affect intensities.
pub fn run_single(u: &Unitary, model: &HardwareModel, seed: u64) -> Result<(MeasurementRecord, f64)> {
    if u.n() != model.n() {
        return Err(Error::invalid(format!(
            "unitary is {0}x{0} but the device has {1} modes",
            u.n(),
            model.n()
        )));
    }
    let settings = decompose(u)?;
    let plan = phases_to_voltages(&settings, model)?;
    let mut device = SimulatedDevice::new(model.clone(), seed)?;
    device.set_voltages(&plan)?;
    let record = MeasurementRecord::new(device.read_outputs()?, DEFAULT_INPUT_POWER_W, seed)?;
    let measured = normalize_measurements(&record, &model.detector, &PortEfficiencies::from_model(model))?;
    let fidelity = amplitude_fidelity(u, &measured)?;
    Ok((record, fidelity))
}

/// Benchmark `count` Haar-random unitaries. Matrices are evaluated in
/// parallel; results are assembled in index order, so the report depends
/// only on `(count, model, seed)`.
pub fn run_haar_experiment(count: usize, model: &HardwareModel, seed: u64) -> Result<FidelityReport> {
    if count == 0 {
        return Err(Error::invalid("an experiment needs at least one matrix"));
    }
    let seeds: Vec<(u64, u64)> = (0..count as u64).map(|k| matrix_seeds(seed, k)).collect();
    let fidelities = seeds
        .par_iter()
        .map(|&(haar, noise)| {
            let u = haar_random_unitary::<f64>(model.n(), haar)?;
            run_single(&u, model, noise).map(|(_, f)| f)
        })
        .collect::<Result<Vec<f64>>>()?;
    FidelityReport::new(fidelities, seed, seeds, model)
}
