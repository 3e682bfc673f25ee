//! Worked examples with values from independent oracles (closed forms,
//! hand algebra, or a separate dense-matrix product).

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use photonic_mesh::calibration::{
    extinction_ratio, fit_fringe, measure_insertion_loss, normalize_measurements, sweep_actuator,
    PortEfficiencies, SweepRange,
};
use photonic_mesh::experiment::{run_single, MeasurementRecord};
use photonic_mesh::hardware::*;
use photonic_mesh::linalg::{amplitude_fidelity, haar_random_unitary, is_unitary};
use photonic_mesh::mesh::{decompose, mesh_topology, reconstruct, unit_cell_matrix, UnitCellAddress};
use photonic_mesh::{AmplitudeMatrix, ComplexMatrix, Error, MeshSettings, Unitary};

const C0: Complex64 = Complex64::new(0.0, 0.0);

fn real_matrix(n: usize, rows: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_major(n, n, rows.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
}

#[test]
fn one_mode_haar_is_a_phase() {
    let u = haar_random_unitary::<f64>(1, 99).unwrap();
    assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-15);
    assert!(matches!(haar_random_unitary::<f64>(0, 1), Err(Error::InvalidArgument(_))));
}

#[test]
fn is_unitary_examples() {
    assert!(is_unitary(&ComplexMatrix::identity(12).unwrap(), 1e-12).unwrap());
    assert!(!is_unitary(&real_matrix(2, &[2.0, 0.0, 0.0, 2.0]), 1e-12).unwrap());
    assert!(is_unitary(haar_random_unitary::<f64>(12, 3).unwrap().matrix(), 1e-10).unwrap());
    let rect = ComplexMatrix::zeros(2, 3).unwrap();
    assert!(matches!(is_unitary(&rect, 1e-12), Err(Error::InvalidArgument(_))));
}

#[test]
fn balanced_splitter_against_identity_amplitudes() {
    // Tr([[.7071, .7071], [.7071, .7071]]ᵀ · I) / 2 = 1/√2.
    let h = Unitary::new(real_matrix(2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])).unwrap();
    let id = AmplitudeMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!((amplitude_fidelity(&h, &id).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
    let u = haar_random_unitary::<f64>(12, 5).unwrap();
    assert!((amplitude_fidelity(&u, &u.amplitudes()).unwrap() - 1.0).abs() < 1e-12);
    assert!(amplitude_fidelity(&u, &id).is_err());
}

#[test]
fn topology_examples() {
    assert_eq!(mesh_topology(2).unwrap(), vec![UnitCellAddress { column: 0, top_mode: 0 }]);
    let t3: Vec<(usize, usize)> = mesh_topology(3).unwrap().iter().map(|a| (a.column, a.top_mode)).collect();
    assert_eq!(t3, vec![(0, 0), (1, 1), (2, 0)]);
    let t12 = mesh_topology(12).unwrap();
    assert_eq!(t12.len(), 66);
    assert_eq!(t12.iter().map(|a| a.column).max(), Some(11));
    assert!(mesh_topology(1).is_err());
}

#[test]
fn unit_cell_against_direct_product() {
    // DC(½)·diag(e^{iθ},1)·DC(½)·diag(e^{iφ},1) multiplied out with nalgebra.
    let (theta, phi) = (PI / 2.0, PI / 3.0);
    let s = FRAC_1_SQRT_2;
    let dc = DMatrix::from_row_slice(2, 2, &[Complex64::new(s, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, s), Complex64::new(s, 0.0)]);
    let inner = DMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, theta), C0, C0, Complex64::new(1.0, 0.0)]);
    let outer = DMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, phi), C0, C0, Complex64::new(1.0, 0.0)]);
    let expected = &dc * &inner * &dc * &outer;
    let got = unit_cell_matrix::<f64>(theta, phi);
    for i in 0..2 {
        for j in 0..2 {
            assert!((got[(i, j)] - expected[(i, j)]).norm() < 1e-15);
        }
    }
}

#[test]
fn swap_is_one_cross_cell() {
    let swap = Unitary::new(real_matrix(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    let s = decompose(&swap).unwrap();
    assert_eq!(s.cells().len(), 1);
    assert!(s.cells()[0].theta.abs() < 1e-15);
    assert!(reconstruct(&s).unwrap().matrix().max_abs_diff(swap.matrix()).unwrap() < 1e-15);
}

#[test]
fn decompose_rejects_non_unitary_with_deviation() {
    let m = real_matrix(2, &[1.0, 0.0, 0.0, 1.0 + 1e-6]);
    let u = Unitary::with_tolerance(m, 1e-3).unwrap();
    match decompose(&u) {
        Err(Error::NotUnitary { deviation, .. }) => assert!((deviation - 2e-6).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
}

#[test]
fn paper_model_derived_figures() {
    assert!((kappa_for_extinction_db(20.0) - 0.45).abs() < 1e-15);
    let k = kappa_for_extinction_db(22.4);
    assert!((k - 0.462_071_121_248_540_8).abs() < 1e-15);
    assert!(((1.0 - 2.0 * k) - 0.0759).abs() < 1e-4);
    assert!((extinction_db_for_kappa(0.45) - 20.0).abs() < 1e-12);
    let m = paper_model(0).unwrap();
    assert!((m.loss.propagation_db_per_cm - 0.242_990_654_205_607_5).abs() < 1e-15);
    let mean_through = (0..12).map(|j| m.loss.through_db(j)).sum::<f64>() / 12.0;
    assert!((mean_through - 3.4).abs() < 1e-12);
    let mean_p = m.heaters().map(|h| h.p_two_pi).sum::<f64>() / 132.0;
    assert!((mean_p - 0.310).abs() < 1e-12);
    for c in m.cells() {
        assert!(((c.couplers[0].kappa - 0.5).abs() - (0.5 - k)).abs() < 1e-15);
        assert_eq!(c.couplers[0], c.couplers[1]);
    }
}

#[test]
fn heater_voltage_examples() {
    let h = HeaterParams::default();
    assert!((h.voltage_for(TAU) - 5.567_764_362_830_022).abs() < 1e-12);
    assert_eq!(h.voltage_for(0.0), 0.0);
    assert!((h.voltage_for(PI) - 3.937_003_937_005_906).abs() < 1e-12);
}

#[test]
fn measure_output_examples() {
    let ideal = ideal_model(12).unwrap();
    let id = MeshSettings::identity(12).unwrap();
    let p = measure_output(&ideal, &id, 3, 1e-3, 0).unwrap();
    assert!((p[3] - 1e-3).abs() < 1e-17 && p.iter().enumerate().all(|(j, v)| j == 3 || *v < 1e-30));
    let mut lossy = ideal.clone();
    lossy.loss = LossBudget::uniform(12, 0.0, 3.4, 1.0);
    let p = measure_output(&lossy, &id, 0, 1e-3, 0).unwrap();
    assert!((p[0] - 0.457_088_189_614_875e-3).abs() < 1e-15);
    assert!(matches!(measure_output(&ideal, &id, 12, 1e-3, 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn ideal_single_cell_fringe_has_full_visibility() {
    let mut dev = SimulatedDevice::new(ideal_model(2).unwrap(), 0).unwrap();
    let scan = sweep_actuator(
        &mut dev,
        &VoltagePlan::zeros(2),
        ActuatorId::from_index(0),
        SweepRange::new(0.0, 8.0, 401).unwrap(),
        0,
    )
    .unwrap();
    // bar power sin²(θ/2): zero at V = 0, one at V_π.
    let bar = scan.trace(0);
    assert!(bar[0] < 1e-30);
    assert!((bar.iter().copied().fold(0.0, f64::max) - 1e-3).abs() < 1e-8);
    assert_eq!(extinction_ratio(&scan, 0).unwrap(), photonic_mesh::calibration::EXTINCTION_CAP_DB);
    let cal = fit_fringe(&scan).unwrap_or_else(|e| panic!("{e}"));
    assert!((cal.visibility - 1.0).abs() < 1e-9);
}

#[test]
fn insertion_loss_examples() {
    let mut dev = SimulatedDevice::new(ideal_model(4).unwrap(), 0).unwrap();
    // Zero volts with zero offsets is θ = 0: cross state everywhere. Route
    // the identity explicitly.
    let plan = phases_to_voltages(&MeshSettings::identity(4).unwrap(), dev.model()).unwrap();
    dev.set_voltages(&plan).unwrap();
    for m in 0..4 {
        assert!(measure_insertion_loss(&mut dev, m).unwrap().abs() < 1e-12);
    }
}

#[test]
fn normalize_recovers_amplitudes() {
    let u = haar_random_unitary::<f64>(5, 8).unwrap();
    let dark = DetectorParams {
        dark_offset: vec![2e-7, 1e-7, 0.0, 3e-7, 5e-8],
        noise_sigma: 0.0,
    };
    let eff = PortEfficiencies::new(vec![0.9, 0.8, 0.95, 0.7, 0.85], vec![0.6, 0.9, 0.75, 0.8, 0.99]).unwrap();
    let cols: Vec<Vec<f64>> = (0..5)
        .map(|i| (0..5).map(|j| 1e-3 * u.matrix()[(j, i)].norm_sqr() * eff.input[i] * eff.output[j] + dark.dark_offset[j]).collect())
        .collect();
    let rec = MeasurementRecord::new(IntensityMatrix::from_columns(&cols).unwrap(), 1e-3, 0).unwrap();
    let a = normalize_measurements(&rec, &dark, &eff).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert!((a.get(j, i) - u.matrix()[(j, i)].norm()).abs() < 1e-9);
        }
    }
}

#[test]
fn normalize_scales_columns() {
    let rec = MeasurementRecord::new(IntensityMatrix::new(2, vec![4.0, 1.0, 0.0, 3.0]).unwrap(), 1.0, 0).unwrap();
    let a = normalize_measurements(&rec, &DetectorParams::ideal(2), &PortEfficiencies::unity(2)).unwrap();
    assert!((a.get(0, 0) - 1.0).abs() < 1e-15);
    assert!((a.get(0, 1).powi(2) + a.get(1, 1).powi(2) - 1.0).abs() < 1e-15);
}

/// Physical transfer matrix rebuilt from scratch: embedded 2x2 blocks of
/// every cell multiplied in column order, then facet and propagation loss.
fn dense_oracle(model: &HardwareModel, settings: &MeshSettings) -> DMatrix<Complex64> {
    let n = model.n();
    let mut t = DMatrix::<Complex64>::identity(n, n);
    for (cell, hw) in settings.cells().iter().zip(model.cells()) {
        let dc = |k: f64| {
            DMatrix::from_row_slice(2, 2, &[
                Complex64::new((1.0 - k).sqrt(), 0.0),
                Complex64::new(0.0, k.sqrt()),
                Complex64::new(0.0, k.sqrt()),
                Complex64::new((1.0 - k).sqrt(), 0.0),
            ])
        };
        let ph = |p: f64| DMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, p), C0, C0, Complex64::new(1.0, 0.0)]);
        let b = dc(hw.couplers[1].kappa) * ph(cell.theta) * dc(hw.couplers[0].kappa) * ph(cell.phi);
        let mut e = DMatrix::<Complex64>::identity(n, n);
        let m = cell.address.top_mode;
        for r in 0..2 {
            for c in 0..2 {
                e[(m + r, m + c)] = b[(r, c)];
            }
        }
        t = e * t;
    }
    let prop = 10f64.powf(-model.loss.propagation_db() / 20.0);
    for j in 0..n {
        for i in 0..n {
            let a = 10f64.powf(-(model.loss.output_coupling_db[j] + model.loss.input_coupling_db[i]) / 20.0) * prop;
            t[(j, i)] *= a;
        }
    }
    t
}

#[test]
fn run_single_matches_dense_oracle() {
    let mut model = paper_model(3).unwrap().with_phase_noise(0.0).unwrap();
    model.detector.noise_sigma = 0.0;
    for seed in 0..3 {
        let u = haar_random_unitary::<f64>(12, seed).unwrap();
        let (rec, f) = run_single(&u, &model, seed).unwrap();
        let t = dense_oracle(&model, &decompose(&u).unwrap());
        for i in 0..12 {
            for j in 0..12 {
                let expected = t[(j, i)].norm_sqr() * rec.input_power + model.detector.dark_offset[j];
                assert!((rec.intensities.get(j, i) - expected).abs() < 1e-12 * rec.input_power);
            }
        }
        // Score the oracle intensities independently.
        let mut amp = vec![0.0; 144];
        for i in 0..12 {
            let col: Vec<f64> = (0..12)
                .map(|j| t[(j, i)].norm_sqr() / (10f64.powf(-(model.loss.input_coupling_db[i] + model.loss.propagation_db() + model.loss.output_coupling_db[j]) / 10.0)))
                .collect();
            let norm = col.iter().sum::<f64>().sqrt();
            for j in 0..12 {
                amp[j * 12 + i] = col[j].sqrt() / norm;
            }
        }
        let f_oracle: f64 = (0..144).map(|k| amp[k] * u.matrix().as_slice()[k].norm()).sum::<f64>() / 12.0;
        assert!((f - f_oracle).abs() < 1e-9, "{f} vs {f_oracle}");
        assert!(f < 1.0 && f > 0.95);
    }
}
