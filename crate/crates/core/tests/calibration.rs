use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use photonic_mesh::calibration::*;
use photonic_mesh::hardware::*;
use photonic_mesh::mesh::mesh_topology;
use photonic_mesh::scalar::wrap_phase;
use photonic_mesh::Error;

/// Small lossy device with scattered heaters and 22.4 dB couplers.
fn device_model(n: usize, noise: f64, seed: u64) -> HardwareModel {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let k = kappa_for_extinction_db(22.4);
    let cells = mesh_topology(n)
        .unwrap()
        .into_iter()
        .map(|address| {
            let kappa = if rng.random::<bool>() { k } else { 1.0 - k };
            let mut heater = || HeaterParams {
                resistance: rng.random_range(90.0..110.0),
                p_two_pi: rng.random_range(0.26..0.36),
                phi_offset: rng.random_range(0.0..TAU),
            };
            CellHardware {
                address,
                couplers: [CouplerParams::new(kappa).unwrap(); 2],
                theta_heater: heater(),
                phi_heater: heater(),
            }
        })
        .collect();
    let mut loss = LossBudget::uniform(n, 0.4, 0.243, 10.7);
    loss.output_coupling_db[n - 1] = 0.7;
    let detector = DetectorParams {
        dark_offset: vec![1e-8; n],
        noise_sigma: noise,
    };
    HardwareModel::new(n, cells, loss, detector, 0.0, DEFAULT_COMPLIANCE_V).unwrap()
}

fn truth(model: &HardwareModel, id: ActuatorId) -> HeaterParams {
    *model.cells()[id.cell].heater(id.kind)
}

fn check_p_two_pi(noise: f64, tol: f64) {
    let model = device_model(4, noise, 11);
    let mut dev = SimulatedDevice::new(model.clone(), 5).unwrap();
    let store = calibrate_device(&mut dev, CalibrationOptions::default()).unwrap();
    assert_eq!(store.heaters.len() + store.unobservable.len(), 12);
    assert!(store.unobservable.iter().all(|id| id.kind == ActuatorKind::Phi));
    assert!(store.heaters.iter().filter(|h| h.actuator.kind == ActuatorKind::Theta).count() == 6);
    for h in &store.heaters {
        let t = truth(&model, h.actuator);
        let rel = (h.p_two_pi / t.p_two_pi - 1.0).abs();
        assert!(rel < tol, "{}: {} vs {} ({rel:.2e})", h.actuator, h.p_two_pi, t.p_two_pi);
        assert_eq!(h.resistance, t.resistance);
    }
}

#[test]
fn recovers_heater_efficiency_without_noise() {
    check_p_two_pi(0.0, 0.005);
}

#[test]
fn recovers_heater_efficiency_with_detector_noise() {
    check_p_two_pi(0.01, 0.02);
}

#[test]
fn lone_cell_offset_is_absolute() {
    let model = device_model(2, 0.0, 3);
    let mut dev = SimulatedDevice::new(model.clone(), 0).unwrap();
    let store = calibrate_device(&mut dev, CalibrationOptions::default()).unwrap();
    let id = ActuatorId::new(0, ActuatorKind::Theta);
    let h = store.heater(id).unwrap();
    assert!(h.offset_absolute);
    let gap = wrap_phase(h.phi_offset - truth(&model, id).phi_offset);
    assert!(gap.min(TAU - gap) < 0.01, "offset error {gap}");
    // The routed identity state really is bar.
    let cell = &store.extinction_ratio_db[0];
    assert!((cell.extinction_ratio_db - 22.4).abs() < 0.2, "{}", cell.extinction_ratio_db);
}

#[test]
fn insertion_loss_matches_budget() {
    let model = device_model(4, 0.0, 21);
    let mut dev = SimulatedDevice::new(model.clone(), 0).unwrap();
    let store = calibrate_device(&mut dev, CalibrationOptions::default()).unwrap();
    for (m, il) in store.insertion_loss_db.iter().enumerate() {
        let expected = model.loss.through_db(m);
        assert!((il - expected).abs() < 0.01, "mode {m}: {il} vs {expected}");
    }
    let eff = &store.port_efficiencies;
    for m in 0..4 {
        let db = -10.0 * (eff.input[m] * eff.output[m]).log10();
        assert!((db - store.insertion_loss_db[m]).abs() < 1e-9);
    }
}

#[test]
fn insertion_loss_adds_in_db() {
    // Loss terms combine additively: measured loss equals the sum of facet
    // and propagation figures for every port.
    let mut model = ideal_model(3).unwrap();
    model.loss = LossBudget {
        input_coupling_db: vec![0.3, 0.5, 0.9],
        output_coupling_db: vec![0.2, 0.4, 1.1],
        propagation_db_per_cm: 0.25,
        path_length_cm: 4.0,
    };
    let plan = phases_to_voltages(&photonic_mesh::MeshSettings::identity(3).unwrap(), &model).unwrap();
    let mut dev = SimulatedDevice::new(model, 0).unwrap();
    dev.set_voltages(&plan).unwrap();
    for (m, expected) in [1.5, 1.9, 3.0].into_iter().enumerate() {
        assert!((measure_insertion_loss(&mut dev, m).unwrap() - expected).abs() < 1e-9);
    }
}

#[test]
fn store_round_trips_through_json() {
    let mut dev = SimulatedDevice::new(device_model(3, 0.0, 2), 0).unwrap();
    let store = calibrate_device(&mut dev, CalibrationOptions { points: 201, ..Default::default() }).unwrap();
    assert_eq!(store.device_fingerprint, dev.info().fingerprint());
    assert!(store.finished_unix_s >= store.started_unix_s);
    let back = CalibrationStore::from_json(&store.to_json().unwrap()).unwrap();
    assert_eq!(back, store);
    let mut bad: serde_json::Value = serde_json::from_str(&store.to_json().unwrap()).unwrap();
    bad["format_version"] = serde_json::json!(99);
    assert!(matches!(CalibrationStore::from_json(&bad.to_string()), Err(Error::InvalidArgument(_))));
}

#[test]
fn scan_csv_layout() {
    let mut dev = SimulatedDevice::new(ideal_model(3).unwrap(), 0).unwrap();
    let scan = sweep_actuator(
        &mut dev,
        &VoltagePlan::zeros(6),
        ActuatorId::new(1, ActuatorKind::Theta),
        SweepRange::new(0.0, 6.0, 20).unwrap(),
        1,
    )
    .unwrap();
    let csv = scan.to_csv().unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "voltage,port_0,port_1,port_2");
    assert_eq!(lines.len(), 21);
    let last: Vec<f64> = lines[20].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 6.0);
    assert!((last[1..].iter().sum::<f64>() - DEFAULT_INPUT_POWER_W).abs() < 1e-15);
}

#[test]
fn sweep_rejects_bad_requests() {
    let mut dev = SimulatedDevice::new(ideal_model(2).unwrap(), 0).unwrap();
    let id = ActuatorId::from_index(0);
    assert!(matches!(SweepRange::new(0.0, 5.0, MIN_SWEEP_POINTS - 1), Err(Error::InvalidArgument(_))));
    assert!(matches!(SweepRange::new(3.0, 1.0, 100), Err(Error::InvalidArgument(_))));
    let over = SweepRange::new(0.0, DEFAULT_COMPLIANCE_V + 1.0, 100).unwrap();
    let err = sweep_actuator(&mut dev, &VoltagePlan::zeros(2), id, over, 0).unwrap_err();
    assert!(matches!(err, Error::Range { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
    let ok = SweepRange::new(0.0, 5.0, 100).unwrap();
    assert!(sweep_actuator(&mut dev, &VoltagePlan::zeros(2), id, ok, 2).is_err());
    assert!(sweep_actuator(&mut dev, &VoltagePlan::zeros(3), id, ok, 0).is_err());
}

#[test]
fn stuck_heater_fails_calibration() {
    let mut model = device_model(2, 0.0, 4);
    let mut cfg = model.to_config();
    cfg.cells[0].theta_heater.as_mut().unwrap().p_two_pi = 1e6;
    model = HardwareModel::from_config(&cfg).unwrap();
    let mut dev = SimulatedDevice::new(model, 0).unwrap();
    let err = calibrate_device(&mut dev, CalibrationOptions::default()).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
}
