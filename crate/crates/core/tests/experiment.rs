use photonic_mesh::experiment::*;
use photonic_mesh::hardware::{ideal_model, paper_model};
use photonic_mesh::linalg::haar_random_unitary;
use photonic_mesh::rng::derive_seed;
use photonic_mesh::Error;

#[test]
fn fidelity_falls_as_phase_noise_grows() {
    let base = paper_model(0).unwrap();
    let means: Vec<f64> = [0.0, 0.02, 0.04, 0.06, 0.08]
        .iter()
        .map(|&s| run_haar_experiment(200, &base.with_phase_noise(s).unwrap(), 42).unwrap().mean)
        .collect();
    for w in means.windows(2) {
        assert!(w[1] <= w[0], "{means:?}");
    }
    assert!(means[0] - means[4] > 0.005, "{means:?}");
}

#[test]
fn report_is_independent_of_thread_count() {
    let model = paper_model(1).unwrap();
    let parallel = run_haar_experiment(40, &model, 9).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| run_haar_experiment(40, &model, 9).unwrap());
    assert_eq!(parallel.to_json().unwrap(), serial.to_json().unwrap());
    let other = run_haar_experiment(40, &model, 10).unwrap();
    assert_ne!(parallel.fidelities, other.fidelities);
}

#[test]
fn report_records_its_seeds() {
    let model = paper_model(0).unwrap();
    let report = run_haar_experiment(5, &model, 77).unwrap();
    for (k, s) in report.seeds.iter().enumerate() {
        assert_eq!(s.haar, derive_seed(77, k as u64, HAAR_SEED_TAG));
        assert_eq!(s.noise, derive_seed(77, k as u64, NOISE_SEED_TAG));
        let u = haar_random_unitary::<f64>(12, s.haar).unwrap();
        let (_, f) = run_single(&u, &model, s.noise).unwrap();
        assert_eq!(f, report.fidelities[k]);
    }
    assert_eq!(report.model_fingerprint, model.fingerprint());
    assert_eq!(report.schema_version, REPORT_SCHEMA_VERSION);
    assert_eq!(FidelityReport::from_json(&report.to_json().unwrap()).unwrap(), report);
}

#[test]
fn summary_statistics_match_direct_computation() {
    let report = run_haar_experiment(30, &paper_model(2).unwrap(), 3).unwrap();
    let n = report.fidelities.len() as f64;
    let mean = report.fidelities.iter().sum::<f64>() / n;
    let var = report.fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((report.mean - mean).abs() < 1e-15);
    assert!((report.std - var.sqrt()).abs() < 1e-15);
}

#[test]
fn histogram_agrees_with_direct_count() {
    let report = run_haar_experiment(150, &paper_model(0).unwrap(), 5).unwrap();
    // Width chosen as a power of two so bin edges are exact.
    let width = 1.0 / 512.0;
    let bins = histogram(&report, width).unwrap();
    assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 150);
    for b in &bins {
        let direct = report.fidelities.iter().filter(|&&f| f >= b.lower && f < b.upper).count();
        assert_eq!(b.count, direct, "[{}, {})", b.lower, b.upper);
    }
    for w in bins.windows(2) {
        assert_eq!(w[0].upper, w[1].lower);
    }
    let csv = histogram_csv(&bins).unwrap();
    assert!(csv.starts_with("lower,upper,count\n"));
    assert_eq!(csv.lines().count(), bins.len() + 1);
}

#[test]
fn ideal_device_reaches_unity() {
    let report = run_haar_experiment(50, &ideal_model(12).unwrap(), 8).unwrap();
    assert!(report.mean >= 1.0 - 1e-9);
    assert!(report.fidelities.iter().all(|f| *f <= 1.0 + 1e-12));
}

#[test]
fn rejects_empty_runs_and_size_mismatch() {
    let model = paper_model(0).unwrap();
    assert!(matches!(run_haar_experiment(0, &model, 1), Err(Error::InvalidArgument(_))));
    let u = haar_random_unitary::<f64>(4, 0).unwrap();
    assert!(matches!(run_single(&u, &model, 0), Err(Error::InvalidArgument(_))));
}
