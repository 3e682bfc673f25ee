use serde::{Deserialize, Serialize};

use crate::calibration::PortEfficiencies;
use crate::error::{Error, Result};
use crate::hardware::HardwareModel;

/// Version of the report JSON layout. Bump on any incompatible change.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Outcome of a benchmark run.
///
/// ```json
/// {
///   "schema_version": 1,
///   "n": 12,
///   "count": 100,
///   "mean": 0.986,
///   "std": 0.006,
///   "fidelities": [...],
///   "master_seed": 1234,
///   "seeds": [{"haar": ..., "noise": ...}, ...],
///   "model_fingerprint": "<sha-256 hex>",
///   "phase_set_noise_sigma": 0.06,
///   "port_efficiencies": {"input": [...], "output": [...]}
/// }
/// ```
///
/// `std` is the sample standard deviation (n - 1 denominator), reported as
/// 0 for a single matrix. No timestamps are written, so identical runs give
/// identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub schema_version: u32,
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub fidelities: Vec<f64>,
    pub master_seed: u64,
    pub seeds: Vec<MatrixSeeds>,
    pub model_fingerprint: String,
    pub phase_set_noise_sigma: f64,
    /// Efficiencies used to normalise the measurements.
    pub port_efficiencies: PortEfficiencies,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSeeds {
    pub haar: u64,
    pub noise: u64,
}

impl FidelityReport {
    pub fn new(fidelities: Vec<f64>, master_seed: u64, seeds: Vec<(u64, u64)>, model: &HardwareModel) -> Result<Self> {
        let count = fidelities.len();
        if count == 0 || seeds.len() != count {
            return Err(Error::invalid("a report needs one seed pair per fidelity and at least one entry"));
        }
        let mean = fidelities.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            schema_version: REPORT_SCHEMA_VERSION,
            n: model.n(),
            count,
            mean,
            std,
            fidelities,
            master_seed,
            seeds: seeds.into_iter().map(|(haar, noise)| MatrixSeeds { haar, noise }).collect(),
            model_fingerprint: model.fingerprint(),
            phase_set_noise_sigma: model.phase_set_noise_sigma,
            port_efficiencies: PortEfficiencies::from_model(model),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::invalid(format!("unsupported report schema version {}", r.schema_version)));
        }
        Ok(r)
    }
}

/// Half-open bin `[lower, upper)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

fn bin_index(f: f64, width: f64) -> i64 {
    let q = f / width;
    // A value on a bin edge can divide to just under the integer.
    let r = q.round();
    if (q - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as i64
    } else {
        q.floor() as i64
    }
}

/// Bins aligned to multiples of `width`, covering every value, with empty
/// bins inside the occupied range kept.
pub fn histogram(report: &FidelityReport, width: f64) -> Result<Vec<HistogramBin>> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::invalid("bin width must be > 0"));
    }
    let idx: Vec<i64> = report.fidelities.iter().map(|&f| bin_index(f, width)).collect();
    let (Some(&lo), Some(&hi)) = (idx.iter().min(), idx.iter().max()) else {
        return Ok(Vec::new());
    };
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for k in idx {
        counts[(k - lo) as usize] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(o, count)| {
            let k = lo + o as i64;
            HistogramBin {
                lower: k as f64 * width,
                upper: (k + 1) as f64 * width,
                count,
            }
        })
        .collect())
}

/// CSV with header `lower,upper,count`.
pub fn histogram_csv(bins: &[HistogramBin]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for b in bins {
        w.serialize(b).map_err(crate::calibration::csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::ideal_model;

    fn report(f: Vec<f64>) -> FidelityReport {
        let seeds = (0..f.len() as u64).map(|k| (k, k)).collect();
        FidelityReport::new(f, 0, seeds, &ideal_model(2).unwrap()).unwrap()
    }

    #[test]
    fn single_matrix_std_is_zero() {
        let r = report(vec![0.9]);
        assert_eq!(r.std, 0.0);
        assert_eq!(r.mean, 0.9);
    }

    #[test]
    fn sample_std() {
        let r = report(vec![1.0, 2.0, 3.0, 4.0]);
        assert!((r.std - (5.0_f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn all_ones_single_bin() {
        let bins = histogram(&report(vec![1.0; 100]), 0.01).unwrap();
        assert_eq!(bins.len(), 1);
        assert_eq!(bins[0].count, 100);
        assert!((bins[0].lower - 1.0).abs() < 1e-12 && (bins[0].upper - 1.01).abs() < 1e-12);
    }

    #[test]
    fn empty_bins_are_kept() {
        let bins = histogram(&report(vec![0.3, 0.55, 0.3]), 0.1).unwrap();
        let counts: Vec<usize> = bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![2, 0, 1]);
        assert!((bins[0].lower - 0.3).abs() < 1e-12);
        assert!(histogram(&report(vec![0.3]), 0.0).is_err());
        let csv = histogram_csv(&bins).unwrap();
        assert!(csv.starts_with("lower,upper,count\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn json_round_trip() {
        let r = report(vec![0.5, 0.25]);
        assert_eq!(FidelityReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
}
