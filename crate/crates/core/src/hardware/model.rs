//! The imperfect-device description and its JSON configuration form.

use std::f64::consts::TAU;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::params::{
    CellHardware, CouplerParams, DetectorParams, HeaterParams, LossBudget, DEFAULT_COMPLIANCE_V,
    NOMINAL_P_TWO_PI_W,
};
use crate::error::{Error, Result};
use crate::mesh::{mesh_topology, UnitCellAddress};
use crate::rng::{self, Stream};

/// Figures the reference 12-mode device is built to reproduce.
pub mod reference {
    pub const MODES: usize = 12;
    /// Average MZI extinction ratio, dB.
    pub const EXTINCTION_RATIO_DB: f64 = 22.4;
    /// Average per-mode insertion loss, dB.
    pub const INSERTION_LOSS_DB: f64 = 3.4;
    /// Fibre-to-chip coupling loss per facet, dB.
    pub const FACET_LOSS_DB: f64 = 0.4;
    /// Optical path length through the mesh, cm.
    pub const PATH_LENGTH_CM: f64 = 10.7;
    pub const P_TWO_PI_W: f64 = super::NOMINAL_P_TWO_PI_W;
    /// Phase-setting error std (radians) declared for the reference
    /// device. With the coupler imbalance above, a 100-matrix benchmark then
    /// gives a mean amplitude fidelity near 0.985 and a spread near 0.003.
    pub const PHASE_SET_NOISE_SIGMA: f64 = 0.06;
    /// Spread of per-port facet loss, dB (uniform, re-centred).
    pub const FACET_SPREAD_DB: f64 = 0.15;
    /// Relative spread of heater efficiency (uniform, re-centred).
    pub const HEATER_SPREAD: f64 = 0.05;
    pub const RESISTANCE_SPREAD: f64 = 0.05;
    pub const DARK_OFFSET_W: f64 = 1e-8;
    pub const DETECTOR_NOISE_SIGMA: f64 = 0.002;
}

/// Power coupling ratio of two identical couplers giving an MZI bar-port
/// extinction ratio of `er_db`: `ER = 10 log10(1 / (1 - 2κ)²)`, `κ < 1/2`.
pub fn kappa_for_extinction_db(er_db: f64) -> f64 {
    0.5 * (1.0 - 10f64.powf(-er_db / 20.0))
}

/// Inverse of [`kappa_for_extinction_db`] for identical couplers.
pub fn extinction_db_for_kappa(kappa: f64) -> f64 {
    let a = 1.0 - kappa;
    let b = kappa;
    10.0 * ((a + b).powi(2) / (a - b).powi(2)).log10()
}

/// Full description of a simulated processor. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct HardwareModel {
    n: usize,
    cells: Vec<CellHardware>,
    pub loss: LossBudget,
    pub detector: DetectorParams,
    /// Std of the Gaussian error on every realised phase, radians.
    pub phase_set_noise_sigma: f64,
    /// Maximum voltage any heater may be driven with.
    pub compliance_voltage: f64,
}

impl HardwareModel {
    /// Cells must cover [`mesh_topology`] exactly, in any order.
    pub fn new(
        n: usize,
        mut cells: Vec<CellHardware>,
        loss: LossBudget,
        detector: DetectorParams,
        phase_set_noise_sigma: f64,
        compliance_voltage: f64,
    ) -> Result<Self> {
        let topo = mesh_topology(n)?;
        cells.sort_by_key(|c| c.address);
        let addrs: Vec<UnitCellAddress> = cells.iter().map(|c| c.address).collect();
        if addrs != topo {
            return Err(Error::invalid(format!(
                "model cells do not match the {n}-mode mesh topology"
            )));
        }
        for c in &cells {
            c.couplers[0].validate()?;
            c.couplers[1].validate()?;
            c.theta_heater.validate()?;
            c.phi_heater.validate()?;
        }
        loss.validate(n)?;
        detector.validate(n)?;
        if !(phase_set_noise_sigma >= 0.0 && phase_set_noise_sigma.is_finite()) {
            return Err(Error::invalid("phase_set_noise_sigma must be finite and >= 0"));
        }
        if !(compliance_voltage > 0.0 && compliance_voltage.is_finite()) {
            return Err(Error::invalid("compliance voltage must be positive"));
        }
        Ok(Self {
            n,
            cells,
            loss,
            detector,
            phase_set_noise_sigma,
            compliance_voltage,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Cells in evaluation order.
    pub fn cells(&self) -> &[CellHardware] {
        &self.cells
    }

    pub fn topology(&self) -> Vec<UnitCellAddress> {
        self.cells.iter().map(|c| c.address).collect()
    }

    pub fn actuator_count(&self) -> usize {
        2 * self.cells.len()
    }

    pub fn heaters(&self) -> impl Iterator<Item = &HeaterParams> + '_ {
        self.cells.iter().flat_map(|c| [&c.theta_heater, &c.phi_heater])
    }

    /// Copy with a different phase-setting noise level.
    pub fn with_phase_noise(&self, sigma: f64) -> Result<Self> {
        let mut m = self.clone();
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("phase noise must be finite and >= 0"));
        }
        m.phase_set_noise_sigma = sigma;
        Ok(m)
    }

    /// Copy with every coupler set to `kappa`.
    pub fn with_uniform_kappa(&self, kappa: f64) -> Result<Self> {
        let c = CouplerParams::new(kappa)?;
        let mut m = self.clone();
        for cell in &mut m.cells {
            cell.couplers = [c, c];
        }
        Ok(m)
    }

    pub fn to_config(&self) -> ModelConfig {
        ModelConfig {
            n: self.n,
            defaults: CellDefaults::default(),
            cells: self
                .cells
                .iter()
                .map(|c| CellOverride {
                    column: c.address.column,
                    top_mode: c.address.top_mode,
                    kappa: Some([c.couplers[0].kappa, c.couplers[1].kappa]),
                    theta_heater: Some(c.theta_heater),
                    phi_heater: Some(c.phi_heater),
                })
                .collect(),
            loss: LossConfig {
                input_coupling_db: PerPort::Each(self.loss.input_coupling_db.clone()),
                output_coupling_db: PerPort::Each(self.loss.output_coupling_db.clone()),
                propagation_db_per_cm: self.loss.propagation_db_per_cm,
                path_length_cm: self.loss.path_length_cm,
            },
            detector: DetectorConfig {
                dark_offset: PerPort::Each(self.detector.dark_offset.clone()),
                noise_sigma: self.detector.noise_sigma,
            },
            phase_set_noise_sigma: self.phase_set_noise_sigma,
            compliance_voltage: self.compliance_voltage,
        }
    }

    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        let n = cfg.n;
        let topo = mesh_topology(n)?;
        let base = |address| CellHardware {
            address,
            couplers: [CouplerParams { kappa: cfg.defaults.kappa[0] }, CouplerParams { kappa: cfg.defaults.kappa[1] }],
            theta_heater: cfg.defaults.heater,
            phi_heater: cfg.defaults.heater,
        };
        let mut cells: Vec<CellHardware> = topo.iter().copied().map(base).collect();
        for o in &cfg.cells {
            let addr = UnitCellAddress::new(o.column, o.top_mode);
            let idx = topo
                .binary_search(&addr)
                .map_err(|_| Error::invalid(format!("override for unknown cell {addr:?}")))?;
            let cell = &mut cells[idx];
            if let Some(k) = o.kappa {
                cell.couplers = [CouplerParams { kappa: k[0] }, CouplerParams { kappa: k[1] }];
            }
            if let Some(h) = o.theta_heater {
                cell.theta_heater = h;
            }
            if let Some(h) = o.phi_heater {
                cell.phi_heater = h;
            }
        }
        let loss = LossBudget {
            input_coupling_db: cfg.loss.input_coupling_db.expand(n, "input_coupling_db")?,
            output_coupling_db: cfg.loss.output_coupling_db.expand(n, "output_coupling_db")?,
            propagation_db_per_cm: cfg.loss.propagation_db_per_cm,
            path_length_cm: cfg.loss.path_length_cm,
        };
        let detector = DetectorParams {
            dark_offset: cfg.detector.dark_offset.expand(n, "dark_offset")?,
            noise_sigma: cfg.detector.noise_sigma,
        };
        Self::new(n, cells, loss, detector, cfg.phase_set_noise_sigma, cfg.compliance_voltage)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_config())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text)?;
        Self::from_config(&cfg)
    }

    /// SHA-256 of the compact, fully explicit JSON form, hex encoded.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(&self.to_config()).expect("model config serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Perfect device: balanced couplers, no loss, no dark offset, no noise,
/// nominal heaters.
pub fn ideal_model(n: usize) -> Result<HardwareModel> {
    let cells = mesh_topology(n)?
        .into_iter()
        .map(|address| CellHardware {
            address,
            couplers: [CouplerParams::BALANCED; 2],
            theta_heater: HeaterParams::default(),
            phi_heater: HeaterParams::default(),
        })
        .collect();
    HardwareModel::new(
        n,
        cells,
        LossBudget::lossless(n),
        DetectorParams::ideal(n),
        0.0,
        DEFAULT_COMPLIANCE_V,
    )
}

/// The reference 12-mode device.
///
/// Every cell has two identical couplers offset from 1/2 by the amount that
/// gives a 22.4 dB extinction ratio, with the sign of the offset drawn per
/// cell. Facet losses scatter around 0.4 dB per port and are re-centred so
/// the mean through loss is exactly 3.4 dB, the remainder being
/// propagation loss over 10.7 cm. Heater efficiencies and resistances
/// scatter around 310 mW / 100 Ω (re-centred on the nominal mean); zero
/// drive phases are uniform in `[0, 2π)`.
pub fn paper_model(seed: u64) -> Result<HardwareModel> {
    use reference as r;
    let n = r::MODES;
    let mut rng = rng::rng(seed, Stream::ModelDraw);
    let topo = mesh_topology(n)?;
    let deviation = 0.5 - kappa_for_extinction_db(r::EXTINCTION_RATIO_DB);

    let mut spread = |count: usize, width: f64| -> Vec<f64> {
        let raw: Vec<f64> = (0..count).map(|_| rng.random_range(-width..=width)).collect();
        let mean = raw.iter().sum::<f64>() / count as f64;
        raw.into_iter().map(|x| x - mean).collect()
    };
    let in_facet = spread(n, r::FACET_SPREAD_DB);
    let out_facet = spread(n, r::FACET_SPREAD_DB);
    let p_scale = spread(2 * topo.len(), r::HEATER_SPREAD);
    let r_scale = spread(2 * topo.len(), r::RESISTANCE_SPREAD);

    let mut cells = Vec::with_capacity(topo.len());
    for (k, address) in topo.into_iter().enumerate() {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let coupler = CouplerParams { kappa: 0.5 + sign * deviation };
        let mut heater = |j: usize| HeaterParams {
            resistance: super::params::DEFAULT_RESISTANCE_OHM * (1.0 + r_scale[j]),
            p_two_pi: r::P_TWO_PI_W * (1.0 + p_scale[j]),
            phi_offset: rng.random_range(0.0..TAU),
        };
        let theta_heater = heater(2 * k);
        let phi_heater = heater(2 * k + 1);
        cells.push(CellHardware {
            address,
            couplers: [coupler; 2],
            theta_heater,
            phi_heater,
        });
    }

    let propagation = (r::INSERTION_LOSS_DB - 2.0 * r::FACET_LOSS_DB) / r::PATH_LENGTH_CM;
    let loss = LossBudget {
        input_coupling_db: in_facet.iter().map(|d| r::FACET_LOSS_DB + d).collect(),
        output_coupling_db: out_facet.iter().map(|d| r::FACET_LOSS_DB + d).collect(),
        propagation_db_per_cm: propagation,
        path_length_cm: r::PATH_LENGTH_CM,
    };
    let detector = DetectorParams {
        dark_offset: vec![r::DARK_OFFSET_W; n],
        noise_sigma: r::DETECTOR_NOISE_SIGMA,
    };
    HardwareModel::new(
        n,
        cells,
        loss,
        detector,
        r::PHASE_SET_NOISE_SIGMA,
        DEFAULT_COMPLIANCE_V,
    )
}

/// Configuration document: global defaults plus optional per-cell overrides.
///
/// ```json
/// {
///   "n": 12,
///   "defaults": {"kappa": [0.5, 0.5], "heater": {"resistance": 100, "p_two_pi": 0.31, "phi_offset": 0}},
///   "cells": [{"column": 0, "top_mode": 0, "kappa": [0.46, 0.46]}],
///   "loss": {"input_coupling_db": 0.4, "output_coupling_db": [0.4, ...],
///            "propagation_db_per_cm": 0.243, "path_length_cm": 10.7},
///   "detector": {"dark_offset": 1e-8, "noise_sigma": 0.0},
///   "phase_set_noise_sigma": 0.0,
///   "compliance_voltage": 10.0
/// }
/// ```
///
/// Per-port quantities accept either one number for all ports or an array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    #[serde(default)]
    pub defaults: CellDefaults,
    #[serde(default)]
    pub cells: Vec<CellOverride>,
    #[serde(default)]
    pub loss: LossConfig,
    #[serde(default)]
    pub detector: DetectorConfig,
    #[serde(default)]
    pub phase_set_noise_sigma: f64,
    #[serde(default = "default_compliance")]
    pub compliance_voltage: f64,
}

fn default_compliance() -> f64 {
    DEFAULT_COMPLIANCE_V
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDefaults {
    pub kappa: [f64; 2],
    pub heater: HeaterParams,
}

impl Default for CellDefaults {
    fn default() -> Self {
        Self {
            kappa: [0.5, 0.5],
            heater: HeaterParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellOverride {
    pub column: usize,
    pub top_mode: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_heater: Option<HeaterParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_heater: Option<HeaterParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerPort {
    All(f64),
    Each(Vec<f64>),
}

impl Default for PerPort {
    fn default() -> Self {
        PerPort::All(0.0)
    }
}

impl PerPort {
    fn expand(&self, n: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            PerPort::All(v) => Ok(vec![*v; n]),
            PerPort::Each(v) if v.len() == n => Ok(v.clone()),
            PerPort::Each(v) => Err(Error::invalid(format!("{what}: expected {n} values, got {}", v.len()))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    #[serde(default)]
    pub input_coupling_db: PerPort,
    #[serde(default)]
    pub output_coupling_db: PerPort,
    #[serde(default)]
    pub propagation_db_per_cm: f64,
    #[serde(default)]
    pub path_length_cm: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    #[serde(default)]
    pub dark_offset: PerPort,
    #[serde(default)]
    pub noise_sigma: f64,
}
