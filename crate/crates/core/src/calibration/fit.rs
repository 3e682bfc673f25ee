//! Phase-voltage fitting.
//!
//! The power seen at any port while a single heater is driven is
//! `I(V) = A + B cos(δ + ω V²)`, whatever the rest of the mesh does, since
//! the field is linear in `e^{iφ}` of that heater. With `x = V²` the model is
//! linear in `(A, B cos δ, -B sin δ)` for fixed `ω`, so the fit scans `ω`
//! on a fine grid solving a 3x3 least-squares problem at each point, then
//! polishes the best `ω` by golden-section search.
//!
//! `p_two_pi = 2π / (ω R)`. The fitted `δ` is the fringe phase at zero drive:
//! it equals the heater offset at the cross port of an isolated cell and the
//! offset plus π at its bar port; inside a mesh it also contains the phases
//! of the surrounding cells.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::scan::FringeScan;
use crate::error::{Error, Result};
use crate::hardware::ActuatorId;
use crate::scalar::wrap_phase;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeaterCalibration {
    pub actuator: ActuatorId,
    pub input: usize,
    pub port: usize,
    /// Fringe phase at zero drive, radians in `[0, 2π)`.
    pub phi_offset: f64,
    /// True when `phi_offset` is the heater's own zero-drive phase rather
    /// than a fringe phase that includes the rest of the mesh.
    #[serde(default)]
    pub offset_absolute: bool,
    pub p_two_pi: f64,
    pub resistance: f64,
    /// `1/ω`: volts² per radian.
    pub volts_sq_per_radian: f64,
    /// `B / A` of the fitted fringe.
    pub visibility: f64,
    /// RMS residual divided by the fringe amplitude `B`.
    pub residual: f64,
}

impl HeaterCalibration {
    /// Spatial frequency in V²: phase advances by `ω V²`.
    pub fn omega(&self) -> f64 {
        1.0 / self.volts_sq_per_radian
    }

    /// Extinction of the fitted fringe, `10 log10((A + B) / (A - B))`,
    /// capped like [`extinction_ratio`](super::extinction_ratio).
    pub fn fringe_extinction_db(&self) -> f64 {
        let v = self.visibility;
        if v >= 1.0 {
            return super::EXTINCTION_CAP_DB;
        }
        (10.0 * ((1.0 + v) / (1.0 - v)).log10()).min(super::EXTINCTION_CAP_DB)
    }

    /// Smallest voltage at which the fitted fringe phase `δ + ω V²` equals
    /// `target` mod 2π.
    pub fn voltage_for_fringe_phase(&self, target: f64) -> f64 {
        (wrap_phase(target - self.phi_offset) * self.volts_sq_per_radian).sqrt()
    }
}

/// `A + B cos(δ + ω x)` fitted to samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineFit {
    pub omega: f64,
    pub mean: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub rms: f64,
}

impl CosineFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.mean + self.amplitude * (self.phase + self.omega * x).cos()
    }
}

/// Least-squares `(A, C, S)` for `y ≈ A + C cos(ωx) + S sin(ωx)` and the
/// residual sum of squares.
pub(crate) fn linear_part(x: &[f64], y: &[f64], omega: f64) -> Option<([f64; 3], f64)> {
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let (s, c) = (omega * xi).sin_cos();
        let row = [1.0, c, s];
        for r in 0..3 {
            aty[r] += row[r] * yi;
            for k in 0..3 {
                ata[r][k] += row[r] * row[k];
            }
        }
    }
    let coef = solve3(ata, aty)?;
    let ssr = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let (s, c) = (omega * xi).sin_cos();
            let r = yi - coef[0] - coef[1] * c - coef[2] * s;
            r * r
        })
        .sum();
    Some((coef, ssr))
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for k in col..3 {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let tail: f64 = (r + 1..3).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    Some(x)
}

/// Most fringe periods a scan is expected to contain.
pub const MAX_FRINGES: f64 = 32.0;

/// Fit `A + B cos(δ + ω x)` with `ω` between half a period over the scan
/// and the smaller of the Nyquist limit and [`MAX_FRINGES`] periods.
/// `x` must be strictly increasing.
pub fn fit_cosine(x: &[f64], y: &[f64]) -> Result<CosineFit> {
    let n = x.len();
    if n < 8 || y.len() != n {
        return Err(Error::fit("too few samples for a cosine fit"));
    }
    let span = x[n - 1] - x[0];
    let max_step = x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let lo = PI / span;
    let hi = (PI / max_step).min(TAU * MAX_FRINGES / span);
    if !(hi > 2.0 * lo) {
        return Err(Error::fit("sampling too coarse to resolve a fringe"));
    }
    let peak = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(peak > 0.0) {
        return Err(Error::fit("scan is identically zero"));
    }
    let yn: Vec<f64> = y.iter().map(|v| v / peak).collect();
    let ssr = |w: f64| linear_part(x, &yn, w).map_or(f64::INFINITY, |(_, s)| s);

    // Minima of the residual in ω are about 2π/span wide; step well inside.
    let step = TAU / span / 12.0;
    let count = ((hi - lo) / step).ceil() as usize + 1;
    let (mut best, mut best_ssr) = (lo, f64::INFINITY);
    for k in 0..count {
        let w = (lo + step * k as f64).min(hi);
        let s = ssr(w);
        if s < best_ssr {
            best = w;
            best_ssr = s;
        }
    }
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (ssr(c), ssr(d));
    while (b - a) > 1e-15 * b {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = ssr(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = ssr(d);
        }
    }
    let omega = 0.5 * (a + b);
    let (coef, s) = linear_part(x, &yn, omega).ok_or_else(|| Error::fit("singular normal equations"))?;
    if omega <= lo * (1.0 + 1e-9) || omega >= hi * (1.0 - 1e-9) {
        return Err(Error::fit(format!(
            "fringe frequency {omega:.4e} at the edge of the resolvable band [{lo:.4e}, {hi:.4e}]; scan is under-constrained"
        )));
    }
    let amplitude = coef[1].hypot(coef[2]);
    let rms = (s / n as f64).sqrt();
    if amplitude < 1e-9 || amplitude < 3.0 * rms {
        return Err(Error::fit(format!(
            "no fringe: amplitude {:.3e} against residual {:.3e} (relative to peak)",
            amplitude, rms
        )));
    }
    Ok(CosineFit {
        omega,
        mean: coef[0] * peak,
        amplitude: amplitude * peak,
        phase: wrap_phase((-coef[2]).atan2(coef[1])),
        rms: rms * peak,
    })
}

/// Fit the port of `scan` with the largest swing.
pub fn fit_fringe(scan: &FringeScan) -> Result<HeaterCalibration> {
    fit_fringe_port(scan, scan.strongest_port())
}

pub fn fit_fringe_port(scan: &FringeScan, port: usize) -> Result<HeaterCalibration> {
    if port >= scan.n_ports() {
        return Err(Error::invalid(format!("port {port} out of range")));
    }
    let x: Vec<f64> = scan.voltages().iter().map(|v| v * v).collect();
    let y: Vec<f64> = scan.trace(port).iter().map(|v| v - scan.dark_offset[port]).collect();
    let fit = fit_cosine(&x, &y).map_err(|e| match e {
        Error::Fit(msg) => Error::fit(format!("{}: {msg}", scan.actuator)),
        other => other,
    })?;
    let fringes = fit.omega * (x[x.len() - 1] - x[0]) / TAU;
    if fringes < 1.0 {
        return Err(Error::fit(format!(
            "{}: scan covers {fringes:.2} fringe periods, at least one is needed",
            scan.actuator
        )));
    }
    Ok(HeaterCalibration {
        actuator: scan.actuator,
        input: scan.input,
        port,
        phi_offset: fit.phase,
        offset_absolute: false,
        p_two_pi: TAU / (fit.omega * scan.resistance),
        resistance: scan.resistance,
        volts_sq_per_radian: 1.0 / fit.omega,
        visibility: if fit.mean > 0.0 { fit.amplitude / fit.mean } else { f64::INFINITY },
        residual: fit.rms / fit.amplitude,
    })
}
