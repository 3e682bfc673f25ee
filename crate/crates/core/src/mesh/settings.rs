use serde::{Deserialize, Serialize};

use super::topology::{cell_count, mesh_topology, UnitCellAddress};
use crate::error::{Error, Result};
use crate::scalar::{wrap_phase, Real};

/// Phases programmed into one unit cell, both in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitCellSettings<T> {
    #[serde(flatten)]
    pub address: UnitCellAddress,
    /// Internal MZI phase.
    pub theta: T,
    /// External phase on the top input.
    pub phi: T,
}

impl<T: Real> UnitCellSettings<T> {
    /// Wraps both phases into `[0, 2π)`.
    pub fn new(address: UnitCellAddress, theta: T, phi: T) -> Self {
        Self {
            address,
            theta: wrap_phase(theta),
            phi: wrap_phase(phi),
        }
    }
}

/// A compiled mesh program: one [`UnitCellSettings`] per cell in evaluation
/// order, plus a diagonal layer of output phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSettings<T> {
    n: usize,
    cells: Vec<UnitCellSettings<T>>,
    output_phases: Vec<T>,
}

impl<T: Real> MeshSettings<T> {
    /// Validates the cell set against [`mesh_topology`] and sorts cells into
    /// evaluation order. Phases are wrapped into `[0, 2π)`.
    pub fn new(n: usize, mut cells: Vec<UnitCellSettings<T>>, output_phases: Vec<T>) -> Result<Self> {
        let topo = mesh_topology(n)?;
        if cells.len() != cell_count(n) {
            return Err(Error::invalid(format!(
                "{n}-mode mesh needs {} cells, got {}",
                cell_count(n),
                cells.len()
            )));
        }
        if output_phases.len() != n {
            return Err(Error::invalid(format!(
                "expected {n} output phases, got {}",
                output_phases.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|c| !c.address.is_valid_for(n)) {
            return Err(Error::invalid(format!(
                "cell address {:?} violates the rectangular layout for n={n}",
                bad.address
            )));
        }
        cells.sort_by_key(|c| c.address);
        for (c, expected) in cells.iter().zip(&topo) {
            if c.address != *expected {
                return Err(Error::invalid(format!(
                    "duplicate or missing cell near {:?}",
                    expected
                )));
            }
        }
        let finite = cells.iter().all(|c| c.theta.is_finite() && c.phi.is_finite())
            && output_phases.iter().all(|p| p.is_finite());
        if !finite {
            return Err(Error::invalid("phases must be finite"));
        }
        let cells = cells
            .into_iter()
            .map(|c| UnitCellSettings::new(c.address, c.theta, c.phi))
            .collect();
        let output_phases = output_phases.into_iter().map(wrap_phase).collect();
        Ok(Self { n, cells, output_phases })
    }

    /// Every cell set to `(theta, phi)`, zero output phases.
    pub fn uniform(n: usize, theta: T, phi: T) -> Result<Self> {
        let cells = mesh_topology(n)?
            .into_iter()
            .map(|a| UnitCellSettings::new(a, theta, phi))
            .collect();
        Self::new(n, cells, vec![T::zero(); n])
    }

    /// Settings that route every input straight through: all cells in the
    /// bar state with `φ = π`, so each cell is exactly the identity.
    pub fn identity(n: usize) -> Result<Self> {
        Self::uniform(n, T::PI(), T::PI())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[UnitCellSettings<T>] {
        &self.cells
    }

    pub fn output_phases(&self) -> &[T] {
        &self.output_phases
    }

    /// All actuator phases, `[θ₀, φ₀, θ₁, φ₁, ...]` in cell order.
    pub fn actuator_phases(&self) -> Vec<T> {
        self.cells.iter().flat_map(|c| [c.theta, c.phi]).collect()
    }

    /// Rebuild from a flat actuator phase list in the layout of
    /// [`actuator_phases`](Self::actuator_phases), keeping output phases.
    pub fn with_actuator_phases(&self, phases: &[T]) -> Result<Self> {
        if phases.len() != 2 * self.cells.len() {
            return Err(Error::invalid(format!(
                "expected {} actuator phases, got {}",
                2 * self.cells.len(),
                phases.len()
            )));
        }
        let cells = self
            .cells
            .iter()
            .zip(phases.chunks_exact(2))
            .map(|(c, p)| UnitCellSettings::new(c.address, p[0], p[1]))
            .collect();
        Self::new(self.n, cells, self.output_phases.clone())
    }

    pub fn with_output_phases(mut self, phases: Vec<T>) -> Result<Self> {
        if phases.len() != self.n {
            return Err(Error::invalid("output phase count must equal n"));
        }
        self.output_phases = phases.into_iter().map(wrap_phase).collect();
        Ok(self)
    }
}

impl MeshSettings<f64> {
    /// `{"n":..,"cells":[{"column":c,"top_mode":m,"theta":t,"phi":p},...],"output_phases":[...]}`
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MeshSettings<f64> = serde_json::from_str(text)?;
        Self::new(raw.n, raw.cells, raw.output_phases)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn rejects_bad_layouts() {
        let mut cells: Vec<_> = mesh_topology(3)
            .unwrap()
            .into_iter()
            .map(|a| UnitCellSettings::new(a, 0.0, 0.0))
            .collect();
        assert!(MeshSettings::new(3, cells.clone(), vec![0.0; 2]).is_err());
        cells[1].address = UnitCellAddress::new(1, 0);
        assert!(MeshSettings::new(3, cells.clone(), vec![0.0; 3]).is_err());
        cells[1].address = UnitCellAddress::new(0, 0);
        assert!(MeshSettings::new(3, cells.clone(), vec![0.0; 3]).is_err());
        cells.pop();
        assert!(MeshSettings::new(3, cells, vec![0.0; 3]).is_err());
    }

    #[test]
    fn sorts_and_wraps() {
        let mut cells: Vec<_> = mesh_topology(4)
            .unwrap()
            .into_iter()
            .map(|a| UnitCellSettings { address: a, theta: -1.0, phi: 7.0 })
            .collect();
        cells.reverse();
        let s = MeshSettings::new(4, cells, vec![-0.5; 4]).unwrap();
        assert_eq!(s.cells()[0].address, UnitCellAddress::new(0, 0));
        assert!(s.cells().iter().all(|c| (0.0..TAU).contains(&c.theta) && (0.0..TAU).contains(&c.phi)));
        assert!(s.output_phases().iter().all(|p| (0.0..TAU).contains(p)));
    }

    #[test]
    fn json_layout() {
        let s = MeshSettings::<f64>::uniform(2, 1.0, 2.0).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"n":2,"cells":[{"column":0,"top_mode":0,"theta":1.0,"phi":2.0}],"output_phases":[0.0,0.0]}"#
        );
        assert_eq!(MeshSettings::from_json(&text).unwrap(), s);
        let broken = r#"{"n":3,"cells":[{"column":0,"top_mode":0,"theta":1.0,"phi":2.0}],"output_phases":[0,0,0]}"#;
        assert!(MeshSettings::from_json(broken).is_err());
    }
}
