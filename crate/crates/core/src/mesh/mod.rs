//! Compiler between unitaries and the rectangular mesh of unit cells.

mod cell;
mod clements;
mod settings;
mod topology;

pub use cell::{
    block_adjoint, block_mul, directional_coupler, physical_cell_block, unit_cell_block,
    unit_cell_matrix, Block,
};
pub use clements::{decompose, decompose_unchecked, reconstruct, reconstruct_matrix};
pub use settings::{MeshSettings, UnitCellSettings};
pub use topology::{cell_count, mesh_topology, UnitCellAddress};
