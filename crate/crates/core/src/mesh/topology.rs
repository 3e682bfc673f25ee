use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a unit cell in the rectangular mesh.
///
/// `column` is the layer index counted from the input side, `top_mode` the
/// upper of the two adjacent modes the cell couples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitCellAddress {
    pub column: usize,
    pub top_mode: usize,
}

impl UnitCellAddress {
    pub fn new(column: usize, top_mode: usize) -> Self {
        Self { column, top_mode }
    }

    /// Rectangular arrangement: `top_mode` has the same parity as `column`.
    pub fn is_valid_for(&self, n: usize) -> bool {
        self.column < n && self.top_mode + 1 < n && self.column % 2 == self.top_mode % 2
    }
}

/// Number of unit cells in an `n`-mode mesh, `n(n-1)/2`.
pub fn cell_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Cell addresses of the `n`-mode rectangular mesh, in evaluation order:
/// column by column from the input side, top to bottom within a column.
///
/// Even columns pair modes `(0,1), (2,3), ...`; odd columns pair
/// `(1,2), (3,4), ...`. There are `n` columns in total.
pub fn mesh_topology(n: usize) -> Result<Vec<UnitCellAddress>> {
    if n < 2 {
        return Err(Error::invalid(format!("a mesh needs at least 2 modes, got {n}")));
    }
    let mut cells = Vec::with_capacity(cell_count(n));
    for column in 0..n {
        let mut top = column % 2;
        while top + 1 < n {
            cells.push(UnitCellAddress::new(column, top));
            top += 2;
        }
    }
    debug_assert_eq!(cells.len(), cell_count(n));
    Ok(cells)
}
