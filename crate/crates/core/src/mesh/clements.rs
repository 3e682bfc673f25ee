//! Rectangular (Clements) factorisation of a unitary into unit cells.
//!
//! The unitary is reduced to a diagonal by alternately nulling
//! anti-diagonals from the right (inverse cells acting on columns) and from
//! the left (cells acting on rows). The left-applied cells are then pushed
//! through the diagonal using `T^{-1} D = D' T'`, which leaves
//! `U = D · (cells in evaluation order)`. Cells are finally scheduled into
//! columns respecting the even/odd pairing of the rectangular layout.

use num_complex::Complex;

use super::cell::{block_adjoint, block_mul, unit_cell_block, Block};
use super::settings::{MeshSettings, UnitCellSettings};
use super::topology::UnitCellAddress;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Unitary};
use crate::scalar::{atan2_or_zero, wrap_phase, Real};

#[derive(Clone, Copy, Debug)]
struct Placed<T> {
    top_mode: usize,
    theta: T,
    phi: T,
}

/// Factorise `u` into mesh settings.
///
/// Rejects inputs whose unitarity deviation exceeds [`Real::unitarity_tol`],
/// reporting the measured deviation.
pub fn decompose<T: Real>(u: &Unitary<T>) -> Result<MeshSettings<T>> {
    let deviation = u.matrix().unitarity_deviation()?;
    if deviation > T::unitarity_tol() {
        return Err(Error::NotUnitary {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
            tol: T::unitarity_tol().to_f64().unwrap_or(f64::NAN),
        });
    }
    decompose_unchecked(u.matrix())
}

/// Same sweep as [`decompose`] without the unitarity check. For a
/// non-unitary input the residual diagonal is not unit-modulus; only its
/// phases are kept, so the result is a best effort rather than exact.
pub fn decompose_unchecked<T: Real>(u: &ComplexMatrix<T>) -> Result<MeshSettings<T>> {
    if !u.is_square() {
        return Err(Error::invalid("decompose needs a square matrix"));
    }
    let n = u.n_rows();
    if n < 2 {
        return Err(Error::invalid(format!("a mesh needs at least 2 modes, got {n}")));
    }
    let mut w = u.clone();
    let mut right: Vec<Placed<T>> = Vec::new();
    let mut left: Vec<Placed<T>> = Vec::new();
    let two = T::lit(2.0);

    for i in 0..n - 1 {
        if i % 2 == 0 {
            for j in 0..=i {
                let (row, m) = (n - 1 - j, i - j);
                let (x, y) = (w[(row, m)], w[(row, m + 1)]);
                let theta = two * y.norm().atan2(x.norm());
                let phi = wrap_phase(arg(x * y.conj()) + T::PI());
                w.apply_right_2x2(m, &block_adjoint(&unit_cell_block(theta, phi)));
                right.push(Placed { top_mode: m, theta, phi });
            }
        } else {
            for j in 1..=i + 1 {
                let (row, col) = (n + j - i - 2, j - 1);
                let m = row - 1;
                let (x, y) = (w[(m, col)], w[(row, col)]);
                let theta = two * x.norm().atan2(y.norm());
                let phi = wrap_phase(arg(y * x.conj()));
                w.apply_left_2x2(m, &unit_cell_block(theta, phi));
                left.push(Placed { top_mode: m, theta, phi });
            }
        }
    }

    let mut diag: Vec<Complex<T>> = (0..n).map(|k| w[(k, k)]).collect();
    // Push left cells through the diagonal, last-applied first.
    let mut moved = Vec::with_capacity(left.len());
    for cell in left.iter().rev() {
        let m = cell.top_mode;
        let inv = block_adjoint(&unit_cell_block(cell.theta, cell.phi));
        let zero = Complex::new(T::zero(), T::zero());
        let d = [[diag[m], zero], [zero, diag[m + 1]]];
        let (a, b, theta, phi) = split_diag_cell(&block_mul(&inv, &d));
        diag[m] = a;
        diag[m + 1] = b;
        moved.push(Placed { top_mode: m, theta, phi });
    }

    // Evaluation order: right cells as applied, then the moved left cells
    // in reverse of their original order (`moved` is already reversed).
    let sequence = right.into_iter().chain(moved);
    let mut last_column: Vec<Option<usize>> = vec![None; n];
    let mut cells = Vec::new();
    for cell in sequence {
        let m = cell.top_mode;
        let earliest = match (last_column[m], last_column[m + 1]) {
            (None, None) => 0,
            (a, b) => a.max(b).map_or(0, |c| c + 1),
        };
        let column = if earliest % 2 == m % 2 { earliest } else { earliest + 1 };
        last_column[m] = Some(column);
        last_column[m + 1] = Some(column);
        cells.push(UnitCellSettings::new(
            UnitCellAddress::new(column, m),
            cell.theta,
            cell.phi,
        ));
    }
    let output_phases = diag.iter().map(|z| arg(*z)).collect();
    MeshSettings::new(n, cells, output_phases)
}

/// Forward map: `diag(e^{i out}) · T_last ··· T_first`.
pub fn reconstruct<T: Real>(settings: &MeshSettings<T>) -> Result<Unitary<T>> {
    let m = reconstruct_matrix(settings, |c| unit_cell_block(c.theta, c.phi))?;
    Unitary::new(m)
}

/// Multiply out a mesh with a caller-supplied block per cell, then apply
/// the output phase layer. Cells must be in evaluation order, which
/// [`MeshSettings`] guarantees.
pub fn reconstruct_matrix<T: Real>(
    settings: &MeshSettings<T>,
    mut block: impl FnMut(&UnitCellSettings<T>) -> Block<T>,
) -> Result<ComplexMatrix<T>> {
    let n = settings.n();
    let mut acc = ComplexMatrix::identity(n)?;
    for cell in settings.cells() {
        acc.apply_left_2x2(cell.address.top_mode, &block(cell));
    }
    let phases: Vec<Complex<T>> = settings
        .output_phases()
        .iter()
        .map(|&p| Complex::from_polar(T::one(), p))
        .collect();
    for (i, ph) in phases.iter().enumerate() {
        for j in 0..n {
            acc[(i, j)] = *ph * acc[(i, j)];
        }
    }
    Ok(acc)
}

#[inline]
fn arg<T: Real>(z: Complex<T>) -> T {
    atan2_or_zero(z.im, z.re)
}

/// Write a 2x2 unitary as `diag(a, b) · T(θ, φ)`.
fn split_diag_cell<T: Real>(m: &Block<T>) -> (Complex<T>, Complex<T>, T, T) {
    let two = T::lit(2.0);
    let theta = two * m[0][0].norm().atan2(m[0][1].norm());
    let phi = wrap_phase(arg(m[0][0] * m[0][1].conj()));
    let half = theta / two;
    let (s, c) = half.sin_cos();
    let g = Complex::new(T::zero(), T::one()) * Complex::from_polar(T::one(), half);
    let e = Complex::from_polar(T::one(), phi);
    let (a, b) = if c >= s {
        (m[0][1] / (g * c), m[1][0] / (g * e * c))
    } else {
        (m[0][0] / (g * e * s), -m[1][1] / (g * s))
    };
    (a, b, theta, phi)
}
