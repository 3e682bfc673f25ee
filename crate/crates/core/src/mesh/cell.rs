//! 2x2 transfer matrices of a single unit cell.
//!
//! Convention, fixed for the whole crate:
//!
//! ```text
//! T(θ, φ) = DC(½) · diag(e^{iθ}, 1) · DC(½) · diag(e^{iφ}, 1)
//! DC(κ)   = [[√(1-κ), i√κ], [i√κ, √(1-κ)]]
//! ```
//!
//! The external phase `φ` sits on the top input, ahead of the MZI. In closed
//! form `T = i e^{iθ/2} [[e^{iφ} sin(θ/2), cos(θ/2)], [e^{iφ} cos(θ/2), -sin(θ/2)]]`,
//! so `θ = 0` is the cross state, `θ = π` the bar state and `θ = π/2` the
//! balanced point.

use num_complex::Complex;

use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub type Block<T> = [[Complex<T>; 2]; 2];

/// Closed-form ideal unit cell.
pub fn unit_cell_block<T: Real>(theta: T, phi: T) -> Block<T> {
    let half = theta / T::lit(2.0);
    let (s, c) = half.sin_cos();
    let g = Complex::new(T::zero(), T::one()) * Complex::from_polar(T::one(), half);
    let e = Complex::from_polar(T::one(), phi);
    [[g * e * s, g * c], [g * e * c, -g * s]]
}

pub fn unit_cell_matrix<T: Real>(theta: T, phi: T) -> ComplexMatrix<T> {
    let b = unit_cell_block(theta, phi);
    ComplexMatrix::from_row_major(2, 2, vec![b[0][0], b[0][1], b[1][0], b[1][1]])
        .expect("2x2 block is well formed")
}

/// Directional coupler with power coupling ratio `kappa`.
pub fn directional_coupler<T: Real>(kappa: T) -> Block<T> {
    let t = Complex::new((T::one() - kappa).sqrt(), T::zero());
    let k = Complex::new(T::zero(), kappa.sqrt());
    [[t, k], [k, t]]
}

pub fn block_mul<T: Real>(a: &Block<T>, b: &Block<T>) -> Block<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn block_adjoint<T: Real>(a: &Block<T>) -> Block<T> {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Unit cell built from non-ideal couplers: `kappa_in` is the coupler the
/// light meets first, `kappa_out` the second.
pub fn physical_cell_block<T: Real>(theta: T, phi: T, kappa_in: T, kappa_out: T) -> Block<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let inner = [[Complex::from_polar(T::one(), theta), zero], [zero, one]];
    let outer = [[Complex::from_polar(T::one(), phi), zero], [zero, one]];
    let dc_in = directional_coupler(kappa_in);
    let dc_out = directional_coupler(kappa_out);
    block_mul(&dc_out, &block_mul(&inner, &block_mul(&dc_in, &outer)))
}
