//! Haar-distributed unitaries via QR of a complex Ginibre matrix.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, Unitary};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scalar::Real;

/// Householder QR of a square matrix. Returns `(Q, diag(R))`.
///
/// Only the diagonal of `R` is returned since that is all the Haar phase
/// correction needs.
pub fn householder_qr<T: Real>(a: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, Vec<Complex<T>>)> {
    if !a.is_square() {
        return Err(Error::invalid("QR is only implemented for square matrices"));
    }
    let n = a.n_rows();
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n)?;
    let mut diag = Vec::with_capacity(n);
    let two = T::lit(2.0);

    for k in 0..n {
        let norm_x = (k..n)
            .map(|i| r[(i, k)].norm_sqr())
            .fold(T::zero(), |s, x| s + x)
            .sqrt();
        if k + 1 == n || norm_x == T::zero() {
            diag.push(r[(k, k)]);
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            Complex::one()
        };
        let alpha = -phase * norm_x;

        let mut v: Vec<Complex<T>> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let v_norm = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt();
        if v_norm == T::zero() {
            diag.push(r[(k, k)]);
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / v_norm;
        }

        // R <- (I - 2 v v^H) R on rows k..n
        for j in k..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::<T>::zero(), |s, (t, vi)| s + vi.conj() * r[(k + t, j)]);
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] = r[(k + t, j)] - *vi * dot * two;
            }
        }
        // Q <- Q (I - 2 v v^H) on columns k..n
        for i in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::<T>::zero(), |s, (t, vi)| s + q[(i, k + t)] * *vi);
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] = q[(i, k + t)] - dot * vi.conj() * two;
            }
        }
        diag.push(r[(k, k)]);
    }
    Ok((q, diag))
}

/// Draw an `n x n` Haar-random unitary.
///
/// Samples a Ginibre matrix with i.i.d. standard complex normal entries
/// from the `Haar` stream of `ChaCha20Rng::seed_from_u64(seed)`, takes its
/// QR factorisation and multiplies `Q` by `diag(r_kk / |r_kk|)` so the
/// factorisation is the unique one with a positive `R` diagonal.
pub fn haar_random_unitary<T: Real>(n: usize, seed: u64) -> Result<Unitary<T>> {
    if n == 0 {
        return Err(Error::invalid("mode count must be at least 1"));
    }
    let mut rng = rng::rng(seed, Stream::Haar);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries: Vec<Complex<T>> = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re * scale), T::lit(im * scale))
        })
        .collect();
    let ginibre = ComplexMatrix::from_row_major(n, n, entries)?;
    let (mut q, diag) = householder_qr(&ginibre)?;
    for (k, r) in diag.iter().enumerate() {
        let norm = r.norm();
        let lambda = if norm > T::zero() { r / norm } else { Complex::one() };
        for i in 0..n {
            q[(i, k)] = q[(i, k)] * lambda;
        }
    }
    Unitary::new(q)
}
