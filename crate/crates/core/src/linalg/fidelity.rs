use super::matrix::{AmplitudeMatrix, Unitary};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Amplitude fidelity `Tr(|U|^T |M|) / N` between a target unitary and a
/// measured, column-normalised amplitude matrix.
///
/// The trace of the product reduces to the entrywise sum
/// `sum_ij |U_ij| M_ij`, so each column contributes at most 1.
pub fn amplitude_fidelity<T: Real>(target: &Unitary<T>, measured: &AmplitudeMatrix<T>) -> Result<T> {
    let n = target.n();
    if measured.n() != n {
        return Err(Error::invalid(format!(
            "target is {n}x{n} but measurement is {m}x{m}",
            m = measured.n()
        )));
    }
    let sum = target
        .matrix()
        .as_slice()
        .iter()
        .zip(measured.as_slice())
        .fold(T::zero(), |acc, (u, &m)| acc + u.norm() * m);
    Ok(sum / T::from_usize(n).expect("mode count fits in a float"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_random_unitary, ComplexMatrix};
    use num_complex::Complex64;

    #[test]
    fn self_fidelity_is_one() {
        for seed in 0..5 {
            let u = haar_random_unitary::<f64>(12, seed).unwrap();
            let f = amplitude_fidelity(&u, &u.amplitudes()).unwrap();
            assert!((f - 1.0).abs() < 1e-12, "{f}");
        }
    }

    #[test]
    fn balanced_splitter_against_identity() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bs = ComplexMatrix::from_row_major(
            2,
            2,
            vec![
                Complex64::new(h, 0.0),
                Complex64::new(0.0, h),
                Complex64::new(0.0, h),
                Complex64::new(h, 0.0),
            ],
        )
        .unwrap();
        let target = Unitary::new(bs).unwrap();
        let measured = AmplitudeMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let f = amplitude_fidelity(&target, &measured).unwrap();
        assert!((f - h).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let u = Unitary::<f64>::identity(3).unwrap();
        let m = AmplitudeMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(amplitude_fidelity(&u, &m), Err(Error::InvalidArgument(_))));
    }
}
