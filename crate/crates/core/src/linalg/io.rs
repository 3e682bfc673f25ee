//! JSON form of a unitary: `{"n": N, "re": [[..]], "im": [[..]]}`, row-major.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, Unitary};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance applied by [`unitary_from_json`] when checking is enabled.
pub const READ_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Serialize, Deserialize)]
struct UnitaryJson {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn matrix_to_json<T: Real>(m: &ComplexMatrix<T>) -> Result<String> {
    if !m.is_square() {
        return Err(Error::invalid("only square matrices have a JSON form"));
    }
    let n = m.n_rows();
    let part = |f: fn(&Complex<T>) -> T| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| m.row(i).iter().map(|z| f(z).to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    };
    let doc = UnitaryJson {
        n,
        re: part(|z| z.re),
        im: part(|z| z.im),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn unitary_to_json<T: Real>(u: &Unitary<T>) -> Result<String> {
    matrix_to_json(u.matrix())
}

/// Parses the JSON form. With `check`, rejects matrices whose unitarity
/// deviation exceeds [`READ_TOLERANCE`].
pub fn unitary_from_json<T: Real>(text: &str, check: bool) -> Result<Unitary<T>> {
    let doc: UnitaryJson = serde_json::from_str(text)?;
    let n = doc.n;
    let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
    if n == 0 || !shape_ok(&doc.re) || !shape_ok(&doc.im) {
        return Err(Error::invalid(format!("`re` and `im` must both be {n}x{n}")));
    }
    let data = doc
        .re
        .iter()
        .flatten()
        .zip(doc.im.iter().flatten())
        .map(|(&re, &im)| Complex::new(T::lit(re), T::lit(im)))
        .collect();
    let m = ComplexMatrix::from_row_major(n, n, data)?;
    if check {
        Unitary::with_tolerance(m, T::lit(READ_TOLERANCE))
    } else {
        Ok(Unitary::new_unchecked(m))
    }
}
