//! Exact polynomial interpolation through integer points.
//!
//! Newton's divided differences over exact rationals; the caller's points
//! are expected to come from an integer-coefficient polynomial, so the
//! final coefficients must clear all denominators — anything else is a
//! reported error, not a silent truncation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RingError;

/// Interpolate the unique polynomial of degree < points.len() through
/// `(x_i, y_i)`; returns monomial coefficients, ascending degree,
/// trailing zeros trimmed.
pub fn interpolate_integer_points(points: &[(BigInt, BigInt)]) -> Result<Vec<BigInt>, RingError> {
    if points.is_empty() {
        return Err(RingError::Interpolation("no sample points".to_string()));
    }
    for (i, (xi, _)) in points.iter().enumerate() {
        for (xj, _) in &points[i + 1..] {
            if xi == xj {
                return Err(RingError::Interpolation(format!("duplicate sample point x = {xi}")));
            }
        }
    }
    let n = points.len();
    // divided-difference table, updated in place
    let mut dd: Vec<BigRational> =
        points.iter().map(|(_, y)| BigRational::from_integer(y.clone())).collect();
    let xs: Vec<BigRational> =
        points.iter().map(|(x, _)| BigRational::from_integer(x.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &xs[i] - &xs[i - level];
            dd[i] = num / den;
        }
    }
    // expand Newton form into monomial coefficients
    let mut coeffs: Vec<BigRational> = vec![BigRational::zero(); n];
    let mut basis: Vec<BigRational> = vec![BigRational::zero(); n + 1];
    basis[0] = BigRational::one(); // running product Π (x - x_i)
    let mut basis_deg = 0usize;
    for (k, c) in dd.iter().enumerate() {
        for d in 0..=basis_deg {
            coeffs[d] += c * &basis[d];
        }
        if k + 1 < n {
            // basis *= (x - x_k)
            for d in (0..=basis_deg).rev() {
                let b = basis[d].clone();
                basis[d + 1] += &b;
                basis[d] = -&xs[k] * b;
            }
            basis_deg += 1;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (d, c) in coeffs.iter().enumerate() {
        if !c.is_integer() {
            return Err(RingError::Interpolation(format!(
                "coefficient of degree {d} is not an integer: {c}"
            )));
        }
        out.push(c.to_integer());
    }
    while out.last().map(|c| c.is_zero()).unwrap_or(false) {
        out.pop();
    }
    Ok(out)
}
