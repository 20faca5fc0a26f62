//! Small dense complex linear algebra helpers over nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Solves `a · x = b` by partial-pivot LU; `None` when `a` is exactly singular
/// or the result is non-finite.
pub fn solve(a: DMatrix<Complex64>, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let rhs = DVector::from_column_slice(b);
    let x = a.lu().solve(&rhs)?;
    x.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then(|| x.iter().copied().collect())
}

/// 2-norm condition number from singular values; infinite when singular.
pub fn condition_number(a: &DMatrix<Complex64>) -> f64 {
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return f64::INFINITY;
    }
    let sv = a.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
