//! Tridiagonal elimination without pivoting.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Smallest pivot magnitude accepted before declaring the system singular.
/// The scheme's systems are M-matrices, so this never fires for them.
const PIVOT_FLOOR: f64 = 1e-300;

/// Solve `lower[i] y[i-1] + diag[i] y[i] + upper[i] y[i+1] = rhs[i]`.
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(n > 0);
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);
    assert_eq!(rhs.len(), n);

    let mut scratch = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < PIVOT_FLOOR {
        return Err(Error::SingularSystem { row: 0 });
    }
    scratch[0] = upper[0] / pivot;
    y[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * scratch[i - 1];
        if pivot.abs() < PIVOT_FLOOR {
            return Err(Error::SingularSystem { row: i });
        }
        scratch[i] = upper[i] / pivot;
        y[i] = (rhs[i] - lower[i] * y[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        y[i] -= scratch[i] * y[i + 1];
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_known_system() {
        // A = [[2,1,0],[1,3,1],[0,1,2]], y = [1,2,3] => rhs = [4,10,8]
        let y = solve(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[4.0, 10.0, 8.0])
            .unwrap();
        for (got, want) in y.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_a_singular_matrix() {
        let r = solve(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(r, Err(Error::SingularSystem { row: 0 })));
    }
}
