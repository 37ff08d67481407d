//! Small dense linear systems.

use crate::error::{Error, Result};

/// Pivots smaller than this are treated as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-13;

/// Solve `a * x = b` for square `a` (row-major rows) by Gaussian elimination
/// with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Range(format!("system must be square, got {} rows for {n} unknowns", a.len())));
    }

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty pivot search");
        let pivot = a[pivot_row][col];
        if pivot.is_nan() || pivot.abs() < PIVOT_THRESHOLD {
            return Err(Error::Singular { column: col, pivot: pivot.abs(), threshold: PIVOT_THRESHOLD });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);

        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for (offset, row) in lower.iter_mut().enumerate() {
            let factor = row[col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for (r, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *r -= factor * p;
            }
            b[col + 1 + offset] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}
