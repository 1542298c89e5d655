//! Small dense helpers for the design solver (row-major, n <= 8).

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub(super) fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub(super) fn determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .expect("non-empty range");
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det *= a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}

/// `(-1)^(row+col)` times the minor of `a` without `row` and `col`; the
/// adjugate entry at `(col, row)`.
pub(super) fn cofactor(a: &[f64], n: usize, row: usize, col: usize) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let minor: Vec<f64> = (0..n)
        .filter(|&r| r != row)
        .flat_map(|r| (0..n).filter(move |&c| c != col).map(move |c| a[r * n + c]))
        .collect();
    let d = determinant(minor, n - 1);
    if (row + col).is_multiple_of(2) {
        d
    } else {
        -d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_determines() {
        let a = vec![2.0, 1.0, 1.0, 3.0];
        let x = solve(a.clone(), vec![3.0, 5.0], 2).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!((determinant(a, 2) - 5.0).abs() < 1e-15);
        let b = vec![1.0, 2.0, 3.0, 0.0, 1.0, 4.0, 5.0, 6.0, 0.0];
        assert!((determinant(b.clone(), 3) - 1.0).abs() < 1e-12);
        // adjugate of b, first row: (-24, 18, 5)
        assert!((cofactor(&b, 3, 0, 0) + 24.0).abs() < 1e-12);
        assert!((cofactor(&b, 3, 1, 0) - 18.0).abs() < 1e-12);
        assert!((cofactor(&b, 3, 2, 0) - 5.0).abs() < 1e-12);
    }
}
