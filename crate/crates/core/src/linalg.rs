//! Small dense linear algebra for the exact graphon ground-state search.

use alloc::vec;
use alloc::vec::Vec;

/// Pivots below this (relative to the largest entry) count as zero.
const PIVOT_TOL: f64 = 1e-10;

/// Solves the square system `a x = b` (row-major `n × n`) by Gaussian
/// elimination with partial pivoting. `None` if numerically singular.
pub(crate) fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))?;
        if a[piv * n + col].abs() <= PIVOT_TOL * scale {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r * n + c] * x[c];
        }
        x[r] = s / a[r * n + r];
    }
    Some(x)
}

/// Solution set of `a x = b` (`m × s`, row-major) as a particular solution
/// plus a basis of the null space (one vector per free variable). `None` if
/// the system is inconsistent.
pub(crate) fn affine_solutions(
    mut a: Vec<f64>,
    mut b: Vec<f64>,
    m: usize,
    s: usize,
) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let scale = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1.0);
    let tol = PIVOT_TOL * scale;
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..s {
        if row == m {
            break;
        }
        let piv = (row..m)
            .max_by(|&r, &t| a[r * s + col].abs().total_cmp(&a[t * s + col].abs()))
            .expect("row < m");
        if a[piv * s + col].abs() <= tol {
            continue;
        }
        if piv != row {
            for c in 0..s {
                a.swap(piv * s + c, row * s + c);
            }
            b.swap(piv, row);
        }
        let p = a[row * s + col];
        for c in 0..s {
            a[row * s + c] /= p;
        }
        b[row] /= p;
        for r in 0..m {
            if r != row {
                let f = a[r * s + col];
                if f != 0.0 {
                    for c in 0..s {
                        a[r * s + c] -= f * a[row * s + c];
                    }
                    b[r] -= f * b[row];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let bscale = b.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1.0);
    if b[row..].iter().any(|x| x.abs() > 1e-9 * bscale) {
        return None;
    }
    let mut x0 = vec![0.0; s];
    for (r, &c) in pivots.iter().enumerate() {
        x0[c] = b[r];
    }
    let mut is_pivot = vec![false; s];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let mut basis = Vec::new();
    for free in (0..s).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0.0; s];
        v[free] = 1.0;
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -a[r * s + free];
        }
        basis.push(v);
    }
    Some((x0, basis))
}
