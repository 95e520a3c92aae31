//! Thomas algorithm for tridiagonal systems.

/// Solve `a[i]·x[i-1] + b[i]·x[i] + c[i]·x[i+1] = d[i]` in place; `d` holds
/// the solution on return. `a[0]` and `c[n-1]` are ignored.
///
/// No pivoting; the Poisson Jacobians passed here are diagonally dominant.
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) {
    let n = d.len();
    debug_assert!(a.len() == n && b.len() == n && c.len() == n);
    if n == 0 {
        return;
    }
    let mut cp = vec![0.0; n];
    let mut beta = b[0];
    cp[0] = c[0] / beta;
    d[0] /= beta;
    for i in 1..n {
        beta = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / beta;
        d[i] = (d[i] - a[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
}
