//! Dense phase-one simplex for tiny feasibility problems `A x = b, x >= 0`.
//!
//! Every cone in this crate lives in dimension at most a few dozen, so a
//! textbook tableau with Bland's anti-cycling rule is all that is needed.

use nalgebra::{DMatrix, DVector};

const PIVOT_EPS: f64 = 1e-12;

/// Returns a nonnegative solution of `a * x = b` whose residual is at most
/// `tol` in max-norm, or `None` when the system is infeasible.
pub fn nonnegative_solution(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Option<DVector<f64>> {
    let (m, k) = a.shape();
    assert_eq!(b.len(), m, "right-hand side length must match row count");
    if k == 0 {
        return if b.amax() <= tol { Some(DVector::zeros(0)) } else { None };
    }

    // columns: k structural, m artificial, 1 rhs
    let width = k + m + 1;
    let mut t = DMatrix::<f64>::zeros(m + 1, width);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..k {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, k + i)] = 1.0;
        t[(i, width - 1)] = sign * b[i];
    }
    // objective row holds reduced costs of "minimize sum of artificials"
    for j in 0..width {
        if j >= k && j < k + m {
            continue;
        }
        let s: f64 = (0..m).map(|i| t[(i, j)]).sum();
        t[(m, j)] = -s;
    }
    let mut basis: Vec<usize> = (k..k + m).collect();

    for _ in 0..(50 * (k + m) + 100) {
        let entering = (0..k + m).find(|&j| t[(m, j)] < -PIVOT_EPS);
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[(i, col)];
            if coef > PIVOT_EPS {
                let ratio = t[(i, width - 1)] / coef;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[r]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            // unbounded direction cannot occur for a phase-one objective bounded below by zero
            break;
        };
        pivot(&mut t, row, col);
        basis[row] = col;
    }

    let mut x = DVector::<f64>::zeros(k);
    for (i, &bv) in basis.iter().enumerate() {
        if bv < k {
            x[bv] = t[(i, width - 1)].max(0.0);
        }
    }
    let residual = (a * &x - b).amax();
    if residual <= tol {
        Some(x)
    } else {
        None
    }
}

fn pivot(t: &mut DMatrix<f64>, row: usize, col: usize) {
    let p = t[(row, col)];
    let width = t.ncols();
    for j in 0..width {
        t[(row, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i == row {
            continue;
        }
        let factor = t[(i, col)];
        if factor != 0.0 {
            for j in 0..width {
                let v = t[(row, j)];
                t[(i, j)] -= factor * v;
            }
        }
    }
}
