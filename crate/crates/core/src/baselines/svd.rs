//! Thin SVD of a tall matrix: Householder QR, then one-sided Jacobi on the
//! square triangular factor.

use alloc::vec::Vec;

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 80;

/// `a = left · diag(values) · rightᵀ` with `values` sorted descending.
pub(crate) struct Thin {
    pub values: Vec<f64>,
    /// m × n, orthonormal columns.
    pub left: DMatrix<f64>,
    /// n × n, orthogonal.
    pub right: DMatrix<f64>,
}

/// Requires `a.nrows() >= a.ncols() >= 1`.
pub(crate) fn thin_svd(a: DMatrix<f64>) -> Thin {
    let (m, n) = a.shape();
    debug_assert!(m >= n && n >= 1);
    let qr = a.qr();
    let q = qr.q();
    let mut w = qr.r();
    let mut v = DMatrix::<f64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for r in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(r).norm_squared();
                let gamma = w.column(p).dot(&w.column(r));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, p, r, c, s);
                rotate(&mut v, p, r, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let largest = norms[order[0]];
    let floor = largest * f64::EPSILON * n as f64;

    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut right = DMatrix::<f64>::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    let mut filled = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        right.set_column(dst, &v.column(src));
        let s = norms[src];
        if s > floor && s > 0.0 {
            u.set_column(dst, &(w.column(src) / s));
            values.push(s);
            filled.push(true);
        } else {
            values.push(if s > 0.0 { s } else { 0.0 });
            filled.push(false);
        }
    }
    complete_basis(&mut u, &filled);
    Thin {
        values,
        left: q * u,
        right,
    }
}

fn rotate(m: &mut DMatrix<f64>, p: usize, r: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, p)], m[(i, r)]);
        m[(i, p)] = c * x - s * y;
        m[(i, r)] = s * x + c * y;
    }
}

/// Fills the unset columns with unit vectors orthogonal to all others,
/// drawn from the standard basis in index order.
fn complete_basis(u: &mut DMatrix<f64>, filled: &[bool]) {
    let n = u.nrows();
    let mut have: Vec<usize> = (0..filled.len()).filter(|&j| filled[j]).collect();
    let mut candidate = 0;
    for (j, &done) in filled.iter().enumerate() {
        if done {
            continue;
        }
        while candidate < n {
            let mut e = nalgebra::DVector::<f64>::zeros(n);
            e[candidate] = 1.0;
            candidate += 1;
            // twice for stability
            for _ in 0..2 {
                for &k in &have {
                    let proj = u.column(k).dot(&e);
                    e -= u.column(k) * proj;
                }
            }
            let norm = e.norm();
            if norm > 1e-8 {
                u.set_column(j, &(e / norm));
                have.push(j);
                break;
            }
        }
    }
}
