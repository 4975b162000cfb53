//! Orthogonal groups, their embeddings into Bloch matrices, and permutations.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn rotation2(phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Reflection across the line through the origin at angle `phi`.
pub fn reflection2(phi: f64) -> DMatrix<f64> {
    let (s, c) = (2.0 * phi).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
}

/// `diag(x, 1)`: acts on the spatial block and fixes the deterministic coordinate.
pub fn embed(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut m = DMatrix::identity(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(x);
    m
}

/// Maximum of `<X, H>` over `X` in O(n), or SO(n) when `special`, with the maximizer.
pub fn procrustes_max(h: &DMatrix<f64>, special: bool) -> (f64, DMatrix<f64>) {
    if h.shape() == (2, 2) {
        return procrustes_max2(h, special);
    }
    let svd = h.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let sv = svd.singular_values;
    let mut x = &u * &vt;
    let mut value = sv.sum();
    if special && x.determinant() < 0.0 {
        let k = (0..sv.len())
            .min_by(|&a, &b| sv[a].total_cmp(&sv[b]))
            .expect("nonempty");
        let mut d = DMatrix::<f64>::identity(sv.len(), sv.len());
        d[(k, k)] = -1.0;
        x = &u * d * &vt;
        value -= 2.0 * sv[k];
    }
    (value, x)
}

/// Closed form in the plane: rotations pair with `(h00 + h11, h10 - h01)`,
/// reflections with `(h00 - h11, h01 + h10)`.
fn procrustes_max2(h: &DMatrix<f64>, special: bool) -> (f64, DMatrix<f64>) {
    let (a, b) = (h[(0, 0)] + h[(1, 1)], h[(1, 0)] - h[(0, 1)]);
    let rot = a.hypot(b);
    let (c, d) = (h[(0, 0)] - h[(1, 1)], h[(0, 1)] + h[(1, 0)]);
    let refl = c.hypot(d);
    if special || rot >= refl {
        let t = b.atan2(a);
        (rot, DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]))
    } else {
        let t = d.atan2(c);
        (refl, DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), t.sin(), -t.cos()]))
    }
}

/// Haar-distributed element of O(n), or SO(n) when `special`.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, special: bool, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if special && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Uniform point on the unit sphere in dimension `n`.
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let g = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
        let norm = g.norm();
        if norm > 1e-12 {
            return g / norm;
        }
    }
}

/// Orthogonal matrix sending `e_1` to the unit vector `u`, with determinant +1 when `special`.
pub fn frame_from(u: &DVector<f64>, special: bool) -> DMatrix<f64> {
    let n = u.len();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let w = &e1 - u;
    let mut h = if w.norm() < 1e-14 {
        DMatrix::identity(n, n)
    } else {
        let w = &w / w.norm();
        DMatrix::identity(n, n) - 2.0 * &w * w.transpose()
    };
    if special && n >= 2 && h.determinant() < 0.0 {
        h.column_mut(1).neg_mut();
    }
    h
}

pub fn is_orthogonal(x: &DMatrix<f64>, eps: f64) -> bool {
    x.is_square() && (x.transpose() * x - DMatrix::identity(x.nrows(), x.ncols())).amax() <= eps
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Matrix sending basis vector `k` to basis vector `perm[k]`.
pub fn permutation_matrix(perm: &[usize]) -> DMatrix<f64> {
    let n = perm.len();
    let mut m = DMatrix::zeros(n, n);
    for (k, &p) in perm.iter().enumerate() {
        m[(p, k)] = 1.0;
    }
    m
}
