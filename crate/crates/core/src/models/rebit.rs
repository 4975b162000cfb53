//! Real two-dimensional quantum theory viewed through the disk theory.
//!
//! States and effects map to real symmetric 2x2 operators by
//! `r -> (r_1 Z + r_2 X + r_3 I) / sqrt(2)`. The imaginary Pauli `Y` is carried as
//! `-iJ` with `J = [[0, 1], [-1, 0]]`, so every operator stays real.

use nalgebra::{DMatrix, DVector};

use super::spin_factor::ball_model;
use super::{ModelBundle, ModelKind};
use crate::kernel::BipartiteMat;

pub fn pauli_z() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1., 0., 0., -1.])
}

pub fn pauli_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.])
}

/// `Y = -iJ`.
pub fn j_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0., 1., -1., 0.])
}

/// The operator basis `(Z, X, I)` matching Bloch coordinates.
pub fn sigma() -> [DMatrix<f64>; 3] {
    [pauli_z(), pauli_x(), DMatrix::identity(2, 2)]
}

pub fn upsilon(r: &DVector<f64>) -> DMatrix<f64> {
    let s = sigma();
    (&s[0] * r[0] + &s[1] * r[1] + &s[2] * r[2]) / 2f64.sqrt()
}

pub fn upsilon_inv(a: &DMatrix<f64>) -> DVector<f64> {
    let s = sigma();
    DVector::from_iterator(3, s.iter().map(|m| (a * m).trace() / 2f64.sqrt()))
}

/// Operator picture of a bipartite matrix: `(1/2) sum Psi_lm s_l (x) s_m`.
pub fn upsilon_bipartite(psi: &BipartiteMat) -> DMatrix<f64> {
    let s = sigma();
    let mut out = DMatrix::zeros(4, 4);
    for l in 0..3 {
        for m in 0..3 {
            out += s[l].kronecker(&s[m]) * (0.5 * psi.psi[(l, m)]);
        }
    }
    out
}

/// One term `rho -> coef * L rho R` of an operation.
#[derive(Debug, Clone, PartialEq)]
pub struct Kraus {
    pub coef: f64,
    pub left: DMatrix<f64>,
    pub right: DMatrix<f64>,
}

impl Kraus {
    pub fn conj(coef: f64, k: DMatrix<f64>) -> Self {
        let right = k.transpose();
        Kraus { coef, left: k, right }
    }
}

/// Bloch matrix of an operation restricted to real symmetric operators.
pub fn local_matrix(ops: &[Kraus]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(3, 3);
    for k in 0..3 {
        let mut u = DVector::zeros(3);
        u[k] = 1.0;
        let rho = upsilon(&u);
        let mut img = DMatrix::zeros(2, 2);
        for op in ops {
            img += &op.left * &rho * &op.right * op.coef;
        }
        m.set_column(k, &upsilon_inv(&img));
    }
    m
}

/// Action of `op (x) id` on a two-rebit operator.
pub fn extended_action(ops: &[Kraus], state: &DMatrix<f64>) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(2, 2);
    let mut out = DMatrix::zeros(4, 4);
    for op in ops {
        out += op.left.kronecker(&id) * state * op.right.kronecker(&id) * op.coef;
    }
    out
}

/// `Y (x) Y = -(J (x) J)`.
pub fn yy() -> DMatrix<f64> {
    -j_matrix().kronecker(&j_matrix())
}

/// `(II + XX + YY + ZZ) / 4`: the faithful state's operator with the `YY` term restored.
pub fn extended_faithful() -> DMatrix<f64> {
    let s = sigma();
    (s[2].kronecker(&s[2]) + s[1].kronecker(&s[1]) + yy() + s[0].kronecker(&s[0])) / 4.0
}

/// Two operations that agree on every local state.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostPair {
    pub label: String,
    pub first: Vec<Kraus>,
    pub second: Vec<Kraus>,
}

pub fn ghost_pair() -> GhostPair {
    let s = sigma();
    GhostPair {
        label: "XX+ZZ-II vs YY".into(),
        first: vec![Kraus::conj(1.0, s[1].clone()), Kraus::conj(1.0, s[0].clone()), Kraus::conj(-1.0, s[2].clone())],
        second: vec![Kraus::conj(1.0, j_matrix())],
    }
}

/// The ten operations `s_i . s_j` reduced to the rebit: diagonal ones, real parts of
/// the mixed real ones, and imaginary parts of those involving `Y`.
pub fn generators() -> Vec<(String, DMatrix<f64>)> {
    let s = sigma();
    let names = ["1", "2", "3"];
    let mut out = Vec::new();
    for i in 0..3 {
        out.push((format!("A{}{}", names[i], names[i]), local_matrix(&[Kraus::conj(1.0, s[i].clone())])));
    }
    out.push(("A44".into(), local_matrix(&[Kraus::conj(1.0, j_matrix())])));
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let op = Kraus { coef: 1.0, left: s[i].clone(), right: s[j].clone() };
        out.push((format!("ReA{}{}", names[i], names[j]), local_matrix(&[op])));
    }
    for i in 0..3 {
        // Im(s_i rho Y) = -s_i rho J
        let op = Kraus { coef: -1.0, left: s[i].clone(), right: j_matrix() };
        out.push((format!("ImA{}4", names[i]), local_matrix(&[op])));
    }
    out
}

pub fn rebit() -> ModelBundle {
    let mut m = ball_model(ModelKind::Rebit, 2, false);
    m.ghost_pairs = vec![ghost_pair()];
    m.teleport_effect = Some(BipartiteMat { psi: DMatrix::identity(3, 3) / 3.0 });
    m
}
