//! The two-box world: a square of local states whose bipartite extremal states
//! include the eight nonlocal PR boxes.

use nalgebra::{DMatrix, DVector};

use super::{
    Automorphisms, BipartiteFamily, Faithful, LabeledBipartite, ModelBundle, ModelKind, StateBody, TransformFamily,
};
use crate::convex::ConeSpec;
use crate::error::{GptError, Result};
use crate::kernel::{transform_from_bipartite, BipartiteMat, EffectVec, StateVec, SystemSpec, TransformMat};

/// `p[i][j][x][y]`: probability of outcomes `(i, j)` for inputs `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointTable {
    pub p: [[[[f64; 2]; 2]; 2]; 2],
}

const TABLE_EPS: f64 = 1e-12;

impl JointTable {
    pub fn new(p: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        let t = JointTable { p };
        for x in 0..2 {
            for y in 0..2 {
                let mut total = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        let v = p[i][j][x][y];
                        if !(-TABLE_EPS..=1.0 + TABLE_EPS).contains(&v) {
                            return Err(GptError::Input(format!("probability {v} outside [0, 1]")));
                        }
                        total += v;
                    }
                }
                if (total - 1.0).abs() > TABLE_EPS {
                    return Err(GptError::Input(format!("table for inputs ({x},{y}) sums to {total}")));
                }
            }
        }
        if !t.is_no_signaling() {
            return Err(GptError::Input("joint table is signaling".into()));
        }
        Ok(t)
    }

    fn from_rule(rule: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for (i, pi) in p.iter_mut().enumerate() {
            for (j, pij) in pi.iter_mut().enumerate() {
                for (x, pijx) in pij.iter_mut().enumerate() {
                    for (y, v) in pijx.iter_mut().enumerate() {
                        *v = rule(i, j, x, y);
                    }
                }
            }
        }
        JointTable { p }
    }

    /// Nonlocal box: `i xor j = xy xor ax xor by xor c` with probability 1/2.
    pub fn pr(a: usize, b: usize, c: usize) -> Self {
        JointTable::from_rule(|i, j, x, y| if i ^ j == (x & y) ^ (a & x) ^ (b & y) ^ c { 0.5 } else { 0.0 })
    }

    /// Deterministic box: `i = ax xor b`, `j = cy xor d`.
    pub fn local(a: usize, b: usize, c: usize, d: usize) -> Self {
        JointTable::from_rule(|i, j, x, y| if i == (a & x) ^ b && j == (c & y) ^ d { 1.0 } else { 0.0 })
    }

    pub fn uniform() -> Self {
        JointTable::from_rule(|_, _, _, _| 0.25)
    }

    pub fn alice(&self, i: usize, x: usize, y: usize) -> f64 {
        self.p[i][0][x][y] + self.p[i][1][x][y]
    }

    pub fn bob(&self, j: usize, x: usize, y: usize) -> f64 {
        self.p[0][j][x][y] + self.p[1][j][x][y]
    }

    pub fn is_no_signaling(&self) -> bool {
        (0..2).all(|k| {
            (0..2).all(|x| (self.alice(k, x, 0) - self.alice(k, x, 1)).abs() <= TABLE_EPS)
                && (0..2).all(|y| (self.bob(k, 0, y) - self.bob(k, 1, y)).abs() <= TABLE_EPS)
        })
    }
}

/// Rows express `l_1 = a0(0) + a0(1) - e`, `l_2 = a0(1) - a0(0)` and `e` over
/// the effects `(a0(0), a0(1), e)`.
fn change_of_basis() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[1., 1., -1., -1., 1., 0., 0., 0., 1.])
}

pub fn joint_table_to_bipartite(t: &JointTable) -> Result<BipartiteMat> {
    if !t.is_no_signaling() {
        return Err(GptError::Input("joint table is signaling".into()));
    }
    let mut g = DMatrix::<f64>::zeros(3, 3);
    for x in 0..2 {
        for y in 0..2 {
            g[(x, y)] = t.p[0][0][x][y];
        }
        g[(x, 2)] = t.alice(0, x, 0);
        g[(2, x)] = t.bob(0, 0, x);
    }
    g[(2, 2)] = 1.0;
    let c = change_of_basis();
    Ok(BipartiteMat { psi: &c * g * c.transpose() })
}

/// Vertex `w^{ab}` answering `i = ax xor b` to input `x`.
pub fn vertex(a: usize, b: usize) -> StateVec {
    let l = match (a, b) {
        (0, 0) => [1., 0., 1.],
        (1, 1) => [0., 1., 1.],
        (0, 1) => [-1., 0., 1.],
        _ => [0., -1., 1.],
    };
    StateVec::from_slice(&l)
}

/// Effect `a_i^(x)`: outcome `i` of measurement `x`.
pub fn box_effect(i: usize, x: usize) -> EffectVec {
    let l = match (i, x) {
        (0, 0) => [0.5, -0.5, 0.5],
        (1, 0) => [-0.5, 0.5, 0.5],
        (0, 1) => [0.5, 0.5, 0.5],
        _ => [-0.5, -0.5, 0.5],
    };
    EffectVec::from_slice(&l)
}

pub fn pr_bipartite(a: usize, b: usize, c: usize) -> BipartiteMat {
    joint_table_to_bipartite(&JointTable::pr(a, b, c)).expect("PR boxes are no-signaling")
}

fn bits(k: usize) -> (usize, usize, usize) {
    ((k >> 2) & 1, (k >> 1) & 1, k & 1)
}

pub fn two_box() -> ModelBundle {
    let v = |x: &[f64]| DVector::from_column_slice(x);
    let square = ConeSpec::PolyV(vec![v(&[1., 0., 1.]), v(&[-1., 0., 1.]), v(&[0., 1., 1.]), v(&[0., -1., 1.])]);
    let effect_cone =
        ConeSpec::PolyV(vec![v(&[1., 1., 1.]), v(&[1., -1., 1.]), v(&[-1., 1., 1.]), v(&[-1., -1., 1.])]);
    let spec = SystemSpec::canonical(square, effect_cone).expect("square cone spec");

    let pure_states: Vec<StateVec> = [(0, 0), (1, 0), (0, 1), (1, 1)].iter().map(|&(a, b)| vertex(a, b)).collect();
    let mut extremal_effects = vec![EffectVec::from_slice(&[0., 0., 0.]), spec.det()];
    for x in 0..2 {
        for i in 0..2 {
            extremal_effects.push(box_effect(i, x));
        }
    }

    let phi = pr_bipartite(0, 0, 0);
    let mut bipartite = Vec::new();
    for k in 0..8 {
        let (a, b, c) = bits(k);
        bipartite.push(LabeledBipartite { label: format!("Phi{a}{b}{c}"), psi: pr_bipartite(a, b, c) });
    }
    for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        for (c, d) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let psi = joint_table_to_bipartite(&JointTable::local(a, b, c, d)).expect("local boxes are no-signaling");
            bipartite.push(LabeledBipartite { label: format!("w{a}{b}*w{c}{d}"), psi });
        }
    }

    let automorphisms: Vec<TransformMat> = (0..8)
        .map(|k| transform_from_bipartite(&bipartite[k].psi, &phi).expect("PR faithful state is invertible"))
        .collect();

    let mut measure_prepare = Vec::new();
    for w in &pure_states {
        for x in 0..2 {
            for i in 0..2 {
                measure_prepare.push(TransformMat { a: &w.l * box_effect(i, x).lambda.transpose() });
            }
        }
    }

    ModelBundle {
        kind: ModelKind::TwoBox,
        spec,
        pure_states,
        extremal_effects,
        faithful: Some(Faithful { phi, pure: true }),
        automorphisms: Automorphisms::Finite(automorphisms),
        extremal_transforms: TransformFamily::Finite(measure_prepare),
        extremal_bipartite: BipartiteFamily::Finite(bipartite),
        body: StateBody::Polytope { lo: -1.0, hi: 1.0 },
        ghost_pairs: Vec::new(),
        ghosts_identified: false,
        teleport_effect: None,
    }
}
