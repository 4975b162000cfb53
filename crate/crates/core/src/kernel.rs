//! Bloch-representation algebra: states, effects, transformations and bipartite states.
//!
//! States and effects are vectors paired by the dot product. A transformation is a
//! square matrix acting on state vectors; its effect is `det_effect^T A`. A bipartite
//! state is the matrix `Psi[i][j] = Psi(l_i, l_j)`.

use nalgebra::{DMatrix, DVector};

use crate::convex::{cone_contains, dual_contains, frobenius, ConeSpec};
use crate::error::{GptError, Result};
use crate::tolerance::Tolerance;

/// Largest accepted condition number of a faithful state.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub dim: usize,
    pub state_cone: ConeSpec,
    pub effect_cone: ConeSpec,
    pub det_effect: DVector<f64>,
}

impl SystemSpec {
    pub fn new(state_cone: ConeSpec, effect_cone: ConeSpec, det_effect: DVector<f64>) -> Result<Self> {
        let dim = state_cone.dim();
        if effect_cone.dim() != dim || det_effect.len() != dim {
            return Err(GptError::dim("system spec", dim, det_effect.len()));
        }
        if !dual_contains(&state_cone, &det_effect, &Tolerance::default())? {
            return Err(GptError::Input("deterministic effect is not positive on the state cone".into()));
        }
        Ok(SystemSpec { dim, state_cone, effect_cone, det_effect })
    }

    /// Bloch vectors whose last coordinate is the deterministic effect.
    pub fn canonical(state_cone: ConeSpec, effect_cone: ConeSpec) -> Result<Self> {
        let d = state_cone.dim();
        let mut e = DVector::zeros(d);
        e[d - 1] = 1.0;
        SystemSpec::new(state_cone, effect_cone, e)
    }

    pub fn is_valid_state(&self, w: &StateVec, tol: &Tolerance) -> Result<bool> {
        let inside = cone_contains(&self.state_cone, &w.l, tol)?;
        let norm_ok = !w.normalized || (w.l.dot(&self.det_effect) - 1.0).abs() <= tol.eps.max(1e-12);
        Ok(inside && norm_ok)
    }

    /// `0 <= a <= e` in the order induced by the state cone.
    pub fn is_valid_effect(&self, a: &EffectVec, tol: &Tolerance) -> Result<bool> {
        Ok(dual_contains(&self.state_cone, &a.lambda, tol)?
            && dual_contains(&self.state_cone, &(&self.det_effect - &a.lambda), tol)?)
    }

    pub fn det(&self) -> EffectVec {
        EffectVec { lambda: self.det_effect.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    pub l: DVector<f64>,
    pub normalized: bool,
}

impl StateVec {
    pub fn normalized(l: DVector<f64>) -> Self {
        StateVec { l, normalized: true }
    }

    pub fn from_slice(x: &[f64]) -> Self {
        StateVec::normalized(DVector::from_column_slice(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectVec {
    pub lambda: DVector<f64>,
}

impl EffectVec {
    pub fn from_slice(x: &[f64]) -> Self {
        EffectVec { lambda: DVector::from_column_slice(x) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformMat {
    pub a: DMatrix<f64>,
}

impl TransformMat {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(GptError::Input(format!("transformation must be square, got {:?}", a.shape())));
        }
        Ok(TransformMat { a })
    }

    pub fn identity(d: usize) -> Self {
        TransformMat { a: DMatrix::identity(d, d) }
    }

    /// The effect `det_effect^T A` telling whether the transformation occurred.
    pub fn effect(&self, spec: &SystemSpec) -> EffectVec {
        EffectVec { lambda: self.a.tr_mul(&spec.det_effect) }
    }

    pub fn compose(&self, other: &TransformMat) -> TransformMat {
        TransformMat { a: &self.a * &other.a }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteMat {
    pub psi: DMatrix<f64>,
}

impl BipartiteMat {
    pub fn new(psi: DMatrix<f64>) -> Result<Self> {
        if !psi.is_square() {
            return Err(GptError::Input(format!("bipartite matrix must be square, got {:?}", psi.shape())));
        }
        Ok(BipartiteMat { psi })
    }

    pub fn product(left: &StateVec, right: &StateVec) -> Self {
        BipartiteMat { psi: &left.l * right.l.transpose() }
    }

    pub fn dim(&self) -> usize {
        self.psi.nrows()
    }

    pub fn is_symmetric(&self, tol: &Tolerance) -> bool {
        (&self.psi - self.psi.transpose()).amax() <= tol.eps.max(1e-12)
    }
}

pub fn pair(a: &EffectVec, w: &StateVec) -> Result<f64> {
    if a.lambda.len() != w.l.len() {
        return Err(GptError::dim("effect/state pairing", a.lambda.len(), w.l.len()));
    }
    Ok(a.lambda.dot(&w.l))
}

pub fn apply(t: &TransformMat, w: &StateVec) -> Result<StateVec> {
    if t.a.ncols() != w.l.len() {
        return Err(GptError::dim("transformation input", t.a.ncols(), w.l.len()));
    }
    Ok(StateVec { l: &t.a * &w.l, normalized: false })
}

pub fn probability(t: &TransformMat, w: &StateVec, spec: &SystemSpec) -> Result<f64> {
    let out = apply(t, w)?;
    if out.l.len() != spec.dim {
        return Err(GptError::dim("transformation output", spec.dim, out.l.len()));
    }
    Ok(spec.det_effect.dot(&out.l))
}

pub fn condition(t: &TransformMat, w: &StateVec, spec: &SystemSpec, tol: &Tolerance) -> Result<StateVec> {
    let p = probability(t, w, spec)?;
    if p <= tol.eps {
        return Err(GptError::ZeroProbability(p));
    }
    let out = apply(t, w)?;
    Ok(StateVec::normalized(out.l / p))
}

/// `(A ⊗ I) Psi = A Psi` on the left, `(I ⊗ A) Psi = Psi A^T` on the right.
pub fn bip_apply(t: &TransformMat, psi: &BipartiteMat, side: Side) -> Result<BipartiteMat> {
    if t.a.shape() != psi.psi.shape() {
        return Err(GptError::dim("bipartite action", psi.dim(), t.a.nrows()));
    }
    let out = match side {
        Side::Left => &t.a * &psi.psi,
        Side::Right => &psi.psi * t.a.transpose(),
    };
    Ok(BipartiteMat { psi: out })
}

/// State of the system on `side`, obtained by discarding the other one.
pub fn marginal(psi: &BipartiteMat, spec: &SystemSpec, side: Side) -> StateVec {
    let l = match side {
        Side::Left => &psi.psi * &spec.det_effect,
        Side::Right => psi.psi.tr_mul(&spec.det_effect),
    };
    StateVec { l, normalized: psi.normalized_within(spec, 1e-9) }
}

impl BipartiteMat {
    fn normalized_within(&self, spec: &SystemSpec, eps: f64) -> bool {
        (spec.det_effect.dot(&(&self.psi * &spec.det_effect)) - 1.0).abs() <= eps
    }
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a faithful state after the conditioning guard.
pub fn faithful_inverse(phi: &BipartiteMat) -> Result<DMatrix<f64>> {
    let cond = condition_number(&phi.psi);
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(GptError::SingularFaithfulState(cond));
    }
    phi.psi
        .clone()
        .try_inverse()
        .ok_or(GptError::SingularFaithfulState(cond))
}

/// `A_Psi = Psi^T Phi^{-1}`.
pub fn transform_from_bipartite(psi: &BipartiteMat, phi: &BipartiteMat) -> Result<TransformMat> {
    if psi.dim() != phi.dim() {
        return Err(GptError::dim("bipartite state", phi.dim(), psi.dim()));
    }
    let inv = faithful_inverse(phi)?;
    Ok(TransformMat { a: psi.psi.transpose() * inv })
}

/// `Psi = Phi T^T`, that is `(I ⊗ T) Phi`.
pub fn bipartite_from_transform(t: &TransformMat, phi: &BipartiteMat) -> Result<BipartiteMat> {
    bip_apply(t, phi, Side::Right)
}

/// The map `A'` with `(A' ⊗ I) Phi = (I ⊗ A) Phi`.
pub fn transpose_transform(t: &TransformMat, phi: &BipartiteMat) -> Result<TransformMat> {
    if t.a.shape() != phi.psi.shape() {
        return Err(GptError::dim("transposed transformation", phi.dim(), t.a.nrows()));
    }
    let inv = faithful_inverse(phi)?;
    Ok(TransformMat { a: &phi.psi * t.a.transpose() * inv })
}

/// `chi = Phi(e, .)`.
pub fn chaotic_state(phi: &BipartiteMat, spec: &SystemSpec) -> StateVec {
    marginal(phi, spec, Side::Right)
}

pub fn eval_bilinear(f: &BipartiteMat, psi: &BipartiteMat) -> Result<f64> {
    if f.psi.shape() != psi.psi.shape() {
        return Err(GptError::dim("bilinear form", f.dim(), psi.dim()));
    }
    Ok(frobenius(&f.psi, &psi.psi))
}
