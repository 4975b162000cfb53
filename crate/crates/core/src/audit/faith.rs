//! Faithful-state audits: PFAITH, FAITHE and the teleportation identity.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AuditConfig, AuditResult, Postulate, Status, Witness};
use crate::convex::{conic_decomposition, frobenius, is_extremal_in_hull, minimize_bilinear, BilinearMin, Family};
use crate::error::{GptError, Result};
use crate::groups::{embed, is_orthogonal, random_orthogonal};
use crate::kernel::{
    apply, chaotic_state, condition_number, faithful_inverse, transpose_transform, BipartiteMat, TransformMat,
};
use crate::models::lorentz::{a_gamma, member};
use crate::models::{Automorphisms, BipartiteFamily, EllipticFamily, ModelBundle, ModelKind, TransformFamily};
use crate::tolerance::Tolerance;

fn faithful(m: &ModelBundle) -> Result<&BipartiteMat> {
    m.faithful
        .as_ref()
        .map(|f| &f.phi)
        .ok_or_else(|| GptError::Inapplicable(format!("{} has no faithful state", m.name())))
}

fn vec_of(m: &DMatrix<f64>) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

pub fn audit_pfaith(m: &ModelBundle, cfg: &AuditConfig) -> AuditResult {
    match pfaith(m, cfg) {
        Ok(r) => r,
        Err(e) => AuditResult::inconclusive(Postulate::Pfaith, &e),
    }
}

fn pfaith(m: &ModelBundle, cfg: &AuditConfig) -> Result<AuditResult> {
    let tol = &cfg.tol;
    let fails = |w: Witness| AuditResult::new(Postulate::Pfaith, Status::Fails).with_witness(w);
    let Some(f) = &m.faithful else {
        return Ok(AuditResult::new(Postulate::Pfaith, Status::Fails)
            .note("no pure preparationally faithful state")
            .with_witness(Witness::matrix("bipartite", Some("none".into()), &DMatrix::zeros(0, 0))));
    };
    let phi = &f.phi;
    let phi_w = || Witness::matrix("bipartite", Some("Phi".into()), &phi.psi);

    if !phi.is_symmetric(tol) {
        return Ok(fails(phi_w()).note("faithful state is not symmetric"));
    }
    let inv = match faithful_inverse(phi) {
        Ok(inv) => inv,
        Err(e) => return Ok(fails(phi_w()).note(e.to_string())),
    };
    let cond = condition_number(&phi.psi);

    // every bipartite extremal state must induce a positive local map
    let boundary = m.boundary_states(tol, cfg.seed);
    let members = m.bipartite_samples(256, cfg.seed);
    for psi in &members {
        let a = psi.psi.transpose() * &inv;
        if m.positivity_violation(&a, &boundary, tol).is_some() {
            return Ok(fails(Witness::matrix("bipartite", None, &psi.psi))
                .note("bipartite state induces a non-positive map; not preparationally faithful"));
        }
    }

    let mut result = AuditResult::new(Postulate::Pfaith, Status::Holds).detail("condition_number", cond);

    match &m.extremal_bipartite {
        BipartiteFamily::Finite(list) => {
            let pts: Vec<_> = list.iter().map(|b| vec_of(&b.psi.psi)).collect();
            let extremal = is_extremal_in_hull(&pts, &vec_of(&phi.psi), tol)?;
            if !extremal {
                let mut r = fails(phi_w())
                    .note("no pure preparationally faithful state")
                    .note("the faithful state is a mixture of product states");
                if let (ModelKind::Classical { n }, TransformFamily::Finite(gens)) = (m.kind, &m.extremal_transforms) {
                    let mats: Vec<DMatrix<f64>> = gens.iter().map(|t| t.a.clone()).collect();
                    let id = DMatrix::identity(m.dim(), m.dim());
                    if let Some(c) = conic_decomposition(&mats, &id, tol) {
                        let terms = c.iter().filter(|&&x| x > tol.eps).count();
                        r = r
                            .note(format!(
                                "identity is non-atomic: a sum of {terms} measure-and-prepare maps (n = {n})"
                            ))
                            .detail("identity_terms", terms as f64);
                    }
                }
                return Ok(r);
            }
            result = result.note("faithful state is a vertex of the bipartite state set");
        }
        BipartiteFamily::Elliptic(fam) => {
            let n = fam.n;
            let at_one = member(&DMatrix::identity(n, n), &DMatrix::identity(n, n), 1.0);
            let membership = (&at_one - &phi.psi).amax();
            if membership > tol.eps.max(1e-12) {
                return Ok(fails(phi_w()).note("faithful state is not a member of the pure family"));
            }
            if let Some(dir) = perturbation_escape(m, phi, &inv, &boundary, tol, cfg.seed) {
                return Ok(fails(Witness::matrix("direction", None, &dir))
                    .note("faithful state can be perturbed both ways inside the state set"));
            }
            result = result
                .note("faithful state is the pure family member at g = 1; local perturbation test passed")
                .detail("membership_residual", membership);
        }
    }

    // consequences: chaotic state invariance and transposition closure
    let chi = chaotic_state(phi, &m.spec);
    let autos = m.automorphism_samples(64, cfg.seed);
    let mut chi_res = 0.0f64;
    let mut transpose_res = 0.0f64;
    for d in &autos {
        chi_res = chi_res.max((apply(d, &chi)?.l - &chi.l).amax());
        let t = transpose_transform(d, phi)?;
        transpose_res = transpose_res.max(automorphism_distance(m, &t));
    }
    result = result.detail("chaotic_invariance_residual", chi_res).detail("transpose_closure_residual", transpose_res);
    if chi_res <= tol.eps.max(1e-12) * 10.0 {
        result = result.note("chaotic state is invariant under the automorphisms");
    }
    if transpose_res <= tol.eps.max(1e-12) * 10.0 {
        result = result.note("transposition maps automorphisms to automorphisms");
    }
    Ok(result)
}

/// Distance of a matrix from the automorphism group.
pub(crate) fn automorphism_distance(m: &ModelBundle, t: &TransformMat) -> f64 {
    match &m.automorphisms {
        Automorphisms::Finite(list) => list.iter().map(|d| (&d.a - &t.a).amax()).fold(f64::INFINITY, f64::min),
        Automorphisms::Orthogonal { n, special } => {
            let x = t.a.view((0, 0), (*n, *n)).clone_owned();
            let mut res = (embed(&x) - &t.a).amax();
            res = res.max((x.transpose() * &x - DMatrix::identity(*n, *n)).amax());
            if *special && x.determinant() < 0.0 {
                res = res.max(2.0);
            }
            res
        }
    }
}

/// Looks for a direction along which the faithful state can move both ways while
/// every induced map stays positive. `None` certifies local extremality.
fn perturbation_escape(
    m: &ModelBundle,
    phi: &BipartiteMat,
    inv: &DMatrix<f64>,
    boundary: &[nalgebra::DVector<f64>],
    tol: &Tolerance,
    seed: u64,
) -> Option<DMatrix<f64>> {
    let d = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xFACE);
    let delta = 1e-3;
    for _ in 0..24 {
        let mut dir = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        dir[(d - 1, d - 1)] = 0.0;
        let both_inside = [1.0, -1.0].iter().all(|s| {
            let psi = &phi.psi + &dir * (s * delta);
            let a = psi.transpose() * inv;
            m.positivity_violation(&a, boundary, tol).is_none()
        });
        if both_inside {
            return Some(dir);
        }
    }
    None
}

/// Minimum of a bilinear form over the extremal bipartite states, with a readable witness label.
#[derive(Debug, Clone, PartialEq)]
pub struct FaitheMinimum {
    pub min: BilinearMin,
    pub label: String,
}

pub fn faithe_minimum(m: &ModelBundle, f: &DMatrix<f64>, tol: &Tolerance) -> Result<FaitheMinimum> {
    match &m.extremal_bipartite {
        BipartiteFamily::Finite(list) => {
            let mats: Vec<DMatrix<f64>> = list.iter().map(|b| b.psi.psi.clone()).collect();
            let min = minimize_bilinear(f, &Family::Finite(&mats), tol)?;
            let label = list[min.index].label.clone();
            Ok(FaitheMinimum { min, label })
        }
        BipartiteFamily::Elliptic(fam) => {
            let fam = fam.with_grids(tol);
            let min = minimize_bilinear(f, &Family::Parametric(&fam), tol)?;
            let label = describe_elliptic(m, &min.witness);
            Ok(FaitheMinimum { min, label })
        }
    }
}

fn describe_elliptic(m: &ModelBundle, psi: &DMatrix<f64>) -> String {
    let d = psi.nrows();
    let n = d - 1;
    let x = psi.view((0, 0), (n, n)).clone_owned();
    if !is_orthogonal(&x, 1e-9) || (embed(&x) - psi).amax() > 1e-9 {
        return "pure family member".into();
    }
    // with an identity faithful state, Psi = (I ⊗ D) Phi means D = Psi^T
    let dm = psi.transpose();
    if m.kind == ModelKind::Rebit {
        let a44 = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[-1., -1., 1.]));
        if (&dm - a44).amax() < 1e-9 {
            return "(A44⊗I)Phi".into();
        }
    }
    if n == 2 {
        let angle = dm[(1, 0)].atan2(dm[(0, 0)]).rem_euclid(std::f64::consts::TAU);
        if dm.determinant() > 0.0 {
            return format!("(I⊗R_phi)Phi, phi = {angle:.6}");
        }
        return format!("(I⊗S_phi)Phi, phi = {:.6}", angle / 2.0);
    }
    if dm.is_diagonal_within(1e-9) {
        let entries: Vec<String> = (0..d).map(|k| format!("{}", dm[(k, k)].round())).collect();
        return format!("(I⊗D)Phi, D = diag({})", entries.join(","));
    }
    "(I⊗D)Phi for an orthogonal D".into()
}

trait DiagonalWithin {
    fn is_diagonal_within(&self, eps: f64) -> bool;
}

impl DiagonalWithin for DMatrix<f64> {
    fn is_diagonal_within(&self, eps: f64) -> bool {
        (0..self.nrows()).all(|i| (0..self.ncols()).all(|j| i == j || self[(i, j)].abs() <= eps))
    }
}

/// Largest value of the form over the extremal bipartite states.
fn family_max(m: &ModelBundle, f: &DMatrix<f64>, tol: &Tolerance) -> Result<FaitheMinimum> {
    let neg = -f;
    let mut r = faithe_minimum(m, &neg, tol)?;
    r.min.value = -r.min.value;
    Ok(r)
}

/// Smallest value found by sampling random family members.
fn random_search(fam: &EllipticFamily, f: &DMatrix<f64>, samples: usize, seed: u64) -> (f64, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = fam.n;
    let mut best = (f64::INFINITY, DMatrix::zeros(n + 1, n + 1));
    for _ in 0..samples {
        let w = random_orthogonal(n, fam.special, &mut rng);
        let g = rng.random_range(0.5..=1.0);
        // the right factor can be absorbed into the left for an identity-like form
        let psi = embed(&w) * a_gamma(n, g) / g;
        let v = frobenius(f, &psi);
        if v < best.0 {
            best = (v, psi);
        }
    }
    best
}

pub fn audit_faithe(m: &ModelBundle, cfg: &AuditConfig) -> AuditResult {
    match faithe(m, cfg) {
        Ok(r) => r,
        Err(e) => AuditResult::inconclusive(Postulate::Faithe, &e),
    }
}

fn faithe(m: &ModelBundle, cfg: &AuditConfig) -> Result<AuditResult> {
    let tol = &cfg.tol;
    let f = m.faithful.as_ref().ok_or_else(|| GptError::Inapplicable("no faithful state".into()))?;
    if !f.pure {
        return Err(GptError::Inapplicable(
            "no pure faithful state (see PFAITH); the test needs the faithful state of PFAITH".into(),
        ));
    }
    let inv = faithful_inverse(&f.phi)?;
    let mn = faithe_minimum(m, &inv, tol)?;
    let mx = family_max(m, &inv, tol)?;
    let alpha = 1.0 / mx.min.value;

    if mn.min.value < -tol.eps {
        return Ok(AuditResult::new(Postulate::Faithe, Status::Fails)
            .with_value(mn.min.value)
            .with_witness(Witness::matrix("bipartite", Some(mn.label.clone()), &mn.min.witness))
            .note(format!("Phi^-1 is negative on {}; no bipartite effect is proportional to it", mn.label))
            .note("probabilistic teleportation is impossible")
            .detail("min_phi_inverse", mn.min.value)
            .detail("alpha_candidate", alpha)
            .detail("scaled_min", alpha * mn.min.value));
    }

    let mut result = AuditResult::new(Postulate::Faithe, Status::Holds);
    if let BipartiteFamily::Elliptic(fam) = &m.extremal_bipartite {
        if fam.n >= 3 {
            let (v, w) = random_search(fam, &inv, cfg.search_samples, cfg.seed);
            result = result.detail("random_search_min", v).detail("random_search_samples", cfg.search_samples as f64);
            if v < -tol.eps {
                return Ok(AuditResult::new(Postulate::Faithe, Status::Fails)
                    .with_value(v)
                    .with_witness(Witness::matrix("bipartite", Some("random search".into()), &w))
                    .note("random search found a negative value of Phi^-1"));
            }
        }
    }
    if !(alpha > 0.0 && alpha <= 1.0 + tol.eps) {
        return Err(GptError::Numerical(format!("teleportation probability {alpha} outside (0, 1]")));
    }
    let outcome = teleport_check(m, &(inv * alpha), tol)?;
    Ok(result
        .with_value(alpha)
        .note(format!("F = alpha Phi^-1 is a bipartite effect; teleportation succeeds with probability {alpha:.6}"))
        .detail("min_phi_inverse", mn.min.value)
        .detail("max_phi_inverse", mx.min.value)
        .detail("teleport_residual", outcome.residual))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportOutcome {
    pub feasible: bool,
    pub alpha: Option<f64>,
    /// Max-norm of `Phi F Phi - alpha Phi` for the best-fitting `alpha`.
    pub residual: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub witness: Option<(String, DMatrix<f64>)>,
}

pub fn teleport_check(m: &ModelBundle, f: &DMatrix<f64>, tol: &Tolerance) -> Result<TeleportOutcome> {
    let phi = faithful(m)?;
    if f.shape() != phi.psi.shape() {
        return Err(GptError::dim("bipartite effect", phi.dim(), f.nrows()));
    }
    let p = &phi.psi * f * &phi.psi;
    let alpha = frobenius(&p, &phi.psi) / frobenius(&phi.psi, &phi.psi);
    let residual = (&p - &phi.psi * alpha).amax();
    let mn = faithe_minimum(m, f, tol)?;
    let mx = family_max(m, f, tol)?;
    let eps = tol.eps.max(1e-12);
    let valid = mn.min.value >= -eps && mx.min.value <= 1.0 + eps;
    let feasible = alpha > eps && residual <= eps && valid;
    let witness = if mn.min.value < -eps {
        Some((mn.label, mn.min.witness))
    } else if mx.min.value > 1.0 + eps {
        Some((mx.label, mx.min.witness))
    } else {
        None
    };
    Ok(TeleportOutcome {
        feasible,
        alpha: (alpha > eps).then_some(alpha),
        residual,
        min_value: mn.min.value,
        max_value: mx.min.value,
        witness,
    })
}

/// Teleportation with the model's candidate effect, or `alpha Phi^-1` with `alpha`
/// saturating the largest value over the bipartite states.
pub fn audit_teleport(m: &ModelBundle, cfg: &AuditConfig) -> AuditResult {
    let run = || -> Result<AuditResult> {
        let phi = faithful(m)?;
        let inv = faithful_inverse(phi)?;
        let alpha = 1.0 / family_max(m, &inv, &cfg.tol)?.min.value;
        let f = m.teleport_effect.as_ref().map(|b| b.psi.clone()).unwrap_or_else(|| &inv * alpha);
        let out = teleport_check(m, &f, &cfg.tol)?;
        let status = if out.feasible { Status::Holds } else { Status::Fails };
        let mut r = AuditResult::new(Postulate::Teleport, status)
            .detail("alpha_candidate", alpha)
            .detail("residual", out.residual)
            .detail("min_value", out.min_value)
            .detail("max_value", out.max_value);
        if let Some(a) = out.alpha {
            r = r.with_value(a);
        }
        if let Some((label, w)) = &out.witness {
            r = r
                .with_witness(Witness::matrix("bipartite", Some(label.clone()), w))
                .note(format!("candidate effect is not a bipartite effect: value {:.6} on {label}", out.min_value));
        } else if !out.feasible {
            r = r.with_witness(Witness::matrix("effect", Some("F".into()), &f)).note("teleportation identity fails");
        } else {
            r = r.note(format!("teleportation succeeds with probability {:.6}", out.alpha.unwrap_or(0.0)));
        }
        Ok(r)
    };
    run().unwrap_or_else(|e| AuditResult::inconclusive(Postulate::Teleport, &e))
}
