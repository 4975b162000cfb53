//! PURIFY: every mixed state is the marginal of a pure bipartite state.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AuditConfig, AuditResult, Postulate, Status, Witness};
use crate::groups::{embed, frame_from, is_orthogonal, random_orthogonal};
use crate::kernel::{chaotic_state, marginal, BipartiteMat, Side, StateVec};
use crate::models::lorentz::member;
use crate::models::{BipartiteFamily, EllipticFamily, ModelBundle};
use crate::tolerance::Tolerance;

/// Pure bipartite states whose first marginal is `w`. Ball models return the
/// closed-form member; finite models return every matching extremal state.
pub fn purifications_of(m: &ModelBundle, w: &StateVec, tol: &Tolerance) -> Vec<(String, BipartiteMat)> {
    match &m.extremal_bipartite {
        BipartiteFamily::Finite(list) => list
            .iter()
            .filter(|b| (marginal(&b.psi, &m.spec, Side::Left).l - &w.l).amax() <= tol.eps)
            .map(|b| (b.label.clone(), b.psi.clone()))
            .collect(),
        BipartiteFamily::Elliptic(fam) => {
            let n = fam.n;
            let id = DMatrix::identity(n, n);
            closed_form(fam, w, &id, &id).map(|(g, psi)| (format!("g = {g:.9}"), psi)).into_iter().collect()
        }
    }
}

/// The member with left factor `frame_from(u) * left` and squeezing `g = 1/(1+r)`.
fn closed_form(
    fam: &EllipticFamily,
    w: &StateVec,
    left: &DMatrix<f64>,
    right: &DMatrix<f64>,
) -> Option<(f64, BipartiteMat)> {
    let n = fam.n;
    let norm = w.l[n];
    if norm <= 0.0 {
        return None;
    }
    let spatial = w.l.rows(0, n) / norm;
    let r = spatial.norm();
    if r > 1.0 + 1e-12 {
        return None;
    }
    let u = if r < 1e-15 {
        let mut e = DVector::zeros(n);
        e[0] = 1.0;
        e
    } else {
        &spatial / r
    };
    let g = 1.0 / (1.0 + r.min(1.0));
    let x = frame_from(&u, fam.special) * left;
    Some((g, BipartiteMat { psi: member(&x, right, g) * norm }))
}

pub fn audit_purify(m: &ModelBundle, cfg: &AuditConfig) -> AuditResult {
    let tol = &cfg.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = cfg.purify_samples.max(1);
    let mut max_residual = 0.0f64;
    let mut first_failure: Option<StateVec> = None;
    let mut failures = 0usize;
    for _ in 0..samples {
        let w = m.sample_mixed_state(&mut rng, tol);
        let found = purifications_of(m, &w, tol);
        if found.is_empty() {
            failures += 1;
            first_failure.get_or_insert(w);
            continue;
        }
        for (_, psi) in &found {
            max_residual = max_residual.max((marginal(psi, &m.spec, Side::Left).l - &w.l).amax());
        }
    }

    let chi_count = m.faithful.as_ref().map(|f| purifications_of(m, &chaotic_state(&f.phi, &m.spec), tol).len());

    let mut r = if let Some(w) = first_failure {
        AuditResult::new(Postulate::Purify, Status::Fails)
            .with_witness(Witness::vector("state", Some("mixed state without purification".into()), &w.l))
            .note(format!("{failures} of {samples} sampled mixed states have no purification"))
            .note("there are too few pure bipartite states")
    } else {
        AuditResult::new(Postulate::Purify, Status::Holds)
            .note(format!("all {samples} sampled mixed states purified; largest marginal residual {max_residual:.3e}"))
    };
    r = r.detail("samples", samples as f64).detail("failures", failures as f64).detail("max_residual", max_residual);
    if let Some(c) = chi_count {
        r = r.detail("chaotic_purifications", c as f64);
        if let BipartiteFamily::Finite(_) = m.extremal_bipartite {
            r = r.note(format!("the chaotic state has {c} purifications"));
        }
    }
    if let BipartiteFamily::Elliptic(fam) = &m.extremal_bipartite {
        match uniqueness_residual(fam, m, cfg) {
            Some(res) if res <= 1e-6 => {
                r = r
                    .note("purifications are unique up to a local automorphism on the purifying system")
                    .detail("uniqueness_residual", res);
            }
            Some(res) => {
                r = r.note("two purifications are not related by a local automorphism").detail("uniqueness_residual", res);
            }
            None => {}
        }
    }
    r
}

/// For seeded mixed states, builds a second purification from a different frame and
/// right factor and measures how far the linking map is from a local automorphism.
fn uniqueness_residual(fam: &EllipticFamily, m: &ModelBundle, cfg: &AuditConfig) -> Option<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xB0B);
    let n = fam.n;
    let mut worst = 0.0f64;
    for _ in 0..cfg.purify_samples.clamp(1, 100) {
        let w = m.sample_mixed_state(&mut rng, &cfg.tol);
        let id = DMatrix::identity(n, n);
        let (_, psi1) = closed_form(fam, &w, &id, &id)?;
        let rest = if n == 2 {
            DMatrix::identity(1, 1)
        } else {
            random_orthogonal(n - 1, fam.special, &mut rng)
        };
        let mut stab = DMatrix::identity(n, n);
        stab.view_mut((1, 1), (n - 1, n - 1)).copy_from(&rest);
        let v2 = random_orthogonal(n, fam.special, &mut rng);
        let (_, psi2) = closed_form(fam, &w, &stab, &v2)?;
        let Some(inv) = psi1.psi.clone().try_inverse() else {
            continue;
        };
        // psi2 = psi1 D^T
        let d = (inv * &psi2.psi).transpose();
        let x = d.view((0, 0), (n, n)).clone_owned();
        let mut res = (embed(&x) - &d).amax();
        if !is_orthogonal(&x, 1e-6) {
            res = res.max((x.transpose() * &x - &id).amax());
        }
        if fam.special && x.determinant() < 0.0 {
            res = res.max(2.0);
        }
        res = res.max((&psi1.psi * d.transpose() - &psi2.psi).amax());
        worst = worst.max(res);
    }
    Some(worst)
}
