//! Seeded invariant checks shared by the property suite and the acceptance run.
#![allow(dead_code)]

use gptaudit::audit::{audit_faithe, audit_purify, chsh_value, teleport_check, AuditConfig, ChshSetting, Status};
use gptaudit::convex::{
    cone_contains, dual_contains, frobenius, is_extremal_in_hull, minimize_bilinear, ConeSpec, Family,
};
use gptaudit::groups::random_unit;
use gptaudit::kernel::{
    apply, bip_apply, bipartite_from_transform, chaotic_state, marginal, probability, transform_from_bipartite,
    transpose_transform, BipartiteMat, EffectVec, Side, TransformMat,
};
use gptaudit::models::rebit::{upsilon, upsilon_inv};
use gptaudit::models::two_box::vertex;
use gptaudit::models::{
    classical, clock, rebit, spin_factor, two_box, Automorphisms, BipartiteFamily, Faithful, Group, ModelBundle,
    TransformFamily,
};
use gptaudit::Tolerance;
use nalgebra::{DMatrix, DVector};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = fn(u64) -> Result<(), String>;

pub const CHECKS: &[(&str, Check)] = &[
    ("self-duality of orthant and Lorentz cones", self_duality),
    ("V-cone dual soundness", polyv_dual_soundness),
    ("square vertices are the only extremal points", square_extremality),
    ("finite bilinear minimum equals direct loop", finite_minimum),
    ("transform and bipartite round trip", round_trip),
    ("last row of a transformation is an effect", last_row_law),
    ("apply and probability agree", apply_probability),
    ("transposition is an involution closing the automorphisms", transposition),
    ("chaotic state is fixed by the automorphisms", chaotic_fixed_point),
    ("faithful marginals equal the chaotic state", faithful_marginals),
    ("two-box automorphisms form a group", two_box_group_closure),
    ("disk family members are positive", disk_positivity),
    ("rebit operator round trip", rebit_round_trip),
    ("classical permutations preserve the vertices", classical_vertices),
    ("FAITHE verdict independent of the faithful state", faithe_faithful_change),
    ("teleportation identity is exact for alpha Phi^-1", teleport_algebra),
    ("CHSH invariant under automorphisms", chsh_covariance),
    ("CHSH within the no-signaling bound", chsh_no_signaling),
    ("disk purification residuals", disk_purification),
    ("spin-factor FAITHE witnesses by parity", spin_factor_parity),
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn all_models() -> Vec<ModelBundle> {
    vec![
        two_box(),
        clock(),
        rebit(),
        spin_factor(3, Group::SO).unwrap(),
        spin_factor(4, Group::O).unwrap(),
        classical(1).unwrap(),
        classical(2).unwrap(),
        classical(3).unwrap(),
    ]
}

fn phi(m: &ModelBundle) -> BipartiteMat {
    m.faithful.as_ref().expect("model has a faithful state").phi.clone()
}

/// A physical transformation: a random convex mixture of extremal and automorphic
/// maps for finite models, a random family member otherwise.
pub fn random_transform(m: &ModelBundle, r: &mut ChaCha8Rng) -> TransformMat {
    match (&m.extremal_transforms, &m.automorphisms) {
        (TransformFamily::Finite(ext), Automorphisms::Finite(auto)) => {
            let pool: Vec<&TransformMat> = ext.iter().chain(auto.iter()).collect();
            let k = r.random_range(1..4);
            let w: Vec<f64> = (0..k).map(|_| r.random::<f64>() + 1e-3).collect();
            let total: f64 = w.iter().sum();
            let mut a = DMatrix::zeros(m.dim(), m.dim());
            for wi in w {
                a += &pool.choose(r).unwrap().a * (wi / total);
            }
            TransformMat { a }
        }
        (TransformFamily::Elliptic(fam), _) => {
            let psi = BipartiteMat { psi: fam.sample(r) };
            let t = transform_from_bipartite(&psi, &phi(m)).unwrap();
            // rescale so that the largest success probability on a pure state is one
            let a = t.effect(&m.spec).lambda;
            let peak = a[fam.n] + a.rows(0, fam.n).norm();
            TransformMat { a: t.a / peak }
        }
        (TransformFamily::Finite(ext), _) => ext.choose(r).unwrap().clone(),
    }
}

pub fn random_bipartite(m: &ModelBundle, r: &mut ChaCha8Rng) -> BipartiteMat {
    match &m.extremal_bipartite {
        BipartiteFamily::Finite(list) => {
            let a = &list.choose(r).unwrap().psi.psi;
            let b = &list.choose(r).unwrap().psi.psi;
            let t = r.random::<f64>();
            BipartiteMat { psi: a * t + b * (1.0 - t) }
        }
        BipartiteFamily::Elliptic(fam) => BipartiteMat { psi: fam.sample(r) },
    }
}

fn random_effect(m: &ModelBundle, r: &mut ChaCha8Rng) -> EffectVec {
    match &m.extremal_bipartite {
        BipartiteFamily::Elliptic(fam) => {
            let u = random_unit(fam.n, r);
            let mut l = DVector::zeros(fam.n + 1);
            l.rows_mut(0, fam.n).copy_from(&(u * 0.5));
            l[fam.n] = 0.5;
            EffectVec { lambda: l }
        }
        _ => m.extremal_effects.choose(r).unwrap().clone(),
    }
}

fn random_setting(m: &ModelBundle, r: &mut ChaCha8Rng) -> ChshSetting {
    let e: Vec<EffectVec> = (0..4).map(|_| random_effect(m, r)).collect();
    ChshSetting::from_outcomes([&e[0], &e[1]], [&e[2], &e[3]], &m.spec)
}

pub fn self_duality(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    for cone in [ConeSpec::Orthant(4), ConeSpec::Lorentz(4)] {
        for _ in 0..10_000 {
            let v = DVector::from_fn(4, |_, _| r.random_range(-1.0..1.0));
            let a = cone_contains(&cone, &v, &tol).unwrap();
            let b = dual_contains(&cone, &v, &tol).unwrap();
            ensure(a == b, || format!("{cone:?}: membership and dual membership differ at {v}"))?;
        }
    }
    Ok(())
}

pub fn polyv_dual_soundness(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let m = two_box();
    let ConeSpec::PolyV(gens) = &m.spec.state_cone else {
        return Err("two-box state cone is not a V-cone".into());
    };
    let mut r = rng(seed);
    let points: Vec<DVector<f64>> = (0..50)
        .map(|_| gens.iter().fold(DVector::zeros(3), |acc, g| acc + g * r.random::<f64>()))
        .collect();
    for _ in 0..200 {
        let a = DVector::from_fn(3, |_, _| r.random_range(-1.0..1.0));
        if dual_contains(&m.spec.state_cone, &a, &tol).unwrap() {
            for v in &points {
                ensure(cone_contains(&m.spec.state_cone, v, &tol).unwrap(), || "combination left the cone".into())?;
                ensure(a.dot(v) >= -tol.eps, || format!("dual vector {a} negative on {v}"))?;
            }
        }
    }
    Ok(())
}

pub fn square_extremality(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    let mut pts: Vec<DVector<f64>> = [(0, 0), (1, 1), (0, 1), (1, 0)].iter().map(|&(a, b)| vertex(a, b).l).collect();
    for _ in 0..20 {
        let w: Vec<f64> = (0..4).map(|_| r.random::<f64>() + 0.05).collect();
        let s: f64 = w.iter().sum();
        let p = pts[..4].iter().zip(&w).fold(DVector::zeros(3), |acc, (v, wi)| acc + v * (wi / s));
        pts.push(p);
    }
    let marked: Vec<usize> =
        (0..pts.len()).filter(|&k| is_extremal_in_hull(&pts, &pts[k], &tol).unwrap()).collect();
    ensure(marked == vec![0, 1, 2, 3], || format!("extremal points {marked:?}"))
}

pub fn finite_minimum(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    let m = two_box();
    let BipartiteFamily::Finite(list) = &m.extremal_bipartite else { unreachable!() };
    let mats: Vec<DMatrix<f64>> = list.iter().map(|b| b.psi.psi.clone()).collect();
    for _ in 0..20 {
        let f = DMatrix::from_fn(3, 3, |_, _| r.random_range(-1.0..1.0));
        let got = minimize_bilinear(&f, &Family::Finite(&mats), &tol).unwrap();
        let mut best = f64::INFINITY;
        for p in &mats {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += f[(i, j)] * p[(i, j)];
                }
            }
            best = best.min(s);
        }
        ensure((got.value - best).abs() < 1e-12, || format!("{} vs {best}", got.value))?;
    }
    Ok(())
}

pub fn round_trip(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for m in all_models() {
        let phi = phi(&m);
        for _ in 0..100 {
            let t = random_transform(&m, &mut r);
            let back = transform_from_bipartite(&bipartite_from_transform(&t, &phi).unwrap(), &phi).unwrap();
            ensure((back.a - &t.a).amax() < 1e-9, || format!("{}: round trip drifted", m.name()))?;
        }
    }
    Ok(())
}

pub fn last_row_law(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    for m in all_models() {
        for _ in 0..50 {
            let t = random_transform(&m, &mut r);
            ensure(m.spec.is_valid_effect(&t.effect(&m.spec), &tol).unwrap(), || {
                format!("{}: effect of a transformation is invalid", m.name())
            })?;
        }
    }
    Ok(())
}

pub fn apply_probability(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    for m in all_models() {
        for _ in 0..50 {
            let t = random_transform(&m, &mut r);
            let w = m.sample_mixed_state(&mut r, &tol);
            let out = apply(&t, &w).unwrap();
            let p = probability(&t, &w, &m.spec).unwrap();
            ensure((m.spec.det_effect.dot(&out.l) - p).abs() <= 1e-15, || format!("{}: {p}", m.name()))?;
            if m.spec.det_effect == DVector::from_fn(m.dim(), |k, _| if k + 1 == m.dim() { 1.0 } else { 0.0 }) {
                ensure(out.l[m.dim() - 1] == p, || "last component differs from probability".into())?;
            }
        }
    }
    Ok(())
}

fn in_automorphisms(m: &ModelBundle, t: &TransformMat) -> bool {
    match &m.automorphisms {
        Automorphisms::Finite(list) => list.iter().any(|d| (&d.a - &t.a).amax() < 1e-9),
        Automorphisms::Orthogonal { n, special } => {
            let n = *n;
            let x = t.a.view((0, 0), (n, n)).clone_owned();
            (gptaudit::groups::embed(&x) - &t.a).amax() < 1e-9
                && gptaudit::groups::is_orthogonal(&x, 1e-9)
                && (!special || x.determinant() > 0.0)
        }
    }
}

pub fn transposition(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for m in all_models() {
        if m.kind.name() == "classical" {
            // the faithful state of the simplex is a multiple of the identity
            ensure(m.faithful.as_ref().is_some_and(|f| !f.pure), || "classical faithful state".into())?;
        }
        let phi = phi(&m);
        for d in m.automorphism_samples(24, seed) {
            let t = transpose_transform(&d, &phi).unwrap();
            ensure(in_automorphisms(&m, &t), || format!("{}: transpose left the group", m.name()))?;
            let tt = transpose_transform(&t, &phi).unwrap();
            ensure((tt.a - &d.a).amax() < 1e-9, || format!("{}: transpose is not an involution", m.name()))?;
        }
        let t = random_transform(&m, &mut r);
        let tt = transpose_transform(&transpose_transform(&t, &phi).unwrap(), &phi).unwrap();
        ensure((tt.a - &t.a).amax() < 1e-9, || format!("{}: involution fails", m.name()))?;
    }
    Ok(())
}

pub fn chaotic_fixed_point(seed: u64) -> Result<(), String> {
    for m in all_models() {
        let chi = chaotic_state(&phi(&m), &m.spec);
        for d in m.automorphism_samples(24, seed) {
            let img = apply(&d, &chi).unwrap();
            ensure((img.l - &chi.l).amax() < 1e-9, || format!("{}: chaotic state moved", m.name()))?;
        }
    }
    Ok(())
}

pub fn faithful_marginals(_seed: u64) -> Result<(), String> {
    for m in all_models() {
        let phi = phi(&m);
        let chi = chaotic_state(&phi, &m.spec);
        let left = marginal(&phi, &m.spec, Side::Left);
        let right = marginal(&phi, &m.spec, Side::Right);
        ensure((&left.l - &chi.l).amax() < 1e-12 && (&right.l - &chi.l).amax() < 1e-12, || {
            format!("{}: marginals differ", m.name())
        })?;
    }
    Ok(())
}

pub fn two_box_group_closure(_seed: u64) -> Result<(), String> {
    let m = two_box();
    let Automorphisms::Finite(ds) = &m.automorphisms else { unreachable!() };
    ensure(ds.len() == 8, || "expected eight automorphisms".into())?;
    for a in ds {
        for b in ds {
            let c = a.compose(b);
            ensure(ds.iter().any(|d| (&d.a - &c.a).amax() < 1e-12), || "product outside the D-set".into())?;
        }
    }
    Ok(())
}

pub fn disk_positivity(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let m = clock();
    let mut r = rng(seed);
    let pure: Vec<DVector<f64>> = (0..720)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 720.0;
            DVector::from_column_slice(&[a.cos(), a.sin(), 1.0])
        })
        .collect();
    for _ in 0..50 {
        let t = random_transform(&m, &mut r);
        ensure(m.positivity_violation(&t.a, &pure, &tol).is_none(), || "family member is not positive".into())?;
    }
    Ok(())
}

pub fn rebit_round_trip(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for _ in 0..10_000 {
        let v = DVector::from_fn(3, |_, _| r.random_range(-2.0..2.0));
        ensure((upsilon_inv(&upsilon(&v)) - &v).amax() < 1e-12, || format!("round trip fails at {v}"))?;
    }
    Ok(())
}

pub fn classical_vertices(_seed: u64) -> Result<(), String> {
    for n in 1..=3 {
        let m = classical(n).unwrap();
        let Automorphisms::Finite(ds) = &m.automorphisms else { unreachable!() };
        for d in ds {
            let mut hit = vec![false; n + 1];
            for w in &m.pure_states {
                let img = apply(d, w).unwrap();
                let k = m.pure_states.iter().position(|p| p.l == img.l).ok_or("vertex mapped off the simplex")?;
                hit[k] = true;
            }
            ensure(hit.iter().all(|&h| h), || "permutation is not onto the vertices".into())?;
        }
    }
    Ok(())
}

pub fn faithe_faithful_change(_seed: u64) -> Result<(), String> {
    let base = two_box();
    let phi0 = phi(&base);
    let inv0 = phi0.psi.clone().try_inverse().unwrap();
    let BipartiteFamily::Finite(list) = &base.extremal_bipartite else { unreachable!() };
    let cfg = AuditConfig::default();
    for k in 0..8 {
        let mut m = base.clone();
        m.faithful = Some(Faithful { phi: list[k].psi.clone(), pure: true });
        let r = audit_faithe(&m, &cfg);
        ensure(r.status == Status::Fails, || format!("{}: FAITHE does not fail", list[k].label))?;
        ensure(r.value.is_some_and(|v| (v + 1.0).abs() < 1e-9), || format!("{}: value {:?}", list[k].label, r.value))?;
        // Phi_k = (I ⊗ D) Phi_0, so D^{-1} on the left side maps the witness back
        let d = transform_from_bipartite(&list[k].psi, &phi0).unwrap();
        let d_inv = TransformMat { a: d.a.clone().try_inverse().unwrap() };
        let w = r.witness.as_ref().unwrap().to_matrix();
        let back = bip_apply(&d_inv, &BipartiteMat { psi: w }, Side::Left).unwrap();
        ensure(list.iter().any(|b| (&b.psi.psi - &back.psi).amax() < 1e-9), || "mapped witness is not extremal".into())?;
        ensure((frobenius(&inv0, &back.psi) + 1.0).abs() < 1e-9, || "mapped witness value differs".into())?;
    }
    Ok(())
}

pub fn teleport_algebra(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    for _ in 0..20 {
        let mut m = two_box();
        let b = DMatrix::from_fn(3, 3, |_, _| r.random_range(-1.0..1.0));
        let sym = &b + b.transpose() + DMatrix::identity(3, 3) * 4.0;
        let Some(inv) = sym.clone().try_inverse() else { continue };
        m.faithful = Some(Faithful { phi: BipartiteMat { psi: sym }, pure: false });
        let alpha = r.random_range(0.1..1.0);
        let out = teleport_check(&m, &(inv * alpha), &tol).unwrap();
        ensure(out.residual <= 1e-12, || format!("residual {}", out.residual))?;
        ensure(out.alpha.is_some_and(|a| (a - alpha).abs() < 1e-12), || "alpha not recovered".into())?;
    }
    Ok(())
}

pub fn chsh_covariance(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    for m in [two_box(), clock(), spin_factor(3, Group::SO).unwrap()] {
        for d in m.automorphism_samples(8, seed) {
            let psi = random_bipartite(&m, &mut r);
            let s = random_setting(&m, &mut r);
            let before = chsh_value(&psi, &s, &m.spec, &tol).unwrap();
            let moved = bip_apply(&d, &psi, Side::Right).unwrap();
            // Bob's effects pulled back through the inverse automorphism
            let back = d.a.clone().try_inverse().unwrap().transpose();
            let pull = |p: &(EffectVec, EffectVec)| {
                (EffectVec { lambda: &back * &p.0.lambda }, EffectVec { lambda: &back * &p.1.lambda })
            };
            let s2 = ChshSetting { alice: s.alice.clone(), bob: [pull(&s.bob[0]), pull(&s.bob[1])] };
            let after = chsh_value(&moved, &s2, &m.spec, &tol).unwrap();
            ensure((before - after).abs() < 1e-9, || format!("{}: {before} vs {after}", m.name()))?;
        }
    }
    Ok(())
}

pub fn chsh_no_signaling(seed: u64) -> Result<(), String> {
    let tol = Tolerance::default();
    let mut r = rng(seed);
    for m in all_models() {
        for _ in 0..100 {
            let psi = random_bipartite(&m, &mut r);
            let s = random_setting(&m, &mut r);
            let v = chsh_value(&psi, &s, &m.spec, &tol).unwrap();
            ensure(v.abs() <= 4.0 + tol.eps, || format!("{}: S = {v}", m.name()))?;
        }
    }
    Ok(())
}

pub fn disk_purification(seed: u64) -> Result<(), String> {
    let cfg = AuditConfig { seed, purify_samples: 100, ..AuditConfig::default() };
    let r = audit_purify(&clock(), &cfg);
    ensure(r.status == Status::Holds, || format!("{:?}", r.notes))?;
    ensure(r.details["max_residual"] <= 1e-9, || format!("residual {}", r.details["max_residual"]))
}

/// Direct contraction with the trace-minimizing group element.
pub fn parity_witness_value(n: usize, special: bool) -> f64 {
    let mut x = -DMatrix::<f64>::identity(n, n);
    if special && n % 2 == 1 {
        x[(n - 1, n - 1)] = 1.0;
    }
    let psi = gptaudit::groups::embed(&x);
    frobenius(&DMatrix::identity(n + 1, n + 1), &psi)
}

pub fn spin_factor_parity(seed: u64) -> Result<(), String> {
    let cfg = AuditConfig { seed, search_samples: 1000, ..AuditConfig::default() };
    for n in [2, 4, 5, 6] {
        let r = audit_faithe(&spin_factor(n, Group::SO).unwrap(), &cfg);
        let delta = if n % 2 == 1 { 2.0 } else { 0.0 };
        let expected = -(n as f64 - 1.0) + delta;
        ensure((parity_witness_value(n, true) - expected).abs() < 1e-12, || "contraction oracle".into())?;
        ensure(r.status == Status::Fails, || format!("n = {n}: FAITHE holds"))?;
        ensure(r.value.is_some_and(|v| (v - expected).abs() < 1e-9), || format!("n = {n}: {:?}", r.value))?;
    }
    Ok(())
}
