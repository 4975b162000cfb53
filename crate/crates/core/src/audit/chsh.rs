//! CHSH correlations of bipartite states under dichotomic measurements.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{AuditConfig, AuditResult, Postulate, Status, Witness};
use crate::convex::golden_section;
use crate::error::{GptError, Result};
use crate::kernel::{BipartiteMat, EffectVec, SystemSpec};
use crate::models::lorentz::a_gamma;
use crate::models::{BipartiteFamily, ModelBundle};
use crate::tolerance::Tolerance;

/// Two dichotomic measurements per party; each pair is `(outcome 0, outcome 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSetting {
    pub alice: [(EffectVec, EffectVec); 2],
    pub bob: [(EffectVec, EffectVec); 2],
}

impl ChshSetting {
    /// Setting built from the outcome-0 effects, completing each pair with `e - a`.
    pub fn from_outcomes(alice: [&EffectVec; 2], bob: [&EffectVec; 2], spec: &SystemSpec) -> Self {
        let e = spec.det().lambda;
        let pair = |a: &EffectVec| (a.clone(), EffectVec { lambda: &e - &a.lambda });
        ChshSetting { alice: [pair(alice[0]), pair(alice[1])], bob: [pair(bob[0]), pair(bob[1])] }
    }
}

fn check_pair(p: &(EffectVec, EffectVec), spec: &SystemSpec, tol: &Tolerance) -> Result<()> {
    for a in [&p.0, &p.1] {
        if a.lambda.len() != spec.dim {
            return Err(GptError::dim("effect", spec.dim, a.lambda.len()));
        }
        if !spec.is_valid_effect(a, tol)? {
            return Err(GptError::Input("setting contains an invalid effect".into()));
        }
    }
    if (&p.0.lambda + &p.1.lambda - &spec.det_effect).amax() > tol.eps {
        return Err(GptError::Input("dichotomic pair does not sum to the deterministic effect".into()));
    }
    Ok(())
}

pub fn chsh_value(psi: &BipartiteMat, s: &ChshSetting, spec: &SystemSpec, tol: &Tolerance) -> Result<f64> {
    if psi.dim() != spec.dim {
        return Err(GptError::dim("bipartite state", spec.dim, psi.dim()));
    }
    for p in s.alice.iter().chain(s.bob.iter()) {
        check_pair(p, spec, tol)?;
    }
    let corr = |x: usize, y: usize| {
        let a = [&s.alice[x].0.lambda, &s.alice[x].1.lambda];
        let b = [&s.bob[y].0.lambda, &s.bob[y].1.lambda];
        let mut e = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let sign = if i == j { 1.0 } else { -1.0 };
                e += sign * (a[i].transpose() * &psi.psi * b[j])[(0, 0)];
            }
        }
        e
    };
    Ok(corr(0, 0) + corr(0, 1) + corr(1, 0) - corr(1, 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshOptimum {
    pub value: f64,
    pub psi: BipartiteMat,
    pub label: String,
    pub setting: ChshSetting,
}

pub fn chsh_optimum(m: &ModelBundle, tol: &Tolerance) -> Result<ChshOptimum> {
    match &m.extremal_bipartite {
        BipartiteFamily::Finite(list) => {
            let states: Vec<(String, DMatrix<f64>)> = list.iter().map(|b| (b.label.clone(), b.psi.psi.clone())).collect();
            enumerate(m, &states, tol)
        }
        BipartiteFamily::Elliptic(fam) => ball_optimum(m, fam.n, tol),
    }
}

/// Exhaustive search over extremal states and pairs of extremal effects. For a fixed
/// Alice setting the best Bob setting splits into two independent maximizations.
fn enumerate(m: &ModelBundle, states: &[(String, DMatrix<f64>)], tol: &Tolerance) -> Result<ChshOptimum> {
    let e = &m.spec.det_effect;
    let effects: Vec<&EffectVec> = m.extremal_effects.iter().collect();
    let obs: Vec<DVector<f64>> = effects.iter().map(|a| &a.lambda * 2.0 - e).collect();
    let k = obs.len();
    let best = states
        .par_iter()
        .enumerate()
        .map(|(si, (_, psi))| {
            let c = DMatrix::from_fn(k, k, |i, j| (obs[i].transpose() * psi * &obs[j])[(0, 0)]);
            let mut best = (f64::NEG_INFINITY, si, [0usize; 4]);
            for i0 in 0..k {
                for i1 in 0..k {
                    let (mut p, mut q) = ((f64::NEG_INFINITY, 0), (f64::NEG_INFINITY, 0));
                    for j in 0..k {
                        let plus = c[(i0, j)] + c[(i1, j)];
                        let minus = c[(i0, j)] - c[(i1, j)];
                        if plus > p.0 {
                            p = (plus, j);
                        }
                        if minus > q.0 {
                            q = (minus, j);
                        }
                    }
                    if p.0 + q.0 > best.0 + 1e-15 {
                        best = (p.0 + q.0, si, [i0, i1, p.1, q.1]);
                    }
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX, [0; 4]), |a, b| {
            if b.0 > a.0 + 1e-15 || (b.0 >= a.0 - 1e-15 && b.1 < a.1) {
                b
            } else {
                a
            }
        });
    let (_, si, [i0, i1, j0, j1]) = best;
    let setting = ChshSetting::from_outcomes([effects[i0], effects[i1]], [effects[j0], effects[j1]], &m.spec);
    let psi = BipartiteMat { psi: states[si].1.clone() };
    let value = chsh_value(&psi, &setting, &m.spec, tol)?;
    Ok(ChshOptimum { value, psi, label: states[si].0.clone(), setting })
}

fn unit_effect(n: usize, angle: f64) -> EffectVec {
    let mut l = DVector::zeros(n + 1);
    l[0] = 0.5 * angle.cos();
    l[1] = 0.5 * angle.sin();
    l[n] = 0.5;
    EffectVec { lambda: l }
}

/// Every pure bipartite state of a ball model is a local automorphism applied to
/// `A(g)/g`, and automorphisms can be absorbed into the effects. Bob measures at
/// `+-d/2` in the plane of the first two axes; Alice's best response is closed form.
fn ball_optimum(m: &ModelBundle, n: usize, tol: &Tolerance) -> Result<ChshOptimum> {
    let score = |d: f64, g: f64| -> f64 {
        let g = g.clamp(0.5, 1.0);
        let t = (2.0 * g - 1.0).max(0.0).sqrt() / g;
        let v0 = [(d / 2.0).cos(), t * (d / 2.0).sin()];
        let v1 = [(d / 2.0).cos(), -t * (d / 2.0).sin()];
        let plus = ((v0[0] + v1[0]).powi(2) + (v0[1] + v1[1]).powi(2)).sqrt();
        let minus = ((v0[0] - v1[0]).powi(2) + (v0[1] - v1[1]).powi(2)).sqrt();
        plus + minus
    };
    let step = 2.0 * PI / tol.grid_angle as f64;
    let nd = (PI / step).floor() as usize + 1;
    let ng = tol.grid_gamma.max(2);
    let (_, mut d, mut g) = (0..nd * ng)
        .into_par_iter()
        .map(|k| {
            let d = (k / ng) as f64 * step;
            let g = 0.5 + 0.5 * (k % ng) as f64 / (ng - 1) as f64;
            (score(d, g), d, g)
        })
        .reduce(|| (f64::NEG_INFINITY, 0.0, 1.0), |a, b| if b.0 > a.0 { b } else { a });
    d = golden_section(|x| -score(x, g), (d - step).max(0.0), (d + step).min(PI), 80);
    let gstep = 0.5 / (ng - 1) as f64;
    g = golden_section(|x| -score(d, x), (g - gstep).max(0.5), (g + gstep).min(1.0), 80);
    // the grid endpoints may beat an interior refinement
    for cand in [1.0, 0.5] {
        if score(d, cand) > score(d, g) {
            g = cand;
        }
    }

    let psi = BipartiteMat { psi: a_gamma(n, g) / g };
    let ob = |a: f64| {
        let mut v = DVector::zeros(n + 1);
        v[0] = a.cos();
        v[1] = a.sin();
        v
    };
    let v0 = &psi.psi * ob(d / 2.0);
    let v1 = &psi.psi * ob(-d / 2.0);
    let angle = |v: DVector<f64>| v[1].atan2(v[0]);
    let (u0, u1) = (angle(&v0 + &v1), angle(&v0 - &v1));
    let setting = ChshSetting::from_outcomes(
        [&unit_effect(n, u0), &unit_effect(n, u1)],
        [&unit_effect(n, d / 2.0), &unit_effect(n, -d / 2.0)],
        &m.spec,
    );
    let value = chsh_value(&psi, &setting, &m.spec, tol)?;
    Ok(ChshOptimum { value, psi, label: format!("A(g)/g, g = {g:.6}, bob angle {d:.6}"), setting })
}

pub fn chsh_max(m: &ModelBundle, cfg: &AuditConfig) -> AuditResult {
    let opt = match chsh_optimum(m, &cfg.tol) {
        Ok(o) => o,
        Err(e) => return AuditResult::inconclusive(Postulate::Chsh, &e),
    };
    let status = if opt.value > 2.0 + cfg.tol.eps { Status::Fails } else { Status::Holds };
    let mut r = AuditResult::new(Postulate::Chsh, status)
        .with_value(opt.value)
        .with_witness(Witness::matrix("bipartite", Some(opt.label.clone()), &opt.psi.psi))
        .detail("local_bound", 2.0)
        .detail("tsirelson_bound", 2.0 * SQRT_2)
        .detail("no_signaling_bound", 4.0);
    r = r.note(if status == Status::Fails {
        format!("CHSH maximum {:.6} exceeds the local bound 2", opt.value)
    } else {
        format!("CHSH maximum {:.6} within the local bound 2", opt.value)
    });
    r
}
