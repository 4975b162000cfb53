//! Theories whose state body is a Euclidean ball, with O(n) or SO(n) symmetry.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::lorentz::EllipticFamily;
use super::{Automorphisms, BipartiteFamily, Faithful, Group, ModelBundle, ModelKind, StateBody, TransformFamily};
use crate::convex::ConeSpec;
use crate::error::{GptError, Result};
use crate::groups::random_unit;
use crate::kernel::{BipartiteMat, EffectVec, StateVec, SystemSpec};
use crate::tolerance::Tolerance;

/// Pure states on the sphere: a uniform circle for the disk, a seeded sample otherwise.
fn sphere_points(n: usize, count: usize) -> Vec<DVector<f64>> {
    if n == 2 {
        return (0..count)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / count as f64;
                DVector::from_column_slice(&[phi.cos(), phi.sin()])
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xBA11 ^ n as u64);
    (0..count).map(|_| random_unit(n, &mut rng)).collect()
}

pub(crate) fn ball_model(kind: ModelKind, n: usize, special: bool) -> ModelBundle {
    let d = n + 1;
    let spec = SystemSpec::canonical(ConeSpec::Lorentz(d), ConeSpec::Lorentz(d)).expect("Lorentz spec");
    let count = if n == 2 { Tolerance::default().grid_angle } else { 256 };
    let points = sphere_points(n, count);
    let lift = |u: &DVector<f64>, s: f64| {
        let mut l = DVector::zeros(d);
        l.rows_mut(0, n).copy_from(&(u * s));
        l[n] = s;
        l
    };
    let pure_states = points.iter().map(|u| StateVec::normalized(lift(u, 1.0))).collect();
    let mut extremal_effects = vec![EffectVec { lambda: DVector::zeros(d) }, spec.det()];
    extremal_effects.extend(points.iter().map(|u| EffectVec { lambda: lift(u, 0.5) }));

    let family = EllipticFamily::new(n, special);
    ModelBundle {
        kind,
        spec,
        pure_states,
        extremal_effects,
        faithful: Some(Faithful { phi: BipartiteMat { psi: nalgebra::DMatrix::identity(d, d) }, pure: true }),
        automorphisms: Automorphisms::Orthogonal { n, special },
        extremal_transforms: TransformFamily::Elliptic(family.clone()),
        extremal_bipartite: BipartiteFamily::Elliptic(family),
        body: StateBody::Ball { n },
        ghost_pairs: Vec::new(),
        ghosts_identified: false,
        teleport_effect: None,
    }
}

pub fn spin_factor(n: usize, group: Group) -> Result<ModelBundle> {
    if !(2..=8).contains(&n) {
        return Err(GptError::Input(format!("spin-factor needs 2 <= n <= 8, got {n}")));
    }
    Ok(ball_model(ModelKind::SpinFactor { n, group }, n, group.special()))
}
