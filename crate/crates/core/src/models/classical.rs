//! Classical theories: the probability simplex with `n + 1` outcomes.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Automorphisms, BipartiteFamily, Faithful, LabeledBipartite, ModelBundle, ModelKind, StateBody, TransformFamily};
use crate::convex::ConeSpec;
use crate::error::{GptError, Result};
use crate::groups::{permutation_matrix, permutations};
use crate::kernel::{BipartiteMat, EffectVec, StateVec, SystemSpec, TransformMat};

/// Largest `n` for which all `(n + 1)!` permutations are enumerated.
const ENUMERATE_UP_TO: usize = 5;

pub fn unit(d: usize, k: usize) -> DVector<f64> {
    let mut v = DVector::zeros(d);
    v[k] = 1.0;
    v
}

/// The single-entry map "measure outcome `j`, prepare vertex `i`".
pub fn elementary(d: usize, i: usize, j: usize) -> TransformMat {
    TransformMat { a: unit(d, i) * unit(d, j).transpose() }
}

pub fn classical(n: usize) -> Result<ModelBundle> {
    if !(1..=8).contains(&n) {
        return Err(GptError::Input(format!("classical needs 1 <= n <= 8, got {n}")));
    }
    let d = n + 1;
    let spec = SystemSpec::new(ConeSpec::Orthant(d), ConeSpec::Orthant(d), DVector::from_element(d, 1.0))
        .expect("orthant spec");
    let pure_states: Vec<StateVec> = (0..d).map(|k| StateVec::normalized(unit(d, k))).collect();
    let extremal_effects: Vec<EffectVec> = (0..1usize << d)
        .map(|mask| EffectVec { lambda: DVector::from_fn(d, |k, _| ((mask >> k) & 1) as f64) })
        .collect();

    let perms = if n <= ENUMERATE_UP_TO {
        permutations(d)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9E57 ^ n as u64);
        let mut out = vec![(0..d).collect::<Vec<_>>()];
        for _ in 0..720 {
            let mut p: Vec<usize> = (0..d).collect();
            p.shuffle(&mut rng);
            out.push(p);
        }
        out
    };
    let automorphisms = perms.iter().map(|p| TransformMat { a: permutation_matrix(p) }).collect();

    let mut transforms = Vec::new();
    let mut bipartite = Vec::new();
    for i in 0..d {
        for j in 0..d {
            transforms.push(elementary(d, i, j));
            bipartite.push(LabeledBipartite {
                label: format!("w{i}*w{j}"),
                psi: BipartiteMat { psi: unit(d, i) * unit(d, j).transpose() },
            });
        }
    }

    Ok(ModelBundle {
        kind: ModelKind::Classical { n },
        spec,
        pure_states,
        extremal_effects,
        faithful: Some(Faithful { phi: BipartiteMat { psi: DMatrix::identity(d, d) / d as f64 }, pure: false }),
        automorphisms: Automorphisms::Finite(automorphisms),
        extremal_transforms: TransformFamily::Finite(transforms),
        extremal_bipartite: BipartiteFamily::Finite(bipartite),
        body: StateBody::Simplex { n },
        ghost_pairs: Vec::new(),
        ghosts_identified: false,
        teleport_effect: None,
    })
}
