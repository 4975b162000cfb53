//! Constructors for the five toy theories and the bundle type they share.

pub mod classical;
pub mod clock;
pub mod lorentz;
pub mod rebit;
pub mod spin_factor;
pub mod two_box;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::cone_contains;
use crate::error::{GptError, Result};
use crate::groups::{embed, random_orthogonal, random_unit, reflection2, rotation2};
use crate::kernel::{apply, BipartiteMat, EffectVec, StateVec, SystemSpec, TransformMat};
use crate::tolerance::Tolerance;

pub use classical::classical;
pub use clock::clock;
pub use lorentz::{a_gamma, EllipticFamily};
pub use rebit::{rebit, GhostPair, Kraus};
pub use spin_factor::spin_factor;
pub use two_box::{joint_table_to_bipartite, two_box, JointTable};

pub const MODEL_NAMES: [&str; 5] = ["two-box", "clock", "rebit", "spin-factor", "classical"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    O,
    SO,
}

impl Group {
    pub fn special(self) -> bool {
        self == Group::SO
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::O => "O",
            Group::SO => "SO",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TwoBox,
    Clock,
    Rebit,
    SpinFactor { n: usize, group: Group },
    Classical { n: usize },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::TwoBox => "two-box",
            ModelKind::Clock => "clock",
            ModelKind::Rebit => "rebit",
            ModelKind::SpinFactor { .. } => "spin-factor",
            ModelKind::Classical { .. } => "classical",
        }
    }

    pub fn n(&self) -> Option<usize> {
        match self {
            ModelKind::SpinFactor { n, .. } | ModelKind::Classical { n } => Some(*n),
            _ => None,
        }
    }

    pub fn group(&self) -> Option<Group> {
        match self {
            ModelKind::SpinFactor { group, .. } => Some(*group),
            _ => None,
        }
    }
}

/// Builds a model by its command-line name.
pub fn build(name: &str, n: Option<usize>, group: Option<Group>) -> Result<ModelBundle> {
    match name {
        "two-box" => Ok(two_box()),
        "clock" => Ok(clock()),
        "rebit" => Ok(rebit()),
        "spin-factor" => spin_factor(n.unwrap_or(3), group.unwrap_or(Group::SO)),
        "classical" => classical(n.unwrap_or(2)),
        other => Err(GptError::Input(format!(
            "unknown model '{other}'; valid models: {}",
            MODEL_NAMES.join(", ")
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledBipartite {
    pub label: String,
    pub psi: BipartiteMat,
}

#[derive(Debug, Clone)]
pub enum BipartiteFamily {
    Finite(Vec<LabeledBipartite>),
    Elliptic(EllipticFamily),
}

#[derive(Debug, Clone)]
pub enum Automorphisms {
    Finite(Vec<TransformMat>),
    /// `diag(X, 1)` for `X` in O(n), or SO(n) when `special`.
    Orthogonal { n: usize, special: bool },
}

#[derive(Debug, Clone)]
pub enum TransformFamily {
    Finite(Vec<TransformMat>),
    Elliptic(EllipticFamily),
}

/// Where mixed states are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum StateBody {
    /// Polytope in canonical coordinates; spatial bounding box `[lo, hi]^n`.
    Polytope { lo: f64, hi: f64 },
    Ball { n: usize },
    /// Probability simplex with `n + 1` vertices.
    Simplex { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Faithful {
    pub phi: BipartiteMat,
    pub pure: bool,
}

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub kind: ModelKind,
    pub spec: SystemSpec,
    /// All pure states for polytopes; a dense sample of the sphere otherwise.
    pub pure_states: Vec<StateVec>,
    pub extremal_effects: Vec<EffectVec>,
    pub faithful: Option<Faithful>,
    pub automorphisms: Automorphisms,
    /// Extremal transformations that are not automorphisms.
    pub extremal_transforms: TransformFamily,
    pub extremal_bipartite: BipartiteFamily,
    pub body: StateBody,
    pub ghost_pairs: Vec<GhostPair>,
    /// Set once locally indistinguishable transformations have been identified.
    pub ghosts_identified: bool,
    /// Candidate teleportation effect exposed by the model, if any.
    pub teleport_effect: Option<BipartiteMat>,
}

impl ModelBundle {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// The same model with locally indistinguishable transformations merged.
    pub fn identify_ghosts(mut self) -> Self {
        self.ghost_pairs.clear();
        self.ghosts_identified = true;
        self
    }

    /// Extremal states against which positivity of a map is checked.
    pub fn boundary_states(&self, tol: &Tolerance, seed: u64) -> Vec<DVector<f64>> {
        match self.body {
            StateBody::Ball { n: 2 } => (0..tol.grid_angle)
                .map(|k| {
                    let phi = std::f64::consts::TAU * k as f64 / tol.grid_angle as f64;
                    DVector::from_column_slice(&[phi.cos(), phi.sin(), 1.0])
                })
                .collect(),
            StateBody::Ball { n } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut out = Vec::new();
                for k in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = DVector::zeros(n + 1);
                        v[k] = s;
                        v[n] = 1.0;
                        out.push(v);
                    }
                }
                for _ in 0..tol.grid_angle {
                    let u = random_unit(n, &mut rng);
                    let mut v = DVector::zeros(n + 1);
                    v.rows_mut(0, n).copy_from(&u);
                    v[n] = 1.0;
                    out.push(v);
                }
                out
            }
            _ => self.pure_states.iter().map(|s| s.l.clone()).collect(),
        }
    }

    /// Index of the first boundary state sent outside the state cone, if any.
    pub fn positivity_violation(&self, a: &DMatrix<f64>, boundary: &[DVector<f64>], tol: &Tolerance) -> Option<usize> {
        boundary.iter().position(|l| {
            let img = a * l;
            !cone_contains(&self.spec.state_cone, &img, tol).unwrap_or(false)
        })
    }

    /// Automorphisms to test against: all of them when finite, otherwise
    /// a grid or seeded sample together with the explicit group witnesses.
    pub fn automorphism_samples(&self, count: usize, seed: u64) -> Vec<TransformMat> {
        match &self.automorphisms {
            Automorphisms::Finite(list) => list.clone(),
            Automorphisms::Orthogonal { n, special } => {
                let mut out = Vec::new();
                if *n == 2 {
                    for k in 0..count {
                        let phi = std::f64::consts::TAU * k as f64 / count as f64;
                        out.push(TransformMat { a: embed(&rotation2(phi)) });
                        if !special {
                            out.push(TransformMat { a: embed(&reflection2(phi / 2.0)) });
                        }
                    }
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..count {
                        out.push(TransformMat { a: embed(&random_orthogonal(*n, *special, &mut rng)) });
                    }
                }
                out.extend(lorentz::group_witnesses(*n, *special).into_iter().map(|x| TransformMat { a: embed(&x) }));
                out
            }
        }
    }

    /// Bipartite extremal states: the whole list, or a seeded sample of the family.
    pub fn bipartite_samples(&self, count: usize, seed: u64) -> Vec<BipartiteMat> {
        match &self.extremal_bipartite {
            BipartiteFamily::Finite(list) => list.iter().map(|b| b.psi.clone()).collect(),
            BipartiteFamily::Elliptic(fam) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count).map(|_| BipartiteMat { psi: fam.sample(&mut rng) }).collect()
            }
        }
    }

    /// Uniform sample from the state body by rejection from a bounding box.
    pub fn sample_mixed_state<R: Rng + ?Sized>(&self, rng: &mut R, tol: &Tolerance) -> StateVec {
        let d = self.dim();
        loop {
            let mut l = DVector::zeros(d);
            match self.body {
                StateBody::Polytope { lo, hi } => {
                    for k in 0..d - 1 {
                        l[k] = rng.random_range(lo..hi);
                    }
                    l[d - 1] = 1.0;
                }
                StateBody::Ball { n } => {
                    for k in 0..n {
                        l[k] = rng.random_range(-1.0..1.0);
                    }
                    l[n] = 1.0;
                }
                StateBody::Simplex { n } => {
                    for k in 0..n {
                        l[k] = rng.random_range(0.0..1.0);
                    }
                    l[n] = 1.0 - l.rows(0, n).sum();
                }
            }
            if cone_contains(&self.spec.state_cone, &l, tol).unwrap_or(false) {
                return StateVec::normalized(l);
            }
        }
    }

    /// Checks the bundle invariants: pure states valid and extremal, automorphisms
    /// permuting the pure states, faithful state symmetric and invertible.
    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        for (k, w) in self.pure_states.iter().enumerate() {
            if !self.spec.is_valid_state(w, tol)? {
                return Err(GptError::Numerical(format!("{}: pure state {k} is invalid", self.name())));
            }
        }
        if let StateBody::Polytope { .. } | StateBody::Simplex { .. } = self.body {
            let pts: Vec<DVector<f64>> = self.pure_states.iter().map(|s| s.l.clone()).collect();
            for (k, p) in pts.iter().enumerate() {
                if !crate::convex::is_extremal_in_hull(&pts, p, tol)? {
                    return Err(GptError::Numerical(format!("{}: pure state {k} is not extremal", self.name())));
                }
            }
        }
        for a in &self.extremal_effects {
            if !self.spec.is_valid_effect(a, tol)? {
                return Err(GptError::Numerical(format!("{}: invalid extremal effect", self.name())));
            }
        }
        let eps = tol.eps.max(1e-12) * 10.0;
        for d in self.automorphism_samples(16, 1) {
            for w in &self.pure_states {
                let img = apply(&d, w)?;
                let hit = match self.body {
                    StateBody::Ball { n } => {
                        (img.l.rows(0, n).norm() - 1.0).abs() <= eps && (img.l[n] - 1.0).abs() <= eps
                    }
                    _ => self.pure_states.iter().any(|p| (&p.l - &img.l).amax() <= eps),
                };
                if !hit {
                    return Err(GptError::Numerical(format!(
                        "{}: automorphism does not preserve the pure states",
                        self.name()
                    )));
                }
            }
        }
        if let Some(f) = &self.faithful {
            if !f.phi.is_symmetric(tol) {
                return Err(GptError::Numerical(format!("{}: faithful state is not symmetric", self.name())));
            }
            crate::kernel::faithful_inverse(&f.phi)?;
        }
        Ok(())
    }
}
