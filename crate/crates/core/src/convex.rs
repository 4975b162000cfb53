//! Cone membership, duality, extremality, and minimization of bilinear forms.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{GptError, Result};
use crate::lp::nonnegative_solution;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    /// Nonnegative orthant of the given dimension.
    Orthant(usize),
    /// `x_1^2 + ... + x_{d-1}^2 <= x_d^2` with `x_d >= 0`.
    Lorentz(usize),
    /// Conic hull of finitely many generators.
    PolyV(Vec<DVector<f64>>),
}

impl ConeSpec {
    pub fn polyv(generators: Vec<DVector<f64>>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| GptError::Input("a V-cone needs at least one generator".into()))?;
        let d = first.len();
        if d == 0 {
            return Err(GptError::Input("cone dimension must be at least 1".into()));
        }
        for g in &generators {
            if g.len() != d {
                return Err(GptError::dim("cone generator", d, g.len()));
            }
            if g.iter().any(|x| !x.is_finite()) || g.amax() == 0.0 {
                return Err(GptError::Input("cone generators must be finite and nonzero".into()));
            }
        }
        Ok(ConeSpec::PolyV(generators))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Orthant(d) | ConeSpec::Lorentz(d) => *d,
            ConeSpec::PolyV(g) => g.first().map_or(0, |v| v.len()),
        }
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(GptError::dim("cone vector", self.dim(), v.len()));
        }
        Ok(())
    }

    fn generator_matrix(gens: &[DVector<f64>]) -> DMatrix<f64> {
        DMatrix::from_columns(gens)
    }
}

pub fn cone_contains(cone: &ConeSpec, v: &DVector<f64>, tol: &Tolerance) -> Result<bool> {
    cone.check_dim(v)?;
    let eps = tol.eps;
    Ok(match cone {
        ConeSpec::Orthant(_) => v.iter().all(|&x| x >= -eps),
        ConeSpec::Lorentz(d) => {
            let z = v[d - 1];
            let r = v.rows(0, d - 1).norm();
            z >= -eps && r <= z + eps
        }
        ConeSpec::PolyV(gens) => {
            let a = ConeSpec::generator_matrix(gens);
            nonnegative_solution(&a, v, eps.max(1e-12)).is_some()
        }
    })
}

pub fn dual_contains(cone: &ConeSpec, a: &DVector<f64>, tol: &Tolerance) -> Result<bool> {
    cone.check_dim(a)?;
    match cone {
        ConeSpec::Orthant(_) | ConeSpec::Lorentz(_) => cone_contains(cone, a, tol),
        ConeSpec::PolyV(gens) => Ok(gens.iter().all(|g| a.dot(g) >= -tol.eps)),
    }
}

/// Whether `v` spans an extremal ray of the cone. For the Lorentz cone the
/// boundary is accepted within an `eps` band on `|x|^2 - z^2`.
pub fn is_extremal_ray(cone: &ConeSpec, v: &DVector<f64>, tol: &Tolerance) -> Result<bool> {
    cone.check_dim(v)?;
    if v.amax() <= tol.eps || !cone_contains(cone, v, tol)? {
        return Ok(false);
    }
    Ok(match cone {
        ConeSpec::Orthant(_) => v.iter().filter(|&&x| x > tol.eps).count() == 1,
        ConeSpec::Lorentz(d) => {
            let z = v[d - 1];
            let r2 = v.rows(0, d - 1).norm_squared();
            (r2 - z * z).abs() <= tol.eps.max(1e-12) * (1.0 + z * z)
        }
        ConeSpec::PolyV(gens) => {
            let unit = v / v.norm();
            let others: Vec<DVector<f64>> = gens
                .iter()
                .filter(|g| (*g / g.norm() - &unit).amax() > 1e-9)
                .cloned()
                .collect();
            if others.is_empty() {
                true
            } else {
                let a = ConeSpec::generator_matrix(&others);
                nonnegative_solution(&a, v, tol.eps.max(1e-12)).is_none()
            }
        }
    })
}

/// Convex weights expressing `v` through `points`, if any.
pub fn convex_weights(points: &[DVector<f64>], v: &DVector<f64>, tol: &Tolerance) -> Option<DVector<f64>> {
    if points.is_empty() {
        return None;
    }
    let d = v.len();
    let mut a = DMatrix::<f64>::zeros(d + 1, points.len());
    for (j, p) in points.iter().enumerate() {
        if p.len() != d {
            return None;
        }
        a.view_mut((0, j), (d, 1)).copy_from(p);
        a[(d, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(d + 1);
    b.rows_mut(0, d).copy_from(v);
    b[d] = 1.0;
    nonnegative_solution(&a, &b, tol.eps.max(1e-12))
}

/// True iff `v` is not a convex combination of the points distinct from it.
pub fn is_extremal_in_hull(points: &[DVector<f64>], v: &DVector<f64>, tol: &Tolerance) -> Result<bool> {
    if let Some(p) = points.iter().find(|p| p.len() != v.len()) {
        return Err(GptError::dim("hull point", v.len(), p.len()));
    }
    if convex_weights(points, v, tol).is_none() {
        return Err(GptError::Input("point is not in the convex hull".into()));
    }
    let others: Vec<DVector<f64>> = points
        .iter()
        .filter(|p| (*p - v).amax() > tol.eps.max(1e-12))
        .cloned()
        .collect();
    Ok(convex_weights(&others, v, tol).is_none())
}

/// Nonnegative coefficients expressing a matrix as a conic combination of generators.
pub fn conic_decomposition(gens: &[DMatrix<f64>], m: &DMatrix<f64>, tol: &Tolerance) -> Option<DVector<f64>> {
    if gens.is_empty() {
        return None;
    }
    let cols: Vec<DVector<f64>> = gens
        .iter()
        .map(|g| DVector::from_column_slice(g.as_slice()))
        .collect();
    let a = DMatrix::from_columns(&cols);
    let b = DVector::from_column_slice(m.as_slice());
    nonnegative_solution(&a, &b, tol.eps.max(1e-12))
}

pub fn frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// A closed parameter interval sampled on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    /// When set, `hi` is identified with `lo` and is not sampled twice.
    pub periodic: bool,
}

impl Axis {
    pub fn value(&self, k: usize) -> f64 {
        self.lo + self.step() * k as f64
    }

    pub fn step(&self) -> f64 {
        let span = self.hi - self.lo;
        if self.periodic || self.samples < 2 {
            span / self.samples.max(1) as f64
        } else {
            span / (self.samples - 1) as f64
        }
    }
}

/// A family of bipartite matrices indexed by a discrete branch and real parameters.
pub trait ParametricFamily: Sync {
    fn branches(&self) -> usize;
    fn axes(&self) -> Vec<Axis>;
    /// Smallest pairing with `f` over the members at this branch and parameter point,
    /// possibly after an exact inner minimization, with the minimizing member.
    fn pairing_min(&self, f: &DMatrix<f64>, branch: usize, params: &[f64]) -> (f64, DMatrix<f64>);
    /// Explicit members worth testing besides the grid.
    fn extra_candidates(&self) -> Vec<DMatrix<f64>> {
        Vec::new()
    }
}

pub enum Family<'a> {
    Finite(&'a [DMatrix<f64>]),
    Parametric(&'a dyn ParametricFamily),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearMin {
    pub value: f64,
    pub witness: DMatrix<f64>,
    /// Index in a finite family, or the branch of a parametric one.
    pub index: usize,
    pub params: Vec<f64>,
}

pub fn minimize_bilinear(f: &DMatrix<f64>, family: &Family<'_>, tol: &Tolerance) -> Result<BilinearMin> {
    match family {
        Family::Finite(members) => {
            if members.is_empty() {
                return Err(GptError::Input("cannot minimize over an empty family".into()));
            }
            let mut best: Option<BilinearMin> = None;
            for (i, m) in members.iter().enumerate() {
                if m.shape() != f.shape() {
                    return Err(GptError::Input(format!(
                        "family member {i} has shape {:?}, form has {:?}",
                        m.shape(),
                        f.shape()
                    )));
                }
                let v = frobenius(f, m);
                if best.as_ref().is_none_or(|b| v < b.value) {
                    best = Some(BilinearMin { value: v, witness: m.clone(), index: i, params: vec![] });
                }
            }
            Ok(best.expect("nonempty"))
        }
        Family::Parametric(fam) => grid_minimize(f, *fam, tol),
    }
}

fn grid_minimize(f: &DMatrix<f64>, fam: &dyn ParametricFamily, _tol: &Tolerance) -> Result<BilinearMin> {
    let axes = fam.axes();
    let branches = fam.branches();
    let per_branch: usize = axes.iter().map(|a| a.samples.max(1)).product();
    let total = branches * per_branch;
    if total == 0 {
        return Err(GptError::Input("cannot minimize over an empty family".into()));
    }

    let point = |flat: usize| -> (usize, Vec<f64>) {
        let branch = flat / per_branch;
        let mut rest = flat % per_branch;
        let mut params = vec![0.0; axes.len()];
        for (i, ax) in axes.iter().enumerate().rev() {
            let n = ax.samples.max(1);
            params[i] = ax.value(rest % n);
            rest /= n;
        }
        (branch, params)
    };

    let (best_flat, _) = (0..total)
        .into_par_iter()
        .map(|flat| {
            let (b, p) = point(flat);
            (flat, fam.pairing_min(f, b, &p).0)
        })
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |x, y| match x.1.partial_cmp(&y.1) {
                Some(std::cmp::Ordering::Less) => x,
                Some(std::cmp::Ordering::Greater) => y,
                _ => {
                    if x.0 <= y.0 {
                        x
                    } else {
                        y
                    }
                }
            },
        );
    if best_flat == usize::MAX {
        return Err(GptError::Numerical("bilinear form is not finite on the family".into()));
    }

    let (branch, mut params) = point(best_flat);
    let (mut value, mut witness) = fam.pairing_min(f, branch, &params);

    // one golden-section pass per axis around the grid optimum
    for (i, ax) in axes.iter().enumerate() {
        let h = ax.step();
        let (mut lo, mut hi) = (params[i] - h, params[i] + h);
        if !ax.periodic {
            lo = lo.max(ax.lo.min(ax.hi));
            hi = hi.min(ax.hi.max(ax.lo));
        }
        let eval = |t: f64| {
            let mut p = params.clone();
            p[i] = t;
            fam.pairing_min(f, branch, &p).0
        };
        let t = golden_section(eval, lo, hi, 80);
        let mut p = params.clone();
        p[i] = t;
        let (v, w) = fam.pairing_min(f, branch, &p);
        if v < value {
            value = v;
            witness = w;
            params = p;
        }
    }

    let mut best = BilinearMin { value, witness, index: branch, params };
    for c in fam.extra_candidates() {
        let v = frobenius(f, &c);
        if v < best.value {
            best = BilinearMin { value: v, witness: c, index: usize::MAX, params: vec![] };
        }
    }
    Ok(best)
}

/// Minimizer of a unimodal function on `[lo, hi]`, endpoints included.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    [lo, hi, mid]
        .into_iter()
        .map(|t| (t, f(t)))
        .fold((mid, f64::INFINITY), |acc, (t, v)| if v < acc.1 { (t, v) } else { acc })
        .0
}
