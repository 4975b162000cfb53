//! Pure bipartite states and extremal maps of the disk and ball theories.
//!
//! Every member has the form `diag(X,1) A(g) diag(V,1)^T / g` with `X`, `V`
//! orthogonal and `A(g)` the contraction that squeezes the ball onto a
//! boundary point as `g` goes from 1 down to 1/2.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::{frobenius, Axis, ParametricFamily};
use crate::groups::{embed, procrustes_max, random_orthogonal, reflection2, rotation2};
use crate::tolerance::Tolerance;

/// `A(g)` of size `n + 1`; the first coordinate is the squeezing axis.
pub fn a_gamma(n: usize, g: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a[(0, 0)] = g;
    a[(0, n)] = 1.0 - g;
    a[(n, 0)] = 1.0 - g;
    a[(n, n)] = g;
    let s = (2.0 * g - 1.0).max(0.0).sqrt();
    for k in 1..n {
        a[(k, k)] = s;
    }
    a
}

pub fn member(x: &DMatrix<f64>, v: &DMatrix<f64>, g: f64) -> DMatrix<f64> {
    embed(x) * a_gamma(x.nrows(), g) * embed(v).transpose() / g
}

/// Group elements with the most negative trace: the full reversal when it lies in
/// the group, otherwise the reversal of all but one axis.
pub fn group_witnesses(n: usize, special: bool) -> Vec<DMatrix<f64>> {
    let mut rev = -DMatrix::<f64>::identity(n, n);
    if special && n % 2 == 1 {
        rev[(n - 1, n - 1)] = 1.0;
    }
    vec![rev]
}

#[derive(Debug, Clone)]
pub struct EllipticFamily {
    pub n: usize,
    pub special: bool,
    pub grid_angle: usize,
    pub grid_gamma: usize,
    /// Right factors used when the ball has dimension three or more.
    right_factors: Vec<DMatrix<f64>>,
}

impl EllipticFamily {
    pub fn new(n: usize, special: bool) -> Self {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ n as u64);
        let mut right_factors = vec![DMatrix::identity(n, n)];
        if n >= 3 {
            right_factors.extend(group_witnesses(n, special));
            for _ in 0..30 {
                right_factors.push(random_orthogonal(n, special, &mut rng));
            }
        }
        EllipticFamily { n, special, grid_angle: tol.grid_angle, grid_gamma: tol.grid_gamma, right_factors }
    }

    pub fn with_grids(&self, tol: &Tolerance) -> Self {
        EllipticFamily { grid_angle: tol.grid_angle, grid_gamma: tol.grid_gamma, ..self.clone() }
    }

    fn right_factor(&self, branch: usize, params: &[f64]) -> DMatrix<f64> {
        if self.n == 2 {
            if branch == 0 {
                rotation2(params[0])
            } else {
                reflection2(params[0] / 2.0)
            }
        } else {
            self.right_factors[branch].clone()
        }
    }

    fn gamma(&self, params: &[f64]) -> f64 {
        params[params.len() - 1].clamp(0.5, 1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let x = random_orthogonal(self.n, self.special, rng);
        let v = random_orthogonal(self.n, self.special, rng);
        let g = rng.random_range(0.5..=1.0);
        member(&x, &v, g)
    }
}

impl ParametricFamily for EllipticFamily {
    fn branches(&self) -> usize {
        if self.n == 2 {
            if self.special {
                1
            } else {
                2
            }
        } else {
            self.right_factors.len()
        }
    }

    fn axes(&self) -> Vec<Axis> {
        let gamma = Axis { lo: 0.5, hi: 1.0, samples: self.grid_gamma, periodic: false };
        if self.n == 2 {
            vec![Axis { lo: 0.0, hi: TAU, samples: self.grid_angle, periodic: true }, gamma]
        } else {
            vec![gamma]
        }
    }

    /// Exact minimum over the left factor: with `M = A V^T / g` and `G = F M^T`,
    /// `<F, diag(X,1) M> = <X, G_spatial> + G_last`, an orthogonal Procrustes problem.
    fn pairing_min(&self, f: &DMatrix<f64>, branch: usize, params: &[f64]) -> (f64, DMatrix<f64>) {
        let n = self.n;
        let g = self.gamma(params);
        let v = self.right_factor(branch, params);
        let m = a_gamma(n, g) * embed(&v).transpose() / g;
        let gm = f * m.transpose();
        let h = -gm.view((0, 0), (n, n)).clone_owned();
        let (best, x) = procrustes_max(&h, self.special);
        let witness = embed(&x) * &m;
        let value = -best + gm[(n, n)];
        debug_assert!((frobenius(f, &witness) - value).abs() < 1e-8);
        (value, witness)
    }

    fn extra_candidates(&self) -> Vec<DMatrix<f64>> {
        group_witnesses(self.n, self.special).iter().map(embed).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{minimize_bilinear, Family};

    #[test]
    fn contraction_endpoints() {
        assert_eq!(a_gamma(2, 1.0), DMatrix::identity(3, 3));
        let half = a_gamma(2, 0.5);
        assert_eq!(half.row(2).iter().copied().collect::<Vec<_>>(), vec![0.5, 0.0, 0.5]);
        assert_eq!(half.row(1).amax(), 0.0);
    }

    #[test]
    fn members_map_the_sphere_onto_the_cone_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..6 {
            let fam = EllipticFamily::new(n, false);
            for _ in 0..50 {
                let m = fam.sample(&mut rng);
                let u = crate::groups::random_unit(n, &mut rng);
                let mut l = nalgebra::DVector::zeros(n + 1);
                l.rows_mut(0, n).copy_from(&u);
                l[n] = 1.0;
                let img = m.transpose() * l;
                assert!((img.rows(0, n).norm() - img[n]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_form_minimum_on_the_disk() {
        let fam = EllipticFamily::new(2, false);
        let f = DMatrix::identity(3, 3);
        let got = minimize_bilinear(&f, &Family::Parametric(&fam), &Tolerance::default()).unwrap();
        assert!((got.value + 1.0).abs() < 1e-12);
        let r_pi = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[-1., -1., 1.]));
        assert!((got.witness - r_pi).amax() < 1e-12);
    }

    #[test]
    fn inner_minimum_beats_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 3, 4] {
            for special in [false, true] {
                let fam = EllipticFamily::new(n, special);
                let f = DMatrix::<f64>::from_fn(n + 1, n + 1, |_, _| rng.random::<f64>() - 0.5);
                let params = if n == 2 { vec![0.3, 0.8] } else { vec![0.8] };
                let (best, _) = fam.pairing_min(&f, 0, &params);
                let v = fam.right_factor(0, &params);
                for _ in 0..500 {
                    let x = random_orthogonal(n, special, &mut rng);
                    assert!(frobenius(&f, &member(&x, &v, 0.8)) >= best - 1e-12);
                }
            }
        }
    }
}
