//! Seeded generators for random systems.
//!
//! All draws go through `ChaCha8Rng::seed_from_u64`, so a `(kind, n, seed)`
//! triple always produces the same system on every platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::discrete::DiscreteJoint;
use crate::error::{Error, Result};
use crate::gaussian::GaussianSystem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric Dirichlet draw with concentration `alpha` over `len` cells.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, len: usize, alpha: f64) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha must be positive");
    loop {
        let draws: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 && total.is_finite() {
            return draws.into_iter().map(|g| g / total).collect();
        }
    }
}

/// Dirichlet(1, ..., 1) joint table, i.e. uniform on the simplex.
pub fn random_discrete(n: usize, seed: u64) -> Result<DiscreteJoint> {
    random_discrete_with(n, seed, 1.0)
}

/// Dirichlet(alpha) joint table. Small `alpha` gives near-deterministic tables.
pub fn random_discrete_with(n: usize, seed: u64, alpha: f64) -> Result<DiscreteJoint> {
    if n == 0 || n > crate::discrete::MAX_ELEMENTS {
        return Err(Error::UnsupportedSize(n));
    }
    let mut rng = rng(seed);
    DiscreteJoint::from_weights(n, dirichlet(&mut rng, 1 << (2 * n), alpha))
}

fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let factor = DMatrix::from_fn(n, n, |_, _| -> f64 { StandardNormal.sample(rng) });
    let mut m = &factor * factor.transpose() / n as f64;
    for i in 0..n {
        m[(i, i)] += 1e-3;
    }
    (&m + m.transpose()) * 0.5
}

pub(crate) fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Random Gaussian AR system: SPD covariances from a normal factor times its
/// transpose plus a 1e-3 ridge, and a connectivity matrix with entries
/// uniform on [-1, 1] rescaled to spectral radius 0.9.
pub fn random_gaussian(n: usize, seed: u64) -> Result<GaussianSystem> {
    if n == 0 {
        return Err(Error::UnsupportedSize(n));
    }
    let mut rng = rng(seed);
    let sigma_x = random_spd(&mut rng, n);
    let sigma_e = random_spd(&mut rng, n);
    let mut a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
    let radius = spectral_radius(&a);
    if radius > 0.0 {
        a *= 0.9 / radius;
    }
    GaussianSystem::new(sigma_x, a, sigma_e)
}
