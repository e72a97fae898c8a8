//! Seeded random inputs for self-checks and tests: Haar-random unitaries,
//! random Hermitian observables, phases and density matrices.
//!
//! Everything is driven by an explicit RNG so that runs are reproducible
//! bit-for-bit from a seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qlinalg::{spectral_decompose, ComplexMatrix, HermitianOperator, SystemState, UnitaryOperator};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed random unitary via QR of a Ginibre matrix with the
/// standard diagonal phase fix.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> UnitaryOperator {
    let a = ginibre(dim, rng);
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rj = r[(j, j)];
        let phase = if rj.norm() > 0.0 {
            rj / rj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    UnitaryOperator::new(ComplexMatrix::new(q).expect("finite entries"))
        .expect("QR of Ginibre is unitary")
}

/// Random Hermitian operator `(A + A^H)/2` with entries of the given scale.
pub fn random_hermitian(dim: usize, scale: f64, rng: &mut impl Rng) -> HermitianOperator {
    let a = ginibre(dim, rng) * Complex64::new(scale * 0.5, 0.0);
    let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    spectral_decompose(&ComplexMatrix::new(h).expect("finite entries"))
        .expect("symmetrized matrix is Hermitian")
}

/// Uniform phases in `[0, 2π)`.
pub fn random_phases(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..dim)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect()
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(lo: f64, hi: f64, rng: &mut impl Rng) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random full-rank mixed state `G G^H / tr(G G^H)`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> SystemState {
    let g = ginibre(dim, rng);
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    let rho = p * Complex64::new(1.0 / tr, 0.0);
    SystemState::from_density_matrix(ComplexMatrix::new(rho).expect("finite entries"))
        .expect("normalized Gram matrix is a density matrix")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_deterministic_per_seed() {
        let u1 = haar_unitary(3, &mut seeded_rng(42));
        let u2 = haar_unitary(3, &mut seeded_rng(42));
        assert_eq!(u1.inner(), u2.inner());
    }

    #[test]
    fn random_density_is_valid() {
        let rho = random_density(4, &mut seeded_rng(5));
        assert_eq!(rho.dim(), 4);
    }
}
