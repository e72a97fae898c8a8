//! Initial states of the driven system: the Gibbs thermal state, the pure
//! coherent-Gibbs state with Boltzmann populations and arbitrary relative
//! phases, and the l1 coherence measure.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{
    check_dims, max_norm_diff, ComplexMatrix, HermitianOperator, SystemState, ORTHONORMALITY_TOL,
};

/// Partition function `Z = Σ_k e^{-β ε_k}`.
pub fn partition_function(h: &HermitianOperator, beta: f64) -> f64 {
    h.eigenvalues().iter().map(|&e| (-beta * e).exp()).sum()
}

/// Boltzmann populations `e^{-β ε_k} / Z`, computed with the spectrum shifted
/// by its minimum so large β cannot overflow.
fn gibbs_populations(h: &HermitianOperator, beta: f64) -> Vec<f64> {
    let e_min = h.eigenvalues().first().copied().unwrap_or(0.0);
    let weights: Vec<f64> = h
        .eigenvalues()
        .iter()
        .map(|&e| (-beta * (e - e_min)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// The Gibbs state `e^{-βH}/Z`, diagonal in the energy basis of `h`.
pub fn thermal_state(h: &HermitianOperator, beta: f64) -> SystemState {
    let p = gibbs_populations(h, beta);
    let w = h.eigenvectors();
    let mut scaled = w.clone();
    for i in 0..h.dim() {
        for r in 0..h.dim() {
            scaled[(r, i)] *= Complex64::new(p[i], 0.0);
        }
    }
    let density = ComplexMatrix::new(scaled * w.adjoint()).expect("finite entries");
    SystemState::new_thermal(density, beta).expect("Gibbs state is a density matrix")
}

/// The pure state `|Ψ> = Z^{-1/2} Σ_k e^{iφ_k} e^{-βε_k/2} |ε_k>`.
///
/// Its energy-basis diagonal matches the thermal state at the same β, so the
/// two are energetically indistinguishable; only the phases differ. Requires
/// a non-degenerate spectrum, since the phase assignment is basis-ambiguous
/// otherwise.
pub fn coherent_gibbs_state(
    h: &HermitianOperator,
    beta: f64,
    phases: &[f64],
) -> Result<SystemState> {
    check_dims(&[h.dim(), phases.len()])?;
    if h.is_degenerate() {
        return Err(Error::DegenerateBasis {
            context: "coherent-Gibbs state needs a distinguished eigenbasis",
        });
    }
    let p = gibbs_populations(h, beta);
    let amps = DVector::from_iterator(
        h.dim(),
        phases
            .iter()
            .zip(p.iter())
            .map(|(&phi, &pk)| Complex64::from_polar(pk.sqrt(), phi)),
    );
    let psi = h.eigenvectors() * amps;
    let density = ComplexMatrix::new(&psi * psi.adjoint()).expect("finite entries");
    SystemState::new_coherent_pure(density, phases.to_vec(), beta)
}

/// l1-norm of coherence `Σ_{k≠i} |<b_k| ρ |b_i>|` with respect to an
/// orthonormal basis given as matrix columns.
pub fn l1_coherence(rho: &SystemState, basis: &DMatrix<Complex64>) -> Result<f64> {
    check_dims(&[rho.dim(), basis.nrows(), basis.ncols()])?;
    let gram = basis.adjoint() * basis;
    let defect = max_norm_diff(&gram, &DMatrix::identity(basis.ncols(), basis.ncols()));
    if defect > ORTHONORMALITY_TOL {
        return Err(Error::BasisNotOrthonormal { defect });
    }
    let m = basis.adjoint() * rho.density().inner() * basis;
    let mut sum = 0.0;
    for k in 0..m.nrows() {
        for i in 0..m.ncols() {
            if k != i {
                sum += m[(k, i)].norm();
            }
        }
    }
    Ok(sum)
}
