//! Closed-form work averages for the two measurement protocols, assuming a
//! periodic drive (same Hamiltonian at both ends).
//!
//! Each closed form has an independent oracle elsewhere in the crate: the
//! phase-protocol averages must reproduce the moments of the quasi-probability
//! atom list, the pointer-protocol averages must reproduce trapezoidal
//! quadrature over the pointer density, and the Gaussian overlap integrals
//! must reproduce adaptive quadrature.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{HermitianOperator, StateKind, SystemState, UnitaryOperator};
use crate::protocols::GaussianPointer;
use crate::states::{l1_coherence, thermal_state};

/// ln of the largest finite f64; exponentials past this overflow.
const LN_F64_MAX: f64 = 709.782712893384;

/// Bundle of work averages with the classical/quantum split of the mean.
///
/// `je_deviation` is `exp_work` minus its coherence-free reference: 1 for
/// the phase protocol, `e^{β²σ²/(2λ²)}` for the pointer protocol.
#[derive(Debug, Clone, Copy)]
pub struct WorkAverages {
    pub exp_work: f64,
    pub mean_work: f64,
    pub classical_part: f64,
    pub quantum_part: f64,
    pub je_deviation: f64,
}

impl WorkAverages {
    pub fn mean_from_split(&self) -> f64 {
        self.classical_part + self.quantum_part
    }
}

/// Exponentiated work average of the pointer protocol, kept in log space
/// alongside the linear value because the prefactor grows like
/// `e^{β²σ²/(2λ²)}`.
#[derive(Debug, Clone, Copy)]
pub struct ExpWork {
    pub value: f64,
    pub ln_value: f64,
}

/// Which moment of the Gaussian overlap integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMoment {
    /// `∫ dW λ e^{-βW} φ̃_σ(λ(ε_ji - W)) φ̃_σ(λ(ε_jk - W))`
    Zeroth,
    /// Same integrand weighted by `W`, at β = 0.
    First,
}

/// Closed form of the Gaussian overlap integral behind the pointer-protocol
/// averages.
///
/// The cross factor is `e^{-λ²ε_ik²/(8σ²)}` with ε_ik **squared**; the
/// adaptive-quadrature oracle confirms the squared form.
pub fn gaussian_tilted_overlap(
    eps_ji: f64,
    eps_jk: f64,
    pointer: &GaussianPointer,
    beta: f64,
    moment: OverlapMoment,
) -> f64 {
    let midpoint = 0.5 * (eps_ji + eps_jk);
    let split = eps_ji - eps_jk; // = ε_k - ε_i = -ε_ik; enters squared
    let ratio = pointer.lambda / pointer.sigma;
    let damp = (-0.125 * split * split * ratio * ratio).exp();
    match moment {
        OverlapMoment::Zeroth => {
            damp * (-beta * midpoint).exp() * (0.5 * beta * beta / (ratio * ratio)).exp()
        }
        OverlapMoment::First => midpoint * damp,
    }
}

struct Reduced {
    /// Initial state in the energy eigenbasis.
    rho: DMatrix<Complex64>,
    /// Drive elements between energy bases (periodic drive: same basis).
    v: DMatrix<Complex64>,
    eps: Vec<f64>,
}

fn reduce(
    state: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
) -> Result<Reduced> {
    Ok(Reduced {
        rho: state.in_energy_basis(h0)?,
        v: v.energy_basis_elements(h0, h0)?,
        eps: h0.eigenvalues().to_vec(),
    })
}

impl Reduced {
    fn dim(&self) -> usize {
        self.eps.len()
    }

    /// `(V† e^{-βH} V)_{ki}` in the energy eigenbasis.
    fn gibbs_sandwich(&self, beta: f64) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            for i in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    acc += self.v[(j, k)].conj() * self.v[(j, i)] * (-beta * self.eps[j]).exp();
                }
                m[(k, i)] = acc;
            }
        }
        m
    }

    /// `Σ_ik ρ_ik e^{β(ε_i+ε_k)/2} damp(i,k) (V† e^{-βH} V)_{ki}` - the
    /// resummed exponentiated average, with an optional per-pair damping.
    fn exp_sum(&self, beta: f64, damp: impl Fn(usize, usize) -> f64) -> f64 {
        let g = self.gibbs_sandwich(beta);
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                let tilt = (0.5 * beta * (self.eps[i] + self.eps[k])).exp();
                acc += self.rho[(i, k)] * g[(k, i)] * (tilt * damp(i, k));
            }
        }
        acc.re
    }

    /// Mean-work split: classical part from populations, quantum part from
    /// coherences with an optional per-pair damping.
    fn mean_split(&self, damp: impl Fn(usize, usize) -> f64) -> (f64, f64) {
        let d = self.dim();
        let mut classical = 0.0;
        for i in 0..d {
            let p = self.rho[(i, i)].re;
            for j in 0..d {
                classical += p * (self.eps[j] - self.eps[i]) * self.v[(j, i)].norm_sqr();
            }
        }
        let mut quantum = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                if i == k {
                    continue;
                }
                let mid = 0.5 * (self.eps[i] + self.eps[k]);
                let mut inner = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    inner += self.v[(j, k)].conj() * self.v[(j, i)] * (self.eps[j] - mid);
                }
                quantum += self.rho[(i, k)] * inner * damp(i, k);
            }
        }
        (classical, quantum.re)
    }
}

/// Exponentiated work average of the phase protocol.
///
/// For a thermal state this is 1 (the Jarzynski equality); for a
/// coherent-Gibbs state it is `1 + Σ_{i≠k} <ε̄_k| ρ_eq |ε̄_i>` with
/// `|ε̄_i> = e^{iφ_i} V |ε_i>`. Must reproduce `Σ w e^{-βW}` over the
/// quasi-probability atoms.
pub fn avg_exp_work_p1(
    state: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    beta: f64,
) -> Result<f64> {
    let red = reduce(state, v, h0)?;
    Ok(match state.kind() {
        StateKind::CoherentPure => 1.0 + coherent_offdiag_sum(&red, state, beta, |_, _| 1.0),
        _ => red.exp_sum(beta, |_, _| 1.0),
    })
}

/// `Σ_{i≠k} e^{i(φ_i-φ_k)} (V† ρ_eq V)_{ki} damp(i,k)` for a coherent-Gibbs
/// state, using the stored phases instead of the state's matrix elements.
fn coherent_offdiag_sum(
    red: &Reduced,
    state: &SystemState,
    beta: f64,
    damp: impl Fn(usize, usize) -> f64,
) -> f64 {
    let phases = state.phases().expect("coherent state carries phases");
    let z: f64 = red.eps.iter().map(|&e| (-beta * e).exp()).sum();
    let g = red.gibbs_sandwich(beta);
    let d = red.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            if i == k {
                continue;
            }
            let phase = Complex64::from_polar(1.0, phases[i] - phases[k]);
            acc += phase * g[(k, i)] * (damp(i, k) / z);
        }
    }
    acc.re
}

/// Deviation from the Jarzynski equality and its l1-coherence bound,
/// `|<e^{-βW}> - 1| ≤ C_l1(ρ_eq)` in the evolved basis `{e^{iφ_k} V |ε_k>}`.
pub fn je_deviation_bound(
    state: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    beta: f64,
) -> Result<(f64, f64)> {
    let deviation = (avg_exp_work_p1(state, v, h0, beta)? - 1.0).abs();
    let d = h0.dim();
    let mut basis = v.inner() * h0.eigenvectors();
    if let Some(phases) = state.phases() {
        for k in 0..d {
            let phase = Complex64::from_polar(1.0, phases[k]);
            for r in 0..d {
                basis[(r, k)] *= phase;
            }
        }
    }
    let rho_eq = thermal_state(h0, beta);
    let bound = l1_coherence(&rho_eq, &basis)?;
    Ok((deviation, bound))
}

/// Mean work of the phase protocol, split into the classical (population)
/// part - nonnegative for Gibbs populations - and the quantum (coherence)
/// part. Must reproduce the first moment of the quasi-probability atoms.
///
/// The state must carry its inverse temperature (thermal or coherent-Gibbs)
/// so the exponentiated average can be bundled alongside.
///
/// No Jensen-type lower bound on the mean is provided: the distribution is
/// a quasi-probability, and negative weights break the convexity argument
/// that would turn `<e^{-βW}>` into a bound on `<W>`.
pub fn avg_work_p1(
    state: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
) -> Result<WorkAverages> {
    let beta = state.beta().ok_or(Error::BetaRequired)?;
    let red = reduce(state, v, h0)?;
    let (classical_part, quantum_part) = red.mean_split(|_, _| 1.0);
    let (exp_work, je_deviation) = match state.kind() {
        StateKind::CoherentPure => {
            let dev = coherent_offdiag_sum(&red, state, beta, |_, _| 1.0);
            (1.0 + dev, dev)
        }
        _ => {
            let e = red.exp_sum(beta, |_, _| 1.0);
            (e, e - 1.0)
        }
    };
    Ok(WorkAverages {
        exp_work,
        mean_work: classical_part + quantum_part,
        classical_part,
        quantum_part,
        je_deviation,
    })
}

fn pair_damp<'a>(eps: &'a [f64], pointer: &GaussianPointer) -> impl Fn(usize, usize) -> f64 + 'a {
    let ratio_sq = (pointer.lambda / pointer.sigma).powi(2);
    move |i: usize, k: usize| {
        let gap = eps[i] - eps[k];
        (-0.125 * gap * gap * ratio_sq).exp()
    }
}

/// Exponentiated work average of the pointer protocol,
/// `e^{β²σ²/(2λ²)} (1 + Σ_{i≠k} <ε̄_k|ρ_eq|ε̄_i> e^{-λ²ε_ik²/(8σ²)})` for a
/// coherent-Gibbs state; for a thermal state the bracket is 1. Must
/// reproduce `∫ dx P_σ(x) e^{βx/λ}` by quadrature.
///
/// Errors with [`Error::Overflow`] when the linear value exceeds the f64
/// range; the log value is always finite in that regime and is reported in
/// the error.
pub fn avg_exp_work_p2(
    state: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    pointer: &GaussianPointer,
    beta: f64,
) -> Result<ExpWork> {
    let red = reduce(state, v, h0)?;
    let damp = pair_damp(&red.eps, pointer);
    let bracket = match state.kind() {
        StateKind::CoherentPure => 1.0 + coherent_offdiag_sum(&red, state, beta, &damp),
        _ => red.exp_sum(beta, &damp),
    };
    debug_assert!(bracket > 0.0, "pointer exp-average bracket must be positive");
    let ln_prefactor = 0.5 * (beta * pointer.sigma / pointer.lambda).powi(2);
    let ln_value = ln_prefactor + bracket.ln();
    if ln_value > LN_F64_MAX {
        return Err(Error::Overflow { ln_value });
    }
    Ok(ExpWork {
        value: ln_value.exp(),
        ln_value,
    })
}

/// Mean work of the pointer protocol: the σ-independent classical part plus
/// the coherence part suppressed by `e^{-λ²ε_ik²/(8σ²)}`. Must reproduce
/// `-(1/λ) ∫ x P_σ(x) dx` by quadrature.
///
/// The mean is finite for any pointer width, so unlike
/// [`avg_exp_work_p2`] this does not error when the bundled exponentiated
/// average exceeds the f64 range; `exp_work` and `je_deviation` saturate
/// to infinity there instead.
pub fn avg_work_p2(
    state: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    pointer: &GaussianPointer,
) -> Result<WorkAverages> {
    let beta = state.beta().ok_or(Error::BetaRequired)?;
    let red = reduce(state, v, h0)?;
    let damp = pair_damp(&red.eps, pointer);
    let (classical_part, quantum_part) = red.mean_split(&damp);
    let ln_prefactor = 0.5 * (beta * pointer.sigma / pointer.lambda).powi(2);
    let bracket_minus_one = match state.kind() {
        StateKind::CoherentPure => coherent_offdiag_sum(&red, state, beta, &damp),
        _ => red.exp_sum(beta, &damp) - 1.0,
    };
    let prefactor = ln_prefactor.exp(); // may be +inf
    let exp_work = prefactor * (1.0 + bracket_minus_one);
    let je_deviation = if bracket_minus_one == 0.0 {
        0.0
    } else {
        prefactor * bracket_minus_one
    };
    Ok(WorkAverages {
        exp_work,
        mean_work: classical_part + quantum_part,
        classical_part,
        quantum_part,
        je_deviation,
    })
}
