//! The three work distributions for a unitarily driven system.
//!
//! * `tpm_distribution` - two-projective-measurement baseline; the first
//!   measurement destroys initial energy-basis coherences, so only the
//!   populations of the initial state enter.
//! * `fcs_quasi_distribution` - the phase (full-counting-statistics)
//!   protocol. Off-diagonal terms of the initial state contribute atoms at
//!   half-gap work values `ε_j - (ε_i + ε_k)/2` whose weights may be
//!   negative: the result is a normalized quasi-probability.
//! * `pointer_distribution` - the Gaussian-pointer position protocol. A
//!   genuine (nonnegative) density over pointer position, with work read
//!   out through the calibration `w = -(x - x0)/λ`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{
    check_dims, matrix_function, HermitianOperator, SystemState, UnitaryOperator, DEGENERACY_GAP,
};

/// Work atoms within `merge_tol` of each other coalesce; the factor applies
/// to the combined spectral range of the two Hamiltonians.
pub const MERGE_TOL_FACTOR: f64 = 1e-9;
/// Merged atoms whose weight magnitude falls below this are dropped. Keeps
/// transitions with exactly zero amplitude (and roundoff ghosts of absent
/// coherences) out of the atom list.
pub const WEIGHT_FLOOR: f64 = 1e-14;
/// Largest imaginary residue a merged atom may carry.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;
/// Total weight must match 1 to this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Trapezoidal normalization tolerance for pointer densities.
pub const POINTER_NORM_TOL: f64 = 1e-6;
/// Estimated probability mass allowed outside the pointer grid.
pub const OUTSIDE_MASS_TOL: f64 = 1e-8;
/// Pointer densities may undershoot zero by this much.
pub const DENSITY_FLOOR: f64 = -1e-12;

/// A single `(work value, weight)` atom. Weights may be negative for the
/// quasi-probability protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkAtom {
    pub work: f64,
    pub weight: f64,
}

/// Finite list of work atoms, ascending in work value, with total weight 1.
#[derive(Debug, Clone)]
pub struct WorkAtomDistribution {
    atoms: Vec<WorkAtom>,
    merge_tol: f64,
}

impl WorkAtomDistribution {
    /// Validates and wraps an explicit atom list.
    pub fn new(atoms: Vec<WorkAtom>, merge_tol: f64) -> Result<Self> {
        for pair in atoms.windows(2) {
            if pair[1].work - pair[0].work <= merge_tol {
                return Err(Error::InvalidDensity {
                    reason: format!(
                        "atoms at {} and {} are not ascending with spacing > {merge_tol:e}",
                        pair[0].work, pair[1].work
                    ),
                });
            }
        }
        let dist = Self { atoms, merge_tol };
        let total = dist.total_weight();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { total });
        }
        Ok(dist)
    }

    /// Merges raw complex contributions into atoms: sorts by work value,
    /// clusters within `merge_tol`, drops the (cancelled) imaginary parts
    /// and near-zero weights, and checks normalization.
    fn from_contributions(
        mut contribs: Vec<(f64, Complex64)>,
        merge_tol: f64,
    ) -> Result<Self> {
        contribs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut atoms = Vec::new();
        let mut total = 0.0;
        let mut idx = 0;
        while idx < contribs.len() {
            let mut end = idx + 1;
            while end < contribs.len() && contribs[end].0 - contribs[end - 1].0 <= merge_tol {
                end += 1;
            }
            let cluster = &contribs[idx..end];
            let weight: Complex64 = cluster.iter().map(|&(_, c)| c).sum();
            let work = cluster.iter().map(|&(w, _)| w).sum::<f64>() / cluster.len() as f64;
            if weight.im.abs() > IMAG_RESIDUE_TOL {
                return Err(Error::ImaginaryResidue {
                    work,
                    residue: weight.im,
                });
            }
            total += weight.re;
            if weight.re.abs() >= WEIGHT_FLOOR {
                atoms.push(WorkAtom {
                    work,
                    weight: weight.re,
                });
            }
            idx = end;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { total });
        }
        Ok(Self { atoms, merge_tol })
    }

    pub fn atoms(&self) -> &[WorkAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn has_negative_weight(&self) -> bool {
        self.atoms.iter().any(|a| a.weight < -WEIGHT_FLOOR)
    }

    /// First moment `Σ w_i W_i`.
    pub fn mean_work(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.work).sum()
    }

    /// Exponentiated average `Σ w_i e^{-β W_i}`.
    pub fn exp_work(&self, beta: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * (-beta * a.work).exp())
            .sum()
    }

    /// Characteristic function `G_λ = Σ w_i e^{iλW_i}` from the atom list.
    pub fn characteristic(&self, lambda: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| Complex64::from_polar(1.0, lambda * a.work) * a.weight)
            .sum()
    }

    /// Largest weight difference against `other`, matching atoms by work
    /// value within `work_tol`; unmatched atoms count with their full
    /// weight.
    pub fn atomwise_distance(&self, other: &Self, work_tol: f64) -> f64 {
        let mut worst = 0.0f64;
        let mut used = vec![false; other.atoms.len()];
        for a in &self.atoms {
            let mut matched = false;
            for (j, b) in other.atoms.iter().enumerate() {
                if !used[j] && (a.work - b.work).abs() <= work_tol {
                    used[j] = true;
                    worst = worst.max((a.weight - b.weight).abs());
                    matched = true;
                    break;
                }
            }
            if !matched {
                worst = worst.max(a.weight.abs());
            }
        }
        for (j, b) in other.atoms.iter().enumerate() {
            if !used[j] {
                worst = worst.max(b.weight.abs());
            }
        }
        worst
    }
}

fn merge_tol_for(h0: &HermitianOperator, htau: &HermitianOperator) -> f64 {
    MERGE_TOL_FACTOR * (h0.spectral_range() + htau.spectral_range())
}

struct ProtocolInputs {
    /// Initial state in the H0 eigenbasis.
    rho0: DMatrix<Complex64>,
    /// Drive elements `V_ji` between the two energy bases.
    v: DMatrix<Complex64>,
    eps0: Vec<f64>,
    eps_tau: Vec<f64>,
    merge_tol: f64,
}

fn prepare(
    rho0: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    htau: &HermitianOperator,
) -> Result<ProtocolInputs> {
    check_dims(&[rho0.dim(), v.dim(), h0.dim(), htau.dim()])?;
    Ok(ProtocolInputs {
        rho0: rho0.in_energy_basis(h0)?,
        v: v.energy_basis_elements(h0, htau)?,
        eps0: h0.eigenvalues().to_vec(),
        eps_tau: htau.eigenvalues().to_vec(),
        merge_tol: merge_tol_for(h0, htau),
    })
}

/// Two-projective-measurement work distribution: atoms at
/// `w = ε_j^τ - ε_i^0` with weight `p_i |V_ji|²`, where `p_i` is the initial
/// population. Off-diagonals of the initial state are ignored.
pub fn tpm_distribution(
    rho0: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    htau: &HermitianOperator,
) -> Result<WorkAtomDistribution> {
    let inp = prepare(rho0, v, h0, htau)?;
    let d = inp.eps0.len();
    let mut contribs = Vec::with_capacity(d * d);
    for i in 0..d {
        let p = inp.rho0[(i, i)].re;
        for j in 0..d {
            let w = inp.eps_tau[j] - inp.eps0[i];
            let weight = p * inp.v[(j, i)].norm_sqr();
            contribs.push((w, Complex64::new(weight, 0.0)));
        }
    }
    WorkAtomDistribution::from_contributions(contribs, inp.merge_tol)
}

/// Quasi-probability work distribution of the phase protocol: complex
/// contributions `ρ⁰_ik V†_kj V_ji` at `w = ε_j^τ - (ε_i^0 + ε_k^0)/2`.
/// Conjugate (i,k)/(k,i) pairs land on the same atom, so merged weights are
/// real; with a diagonal initial state this reduces to the TPM result.
///
/// A degenerate `h0` is accepted only when the initial state carries no
/// coherence between degenerate levels, since `ρ⁰_ik` is basis-dependent
/// there.
pub fn fcs_quasi_distribution(
    rho0: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    htau: &HermitianOperator,
) -> Result<WorkAtomDistribution> {
    let inp = prepare(rho0, v, h0, htau)?;
    let d = inp.eps0.len();
    if h0.is_degenerate() {
        for i in 0..d {
            for k in 0..d {
                if i != k
                    && (inp.eps0[i] - inp.eps0[k]).abs() < DEGENERACY_GAP
                    && inp.rho0[(i, k)].norm() > 1e-12
                {
                    return Err(Error::DegenerateBasis {
                        context: "initial coherence between degenerate levels",
                    });
                }
            }
        }
    }
    let mut contribs = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for k in 0..d {
            let r = inp.rho0[(i, k)];
            if r.norm() == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = inp.eps_tau[j] - 0.5 * (inp.eps0[i] + inp.eps0[k]);
                let c = r * inp.v[(j, k)].conj() * inp.v[(j, i)];
                contribs.push((w, c));
            }
        }
    }
    WorkAtomDistribution::from_contributions(contribs, inp.merge_tol)
}

/// Characteristic function `G_λ` summed from the quasi-probability atoms.
pub fn characteristic_function(
    rho0: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    htau: &HermitianOperator,
    lambda: f64,
) -> Result<Complex64> {
    Ok(fcs_quasi_distribution(rho0, v, h0, htau)?.characteristic(lambda))
}

/// Closed trace form of the characteristic function,
/// `Tr[e^{-iλH0/2} ρ0 e^{-iλH0/2} V† e^{iλHτ} V]`, obtained by resumming
/// the atom expansion. Serves as the independent oracle for
/// [`characteristic_function`].
pub fn characteristic_function_trace(
    rho0: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    htau: &HermitianOperator,
    lambda: f64,
) -> Result<Complex64> {
    check_dims(&[rho0.dim(), v.dim(), h0.dim(), htau.dim()])?;
    let half_phase = matrix_function(h0, |e| Complex64::from_polar(1.0, -0.5 * lambda * e));
    let full_phase = matrix_function(htau, |e| Complex64::from_polar(1.0, lambda * e));
    let m = half_phase.inner()
        * rho0.density().inner()
        * half_phase.inner()
        * v.inner().adjoint()
        * full_phase.inner()
        * v.inner();
    Ok(m.trace())
}

/// Gaussian pointer state: initial center `x0`, spread `σ` and coupling `λ`
/// mapping work to position shift `x - x0 = -λ W`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianPointer {
    pub x0: f64,
    pub sigma: f64,
    pub lambda: f64,
}

impl GaussianPointer {
    /// Pointer centered at `x0 = 0` (the only center the position protocol
    /// supports).
    pub fn new(sigma: f64, lambda: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidPointer {
                reason: "sigma must be positive and finite",
            });
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidPointer {
                reason: "lambda must be positive and finite",
            });
        }
        Ok(Self {
            x0: 0.0,
            sigma,
            lambda,
        })
    }

    /// Initial wavefunction amplitude `φ̃_σ(x)`.
    pub fn amplitude(&self, x: f64) -> f64 {
        let dx = x - self.x0;
        (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25)
            * (-dx * dx / (4.0 * self.sigma * self.sigma)).exp()
    }
}

/// Grid over pointer position for [`pointer_distribution`].
#[derive(Debug, Clone, Copy)]
pub enum GridSpec {
    /// Uniform grid spanning all position shifts padded by `pad_sigmas`·σ.
    Auto { points: usize, pad_sigmas: f64 },
    /// Explicit bounds (the caller is responsible for coverage; narrow
    /// grids are rejected).
    Explicit { x_min: f64, x_max: f64, points: usize },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Auto {
            points: 4096,
            pad_sigmas: 8.0,
        }
    }
}

/// Nonnegative density over pointer position together with its calibration.
#[derive(Debug, Clone)]
pub struct PointerDensity {
    grid: Vec<f64>,
    density: Vec<f64>,
    pointer: GaussianPointer,
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
        .sum()
}

impl PointerDensity {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn pointer(&self) -> &GaussianPointer {
        &self.pointer
    }

    /// Work value read off a pointer position.
    pub fn work_at(&self, x: f64) -> f64 {
        -(x - self.pointer.x0) / self.pointer.lambda
    }

    /// Trapezoidal normalization.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }

    /// Trapezoidal mean position `∫ x P(x) dx`.
    pub fn mean_position(&self) -> f64 {
        let weighted: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.density)
            .map(|(&x, &p)| x * p)
            .collect();
        trapezoid(&self.grid, &weighted)
    }

    /// Mean work implied by the mean position shift.
    pub fn mean_work(&self) -> f64 {
        -(self.mean_position() - self.pointer.x0 * self.integral()) / self.pointer.lambda
    }

    /// Trapezoidal `∫ P(x) e^{-β w(x)} dx` with `w(x) = -(x - x0)/λ`.
    pub fn exp_work_quadrature(&self, beta: f64) -> f64 {
        let weighted: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.density)
            .map(|(&x, &p)| p * (-beta * self.work_at(x)).exp())
            .collect();
        trapezoid(&self.grid, &weighted)
    }

    /// Probability mass in `[a, b]`, with linear interpolation at the ends.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let value_at = |x: f64| -> f64 {
            match self.grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
                Ok(i) => self.density[i],
                Err(0) => 0.0,
                Err(i) if i >= self.grid.len() => 0.0,
                Err(i) => {
                    let t = (x - self.grid[i - 1]) / (self.grid[i] - self.grid[i - 1]);
                    self.density[i - 1] * (1.0 - t) + self.density[i] * t
                }
            }
        };
        let mut xs = vec![a.max(self.grid[0])];
        let mut ys = vec![value_at(xs[0])];
        for (&x, &p) in self.grid.iter().zip(&self.density) {
            if x > a && x < b {
                xs.push(x);
                ys.push(p);
            }
        }
        let end = b.min(*self.grid.last().unwrap());
        if end > xs[0] {
            xs.push(end);
            ys.push(value_at(end));
        }
        trapezoid(&xs, &ys)
    }
}

/// Pointer-position density of the Gaussian measurement protocol,
/// `P_σ(x) = Σ_ijk ρ⁰_ik V†_kj V_ji φ̃_σ(x + λε_ji) φ̃_σ(x + λε_jk)`.
///
/// Requires the pointer centered at `x0 = 0`. The grid must capture all but
/// [`OUTSIDE_MASS_TOL`] of the mass and resolve the Gaussians well enough
/// to normalize within [`POINTER_NORM_TOL`].
pub fn pointer_distribution(
    rho0: &SystemState,
    v: &UnitaryOperator,
    h0: &HermitianOperator,
    htau: &HermitianOperator,
    pointer: &GaussianPointer,
    grid_spec: &GridSpec,
) -> Result<PointerDensity> {
    if pointer.x0 != 0.0 {
        return Err(Error::PointerNotCentered { x0: pointer.x0 });
    }
    let inp = prepare(rho0, v, h0, htau)?;
    let d = inp.eps0.len();
    let sigma = pointer.sigma;
    let lambda = pointer.lambda;

    // Each (i,j,k) term is a Gaussian of std σ at the midpoint of the two
    // shifts, damped by the overlap factor of the pair.
    let mut terms: Vec<(f64, Complex64)> = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
    for i in 0..d {
        for j in 0..d {
            let shift = -lambda * (inp.eps_tau[j] - inp.eps0[i]);
            lo = lo.min(shift);
            hi = hi.max(shift);
            for k in 0..d {
                let c = inp.rho0[(i, k)] * inp.v[(j, k)].conj() * inp.v[(j, i)];
                if c.norm() == 0.0 {
                    continue;
                }
                let eps_ji = inp.eps_tau[j] - inp.eps0[i];
                let eps_jk = inp.eps_tau[j] - inp.eps0[k];
                let center = -0.5 * lambda * (eps_ji + eps_jk);
                let split = lambda * (eps_ji - eps_jk);
                let damp = (-split * split / (8.0 * sigma * sigma)).exp();
                let coef = c * (norm * damp);
                if coef.norm() > 0.0 {
                    terms.push((center, coef));
                }
            }
        }
    }

    let (x_min, x_max, points) = match *grid_spec {
        GridSpec::Auto { points, pad_sigmas } => {
            (lo - pad_sigmas * sigma, hi + pad_sigmas * sigma, points)
        }
        GridSpec::Explicit {
            x_min,
            x_max,
            points,
        } => (x_min, x_max, points),
    };
    if points < 2 || !(x_max - x_min).is_finite() || x_max <= x_min {
        return Err(Error::InvalidPointer {
            reason: "grid needs at least two points and x_max > x_min",
        });
    }

    // Conservative analytic bound on the mass the grid misses: every term
    // is dominated by a Gaussian of std σ at its center.
    let sqrt2 = std::f64::consts::SQRT_2;
    let outside: f64 = terms
        .iter()
        .map(|&(center, coef)| {
            let below = 0.5 * libm::erfc((center - x_min) / (sigma * sqrt2));
            let above = 0.5 * libm::erfc((x_max - center) / (sigma * sqrt2));
            (coef.norm() / norm) * (below + above)
        })
        .sum();
    if outside > OUTSIDE_MASS_TOL {
        return Err(Error::GridTooNarrow { outside });
    }

    let step = (x_max - x_min) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|n| x_min + step * n as f64).collect();
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let mut density = Vec::with_capacity(points);
    let mut worst_im = 0.0f64;
    let mut min_val = f64::INFINITY;
    for &x in &grid {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(center, coef) in &terms {
            let dx = x - center;
            acc += coef * (-dx * dx * inv_two_sigma_sq).exp();
        }
        worst_im = worst_im.max(acc.im.abs());
        min_val = min_val.min(acc.re);
        density.push(acc.re);
    }
    if worst_im > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue {
            work: f64::NAN,
            residue: worst_im,
        });
    }
    if min_val < DENSITY_FLOOR {
        return Err(Error::NegativeDensity { value: min_val });
    }

    let result = PointerDensity {
        grid,
        density,
        pointer: *pointer,
    };
    let integral = result.integral();
    if (integral - 1.0).abs() > POINTER_NORM_TOL {
        return Err(Error::GridTooCoarse { integral });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{spectral_decompose, ComplexMatrix};
    use crate::qubit::{su2_unitary, QubitDrive};
    use crate::states::{coherent_gibbs_state, partition_function, thermal_state};

    fn qubit_h(gap: f64) -> HermitianOperator {
        let m = ComplexMatrix::from_real_diagonal(&[-gap / 2.0, gap / 2.0]).unwrap();
        spectral_decompose(&m).unwrap()
    }

    fn fig2_drive() -> UnitaryOperator {
        su2_unitary(&QubitDrive::fig2_preset(1.0))
    }

    #[test]
    fn tpm_identity_drive_is_single_atom() {
        let h = qubit_h(1.0);
        let rho = thermal_state(&h, 0.7);
        let v = UnitaryOperator::new(ComplexMatrix::identity(2)).unwrap();
        let dist = tpm_distribution(&rho, &v, &h, &h).unwrap();
        assert_eq!(dist.len(), 1);
        assert!((dist.atoms()[0].work).abs() < 1e-15);
        assert!((dist.atoms()[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tpm_symmetric_flip_at_infinite_temperature() {
        let h = qubit_h(1.0);
        let rho = thermal_state(&h, 0.0);
        // Full flip up to phase: δ = π/2 about x.
        let v = su2_unitary(&QubitDrive::new([1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_2, 1.0).unwrap());
        let dist = tpm_distribution(&rho, &v, &h, &h).unwrap();
        assert_eq!(dist.len(), 2);
        assert!((dist.atoms()[0].work + 1.0).abs() < 1e-13);
        assert!((dist.atoms()[0].weight - 0.5).abs() < 1e-13);
        assert!((dist.atoms()[1].work - 1.0).abs() < 1e-13);
        assert!((dist.atoms()[1].weight - 0.5).abs() < 1e-13);
    }

    #[test]
    fn tpm_fig2_qubit_matches_brute_force() {
        let h = qubit_h(1.0);
        let rho = thermal_state(&h, 1.0);
        let v = fig2_drive();
        let dist = tpm_distribution(&rho, &v, &h, &h).unwrap();

        // Brute force over the 2x2 transition set: the two w = 0
        // transitions coincide, so three atoms remain.
        let e = v.energy_basis_elements(&h, &h).unwrap();
        let z = partition_function(&h, 1.0);
        let p = [(0.5f64).exp() / z, (-0.5f64).exp() / z];
        let mut expected = std::collections::BTreeMap::new();
        for i in 0..2 {
            for j in 0..2 {
                let w = h.eigenvalue(j) - h.eigenvalue(i);
                *expected.entry((w * 1e6).round() as i64).or_insert(0.0) +=
                    p[i] * e[(j, i)].norm_sqr();
            }
        }
        assert_eq!(dist.len(), 3);
        assert_eq!(expected.len(), 3);
        for (atom, (&wkey, &weight)) in dist.atoms().iter().zip(expected.iter()) {
            assert!((atom.work - wkey as f64 / 1e6).abs() < 1e-9);
            assert!((atom.weight - weight).abs() < 1e-12);
        }
        assert!(!dist.has_negative_weight());
    }

    #[test]
    fn fcs_of_thermal_equals_tpm() {
        let h = qubit_h(1.0);
        let rho = thermal_state(&h, 1.3);
        let v = fig2_drive();
        let tpm = tpm_distribution(&rho, &v, &h, &h).unwrap();
        let fcs = fcs_quasi_distribution(&rho, &v, &h, &h).unwrap();
        assert!(tpm.atomwise_distance(&fcs, 1e-9) <= 1e-12);
    }

    #[test]
    fn fcs_identity_drive_on_coherent_state() {
        let h = qubit_h(1.0);
        let rho = coherent_gibbs_state(&h, 0.8, &[0.0, 2.1]).unwrap();
        let v = UnitaryOperator::new(ComplexMatrix::identity(2)).unwrap();
        let dist = fcs_quasi_distribution(&rho, &v, &h, &h).unwrap();
        assert_eq!(dist.len(), 1);
        assert!(dist.atoms()[0].work.abs() < 1e-15);
        assert!((dist.atoms()[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fcs_fig2_qubit_matches_triple_loop() {
        let h = qubit_h(1.0);
        let rho = coherent_gibbs_state(&h, 1.0, &[0.0, 1.0]).unwrap();
        let v = fig2_drive();
        let dist = fcs_quasi_distribution(&rho, &v, &h, &h).unwrap();

        // Exhaustive (i,j,k) oracle.
        let e = v.energy_basis_elements(&h, &h).unwrap();
        let r = rho.in_energy_basis(&h).unwrap();
        let mut expected: Vec<(f64, Complex64)> = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let w = h.eigenvalue(j) - 0.5 * (h.eigenvalue(i) + h.eigenvalue(k));
                    let c = r[(i, k)] * e[(j, k)].conj() * e[(j, i)];
                    match expected.iter_mut().find(|(wx, _)| (*wx - w).abs() < 1e-9) {
                        Some((_, acc)) => *acc += c,
                        None => expected.push((w, c)),
                    }
                }
            }
        }
        expected.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        expected.retain(|(_, c)| c.re.abs() >= WEIGHT_FLOOR);
        assert_eq!(dist.len(), expected.len());
        // Half-gap atoms at ±Δ/2 are present, one of them negative.
        assert!(dist.atoms().iter().any(|a| (a.work - 0.5).abs() < 1e-9));
        assert!(dist.atoms().iter().any(|a| (a.work + 0.5).abs() < 1e-9));
        assert!(dist.has_negative_weight());
        assert!((dist.total_weight() - 1.0).abs() < 1e-12);
        for (atom, (w, c)) in dist.atoms().iter().zip(expected.iter()) {
            assert!((atom.work - w).abs() < 1e-12);
            assert!((atom.weight - c.re).abs() < 1e-12);
            assert!(c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn fcs_rejects_degenerate_coherence() {
        let m = ComplexMatrix::from_real_diagonal(&[0.0, 0.0]).unwrap();
        let h = spectral_decompose(&m).unwrap();
        let psi = ComplexMatrix::from_fn(2, |_, _| Complex64::new(0.5, 0.0)).unwrap();
        let rho = SystemState::from_density_matrix(psi).unwrap();
        let v = fig2_drive();
        assert!(matches!(
            fcs_quasi_distribution(&rho, &v, &h, &h),
            Err(Error::DegenerateBasis { .. })
        ));
        // Block-diagonal states across the degenerate pair are fine.
        let mixed = thermal_state(&h, 1.0);
        assert!(fcs_quasi_distribution(&mixed, &v, &h, &h).is_ok());
    }

    #[test]
    fn characteristic_at_zero_is_one() {
        let h = qubit_h(1.0);
        let rho = coherent_gibbs_state(&h, 1.0, &[0.0, 4.0]).unwrap();
        let v = fig2_drive();
        let g = characteristic_function(&rho, &v, &h, &h, 0.0).unwrap();
        assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn thermal_atoms_satisfy_jarzynski() {
        let h = qubit_h(1.0);
        let beta = 1.4;
        let rho = thermal_state(&h, beta);
        let v = fig2_drive();
        let dist = fcs_quasi_distribution(&rho, &v, &h, &h).unwrap();
        assert!((dist.exp_work(beta) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn characteristic_matches_trace_form() {
        let h = qubit_h(1.0);
        let rho = coherent_gibbs_state(&h, 1.0, &[0.0, 0.0]).unwrap();
        let v = fig2_drive();
        let lambda = 0.37;
        let atoms = characteristic_function(&rho, &v, &h, &h, lambda).unwrap();
        let trace = characteristic_function_trace(&rho, &v, &h, &h, lambda).unwrap();
        assert!((atoms - trace).norm() < 1e-12);
    }

    #[test]
    fn pointer_identity_drive_is_initial_gaussian() {
        let h = qubit_h(1.0);
        let rho = coherent_gibbs_state(&h, 0.9, &[0.0, 1.0]).unwrap();
        let v = UnitaryOperator::new(ComplexMatrix::identity(2)).unwrap();
        let pointer = GaussianPointer::new(0.4, 1.0).unwrap();
        let density = pointer_distribution(&rho, &v, &h, &h, &pointer, &GridSpec::default()).unwrap();
        for (&x, &p) in density.grid().iter().zip(density.density()) {
            let expected = pointer.amplitude(x).powi(2);
            assert!((p - expected).abs() < 1e-12, "x={x}: {p} vs {expected}");
        }
        assert!((density.integral() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pointer_separated_gaussians_recover_tpm_weights() {
        let h = qubit_h(1.0);
        let rho = thermal_state(&h, 1.0);
        let v = fig2_drive();
        let lambda = 1.0;
        let sigma = 0.04; // well below 0.05 · λ · min gap
        let pointer = GaussianPointer::new(sigma, lambda).unwrap();
        let density = pointer_distribution(&rho, &v, &h, &h, &pointer, &GridSpec::default()).unwrap();
        let tpm = tpm_distribution(&rho, &v, &h, &h).unwrap();
        for atom in tpm.atoms() {
            let center = -lambda * atom.work;
            let mass = density.mass_between(center - 4.0 * sigma, center + 4.0 * sigma);
            assert!(
                (mass - atom.weight).abs() < 1e-4,
                "w={}: mass {mass} vs weight {}",
                atom.work,
                atom.weight
            );
        }
    }

    #[test]
    fn pointer_rejects_narrow_grid() {
        let h = qubit_h(1.0);
        let rho = thermal_state(&h, 1.0);
        let v = fig2_drive();
        let pointer = GaussianPointer::new(1.0, 1.0).unwrap();
        let narrow = GridSpec::Explicit {
            x_min: -2.0,
            x_max: 2.0,
            points: 1024,
        };
        assert!(matches!(
            pointer_distribution(&rho, &v, &h, &h, &pointer, &narrow),
            Err(Error::GridTooNarrow { .. })
        ));
    }

    #[test]
    fn pointer_rejects_coarse_grid() {
        let h = qubit_h(1.0);
        let rho = thermal_state(&h, 1.0);
        let v = fig2_drive();
        let pointer = GaussianPointer::new(0.01, 1.0).unwrap();
        let coarse = GridSpec::Auto {
            points: 64,
            pad_sigmas: 8.0,
        };
        assert!(matches!(
            pointer_distribution(&rho, &v, &h, &h, &pointer, &coarse),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn tpm_supports_distinct_endpoint_hamiltonians() {
        // Gap doubles over the drive: four distinct work values.
        let h0 = qubit_h(1.0);
        let htau = qubit_h(2.0);
        let rho = thermal_state(&h0, 0.8);
        let v = fig2_drive();
        let dist = tpm_distribution(&rho, &v, &h0, &htau).unwrap();
        let works: Vec<f64> = dist.atoms().iter().map(|a| a.work).collect();
        for (got, want) in works.iter().zip([-1.5, -0.5, 0.5, 1.5]) {
            assert!((got - want).abs() < 1e-12, "{works:?}");
        }
        assert!((dist.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn characteristic_duality_holds_off_period() {
        let mut rng = crate::random::seeded_rng(20);
        let h0 = crate::random::random_hermitian(3, 1.0, &mut rng);
        let htau = crate::random::random_hermitian(3, 1.5, &mut rng);
        let v = crate::random::haar_unitary(3, &mut rng);
        let rho = coherent_gibbs_state(&h0, 0.9, &[0.2, 1.4, 3.0]).unwrap();
        for lambda in [0.0, 0.37, -2.2, 5.1] {
            let atoms = characteristic_function(&rho, &v, &h0, &htau, lambda).unwrap();
            let trace = characteristic_function_trace(&rho, &v, &h0, &htau, lambda).unwrap();
            assert!((atoms - trace).norm() < 1e-11, "lambda {lambda}");
        }
    }

    #[test]
    fn pointer_distribution_supports_distinct_endpoints() {
        let h0 = qubit_h(1.0);
        let htau = qubit_h(2.0);
        let rho = coherent_gibbs_state(&h0, 0.6, &[0.0, 2.0]).unwrap();
        let v = fig2_drive();
        let pointer = GaussianPointer::new(0.5, 1.0).unwrap();
        let density =
            pointer_distribution(&rho, &v, &h0, &htau, &pointer, &GridSpec::default()).unwrap();
        assert!((density.integral() - 1.0).abs() < 1e-8);
        // Mean work agrees with the atom-level first moment even though the
        // cross terms now damp with the initial-basis gaps.
        let atoms = fcs_quasi_distribution(&rho, &v, &h0, &htau).unwrap();
        let split = 1.0; // ε_ik of the initial qubit
        let damp = (-split * split / (8.0 * pointer.sigma * pointer.sigma)).exp();
        let classical: f64 = tpm_distribution(&rho, &v, &h0, &htau).unwrap().mean_work();
        let coherent_part = atoms.mean_work() - classical;
        let expected = classical + coherent_part * damp;
        assert!(
            (density.mean_work() - expected).abs() < 1e-8,
            "grid {} vs expected {expected}",
            density.mean_work()
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h2 = qubit_h(1.0);
        let m3 = ComplexMatrix::from_real_diagonal(&[-1.0, 0.0, 1.0]).unwrap();
        let h3 = spectral_decompose(&m3).unwrap();
        let rho = thermal_state(&h3, 1.0);
        let v = fig2_drive();
        assert!(matches!(
            tpm_distribution(&rho, &v, &h2, &h2),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
