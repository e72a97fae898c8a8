//! Driven two-level scenario: an SU(2) drive acting on a qubit with
//! Hamiltonian `H = -(Δ/2) σ_z` (ground state first, energies ∓Δ/2),
//! packaged as sweep generators over inverse temperature and pointer width.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::{avg_work_p1, avg_work_p2, je_deviation_bound, WorkAverages};
use crate::protocols::GaussianPointer;
use crate::qlinalg::{spectral_decompose, ComplexMatrix, HermitianOperator, UnitaryOperator};
use crate::states::{coherent_gibbs_state, thermal_state};

const PAULI_X: [[Complex64; 2]; 2] = [
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
];
const PAULI_Y: [[Complex64; 2]; 2] = [
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
    [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
];
const PAULI_Z: [[Complex64; 2]; 2] = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
];

/// SU(2) drive `V = cos δ − i sin δ (n·σ)` with gap Δ of the qubit it acts
/// on. The axis is renormalized at construction.
#[derive(Debug, Clone, Copy)]
pub struct QubitDrive {
    n: [f64; 3],
    delta_angle: f64,
    gap: f64,
}

impl QubitDrive {
    pub fn new(n: [f64; 3], delta_angle: f64, gap: f64) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !norm.is_finite() || norm <= 0.0 || !delta_angle.is_finite() {
            return Err(Error::InvalidDrive {
                reason: "rotation axis must be finite and nonzero",
            });
        }
        if !gap.is_finite() || gap <= 0.0 {
            return Err(Error::InvalidDrive {
                reason: "energy gap must be positive and finite",
            });
        }
        Ok(Self {
            n: [n[0] / norm, n[1] / norm, n[2] / norm],
            delta_angle,
            gap,
        })
    }

    /// The drive behind the bundled figure data: axis `{0.83, 0, 0.55}`
    /// (renormalized from norm ≈ 0.9957) and δ = 1.
    pub fn fig2_preset(gap: f64) -> Self {
        Self::new([0.83, 0.0, 0.55], 1.0, gap).expect("preset axis is valid")
    }

    pub fn axis(&self) -> [f64; 3] {
        self.n
    }

    pub fn delta_angle(&self) -> f64 {
        self.delta_angle
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// `H = -(Δ/2) σ_z = diag(-Δ/2, +Δ/2)` with the ground state at index 0.
    pub fn hamiltonian(&self) -> HermitianOperator {
        let m = ComplexMatrix::from_real_diagonal(&[-self.gap / 2.0, self.gap / 2.0])
            .expect("diagonal is finite");
        spectral_decompose(&m).expect("diagonal matrix is Hermitian")
    }
}

/// `V = cos δ · 1 − i sin δ (n_x σ_x + n_y σ_y + n_z σ_z)`.
pub fn su2_unitary(drive: &QubitDrive) -> UnitaryOperator {
    let c = drive.delta_angle.cos();
    let s = drive.delta_angle.sin();
    let [nx, ny, nz] = drive.n;
    let m = ComplexMatrix::from_fn(2, |i, j| {
        let id = if i == j {
            Complex64::new(c, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let axis = PAULI_X[i][j] * nx + PAULI_Y[i][j] * ny + PAULI_Z[i][j] * nz;
        id - Complex64::new(0.0, s) * axis
    })
    .expect("entries are finite");
    UnitaryOperator::new(m).expect("SU(2) rotation is unitary")
}

/// Which measurement protocol a sweep evaluates.
#[derive(Debug, Clone, Copy)]
pub enum Protocol {
    /// Phase (full-counting-statistics) protocol.
    P1,
    /// Gaussian-pointer protocol with spread `sigma_ratio · λΔ`.
    P2 { sigma_ratio: f64 },
}

/// Initial-state tag carried through sweep tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateLabel {
    Thermal,
    Phi(f64),
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Thermal => write!(f, "thermal"),
            StateLabel::Phi(phi) => write!(f, "phi={phi}"),
        }
    }
}

/// One sweep entry: work averages for one initial state at one βΔ.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub beta_delta: f64,
    pub label: StateLabel,
    pub exp_work: f64,
    pub mean_work: f64,
    pub je_deviation: f64,
    pub bound: f64,
}

/// One entry of the pointer-width sweep: mean-work difference between the
/// coherent and thermal initial states.
#[derive(Debug, Clone, Copy)]
pub struct SigmaRow {
    pub sigma_ratio: f64,
    pub work_diff: f64,
}

fn pointer_for(drive: &QubitDrive, sigma_ratio: f64) -> Result<GaussianPointer> {
    // λ is a free positive calibration; all pointer physics depends on σ/λ
    // only, so fix λ = 1 and express σ through the ratio σ/(λΔ).
    GaussianPointer::new(sigma_ratio * drive.gap, 1.0)
}

fn averages_for(
    state: &crate::qlinalg::SystemState,
    v: &UnitaryOperator,
    h: &HermitianOperator,
    protocol: &Protocol,
    drive: &QubitDrive,
) -> Result<WorkAverages> {
    match protocol {
        Protocol::P1 => avg_work_p1(state, v, h),
        Protocol::P2 { sigma_ratio } => {
            let pointer = pointer_for(drive, *sigma_ratio)?;
            avg_work_p2(state, v, h, &pointer)
        }
    }
}

/// Sweeps βΔ for the thermal state plus one coherent-Gibbs state per phase
/// in `phases` (phase vector `(0, φ)`), producing one thermal row and one
/// row per phase at each grid point.
pub fn sweep_beta(
    drive: &QubitDrive,
    phases: &[f64],
    beta_deltas: &[f64],
    protocol: &Protocol,
) -> Result<Vec<SweepRow>> {
    let h = drive.hamiltonian();
    let v = su2_unitary(drive);
    let mut rows = Vec::with_capacity(beta_deltas.len() * (phases.len() + 1));
    for &bd in beta_deltas {
        let beta = bd / drive.gap;
        let thermal = thermal_state(&h, beta);
        let avgs = averages_for(&thermal, &v, &h, protocol, drive)?;
        let (_, bound) = je_deviation_bound(&thermal, &v, &h, beta)?;
        rows.push(SweepRow {
            beta_delta: bd,
            label: StateLabel::Thermal,
            exp_work: avgs.exp_work,
            mean_work: avgs.mean_work,
            je_deviation: avgs.je_deviation,
            bound,
        });
        for &phi in phases {
            let state = coherent_gibbs_state(&h, beta, &[0.0, phi])?;
            let avgs = averages_for(&state, &v, &h, protocol, drive)?;
            let (_, bound) = je_deviation_bound(&state, &v, &h, beta)?;
            rows.push(SweepRow {
                beta_delta: bd,
                label: StateLabel::Phi(phi),
                exp_work: avgs.exp_work,
                mean_work: avgs.mean_work,
                je_deviation: avgs.je_deviation,
                bound,
            });
        }
    }
    Ok(rows)
}

/// Sweeps the pointer width σ/(λΔ) at fixed φ and βΔ, reporting the
/// mean-work difference between the coherent and thermal initial states.
/// The difference vanishes for narrow pointers and plateaus once σ ≫ λΔ.
pub fn sweep_sigma(
    drive: &QubitDrive,
    phi: f64,
    beta_delta: f64,
    sigma_ratios: &[f64],
) -> Result<Vec<SigmaRow>> {
    let h = drive.hamiltonian();
    let v = su2_unitary(drive);
    let beta = beta_delta / drive.gap;
    let thermal = thermal_state(&h, beta);
    let coherent = coherent_gibbs_state(&h, beta, &[0.0, phi])?;
    sigma_ratios
        .iter()
        .map(|&ratio| {
            let pointer = pointer_for(drive, ratio)?;
            let pure = avg_work_p2(&coherent, &v, &h, &pointer)?.mean_work;
            let eq = avg_work_p2(&thermal, &v, &h, &pointer)?.mean_work;
            Ok(SigmaRow {
                sigma_ratio: ratio,
                work_diff: pure - eq,
            })
        })
        .collect()
}

/// Logarithmic grid from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && points >= 2);
    let (lo, hi) = (min.ln(), max.ln());
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::avg_exp_work_p1;
    use crate::qlinalg::max_norm_diff;
    use nalgebra::DMatrix;

    #[test]
    fn zero_angle_gives_identity() {
        let v = su2_unitary(&QubitDrive::new([0.0, 1.0, 0.0], 0.0, 1.0).unwrap());
        assert!(max_norm_diff(v.inner(), &DMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn half_pi_about_x_is_flip() {
        let v = su2_unitary(
            &QubitDrive::new([1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_2, 1.0).unwrap(),
        );
        // -iσ_x up to machine precision.
        let m = v.inner();
        assert!(m[(0, 0)].norm() < 1e-15);
        assert!((m[(0, 1)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((m[(1, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn preset_axis_is_renormalized() {
        let drive = QubitDrive::fig2_preset(1.0);
        let n = drive.axis();
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((n[0] / n[2] - 0.83 / 0.55).abs() < 1e-12, "direction kept");
        let v = su2_unitary(&drive);
        let gram = v.inner().adjoint() * v.inner();
        assert!(max_norm_diff(&gram, &DMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn hamiltonian_orders_ground_first() {
        let h = QubitDrive::fig2_preset(2.0).hamiltonian();
        assert_eq!(h.eigenvalues(), &[-1.0, 1.0]);
    }

    #[test]
    fn beta_zero_rows_have_unit_exp_work() {
        let drive = QubitDrive::fig2_preset(1.0);
        for protocol in [Protocol::P1, Protocol::P2 { sigma_ratio: 1.0 }] {
            let rows = sweep_beta(&drive, &[0.0, 1.0, 4.0], &[0.0], &protocol).unwrap();
            assert_eq!(rows.len(), 4);
            for row in rows {
                assert!(
                    (row.exp_work - 1.0).abs() < 1e-12,
                    "{} at βΔ=0: {}",
                    row.label,
                    row.exp_work
                );
            }
        }
    }

    #[test]
    fn thermal_curve_sits_at_one_and_phi_zero_deviation_grows() {
        let drive = QubitDrive::fig2_preset(1.0);
        let grid: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
        let rows = sweep_beta(&drive, &[0.0], &grid, &Protocol::P1).unwrap();
        let mut last_dev = -1.0;
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].label, StateLabel::Thermal);
            assert!((pair[0].exp_work - 1.0).abs() < 1e-12);
            let dev = (pair[1].exp_work - 1.0).abs();
            assert!(
                dev >= last_dev - 1e-12,
                "deviation must grow with βΔ on [0, 5]: {dev} after {last_dev}"
            );
            last_dev = dev;
        }
    }

    #[test]
    fn sign_flip_exists_in_phase_scan() {
        let drive = QubitDrive::fig2_preset(1.0);
        let h = drive.hamiltonian();
        let v = su2_unitary(&drive);
        let beta = 0.5;
        let thermal = avg_work_p1(&thermal_state(&h, beta), &v, &h).unwrap();
        assert!(thermal.mean_work > 0.0);
        let phis: Vec<f64> = (0..64).map(|n| n as f64 / 64.0 * std::f64::consts::TAU).collect();
        let rows = sweep_beta(&drive, &phis, &[0.5], &Protocol::P1).unwrap();
        assert!(rows
            .iter()
            .any(|r| matches!(r.label, StateLabel::Phi(_)) && r.mean_work < 0.0));
    }

    #[test]
    fn sweep_consistency_with_direct_averages() {
        let drive = QubitDrive::fig2_preset(1.0);
        let h = drive.hamiltonian();
        let v = su2_unitary(&drive);
        let rows = sweep_beta(&drive, &[1.0], &[2.0], &Protocol::P1).unwrap();
        let coherent = coherent_gibbs_state(&h, 2.0, &[0.0, 1.0]).unwrap();
        let direct = avg_exp_work_p1(&coherent, &v, &h, 2.0).unwrap();
        assert!((rows[1].exp_work - direct).abs() < 1e-14);
    }

    #[test]
    fn sigma_sweep_vanishes_then_plateaus() {
        let drive = QubitDrive::fig2_preset(1.0);
        let rows = sweep_sigma(&drive, 0.0, 1.0, &[0.01, 0.05, 1.0, 10.0, 100.0]).unwrap();
        assert!(rows[0].work_diff.abs() <= 1e-8, "suppressed at σ = 0.01λΔ");
        assert!(rows[1].work_diff.abs() <= 1e-4, "suppressed at σ = 0.05λΔ");
        assert!(rows[2].work_diff.abs() > 1e-2, "visible at σ = λΔ");
        // Plateau: work_diff(σ) = C·e^{-1/(8σ²)} with C the σ → ∞ limit,
        // so the σ = 10 and σ = 100 rows differ by C times the damping gap.
        let limit = rows[4].work_diff / (-1.0f64 / 80000.0).exp();
        let expected_variation =
            (limit * ((-1.0f64 / 80000.0).exp() - (-1.0f64 / 800.0).exp())).abs();
        let got = (rows[4].work_diff - rows[3].work_diff).abs();
        assert!(
            (got - expected_variation).abs() < 1e-12,
            "plateau approach: {got} vs {expected_variation}"
        );
    }

    #[test]
    fn log_grid_spans_inclusive() {
        let g = log_grid(0.01, 10.0, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 0.01).abs() < 1e-15);
        assert!((g[6] - 10.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
