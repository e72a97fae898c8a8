//! Dense complex linear algebra for small Hilbert spaces (d ≲ 64).
//!
//! Provides validated matrix types (Hermitian observables, unitaries, density
//! matrices) and the spectral machinery the rest of the crate is built on:
//! eigendecomposition with a deterministic ordering and phase convention, and
//! functions of Hermitian operators through their spectrum.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `max |M - M^H|` for a matrix to count as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance on eigenvector orthonormality and reconstruction.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Tolerance on `max |U^H U - I|` for a matrix to count as unitary.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Eigenvalue gaps below this flag the spectrum as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Tolerance on the trace of a density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Density-matrix eigenvalues may undershoot zero by this much.
pub const PSD_TOL: f64 = 1e-12;
/// Second-largest eigenvalue allowed for a state declared pure.
pub const PURITY_TOL: f64 = 1e-10;

/// Largest entrywise modulus of `a - b`.
pub fn max_norm_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A validated square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    mat: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Wraps a square matrix, rejecting non-square shapes and NaN/Inf entries.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { mat })
    }

    /// Builds a d×d matrix from an entry function.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(DMatrix::from_diagonal(&v))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.mat
    }
}

/// An energy observable with its cached spectral decomposition.
///
/// Eigenvalues are ascending; each eigenvector is phase-fixed so that its
/// largest-magnitude component is real and positive (ties broken towards the
/// lowest index). Equal eigenvalues keep the order the backend produced,
/// which is deterministic for identical input.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, aligned with `eigenvalues`.
    eigenvectors: DMatrix<Complex64>,
    degenerate: bool,
}

impl HermitianOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector matrix `W` with `W[:, i]` the i-th eigenvector.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    /// Set when some eigenvalue gap is below [`DEGENERACY_GAP`]. Callers that
    /// assume a distinguished eigenbasis must check this.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `max eigenvalue - min eigenvalue` (zero for d = 1).
    pub fn spectral_range(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Smallest nonzero |ε_i - ε_k| over all pairs, if any.
    pub fn min_nonzero_gap(&self) -> Option<f64> {
        let mut min: Option<f64> = None;
        for (a, &ea) in self.eigenvalues.iter().enumerate() {
            for &eb in self.eigenvalues.iter().skip(a + 1) {
                let g = (eb - ea).abs();
                if g > DEGENERACY_GAP {
                    min = Some(min.map_or(g, |m: f64| m.min(g)));
                }
            }
        }
        min
    }

    /// Expresses `op` in this operator's eigenbasis: `W^H op W`.
    pub fn to_eigenbasis(&self, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.eigenvectors.adjoint() * op * &self.eigenvectors
    }
}

/// Spectrally decomposes a Hermitian-within-tolerance matrix.
///
/// Degenerate spectra are permitted but flagged on the result; see
/// [`HermitianOperator::is_degenerate`].
pub fn spectral_decompose(m: &ComplexMatrix) -> Result<HermitianOperator> {
    let defect = max_norm_diff(m.inner(), &m.inner().adjoint());
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let d = m.dim();
    let se = m.inner().clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::<Complex64>::zeros(d, d);
    for (slot, &src) in order.iter().enumerate() {
        let col = se.eigenvectors.column(src);
        // Phase convention: rotate so the largest-magnitude component is
        // real and positive; ties go to the lowest index.
        let mut best = 0usize;
        for r in 1..d {
            if col[r].norm() > col[best].norm() {
                best = r;
            }
        }
        let pivot = col[best];
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for r in 0..d {
            eigenvectors[(r, slot)] = col[r] * phase;
        }
    }

    let degenerate = eigenvalues.windows(2).any(|w| w[1] - w[0] < DEGENERACY_GAP);

    let op = HermitianOperator {
        matrix: m.clone(),
        eigenvalues,
        eigenvectors,
        degenerate,
    };
    debug_assert!(
        max_norm_diff(
            &(op.eigenvectors.adjoint() * &op.eigenvectors),
            &DMatrix::identity(d, d)
        ) <= ORTHONORMALITY_TOL
    );
    debug_assert!(
        max_norm_diff(
            matrix_function(&op, |e| Complex64::new(e, 0.0)).inner(),
            m.inner()
        ) <= ORTHONORMALITY_TOL
    );
    Ok(op)
}

/// Applies a scalar function through the spectrum: `Σ f(ε_i) |ε_i><ε_i|`.
pub fn matrix_function(h: &HermitianOperator, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    let d = h.dim();
    let w = h.eigenvectors();
    let mut scaled = w.clone();
    for i in 0..d {
        let fe = f(h.eigenvalue(i));
        for r in 0..d {
            scaled[(r, i)] *= fe;
        }
    }
    ComplexMatrix {
        mat: scaled * w.adjoint(),
    }
}

/// The drive `V_S(τ)` as a validated dense unitary.
#[derive(Debug, Clone)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.dim();
        let gram = matrix.inner().adjoint() * matrix.inner();
        let defect = max_norm_diff(&gram, &DMatrix::identity(d, d));
        if defect > UNITARITY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        self.matrix.inner()
    }

    /// Matrix elements `V_ji = <ε_j^τ| V |ε_i^0>` in the energy bases of
    /// `h_final` (rows) and `h_initial` (columns).
    pub fn energy_basis_elements(
        &self,
        h_initial: &HermitianOperator,
        h_final: &HermitianOperator,
    ) -> Result<DMatrix<Complex64>> {
        check_dims(&[self.dim(), h_initial.dim(), h_final.dim()])?;
        Ok(h_final.eigenvectors().adjoint() * self.inner() * h_initial.eigenvectors())
    }
}

pub(crate) fn check_dims(dims: &[usize]) -> Result<()> {
    for w in dims.windows(2) {
        if w[0] != w[1] {
            return Err(Error::DimensionMismatch {
                left: w[0],
                right: w[1],
            });
        }
    }
    Ok(())
}

/// Classification of a system state by how it was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Gibbs state `e^{-βH}/Z`; diagonal in the energy basis.
    ThermalMixed,
    /// Pure state with Gibbs populations and explicit relative phases.
    CoherentPure,
    /// Any validated density matrix.
    GeneralDensity,
}

/// Density matrix of the driven system.
///
/// Coherent-Gibbs states carry their phase vector φ so that closed-form
/// work averages can use the phase differences directly; thermal and
/// coherent-Gibbs states also carry the inverse temperature they were
/// built with.
#[derive(Debug, Clone)]
pub struct SystemState {
    kind: StateKind,
    density: ComplexMatrix,
    phases: Option<Vec<f64>>,
    beta: Option<f64>,
}

impl SystemState {
    /// Validates and wraps a general density matrix.
    pub fn from_density_matrix(density: ComplexMatrix) -> Result<Self> {
        validate_density(&density, false)?;
        Ok(Self {
            kind: StateKind::GeneralDensity,
            density,
            phases: None,
            beta: None,
        })
    }

    pub(crate) fn new_thermal(density: ComplexMatrix, beta: f64) -> Result<Self> {
        validate_density(&density, false)?;
        Ok(Self {
            kind: StateKind::ThermalMixed,
            density,
            phases: None,
            beta: Some(beta),
        })
    }

    pub(crate) fn new_coherent_pure(
        density: ComplexMatrix,
        phases: Vec<f64>,
        beta: f64,
    ) -> Result<Self> {
        validate_density(&density, true)?;
        Ok(Self {
            kind: StateKind::CoherentPure,
            density,
            phases: Some(phases),
            beta: Some(beta),
        })
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    /// Phase vector φ, present iff the state is coherent-Gibbs.
    pub fn phases(&self) -> Option<&[f64]> {
        self.phases.as_deref()
    }

    /// Inverse temperature used at construction, when known.
    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// The density matrix expressed in `h`'s eigenbasis.
    pub fn in_energy_basis(&self, h: &HermitianOperator) -> Result<DMatrix<Complex64>> {
        check_dims(&[self.dim(), h.dim()])?;
        Ok(h.to_eigenbasis(self.density.inner()))
    }
}

fn validate_density(density: &ComplexMatrix, require_pure: bool) -> Result<()> {
    let m = density.inner();
    let herm = max_norm_diff(m, &m.adjoint());
    if herm > HERMITICITY_TOL {
        return Err(Error::InvalidDensity {
            reason: format!("not Hermitian (defect {herm:e})"),
        });
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::InvalidDensity {
            reason: format!("trace is {} + {}i instead of 1", trace.re, trace.im),
        });
    }
    let mut eig = m.clone().symmetric_eigen().eigenvalues.as_slice().to_vec();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if eig[0] < -PSD_TOL {
        return Err(Error::InvalidDensity {
            reason: format!("negative eigenvalue {:e}", eig[0]),
        });
    }
    if require_pure && eig.len() > 1 {
        let second = eig[eig.len() - 2];
        if second > PURITY_TOL {
            return Err(Error::InvalidDensity {
                reason: format!("not rank one (second eigenvalue {second:e})"),
            });
        }
    }
    Ok(())
}
