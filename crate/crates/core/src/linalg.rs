//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Composite indices of bipartite operators are subsystem-A major: the basis
//! vector `|k>_A |l>_B` sits at position `k * dim_b + l`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::random::PureState;
use crate::{Error, Result};

/// Dense complex matrix. Storage is column-major; indexing is `(row, col)`.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Eigenvalues in `[-PSD_TOLERANCE, 0)` are treated as round-off and clamped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Relative tolerance on the unit trace of a density matrix.
pub const TRACE_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix("non-finite entry".into()))
    }
}

/// A Hermitian matrix. Construction symmetrizes the input as `(M + M^dag) / 2`,
/// so the stored value is exactly self-adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        check_finite(&m)?;
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(m: ComplexMatrix) -> Self {
        let adj = m.adjoint();
        Self((m + adj).unscale(2.0))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// The projector `|k><k|` onto a computational basis vector.
    pub fn basis_projector(n: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(k, k)] = ONE;
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    /// Validates Hermiticity (by symmetrization), unit trace and positivity.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(m)?;
        let rho = Self::with_unit_trace(h)?;
        let eig = eig_hermitian(rho.as_hermitian())?;
        if let Some(&min) = eig.eigenvalues.first() {
            if min < -PSD_TOLERANCE {
                return Err(Error::NotPsd { eigenvalue: min });
            }
        }
        Ok(rho)
    }

    /// For matrices that are positive semidefinite by construction (Gram
    /// matrices, partial traces); only the trace is checked.
    pub(crate) fn from_psd(m: ComplexMatrix) -> Result<Self> {
        Self::with_unit_trace(HermitianMatrix::new(m)?)
    }

    fn with_unit_trace(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidMatrix(format!(
                "trace {tr} differs from 1 by more than {TRACE_TOLERANCE:e}"
            )));
        }
        Ok(Self(h))
    }

    /// `G G^dag / Tr(G G^dag)`.
    pub fn from_gram(g: &ComplexMatrix) -> Result<Self> {
        let gg = g * g.adjoint();
        let tr: f64 = gg.diagonal().iter().map(|z| z.re).sum();
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::InvalidMatrix("Gram matrix has zero trace".into()));
        }
        Self::from_psd(gg.unscale(tr))
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.as_vector();
        let m = v * v.adjoint();
        Self(HermitianMatrix::symmetrized(m))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(HermitianMatrix(
            ComplexMatrix::identity(n, n).unscale(n as f64),
        ))
    }

    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        if p.iter().any(|&x| x < 0.0) {
            return Err(Error::NotPsd {
                eigenvalue: p.iter().cloned().fold(f64::INFINITY, f64::min),
            });
        }
        Self::with_unit_trace(HermitianMatrix::from_real_diagonal(p))
    }

    /// The convex combination `p * a + (1 - p) * b`.
    pub fn mix(p: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("p", format!("{p} is not in [0, 1]")));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot mix {}-dimensional and {}-dimensional states",
                a.dim(),
                b.dim()
            )));
        }
        Self::from_psd(a.as_matrix().scale(p) + b.as_matrix().scale(1.0 - p))
    }

    /// `U^dag rho U`, i.e. the state expressed in the basis given by the columns of `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{}, state has dimension {}",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        Self::from_psd(u.adjoint() * self.as_matrix() * u)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        self.0.as_matrix()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Eigenvalues with round-off negatives clamped to zero, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let eig = eig_hermitian(&self.0)?;
        clamp_spectrum(eig.eigenvalues)
    }
}

fn clamp_spectrum(mut values: Vec<f64>) -> Result<Vec<f64>> {
    for v in values.iter_mut() {
        if *v < -PSD_TOLERANCE {
            return Err(Error::NotPsd { eigenvalue: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(values)
}

/// Spectral decomposition `M = V diag(eigenvalues) V^dag`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_spectral(|x| x)
    }

    /// `V diag(f(eigenvalues)) V^dag`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            scaled.column_mut(j).scale_mut(fl);
        }
        scaled * v.adjoint()
    }
}

pub fn eig_hermitian(m: &HermitianMatrix) -> Result<Eigensystem> {
    let dim = m.dim();
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, 1000 * dim.max(1))
        .ok_or(Error::NoConvergence { dim })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// The positive semidefinite square root of a density matrix.
pub fn sqrt_psd(rho: &DensityMatrix) -> Result<HermitianMatrix> {
    let mut eig = eig_hermitian(rho.as_hermitian())?;
    eig.eigenvalues = clamp_spectrum(eig.eigenvalues)?;
    // Eigenvalues below the round-off resolution of the decomposition are zero in
    // exact arithmetic; left alone they would contribute sqrt(1e-16) = 1e-8.
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let floor = 4.0 * rho.dim() as f64 * f64::EPSILON * top;
    for v in eig.eigenvalues.iter_mut() {
        if *v < floor {
            *v = 0.0;
        }
    }
    Ok(HermitianMatrix::symmetrized(eig.apply_spectral(f64::sqrt)))
}

fn check_bipartite(dim: usize, dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 || dim_a * dim_b != dim {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {dim} is not a {dim_a} x {dim_b} bipartite state"
        )));
    }
    Ok(())
}

/// Reduced state on subsystem A: `(rho_A)_{k k'} = sum_l rho_{(k,l),(k',l)}`.
pub fn partial_trace_b(rho_ab: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    check_bipartite(rho_ab.dim(), dim_a, dim_b)?;
    let m = rho_ab.as_matrix();
    let reduced = ComplexMatrix::from_fn(dim_a, dim_a, |k, kp| {
        (0..dim_b).map(|l| m[(k * dim_b + l, kp * dim_b + l)]).sum()
    });
    DensityMatrix::from_psd(reduced)
}

/// Reduced state on subsystem B: `(rho_B)_{l l'} = sum_k rho_{(k,l),(k,l')}`.
pub fn partial_trace_a(rho_ab: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    check_bipartite(rho_ab.dim(), dim_a, dim_b)?;
    let m = rho_ab.as_matrix();
    let reduced = ComplexMatrix::from_fn(dim_b, dim_b, |l, lp| {
        (0..dim_a).map(|k| m[(k * dim_b + l, k * dim_b + lp)]).sum()
    });
    DensityMatrix::from_psd(reduced)
}

/// Amplitude matrix `psi_{kl}` of a bipartite pure state, rows indexing subsystem A.
pub fn amplitude_matrix(psi: &PureState, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(psi.dim(), dim_a, dim_b)?;
    let v = psi.as_vector();
    Ok(ComplexMatrix::from_fn(dim_a, dim_b, |k, l| v[k * dim_b + l]))
}

/// The swap operator `F|i j> = |j i>` on `C^n (x) C^n`.
pub fn swap_operator(n: usize) -> HermitianMatrix {
    let mut f = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            f[(j * n + i, i * n + j)] = ONE;
        }
    }
    HermitianMatrix(f)
}

/// Hilbert–Schmidt (Frobenius) norm `sqrt(Tr A^dag A)`.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||U^dag U - I||_2`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    hs_norm(&(u.adjoint() * u - ComplexMatrix::identity(n, n)))
}
