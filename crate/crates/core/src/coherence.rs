//! Coherence quantifiers with respect to the computational basis.

use crate::linalg::{
    eig_hermitian, sqrt_psd, unitarity_defect, ComplexMatrix, DensityMatrix, HermitianMatrix,
};
use crate::random::PureState;
use crate::sum::compensated_sum;
use crate::{Error, Result};

/// Diagonal entries of `sqrt(rho)` must be real to this tolerance.
const DIAGONAL_IMAG_TOLERANCE: f64 = 1e-12;

/// Tolerance for accepting a matrix as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A value of the skew information-based coherence of an `N`-level state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceValue {
    pub value: f64,
    pub dim: usize,
}

impl CoherenceValue {
    /// `1 - 1/N`, the largest attainable value.
    pub fn max_for_dim(dim: usize) -> f64 {
        1.0 - 1.0 / dim as f64
    }
}

/// Wigner–Yanase skew information `-1/2 Tr([sqrt(rho), K]^2)`, evaluated as
/// `Tr(K^2 rho) - Tr(sqrt(rho) K sqrt(rho) K)`.
pub fn skew_information(rho: &DensityMatrix, k: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != k.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {}, observable {}",
            rho.dim(),
            k.dim()
        )));
    }
    let s = sqrt_psd(rho)?;
    let s = s.as_matrix();
    let k = k.as_matrix();
    let first = (k * k * rho.as_matrix()).trace().re;
    let second = (s * k * s * k).trace().re;
    Ok((first - second).max(0.0))
}

fn coherence_from_sqrt_diagonal(s: &ComplexMatrix) -> Result<f64> {
    let mut terms = Vec::with_capacity(s.nrows());
    for z in s.diagonal().iter() {
        if z.im.abs() > DIAGONAL_IMAG_TOLERANCE {
            return Err(Error::Precision(format!(
                "diagonal of sqrt(rho) has imaginary part {:e}",
                z.im
            )));
        }
        terms.push(z.re * z.re);
    }
    Ok(1.0 - compensated_sum(terms))
}

/// `C_I(rho) = 1 - sum_k <k|sqrt(rho)|k>^2`.
pub fn c_i_mixed(rho: &DensityMatrix) -> Result<CoherenceValue> {
    let s = sqrt_psd(rho)?;
    Ok(CoherenceValue {
        value: coherence_from_sqrt_diagonal(s.as_matrix())?,
        dim: rho.dim(),
    })
}

/// `C_I` as the sum of skew informations against every basis projector.
pub fn c_i_mixed_from_skew(rho: &DensityMatrix) -> Result<CoherenceValue> {
    let n = rho.dim();
    let parts = (0..n)
        .map(|k| skew_information(rho, &HermitianMatrix::basis_projector(n, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceValue {
        value: compensated_sum(parts),
        dim: n,
    })
}

/// `C_I(psi) = 1 - sum_k |psi_k|^4`.
pub fn c_i_pure(psi: &PureState) -> CoherenceValue {
    let quartic = compensated_sum(psi.amplitudes().iter().map(|a| a.norm_sqr().powi(2)));
    CoherenceValue {
        value: 1.0 - quartic,
        dim: psi.dim(),
    }
}

fn entropy(p: impl IntoIterator<Item = f64>) -> f64 {
    compensated_sum(
        p.into_iter()
            .filter(|&x| x > 0.0)
            .map(|x| -x * x.ln()),
    )
}

/// Relative entropy of coherence `S(diag rho) - S(rho)` in nats.
pub fn c_r(rho: &DensityMatrix) -> Result<f64> {
    let diag = rho.as_matrix().diagonal().iter().map(|z| z.re.max(0.0)).collect::<Vec<_>>();
    let spectrum = rho.spectrum()?;
    Ok((entropy(diag) - entropy(spectrum)).max(0.0))
}

/// Relative entropy of coherence of a pure state: the Shannon entropy of `|psi_k|^2`.
pub fn c_r_pure(psi: &PureState) -> f64 {
    entropy(psi.amplitudes().iter().map(|a| a.norm_sqr()))
}

/// `C_I(U^dag rho U)`: the coherence with respect to the basis formed by the columns of `U`.
pub fn c_i_in_rotated_basis(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<CoherenceValue> {
    let deviation = unitarity_defect(u);
    if !(deviation <= UNITARITY_TOLERANCE) {
        return Err(Error::NotUnitary { deviation });
    }
    c_i_mixed(&rho.conjugate_by(u)?)
}

/// `C_I` from an eigendecomposition, without forming `sqrt(rho)`:
/// `<k|sqrt(rho)|k> = sum_j |V_kj|^2 sqrt(lambda_j)`.
pub fn c_i_mixed_spectral(rho: &DensityMatrix) -> Result<CoherenceValue> {
    let eig = eig_hermitian(rho.as_hermitian())?;
    let roots = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            if l < -crate::linalg::PSD_TOLERANCE {
                Err(Error::NotPsd { eigenvalue: l })
            } else {
                Ok(l.max(0.0).sqrt())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rho.dim();
    let v = &eig.eigenvectors;
    let diag = (0..n).map(|k| {
        let d = compensated_sum((0..n).map(|j| v[(k, j)].norm_sqr() * roots[j]));
        d * d
    });
    Ok(CoherenceValue {
        value: 1.0 - compensated_sum(diag),
        dim: n,
    })
}
