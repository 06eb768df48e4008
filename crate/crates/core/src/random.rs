//! Reproducible samplers for random states and unitaries.
//!
//! Every sampler draws from an [`RngStream`], identified by a master seed and
//! a stream index. Complex Gaussians use the polar Box–Muller transform, one
//! uniform pair per complex number, so outputs are bit-reproducible for a
//! given `(master_seed, stream_index)` and call sequence.

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::{Error, Result};

/// Tolerance on the norm of a [`PureState`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A splittable random stream.
///
/// The ChaCha8 key is derived from `master_seed` by a SplitMix64 avalanche;
/// the stream index selects the ChaCha stream (nonce), so distinct indices
/// under one master seed never overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = master_seed;
        for chunk in key.chunks_exact_mut(8) {
            state = mix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Exponential with unit rate.
    pub fn exponential(&mut self) -> f64 {
        -(1.0 - self.uniform()).ln()
    }

    /// Standard complex normal: real and imaginary parts iid `N(0, 1/2)`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        Complex64::from_polar((-u1.ln()).sqrt(), TAU * u2)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// A unit vector in `C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(DVector<Complex64>);

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    pub fn from_vector(v: DVector<Complex64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidMatrix("empty state vector".into()));
        }
        let norm_sqr = v.norm_squared();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidMatrix(format!(
                "state has squared norm {norm_sqr}, expected 1"
            )));
        }
        Ok(Self(v))
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(v: DVector<Complex64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidMatrix("cannot normalize a zero vector".into()));
        }
        Ok(Self(v.unscale(norm)))
    }

    /// The computational basis vector `|k>`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    /// Equal-weight superposition with the given phases, `sum_k e^{i phi_k} |k> / sqrt(N)`.
    pub fn uniform_superposition(phases: &[f64]) -> Self {
        let amp = 1.0 / (phases.len() as f64).sqrt();
        Self(DVector::from_iterator(
            phases.len(),
            phases.iter().map(|&phi| Complex64::from_polar(amp, phi)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    /// `W |psi>`.
    pub fn apply(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.ncols() != self.dim() || w.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state has dimension {}",
                w.nrows(),
                w.ncols(),
                self.dim()
            )));
        }
        Self::normalized(w * &self.0)
    }
}

pub fn sample_gaussian_complex(rng: &mut RngStream, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| rng.complex_normal()).collect()
}

/// `rows x cols` Ginibre matrix, entries drawn in row-major order.
pub fn sample_ginibre(rng: &mut RngStream, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = sample_gaussian_complex(rng, rows * cols);
    ComplexMatrix::from_row_slice(rows, cols, &entries)
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn sample_haar_pure(rng: &mut RngStream, n: usize) -> PureState {
    assert!(n >= 1, "dimension must be positive");
    loop {
        let v = DVector::from_vec(sample_gaussian_complex(rng, n));
        // a zero draw has probability zero but would not normalize
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Haar-random unitary: QR of a Ginibre matrix, with each column of `Q`
/// multiplied by the phase of the matching diagonal entry of `R`.
pub fn sample_haar_unitary(rng: &mut RngStream, n: usize) -> ComplexMatrix {
    assert!(n >= 1, "dimension must be positive");
    let g = sample_ginibre(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Hilbert–Schmidt random density matrix `G G^dag / Tr(G G^dag)` with `G` an
/// `n x n` Ginibre matrix.
pub fn sample_hs_mixed(rng: &mut RngStream, n: usize) -> DensityMatrix {
    assert!(n >= 1, "dimension must be positive");
    loop {
        let g = sample_ginibre(rng, n, n);
        if let Ok(rho) = DensityMatrix::from_gram(&g) {
            return rho;
        }
    }
}

/// Haar-random pure state on `C^n (x) C^n`.
pub fn sample_bipartite_pure(rng: &mut RngStream, n: usize) -> PureState {
    sample_haar_pure(rng, n * n)
}
