//! Skew information-based coherence of random quantum states.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`linalg`]: dense complex kernels (Hermitian eigendecomposition, PSD
//!   square root, partial trace, swap operator).
//! * [`random`]: reproducible samplers for Haar pure states, Haar unitaries
//!   and Hilbert–Schmidt mixed states.
//! * [`coherence`]: skew information, the coherence measure `C_I` and the
//!   relative entropy of coherence.
//! * [`closed_form`]: Laguerre moments, ensemble averages, concentration
//!   bounds and related formulas.
//! * [`oracles`]: independent checks (Gauss–Laguerre quadrature, Monte Carlo
//!   integrals, Haar twirls).
//! * [`mc`]: the chunked, deterministic Monte Carlo engine.
//! * [`verify`]: the oracle and invariant suites driven by the CLI.

pub mod closed_form;
pub mod coherence;
mod error;
pub mod linalg;
pub mod mc;
pub mod oracles;
pub mod random;
pub(crate) mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Eigensystem, HermitianMatrix};
pub use random::{PureState, RngStream};

pub use num_complex::Complex64;
