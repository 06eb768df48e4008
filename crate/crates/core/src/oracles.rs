//! Independent numerical checks for the closed forms.
//!
//! None of these routines go through the moment series of
//! [`closed_form::laguerre_moment`](crate::closed_form::laguerre_moment):
//! Laguerre polynomials are evaluated by their three-term recurrence and
//! integrated with Gauss–Laguerre quadrature, and ensemble integrals are
//! sampled directly.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::closed_form::{LaguerreMomentTable, MomentProvenance};
use crate::linalg::{hs_norm, sqrt_psd, swap_operator, ComplexMatrix};
use crate::mc::{estimate, run_chunked, EstimatorResult, McConfig};
use crate::random::{sample_haar_unitary, sample_hs_mixed};
use crate::{Error, Result};

/// Largest dimension accepted by [`lemma1_mc`]; the integrand is heavy-tailed
/// under exponential sampling and the variance explodes beyond this.
pub const LEMMA1_MAX_DIM: usize = 4;

const RESCALE: f64 = 1e100;

/// Gauss rule for `int_0^inf f(x) x^alpha e^{-x} dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Jacobi matrix coefficients of the generalized Laguerre weight:
/// diagonal `2j + alpha + 1`, off-diagonal `sqrt(j (j + alpha))`.
fn jacobi_diag(alpha: f64, j: usize) -> f64 {
    2.0 * j as f64 + alpha + 1.0
}

fn jacobi_offdiag(alpha: f64, j: usize) -> f64 {
    (j as f64 * (j as f64 + alpha)).sqrt()
}

/// Orthonormal recurrence at `x`. Returns `p_n(x) / p_n'(x)` (the Newton step)
/// and `ln sum_{j<n} p_j(x)^2` (minus the log Christoffel number).
fn orthonormal_sweep(alpha: f64, n: usize, x: f64, p0: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, p0);
    let (mut dp_prev, mut dp) = (0.0, 0.0);
    let mut sum_sq = 0.0;
    let mut log_scale = 0.0; // stored values are true values times e^{-log_scale}
    for j in 0..n {
        sum_sq += p * p;
        let a = jacobi_diag(alpha, j);
        let b_prev = if j == 0 { 0.0 } else { jacobi_offdiag(alpha, j) };
        let b_next = jacobi_offdiag(alpha, j + 1);
        let p_next = ((x - a) * p - b_prev * p_prev) / b_next;
        let dp_next = (p + (x - a) * dp - b_prev * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        if p.abs() > RESCALE || dp.abs() > RESCALE {
            p /= RESCALE;
            p_prev /= RESCALE;
            dp /= RESCALE;
            dp_prev /= RESCALE;
            sum_sq /= RESCALE * RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (p / dp, sum_sq.ln() + 2.0 * log_scale)
}

/// Generalized Gauss–Laguerre rule with `n_nodes` nodes.
///
/// Nodes are eigenvalues of the Jacobi matrix, refined by Newton steps on the
/// orthonormal polynomial of degree `n_nodes`. Weights are Christoffel numbers
/// `1 / sum_j p_j(x)^2`, which keep full relative accuracy at the large nodes
/// where eigenvector-based weights underflow.
pub fn gauss_laguerre_rule(alpha: f64, n_nodes: usize) -> Result<QuadratureRule> {
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::domain("alpha", format!("{alpha} is not > -1")));
    }
    if n_nodes == 0 {
        return Err(Error::domain("n_nodes", "at least one node is needed"));
    }
    let jacobi = DMatrix::from_fn(n_nodes, n_nodes, |i, j| {
        if i == j {
            jacobi_diag(alpha, i)
        } else if i + 1 == j {
            jacobi_offdiag(alpha, j)
        } else if j + 1 == i {
            jacobi_offdiag(alpha, i)
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::try_new(jacobi, f64::EPSILON, 1000 * n_nodes)
        .ok_or(Error::NoConvergence { dim: n_nodes })?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let p0 = 1.0 / gamma(alpha + 1.0).sqrt();
    let mut weights = Vec::with_capacity(n_nodes);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (step, _) = orthonormal_sweep(alpha, n_nodes, *x, p0);
            if !step.is_finite() {
                break;
            }
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
        let (_, log_sum) = orthonormal_sweep(alpha, n_nodes, *x, p0);
        weights.push((-log_sum).exp());
    }
    Ok(QuadratureRule {
        alpha,
        nodes,
        weights,
    })
}

/// `L_0(x), ..., L_{count-1}(x)` by the recurrence
/// `(k + 1) L_{k+1} = (2k + 1 - x) L_k - k L_{k-1}`.
pub fn laguerre_by_recurrence(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    if count == 1 {
        return out;
    }
    out.push(1.0 - x);
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `int_0^inf L_k(x) L_l(x) x^q e^{-x} dx` by a `q`-weighted rule with
/// `floor((k + l) / 2) + 2` nodes, one more than exactness requires.
pub fn laguerre_moment_quadrature(k: usize, l: usize, q: f64) -> Result<f64> {
    let rule = gauss_laguerre_rule(q, (k + l) / 2 + 2)?;
    let top = k.max(l) + 1;
    Ok(rule.integrate(|x| {
        let ls = laguerre_by_recurrence(top, x);
        ls[k] * ls[l]
    }))
}

/// Full `n x n` moment table from a single `(n + 1)`-node rule, exact for
/// every product of degree at most `2n - 2`.
pub fn moment_table_quadrature(n: usize, q: f64) -> Result<LaguerreMomentTable> {
    let rule = gauss_laguerre_rule(q, n + 1)?;
    let polys: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| laguerre_by_recurrence(n, x)).collect();
    Ok(LaguerreMomentTable::from_fn(n, q, MomentProvenance::Quadrature, |k, l| {
        polys
            .iter()
            .zip(&rule.weights)
            .map(|(p, &w)| w * p[k] * p[l])
            .sum()
    }))
}

/// `sqrt(mu_1 mu_2) prod_{i<j} (mu_i - mu_j)^2`.
pub fn lemma1_integrand(mu: &[f64]) -> f64 {
    let mut v = (mu[0] * mu[1]).sqrt();
    for i in 0..mu.len() {
        for j in i + 1..mu.len() {
            let d = mu[i] - mu[j];
            v *= d * d;
        }
    }
    v
}

/// Monte Carlo estimate of `int_{R_+^N} sqrt(mu_1 mu_2) e^{-sum mu} |Delta(mu)|^2 dmu`
/// with every `mu_j ~ Exp(1)`.
pub fn lemma1_mc(n: usize, samples: usize, config: &McConfig) -> Result<EstimatorResult> {
    if !(2..=LEMMA1_MAX_DIM).contains(&n) {
        return Err(Error::domain(
            "dimension",
            format!("lemma1_mc supports 2 <= N <= {LEMMA1_MAX_DIM}, got {n}"),
        ));
    }
    if samples == 0 {
        return Err(Error::domain("samples", "at least 1 sample is needed"));
    }
    estimate(samples, config, |rng| {
        let mut mu = [0.0; LEMMA1_MAX_DIM];
        for m in mu.iter_mut().take(n) {
            *m = rng.exponential();
        }
        Ok(lemma1_integrand(&mu[..n]))
    })
}

fn check_twirl_dims(a: &ComplexMatrix, n: usize) -> Result<()> {
    if n < 2 || a.nrows() != n * n || a.ncols() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "twirl over U({n}) needs an N^2 x N^2 operator with N >= 2, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Closed form of `int (U (x) U) A (U (x) U)^dag dU` in terms of `Tr A` and `Tr(A F)`.
pub fn twirl_closed_form(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    check_twirl_dims(a, n)?;
    let f = swap_operator(n).into_matrix();
    let nf = n as f64;
    let d = nf * nf - 1.0;
    let tr_a = a.trace();
    let tr_af = (a * &f).trace();
    let c_id = tr_a / d - tr_af / (nf * d);
    let c_swap = tr_a / (nf * d) - tr_af / d;
    Ok(ComplexMatrix::identity(n * n, n * n) * c_id - f * c_swap)
}

/// Sample mean of `(U (x) U) A (U (x) U)^dag` over Haar unitaries.
pub fn twirl_empirical(
    a: &ComplexMatrix,
    n: usize,
    samples: usize,
    config: &McConfig,
) -> Result<ComplexMatrix> {
    check_twirl_dims(a, n)?;
    if samples == 0 {
        return Err(Error::domain("samples", "at least 1 sample is needed"));
    }
    let dim = n * n;
    let partials = run_chunked(samples, config, |rng, count| {
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for _ in 0..count {
            let u = sample_haar_unitary(rng, n);
            let uu = u.kronecker(&u);
            acc += &uu * a * uu.adjoint();
        }
        acc
    })?;
    let mut total = ComplexMatrix::zeros(dim, dim);
    for p in &partials {
        total += p;
    }
    Ok(total.unscale(samples as f64))
}

/// Hilbert–Schmidt distance from `m` to its orthogonal projection onto
/// `span{1, F}`.
pub fn twirl_span_residual(m: &ComplexMatrix, n: usize) -> Result<f64> {
    check_twirl_dims(m, n)?;
    let f = swap_operator(n).into_matrix();
    let nf = n as f64;
    // Gram matrix of {1, F}: [[N^2, N], [N, N^2]]
    let (g11, g12) = (nf * nf, nf);
    let det = g11 * g11 - g12 * g12;
    let b1 = m.trace();
    let b2 = (&f * m).trace();
    let c1 = (b1 * g11 - b2 * g12) / det;
    let c2 = (b2 * g11 - b1 * g12) / det;
    let projection = ComplexMatrix::identity(n * n, n * n) * c1 + f * c2;
    Ok(hs_norm(&(m - projection)))
}

/// Monte Carlo mean of `(Tr sqrt(rho))^2` over Hilbert–Schmidt random states.
pub fn spectral_average_check(n: usize, samples: usize, config: &McConfig) -> Result<EstimatorResult> {
    if n == 0 {
        return Err(Error::domain("dimension", "must be positive"));
    }
    estimate(samples, config, |rng| {
        let rho = sample_hs_mixed(rng, n);
        let s = sqrt_psd(&rho)?;
        let tr = s.trace();
        Ok(tr * tr)
    })
}

/// `sqrt(Lambda) (x) sqrt(Lambda)` for a diagonal spectrum.
pub fn sqrt_spectrum_tensor_square(spectrum: &[f64]) -> ComplexMatrix {
    let n = spectrum.len();
    let roots: Vec<Complex64> = spectrum.iter().map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)).collect();
    let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    let out = d.kronecker(&d);
    debug_assert_eq!(out.nrows(), n * n);
    out
}
