//! Closed-form ensemble averages, concentration bounds and the Laguerre
//! moment machinery behind the mixed-state average.
//!
//! Laguerre degrees are 0-based throughout: a table of size `N` holds
//! `I_kl` for `0 <= k, l < N`.

use std::f64::consts::PI;
use std::f64::consts::LN_2;

use statrs::function::gamma::{gamma, ln_gamma};

use crate::oracles;
use crate::sum::{compensated_sum, CompensatedSum};
use crate::{Error, Result};

/// Largest tolerated gap between the series and quadrature moment tables.
pub const MOMENT_AGREEMENT_TOLERANCE: f64 = 1e-9;

/// `9 pi^3 ln 2`, the Lévy-lemma denominator for unit Lipschitz constant.
pub fn levy_constant() -> f64 {
    9.0 * PI.powi(3) * LN_2
}

/// `72 pi^3 ln 2`, the denominator shared by the pure and mixed tail bounds.
pub fn tail_constant() -> f64 {
    72.0 * PI.powi(3) * LN_2
}

/// Laguerre polynomial `L_k(x) = sum_j (-1)^j C(k, j) x^j / j!`, summed term by term.
pub fn laguerre(k: usize, x: f64) -> f64 {
    let mut binom = 1.0; // C(k, j)
    let mut power_over_fact = 1.0; // x^j / j!
    let mut acc = CompensatedSum::new();
    for j in 0..=k {
        if j > 0 {
            binom *= (k - j + 1) as f64 / j as f64;
            power_over_fact *= x / j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * binom * power_over_fact);
    }
    acc.value()
}

/// Generalized binomial coefficient `C(q, m) = q (q-1) ... (q-m+1) / m!`.
pub fn gen_binomial(q: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (q - i as f64) / (i + 1) as f64)
}

/// `I_kl^(q) = int_0^inf L_k(x) L_l(x) e^{-x} x^q dx` from the finite series
///
/// `sum_{r=0}^{min(k,l)} (-1)^{k+l} C(q, k-r) C(q, l-r) Gamma(q+r+1) / r!`.
///
/// # Panics
/// If `q <= -1`, where the integral diverges.
pub fn laguerre_moment(k: usize, l: usize, q: f64) -> f64 {
    assert!(q > -1.0, "laguerre_moment requires q > -1, got {q}");
    let sign = if (k + l).is_multiple_of(2) { 1.0 } else { -1.0 };
    // Gamma(q + r + 1) / r! by recurrence, which stays finite for large r
    let mut gamma_ratio = gamma(q + 1.0);
    let mut acc = CompensatedSum::new();
    for r in 0..=k.min(l) {
        if r > 0 {
            gamma_ratio *= (q + r as f64) / r as f64;
        }
        acc.add(gen_binomial(q, k - r) * gen_binomial(q, l - r) * gamma_ratio);
    }
    sign * acc.value()
}

/// How the entries of a [`LaguerreMomentTable`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentProvenance {
    Series,
    Quadrature,
}

/// Symmetric table of `I_kl^(q)` for `0 <= k, l < n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreMomentTable {
    n: usize,
    q: f64,
    values: Vec<f64>,
    provenance: MomentProvenance,
}

impl LaguerreMomentTable {
    /// Builds the table from a symmetric entry function evaluated on `k <= l`.
    pub(crate) fn from_fn(
        n: usize,
        q: f64,
        provenance: MomentProvenance,
        mut entry: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut values = vec![0.0; n * n];
        for k in 0..n {
            for l in k..n {
                let v = entry(k, l);
                values[k * n + l] = v;
                values[l * n + k] = v;
            }
        }
        Self {
            n,
            q,
            values,
            provenance,
        }
    }

    pub fn series(n: usize, q: f64) -> Self {
        Self::from_fn(n, q, MomentProvenance::Series, |k, l| laguerre_moment(k, l, q))
    }

    /// Series table, checked entrywise against Gauss–Laguerre quadrature.
    pub fn verified(n: usize, q: f64) -> Result<Self> {
        let series = Self::series(n, q);
        let quad = oracles::moment_table_quadrature(n, q)?;
        let gap = series.max_abs_diff(&quad);
        if !(gap <= MOMENT_AGREEMENT_TOLERANCE) {
            return Err(Error::Precision(format!(
                "Laguerre moment series and quadrature disagree by {gap:e} for N = {n}, q = {q}"
            )));
        }
        Ok(series)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn provenance(&self) -> MomentProvenance {
        self.provenance
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.n + l]
    }

    pub fn max_abs_diff(&self, other: &LaguerreMomentTable) -> f64 {
        assert_eq!(self.n, other.n, "tables of different size");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `(sum_k I_kk)^2 - sum_{k,l} I_kl^2`.
    pub fn bracket(&self) -> f64 {
        let trace = compensated_sum((0..self.n).map(|k| self.get(k, k)));
        let squares = compensated_sum(self.values.iter().map(|v| v * v));
        trace * trace - squares
    }
}

/// `(N - 1) / (N + 1)`, the Haar average of `C_I` over pure states.
pub fn avg_coherence_pure(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    (n as f64 - 1.0) / (n as f64 + 1.0)
}

/// `1 - 1/N`.
pub fn max_coherence(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    1.0 - 1.0 / n as f64
}

/// Distance from the pure-state average to the maximum, `(N - 1) / (N (N + 1))`.
pub fn pure_average_gap(n: usize) -> f64 {
    let n = n as f64;
    (n - 1.0) / (n * (n + 1.0))
}

/// Mixed-state average from a prepared `q = 1/2` moment table of size `N`:
/// `1 - (2 + bracket / N^2) / (N + 1)`.
pub fn avg_coherence_mixed_from_table(table: &LaguerreMomentTable) -> f64 {
    let n = table.n();
    if n <= 1 {
        return 0.0;
    }
    let nf = n as f64;
    1.0 - (2.0 + table.bracket() / (nf * nf)) / (nf + 1.0)
}

/// Hilbert–Schmidt average of `C_I` over `N`-level mixed states.
///
/// Fails with [`Error::Precision`] if the moment series and the quadrature
/// oracle disagree by more than [`MOMENT_AGREEMENT_TOLERANCE`].
pub fn avg_coherence_mixed(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("dimension", "must be positive"));
    }
    if n == 1 {
        return Ok(0.0);
    }
    Ok(avg_coherence_mixed_from_table(&LaguerreMomentTable::verified(n, 0.5)?))
}

/// Hilbert–Schmidt average of `(Tr sqrt(rho))^2`: `1 + bracket / N^2`.
pub fn spectral_average(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("dimension", "must be positive"));
    }
    if n == 1 {
        return Ok(1.0);
    }
    let table = LaguerreMomentTable::verified(n, 0.5)?;
    Ok(1.0 + table.bracket() / (n * n) as f64)
}

/// Right-hand side of the exponential-weight Vandermonde integral
///
/// `int sqrt(mu_1 mu_2) exp(-sum mu_j) |Delta(mu)|^2 dmu
///   = (N-2)! prod_{j=1}^N Gamma(j)^2 * bracket`.
pub fn lemma1_rhs(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("dimension", format!("requires N >= 2, got {n}")));
    }
    let table = LaguerreMomentTable::verified(n, 0.5)?;
    let log_prefactor = ln_gamma((n - 1) as f64)
        + 2.0 * (1..=n).map(|j| ln_gamma(j as f64)).sum::<f64>();
    Ok(log_prefactor.exp() * table.bracket())
}

/// Lévy-lemma tail bound `2 exp(-(k + 1) eps^2 / (9 pi^3 eta^2 ln 2))` for an
/// `eta`-Lipschitz function on the `k`-sphere.
pub fn levy_bound(sphere_dim: usize, epsilon: f64, lipschitz: f64) -> f64 {
    let exponent = (sphere_dim as f64 + 1.0) * epsilon * epsilon
        / (levy_constant() * lipschitz * lipschitz);
    2.0 * (-exponent).exp()
}

/// `2 exp(-N^3 eps^2 / (72 pi^3 ln 2))`.
pub fn tail_bound_pure(n: usize, epsilon: f64) -> f64 {
    let n = n as f64;
    2.0 * (-(n * n * n) * epsilon * epsilon / tail_constant()).exp()
}

/// `2 exp(-N eps^2 / (72 pi^3 ln 2))`.
pub fn tail_bound_mixed(n: usize, epsilon: f64) -> f64 {
    2.0 * (-(n as f64) * epsilon * epsilon / tail_constant()).exp()
}

/// Dimension `floor((N^3 eps^2 - 1) / (3095 (3 - ln(eps N))))` of a subspace
/// whose pure states all have coherence close to the average. Valid for
/// `0 < eps < 1/N`; a negative numerator yields 0.
pub fn coherent_subspace_dim(n: usize, epsilon: f64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("dimension", "must be positive"));
    }
    let nf = n as f64;
    if !(epsilon > 0.0 && epsilon < 1.0 / nf) {
        return Err(Error::domain(
            "epsilon",
            format!("{epsilon} is not in (0, 1/N) = (0, {})", 1.0 / nf),
        ));
    }
    let numerator = nf.powi(3) * epsilon * epsilon - 1.0;
    if numerator <= 0.0 {
        return Ok(0);
    }
    let denominator = 3095.0 * (3.0 - (epsilon * nf).ln());
    Ok((numerator / denominator).floor() as u64)
}

/// `4 / N`.
pub fn lipschitz_constant_pure(n: usize) -> f64 {
    4.0 / n as f64
}

pub fn lipschitz_constant_mixed() -> f64 {
    4.0
}

/// `H_N = 1 + 1/2 + ... + 1/N`.
pub fn harmonic_number(n: usize) -> f64 {
    compensated_sum((1..=n).rev().map(|k| 1.0 / k as f64))
}

/// Haar average of the relative entropy of coherence, `H_N - 1`.
pub fn avg_cr_pure(n: usize) -> f64 {
    harmonic_number(n) - 1.0
}

/// Hilbert–Schmidt average of the relative entropy of coherence, `(N - 1) / (2N)`.
pub fn avg_cr_mixed(n: usize) -> f64 {
    (n as f64 - 1.0) / (2.0 * n as f64)
}

/// Euler beta function `Gamma(a) Gamma(b) / Gamma(a + b)`.
pub fn beta_function(alpha: f64, beta: f64) -> f64 {
    assert!(alpha > 0.0 && beta > 0.0, "beta function needs positive arguments");
    (ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta)).exp()
}
