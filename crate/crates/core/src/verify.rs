//! Verification suites: closed forms against their oracles, and the
//! structural properties of the coherence measure on random instances.

use std::f64::consts::PI;

use crate::closed_form::{
    avg_coherence_mixed, avg_coherence_pure, avg_cr_mixed, avg_cr_pure, lemma1_rhs,
    lipschitz_constant_mixed, lipschitz_constant_pure, max_coherence, pure_average_gap,
    spectral_average, LaguerreMomentTable,
};
use crate::coherence::{c_i_mixed, c_i_mixed_from_skew, c_i_pure};
use crate::linalg::{
    eig_hermitian, hs_norm, partial_trace_a, partial_trace_b, swap_operator, ComplexMatrix, DensityMatrix,
    HermitianMatrix,
};
use crate::mc::{collect_samples, estimate, EstimatorResult, McConfig};
use crate::oracles::{lemma1_mc, moment_table_quadrature, twirl_closed_form, twirl_empirical};
use crate::random::{
    sample_bipartite_pure, sample_ginibre, sample_haar_pure, sample_haar_unitary, sample_hs_mixed,
    PureState, RngStream,
};
use crate::{Complex64, Result};

/// Dimensions exercised by the property checks.
pub const PROPERTY_DIMS: [usize; 4] = [2, 3, 4, 8];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracles,
    Invariants,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, result: Result<(bool, String)>) -> Self {
        match result {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, threads: Option<usize>) -> Vec<CheckOutcome> {
    let config = McConfig::new(seed).with_threads(threads);
    let mut out = Vec::new();
    if matches!(suite, Suite::Oracles | Suite::All) {
        out.extend(oracle_checks(&config));
    }
    if matches!(suite, Suite::Invariants | Suite::All) {
        out.extend(invariant_checks(&config));
    }
    out
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

/// Derives an independent configuration for one check so checks do not share streams.
fn sub_config(config: &McConfig, tag: u64) -> McConfig {
    let mut c = *config;
    c.master_seed = config
        .master_seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(tag);
    c
}

fn describe(est: &EstimatorResult, target: f64) -> String {
    format!(
        "mean {:.6} +/- {:.2e} vs {:.6} ({:.2} sigma, {} samples)",
        est.mean,
        est.stderr,
        target,
        est.z_score(target),
        est.n_samples
    )
}

pub fn oracle_checks(config: &McConfig) -> Vec<CheckOutcome> {
    vec![
        CheckOutcome::from_result("laguerre series vs quadrature (k,l <= 127, q = 1/2)", moment_agreement(128, 0.5, 1e-9)),
        CheckOutcome::from_result("laguerre orthogonality (k,l <= 6, q = 0)", orthogonality(7, 1e-10)),
        CheckOutcome::from_result("lemma1 N=2 vs 3pi/4 and closed form (1e6 samples)", lemma1_check(2, 1_000_000, true, &sub_config(config, 1))),
        CheckOutcome::from_result("lemma1 N=3 vs closed form (1e7 samples)", lemma1_check(3, 10_000_000, false, &sub_config(config, 2))),
        CheckOutcome::from_result("twirl fixed points (identity, swap)", twirl_fixed_points()),
        CheckOutcome::from_result("twirl empirical vs closed form N=2 (1e5 samples)", twirl_check(2, 5, 100_000, &sub_config(config, 3))),
        CheckOutcome::from_result("twirl empirical vs closed form N=3 (1e5 samples)", twirl_check(3, 5, 100_000, &sub_config(config, 4))),
        CheckOutcome::from_result("spectral average N=2 vs 1 + 3pi/16 (1e6 samples)", spectral_check(2, 1_000_000, Some(1.0 + 3.0 * PI / 16.0), &sub_config(config, 5))),
        CheckOutcome::from_result("spectral average N=3 vs closed form (1e6 samples)", spectral_check(3, 1_000_000, None, &sub_config(config, 6))),
    ]
}

pub fn moment_agreement(n: usize, q: f64, tol: f64) -> Result<(bool, String)> {
    let series = LaguerreMomentTable::series(n, q);
    let quad = moment_table_quadrature(n, q)?;
    let gap = series.max_abs_diff(&quad);
    Ok((gap <= tol, format!("max |series - quadrature| = {gap:.3e} (tol {tol:e})")))
}

pub fn orthogonality(n: usize, tol: f64) -> Result<(bool, String)> {
    let series = LaguerreMomentTable::series(n, 0.0);
    let quad = moment_table_quadrature(n, 0.0)?;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        for l in 0..n {
            let delta = if k == l { 1.0 } else { 0.0 };
            worst = worst
                .max((series.get(k, l) - delta).abs())
                .max((quad.get(k, l) - delta).abs());
        }
    }
    Ok((worst <= tol, format!("max |I_kl - delta_kl| = {worst:.3e}")))
}

pub fn lemma1_check(n: usize, samples: usize, against_moments: bool, config: &McConfig) -> Result<(bool, String)> {
    let est = lemma1_mc(n, samples, config)?;
    let rhs = lemma1_rhs(n)?;
    let mut passed = est.agrees_with(rhs, 4.0);
    let mut detail = describe(&est, rhs);
    if against_moments {
        // direct moment expansion at N = 2: 2 Gamma(7/2) Gamma(3/2) - 2 Gamma(5/2)^2
        let moments = 15.0 * PI / 8.0 - 9.0 * PI / 8.0;
        passed &= est.agrees_with(moments, 4.0);
        detail.push_str(&format!("; moment value {moments:.6}"));
    }
    Ok((passed, detail))
}

pub fn random_hermitian(rng: &mut RngStream, dim: usize) -> HermitianMatrix {
    HermitianMatrix::new(sample_ginibre(rng, dim, dim)).expect("Ginibre matrices are finite")
}

pub fn twirl_fixed_points() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 4] {
        let id = ComplexMatrix::identity(n * n, n * n);
        let f = swap_operator(n).into_matrix();
        worst = worst.max(hs_norm(&(twirl_closed_form(&id, n)? - &id)));
        worst = worst.max(hs_norm(&(twirl_closed_form(&f, n)? - &f)));
    }
    Ok((worst == 0.0, format!("max deviation {worst:.3e}")))
}

/// Empirical twirls of `count` random Hermitian operators; entrywise error
/// must stay below `5 ||A||_2 / sqrt(samples)` with the operator norm `||A||_2`.
pub fn twirl_check(n: usize, count: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let mut rng = RngStream::new(config.master_seed, u64::MAX);
    let mut worst_ratio: f64 = 0.0;
    for i in 0..count {
        let h = random_hermitian(&mut rng, n * n);
        let op_norm = eig_hermitian(&h)?.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let a = h.into_matrix();
        let closed = twirl_closed_form(&a, n)?;
        let empirical = twirl_empirical(&a, n, samples, &sub_config(config, i as u64))?;
        let max_entry = (empirical - closed).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tolerance = 5.0 * op_norm / (samples as f64).sqrt();
        worst_ratio = worst_ratio.max(max_entry / tolerance);
    }
    Ok((
        worst_ratio < 1.0,
        format!("worst entrywise error is {worst_ratio:.3} of the 5||A||/sqrt(M) budget"),
    ))
}

pub fn spectral_check(n: usize, samples: usize, exact: Option<f64>, config: &McConfig) -> Result<(bool, String)> {
    let est = crate::oracles::spectral_average_check(n, samples, config)?;
    let closed = spectral_average(n)?;
    let mut passed = est.agrees_with(closed, 4.0);
    let mut detail = describe(&est, closed);
    if let Some(v) = exact {
        let gap = (closed - v).abs();
        passed &= gap <= 1e-12;
        detail.push_str(&format!("; closed form off the exact value by {gap:.1e}"));
    }
    Ok((passed, detail))
}

pub fn invariant_checks(config: &McConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for (i, &n) in PROPERTY_DIMS.iter().enumerate() {
        let c = sub_config(config, 100 + i as u64);
        out.push(CheckOutcome::from_result(format!("C_I range, mixed, N={n} (1e4 states)"), range_check(n, 10_000, &c)));
        out.push(CheckOutcome::from_result(format!("skew-sum form equals sqrt-diagonal form, N={n}"), skew_sum_equivalence(n, 1_000, &c)));
        out.push(CheckOutcome::from_result(format!("pure/mixed consistency, N={n}"), pure_mixed_consistency(n, 1_000, &c)));
        out.push(CheckOutcome::from_result(format!("Lipschitz eta=4/N on pure pairs, N={n} (1e4 pairs)"), lipschitz_pure(n, 10_000, &c)));
        out.push(CheckOutcome::from_result(format!("convexity spot check, N={n}"), convexity(n, 1_000, &c)));
        out.push(CheckOutcome::from_result(format!("extremes exact, N={n}"), extremes(n, 1_000, &c)));
        out.push(CheckOutcome::from_result(format!("Haar invariance, N={n} (1e4 states)"), haar_invariance(n, 10_000, &c)));
    }
    for (i, n) in [2usize, 3, 4].into_iter().enumerate() {
        let c = sub_config(config, 200 + i as u64);
        out.push(CheckOutcome::from_result(format!("Lipschitz eta=4 on reduced states, N={n}"), lipschitz_mixed(n, 1_000, &c)));
        out.push(CheckOutcome::from_result(format!("polygamy inequality, N={n} (1e3 states)"), polygamy(n, 1_000, &c)));
    }
    out.push(CheckOutcome::from_result("average comparisons N=2..64", average_comparisons(64)));
    out
}

pub fn range_check(n: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let values = collect_samples(samples, config, |rng| Ok(c_i_mixed(&sample_hs_mixed(rng, n))?.value))?;
    let max = max_coherence(n);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo >= 0.0 && hi <= max + 1e-10, format!("observed [{lo:.3e}, {hi:.6}] within [0, {max:.6}]")))
}

fn worst_over<F>(samples: usize, config: &McConfig, f: F) -> Result<f64>
where
    F: Fn(&mut RngStream) -> Result<f64> + Sync,
{
    Ok(collect_samples(samples, config, f)?.into_iter().fold(0.0, f64::max))
}

pub fn skew_sum_equivalence(n: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let worst = worst_over(samples, config, |rng| {
        let rho = sample_hs_mixed(rng, n);
        Ok((c_i_mixed_from_skew(&rho)?.value - c_i_mixed(&rho)?.value).abs())
    })?;
    Ok((worst < 1e-10, format!("max difference {worst:.3e}")))
}

pub fn pure_mixed_consistency(n: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let worst = worst_over(samples, config, |rng| {
        let psi = sample_haar_pure(rng, n);
        let mixed = c_i_mixed(&DensityMatrix::from_pure(&psi))?.value;
        Ok((c_i_pure(&psi).value - mixed).abs())
    })?;
    Ok((worst < 1e-12, format!("max difference {worst:.3e}")))
}

fn vector_distance(a: &PureState, b: &PureState) -> f64 {
    (a.as_vector() - b.as_vector()).norm()
}

/// Independent Haar pairs: `|C_I(psi) - C_I(phi)| <= (4/N) ||psi - phi||_2`.
pub fn lipschitz_pure(n: usize, pairs: usize, config: &McConfig) -> Result<(bool, String)> {
    let eta = lipschitz_constant_pure(n);
    let worst = worst_over(pairs, config, |rng| {
        let psi = sample_haar_pure(rng, n);
        let phi = sample_haar_pure(rng, n);
        let lhs = (c_i_pure(&psi).value - c_i_pure(&phi).value).abs();
        Ok(lhs - eta * vector_distance(&psi, &phi))
    })?;
    Ok((worst <= 1e-12, format!("max of |dC| - eta ||dpsi|| = {worst:.3e}")))
}

fn reduced_coherence(psi: &PureState, n: usize) -> Result<f64> {
    Ok(c_i_mixed(&partial_trace_b(&DensityMatrix::from_pure(psi), n, n)?)?.value)
}

/// `|C_I(rho_A) - C_I(sigma_A)| <= 4 ||psi_AB - phi_AB||_2`, on independent
/// pairs and on nearby pairs.
pub fn lipschitz_mixed(n: usize, pairs: usize, config: &McConfig) -> Result<(bool, String)> {
    let eta = lipschitz_constant_mixed();
    let worst = worst_over(pairs, config, |rng| {
        let psi = sample_bipartite_pure(rng, n);
        let phi = sample_bipartite_pure(rng, n);
        let far = (reduced_coherence(&psi, n)? - reduced_coherence(&phi, n)?).abs()
            - eta * vector_distance(&psi, &phi);
        let nudged = PureState::normalized(psi.as_vector() + phi.as_vector() * Complex64::new(1e-3, 0.0))?;
        let near = (reduced_coherence(&psi, n)? - reduced_coherence(&nudged, n)?).abs()
            - eta * vector_distance(&psi, &nudged);
        Ok(far.max(near))
    })?;
    Ok((worst <= 1e-12, format!("max of |dC| - 4 ||dpsi|| = {worst:.3e}")))
}

/// `1 - C_I(psi_AB) <= (1 - C_I(rho_A)) (1 - C_I(rho_B))` in the product basis.
pub fn polygamy(n: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let worst = worst_over(samples, config, |rng| {
        let psi = sample_bipartite_pure(rng, n);
        let rho = DensityMatrix::from_pure(&psi);
        let ca = c_i_mixed(&partial_trace_b(&rho, n, n)?)?.value;
        let cb = c_i_mixed(&partial_trace_a(&rho, n, n)?)?.value;
        Ok((1.0 - c_i_pure(&psi).value) - (1.0 - ca) * (1.0 - cb))
    })?;
    Ok((worst <= 1e-10, format!("max violation {worst:.3e}")))
}

pub fn convexity(n: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let worst = worst_over(samples, config, |rng| {
        let rho = sample_hs_mixed(rng, n);
        let sigma = sample_hs_mixed(rng, n);
        let (cr, cs) = (c_i_mixed(&rho)?.value, c_i_mixed(&sigma)?.value);
        let mut worst: f64 = f64::NEG_INFINITY;
        for p in [0.25, 0.5, 0.75] {
            let mix = DensityMatrix::mix(p, &rho, &sigma)?;
            worst = worst.max(c_i_mixed(&mix)?.value - (p * cr + (1.0 - p) * cs));
        }
        Ok(worst)
    })?;
    Ok((worst <= 1e-10, format!("max violation {worst:.3e}")))
}

/// Maximally coherent states reach `1 - 1/N` and diagonal states give 0.
pub fn extremes(n: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let max = max_coherence(n);
    let worst = worst_over(samples, config, |rng| {
        let phases: Vec<f64> = (0..n).map(|_| 2.0 * PI * rng.uniform()).collect();
        let psi = PureState::uniform_superposition(&phases);
        let top = (c_i_pure(&psi).value - max)
            .abs()
            .max((c_i_mixed(&DensityMatrix::from_pure(&psi))?.value - max).abs());

        let weights: Vec<f64> = (0..n).map(|_| rng.exponential()).collect();
        let total: f64 = weights.iter().sum();
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let diag = DensityMatrix::from_probabilities(&p)?;
        Ok(top.max(c_i_mixed(&diag)?.value.abs()))
    })?;
    Ok((worst <= 1e-12, format!("max deviation {worst:.3e}")))
}

/// Mean of `C_I(W psi)` and of `C_I(psi)` agree for a fixed Haar unitary `W`.
pub fn haar_invariance(n: usize, samples: usize, config: &McConfig) -> Result<(bool, String)> {
    let w = sample_haar_unitary(&mut RngStream::new(config.master_seed, u64::MAX), n);
    let plain = estimate(samples, config, |rng| Ok(c_i_pure(&sample_haar_pure(rng, n)).value))?;
    let rotated_config = sub_config(config, 1);
    let rotated = estimate(samples, &rotated_config, |rng| {
        Ok(c_i_pure(&sample_haar_pure(rng, n).apply(&w)?).value)
    })?;
    let combined = (plain.stderr.powi(2) + rotated.stderr.powi(2)).sqrt();
    let diff = (plain.mean - rotated.mean).abs();
    Ok((
        diff <= 4.0 * combined,
        format!("means {:.6} vs {:.6}, difference {:.2} combined sigma", plain.mean, rotated.mean, diff / combined),
    ))
}

/// Relative-entropy averages exceed the skew averages, the pure average sits
/// nearer the maximum and the mixed average nearer zero.
pub fn average_comparisons(max_n: usize) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for n in 2..=max_n {
        let pure = avg_coherence_pure(n);
        let mixed = avg_coherence_mixed(n)?;
        if !(avg_cr_pure(n) > pure) {
            failures.push(format!("C_r pure <= C_I pure at N={n}"));
        }
        if !(avg_cr_mixed(n) > mixed) {
            failures.push(format!("C_r mixed <= C_I mixed at N={n}"));
        }
        if !(pure_average_gap(n) < pure) {
            failures.push(format!("pure average not closer to the maximum at N={n}"));
        }
        if !(mixed < max_coherence(n) / 2.0) {
            failures.push(format!("mixed average not below half the maximum at N={n}"));
        }
    }
    if failures.is_empty() {
        Ok((true, format!("all orderings hold for N = 2..{max_n}")))
    } else {
        Ok((false, failures.join("; ")))
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {} :: {}", self.name, self.detail)
    }
}
