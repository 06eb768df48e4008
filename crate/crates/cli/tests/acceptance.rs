//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};

use haar_coherence::closed_form::{
    avg_coherence_mixed, avg_coherence_pure, avg_cr_mixed, avg_cr_pure, coherent_subspace_dim,
    laguerre_moment, lemma1_rhs, max_coherence, pure_average_gap, spectral_average,
    tail_bound_pure, LaguerreMomentTable,
};
use haar_coherence::mc::{
    estimate_average, estimate_tail, figure1_analytic, Ensemble, McConfig, Measure,
};
use haar_coherence::oracles::{lemma1_mc, moment_table_quadrature, spectral_average_check};
use haar_coherence::verify::{twirl_check, twirl_fixed_points};
use haar_coherence::Result;
use num_rational::Ratio;

const SEED: u64 = 42;
/// Agreement band for Monte Carlo estimates, in standard errors.
const K_SIGMA: f64 = 4.0;
const MC_SAMPLES: usize = 100_000;
const EXACT_TOL: f64 = 1e-12;
const MOMENT_TOL: f64 = 1e-9;
const ORTHOGONALITY_TOL: f64 = 1e-10;
const GAP_REL_TOL: f64 = 1e-15;

type Criterion = fn() -> Result<Verdict>;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { passed, detail: detail.into() })
}

fn config(tag: u64) -> McConfig {
    McConfig::new(SEED.wrapping_add(tag << 32))
}

fn criterion_1() -> Result<Verdict> {
    let mut passed = avg_coherence_pure(2) == 1.0 / 3.0 && avg_coherence_pure(3) == 0.5;
    let mut detail = Vec::new();
    for n in [2usize, 3, 4, 8, 16] {
        let est = estimate_average(Ensemble::Pure, n, MC_SAMPLES, Measure::Skew, &config(1))?;
        let target = avg_coherence_pure(n);
        passed &= est.agrees_with(target, K_SIGMA);
        detail.push(format!("N={n} z={:.2}", est.z_score(target)));
    }
    verdict(passed, detail.join(", "))
}

fn criterion_2() -> Result<Verdict> {
    let d2 = (avg_coherence_mixed(2)? - (1.0 / 3.0 - PI / 16.0)).abs();
    let d3 = (avg_coherence_mixed(3)? - (0.5 - 103.0 * PI / 1024.0)).abs();
    let mut passed = d2 <= EXACT_TOL && d3 <= EXACT_TOL;
    let mut detail = vec![format!("exact forms off by {d2:.1e}, {d3:.1e}")];
    for n in [2usize, 3, 4, 8] {
        let est = estimate_average(Ensemble::Mixed, n, MC_SAMPLES, Measure::Skew, &config(2))?;
        let target = avg_coherence_mixed(n)?;
        passed &= est.agrees_with(target, K_SIGMA);
        detail.push(format!("N={n} z={:.2}", est.z_score(target)));
    }
    verdict(passed, detail.join(", "))
}

fn criterion_3() -> Result<Verdict> {
    // avg_coherence_mixed gates every table on series-vs-quadrature agreement.
    let curve = figure1_analytic(7)?;
    let monotone = curve.windows(2).all(|w| w[1].1 > w[0].1);
    let plateau = curve
        .iter()
        .filter(|(n, _)| *n >= 64)
        .all(|(_, v)| (0.25..=0.30).contains(v));
    let values: Vec<String> = curve.iter().map(|(n, v)| format!("{n}:{v:.5}")).collect();
    verdict(monotone && plateau, values.join(" "))
}

fn criterion_4() -> Result<Verdict> {
    let series = LaguerreMomentTable::series(128, 0.5);
    let quad = moment_table_quadrature(128, 0.5)?;
    let gap = series.max_abs_diff(&quad);
    let mut ortho: f64 = 0.0;
    for k in 0..=6 {
        for l in 0..=6 {
            let delta = if k == l { 1.0 } else { 0.0 };
            ortho = ortho.max((laguerre_moment(k, l, 0.0) - delta).abs());
        }
    }
    verdict(
        gap <= MOMENT_TOL && ortho <= ORTHOGONALITY_TOL,
        format!("series vs quadrature {gap:.2e}; orthogonality {ortho:.2e}"),
    )
}

fn criterion_5() -> Result<Verdict> {
    let rhs2 = lemma1_rhs(2)?;
    let est2 = lemma1_mc(2, 1_000_000, &config(5))?;
    let rhs3 = lemma1_rhs(3)?;
    let est3 = lemma1_mc(3, 10_000_000, &config(6))?;
    let moments = 3.0 * PI / 4.0;
    let passed = est2.agrees_with(moments, K_SIGMA)
        && est2.agrees_with(rhs2, K_SIGMA)
        && est3.agrees_with(rhs3, K_SIGMA);
    verdict(
        passed,
        format!(
            "N=2 {:.5}+/-{:.1e} vs 3pi/4 (z={:.2}) and {rhs2:.5} (z={:.2}); N=3 {:.4}+/-{:.1e} vs {rhs3:.4} (z={:.2})",
            est2.mean,
            est2.stderr,
            est2.z_score(moments),
            est2.z_score(rhs2),
            est3.mean,
            est3.stderr,
            est3.z_score(rhs3)
        ),
    )
}

fn criterion_6() -> Result<Verdict> {
    let (fixed, fixed_detail) = twirl_fixed_points()?;
    let (ok2, d2) = twirl_check(2, 5, MC_SAMPLES, &config(7))?;
    let (ok3, d3) = twirl_check(3, 5, MC_SAMPLES, &config(8))?;
    verdict(fixed && ok2 && ok3, format!("fixed points: {fixed_detail}; N=2: {d2}; N=3: {d3}"))
}

fn criterion_7() -> Result<Verdict> {
    let exact = 1.0 + 3.0 * PI / 16.0;
    let est2 = spectral_average_check(2, 1_000_000, &config(9))?;
    let closed3 = spectral_average(3)?;
    let est3 = spectral_average_check(3, 1_000_000, &config(10))?;
    verdict(
        est2.agrees_with(exact, K_SIGMA) && est3.agrees_with(closed3, K_SIGMA),
        format!(
            "N=2 z={:.2} vs 1+3pi/16; N=3 z={:.2} vs {closed3:.6}",
            est2.z_score(exact),
            est3.z_score(closed3)
        ),
    )
}

fn criterion_8() -> Result<Verdict> {
    let mut passed = true;
    let mut checked = Vec::new();
    let mut vacuous = 0;
    let grid: Vec<(Ensemble, usize, f64)> = [4usize, 8, 16, 29, 32, 64]
        .iter()
        .flat_map(|&n| [0.05, 0.1, 0.2, 0.3].map(|e| (Ensemble::Pure, n, e)))
        .chain(
            [2usize, 4, 8, 16]
                .iter()
                .flat_map(|&n| [0.1, 0.2, 0.3].map(|e| (Ensemble::Mixed, n, e))),
        )
        .collect();
    for (i, &(ensemble, n, eps)) in grid.iter().enumerate() {
        let t = estimate_tail(ensemble, n, eps, MC_SAMPLES, &config(100 + i as u64))?;
        if t.bound < 1.0 {
            passed &= t.is_sound();
            checked.push(format!(
                "{}({n},{eps}) {:.1e}<={:.3}",
                ensemble.as_str(),
                t.frequency,
                t.bound
            ));
        } else {
            vacuous += 1;
        }
    }
    let mut freqs = Vec::new();
    for n in [4usize, 8, 16, 32] {
        freqs.push(estimate_tail(Ensemble::Pure, n, 0.1, MC_SAMPLES, &config(200))?.frequency);
    }
    let monotone = freqs.windows(2).all(|w| w[1] <= w[0]);
    passed &= monotone && !checked.is_empty();
    verdict(
        passed,
        format!(
            "{}; {vacuous} grid points have bound >= 1; pure eps=0.1 frequencies {:?} (bound at N=32: {:.3})",
            checked.join(", "),
            freqs,
            tail_bound_pure(32, 0.1)
        ),
    )
}

fn criterion_9() -> Result<Verdict> {
    let out = Command::new(env!("CARGO_BIN_EXE_haar-coherence"))
        .args(["verify", "--suite", "all", "--seed", "42"])
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout);
    let failures: Vec<&str> = text.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    let summary = text.lines().last().unwrap_or("").to_string();
    verdict(
        out.status.code() == Some(0) && failures.is_empty(),
        if failures.is_empty() { summary } else { failures.join(" | ") },
    )
}

fn criterion_10() -> Result<Verdict> {
    let mut passed = true;
    let mut worst_gap: f64 = 0.0;
    for n in 2..=64usize {
        let mixed = avg_coherence_mixed(n)?;
        passed &= avg_cr_pure(n) > avg_coherence_pure(n);
        passed &= avg_cr_mixed(n) > mixed;
        passed &= mixed < max_coherence(n) / 2.0;
        let nq = Ratio::from_integer(n as i64);
        let one = Ratio::from_integer(1);
        let lhs = (one - one / nq) - (nq - one) / (nq + one);
        let rhs = (nq - one) / (nq * (nq + one));
        passed &= lhs == rhs;
        let exact = *rhs.numer() as f64 / *rhs.denom() as f64;
        worst_gap = worst_gap.max((pure_average_gap(n) - exact).abs() / exact);
    }
    passed &= worst_gap <= GAP_REL_TOL;
    let s = coherent_subspace_dim(40_000, 2e-5)?;
    let domain = coherent_subspace_dim(10, 0.1).is_err() && coherent_subspace_dim(10, 0.0).is_err();
    passed &= s == 2 && domain;
    verdict(
        passed,
        format!("orderings hold for N=2..64; gap rel err {worst_gap:.1e}; subspace dim(40000, 2e-5) = {s}; eps domain enforced: {domain}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("pure-state average", criterion_1),
        ("mixed-state average", criterion_2),
        ("mixed average curve N=2^m", criterion_3),
        ("Laguerre moment oracle", criterion_4),
        ("Vandermonde integral end-to-end", criterion_5),
        ("two-fold twirl", criterion_6),
        ("spectral average", criterion_7),
        ("typicality", criterion_8),
        ("property suites", criterion_9),
        ("average comparisons", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check().unwrap_or_else(|e| Verdict { passed: false, detail: format!("error: {e}") });
        if !v.passed {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if v.passed { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
