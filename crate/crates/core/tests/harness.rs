use haar_coherence::closed_form::max_coherence;
use haar_coherence::coherence::c_i_pure;
use haar_coherence::mc::{
    analytic_average, collect_samples, estimate, estimate_average, estimate_tail, quantile,
    run_chunked, Ensemble, McConfig, Measure, Welford,
};
use haar_coherence::random::{sample_haar_pure, RngStream};

#[test]
fn worker_count_does_not_change_results() {
    let one = McConfig::new(42).with_threads(Some(1));
    let eight = McConfig::new(42).with_threads(Some(8));
    for ensemble in [Ensemble::Pure, Ensemble::Mixed] {
        let a = estimate_average(ensemble, 4, 20_000, Measure::Skew, &one).unwrap();
        let b = estimate_average(ensemble, 4, 20_000, Measure::Skew, &eight).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
    let t1 = estimate_tail(Ensemble::Pure, 8, 0.1, 20_000, &one).unwrap();
    let t8 = estimate_tail(Ensemble::Pure, 8, 0.1, 20_000, &eight).unwrap();
    assert_eq!(t1, t8);
}

#[test]
fn single_chunk_equals_stream_zero() {
    let total = 3000;
    let config = McConfig::new(7).with_chunk_size(total);
    let est = estimate(total, &config, |rng| Ok(c_i_pure(&sample_haar_pure(rng, 3)).value)).unwrap();
    let mut rng = RngStream::new(7, 0);
    let mut acc = Welford::default();
    for _ in 0..total {
        acc.push(c_i_pure(&sample_haar_pure(&mut rng, 3)).value);
    }
    assert_eq!(est.mean.to_bits(), acc.mean().to_bits());
    assert_eq!(est.n_samples, total as u64);
}

#[test]
fn last_chunk_is_truncated() {
    let config = McConfig::new(1).with_chunk_size(300);
    let counts = run_chunked(1000, &config, |rng, count| (rng.stream_index(), count)).unwrap();
    assert_eq!(counts, vec![(0, 300), (1, 300), (2, 300), (3, 100)]);
    let xs = collect_samples(1000, &config, |rng| Ok(rng.uniform())).unwrap();
    assert_eq!(xs.len(), 1000);
}

#[test]
fn averages_agree_with_closed_forms() {
    let config = McConfig::new(2024);
    for ensemble in [Ensemble::Pure, Ensemble::Mixed] {
        for n in [2usize, 3, 4, 8] {
            let est = estimate_average(ensemble, n, 100_000, Measure::Skew, &config).unwrap();
            let target = analytic_average(ensemble, n).unwrap();
            assert!(
                est.agrees_with(target, 4.0),
                "{} N={n}: {} +/- {} vs {target}",
                ensemble.as_str(),
                est.mean,
                est.stderr
            );
        }
    }
}

#[test]
fn random_pure_states_are_nearly_maximally_coherent() {
    let n = 64;
    let values =
        collect_samples(10_000, &McConfig::new(42), |rng| Ok(c_i_pure(&sample_haar_pure(rng, n)).value))
            .unwrap();
    let p01 = quantile(&values, 0.01);
    assert!(p01 > 0.9, "1st percentile {p01}");
    assert!(values.iter().all(|&c| c <= max_coherence(n)));
}

#[test]
fn invalid_configurations_are_rejected() {
    assert!(run_chunked(10, &McConfig::new(0).with_chunk_size(0), |_, c| c).is_err());
    assert!(run_chunked(10, &McConfig::new(0).with_threads(Some(0)), |_, c| c).is_err());
    assert!(estimate_average(Ensemble::Pure, 2, 1, Measure::Skew, &McConfig::new(0)).is_err());
    assert!(estimate_tail(Ensemble::Pure, 2, -0.1, 10, &McConfig::new(0)).is_err());
    let t = estimate_tail(Ensemble::Pure, 2, 2.0, 1000, &McConfig::new(0)).unwrap();
    assert_eq!(t.frequency, 0.0);
}
