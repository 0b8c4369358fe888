use mismatch_core::linalg::{gaussian_submatrix, haar_unitary, RngSeed};
use mismatch_core::montecarlo::*;
use mismatch_core::sources::{GVector, GaussianSource, SourceModel};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn within(xs: &[f64], want: f64) -> bool {
    let (mean, se) = mean_and_se(xs);
    (mean - want).abs() <= 4.0 * se
}

#[test]
fn haar_entry_moments() {
    for m in [2usize, 5, 8] {
        let mf = m as f64;
        let draws: Vec<f64> = (0..4000)
            .map(|s| haar_unitary(m, RngSeed(s)).unwrap().matrix()[(0, m - 1)].norm_sqr())
            .collect();
        assert!(within(&draws, 1.0 / mf), "M={m}");
        let fourth: Vec<f64> = draws.iter().map(|x| x * x).collect();
        assert!(within(&fourth, 2.0 / (mf * (mf + 1.0))), "M={m}");
    }
}

#[test]
fn gaussian_submatrix_moments() {
    for m in [4usize, 16, 100] {
        let mf = m as f64;
        let mut second = Vec::new();
        for s in 0..1000 {
            let a = gaussian_submatrix(3, m, RngSeed(s)).unwrap();
            second.extend(a.as_slice().iter().map(|z| z.norm_sqr()));
        }
        let fourth: Vec<f64> = second.iter().map(|x| x * x).collect();
        assert!(within(&second, 1.0 / mf), "M={m}");
        assert!(within(&fourth, 2.0 / (mf * mf)), "M={m}");
    }
}

fn gaussian(n: usize, g2: f64) -> GVector {
    SourceModel::Gaussian(GaussianSource::from_g2(g2).unwrap())
        .gvector(n)
        .unwrap()
}

#[test]
fn samples_do_not_depend_on_thread_count() {
    let g = gaussian(3, 0.9);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| sample_differences(3, 20, &g, 5500, RngSeed(42)).unwrap())
    };
    let one = run(1);
    assert_eq!(one.len(), 5500);
    for threads in [2, 4, 7] {
        assert!(one.iter().zip(run(threads)).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn seeds_are_distinct() {
    let g = gaussian(2, 0.9);
    let a = sample_differences(2, 10, &g, 1000, RngSeed(1)).unwrap();
    let b = sample_differences(2, 10, &g, 1000, RngSeed(2)).unwrap();
    assert_ne!(a, b);
}

#[test]
fn ideal_source_short_circuits() {
    let r = estimate_difference_moments(4, 30, &GVector::ideal(4), 1000, RngSeed(3)).unwrap();
    assert!(r.short_circuit && r.passed);
    assert_eq!(r.empirical_variance, 0.0);
    let t = empirical_tail(4, 30, &GVector::ideal(4), 0.1, 1000, RngSeed(3)).unwrap();
    assert!(t.short_circuit && t.passed);
    assert_eq!(t.empirical_tail, Some(1.0));
}

#[test]
fn moments_agree_with_theory() {
    for (n, m, g2, seed) in [(2, 16, 0.9, 11u64), (3, 30, 0.8, 12), (2, 8, 0.5, 13)] {
        let r = estimate_difference_moments(n, m, &gaussian(n, g2), 40_000, RngSeed(seed)).unwrap();
        assert!(
            r.passed,
            "N={n} M={m} g2={g2}: mean z {} variance z {}",
            r.mean_zscore, r.variance_zscore
        );
        assert_eq!(r.theory_variance, theory_variance(n, m, &gaussian(n, g2)).unwrap());
    }
}

#[test]
fn tail_respects_the_chebyshev_floor() {
    let r = empirical_tail(2, 16, &gaussian(2, 0.9), 0.5, 20_000, RngSeed(5)).unwrap();
    assert!(r.passed);
    assert!(r.empirical_tail.unwrap() >= r.chebyshev_floor.unwrap());
}

#[test]
fn ensemble_capacity_and_arguments() {
    let g = gaussian(7, 0.9);
    assert!(matches!(
        sample_differences(7, 50, &g, 1000, RngSeed(0)),
        Err(mismatch_core::Error::Capacity { .. })
    ));
    assert!(estimate_difference_moments(2, 10, &gaussian(2, 0.9), 10, RngSeed(0)).is_err());
}

#[test]
fn birthday_mass_halves_when_modes_double() {
    let t = birthday_bunching(2, &[40, 10, 20, 20], 300, &GVector::ideal(2), RngSeed(8)).unwrap();
    let ms: Vec<usize> = t.rows.iter().map(|r| r.m).collect();
    assert_eq!(ms, vec![10, 20, 40]);
    assert!(t.passed);
    let classical = birthday_bunching(2, &[10, 20, 40], 300, &GVector::classical(2), RngSeed(8)).unwrap();
    for (q, c) in t.rows.iter().zip(&classical.rows) {
        assert!((c.mean - 0.5 * q.mean).abs() < 1e-12);
    }
    let single = birthday_bunching(1, &[10], 50, &GVector::ideal(1), RngSeed(1)).unwrap();
    assert_eq!(single.rows[0].mean, 0.0);
}
