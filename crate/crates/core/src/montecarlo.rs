//! Monte Carlo checks of the Gaussian-ensemble identities.
//!
//! In the dilute limit an `N x N` submatrix of a Haar network behaves like a
//! matrix of i.i.d. complex Gaussians with variance `1/M`. Over that ensemble
//! `P_0 - P_eta` has zero mean and variance `(N!/M^N)^2 V`; the routines here
//! sample the difference and compare both moments, and the Chebyshev tail,
//! with theory. [`birthday_bunching`] checks that the probability of bunched
//! outputs of true Haar networks falls off like `N^2/M`.
//!
//! Sampling is split into fixed blocks of [`BLOCK_SIZE`] draws. Block `b`
//! draws from `seed.derive(b)`, and block results are concatenated in block
//! order, so a report depends only on its arguments and not on the number of
//! worker threads.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, ComplexGaussian, RngSeed};
use crate::permutations::ln_factorial;
use crate::probability::{bunching_mass, cycle_class_sums, BUNCHING_MAX_MODES, ENUMERATION_MAX_PHOTONS};
use crate::sources::GVector;
use crate::variance::{chebyshev_success, fmt17, variance_partition};

/// Largest `N` for the ensemble estimators.
pub const ENSEMBLE_MAX_N: usize = 6;
/// Fewest samples accepted by the ensemble estimators.
pub const MIN_SAMPLES: usize = 1000;
/// Draws per RNG stream.
pub const BLOCK_SIZE: usize = 1000;
/// Width, in standard errors, of every statistical check.
pub const Z_LIMIT: f64 = 4.0;
/// Largest `N` for [`birthday_bunching`].
pub const BIRTHDAY_MAX_N: usize = 3;
/// Accepted range for the bunching-mass ratio between `2M` and `M` modes.
pub const HALVING_RANGE: (f64, f64) = (0.35, 0.65);
/// Upper bound on `<bunching mass> M / N^2`.
pub const SCALED_MASS_BOUND: f64 = 1.0;

/// Moments of `P_0 - P_eta` over the Gaussian ensemble, with theory values.
#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloReport {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub g: GVector,
    pub seed: RngSeed,
    /// True when `g` is ideal and the difference vanishes identically.
    pub short_circuit: bool,
    pub empirical_mean: f64,
    pub mean_standard_error: f64,
    pub empirical_variance: f64,
    pub variance_standard_error: f64,
    pub theory_mean: f64,
    pub theory_variance: f64,
    pub mean_zscore: f64,
    pub variance_zscore: f64,
    pub variance_relative_error: f64,
    pub tail_epsilon: Option<f64>,
    pub empirical_tail: Option<f64>,
    pub tail_standard_error: Option<f64>,
    pub chebyshev_floor: Option<f64>,
    pub passed: bool,
}

impl MonteCarloReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check_ensemble_args(n: usize, m: usize, g: &GVector, samples: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("N and M must be at least 1"));
    }
    if n > ENSEMBLE_MAX_N {
        return Err(Error::capacity(
            "Gaussian-ensemble sampling",
            format!("N <= {ENSEMBLE_MAX_N}"),
            n,
        ));
    }
    if g.n() != n {
        return Err(Error::Dimension(format!(
            "{n} photons but g-vector of length {}",
            g.n()
        )));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    Ok(())
}

/// `P_0 - P_eta` for `samples` independent Gaussian submatrices, in draw order.
///
/// Rows of each submatrix are the input modes and columns the output modes
/// `l = 1..N`, so no output is bunched.
pub fn sample_differences(n: usize, m: usize, g: &GVector, samples: usize, seed: RngSeed) -> Result<Vec<f64>> {
    check_ensemble_args(n, m, g, samples)?;
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let variance = 1.0 / m as f64;
    let per_block: Vec<Result<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
            let mut gauss = ComplexGaussian::new(seed.derive(b as u64).rng(), variance);
            let mut out = Vec::with_capacity(len);
            for i in 0..len {
                let a = gauss.matrix(n, n);
                let d = cycle_class_sums(&a)?.ideal_minus(g)?;
                if !d.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "sample {} of block {b} gave P_0 - P_eta = {d}",
                        i
                    )));
                }
                out.push(d);
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::with_capacity(samples);
    for block in per_block {
        all.extend(block?);
    }
    Ok(all)
}

/// `(N!/M^N)^2 V`.
pub fn theory_variance(n: usize, m: usize, g: &GVector) -> Result<f64> {
    let scale = (ln_factorial(n) - n as f64 * (m as f64).ln()).exp();
    Ok(scale * scale * variance_partition(g)?)
}

fn zero_report(
    n: usize,
    m: usize,
    g: &GVector,
    samples: usize,
    seed: RngSeed,
    epsilon: Option<f64>,
) -> MonteCarloReport {
    MonteCarloReport {
        n,
        m,
        samples,
        g: g.clone(),
        seed,
        short_circuit: true,
        empirical_mean: 0.0,
        mean_standard_error: 0.0,
        empirical_variance: 0.0,
        variance_standard_error: 0.0,
        theory_mean: 0.0,
        theory_variance: 0.0,
        mean_zscore: 0.0,
        variance_zscore: 0.0,
        variance_relative_error: 0.0,
        tail_epsilon: epsilon,
        empirical_tail: epsilon.map(|_| 1.0),
        tail_standard_error: epsilon.map(|_| 0.0),
        chebyshev_floor: epsilon.map(|_| 1.0),
        passed: true,
    }
}

fn zscore(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn moments_report(n: usize, m: usize, g: &GVector, seed: RngSeed, diffs: &[f64], theory_var: f64) -> MonteCarloReport {
    let count = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / count;
    let (mut s2, mut s4) = (0.0, 0.0);
    for &d in diffs {
        let c = (d - mean) * (d - mean);
        s2 += c;
        s4 += c * c;
    }
    let var = s2 / (count - 1.0);
    let m2 = s2 / count;
    let m4 = s4 / count;
    let mean_se = (var / count).sqrt();
    // Var(s^2) ~ (mu_4 - sigma^4) / n, taken from the sample fourth moment.
    let var_se = ((m4 - m2 * m2).max(0.0) / count).sqrt();
    let mean_z = zscore(mean, mean_se);
    let var_z = zscore(var - theory_var, var_se);
    MonteCarloReport {
        n,
        m,
        samples: diffs.len(),
        g: g.clone(),
        seed,
        short_circuit: false,
        empirical_mean: mean,
        mean_standard_error: mean_se,
        empirical_variance: var,
        variance_standard_error: var_se,
        theory_mean: 0.0,
        theory_variance: theory_var,
        mean_zscore: mean_z,
        variance_zscore: var_z,
        variance_relative_error: if theory_var > 0.0 {
            (var - theory_var) / theory_var
        } else {
            0.0
        },
        tail_epsilon: None,
        empirical_tail: None,
        tail_standard_error: None,
        chebyshev_floor: None,
        passed: mean_z.abs() < Z_LIMIT && var_z.abs() < Z_LIMIT,
    }
}

/// Sample mean and variance of `P_0 - P_eta`, checked against zero and
/// `(N!/M^N)^2 V` at [`Z_LIMIT`] standard errors.
pub fn estimate_difference_moments(
    n: usize,
    m: usize,
    g: &GVector,
    samples: usize,
    seed: RngSeed,
) -> Result<MonteCarloReport> {
    check_ensemble_args(n, m, g, samples)?;
    if g.is_ideal() {
        return Ok(zero_report(n, m, g, samples, seed, None));
    }
    let diffs = sample_differences(n, m, g, samples, seed)?;
    Ok(moments_report(n, m, g, seed, &diffs, theory_variance(n, m, g)?))
}

/// Like [`estimate_difference_moments`], adding the frequency of
/// `|P_0 - P_eta| < eps N!/M^N` and its Chebyshev floor `1 - V/eps^2`.
///
/// The tail check is one-sided: it fails only when the frequency falls more
/// than [`Z_LIMIT`] binomial standard errors below the floor.
pub fn empirical_tail(
    n: usize,
    m: usize,
    g: &GVector,
    epsilon: f64,
    samples: usize,
    seed: RngSeed,
) -> Result<MonteCarloReport> {
    check_ensemble_args(n, m, g, samples)?;
    let v = variance_partition(g)?;
    let floor = chebyshev_success(v, epsilon)?;
    if g.is_ideal() {
        return Ok(zero_report(n, m, g, samples, seed, Some(epsilon)));
    }
    let diffs = sample_differences(n, m, g, samples, seed)?;
    let scale = (ln_factorial(n) - n as f64 * (m as f64).ln()).exp();
    let mut report = moments_report(n, m, g, seed, &diffs, scale * scale * v);
    let threshold = epsilon * scale;
    let inside = diffs.iter().filter(|d| d.abs() < threshold).count() as f64;
    let count = diffs.len() as f64;
    let freq = inside / count;
    // The larger of the empirical and floor-based binomial errors.
    let p_floor = floor.clamp(0.0, 1.0);
    let se = (freq * (1.0 - freq) / count)
        .max(p_floor * (1.0 - p_floor) / count)
        .sqrt();
    report.tail_epsilon = Some(epsilon);
    report.empirical_tail = Some(freq);
    report.tail_standard_error = Some(se);
    report.chebyshev_floor = Some(floor);
    report.passed = report.passed && freq >= floor - Z_LIMIT * se;
    Ok(report)
}

/// Mean bunching mass of Haar networks with a given number of modes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirthdayRow {
    pub m: usize,
    pub mean: f64,
    pub standard_error: f64,
    /// `mean M / N^2`.
    pub scaled: f64,
    /// Mean at this `M` over the mean at the previous row's `M`.
    pub ratio: Option<f64>,
    pub ratio_standard_error: Option<f64>,
    /// Set when this row has twice the previous row's modes.
    pub halving_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BirthdayTable {
    pub n: usize,
    pub haar_samples: usize,
    pub g: GVector,
    pub seed: RngSeed,
    pub rows: Vec<BirthdayRow>,
    pub passed: bool,
}

impl BirthdayTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "M,mean_bunching_mass,standard_error,scaled_mass,ratio,ratio_standard_error,halving_ok"
        )?;
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.m,
                fmt17(r.mean),
                fmt17(r.standard_error),
                fmt17(r.scaled),
                opt(r.ratio),
                opt(r.ratio_standard_error),
                r.halving_ok.map(|b| b.to_string()).unwrap_or_default()
            )?;
        }
        Ok(())
    }
}

fn within_slack(x: f64, se: f64, (lo, hi): (f64, f64)) -> bool {
    x + Z_LIMIT * se >= lo && x - Z_LIMIT * se <= hi
}

/// Haar-averaged bunching mass for each `M` in `m_list` (sorted and
/// deduplicated), photons entering modes `1..N`.
///
/// Sample `j` at `M` modes uses the network drawn from
/// `seed.derive(M).derive(j)`. Each row doubling its predecessor's `M` is
/// checked for a mass ratio in [`HALVING_RANGE`], and every row for a scaled
/// mass below [`SCALED_MASS_BOUND`], both with [`Z_LIMIT`] standard errors
/// of slack.
pub fn birthday_bunching(
    n: usize,
    m_list: &[usize],
    haar_samples: usize,
    g: &GVector,
    seed: RngSeed,
) -> Result<BirthdayTable> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n > BIRTHDAY_MAX_N.min(ENUMERATION_MAX_PHOTONS) {
        return Err(Error::capacity(
            "birthday bunching",
            format!("N <= {BIRTHDAY_MAX_N}"),
            n,
        ));
    }
    if g.n() != n {
        return Err(Error::Dimension(format!(
            "{n} photons but g-vector of length {}",
            g.n()
        )));
    }
    if haar_samples < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 Haar samples, got {haar_samples}"
        )));
    }
    let mut ms = m_list.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.is_empty() {
        return Err(Error::invalid("empty list of mode counts"));
    }
    if let Some(&m) = ms.iter().find(|&&m| m < n) {
        return Err(Error::invalid(format!("M = {m} is smaller than N = {n}")));
    }
    if let Some(&m) = ms.iter().find(|&&m| m > BUNCHING_MAX_MODES) {
        return Err(Error::capacity(
            "birthday bunching",
            format!("M <= {BUNCHING_MAX_MODES}"),
            m,
        ));
    }
    let inputs: Vec<usize> = (1..=n).collect();
    let mut rows: Vec<BirthdayRow> = Vec::with_capacity(ms.len());
    for &m in &ms {
        let stream = seed.derive(m as u64);
        let masses: Vec<Result<f64>> = (0..haar_samples)
            .into_par_iter()
            .map(|j| bunching_mass(&haar_unitary(m, stream.derive(j as u64))?, &inputs, g))
            .collect();
        let masses = masses.into_iter().collect::<Result<Vec<f64>>>()?;
        let count = masses.len() as f64;
        let mean = masses.iter().sum::<f64>() / count;
        let var = masses.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
        let se = (var / count).sqrt();
        let (ratio, ratio_se, halving_ok) = match rows.last() {
            Some(prev) if prev.mean > 0.0 && mean > 0.0 => {
                let r = mean / prev.mean;
                let rse = r * ((se / mean).powi(2) + (prev.standard_error / prev.mean).powi(2)).sqrt();
                let ok = (m == 2 * prev.m).then(|| within_slack(r, rse, HALVING_RANGE));
                (Some(r), Some(rse), ok)
            }
            _ => (None, None, None),
        };
        rows.push(BirthdayRow {
            m,
            mean,
            standard_error: se,
            scaled: mean * m as f64 / (n * n) as f64,
            ratio,
            ratio_standard_error: ratio_se,
            halving_ok,
        });
    }
    let bounded = rows
        .iter()
        .all(|r| r.scaled - Z_LIMIT * r.standard_error * r.m as f64 / (n * n) as f64 <= SCALED_MASS_BOUND);
    let passed = bounded && rows.iter().all(|r| r.halving_ok != Some(false));
    Ok(BirthdayTable {
        n,
        haar_samples,
        g: g.clone(),
        seed,
        rows,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{GaussianSource, SourceModel};

    fn g2_vector(g2: f64) -> GVector {
        GVector::new(vec![1.0, g2]).unwrap()
    }

    #[test]
    fn ideal_source_short_circuits() {
        let r = estimate_difference_moments(3, 20, &GVector::ideal(3), 1000, RngSeed(1)).unwrap();
        assert!(r.short_circuit && r.passed);
        assert_eq!(r.empirical_variance, 0.0);
        let t = empirical_tail(2, 16, &GVector::ideal(2), 0.1, 1000, RngSeed(1)).unwrap();
        assert_eq!(t.empirical_tail, Some(1.0));
    }

    #[test]
    fn argument_checks() {
        let g = g2_vector(0.9);
        assert!(matches!(
            estimate_difference_moments(2, 16, &g, 10, RngSeed(0)),
            Err(Error::Invalid(_))
        ));
        let g7 = SourceModel::Gaussian(GaussianSource::from_gamma(0.1).unwrap())
            .gvector(7)
            .unwrap();
        assert!(matches!(
            estimate_difference_moments(7, 64, &g7, 1000, RngSeed(0)),
            Err(Error::Capacity { .. })
        ));
        assert!(estimate_difference_moments(3, 16, &g, 1000, RngSeed(0)).is_err());
        assert!(empirical_tail(2, 16, &g, 0.0, 1000, RngSeed(0)).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_blocked() {
        let g = g2_vector(0.8);
        let a = sample_differences(2, 8, &g, 2500, RngSeed(42)).unwrap();
        let b = sample_differences(2, 8, &g, 2500, RngSeed(42)).unwrap();
        assert_eq!(a, b);
        // A prefix of whole blocks does not depend on the total.
        let c = sample_differences(2, 8, &g, 2000, RngSeed(42)).unwrap();
        assert_eq!(&a[..2000], &c[..]);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let d = pool.install(|| sample_differences(2, 8, &g, 2500, RngSeed(42)).unwrap());
        assert_eq!(a, d);
    }

    #[test]
    fn two_photon_difference_by_hand() {
        // For distinct outputs, P_0 - P_g = (1 - g2) 2 Re(a00 a11 conj(a01 a10)).
        let g = g2_vector(0.7);
        let d = sample_differences(2, 4, &g, 1000, RngSeed(5)).unwrap();
        let mut gauss = ComplexGaussian::new(RngSeed(5).derive(0).rng(), 0.25);
        for &x in d.iter().take(20) {
            let a = gauss.matrix(2, 2);
            let cross = a[(0, 0)] * a[(1, 1)] * (a[(0, 1)] * a[(1, 0)]).conj();
            let expected = 0.3 * 2.0 * cross.re;
            assert!((x - expected).abs() <= 1e-14 * expected.abs().max(1e-3));
        }
    }

    #[test]
    fn small_run_agrees_with_theory() {
        let g = g2_vector(0.5);
        let r = estimate_difference_moments(2, 8, &g, 20_000, RngSeed(7)).unwrap();
        assert!((r.theory_variance - (2.0f64 / 64.0).powi(2) * 0.125).abs() < 1e-18);
        assert!(r.mean_zscore.abs() < Z_LIMIT, "{r:?}");
        assert!(r.variance_zscore.abs() < Z_LIMIT, "{r:?}");
    }

    #[test]
    fn single_photon_never_bunches() {
        let t = birthday_bunching(1, &[8, 4], 5, &GVector::ideal(1), RngSeed(3)).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![4, 8]);
        assert!(t.rows.iter().all(|r| r.mean == 0.0 && r.ratio.is_none()));
        assert!(t.passed);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 3);
    }

    #[test]
    fn birthday_argument_checks() {
        let g = GVector::ideal(4);
        assert!(matches!(
            birthday_bunching(4, &[10], 10, &g, RngSeed(0)),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            birthday_bunching(2, &[41], 10, &GVector::ideal(2), RngSeed(0)),
            Err(Error::Capacity { .. })
        ));
        assert!(birthday_bunching(2, &[], 10, &GVector::ideal(2), RngSeed(0)).is_err());
    }
}
