//! Permutations of `{1..N}`, their cycle structures, integer partitions
//! with conjugacy-class sizes, and the cycle sum `chi(n)`.

mod partition;
mod permutation;

pub use partition::{
    class_size, partition_multiplicity, partitions, IntegerPartition, Multiplicity, Partitions,
    EXACT_MULTIPLICITY_MAX_N, PARTITION_MAX_N,
};
pub use permutation::{permutations, CycleStructure, Permutation, Permutations, ENUMERATION_MAX_N};

pub(crate) use partition::factorial_u128;

/// Largest `n` whose `chi(n)` fits in a `u128`.
pub const CHI_EXACT_MAX_N: usize = 33;

/// `ln n!`, summed term by term.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln 0!, ..., ln n!`.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(acc);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// The cycle sum `chi(n) = sum_{k=0}^{n} n!/k!`, exactly, for `n <= 33`.
///
/// Also equal to `sum over tau in S_n of 2^{C_1(tau)}`.
pub fn chi_exact(n: usize) -> Option<u128> {
    if n > CHI_EXACT_MAX_N {
        return None;
    }
    let mut chi: u128 = 1;
    for m in 1..=n as u128 {
        chi = m * chi + 1;
    }
    Some(chi)
}

/// `chi(n)` in floating point via `chi(n) = n chi(n-1) + 1`; overflows to
/// infinity past `n = 170`.
pub fn chi(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, m| m as f64 * acc + 1.0)
}

/// `ln chi(n) = ln n! + ln sum_{k<=n} 1/k!`, finite for every `n`.
pub fn ln_chi(n: usize) -> f64 {
    let mut term = 1.0;
    let mut series = 1.0;
    for k in 1..=n {
        term /= k as f64;
        series += term;
    }
    ln_factorial(n) + series.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_small_values() {
        assert_eq!(chi_exact(0), Some(1));
        assert_eq!(chi_exact(2), Some(5));
        assert_eq!(chi_exact(3), Some(16));
        assert_eq!(chi(3), 16.0);
        // 6 * (1 + 1 + 1/2 + 1/6)
        assert!((6.0 * (1.0 + 1.0 + 0.5 + 1.0 / 6.0) - 16.0f64).abs() < 1e-12);
    }

    #[test]
    fn chi_exact_range() {
        assert!(chi_exact(33).is_some());
        assert!(chi_exact(34).is_none());
        let c33 = chi_exact(33).unwrap() as f64;
        assert!((c33.ln() - ln_chi(33)).abs() < 1e-12);
    }

    #[test]
    fn ln_chi_matches_float_chi() {
        for n in 0..=60 {
            let rel = (ln_chi(n) - chi(n).ln()).abs();
            assert!(rel < 1e-12, "n={n}");
        }
        assert!(ln_chi(80).is_finite());
    }

    #[test]
    fn chi_over_factorial_increases_to_e() {
        let mut prev = 0.0;
        for n in 0..=20 {
            let ratio = chi_exact(n).unwrap() as f64 / factorial_u128(n) as f64;
            assert!(ratio >= prev && ratio <= std::f64::consts::E);
            prev = ratio;
        }
        assert!((std::f64::consts::E - prev) < 1e-15);
    }

    #[test]
    fn factorial_table() {
        let t = ln_factorial_table(10);
        assert_eq!(t.len(), 11);
        assert!((t[10] - (3628800f64).ln()).abs() < 1e-12);
        assert!((ln_factorial(10) - t[10]).abs() < 1e-14);
    }
}
