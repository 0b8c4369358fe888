use super::{ln_factorial, CycleStructure};
use crate::error::{Error, Result};

/// Largest `N` accepted by [`partitions`].
pub const PARTITION_MAX_N: usize = 80;
/// Largest `N` for which [`partition_multiplicity`] also returns the exact count.
pub const EXACT_MULTIPLICITY_MAX_N: usize = 20;

/// An integer partition of `N`, parts in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerPartition {
    parts: Vec<u32>,
}

impl IntegerPartition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::invalid(format!(
                "{parts:?} is not a partition into positive parts"
            )));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(IntegerPartition { parts })
    }

    pub fn n(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn cycle_structure(&self) -> CycleStructure {
        let mut counts = vec![0u32; self.n()];
        for &p in &self.parts {
            counts[p as usize - 1] += 1;
        }
        CycleStructure::from_counts(counts).expect("parts sum to N")
    }
}

impl From<&CycleStructure> for IntegerPartition {
    fn from(cs: &CycleStructure) -> Self {
        let mut parts = Vec::new();
        for k in (1..=cs.n()).rev() {
            parts.extend(std::iter::repeat_n(k as u32, cs.count(k) as usize));
        }
        IntegerPartition { parts }
    }
}

/// Every partition of `N` exactly once, in reverse lexicographic order
/// (`{N}` first, `{1,...,1}` last).
pub fn partitions(n: usize) -> Result<Partitions> {
    if n == 0 || n > PARTITION_MAX_N {
        return Err(Error::capacity(
            "partition enumeration",
            format!("1 <= N <= {PARTITION_MAX_N}"),
            n,
        ));
    }
    Ok(Partitions {
        current: vec![n as u32],
        done: false,
    })
}

/// Streaming partition enumerator; see [`partitions`].
///
/// Each step finds the rightmost part larger than one, decrements it, and
/// refills the tail greedily with parts no larger than the decremented value.
pub struct Partitions {
    current: Vec<u32>,
    done: bool,
}

impl Partitions {
    /// Advances in place and exposes the new partition without allocating.
    pub fn advance(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        let Some(i) = self.current.iter().rposition(|&p| p > 1) else {
            self.done = true;
            return None;
        };
        let ones = (self.current.len() - i - 1) as u32;
        let x = self.current[i] - 1;
        self.current.truncate(i);
        let mut remaining = ones + x + 1;
        while remaining > 0 {
            let part = x.min(remaining);
            self.current.push(part);
            remaining -= part;
        }
        Some(&self.current)
    }

    /// Calls `f` on every remaining partition, starting with the current one.
    pub fn for_each_parts(mut self, mut f: impl FnMut(&[u32])) {
        if self.done {
            return;
        }
        f(&self.current);
        while let Some(p) = self.advance() {
            f(p);
        }
    }
}

impl Iterator for Partitions {
    type Item = IntegerPartition;

    fn next(&mut self) -> Option<IntegerPartition> {
        if self.done {
            return None;
        }
        let out = IntegerPartition {
            parts: self.current.clone(),
        };
        if self.advance().is_none() {
            self.done = true;
        }
        Some(out)
    }
}

/// Size of the conjugacy class of `S_N` with the given cycle type,
/// `N! / prod_k (k^{C_k} C_k!)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multiplicity {
    /// Natural logarithm of the class size.
    pub ln: f64,
    /// Exact class size, present for `N <= 20`.
    pub exact: Option<u128>,
}

pub fn partition_multiplicity(p: &IntegerPartition) -> Multiplicity {
    class_size(&p.cycle_structure())
}

/// Class size for a cycle structure; see [`partition_multiplicity`].
pub fn class_size(cs: &CycleStructure) -> Multiplicity {
    let n = cs.n();
    let ln_denominator: f64 = cs
        .nonzero()
        .map(|(k, c)| c as f64 * (k as f64).ln() + ln_factorial(c as usize))
        .sum();
    let exact = (n <= EXACT_MULTIPLICITY_MAX_N).then(|| {
        let mut denominator: u128 = 1;
        for (k, c) in cs.nonzero() {
            denominator *= (k as u128).pow(c) * factorial_u128(c as usize);
        }
        factorial_u128(n) / denominator
    });
    Multiplicity {
        ln: ln_factorial(n) - ln_denominator,
        exact,
    }
}

pub(crate) fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts_of(n: usize) -> Vec<Vec<u32>> {
        partitions(n).unwrap().map(|p| p.parts().to_vec()).collect()
    }

    /// Independent count by recursion over the largest part.
    fn count_recursive(n: u32, max: u32) -> u64 {
        if n == 0 {
            return 1;
        }
        (1..=max.min(n)).map(|p| count_recursive(n - p, p)).sum()
    }

    /// Euler's pentagonal-number recurrence for p(n).
    fn count_pentagonal(n: usize) -> u64 {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut total = 0i64;
            for k in 1.. {
                let g1 = k * (3 * k - 1) / 2;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                total += sign * p[m - g1];
                let g2 = k * (3 * k + 1) / 2;
                if g2 <= m {
                    total += sign * p[m - g2];
                }
            }
            p[m] = total;
        }
        p[n] as u64
    }

    #[test]
    fn partitions_of_three() {
        assert_eq!(parts_of(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(parts_of(1), vec![vec![1]]);
    }

    #[test]
    fn partition_counts_match_oracles() {
        assert_eq!(count_recursive(5, 5), 7);
        assert_eq!(parts_of(5).len(), 7);
        for n in 1..=25 {
            assert_eq!(
                partitions(n).unwrap().count() as u64,
                count_recursive(n as u32, n as u32),
                "n={n}"
            );
        }
        assert_eq!(count_pentagonal(50), 204226);
        let mut streamed = 0u64;
        partitions(50).unwrap().for_each_parts(|_| streamed += 1);
        assert_eq!(streamed, 204226);
    }

    #[test]
    fn every_partition_is_canonical_and_distinct() {
        let all = parts_of(12);
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for p in &all {
            assert_eq!(p.iter().sum::<u32>(), 12);
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn partition_bounds() {
        assert!(partitions(0).is_err());
        assert!(matches!(partitions(81), Err(Error::Capacity { .. })));
    }

    #[test]
    fn small_class_sizes() {
        let m = |parts: Vec<u32>| partition_multiplicity(&IntegerPartition::new(parts).unwrap());
        assert_eq!(m(vec![1, 1, 1]).exact, Some(1));
        assert_eq!(m(vec![3]).exact, Some(2));
        assert_eq!(m(vec![2, 1]).exact, Some(3));
        assert_eq!(m(vec![2, 2]).exact, Some(3));
        assert!((m(vec![2, 2]).ln - 3f64.ln()).abs() < 1e-14);
        assert_eq!(m(vec![1; 21]).exact, None);
        assert!(m(vec![1; 21]).ln.abs() < 1e-12);
    }

    #[test]
    fn cycle_structure_roundtrip() {
        let p = IntegerPartition::new(vec![1, 3, 1, 2]).unwrap();
        assert_eq!(p.parts(), &[3, 2, 1, 1]);
        let cs = p.cycle_structure();
        assert_eq!(cs.counts(), &[2, 1, 1, 0, 0, 0, 0]);
        assert_eq!(IntegerPartition::from(&cs), p);
    }
}
