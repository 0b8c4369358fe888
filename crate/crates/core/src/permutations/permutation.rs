use std::fmt;

use crate::error::{Error, Result};

/// Largest `N` for which [`permutations`] will enumerate `S_N`.
pub const ENUMERATION_MAX_N: usize = 10;

/// A permutation of `{1..N}`, stored 0-based: `image[a] = sigma(a)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Builds from a 0-based image, checking that it is a bijection.
    pub fn from_zero_based(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::invalid(format!("{image:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Permutation { image })
    }

    /// Builds from the documented 1-based image `(sigma(1), ..., sigma(N))`.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::invalid(format!("{image:?} is not a 1-based permutation")));
        }
        Self::from_zero_based(image.iter().map(|&x| x - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// 0-based image.
    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.image.iter().map(|&x| x + 1).collect()
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.image[a]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (a, &b) in self.image.iter().enumerate() {
            inv[b] = a;
        }
        Permutation { image: inv }
    }

    /// `self ∘ other`, i.e. `a -> self(other(a))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "cannot compose permutations of {} and {} elements",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            image: other.image.iter().map(|&b| self.image[b]).collect(),
        })
    }

    pub fn is_involution(&self) -> bool {
        self.image.iter().enumerate().all(|(a, &b)| self.image[b] == a)
    }

    pub fn cycle_structure(&self) -> CycleStructure {
        let n = self.len();
        let mut counts = vec![0u32; n];
        let mut visited = vec![false; n];
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut a = start;
            while !visited[a] {
                visited[a] = true;
                a = self.image[a];
                len += 1;
            }
            counts[len - 1] += 1;
        }
        CycleStructure { counts }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_based())
    }
}

/// Cycle type of a permutation of `N` elements: `C_k` cycles of length `k`,
/// with `sum_k k C_k = N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleStructure {
    /// `counts[k - 1] = C_k`.
    counts: Vec<u32>,
}

impl CycleStructure {
    /// From `C_1..C_N`; the length of `counts` fixes `N`.
    pub fn from_counts(counts: Vec<u32>) -> Result<Self> {
        let n = counts.len();
        let weight: usize = counts.iter().enumerate().map(|(i, &c)| (i + 1) * c as usize).sum();
        if weight != n {
            return Err(Error::invalid(format!(
                "cycle counts {counts:?} have sum k*C_k = {weight}, expected {n}"
            )));
        }
        Ok(CycleStructure { counts })
    }

    pub fn identity(n: usize) -> Self {
        let mut counts = vec![0; n];
        if n > 0 {
            counts[0] = n as u32;
        }
        CycleStructure { counts }
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// `C_k` for `k >= 1`; zero beyond `N`.
    pub fn count(&self, k: usize) -> u32 {
        assert!(k >= 1, "cycle lengths start at 1");
        self.counts.get(k - 1).copied().unwrap_or(0)
    }

    pub fn fixed_points(&self) -> u32 {
        self.count(1)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Non-zero `(k, C_k)` pairs in increasing `k`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i + 1, c))
    }
}

/// All permutations of `N` elements in lexicographic order of the image.
pub fn permutations(n: usize) -> Result<Permutations> {
    if n == 0 || n > ENUMERATION_MAX_N {
        return Err(Error::capacity(
            "permutation enumeration",
            format!("1 <= N <= {ENUMERATION_MAX_N}"),
            n,
        ));
    }
    Ok(Permutations {
        next: Some((0..n).collect()),
    })
}

/// Lexicographic stream over `S_N`; see [`permutations`].
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { image: current })
    }
}

/// Advances to the lexicographic successor; false once at the last one.
fn next_lexicographic(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let pivot = i - 1;
    let j = (i..a.len()).rev().find(|&j| a[j] > a[pivot]).expect("successor exists");
    a.swap(pivot, j);
    a[i..].reverse();
    true
}
