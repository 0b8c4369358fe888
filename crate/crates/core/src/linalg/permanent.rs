use num_complex::Complex64;
use rayon::prelude::*;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest order accepted by the factorial-cost oracle.
pub const NAIVE_MAX_N: usize = 10;
/// Largest order accepted by Ryser's formula.
pub const RYSER_MAX_N: usize = 30;

/// Below this order the Gray-code walk runs as one serial chunk.
const PARALLEL_MIN_N: usize = 20;
/// The subset range is split into `2^CHUNK_BITS` fixed chunks, summed in order.
const CHUNK_BITS: u32 = 6;

fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

/// Permanent by direct expansion over all `N!` permutations.
///
/// Only meant as an oracle; orders above [`NAIVE_MAX_N`] are refused.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<Complex64> {
    let n = check_square(a)?;
    if n > NAIVE_MAX_N {
        return Err(Error::capacity("permanent_naive", format!("N <= {NAIVE_MAX_N}"), n));
    }
    fn expand(a: &ComplexMatrix, row: usize, used: &mut [bool], prefix: Complex64) -> Complex64 {
        if row == used.len() {
            return prefix;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for col in 0..used.len() {
            if !used[col] {
                used[col] = true;
                total += expand(a, row + 1, used, prefix * a[(row, col)]);
                used[col] = false;
            }
        }
        total
    }
    Ok(expand(a, 0, &mut vec![false; n], Complex64::new(1.0, 0.0)))
}

/// Permanent by Ryser's inclusion-exclusion formula,
/// `perm(A) = (-1)^N sum_{S != {}} (-1)^{|S|} prod_i sum_{j in S} A_ij`.
///
/// Column subsets are visited in binary-reflected Gray-code order, so each
/// step adds or removes one column from the running row sums: `O(N 2^N)`.
/// For `N >= 20` the walk is split into a fixed number of chunks evaluated
/// in parallel; chunk sums are reduced in chunk order, so the result does
/// not depend on the thread count.
pub fn permanent_ryser(a: &ComplexMatrix) -> Result<Complex64> {
    let n = check_square(a)?;
    if n == 0 || n > RYSER_MAX_N {
        return Err(Error::capacity(
            "permanent_ryser",
            format!("1 <= N <= {RYSER_MAX_N}"),
            n,
        ));
    }
    // Column-major copy so a column update is a contiguous slice.
    let cols: Vec<Complex64> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|ij| a[ij])
        .collect();
    let total_steps: u64 = 1 << n;

    let sum = if n < PARALLEL_MIN_N {
        gray_chunk(&cols, n, 1, total_steps)
    } else {
        let chunks = 1u64 << CHUNK_BITS;
        let width = total_steps / chunks;
        let partial: Vec<Complex64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = (c * width).max(1);
                gray_chunk(&cols, n, start, (c + 1) * width)
            })
            .collect();
        partial.into_iter().fold(Complex64::new(0.0, 0.0), |acc, z| acc + z)
    };
    Ok(if n % 2 == 0 { sum } else { -sum })
}

/// Sums `(-1)^{|S|} prod_i rowsum_i(S)` over Gray-code positions `start..end`.
fn gray_chunk(cols: &[Complex64], n: usize, start: u64, end: u64) -> Complex64 {
    debug_assert!(start >= 1);
    let zero = Complex64::new(0.0, 0.0);
    // State of the walk just before `start`.
    let prev = (start - 1) ^ ((start - 1) >> 1);
    let mut row_sums = vec![zero; n];
    for j in 0..n {
        if prev >> j & 1 == 1 {
            for (r, c) in row_sums.iter_mut().zip(&cols[j * n..(j + 1) * n]) {
                *r += c;
            }
        }
    }
    let mut parity = prev.count_ones() % 2 == 1;
    let mut acc = zero;
    for step in start..end {
        let j = step.trailing_zeros() as usize;
        let gray = step ^ (step >> 1);
        let col = &cols[j * n..(j + 1) * n];
        if gray >> j & 1 == 1 {
            for (r, c) in row_sums.iter_mut().zip(col) {
                *r += c;
            }
        } else {
            for (r, c) in row_sums.iter_mut().zip(col) {
                *r -= c;
            }
        }
        parity = !parity;
        let prod = row_sums.iter().fold(Complex64::new(1.0, 0.0), |p, &r| p * r);
        if parity {
            acc -= prod;
        } else {
            acc += prod;
        }
    }
    acc
}
