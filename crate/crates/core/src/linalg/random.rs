use std::f64::consts::TAU;

use num_complex::Complex64;
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, UnitaryNetwork};
use crate::error::{Error, Result};

/// Seed for the crate's xoshiro256++ streams.
///
/// Identical seeds reproduce identical streams on every platform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(self.0)
    }

    /// Seed of the `index`-th substream: one SplitMix64 finalisation of
    /// `seed + (index + 1) * 0x9E3779B97F4A7C15`.
    pub fn derive(self, index: u64) -> RngSeed {
        let mut z = self
            .0
            .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

impl From<u64> for RngSeed {
    fn from(s: u64) -> Self {
        RngSeed(s)
    }
}

/// Complex Gaussian sampler with `E z = 0` and `E |z|^2 = variance`.
///
/// Each draw consumes two 53-bit uniforms and applies one Box-Muller
/// transform; the cosine branch gives the real part, the sine branch the
/// imaginary part.
pub struct ComplexGaussian<R> {
    rng: R,
    scale: f64,
}

impl<R: RngCore> ComplexGaussian<R> {
    pub fn new(rng: R, variance: f64) -> Self {
        ComplexGaussian {
            rng,
            scale: variance.sqrt(),
        }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn sample(&mut self) -> Complex64 {
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        // |z|^2 = -ln(u1) is exponential with unit mean before scaling.
        let radius = self.scale * (-u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        Complex64::new(radius * c, radius * s)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.sample())
    }
}

/// Haar-distributed `M x M` unitary.
///
/// A Ginibre matrix of i.i.d. standard complex Gaussians is QR-factorised
/// and each column of `Q` is multiplied by the phase of the matching
/// diagonal entry of `R`, which makes the factorisation unique and the
/// result exactly Haar.
pub fn haar_unitary(modes: usize, seed: RngSeed) -> Result<UnitaryNetwork> {
    if modes == 0 {
        return Err(Error::invalid("haar_unitary needs M >= 1"));
    }
    let ginibre = ComplexGaussian::new(seed.rng(), 1.0).matrix(modes, modes);
    Ok(unitary_from_ginibre(&ginibre))
}

/// The unique unitary `Q` with `G = Q R`, `R` upper triangular with a
/// positive diagonal.
pub fn unitary_from_ginibre(ginibre: &ComplexMatrix) -> UnitaryNetwork {
    let qr = ginibre.to_nalgebra().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    UnitaryNetwork {
        matrix: ComplexMatrix::from_nalgebra(&q),
    }
}

/// `N x N` matrix of i.i.d. complex Gaussians with `<U_kl> = 0` and
/// `<|U_kl|^2> = 1/M`, i.e. density `(M/pi) exp(-M |U_kl|^2)`.
pub fn gaussian_submatrix(n: usize, modes: usize, seed: RngSeed) -> Result<ComplexMatrix> {
    if n == 0 || modes == 0 {
        return Err(Error::invalid("gaussian_submatrix needs N >= 1 and M >= 1"));
    }
    Ok(ComplexGaussian::new(seed.rng(), 1.0 / modes as f64).matrix(n, n))
}
