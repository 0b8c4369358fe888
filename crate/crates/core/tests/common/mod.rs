#![allow(dead_code)]

use mismatch_core::linalg::{ComplexGaussian, ComplexMatrix, RngSeed, UnitaryNetwork};
use mismatch_core::permutations::{permutations, Permutation};
use mismatch_core::probability::ModeAssignment;
use mismatch_core::sources::{DensityMatrixSource, GVector};
use mismatch_core::Complex64;
use rand_xoshiro::rand_core::RngCore;
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn uniform(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn index(rng: &mut Xoshiro256PlusPlus, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

pub fn ginibre(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    ComplexGaussian::new(RngSeed(seed).rng(), 1.0).matrix(rows, cols)
}

/// `G G^dag / tr(G G^dag)` for a `dim x rank` Ginibre `G`.
pub fn random_density_matrix(dim: usize, rank: usize, seed: u64) -> ComplexMatrix {
    let g = ginibre(dim, rank, seed);
    let rho = g.matmul(&g.adjoint()).unwrap();
    let tr: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    let mut rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
    // Exact Hermitian symmetry despite rounding in the product.
    let sym = ComplexMatrix::from_fn(dim, dim, |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * 0.5);
    rho = sym;
    rho
}

/// Power sums of a random spectrum: a valid g-vector of length `n`.
pub fn random_gvector(n: usize, seed: u64) -> GVector {
    let mut rng = RngSeed(seed).rng();
    let dim = 1 + index(&mut rng, 5);
    let rank = 1 + index(&mut rng, dim);
    let src = DensityMatrixSource::new(random_density_matrix(dim, rank, seed ^ 0x5eed)).unwrap();
    GVector::new((1..=n).map(|k| src.gk(k)).collect()).unwrap()
}

/// Random distinct inputs and a random occupation vector of `n` photons in `m` modes.
pub fn random_assignment(n: usize, m: usize, seed: u64) -> ModeAssignment {
    let mut rng = RngSeed(seed).rng();
    let mut modes: Vec<usize> = (1..=m).collect();
    for i in (1..m).rev() {
        modes.swap(i, index(&mut rng, i + 1));
    }
    let inputs = &modes[..n];
    let mut occ = vec![0u32; m];
    for _ in 0..n {
        occ[index(&mut rng, m)] += 1;
    }
    ModeAssignment::new(m, inputs, &occ).unwrap()
}

pub fn random_permutation(n: usize, seed: u64) -> Permutation {
    let mut rng = RngSeed(seed).rng();
    let mut img: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        img.swap(i, index(&mut rng, i + 1));
    }
    Permutation::from_zero_based(img).unwrap()
}

/// The probability as the literal double sum over `(s1, s2)`:
/// `1/prod m! sum_{s1,s2} J(s2 s1^-1) prod_a conj(U[k_{s1 a}, l_a]) U[k_{s2 a}, l_a]`.
pub fn literal_double_sum(u: &UnitaryNetwork, a: &ModeAssignment, g: &GVector) -> Complex64 {
    let n = a.n();
    let k = a.inputs();
    let l = a.output_list();
    let mat = u.matrix();
    let perms: Vec<Permutation> = permutations(n).unwrap().collect();
    let mut total = Complex64::new(0.0, 0.0);
    for s1 in &perms {
        for s2 in &perms {
            let rel = s2.compose(&s1.inverse()).unwrap();
            let mut j = 1.0;
            for (len, count) in rel.cycle_structure().nonzero() {
                if len >= 2 {
                    j *= g.get(len).powi(count as i32);
                }
            }
            let mut term = Complex64::new(j, 0.0);
            for alpha in 0..n {
                term *= mat[(k[s1.apply(alpha)], l[alpha])].conj() * mat[(k[s2.apply(alpha)], l[alpha])];
            }
            total += term;
        }
    }
    total / a.occupation_factor()
}
