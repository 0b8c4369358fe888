use std::path::Path;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::quadrature::gauss_hermite;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Entry-wise tolerance for Hermiticity and for the unit trace.
pub const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues below `-EIGEN_CLAMP` reject the matrix; those in
/// `[-EIGEN_CLAMP, 0)` are clamped to zero.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Source described by a one-particle density matrix `rho`, with
/// `g_k = tr rho^k`.
#[derive(Clone, Debug)]
pub struct DensityMatrixSource {
    rho: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl DensityMatrixSource {
    /// Validates Hermiticity, unit trace and positivity, then caches the spectrum.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        let d = rho.rows();
        let herm_defect = rho.max_abs_diff(&rho.adjoint());
        if herm_defect > DENSITY_TOL {
            return Err(Error::invalid(format!(
                "density matrix is not Hermitian (max defect {herm_defect:e})"
            )));
        }
        let trace: Complex64 = (0..d).map(|i| rho[(i, i)]).sum();
        if (trace - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::invalid(format!("density matrix trace is {trace}, expected 1")));
        }
        // Symmetrise before the solver so round-off asymmetry cannot leak in.
        let herm = ComplexMatrix::from_fn(d, d, |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * 0.5);
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(herm.to_nalgebra())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        for lambda in &mut eigenvalues {
            if *lambda < -EIGEN_CLAMP {
                return Err(Error::invalid(format!(
                    "density matrix has negative eigenvalue {lambda:e}"
                )));
            }
            *lambda = lambda.max(0.0);
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(DensityMatrixSource { rho, eigenvalues })
    }

    /// Reads `rho` in the matrix exchange format.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(ComplexMatrix::from_json_file(path)?)
    }

    pub fn dimension(&self) -> usize {
        self.rho.rows()
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Clamped eigenvalues, largest first.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `g_k = tr rho^k = sum_i lambda_i^k`.
    pub fn gk(&self, k: usize) -> f64 {
        assert!(k >= 1, "g_k is defined for k >= 1");
        if k == 1 {
            return 1.0;
        }
        self.eigenvalues.iter().map(|l| l.powi(k as i32)).sum::<f64>().min(1.0)
    }
}

/// Quadrature discretisation of a photon ensemble: states `Phi_s` on a
/// `D`-point frequency grid with probabilities `p_s`.
#[derive(Clone, Debug)]
pub struct SampledSpectralEnsemble {
    weights: Vec<f64>,
    states: Vec<Vec<Complex64>>,
}

/// Frequency grid and arrival-time quadrature for
/// [`SampledSpectralEnsemble::gaussian_arrival_times`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianGrid {
    pub frequency_points: usize,
    /// Half-width of the grid in units of the spectral standard deviation.
    pub half_width_sigmas: f64,
    pub time_nodes: usize,
}

impl Default for GaussianGrid {
    fn default() -> Self {
        GaussianGrid {
            frequency_points: 256,
            half_width_sigmas: 6.0,
            time_nodes: 64,
        }
    }
}

impl SampledSpectralEnsemble {
    pub fn new(weights: Vec<f64>, states: Vec<Vec<Complex64>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::invalid("ensemble weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::invalid(format!("ensemble weights sum to {total}, expected 1")));
        }
        let d = states[0].len();
        if d == 0 || states.iter().any(|s| s.len() != d) {
            return Err(Error::Dimension(
                "ensemble states must share a non-zero dimension".into(),
            ));
        }
        for (s, state) in states.iter().enumerate() {
            let norm = state.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > DENSITY_TOL {
                return Err(Error::invalid(format!("state {s} has norm {norm}, expected 1")));
            }
        }
        Ok(SampledSpectralEnsemble { weights, states })
    }

    /// Random arrival times: `Phi(tau, omega) ∝ exp(-(omega - omega0)^2 / (4 Δω^2)) e^{i omega tau}`
    /// with spectral-intensity deviation `Δω = 1` and `tau ~ N(0, eta^2)`.
    ///
    /// Frequencies are measured from `omega0`, which only contributes a global
    /// phase per state. Arrival times use Gauss-Hermite nodes.
    pub fn gaussian_arrival_times(eta: f64, grid: GaussianGrid) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::invalid(format!(
                "eta must be finite and non-negative, got {eta}"
            )));
        }
        if grid.frequency_points < 2 || grid.time_nodes == 0 {
            return Err(Error::invalid("grid needs >= 2 frequency points and >= 1 time node"));
        }
        let d = grid.frequency_points;
        let half = grid.half_width_sigmas;
        let omegas: Vec<f64> = (0..d).map(|j| -half + 2.0 * half * j as f64 / (d - 1) as f64).collect();
        let envelope: Vec<f64> = omegas.iter().map(|w| (-w * w / 4.0).exp()).collect();
        let norm = envelope.iter().map(|a| a * a).sum::<f64>().sqrt();

        let (nodes, gh_weights) = gauss_hermite(grid.time_nodes);
        let gh_total: f64 = gh_weights.iter().sum();
        let weights: Vec<f64> = gh_weights.iter().map(|w| w / gh_total).collect();
        let states = nodes
            .iter()
            .map(|x| {
                let tau = std::f64::consts::SQRT_2 * eta * x;
                omegas
                    .iter()
                    .zip(&envelope)
                    .map(|(w, a)| Complex64::from_polar(a / norm, w * tau))
                    .collect()
            })
            .collect();
        Self::new(weights, states)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.states[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }

    /// `rho = sum_s p_s |Phi_s><Phi_s|`.
    pub fn density_matrix(&self) -> ComplexMatrix {
        let d = self.dimension();
        let mut rho = ComplexMatrix::zeros(d, d);
        for (p, phi) in self.weights.iter().zip(&self.states) {
            for i in 0..d {
                let a = phi[i] * p;
                for j in 0..d {
                    rho[(i, j)] += a * phi[j].conj();
                }
            }
        }
        rho
    }

    pub fn build_density_matrix(&self) -> Result<DensityMatrixSource> {
        DensityMatrixSource::new(self.density_matrix())
    }

    /// Average mutual fidelity `sum_{s,t} p_s p_t |<Phi_s|Phi_t>|`.
    pub fn average_fidelity(&self) -> f64 {
        let n = self.len();
        let mut total = 0.0;
        for s in 0..n {
            total += self.weights[s] * self.weights[s] * inner(&self.states[s], &self.states[s]).norm();
            for t in (s + 1)..n {
                total += 2.0 * self.weights[s] * self.weights[t] * inner(&self.states[s], &self.states[t]).norm();
            }
        }
        total
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
