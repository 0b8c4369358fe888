use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photons with Gaussian spectra and Gaussian random arrival times.
///
/// The model is parametrised internally by `gamma = 2 eta^2 / (1 + 2 eta^2)`,
/// in which every closed form is algebraic:
///
/// - `g_k = (1 - gamma)^{k/2} (1 - gamma^k)^{-1/2}`
/// - `g_2 = sqrt((1 - gamma) / (1 + gamma))`, so `gamma = (1 - g_2^2) / (1 + g_2^2)`
/// - `<F> = 1 / sqrt(1 + 2 eta^2) = sqrt(1 - gamma)`, and `g_2 = F / sqrt(2 - F^2)`
///
/// `eta = Δω Δτ` is the classicality parameter: 0 is the ideal sampler and
/// `eta -> inf` (`gamma -> 1`) the classical limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSource {
    gamma: f64,
}

impl GaussianSource {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1), got {gamma}")));
        }
        Ok(GaussianSource { gamma })
    }

    pub fn from_eta(eta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::invalid(format!("eta must be finite, got {eta}")));
        }
        Self::from_gamma(gamma_from_eta(eta)?)
    }

    pub fn from_g2(g2: f64) -> Result<Self> {
        Self::from_gamma(gamma_from_g2(g2)?)
    }

    pub fn from_fidelity(fidelity: f64) -> Result<Self> {
        Self::from_g2(g2_from_fidelity(fidelity)?)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        eta_from_gamma(self.gamma).expect("gamma validated at construction")
    }

    pub fn g2(&self) -> f64 {
        g2_from_gamma(self.gamma).expect("gamma validated at construction")
    }

    pub fn mean_fidelity(&self) -> f64 {
        (1.0 - self.gamma).sqrt()
    }

    /// `g_k`; exactly 1 for `k = 1` or `gamma = 0`.
    pub fn gk(&self, k: usize) -> f64 {
        assert!(k >= 1, "g_k is defined for k >= 1");
        if k == 1 || self.gamma == 0.0 {
            return 1.0;
        }
        let kf = k as f64;
        let ln = 0.5 * kf * (-self.gamma).ln_1p() - 0.5 * (-self.gamma.powi(k as i32)).ln_1p();
        ln.exp()
    }
}

pub fn gamma_from_g2(g2: f64) -> Result<f64> {
    if !(g2 > 0.0 && g2 <= 1.0) {
        return Err(Error::invalid(format!("g2 must lie in (0, 1], got {g2}")));
    }
    let sq = g2 * g2;
    Ok((1.0 - sq) / (1.0 + sq))
}

pub fn g2_from_gamma(gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    Ok(((1.0 - gamma) / (1.0 + gamma)).sqrt())
}

/// `gamma = 2 eta^2 / (1 + 2 eta^2)`; `eta = inf` maps to the limit 1.
pub fn gamma_from_eta(eta: f64) -> Result<f64> {
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::invalid(format!("eta must be non-negative, got {eta}")));
    }
    if eta.is_infinite() {
        return Ok(1.0);
    }
    let two_eta_sq = 2.0 * eta * eta;
    Ok(two_eta_sq / (1.0 + two_eta_sq))
}

pub fn eta_from_gamma(gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    Ok((gamma / (2.0 * (1.0 - gamma))).sqrt())
}

/// `g_2 = F / sqrt(2 - F^2)`.
pub fn g2_from_fidelity(fidelity: f64) -> Result<f64> {
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::invalid(format!(
            "mean fidelity must lie in (0, 1], got {fidelity}"
        )));
    }
    Ok(fidelity / (2.0 - fidelity * fidelity).sqrt())
}

/// Mean mutual fidelity `1 / sqrt(1 + 2 eta^2)` of the Gaussian model.
pub fn fidelity_from_eta(eta: f64) -> f64 {
    1.0 / (1.0 + 2.0 * eta * eta).sqrt()
}
