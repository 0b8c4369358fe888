//! Single-photon source models.
//!
//! Downstream modules see a source only through its indistinguishability
//! parameters `g_1..g_N` ([`GVector`]); the probability of any output
//! depends on the source exclusively through them.

mod density;
mod gaussian;
mod quadrature;

pub use density::{DensityMatrixSource, GaussianGrid, SampledSpectralEnsemble, DENSITY_TOL, EIGEN_CLAMP};
pub use gaussian::{
    eta_from_gamma, fidelity_from_eta, g2_from_fidelity, g2_from_gamma, gamma_from_eta, gamma_from_g2, GaussianSource,
};
pub use quadrature::gauss_hermite;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used when checking the g-vector laws.
pub const GVECTOR_TOL: f64 = 1e-12;

/// Indistinguishability parameters `g_1..g_N` of a source.
///
/// Every instance satisfies `g_1 = 1`, `0 <= g_k <= 1`, `g_{k+1} <= g_k` and
/// `g_n <= g_k g_{n-k}`, each to [`GVECTOR_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct GVector {
    g: Vec<f64>,
}

impl GVector {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        check_laws(&g)?;
        Ok(GVector { g })
    }

    /// All `g_k = 1`.
    pub fn ideal(n: usize) -> Self {
        GVector { g: vec![1.0; n] }
    }

    /// `g_1 = 1`, `g_k = 0` for `k >= 2`.
    pub fn classical(n: usize) -> Self {
        let mut g = vec![0.0; n];
        if n > 0 {
            g[0] = 1.0;
        }
        GVector { g }
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    /// `g_k`, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.g[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }

    pub fn is_ideal(&self) -> bool {
        self.g.iter().all(|&x| x == 1.0)
    }

    pub fn is_classical(&self) -> bool {
        self.g.iter().skip(1).all(|&x| x == 0.0)
    }

    /// First `n` entries.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n() {
            return Err(Error::Dimension(format!(
                "cannot take {n} entries of a {}-vector",
                self.n()
            )));
        }
        Ok(GVector {
            g: self.g[..n].to_vec(),
        })
    }
}

/// Checks the g-vector laws, reporting the first violation.
pub fn check_laws(g: &[f64]) -> Result<()> {
    let tol = GVECTOR_TOL;
    if g.is_empty() {
        return Err(Error::invalid("g-vector must be non-empty"));
    }
    if (g[0] - 1.0).abs() > tol {
        return Err(Error::invalid(format!("g_1 must be 1, got {}", g[0])));
    }
    for (i, &x) in g.iter().enumerate() {
        if !x.is_finite() || x < -tol || x > 1.0 + tol {
            return Err(Error::invalid(format!("g_{} = {x} is outside [0, 1]", i + 1)));
        }
        if i > 0 && x > g[i - 1] + tol {
            return Err(Error::invalid(format!(
                "g_{} = {x} exceeds g_{} = {}",
                i + 1,
                i,
                g[i - 1]
            )));
        }
    }
    for n in 2..=g.len() {
        for k in 1..n {
            if g[n - 1] > g[k - 1] * g[n - k - 1] + tol {
                return Err(Error::invalid(format!(
                    "g_{n} = {} exceeds g_{k} g_{} = {}",
                    g[n - 1],
                    n - k,
                    g[k - 1] * g[n - k - 1]
                )));
            }
        }
    }
    Ok(())
}

/// A source of identical single photons.
#[derive(Clone, Debug)]
pub enum SourceModel {
    Ideal,
    Classical,
    Gaussian(GaussianSource),
    Density(DensityMatrixSource),
    /// Explicit `g_1..g_K`; only the first `N` entries are used.
    Explicit(GVector),
}

impl SourceModel {
    /// `g_1..g_N` of this model.
    pub fn gvector(&self, n: usize) -> Result<GVector> {
        if n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        match self {
            SourceModel::Ideal => Ok(GVector::ideal(n)),
            SourceModel::Classical => Ok(GVector::classical(n)),
            SourceModel::Gaussian(src) => GVector::new((1..=n).map(|k| src.gk(k)).collect()),
            SourceModel::Density(src) => GVector::new((1..=n).map(|k| src.gk(k)).collect()),
            SourceModel::Explicit(g) => g.truncate(n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SourceModel::Ideal => "ideal",
            SourceModel::Classical => "classical",
            SourceModel::Gaussian(_) => "gaussian",
            SourceModel::Density(_) => "density",
            SourceModel::Explicit(_) => "gvector",
        }
    }
}

/// JSON source specification, e.g. `{"model":"gaussian","g2":0.99}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSpec {
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g2: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    Density {
        rho_file: PathBuf,
    },
    Gvector {
        g: Vec<f64>,
    },
    Ideal,
    Classical,
}

impl SourceSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Builds the model; relative `rho_file` paths resolve against `base_dir`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<SourceModel> {
        match self {
            SourceSpec::Gaussian { g2, eta, gamma } => {
                let given = [g2.is_some(), eta.is_some(), gamma.is_some()];
                if given.iter().filter(|&&b| b).count() != 1 {
                    return Err(Error::invalid("gaussian model needs exactly one of g2, eta, gamma"));
                }
                let src = match (g2, eta, gamma) {
                    (Some(g2), _, _) => GaussianSource::from_g2(*g2)?,
                    (_, Some(eta), _) => GaussianSource::from_eta(*eta)?,
                    (_, _, Some(gamma)) => GaussianSource::from_gamma(*gamma)?,
                    _ => unreachable!(),
                };
                Ok(SourceModel::Gaussian(src))
            }
            SourceSpec::Density { rho_file } => {
                let path = match base_dir {
                    Some(dir) if rho_file.is_relative() => dir.join(rho_file),
                    _ => rho_file.clone(),
                };
                Ok(SourceModel::Density(DensityMatrixSource::from_json_file(path)?))
            }
            SourceSpec::Gvector { g } => Ok(SourceModel::Explicit(GVector::new(g.clone())?)),
            SourceSpec::Ideal => Ok(SourceModel::Ideal),
            SourceSpec::Classical => Ok(SourceModel::Classical),
        }
    }
}
