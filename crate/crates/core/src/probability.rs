//! Exact output probabilities of a linear optical network fed with
//! partially indistinguishable photons.
//!
//! For inputs `k_1..k_N` and an output occupation `m_1..m_M` (output list
//! `l_1..l_N`, mode `j` repeated `m_j` times), with `A_{i,a} = U_{k_i, l_a}`:
//!
//! ```text
//! P = 1/prod(m_l!) sum_{s1, s2} J(s2 s1^-1) prod_a conj(A_{s1(a),a}) A_{s2(a),a}
//! ```
//!
//! `J` depends only on the cycle structure of the relative permutation
//! `r = s2 s1^-1`, `J(r) = prod_{k>=2} g_k^{C_k(r)}`. Grouping by `r`,
//!
//! ```text
//! T(r) = sum_{s1} prod_a conj(A_{s1(a),a}) A_{r s1(a),a} = perm(C^r),
//! C^r_{a,i} = conj(A_{i,a}) A_{r(i),a},
//! ```
//!
//! and `T(r^-1) = conj T(r)`, so only one member of each pair `{r, r^-1}`
//! is evaluated.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{permanent_ryser, ComplexMatrix, UnitaryNetwork, RYSER_MAX_N};
use crate::permutations::{factorial_u128, permutations, CycleStructure};
use crate::sources::GVector;

/// Largest `N` evaluated through the general double sum.
pub const GENERAL_MAX_N: usize = 8;
/// Largest `N` for [`normalization_check`] and [`bunching_mass`].
pub const ENUMERATION_MAX_PHOTONS: usize = 4;
/// Largest `M` for [`normalization_check`].
pub const NORMALIZATION_MAX_MODES: usize = 8;
/// Largest `M` for [`bunching_mass`].
pub const BUNCHING_MAX_MODES: usize = 40;

/// Imaginary residue (relative to the term magnitude) tolerated silently.
pub const IMAG_WARN_TOL: f64 = 1e-10;
/// Imaginary residue beyond which evaluation aborts.
pub const IMAG_ABORT_TOL: f64 = 1e-8;
/// Slack around `[0, 1]` before clamping.
pub const RANGE_TOL: f64 = 1e-12;

/// Distinct input modes and an output occupation pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeAssignment {
    modes: usize,
    /// 0-based input modes.
    inputs: Vec<usize>,
    occupations: Vec<u32>,
}

impl ModeAssignment {
    /// `inputs` are 1-based mode numbers; `occupations` has one entry per mode.
    pub fn new(modes: usize, inputs: &[usize], occupations: &[u32]) -> Result<Self> {
        if modes == 0 {
            return Err(Error::invalid("network must have at least one mode"));
        }
        if inputs.is_empty() {
            return Err(Error::invalid("at least one input photon is required"));
        }
        let mut seen = vec![false; modes];
        for &k in inputs {
            if k == 0 || k > modes {
                return Err(Error::invalid(format!("input mode {k} outside 1..={modes}")));
            }
            if std::mem::replace(&mut seen[k - 1], true) {
                return Err(Error::invalid(format!(
                    "input mode {k} repeated; inputs must be distinct"
                )));
            }
        }
        if occupations.len() != modes {
            return Err(Error::invalid(format!(
                "{} occupation numbers given for {modes} modes",
                occupations.len()
            )));
        }
        let total: usize = occupations.iter().map(|&m| m as usize).sum();
        if total != inputs.len() {
            return Err(Error::invalid(format!(
                "occupations sum to {total} but there are {} photons",
                inputs.len()
            )));
        }
        Ok(ModeAssignment {
            modes,
            inputs: inputs.iter().map(|k| k - 1).collect(),
            occupations: occupations.to_vec(),
        })
    }

    /// Single photons in distinct outputs, given as 1-based modes.
    pub fn collision_free(modes: usize, inputs: &[usize], outputs: &[usize]) -> Result<Self> {
        let mut occ = vec![0u32; modes];
        for &l in outputs {
            if l == 0 || l > modes {
                return Err(Error::invalid(format!("output mode {l} outside 1..={modes}")));
            }
            occ[l - 1] += 1;
        }
        Self::new(modes, inputs, &occ)
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// 0-based input modes.
    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    /// 0-based output list `l_1..l_N`, mode `j` repeated `m_j` times.
    pub fn output_list(&self) -> Vec<usize> {
        self.occupations
            .iter()
            .enumerate()
            .flat_map(|(j, &m)| std::iter::repeat_n(j, m as usize))
            .collect()
    }

    pub fn is_bunched(&self) -> bool {
        self.occupations.iter().any(|&m| m >= 2)
    }

    /// `prod_l m_l!`.
    pub fn occupation_factor(&self) -> f64 {
        self.occupations
            .iter()
            .map(|&m| factorial_u128(m as usize) as f64)
            .product()
    }

    /// `A_{i,a} = U_{k_i, l_a}`.
    pub fn submatrix(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        if u.rows() != self.modes || u.cols() != self.modes {
            return Err(Error::Dimension(format!(
                "assignment has {} modes but the network is {}x{}",
                self.modes,
                u.rows(),
                u.cols()
            )));
        }
        Ok(u.select(&self.inputs, &self.output_list()))
    }
}

/// Which evaluation route produced a probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvaluationPath {
    General,
    Ideal,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityResult {
    pub value: f64,
    pub n: usize,
    pub m: usize,
    pub path: EvaluationPath,
}

/// `J(r) = prod_{k>=2} g_k^{C_k(r)}`.
pub fn j_weight(cs: &CycleStructure, g: &GVector) -> Result<f64> {
    if cs.n() != g.n() {
        return Err(Error::Dimension(format!(
            "cycle structure on {} elements but g-vector of length {}",
            cs.n(),
            g.n()
        )));
    }
    Ok(cs
        .nonzero()
        .filter(|&(k, _)| k >= 2)
        .map(|(k, c)| g.get(k).powi(c as i32))
        .product())
}

/// Closed form of `J` for the Gaussian arrival-time model,
/// `(1 - gamma)^{N/2} prod_k (1 - gamma^k)^{-C_k/2}`.
pub fn j_weight_gaussian_closed(cs: &CycleStructure, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let ln = 0.5 * cs.n() as f64 * (-gamma).ln_1p()
        - 0.5
            * cs.nonzero()
                .map(|(k, c)| c as f64 * (-gamma.powi(k as i32)).ln_1p())
                .sum::<f64>();
    Ok(ln.exp())
}

/// `sum_{r of a given cycle type} T(r)` for an `N x N` transition matrix,
/// one entry per cycle type that occurs.
#[derive(Clone, Debug)]
pub struct CycleClassSums {
    n: usize,
    classes: Vec<(CycleStructure, f64)>,
    imag_residue: f64,
    magnitude: f64,
}

impl CycleClassSums {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[(CycleStructure, f64)] {
        &self.classes
    }

    /// `sum_r J(r) T(r)`, before division by the occupation factor.
    pub fn weighted_sum(&self, g: &GVector) -> Result<f64> {
        let mut total = 0.0;
        for (cs, t) in &self.classes {
            total += j_weight(cs, g)? * t;
        }
        Ok(total)
    }

    /// `sum_r (1 - J(r)) T(r)`, i.e. `P_ideal - P_g` before the occupation factor.
    pub fn ideal_minus(&self, g: &GVector) -> Result<f64> {
        let mut total = 0.0;
        for (cs, t) in &self.classes {
            total += (1.0 - j_weight(cs, g)?) * t;
        }
        Ok(total)
    }

    /// Largest imaginary part met, relative to the summed term magnitude.
    pub fn relative_imag_residue(&self) -> f64 {
        if self.magnitude > 0.0 {
            self.imag_residue / self.magnitude
        } else {
            0.0
        }
    }
}

/// Evaluates `T(r)` for every relative permutation `r` of `S_N`.
pub fn cycle_class_sums(a: &ComplexMatrix) -> Result<CycleClassSums> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "transition matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > GENERAL_MAX_N {
        return Err(Error::capacity(
            "general probability path",
            format!("N <= {GENERAL_MAX_N}; use the ideal or classical permanent path"),
            n,
        ));
    }
    let mut classes: Vec<(CycleStructure, f64)> = Vec::new();
    let mut imag_residue = 0.0f64;
    let mut magnitude = 0.0f64;
    let mut c = ComplexMatrix::zeros(n, n);
    for r in permutations(n)? {
        let inv = r.inverse();
        if inv < r {
            continue;
        }
        for alpha in 0..n {
            for i in 0..n {
                c[(alpha, i)] = a[(i, alpha)].conj() * a[(r.apply(i), alpha)];
            }
        }
        let t = permanent_ryser(&c)?;
        let (weight, re) = if inv == r {
            imag_residue = imag_residue.max(t.im.abs());
            (1.0, t.re)
        } else {
            (2.0, t.re)
        };
        magnitude += weight * t.norm();
        let cs = r.cycle_structure();
        match classes.iter_mut().find(|(s, _)| *s == cs) {
            Some((_, acc)) => *acc += weight * re,
            None => classes.push((cs, weight * re)),
        }
    }
    let sums = CycleClassSums {
        n,
        classes,
        imag_residue,
        magnitude,
    };
    if sums.imag_residue > IMAG_ABORT_TOL * sums.magnitude.max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue {
            residue: sums.imag_residue,
            magnitude: sums.magnitude,
        });
    }
    Ok(sums)
}

fn check_network(u: &UnitaryNetwork, a: &ModeAssignment, g: Option<&GVector>) -> Result<ComplexMatrix> {
    if let Some(g) = g {
        if g.n() != a.n() {
            return Err(Error::Dimension(format!(
                "{} photons but g-vector of length {}",
                a.n(),
                g.n()
            )));
        }
    }
    a.submatrix(u.matrix())
}

fn clamp_probability(raw: f64) -> Result<f64> {
    if !raw.is_finite() {
        return Err(Error::NonFinite(format!("probability evaluated to {raw}")));
    }
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&raw) {
        return Err(Error::invalid(format!(
            "probability {raw:e} lies outside [0, 1]; the g-vector may not describe a physical source"
        )));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Unclamped general-path value.
fn general_raw(u: &UnitaryNetwork, a: &ModeAssignment, g: &GVector) -> Result<f64> {
    let sub = check_network(u, a, Some(g))?;
    Ok(cycle_class_sums(&sub)?.weighted_sum(g)? / a.occupation_factor())
}

/// Probability through the general double sum (any valid g, `N <= 8`).
pub fn output_probability(u: &UnitaryNetwork, a: &ModeAssignment, g: &GVector) -> Result<ProbabilityResult> {
    Ok(ProbabilityResult {
        value: clamp_probability(general_raw(u, a, g)?)?,
        n: a.n(),
        m: a.modes(),
        path: EvaluationPath::General,
    })
}

fn permanent_capacity(a: &ModeAssignment) -> Result<()> {
    if a.n() > RYSER_MAX_N {
        return Err(Error::capacity("permanent path", format!("N <= {RYSER_MAX_N}"), a.n()));
    }
    Ok(())
}

/// Perfectly indistinguishable photons: `|perm(A)|^2 / prod m_l!`.
pub fn ideal_probability(u: &UnitaryNetwork, a: &ModeAssignment) -> Result<ProbabilityResult> {
    permanent_capacity(a)?;
    let sub = check_network(u, a, None)?;
    let raw = permanent_ryser(&sub)?.norm_sqr() / a.occupation_factor();
    Ok(ProbabilityResult {
        value: clamp_probability(raw)?,
        n: a.n(),
        m: a.modes(),
        path: EvaluationPath::Ideal,
    })
}

/// Distinguishable photons: `perm(|A|^2) / prod m_l!`.
pub fn classical_probability(u: &UnitaryNetwork, a: &ModeAssignment) -> Result<ProbabilityResult> {
    permanent_capacity(a)?;
    let sub = check_network(u, a, None)?;
    let n = sub.rows();
    let b = ComplexMatrix::from_fn(n, n, |i, j| sub[(i, j)].norm_sqr().into());
    let raw = permanent_ryser(&b)?.re / a.occupation_factor();
    Ok(ProbabilityResult {
        value: clamp_probability(raw)?,
        n: a.n(),
        m: a.modes(),
        path: EvaluationPath::Classical,
    })
}

/// Routes to the ideal or classical permanent path when `g` is one of
/// those limits, otherwise to the general path.
pub fn probability(u: &UnitaryNetwork, a: &ModeAssignment, g: &GVector) -> Result<ProbabilityResult> {
    if g.n() != a.n() {
        return Err(Error::Dimension(format!(
            "{} photons but g-vector of length {}",
            a.n(),
            g.n()
        )));
    }
    if g.is_ideal() {
        ideal_probability(u, a)
    } else if g.is_classical() {
        classical_probability(u, a)
    } else {
        output_probability(u, a, g)
    }
}

/// All occupation vectors of `n` photons over `modes` modes, in reverse
/// lexicographic order (`(n, 0, ..)` first).
pub fn occupation_vectors(n: usize, modes: usize) -> Vec<Vec<u32>> {
    fn fill(rest: u32, slot: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == current.len() {
            current[slot] = rest;
            out.push(current.clone());
            return;
        }
        for m in (0..=rest).rev() {
            current[slot] = m;
            fill(rest - m, slot + 1, current, out);
        }
    }
    let mut out = Vec::new();
    if modes > 0 {
        fill(n as u32, 0, &mut vec![0; modes], &mut out);
    }
    out
}

fn enumeration_capacity(what: &'static str, u: &UnitaryNetwork, inputs: &[usize], max_modes: usize) -> Result<()> {
    if inputs.len() > ENUMERATION_MAX_PHOTONS {
        return Err(Error::capacity(
            what,
            format!("N <= {ENUMERATION_MAX_PHOTONS}"),
            inputs.len(),
        ));
    }
    if u.modes() > max_modes {
        return Err(Error::capacity(what, format!("M <= {max_modes}"), u.modes()));
    }
    Ok(())
}

/// Sum of the general-path probability over every output configuration.
pub fn normalization_check(u: &UnitaryNetwork, inputs: &[usize], g: &GVector) -> Result<f64> {
    enumeration_capacity("normalization check", u, inputs, NORMALIZATION_MAX_MODES)?;
    let mut total = 0.0;
    for occ in occupation_vectors(inputs.len(), u.modes()) {
        total += general_raw(u, &ModeAssignment::new(u.modes(), inputs, &occ)?, g)?;
    }
    Ok(total)
}

/// Total probability of outputs with at least one mode holding two or more photons.
pub fn bunching_mass(u: &UnitaryNetwork, inputs: &[usize], g: &GVector) -> Result<f64> {
    enumeration_capacity("bunching mass", u, inputs, BUNCHING_MAX_MODES)?;
    let mut total = 0.0;
    for occ in occupation_vectors(inputs.len(), u.modes()) {
        let a = ModeAssignment::new(u.modes(), inputs, &occ)?;
        if a.is_bunched() {
            total += general_raw(u, &a, g)?;
        }
    }
    Ok(total)
}
