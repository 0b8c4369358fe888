//! The rescaled variance `V(N, eta)` of `P_ideal - P_eta` over the Gaussian
//! ensemble, and the scalability bounds built on it.
//!
//! ```text
//! V = 1/N! sum_{s in S_N} chi(C_1(s)) (1 - J(s))^2
//!   = sum_{partitions} chi(C_1) (1 - prod_k g_k^{C_k})^2 / prod_k (k^{C_k} C_k!)
//! ```
//!
//! By Chebyshev's inequality the sampler reproduces the ideal probability to
//! within `eps N!/M^N` with probability above `1 - V/eps^2`, so `V <= eps^2 delta`
//! is a sufficient condition for success probability `1 - delta`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::permutations::{chi, ln_chi, ln_factorial_table, permutations, ENUMERATION_MAX_N, PARTITION_MAX_N};
use crate::probability::j_weight;
use crate::sources::{GVector, GaussianSource, SourceModel};

/// Largest `N` for [`variance_direct`].
pub const DIRECT_MAX_N: usize = 8;
/// Above this `N` the partition sum is slow enough to warrant a warning.
pub const PARTITION_WARN_N: usize = 60;
/// Terms are accumulated in blocks of this size, then the block totals are
/// added pairwise.
const SUM_BLOCK: usize = 4096;

const BISECTION_LO: f64 = 1e-8;
const BISECTION_HI: f64 = 10.0;
const BISECTION_MAX_ITER: usize = 200;
const BISECTION_REL_WIDTH: f64 = 1e-10;

/// `V` by brute-force enumeration of `S_N`.
pub fn variance_direct(g: &GVector) -> Result<f64> {
    let n = g.n();
    if n > DIRECT_MAX_N {
        return Err(Error::capacity("variance_direct", format!("N <= {DIRECT_MAX_N}"), n));
    }
    const { assert!(DIRECT_MAX_N <= ENUMERATION_MAX_N) };
    let mut total = 0.0;
    let mut count = 0u64;
    for s in permutations(n)? {
        let cs = s.cycle_structure();
        let bracket = 1.0 - j_weight(&cs, g)?;
        total += chi(cs.fixed_points() as usize) * bracket * bracket;
        count += 1;
    }
    Ok(total / count as f64)
}

/// `V` as a sum over integer partitions of `N` (cycle types of `S_N`).
///
/// Class weights are combined in log space; the bracket `1 - prod g_k^{C_k}`
/// is evaluated as `-expm1(sum C_k ln g_k)` so that it keeps full relative
/// precision when every `g_k` is close to 1. Terms are summed in a fixed
/// order, so the result is reproducible bit for bit.
pub fn variance_partition(g: &GVector) -> Result<f64> {
    let n = g.n();
    if n > PARTITION_MAX_N {
        return Err(Error::capacity(
            "variance_partition",
            format!("N <= {PARTITION_MAX_N}"),
            n,
        ));
    }
    let ln_fact = ln_factorial_table(n);
    let ln_k: Vec<f64> = (0..=n).map(|k| if k == 0 { 0.0 } else { (k as f64).ln() }).collect();
    let ln_chi_table: Vec<f64> = (0..=n).map(ln_chi).collect();
    // ln g_k, or None when g_k = 0.
    let ln_g: Vec<Option<f64>> = (0..=n)
        .map(|k| {
            if k == 0 {
                Some(0.0)
            } else {
                Some(g.get(k)).filter(|&x| x > 0.0).map(f64::ln)
            }
        })
        .collect();

    let mut acc = BlockSum::default();
    let ctx = PartitionWalk {
        ln_fact: &ln_fact,
        ln_k: &ln_k,
        ln_chi: &ln_chi_table,
        ln_g: &ln_g,
    };
    // The partition made of 1s only has a zero bracket.
    acc.push(0.0);
    ctx.descend(n, n, 0.0, 0.0, false, &mut acc);
    Ok(acc.finish())
}

/// Fixed-size blocks, then pairwise summation of the block totals.
#[derive(Default)]
struct BlockSum {
    blocks: Vec<f64>,
    block: f64,
    len: usize,
}

impl BlockSum {
    fn push(&mut self, x: f64) {
        self.block += x;
        self.len += 1;
        if self.len == SUM_BLOCK {
            self.blocks.push(self.block);
            self.block = 0.0;
            self.len = 0;
        }
    }

    fn finish(mut self) -> f64 {
        self.blocks.push(self.block);
        pairwise_sum(&self.blocks)
    }
}

struct PartitionWalk<'a> {
    ln_fact: &'a [f64],
    ln_k: &'a [f64],
    ln_chi: &'a [f64],
    ln_g: &'a [Option<f64>],
}

impl PartitionWalk<'_> {
    /// Visits every partition that extends the current prefix of parts
    /// `> max_part` with `c` copies of some part `2 <= k <= max_part`, the
    /// remaining `rest - c k` filled with 1s. Each call emits one term per
    /// extension, so the work is proportional to the number of partitions.
    fn descend(&self, rest: usize, max_part: usize, ln_w: f64, expo: f64, vanishes: bool, acc: &mut BlockSum) {
        for k in (2..=max_part.min(rest)).rev() {
            for c in 1..=rest / k {
                let ln_w = ln_w - (c as f64 * self.ln_k[k] + self.ln_fact[c]);
                let (expo, vanishes) = match self.ln_g[k] {
                    Some(l) => (expo + c as f64 * l, vanishes),
                    None => (expo, true),
                };
                let left = rest - c * k;
                let bracket = if vanishes { 1.0 } else { -expo.exp_m1() };
                // The C_1 = left fixed points contribute 1/C_1! to the class weight.
                let ln_term = self.ln_chi[left] - self.ln_fact[left] + ln_w;
                acc.push(if bracket == 0.0 {
                    0.0
                } else {
                    ln_term.exp() * bracket * bracket
                });
                if left >= 2 {
                    self.descend(left, k - 1, ln_w, expo, vanishes, acc);
                }
            }
        }
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Cubic small-mismatch approximation `eta^4 (N^3/3 - N^2/2 + 7N/6 - 1)`.
pub fn variance_small_eta(n: usize, eta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::invalid(format!("eta must be non-negative, got {eta}")));
    }
    let nf = n as f64;
    // (2N^3 - 3N^2 + 7N - 6) / 6 is exact in integers, and zero at N = 1.
    let poly = (2.0 * nf * nf * nf - 3.0 * nf * nf + 7.0 * nf - 6.0) / 6.0;
    Ok(eta.powi(4) * poly)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

/// Lower bound `1 - V/eps^2` on the probability that `|P_0 - P_eta| < eps N!/M^N`.
/// Non-positive values mean the bound is vacuous.
pub fn chebyshev_success(v: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(1.0 - v / (epsilon * epsilon))
}

/// Whether `V <= eps^2 delta`.
pub fn sufficient_bound_check(v: f64, epsilon: f64, delta: f64) -> Result<bool> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    Ok(v <= epsilon * epsilon * delta)
}

/// Lower bound `1 - V/(4 eps^2)` on the fraction of networks whose output
/// distribution lies within variational distance `eps` of the ideal one.
pub fn variational_success(v: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(1.0 - v / (4.0 * epsilon * epsilon))
}

/// Largest tolerable mode mismatch `1 - <F>`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MismatchBudget {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// `sqrt(3 eps^2 delta) / N^{3/2}`.
    pub leading_order: f64,
    /// `1 - 1/sqrt(1 + 2 eta*^2)` at the bisection root of the Gaussian model.
    pub refined: f64,
    pub eta_star: f64,
    /// Bracket `[eta_lo, eta_hi]` with the bound satisfied at `eta_lo` and violated at `eta_hi`.
    pub eta_lo: f64,
    pub eta_hi: f64,
}

fn gaussian_variance(n: usize, eta: f64) -> Result<f64> {
    variance_partition(&SourceModel::Gaussian(GaussianSource::from_eta(eta)?).gvector(n)?)
}

/// Leading-order budget from `V ~ (1 - <F>)^2 N^3 / 3`, refined by solving
/// `V(N, eta) = eps^2 delta` for the Gaussian model by bisection on `eta`.
pub fn mismatch_budget(n: usize, epsilon: f64, delta: f64) -> Result<MismatchBudget> {
    if n < 2 {
        return Err(Error::invalid(format!("mismatch budget needs N >= 2, got {n}")));
    }
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    let target = epsilon * epsilon * delta;
    let leading_order = (3.0 * epsilon * epsilon * delta).sqrt() / (n as f64).powf(1.5);

    let (mut lo, mut hi) = (BISECTION_LO, BISECTION_HI);
    if gaussian_variance(n, hi)? <= target {
        return Err(Error::NoSolution(format!(
            "V(N={n}) stays below eps^2 delta = {target:e} up to eta = {hi}; the budget exceeds the classical regime"
        )));
    }
    if gaussian_variance(n, lo)? > target {
        return Err(Error::NoSolution(format!(
            "V(N={n}) exceeds eps^2 delta = {target:e} already at eta = {lo}"
        )));
    }
    for _ in 0..BISECTION_MAX_ITER {
        if (hi - lo) <= BISECTION_REL_WIDTH * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if gaussian_variance(n, mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta_star = lo;
    Ok(MismatchBudget {
        n,
        epsilon,
        delta,
        leading_order,
        refined: 1.0 - 1.0 / (1.0 + 2.0 * eta_star * eta_star).sqrt(),
        eta_star,
        eta_lo: lo,
        eta_hi: hi,
    })
}

/// Summary of the variance calculus for one source and photon number.
#[derive(Clone, Debug, Serialize)]
pub struct VarianceReport {
    pub n: usize,
    pub g: GVector,
    /// Set for the Gaussian model only.
    pub eta: Option<f64>,
    pub v_exact: f64,
    pub v_direct: Option<f64>,
    /// Cubic approximation; needs `eta`.
    pub v_approx: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub chebyshev_success: Option<f64>,
    pub variational_success: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

impl VarianceReport {
    pub fn new(model: &SourceModel, n: usize, epsilon: Option<f64>, delta: Option<f64>) -> Result<Self> {
        let g = model.gvector(n)?;
        let v_exact = variance_partition(&g)?;
        let v_direct = if n <= DIRECT_MAX_N {
            Some(variance_direct(&g)?)
        } else {
            None
        };
        let eta = match model {
            SourceModel::Gaussian(src) => Some(src.eta()),
            SourceModel::Ideal => Some(0.0),
            _ => None,
        };
        let v_approx = eta.map(|e| variance_small_eta(n, e)).transpose()?;
        let chebyshev = epsilon.map(|e| chebyshev_success(v_exact, e)).transpose()?;
        let variational = epsilon.map(|e| variational_success(v_exact, e)).transpose()?;
        let bound = match (epsilon, delta) {
            (Some(e), Some(d)) => Some(sufficient_bound_check(v_exact, e, d)?),
            (None, Some(_)) => return Err(Error::invalid("delta given without epsilon")),
            _ => None,
        };
        Ok(VarianceReport {
            n,
            g,
            eta,
            v_exact,
            v_direct,
            v_approx,
            epsilon,
            delta,
            chebyshev_success: chebyshev,
            variational_success: variational,
            bound_satisfied: bound,
        })
    }
}

/// Default `g_2` values of the curve family, bottom curve first.
pub const FIG2_G2: [f64; 6] = [0.99, 0.975, 0.95, 0.925, 0.9, 0.8];
/// Default photon-number range of the curve family.
pub const FIG2_N_RANGE: (usize, usize) = (2, 50);

/// One point of the `V^{1/3}` versus `N` curve family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub g2: f64,
    pub n: usize,
    pub v: f64,
    pub v_cuberoot: f64,
    pub v_approx: f64,
    pub v_approx_cuberoot: f64,
}

/// Exact and cubic-approximation variance of the Gaussian model over a
/// grid of `(g2, N)`; rows ordered by `g2` as given, then by `N`.
pub fn fig2_curve(g2_list: &[f64], n_min: usize, n_max: usize) -> Result<Vec<CurveRow>> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::invalid(format!("invalid N range {n_min}..={n_max}")));
    }
    if n_max > PARTITION_MAX_N {
        return Err(Error::capacity("fig2_curve", format!("N <= {PARTITION_MAX_N}"), n_max));
    }
    let mut rows = Vec::with_capacity(g2_list.len() * (n_max - n_min + 1));
    for &g2 in g2_list {
        let src = GaussianSource::from_g2(g2)?;
        let model = SourceModel::Gaussian(src);
        let eta = src.eta();
        for n in n_min..=n_max {
            let v = variance_partition(&model.gvector(n)?)?;
            let v_approx = variance_small_eta(n, eta)?;
            rows.push(CurveRow {
                g2,
                n,
                v,
                v_cuberoot: v.cbrt(),
                v_approx,
                v_approx_cuberoot: v_approx.cbrt(),
            });
        }
    }
    Ok(rows)
}

/// Writes curve rows as CSV with 17 significant digits.
///
/// Columns `g2,N,V,V_cuberoot,V_approx_cuberoot`; `with_raw_approx` appends
/// the uncubed approximation as `V_approx`.
pub fn write_curve_csv<W: Write>(mut out: W, rows: &[CurveRow], with_raw_approx: bool) -> std::io::Result<()> {
    write!(out, "g2,N,V,V_cuberoot,V_approx_cuberoot")?;
    if with_raw_approx {
        write!(out, ",V_approx")?;
    }
    writeln!(out)?;
    for r in rows {
        write!(
            out,
            "{},{},{},{},{}",
            fmt17(r.g2),
            r.n,
            fmt17(r.v),
            fmt17(r.v_cuberoot),
            fmt17(r.v_approx_cuberoot)
        )?;
        if with_raw_approx {
            write!(out, ",{}", fmt17(r.v_approx))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// A float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
