//! Concentration diagnostics (delta-diameter, near-support, centering) and
//! randomized validators for the elementary inequalities behind them.
//!
//! Windows live on the circle: they may wrap around the cut at +-L, since the
//! compactified model is periodic and a maximizer sitting near the boundary
//! must not be misreported as spread out. Window endpoints are resolved at
//! cell granularity, so reported lengths carry additive uncertainty <= 2h.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::ExponentTriple;
use crate::grid::{lp_norm, signed_power_scalar, GridFunction};

/// A minimal window [a, b] carrying all but `delta` of the p-mass.
/// If the window wraps the cut, b exceeds the half-length (b = a + length).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NearSupport {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub p: f64,
}

/// Per-cell p-masses h |f_j|^p.
fn cell_masses(f: &GridFunction, p: f64) -> Result<Vec<f64>> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::domain(format!(
            "mass order p must satisfy p >= 1, got {p}"
        )));
    }
    let m = f.max_abs();
    if m == 0.0 {
        return Ok(vec![0.0; f.len()]);
    }
    let h = f.step();
    let scale = m.powf(p) * h;
    Ok(f.values()
        .iter()
        .map(|z| (z.norm() / m).powf(p) * scale)
        .collect())
}

/// Smallest number of consecutive cells (cyclically, wrapping allowed) whose
/// mass reaches `target`, together with the leftmost starting index among the
/// minima. Two-pointer sweep over the doubled mass array, O(N).
fn minimal_window(masses: &[f64], target: f64) -> Option<(usize, usize)> {
    let n = masses.len();
    let total: f64 = masses.iter().sum();
    if target > total {
        return None;
    }
    let mut best_len = usize::MAX;
    let mut best_start = 0;
    let mut sum = 0.0;
    let mut left = 0;
    for right in 0..2 * n {
        sum += masses[right % n];
        // shrink from the left while the window still meets the target
        while left <= right && sum - masses[left % n] >= target {
            sum -= masses[left % n];
            left += 1;
        }
        let len = right - left + 1;
        if sum >= target && len <= n && left < n {
            // strict < keeps the leftmost start among equal lengths
            if len < best_len {
                best_len = len;
                best_start = left;
            }
        }
        if right >= n && left > n {
            break;
        }
    }
    (best_len != usize::MAX).then_some((best_start, best_len))
}

/// delta-diameter of order p: the length of the shortest (cyclic) window whose
/// p-mass is at least ||f||_p^p - delta; zero when delta >= ||f||_p^p.
pub fn delta_diameter(f: &GridFunction, delta: f64, p: f64) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let masses = cell_masses(f, p)?;
    let total: f64 = masses.iter().sum();
    if delta >= total {
        return Ok(0.0);
    }
    let (_, len) =
        minimal_window(&masses, total - delta).expect("target below total mass is attainable");
    Ok(len as f64 * f.step())
}

/// The minimal-length window itself (leftmost starting cell among ties).
pub fn near_support(f: &GridFunction, delta: f64, p: f64) -> Result<NearSupport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let masses = cell_masses(f, p)?;
    let total: f64 = masses.iter().sum();
    if delta >= total {
        return Err(Error::DegenerateWindow(format!(
            "delta = {delta} is at least the total p-mass {total}"
        )));
    }
    let (start, len) = minimal_window(&masses, total - delta).expect("attainable");
    let a = f.node(start);
    Ok(NearSupport {
        a,
        b: a + len as f64 * f.step(),
        delta,
        p,
    })
}

/// Shift a such that T_a f carries equal p-mass on each side of the origin
/// within its near-support, to within one grid cell.
pub fn center_shift(f: &GridFunction, delta: f64, p: f64) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let masses = cell_masses(f, p)?;
    let total: f64 = masses.iter().sum();
    if delta >= total {
        return Err(Error::DegenerateWindow(format!(
            "delta = {delta} is at least the total p-mass {total}"
        )));
    }
    let (start, len) = minimal_window(&masses, total - delta).expect("attainable");
    let retained = total - delta;
    let n = f.len();
    let mut acc = 0.0;
    let mut median = 0usize;
    for offset in 0..len {
        acc += masses[(start + offset) % n];
        if acc >= retained / 2.0 {
            median = offset;
            break;
        }
    }
    // the median cell, tracked along the unwrapped window, moves to the origin
    let x_median = f.node(start) + median as f64 * f.step();
    let mut shift = -x_median;
    let period = 2.0 * f.half_length();
    if shift <= -f.half_length() {
        shift += period;
    } else if shift > f.half_length() {
        shift -= period;
    }
    Ok(shift)
}

/// The standard parameter choices (delta, rho, c) derived from epsilon, the
/// operator norm, and the exponent triple for the concentration estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Corollary39Params {
    pub epsilon: f64,
    pub delta: f64,
    pub rho: f64,
    pub c: f64,
    pub gamma: f64,
}

impl Corollary39Params {
    pub fn new(triple: &ExponentTriple, epsilon: f64, operator_norm: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::domain(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !(operator_norm.is_finite() && operator_norm > 0.0) {
            return Err(Error::domain("operator norm must be positive"));
        }
        let gamma = triple.gamma();
        if gamma <= 1.0 {
            return Err(Error::ParametersInfeasible(format!(
                "the concentration estimate requires gamma = r'/p > 1 (q > 1), got gamma = {gamma}"
            )));
        }
        let rc = triple.r_conj();
        let kappa_rate = 1.0 - (1.0 - gamma).exp2(); // 1 - 2^(1-gamma)
        Ok(Corollary39Params {
            epsilon,
            delta: 4.0 * rc * epsilon / kappa_rate,
            rho: (operator_norm * epsilon).powf(triple.q()),
            c: 4.0 * (epsilon * rc).powf(-gamma.recip()),
            gamma,
        })
    }
}

/// Both sides of the concentration estimate with the verdict.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcentrationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub params: Corollary39Params,
}

/// Check D_delta^p(f) <= c D_rho^q(k) for an epsilon-maximizer f, with the
/// parameters of [`Corollary39Params`].
pub fn check_corollary_3_9(
    k: &GridFunction,
    f: &GridFunction,
    triple: &ExponentTriple,
    epsilon: f64,
    operator_norm: f64,
) -> Result<ConcentrationCheck> {
    let params = Corollary39Params::new(triple, epsilon, operator_norm)?;
    let conv = crate::grid::cyclic_convolve(k, f)?;
    let attained = lp_norm(&conv, triple.r_conj())?;
    let required = operator_norm * (1.0 - epsilon);
    if attained < required {
        return Err(Error::Precondition(format!(
            "f is not an epsilon-maximizer: ||k*f||_r' = {attained} < {required} \
             (deficiency {:.3e})",
            required - attained
        )));
    }
    let kernel_mass = lp_norm(k, triple.q())?.powf(triple.q());
    if params.rho >= kernel_mass {
        return Err(Error::ParametersInfeasible(format!(
            "rho = {} is at least the kernel q-mass {kernel_mass}; D_rho^q(k) = 0 \
             forces an empty estimate",
            params.rho
        )));
    }
    let lhs = delta_diameter(f, params.delta, triple.p())?;
    let rhs = params.c * delta_diameter(k, params.rho, triple.q())?;
    Ok(ConcentrationCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
        params,
    })
}

// ---------------------------------------------------------------------------
// Lemma validators
// ---------------------------------------------------------------------------

/// Outcome of a randomized inequality validator.
#[derive(Debug, Clone, Serialize)]
pub struct ValidatorReport {
    pub samples: u64,
    pub violations: u64,
    /// Smallest observed margin rhs - lhs (nonnegative when the lemma holds).
    pub worst_slack: f64,
}

/// The convexity inequality u^g + (1-u)^g <= 1 - 2 l (1 - 2^(1-g)).
fn lemma_3_1_sides(u: f64, lambda: f64, gamma: f64) -> (f64, f64) {
    let lhs = u.powf(gamma) + (1.0 - u).powf(gamma);
    let rhs = 1.0 - 2.0 * lambda * (1.0 - (1.0 - gamma).exp2());
    (lhs, rhs)
}

/// Draw (u, lambda, gamma) with gamma in (1, 8], lambda in (0, 1/2),
/// u in [lambda, 1 - lambda], and assert the convexity inequality with
/// kappa = 2 lambda (1 - 2^(1-gamma)); zero violations expected.
pub fn validate_lemma_3_1(samples: u64, seed: u64) -> Result<ValidatorReport> {
    if samples == 0 {
        return Err(Error::domain("validator needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for i in 0..samples {
        let gamma = 1.0 + rng.gen_range(0.0..7.0f64).max(f64::MIN_POSITIVE);
        let lambda = rng.gen_range(0.0..0.5f64).max(f64::MIN_POSITIVE);
        let u = rng.gen_range(lambda..=1.0 - lambda);
        let (lhs, rhs) = lemma_3_1_sides(u, lambda, gamma);
        let slack = rhs - lhs;
        worst = worst.min(slack);
        if lhs > rhs {
            return Err(Error::ValidatorFailed(format!(
                "lemma_3_1: inequality violated at sample {i}: u = {u}, lambda = {lambda}, \
                 gamma = {gamma}: lhs = {lhs} > rhs = {rhs}"
            )));
        }
    }
    Ok(ValidatorReport {
        samples,
        violations: 0,
        worst_slack: worst,
    })
}

fn complex_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::new(
        rng.gen_range(-radius..radius),
        rng.gen_range(-radius..radius),
    )
}

/// Reports for the two branches of the signed-power difference bound.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma41Report {
    pub part_a: ValidatorReport,
    pub part_b: ValidatorReport,
}

/// Validate |u^<g> - v^<g>| <= 2^(1-g) |u-v|^g for g in (0, 1] (part a) and
/// |u^<g> - v^<g>| <= g |u-v| max(|u|,|v|)^(g-1) for g in (1, 8] (part b).
pub fn validate_lemma_4_1(samples: u64, seed: u64) -> Result<Lemma41Report> {
    if samples == 0 {
        return Err(Error::domain("validator needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_a = f64::INFINITY;
    let mut worst_b = f64::INFINITY;
    for i in 0..samples {
        // part (a)
        let gamma = rng.gen_range(0.0..1.0f64).max(f64::MIN_POSITIVE);
        let u = complex_in_disk(&mut rng, 2.0);
        let v = complex_in_disk(&mut rng, 2.0);
        let lhs = (signed_power_scalar(u, gamma) - signed_power_scalar(v, gamma)).norm();
        let rhs = (1.0 - gamma).exp2() * (u - v).norm().powf(gamma);
        worst_a = worst_a.min(rhs - lhs);
        if lhs > rhs {
            return Err(Error::ValidatorFailed(format!(
                "lemma_4_1(a): inequality violated at sample {i}: u = {u}, v = {v}, \
                 gamma = {gamma}: {lhs} > {rhs}"
            )));
        }
        // part (b)
        let gamma = 1.0 + rng.gen_range(0.0..7.0f64).max(f64::MIN_POSITIVE);
        let u = complex_in_disk(&mut rng, 2.0);
        let v = complex_in_disk(&mut rng, 2.0);
        let lhs = (signed_power_scalar(u, gamma) - signed_power_scalar(v, gamma)).norm();
        let rhs = gamma * (u - v).norm() * u.norm().max(v.norm()).powf(gamma - 1.0);
        worst_b = worst_b.min(rhs - lhs);
        if lhs > rhs {
            return Err(Error::ValidatorFailed(format!(
                "lemma_4_1(b): inequality violated at sample {i}: u = {u}, v = {v}, \
                 gamma = {gamma}: {lhs} > {rhs}"
            )));
        }
    }
    Ok(Lemma41Report {
        part_a: ValidatorReport {
            samples,
            violations: 0,
            worst_slack: worst_a,
        },
        part_b: ValidatorReport {
            samples,
            violations: 0,
            worst_slack: worst_b,
        },
    })
}

/// Post-hoc tightness report over a stored family of runs: the diameter at a
/// fixed delta for each member, in order.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyTightnessReport {
    pub delta: f64,
    pub p: f64,
    pub diameters: Vec<f64>,
    pub max_diameter: f64,
}

pub fn family_diameter_report(
    family: &[GridFunction],
    delta: f64,
    p: f64,
) -> Result<FamilyTightnessReport> {
    let diameters: Vec<f64> = family
        .iter()
        .map(|f| delta_diameter(f, delta, p))
        .collect::<Result<_>>()?;
    let max_diameter = diameters.iter().cloned().fold(0.0, f64::max);
    Ok(FamilyTightnessReport {
        delta,
        p,
        diameters,
        max_diameter,
    })
}
