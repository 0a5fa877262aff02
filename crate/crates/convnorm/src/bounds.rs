//! Closed-form upper bounds for the Laplace best constant and the
//! Beckner-sharpened Young bound; the comparison baseline for every
//! numerical result.
//!
//! All constants are evaluated in log-space so nothing overflows or cancels
//! as p approaches 1 (where p' diverges); limit values are substituted
//! analytically at the endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{conjugate, ExponentTriple};
use crate::grid::{lp_norm, SampledKernel};

use std::f64::consts::PI;

/// Beckner's constant A_m = (m^{1/m} / m'^{1/m'})^{1/2}.
///
/// Lies in (0, 1] for 1 <= m <= 2 and satisfies A_m A_{m'} = 1, so it exceeds
/// 1 for m > 2; equals 1 exactly at m in {1, 2, inf}. Both infinities of the
/// formula are handled as their limit value 1.
pub fn beckner_constant(m: f64) -> Result<f64> {
    if m.is_nan() || m < 1.0 {
        return Err(Error::domain(format!(
            "Beckner constant requires m >= 1, got {m}"
        )));
    }
    if m == 1.0 || m.is_infinite() {
        return Ok(1.0);
    }
    let mc = conjugate(m)?;
    // ln A_m = (ln m / m - ln m' / m') / 2; the second term tends to 0 as m -> 1
    let log_a = 0.5 * (m.ln() / m - mc.ln() / mc);
    Ok(log_a.exp())
}

fn check_p_range(p: f64, who: &str) -> Result<()> {
    if !(p.is_finite() && (1.0..=2.0).contains(&p)) {
        return Err(Error::domain(format!(
            "{who} is defined for p in [1, 2], got {p}"
        )));
    }
    Ok(())
}

/// Riesz-Thorin interpolation bound C_RT(p) = pi^{1/p'}.
pub fn bound_riesz_thorin(p: f64) -> Result<f64> {
    check_p_range(p, "C_RT")?;
    let t = 1.0 - p.recip(); // 1/p'
    Ok((t * PI.ln()).exp())
}

/// Fourier-route bound C_F(p) = pi^{1/p'} A_p.
pub fn bound_fourier(p: f64) -> Result<f64> {
    Ok(bound_riesz_thorin(p)? * beckner_constant(p)?)
}

/// Hardy's bound C_H(p) = (2 pi / p')^{1/p'}.
pub fn bound_hardy(p: f64) -> Result<f64> {
    check_p_range(p, "C_H")?;
    let t = 1.0 - p.recip(); // 1/p'
    if t == 0.0 {
        return Ok(1.0); // limit as p -> 1
    }
    Ok((t * (2.0 * PI * t).ln()).exp())
}

/// Setterqvist's bound C_S(p) = (pi (p-1))^{1/p'} (p (2-p))^{1/p - 1/2}
/// = C_H(p) A_p^2 A_q with q = p'/2.
///
/// At p = 2 the (p(2-p)) factor degenerates; the value is defined by
/// continuity as C_H(2) = sqrt(pi). At p = 1 the limit is 1.
pub fn bound_setterqvist(p: f64) -> Result<f64> {
    check_p_range(p, "C_S")?;
    if p == 1.0 {
        return Ok(1.0);
    }
    if p == 2.0 {
        return bound_hardy(2.0);
    }
    let t = 1.0 - p.recip(); // 1/p'
    let log_cs = t * (PI * (p - 1.0)).ln() + (p.recip() - 0.5) * (p * (2.0 - p)).ln();
    Ok(log_cs.exp())
}

/// Empirical gap law C_S(p) - N(p) ~ (p-1)(2-p)/8.
pub fn empirical_gap(p: f64) -> f64 {
    (p - 1.0) * (2.0 - p) / 8.0
}

/// Beckner-Young bound for a sampled kernel: both the sharpened constant
/// A_p A_q A_r ||k||_q and the plain Young bound ||k||_q.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct YoungBounds {
    pub beckner: f64,
    pub plain: f64,
}

pub fn beckner_young_bound(kernel: &SampledKernel, triple: &ExponentTriple) -> Result<YoungBounds> {
    let plain = lp_norm(&kernel.grid, triple.q())?;
    if plain == 0.0 {
        return Err(Error::ZeroFunction("Young bound of the zero kernel".into()));
    }
    let a = beckner_constant(triple.p())?
        * beckner_constant(triple.q())?
        * beckner_constant(triple.r())?;
    Ok(YoungBounds {
        beckner: a * plain,
        plain,
    })
}

/// One row of the bounds table: the four closed-form constants, the empirical
/// gap, and (once computed) the numerical norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsRow {
    pub p: f64,
    pub c_rt: f64,
    pub c_f: f64,
    pub c_h: f64,
    pub c_s: f64,
    pub empirical_gap: f64,
    pub n_numeric: Option<f64>,
}

pub fn bounds_row(p: f64) -> Result<BoundsRow> {
    Ok(BoundsRow {
        p,
        c_rt: bound_riesz_thorin(p)?,
        c_f: bound_fourier(p)?,
        c_h: bound_hardy(p)?,
        c_s: bound_setterqvist(p)?,
        empirical_gap: empirical_gap(p),
        n_numeric: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_kernel, KernelSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Direct power-function evaluation, the second route for A_m.
    fn beckner_direct(m: f64) -> f64 {
        if m == 1.0 || m.is_infinite() {
            return 1.0;
        }
        let mc = m / (m - 1.0);
        (m.powf(m.recip()) / mc.powf(mc.recip())).sqrt()
    }

    #[test]
    fn beckner_special_values() {
        assert_eq!(beckner_constant(2.0).unwrap(), 1.0);
        assert_eq!(beckner_constant(1.0).unwrap(), 1.0);
        assert_eq!(beckner_constant(f64::INFINITY).unwrap(), 1.0);
        assert!(beckner_constant(0.99).is_err());
        let m = 4.0 / 3.0;
        let expected = ((4.0f64 / 3.0).powf(0.75) / 4.0f64.powf(0.25)).sqrt();
        assert_relative_eq!(beckner_constant(m).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn beckner_log_and_direct_routes_agree() {
        let mut m = 1.0001;
        while m < 50.0 {
            let a = beckner_constant(m).unwrap();
            assert_relative_eq!(a, beckner_direct(m), max_relative = 1e-14);
            assert!(a > 0.0);
            // A lands in (0, 1] on [1, 2] and reciprocates across conjugation
            if m <= 2.0 {
                assert!(a <= 1.0 + 1e-15);
            }
            let ac = beckner_constant(m / (m - 1.0)).unwrap();
            assert_relative_eq!(a * ac, 1.0, max_relative = 1e-13);
            m *= 1.07;
        }
    }

    #[test]
    fn beckner_product_never_exceeds_one_on_feasible_triples() {
        // individual factors can exceed 1, the product cannot
        for &(p, q) in &[(1.5, 1.5), (1.05, 10.5), (3.0, 1.2), (1.2, 4.0), (2.0, 1.0)] {
            let t = ExponentTriple::complete(p, q).unwrap();
            let product = beckner_constant(t.p()).unwrap()
                * beckner_constant(t.q()).unwrap()
                * beckner_constant(t.r()).unwrap();
            assert!(
                product <= 1.0 + 1e-14,
                "A_p A_q A_r = {product} > 1 at ({p}, {q})"
            );
        }
    }

    #[test]
    fn riesz_thorin_values() {
        assert_abs_diff_eq!(bound_riesz_thorin(2.0).unwrap(), PI.sqrt(), epsilon = 1e-15);
        assert_eq!(bound_riesz_thorin(1.0).unwrap(), 1.0);
        assert!(bound_riesz_thorin(2.1).is_err());
        assert!(bound_riesz_thorin(0.9).is_err());
    }

    #[test]
    fn setterqvist_matches_table_values() {
        assert_abs_diff_eq!(bound_setterqvist(1.5).unwrap(), 1.10803, epsilon = 5e-5);
        assert_abs_diff_eq!(bound_setterqvist(1.1).unwrap(), 0.89640, epsilon = 5e-5);
    }

    #[test]
    fn setterqvist_two_closed_forms_agree() {
        // (pi(p-1))^{1/p'} (p(2-p))^{1/p-1/2} = C_H A_p^2 A_q, q = p'/2
        let mut p = 1.001;
        while p < 1.999 {
            let via_factors = bound_hardy(p).unwrap()
                * beckner_constant(p).unwrap().powi(2)
                * beckner_constant(p / (p - 1.0) / 2.0).unwrap();
            assert_relative_eq!(
                bound_setterqvist(p).unwrap(),
                via_factors,
                max_relative = 1e-13
            );
            p += 0.007;
        }
    }

    #[test]
    fn bound_chain_ordering() {
        let mut p = 1.0005;
        while p <= 2.0 {
            let row = bounds_row(p).unwrap();
            assert!(row.c_s <= row.c_h * (1.0 + 1e-14), "C_S > C_H at p = {p}");
            assert!(row.c_f <= row.c_rt * (1.0 + 1e-14), "C_F > C_RT at p = {p}");
            assert!(row.c_rt > 0.0 && row.c_rt.is_finite());
            assert!(row.c_s > 0.0 && row.c_s.is_finite());
            p += 0.0125;
        }
    }

    #[test]
    fn empirical_gap_shape() {
        assert_eq!(empirical_gap(1.0), 0.0);
        assert_eq!(empirical_gap(2.0), 0.0);
        assert_abs_diff_eq!(empirical_gap(1.5), 0.03125, epsilon = 1e-16);
        // symmetric about p = 1.5 and maximal there with value 1/32
        for d in [0.1, 0.2, 0.35] {
            assert_abs_diff_eq!(
                empirical_gap(1.5 - d),
                empirical_gap(1.5 + d),
                epsilon = 1e-15
            );
            assert!(empirical_gap(1.5 - d) < empirical_gap(1.5));
        }
    }

    #[test]
    fn beckner_young_bound_for_laplace_kernel_equals_setterqvist() {
        // k = h_p with triple (p, p'/2, p): A_p A_q A_r ||k||_q = C_S(p)
        for p in [1.3, 1.5, 1.7] {
            let q = p / (p - 1.0) / 2.0;
            let t = ExponentTriple::complete(p, q).unwrap();
            // the cut tail mass ~ 2 e^{-L/2} must sit below the 1e-6 comparison
            let k = sample_kernel(&KernelSpec::LaplaceHp { p }, 2048, 40.0, q).unwrap();
            let b = beckner_young_bound(&k, &t).unwrap();
            assert_abs_diff_eq!(b.beckner, bound_setterqvist(p).unwrap(), epsilon = 1e-6);
            assert!(b.beckner <= b.plain);
        }
    }

    #[test]
    fn beckner_young_bound_for_gaussian_kernel() {
        // ||e^{-x^2}||_q = (pi/q)^{1/(2q)}
        let t = ExponentTriple::new(1.5, 1.5, 1.5).unwrap();
        let k = sample_kernel(&KernelSpec::Gaussian { b: 1.0 }, 1024, 16.0, 1.5).unwrap();
        let b = beckner_young_bound(&k, &t).unwrap();
        let a = beckner_constant(1.5).unwrap();
        let kq = (PI / 1.5f64).powf(1.0 / 3.0);
        assert_relative_eq!(b.beckner, a.powi(3) * kq, max_relative = 1e-8);
        let zero_kernel = SampledKernel {
            grid: crate::grid::GridFunction::from_fn(64, 8.0, |_| {
                num_complex::Complex64::default()
            })
            .unwrap(),
            q: 1.5,
            tail_q_mass: 0.0,
        };
        assert!(beckner_young_bound(&zero_kernel, &t).is_err());
    }
}
