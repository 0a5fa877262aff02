//! Exponent algebra for Young's relation 1/p + 1/q + 1/r = 2: validation,
//! conjugation, completion, and the derived exponents used everywhere else.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance on the residual of the exponent relation.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Conjugate exponent: 1/x + 1/x' = 1.
///
/// `x = 1` maps to `f64::INFINITY` and vice versa; infinity is the one
/// distinguished non-finite value admitted here, and this is the only
/// operation that accepts or produces it.
pub fn conjugate(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 {
        return Err(Error::domain(format!("conjugate requires x >= 1, got {x}")));
    }
    if x == 1.0 {
        return Ok(f64::INFINITY);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(x / (x - 1.0))
}

/// A feasible triple (p, q, r) with its conjugates and derived exponents.
///
/// Invariants established at construction:
/// - 1/p + 1/q + 1/r = 2 within [`FEASIBILITY_TOL`];
/// - p, r in (1, inf), q in [1, inf);
/// - for any two distinct members x, z of {p, q, r}: x' >= z, with equality
///   possible only when 1 is among the exponents;
/// - alpha = p'/p, beta = r'/r, gamma = r'/p, and gamma > 1 whenever q > 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    p: f64,
    q: f64,
    r: f64,
    p_conj: f64,
    q_conj: f64,
    r_conj: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl ExponentTriple {
    /// Validate (p, q, r) against Young's relation and derive the rest.
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InfeasibleExponents(format!(
                "p must lie in (1, inf), got {p}"
            )));
        }
        if !r.is_finite() || r <= 1.0 {
            return Err(Error::InfeasibleExponents(format!(
                "r must lie in (1, inf), got {r}"
            )));
        }
        if !q.is_finite() || q < 1.0 {
            return Err(Error::InfeasibleExponents(format!(
                "q must lie in [1, inf), got {q}"
            )));
        }
        let residual = p.recip() + q.recip() + r.recip() - 2.0;
        if residual.abs() > FEASIBILITY_TOL {
            return Err(Error::InfeasibleExponents(format!(
                "1/p + 1/q + 1/r - 2 = {residual:e} exceeds tolerance {FEASIBILITY_TOL:e} \
                 for (p, q, r) = ({p}, {q}, {r})"
            )));
        }
        let p_conj = conjugate(p)?;
        let q_conj = conjugate(q)?;
        let r_conj = conjugate(r)?;
        let triple = ExponentTriple {
            p,
            q,
            r,
            p_conj,
            q_conj,
            r_conj,
            alpha: p_conj / p,
            beta: r_conj / r,
            gamma: r_conj / p,
        };
        debug_assert!(triple.gamma >= 1.0 - FEASIBILITY_TOL);
        Ok(triple)
    }

    /// Solve 1/p + 1/q + 1/r = 2 for r given (p, q).
    pub fn complete(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InfeasibleExponents(format!(
                "p must lie in (1, inf), got {p}"
            )));
        }
        if !q.is_finite() || q < 1.0 {
            return Err(Error::InfeasibleExponents(format!(
                "q must lie in [1, inf), got {q}"
            )));
        }
        let inv_r = 2.0 - p.recip() - q.recip();
        if inv_r >= 1.0 - FEASIBILITY_TOL {
            return Err(Error::InfeasibleExponents(format!(
                "1/p + 1/q = {} <= 1: the solved r = {} is not in (1, inf)",
                p.recip() + q.recip(),
                inv_r.recip()
            )));
        }
        Self::new(p, q, inv_r.recip())
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }
    pub fn q_conj(&self) -> f64 {
        self.q_conj
    }
    pub fn r_conj(&self) -> f64 {
        self.r_conj
    }
    /// alpha = p'/p = p' - 1.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// beta = r'/r = r' - 1.
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// gamma = r'/p, strictly above 1 whenever q > 1.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Whether p = r (the symmetric case of the improving operator).
    pub fn is_symmetric(&self) -> bool {
        self.p == self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(2.0).unwrap(), 2.0);
        assert_eq!(conjugate(1.0).unwrap(), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY).unwrap(), 1.0);
        assert_relative_eq!(conjugate(1.5).unwrap(), 3.0, max_relative = 1e-15);
        assert!(conjugate(0.9).is_err());
        assert!(conjugate(f64::NAN).is_err());
    }

    #[test]
    fn complete_triple_examples() {
        let t = ExponentTriple::complete(1.5, 1.5).unwrap();
        assert_relative_eq!(t.r(), 1.5, max_relative = 1e-14);
        assert_relative_eq!(t.r_conj(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(t.gamma(), 2.0, max_relative = 1e-14);

        let t = ExponentTriple::complete(2.0, 1.0).unwrap();
        assert_relative_eq!(t.r(), 2.0, max_relative = 1e-14);
        assert_eq!(t.q_conj(), f64::INFINITY);
    }

    #[test]
    fn laplace_configuration_closes_on_r_eq_p() {
        // q = p'/2 forces r = p for every p in (1, 2).
        for i in 1..40 {
            let p = 1.0 + 0.025 * i as f64;
            let q = conjugate(p).unwrap() / 2.0;
            let t = ExponentTriple::complete(p, q).unwrap();
            assert_relative_eq!(t.r(), p, max_relative = 1e-12);
            assert!(t.is_symmetric() || (t.r() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_pairs_are_rejected() {
        // 1/p + 1/q <= 1 leaves no room for r > 1.
        assert!(ExponentTriple::complete(3.0, 3.0).is_err());
        assert!(ExponentTriple::complete(2.0, 2.0).is_err());
        // direct construction with a violated relation
        assert!(ExponentTriple::new(1.5, 1.5, 1.6).is_err());
        assert!(ExponentTriple::new(1.5, 0.9, 1.5).is_err());
    }

    #[test]
    fn pairwise_conjugate_dominance() {
        // x' >= z for distinct members x, z of {p, q, r}; strict when q > 1.
        let cases = [
            (1.5, 1.5),
            (1.05, 10.5),
            (1.9, 1.055_555_555_555_555_6),
            (2.0, 1.0),
        ];
        for &(p, q) in &cases {
            let t = ExponentTriple::complete(p, q).unwrap();
            let base = [t.p(), t.q(), t.r()];
            let conj = [t.p_conj(), t.q_conj(), t.r_conj()];
            for (i, &xc) in conj.iter().enumerate() {
                for (j, &z) in base.iter().enumerate() {
                    if i != j {
                        assert!(
                            xc >= z - 1e-9,
                            "x' >= z violated at ({p}, {q}): conj[{i}] = {xc}, base[{j}] = {z}"
                        );
                    }
                }
            }
            if q > 1.0 {
                assert!(t.gamma() > 1.0);
            } else {
                // equality r' = p occurs exactly when 1 is among the exponents
                assert_relative_eq!(t.gamma(), 1.0, max_relative = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn completion_satisfies_all_invariants(p in 1.01f64..4.0, u in 0.05f64..0.95) {
            // choose q so that 1/q interpolates strictly between 1 - 1/p and 1
            let inv_q = (1.0 - p.recip()) + u * p.recip();
            let q = inv_q.recip();
            prop_assume!(q >= 1.0);
            let t = ExponentTriple::complete(p, q).unwrap();
            let res = t.p().recip() + t.q().recip() + t.r().recip() - 2.0;
            prop_assert!(res.abs() <= 1e-12);
            // equivalent form: 1/p + 1/q = 1 + 1/r'
            let res2 = t.p().recip() + t.q().recip() - 1.0 - t.r_conj().recip();
            prop_assert!(res2.abs() <= 1e-12);
            for (x, xc) in [(t.p(), t.p_conj()), (t.q(), t.q_conj()), (t.r(), t.r_conj())] {
                prop_assert!((x.recip() + xc.recip() - 1.0).abs() <= 1e-12);
            }
            prop_assert!(t.gamma() > 1.0);
        }

        #[test]
        fn completion_is_symmetric_under_p_r_swap(p in 1.05f64..3.0, u in 0.05f64..0.95) {
            let inv_q = (1.0 - p.recip()) + u * p.recip();
            let q = inv_q.recip();
            prop_assume!(q >= 1.0);
            let t = ExponentTriple::complete(p, q).unwrap();
            // swapping the roles of p and r in the exponent relation, q held fixed
            let s = ExponentTriple::complete(t.r(), q).unwrap();
            prop_assert!((s.r() - t.p()).abs() <= 1e-10 * t.p());
        }

        #[test]
        fn conjugate_is_an_involution(x in 1.0f64..1e6) {
            let y = conjugate(conjugate(x).unwrap()).unwrap();
            prop_assert!((y - x).abs() <= 1e-9 * x);
        }
    }
}
