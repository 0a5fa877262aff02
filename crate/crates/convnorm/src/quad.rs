//! Adaptive quadrature used for kernel tail masses.

/// Relative tolerance for tail-mass integrals.
pub(crate) const TAIL_REL_TOL: f64 = 1e-10;

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integral of `f` over the finite interval [a, b] to relative tolerance `rel_tol`.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // coarse scale estimate for converting the relative tolerance into an absolute one
    let scale = whole.abs().max((b - a) * fm.abs()).max(f64::MIN_POSITIVE);
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, rel_tol * scale, 48)
}

/// Integral of `f` over [a, inf) for integrands with at least exponential decay.
///
/// Maps x = a + t/(1-t) onto t in [0, 1); the decay of `f` beats the (1-t)^-2
/// Jacobian, so the transformed integrand extends continuously by 0 at t = 1.
pub(crate) fn integrate_right_tail(f: impl Fn(f64) -> f64, a: f64, rel_tol: f64) -> f64 {
    let g = move |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let x = a + t / u;
        let v = f(x) / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, rel_tol)
}

/// Integral of `f` over (-inf, a].
pub(crate) fn integrate_left_tail(f: impl Fn(f64) -> f64, a: f64, rel_tol: f64) -> f64 {
    integrate_right_tail(move |x| f(2.0 * a - x), a, rel_tol)
}
