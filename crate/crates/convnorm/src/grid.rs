//! Periodic grid functions on [-L, L) and the primitives the iteration engine
//! composes: quadrature norms, cyclic convolution, signed power, reflection,
//! radial projection, shifting, kernel sampling, and CSV serialization.
//!
//! The discrete model is the cyclic group Z/NZ carrying measure h = 2L/N per
//! node, so rectangle-rule norms and h-scaled cyclic convolution satisfy the
//! exact Young inequality rather than an approximate one.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// A complex-valued function sampled at x_j = -L + j h, h = 2L/N, j = 0..N-1.
///
/// Values are immutable after construction; every operation returns a new
/// function. The step h is always derived from (L, N), never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
    half_length: f64,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>, half_length: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain(format!(
                "grid needs N >= 2 nodes, got {}",
                values.len()
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::domain(format!(
                "half-length must be positive, got {half_length}"
            )));
        }
        if let Some(bad) = values
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::domain(format!("non-finite sample at node {bad}")));
        }
        Ok(GridFunction {
            values,
            half_length,
        })
    }

    /// Sample `f` at the grid nodes.
    pub fn from_fn(n: usize, half_length: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = 2.0 * half_length / n as f64;
        let values = (0..n).map(|j| f(-half_length + h * j as f64)).collect();
        Self::new(values, half_length)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Grid step h = 2L/N.
    pub fn step(&self) -> f64 {
        2.0 * self.half_length / self.len() as f64
    }

    /// Coordinate of node j.
    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + self.step() * j as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.len() == other.len() && self.half_length == other.half_length
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            values: self.values.iter().map(|&z| f(z)).collect(),
            half_length: self.half_length,
        }
    }
}

/// Quadrature L_p norm: (h * sum |f_j|^p)^(1/p).
///
/// The p-th powers are accumulated in ascending order of magnitude, so the
/// result is invariant under any rearrangement of the samples (cyclic shifts
/// and reflections preserve norms bit for bit).
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::domain(format!(
            "lp_norm requires finite p >= 1, got {p}"
        )));
    }
    let m = f.max_abs();
    if m == 0.0 {
        return Ok(0.0);
    }
    // scale by the maximum so large exponents cannot overflow
    let mut powers: Vec<f64> = f.values.iter().map(|z| (z.norm() / m).powf(p)).collect();
    powers.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite powers"));
    let sum: f64 = powers.iter().sum();
    Ok(m * (f.step() * sum).powf(p.recip()))
}

/// Bilinear pairing <u, v> = h * sum u_j v_j (no conjugation).
pub fn pairing(u: &GridFunction, v: &GridFunction) -> Result<Complex64> {
    if !u.same_grid(v) {
        return Err(Error::ShapeMismatch(
            "pairing requires matching grids".into(),
        ));
    }
    let s: Complex64 = u.values.iter().zip(&v.values).map(|(&a, &b)| a * b).sum();
    Ok(s * u.step())
}

/// Cyclic convolution (k * f)_j = h * sum_i k_((j-i) mod N) f_i.
///
/// Uses the fast transform when N is a power of two and direct summation
/// otherwise; [`cyclic_convolve_direct`] exposes the direct path for
/// cross-testing.
pub fn cyclic_convolve(k: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    if !k.same_grid(f) {
        return Err(Error::ShapeMismatch(format!(
            "convolution requires matching grids: ({}, {}) vs ({}, {})",
            k.len(),
            k.half_length(),
            f.len(),
            f.half_length()
        )));
    }
    if k.len().is_power_of_two() {
        let mut khat = k.values.clone();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(k.len()).process(&mut khat);
        convolve_with_spectrum(&khat, f)
    } else {
        cyclic_convolve_direct(k, f)
    }
}

/// Direct O(N^2) cyclic convolution.
pub fn cyclic_convolve_direct(k: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    if !k.same_grid(f) {
        return Err(Error::ShapeMismatch(
            "convolution requires matching grids".into(),
        ));
    }
    let n = k.len();
    let h = k.step();
    let mut out = vec![Complex64::default(); n];
    for (j, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        for i in 0..n {
            acc += k.values[(j + n - i) % n] * f.values[i];
        }
        *o = acc * h;
    }
    GridFunction::new(out, k.half_length)
}

/// Convolve against a precomputed (unnormalized forward) kernel spectrum.
pub(crate) fn convolve_with_spectrum(khat: &[Complex64], f: &GridFunction) -> Result<GridFunction> {
    let n = f.len();
    debug_assert_eq!(khat.len(), n);
    let mut buf = f.values.clone();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (b, k) in buf.iter_mut().zip(khat) {
        *b *= k;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = f.step() / n as f64;
    for b in buf.iter_mut() {
        *b *= scale;
    }
    GridFunction::new(buf, f.half_length)
}

/// Signed power of a scalar: z^<gamma> = conj(z) |z|^(gamma-1), with 0 -> 0.
pub fn signed_power_scalar(z: Complex64, gamma: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::default();
    }
    z.conj() * r.powf(gamma - 1.0)
}

/// Pointwise signed power f_j -> conj(f_j) |f_j|^(gamma-1); |result| = |f|^gamma.
pub fn signed_power(f: &GridFunction, gamma: f64) -> Result<GridFunction> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::domain(format!(
            "signed power requires gamma > 0, got {gamma}"
        )));
    }
    Ok(f.map(|z| signed_power_scalar(z, gamma)))
}

/// Reflection (f~)(x) = f(-x): node j maps to node (N - j) mod N.
pub fn reflect(f: &GridFunction) -> GridFunction {
    let n = f.len();
    let values = (0..n).map(|j| f.values[(n - j) % n]).collect();
    GridFunction {
        values,
        half_length: f.half_length,
    }
}

/// Cyclic translation by `cells` grid cells: (T f)_j = f_(j - cells).
pub fn cyclic_shift(f: &GridFunction, cells: i64) -> GridFunction {
    let n = f.len() as i64;
    let values = (0..n)
        .map(|j| f.values[((j - cells).rem_euclid(n)) as usize])
        .collect();
    GridFunction {
        values,
        half_length: f.half_length,
    }
}

/// Radial projection onto the unit sphere of L_p: f / ||f||_p.
pub fn radial_project(f: &GridFunction, p: f64) -> Result<GridFunction> {
    let norm = lp_norm(f, p)?;
    if norm == 0.0 {
        return Err(Error::ZeroFunction(
            "radial projection of the zero function".into(),
        ));
    }
    Ok(f.map(|z| z / norm))
}

/// Cyclically shift `f` so the first node of maximal |f_j| lands at node 0.
///
/// Returns the shifted function and the applied translation in x-units,
/// normalized into (-L, L]. Norms of all orders are preserved exactly.
pub fn shift_argmax_to_origin(f: &GridFunction) -> Result<(GridFunction, f64)> {
    let m = f.max_abs();
    if m == 0.0 {
        return Err(Error::ZeroFunction(
            "argmax shift of the zero function".into(),
        ));
    }
    let j = f
        .values
        .iter()
        .position(|z| z.norm() == m)
        .expect("maximum exists");
    let shifted = cyclic_shift(f, -(j as i64));
    let mut shift = -(j as f64) * f.step();
    if shift <= -f.half_length {
        shift += 2.0 * f.half_length;
    }
    Ok((shifted, shift))
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

/// Declarative description of a convolution kernel.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// h_p(y) = exp(y/p' - e^y), the Laplace-transform kernel; requires 1 < p < 2.
    LaplaceHp { p: f64 },
    /// exp(-b x^2); requires b > 0.
    Gaussian { b: f64 },
    /// base(x) * exp(i lambda x^2).
    Chirped { base: Box<KernelSpec>, lambda: f64 },
    /// Values already sampled on some grid; must match the requested grid.
    Tabulated(GridFunction),
    /// A vector on Z/m with unit step (h = 1, L = m/2).
    Discrete(Vec<Complex64>),
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::LaplaceHp { p } => {
                if !(p.is_finite() && *p > 1.0 && *p < 2.0) {
                    return Err(Error::domain(format!(
                        "laplace_hp requires 1 < p < 2, got {p}"
                    )));
                }
            }
            KernelSpec::Gaussian { b } => {
                if !(b.is_finite() && *b > 0.0) {
                    return Err(Error::domain(format!("gaussian requires b > 0, got {b}")));
                }
            }
            KernelSpec::Chirped { base, lambda } => {
                if !lambda.is_finite() {
                    return Err(Error::domain("chirp rate must be finite"));
                }
                base.validate()?;
            }
            KernelSpec::Tabulated(_) => {}
            KernelSpec::Discrete(v) => {
                if v.len() < 2 {
                    return Err(Error::domain("discrete kernel needs at least 2 entries"));
                }
            }
        }
        Ok(())
    }

    /// Pointwise evaluation for the analytic variants.
    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            KernelSpec::LaplaceHp { p } => {
                let pc = p / (p - 1.0);
                Complex64::new((x / pc - x.exp()).exp(), 0.0)
            }
            KernelSpec::Gaussian { b } => Complex64::new((-b * x * x).exp(), 0.0),
            KernelSpec::Chirped { base, lambda } => {
                base.eval(x) * Complex64::new(0.0, lambda * x * x).exp()
            }
            KernelSpec::Tabulated(_) | KernelSpec::Discrete(_) => {
                unreachable!("tabulated kernels are copied, not evaluated")
            }
        }
    }

    /// |k(x)|^q for the tail-mass integrals.
    fn abs_power(&self, x: f64, q: f64) -> f64 {
        match self {
            KernelSpec::LaplaceHp { p } => {
                let pc = p / (p - 1.0);
                (q * (x / pc - x.exp())).exp()
            }
            KernelSpec::Gaussian { b } => (-q * b * x * x).exp(),
            KernelSpec::Chirped { base, .. } => base.abs_power(x, q),
            KernelSpec::Tabulated(_) | KernelSpec::Discrete(_) => 0.0,
        }
    }
}

/// A kernel realized on a grid together with its truncated-tail L_q mass
/// rho = || k - k 1_[-L,L) ||_q^q.
#[derive(Debug, Clone)]
pub struct SampledKernel {
    pub grid: GridFunction,
    pub q: f64,
    pub tail_q_mass: f64,
}

impl SampledKernel {
    /// Young-inequality bound on the operator-norm error committed by the
    /// truncation: rho^(1/q).
    pub fn truncation_bound(&self) -> f64 {
        if self.tail_q_mass == 0.0 {
            0.0
        } else {
            self.tail_q_mass.powf(self.q.recip())
        }
    }
}

/// Sample a kernel on the N-point grid over [-L, L) and estimate the tail mass
/// cut off by the compactification (adaptive quadrature, relative tol 1e-10).
pub fn sample_kernel(
    spec: &KernelSpec,
    n: usize,
    half_length: f64,
    q: f64,
) -> Result<SampledKernel> {
    spec.validate()?;
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::domain(format!(
            "kernel sampling requires q >= 1, got {q}"
        )));
    }
    let grid = match spec {
        KernelSpec::Tabulated(g) => {
            if g.len() != n || g.half_length() != half_length {
                return Err(Error::ShapeMismatch(format!(
                    "tabulated kernel has (N, L) = ({}, {}), requested ({}, {})",
                    g.len(),
                    g.half_length(),
                    n,
                    half_length
                )));
            }
            g.clone()
        }
        KernelSpec::Discrete(v) => {
            if v.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "discrete kernel has m = {}, requested N = {}",
                    v.len(),
                    n
                )));
            }
            let l = n as f64 / 2.0;
            if half_length != l {
                return Err(Error::ShapeMismatch(format!(
                    "discrete kernels live on the unit-step grid L = m/2 = {l}, requested L = {half_length}"
                )));
            }
            GridFunction::new(v.clone(), l)?
        }
        _ => GridFunction::from_fn(n, half_length, |x| spec.eval(x))?,
    };
    let tail_q_mass = match spec {
        KernelSpec::Tabulated(_) | KernelSpec::Discrete(_) => 0.0,
        _ => {
            let left = quad::integrate_left_tail(
                |x| spec.abs_power(x, q),
                -half_length,
                quad::TAIL_REL_TOL,
            );
            let right = quad::integrate_right_tail(
                |x| spec.abs_power(x, q),
                half_length,
                quad::TAIL_REL_TOL,
            );
            left + right
        }
    };
    Ok(SampledKernel {
        grid,
        q,
        tail_q_mass,
    })
}

// ---------------------------------------------------------------------------
// Serialization: CSV with header `x,re,im` plus a JSON sidecar {N, L}
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: f64,
}

/// Path of the JSON sidecar accompanying a grid CSV file.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    std::path::PathBuf::from(os)
}

/// Write `f` as CSV (`x,re,im`, 17 significant digits) plus its sidecar.
pub fn write_csv(f: &GridFunction, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(f.len() * 64);
    out.push_str("x,re,im\n");
    for (j, z) in f.values().iter().enumerate() {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", f.node(j), z.re, z.im));
    }
    std::fs::write(path, out)?;
    let sidecar = Sidecar {
        n: f.len(),
        l: f.half_length(),
    };
    let mut file = std::fs::File::create(sidecar_path(path))?;
    file.write_all(
        serde_json::to_string_pretty(&sidecar)
            .expect("sidecar serializes")
            .as_bytes(),
    )?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Read a grid function written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<GridFunction> {
    let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)
        .map_err(|e| Error::Parse(format!("sidecar {}: {e}", sidecar_path(path).display())))?;
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut values = Vec::with_capacity(sidecar.n);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != "x,re,im" {
                return Err(Error::Parse(format!(
                    "expected header 'x,re,im', got '{line}'"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let _x = parts.next();
        let re: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("line {i}: missing re column")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {i}: {e}")))?;
        let im: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("line {i}: missing im column")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {i}: {e}")))?;
        values.push(Complex64::new(re, im));
    }
    if values.len() != sidecar.n {
        return Err(Error::Parse(format!(
            "CSV has {} rows but sidecar says N = {}",
            values.len(),
            sidecar.n
        )));
    }
    GridFunction::new(values, sidecar.l)
}
