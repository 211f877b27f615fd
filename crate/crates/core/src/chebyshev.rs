//! Chebyshev polynomials of the first and second kind, Gauss–Chebyshev
//! nodes, the discrete Chebyshev transform, and division by `(x - 1)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Inputs within this distance of `[-1, 1]` are clamped onto the interval.
pub const CLAMP_BAND: f64 = 1e-12;

/// Below this value of `sin θ` the second-kind polynomial uses its endpoint limit.
const U_LIMIT_SIN: f64 = 1e-8;

fn clamp_unit(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + CLAMP_BAND {
        return Err(Error::Domain { x });
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// `T_k(x) = cos(k·arccos x)`.
pub fn eval_t(k: usize, x: f64) -> Result<f64> {
    let x = clamp_unit(x)?;
    Ok(t_unchecked(k, x))
}

#[inline]
pub(crate) fn t_unchecked(k: usize, x: f64) -> f64 {
    (k as f64 * x.acos()).cos()
}

/// `U_k(x) = sin((k+1)θ) / sin θ` at `x = cos θ`.
pub fn eval_u(k: usize, x: f64) -> Result<f64> {
    let x = clamp_unit(x)?;
    let theta = x.acos();
    let s = theta.sin();
    if s < U_LIMIT_SIN {
        let endpoint = (k + 1) as f64;
        return Ok(if x > 0.0 || k % 2 == 0 { endpoint } else { -endpoint });
    }
    Ok(((k + 1) as f64 * theta).sin() / s)
}

/// Gauss–Chebyshev nodes `cos(π(j + ½)/M)` for `j = 0..M`, in decreasing order.
pub fn cheb_nodes(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| (PI * (j as f64 + 0.5) / m as f64).cos())
        .collect()
}

/// A polynomial `Σ c_k T_k(x)` stored by its Chebyshev coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("Chebyshev series needs at least one coefficient".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Precondition(format!("coefficient c_{k} is not finite")));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Σ |c_k|`, the scale used by relative tolerances on this series.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Clenshaw evaluation. Valid for any real `x`; accurate on `[-1, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let two_x = 2.0 * x;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + two_x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }
}

/// Free-function form of [`ChebSeries::eval`].
pub fn clenshaw_eval(s: &ChebSeries, x: f64) -> f64 {
    s.eval(x)
}

/// Coefficients of the degree `M - 1` polynomial interpolating `values` at
/// `cheb_nodes(M)`.
///
/// `T_k(node_j) = cos(π k (2j+1) / 2M)`; the angle index is reduced modulo
/// `4M` in integer arithmetic so only `4M` distinct cosines are needed.
pub fn transform(values: &[f64]) -> Result<ChebSeries> {
    let m = values.len();
    if m == 0 {
        return Err(Error::LengthMismatch {
            expected: 1,
            actual: 0,
        });
    }
    if let Some(j) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Precondition(format!("sample {j} is not finite")));
    }
    let period = 4 * m;
    let table: Vec<f64> = (0..period)
        .map(|i| (PI * i as f64 / (2 * m) as f64).cos())
        .collect();
    let mut coeffs = Vec::with_capacity(m);
    for k in 0..m {
        let mut acc = 0.0;
        let mut idx = k % period;
        let stride = (2 * k) % period;
        for &v in values {
            acc += v * table[idx];
            idx += stride;
            if idx >= period {
                idx -= period;
            }
        }
        let scale = if k == 0 { 1.0 } else { 2.0 };
        coeffs.push(scale * acc / m as f64);
    }
    ChebSeries::new(coeffs)
}

/// Transform whose input length must match an expected node count.
pub fn transform_checked(values: &[f64], nodes: usize) -> Result<ChebSeries> {
    if values.len() != nodes {
        return Err(Error::LengthMismatch {
            expected: nodes,
            actual: values.len(),
        });
    }
    transform(values)
}

/// q(1) must vanish to this fraction of `Σ|c_k|` before deflation.
pub const DEFLATE_ROOT_RTOL: f64 = 1e-9;
/// Accepted multiplication round-trip error, relative to `Σ|c_k|`.
pub const DEFLATE_CHECK_RTOL: f64 = 1e-10;
const DEFLATE_CHECK_POINTS: usize = 32;

/// Returns `s` with `(x - 1)·s(x) = q(x)`. Requires `q(1) = 0`.
///
/// The quotient is sampled at `cheb_nodes(d)`, none of which equals 1, and
/// recovered by [`transform`]. The product is re-checked at fixed
/// pseudo-random points before returning.
pub fn deflate_at_one(q: &ChebSeries) -> Result<ChebSeries> {
    let scale = q.abs_sum();
    let at_one = q.eval(1.0);
    if at_one.abs() > DEFLATE_ROOT_RTOL * scale {
        return Err(Error::Precondition(format!(
            "q(1) = {at_one:e} does not vanish (Σ|c_k| = {scale:e})"
        )));
    }
    let d = q.degree();
    if d == 0 {
        return Ok(ChebSeries::constant(0.0));
    }
    let samples: Vec<f64> = cheb_nodes(d).into_iter().map(|x| q.eval(x) / (x - 1.0)).collect();
    let s = transform(&samples)?;

    let worst = check_points()
        .map(|x| ((x - 1.0) * s.eval(x) - q.eval(x)).abs())
        .fold(0.0, f64::max);
    if worst > DEFLATE_CHECK_RTOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "deflation round-trip error {worst:e} exceeds {DEFLATE_CHECK_RTOL:e}·Σ|c_k|"
        )));
    }
    Ok(s)
}

// Deterministic low-discrepancy points spread over [-1, 1].
fn check_points() -> impl Iterator<Item = f64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    (1..=DEFLATE_CHECK_POINTS).map(|i| 2.0 * (i as f64 * GOLDEN).fract() - 1.0)
}
