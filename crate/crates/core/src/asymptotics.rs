//! Large-`n` behaviour of the Epanechnikov kernel.
//!
//! The un-normalized Epanechnikov polynomial
//! `p̃_n(x) = n² + 2Σ_{k<n}(n²-k²)·T_k(x)` satisfies
//! `(1-x)·p̃_n(x) = (T_n - T_{n-1})/(x-1) + (1-2n)·T_n`, and under
//! `x = cos(α/n)` the scaled product `(1/2n)(1-x)·p̃_n(x)` converges
//! uniformly on `α ∈ [0, 16]` to `sin α/α - cos α`. Its maximum `μ` fixes
//! the limit `C_2(E_n)·n²/π → 3μ/π`.

use std::f64::consts::PI;

use crate::chebyshev::{t_unchecked, ChebSeries};
use crate::error::{Error, Result};
use crate::kernels::epanechnikov_kernel;
use crate::multiplier::{closed_form_c2, operator_norm};
use crate::optimize::{grid_refined_max, Grid};

/// Upper end of the `α` range on which `μ` is defined.
pub const MU_ALPHA_MAX: f64 = 16.0;
const MU_GRID: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuResult {
    pub mu: f64,
    pub alpha_star: f64,
    pub three_mu_over_pi: f64,
}

/// `sin α/α - cos α`, with the value 0 at `α = 0`.
pub fn mu_profile(alpha: f64) -> f64 {
    if alpha.abs() < 1e-8 {
        // sin α/α - cos α = α²/3 + O(α⁴)
        return alpha * alpha / 3.0;
    }
    alpha.sin() / alpha - alpha.cos()
}

/// `μ = max_{α∈[0,16]} |sin α/α - cos α|`.
pub fn compute_mu() -> MuResult {
    let best = grid_refined_max(
        |a| mu_profile(a).abs(),
        0.0,
        MU_ALPHA_MAX,
        MU_GRID,
        Grid::Closed,
        3,
        1e-12,
    );
    MuResult {
        mu: best.value,
        alpha_star: best.arg,
        three_mu_over_pi: 3.0 * best.value / PI,
    }
}

/// `p̃_n` in the Chebyshev basis: `c_0 = n²`, `c_k = 2(n² - k²)` for `1 ≤ k < n`.
pub fn tilde_p(n: usize) -> Result<ChebSeries> {
    if n == 0 {
        return Err(Error::Range {
            what: "n",
            value: 0,
            range: "n >= 1",
        });
    }
    let n2 = (n * n) as f64;
    let mut c = Vec::with_capacity(n);
    c.push(n2);
    c.extend((1..n).map(|k| 2.0 * (n2 - (k * k) as f64)));
    ChebSeries::new(c)
}

/// `|(1-x)·p̃_n(x) - [(T_n - T_{n-1})/(x-1) + (1-2n)·T_n(x)]|`.
///
/// The left side is a Clenshaw evaluation of the series; the right side uses
/// the trigonometric form `2 sin((2n-1)θ/2)·sin(θ/2)/(1 - cos θ)` at `x = cos θ`.
pub fn verify_identity(n: usize, x: f64) -> Result<f64> {
    if !(-1.0..1.0).contains(&x) {
        return Err(Error::Precondition(format!("identity is checked on [-1, 1), got x = {x}")));
    }
    let lhs = (1.0 - x) * tilde_p(n)?.eval(x);
    let theta = x.acos();
    let nf = n as f64;
    let quotient = 2.0 * ((2.0 * nf - 1.0) * theta / 2.0).sin() * (theta / 2.0).sin() / (1.0 - theta.cos());
    let rhs = quotient + (1.0 - 2.0 * nf) * (nf * theta).cos();
    Ok((lhs - rhs).abs())
}

/// `|T_n(x) - T_{n-1}(x)|/(1-x) ≤ √2/√(1-x)` for `x < 1`.
pub fn beat_bound_check(n: usize, x: f64) -> Result<bool> {
    if n == 0 || !(-1.0..1.0).contains(&x) {
        return Err(Error::Precondition(format!("need n >= 1 and x in [-1, 1), got n = {n}, x = {x}")));
    }
    let lhs = (t_unchecked(n, x) - t_unchecked(n - 1, x)).abs() / (1.0 - x);
    let bound = 2f64.sqrt() / (1.0 - x).sqrt();
    Ok(lhs <= bound + 1e-10)
}

/// `(1/2n)(1 - cos(α/n))·p̃_n(cos(α/n))` via the closed form
/// `(1/n)·sin((2n-1)α/2n)/(2 sin(α/2n)) - ((2n-1)/2n)·cos α`.
pub fn scaled_symbol(n: usize, alpha: f64) -> f64 {
    assert!(n >= 1, "scaled symbol needs n >= 1");
    let nf = n as f64;
    let c = (2.0 * nf - 1.0) / (2.0 * nf);
    let half_step = alpha / (2.0 * nf);
    if half_step.abs() < 1e-12 {
        return 0.0;
    }
    (c * alpha).sin() / (2.0 * half_step.sin()) / nf - c * alpha.cos()
}

/// The same quantity by summing the series; kept as the second route.
pub fn scaled_symbol_series(p: &ChebSeries, n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let x = (alpha / nf).cos();
    (1.0 - x) * p.eval(x) / (2.0 * nf)
}

/// Sup over a `points`-grid on `[0, 16]` of `|scaled_symbol - (sin α/α - cos α)|`.
pub fn uniform_distance(n: usize, points: usize) -> f64 {
    (0..points)
        .map(|i| {
            let a = MU_ALPHA_MAX * i as f64 / (points - 1) as f64;
            (scaled_symbol(n, a) - mu_profile(a)).abs()
        })
        .fold(0.0, f64::max)
}

/// `max_{x∈[-1, cos(16/n)]} |(1-x)·p̃_n(x)| / 2n`, evaluated on an arccos grid.
pub fn outer_interval_max(n: usize) -> Result<f64> {
    let p = tilde_p(n)?;
    let theta_lo = (MU_ALPHA_MAX / n as f64).min(PI);
    let points = 20 * (n + 2);
    let best = grid_refined_max(
        |theta| {
            let x = theta.cos();
            ((1.0 - x) * p.eval(x)).abs()
        },
        theta_lo,
        PI,
        points,
        Grid::Closed,
        3,
        1e-12,
    );
    Ok(best.value / (2.0 * n as f64))
}

/// `C_2(E_n)·n²/π`, which tends to `3μ/π`.
pub fn epanechnikov_ratio(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Range {
            what: "n",
            value: n,
            range: "n >= 2",
        });
    }
    let e = epanechnikov_kernel(n)?;
    let nf = n as f64;
    Ok(operator_norm(&e, 2).value * nf * nf / PI)
}

/// `C_2(u_n)·(n+1)²/π`, which tends to 1.
pub fn optimal_ratio(n: usize) -> f64 {
    let np1 = (n + 1) as f64;
    closed_form_c2(n) * np1 * np1 / PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    pub n: usize,
    pub optimal_ratio: f64,
    pub epanechnikov_ratio: f64,
    pub ratio_over_limit: f64,
}

pub fn asymptotic_row(n: usize, mu: &MuResult) -> Result<AsymptoticRow> {
    let e = epanechnikov_ratio(n)?;
    Ok(AsymptoticRow {
        n,
        optimal_ratio: optimal_ratio(n),
        epanechnikov_ratio: e,
        ratio_over_limit: e / mu.three_mu_over_pi,
    })
}
