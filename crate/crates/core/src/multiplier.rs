//! Operator norms `C_m(u) = sup ‖D^m(u ∗ f)‖₂ / ‖f‖₂` computed as the sup of
//! the Fourier symbol `(2|sin(ξ/2)|)^m·|û(ξ)|` on the torus.
//!
//! For symmetric kernels and `m = 2` the same number is
//! `2·max_{[-1,1]} |(1-x)·p_u(x)|`, which gives an independent second route.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::weighted_sup;
use crate::kernels::{to_polynomial, Kernel, SymmetricKernel};
use crate::optimize::{grid_refined_max, Grid};
use crate::signal::{convolve_full, forward_differences, l2, TimeSeries};

/// Argument resolution of the golden-section refinement.
pub const XI_RESOLUTION: f64 = 1e-12;
const BRACKETS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    TorusGrid,
    PolynomialForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierBound {
    /// The norm `C_m(u)`.
    pub value: f64,
    /// A maximizing frequency in `[0, 2π)`; the smallest one on ties.
    pub argmax_xi: f64,
    pub order: usize,
    pub method: NormMethod,
}

/// `(2|sin(ξ/2)|)^m · |û(ξ)|`.
pub fn symbol_magnitude<K: Kernel + ?Sized>(u: &K, m: usize, xi: f64) -> f64 {
    let d = 2.0 * (0.5 * xi).sin().abs();
    d.powi(m as i32) * u.transfer_abs(xi)
}

/// Max of the symbol over `16·(n+m)+64` grid points on `[0, 2π)`, refined
/// around the three best local maxima.
pub fn operator_norm<K: Kernel + ?Sized>(u: &K, m: usize) -> MultiplierBound {
    assert!(m >= 1, "derivative order must be at least 1");
    let points = 16 * (u.half_width() + m) + 64;
    let best = grid_refined_max(
        |xi| symbol_magnitude(u, m, xi),
        0.0,
        2.0 * PI,
        points,
        Grid::Periodic,
        BRACKETS,
        XI_RESOLUTION,
    );
    MultiplierBound {
        value: best.value,
        argmax_xi: best.arg,
        order: m,
        method: NormMethod::TorusGrid,
    }
}

/// `C_2(u) = 2·max |(1-x)·p_u(x)|` for a symmetric kernel.
pub fn operator_norm_via_polynomial(u: &SymmetricKernel) -> MultiplierBound {
    let peak = weighted_sup(&to_polynomial(u));
    MultiplierBound {
        value: 2.0 * peak.value,
        argmax_xi: peak.arg.clamp(-1.0, 1.0).acos(),
        order: 2,
        method: NormMethod::PolynomialForm,
    }
}

/// The sharp lower bound `(4/(n+1))·sin(π/(2n+2))/(1 + cos(π/(2n+2)))` on
/// `C_2(u)` over normalized kernels of half-width `n`, attained by
/// [`crate::kernels::optimal_kernel`].
pub fn closed_form_c2(n: usize) -> f64 {
    let np1 = (n + 1) as f64;
    let a = PI / (2.0 * np1);
    4.0 / np1 * a.sin() / (1.0 + a.cos())
}

/// `‖D^m(u ∗ f)‖₂ / ‖f‖₂` with `f` zero outside its window, computed on the
/// full support so nothing is truncated.
pub fn rayleigh_quotient<K: Kernel + ?Sized>(u: &K, m: usize, f: &TimeSeries) -> Result<f64> {
    let norm_f = l2(f.values());
    if norm_f == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let smoothed = convolve_full(u, f.values());
    let mut padded = vec![0.0; smoothed.len() + 2 * m];
    padded[m..m + smoothed.len()].copy_from_slice(&smoothed);
    Ok(l2(&forward_differences(&padded, m)) / norm_f)
}

/// Minimum `length / sigma` accepted by [`wave_packet`].
pub const WAVE_PACKET_MIN_SPAN: f64 = 10.0;

/// Gaussian-windowed cosine `exp(-(k-c)²/2σ²)·cos(ξ*·k)` centred in a window
/// of `length` samples. Its spectrum concentrates at `±ξ*` with width `O(1/σ)`.
pub fn wave_packet(xi_star: f64, sigma: f64, length: usize) -> Result<TimeSeries> {
    if !(sigma > 0.0) || (length as f64) < WAVE_PACKET_MIN_SPAN * sigma {
        return Err(Error::Precondition(format!(
            "wave packet needs sigma > 0 and length >= {WAVE_PACKET_MIN_SPAN}·sigma (sigma = {sigma}, length = {length})"
        )));
    }
    let centre = (length as f64 - 1.0) / 2.0;
    let values = (0..length)
        .map(|k| {
            let t = k as f64 - centre;
            (-(t * t) / (2.0 * sigma * sigma)).exp() * (xi_star * k as f64).cos()
        })
        .collect();
    TimeSeries::new(values)
}
