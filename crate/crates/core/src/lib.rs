//! Optimal discrete averaging kernels for second-derivative smoothing.
//!
//! For a normalized kernel `u` on `{-n, …, n}` the constant
//! `C_m(u) = sup ‖D^m(u ∗ f)‖₂ / ‖f‖₂` equals the sup of the multiplier
//! symbol `(2|sin(ξ/2)|)^m·|û(ξ)|`. For `m = 2` the smallest possible value
//! is `(4/(n+1))·sin(π/(2n+2))/(1 + cos(π/(2n+2)))`, attained by a single
//! kernel built from a stretched Chebyshev polynomial. The discrete
//! Epanechnikov kernel comes within about 1.5% of it for large `n`.
//!
//! ```
//! use sharpkernel::kernels::optimal_kernel;
//! use sharpkernel::multiplier::{closed_form_c2, operator_norm};
//!
//! let u = optimal_kernel(10).unwrap();
//! let c2 = operator_norm(&u, 2).value;
//! assert!((c2 - closed_form_c2(10)).abs() < 1e-9 * c2);
//! ```

pub mod asymptotics;
pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod fixtures;
pub mod format;
pub mod kernels;
pub mod multiplier;
pub mod optimize;
pub mod signal;
pub mod verify;

pub use error::{Error, Result};
