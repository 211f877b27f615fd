//! Seeded random inputs shared by the verification suites and tests.

use rand::Rng;

use crate::kernels::{symmetrize, GeneralKernel, SymmetricKernel};
use crate::signal::TimeSeries;

/// Uniform weights in `[-1, 1]`, rescaled to sum to 1. Draws with a sum too
/// close to zero are rejected so the rescaling stays well conditioned.
pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GeneralKernel {
    loop {
        let w: Vec<f64> = (0..2 * n + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sum: f64 = w.iter().sum();
        if sum.abs() > 0.1 {
            return GeneralKernel::new(w.into_iter().map(|x| x / sum).collect())
                .expect("rescaled weights are normalized");
        }
    }
}

pub fn random_symmetric_kernel<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymmetricKernel {
    symmetrize(&random_kernel(rng, n))
}

/// Uniform white noise on `[-1, 1]`.
pub fn white_noise<R: Rng + ?Sized>(rng: &mut R, len: usize) -> TimeSeries {
    TimeSeries::new((0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("finite samples")
}
