//! Invariant suites behind `sharpkernel verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{
    beat_bound_check, compute_mu, epanechnikov_ratio, optimal_ratio, uniform_distance, verify_identity,
};
use crate::chebyshev::ChebSeries;
use crate::error::Result;
use crate::extremal::{
    alpha_closed_form, build_solution, count_roots, minimax_lower_bound_check, verify_equioscillation,
    ExtremalSolution,
};
use crate::fixtures::{random_kernel, random_symmetric_kernel};
use crate::kernels::{constant_kernel, optimal_kernel, triangle_kernel};
use crate::multiplier::{closed_form_c2, operator_norm, operator_norm_via_polynomial, rayleigh_quotient, wave_packet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Extremal,
    Multiplier,
    Asymptotics,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Largest degree / half-width swept by the extremal and multiplier suites.
    pub n_max: usize,
    /// Multiplies every numerical tolerance (not the asymptotic windows).
    pub tol_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_max: 64,
            tol_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured quantity (worst residual, ratio, …).
    pub value: f64,
    pub limit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

struct Collector {
    scale: f64,
    checks: Vec<Check>,
}

impl Collector {
    fn new(scale: f64) -> Self {
        Collector {
            scale,
            checks: Vec::new(),
        }
    }

    /// `value ≤ tol·scale`.
    fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        let limit = tol * self.scale;
        self.push(name, value <= limit, value, format!("<= {limit:e}"));
    }

    fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.push(name, (lo..=hi).contains(&value), value, format!("in [{lo}, {hi}]"));
    }

    fn holds(&mut self, name: &str, ok: bool, value: f64, limit: impl Into<String>) {
        self.push(name, ok, value, limit.into());
    }

    fn push(&mut self, name: &str, passed: bool, value: f64, limit: String) {
        // NaN never passes.
        let passed = passed && !value.is_nan();
        self.checks.push(Check {
            name: name.to_owned(),
            passed,
            value,
            limit,
        });
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_owned(),
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
        }
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> VerifyReport {
    let suites = match suite {
        Suite::Extremal => vec![extremal_suite(opts)],
        Suite::Multiplier => vec![multiplier_suite(opts)],
        Suite::Asymptotics => vec![asymptotics_suite(opts)],
        Suite::All => vec![extremal_suite(opts), multiplier_suite(opts), asymptotics_suite(opts)],
    };
    VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

pub fn extremal_suite(opts: &VerifyOptions) -> SuiteReport {
    extremal_suite_with(opts, build_solution)
}

/// Extremal checks against solutions produced by `build`, so that the
/// harness itself can be exercised with a faulty constructor.
pub fn extremal_suite_with<F>(opts: &VerifyOptions, build: F) -> SuiteReport
where
    F: Fn(usize) -> Result<ExtremalSolution>,
{
    let mut c = Collector::new(opts.tol_scale);
    let tol = 1e-9 * opts.tol_scale;

    let mut worst_residual = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut all_pass = true;
    let mut roots_ok = true;
    let mut built = true;
    for d in 0..=opts.n_max {
        let sol = match build(d) {
            Ok(s) => s,
            Err(_) => {
                built = false;
                continue;
            }
        };
        let report = verify_equioscillation(&sol, tol);
        all_pass &= report.passed;
        worst_residual = worst_residual.max(report.max_residual());
        worst_unit = worst_unit.max((report.s_at_one - 1.0).abs());
        roots_ok &= count_roots(&sol) == sol.order();
    }
    c.holds("solutions_built", built, opts.n_max as f64, "every degree builds");
    c.holds("equioscillation", all_pass, worst_residual, format!("residuals and grid max within {tol:e}"));
    c.at_most("unit_value_at_one", worst_unit, 1e-9);
    c.holds("root_count", roots_ok, opts.n_max as f64, "N roots on [-1, 1]");

    let monotone = (0..opts.n_max.max(1)).all(|d| alpha_closed_form(d + 1) < alpha_closed_form(d));
    c.holds("alpha_decreasing", monotone, alpha_closed_form(opts.n_max), "strictly decreasing");

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst_gap = f64::INFINITY;
    for d in [1usize, 2, 3, 5, 8] {
        for _ in 0..200 {
            let raw: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            if sum.abs() < 1e-3 {
                continue;
            }
            let p = ChebSeries::new(raw.iter().map(|v| v / sum).collect()).expect("finite");
            if let Ok(r) = minimax_lower_bound_check(&p, d) {
                worst_gap = worst_gap.min(r.gap);
            }
        }
    }
    c.holds("random_challengers", worst_gap >= -1e-9 * opts.tol_scale, worst_gap, ">= -1e-9");
    c.finish("extremal")
}

pub fn multiplier_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut c = Collector::new(opts.tol_scale);
    let n_max = opts.n_max.min(64);

    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let value = optimal_kernel(n).map(|u| operator_norm(&u, 2).value).unwrap_or(f64::NAN);
        let cf = closed_form_c2(n);
        worst = worst.max((value - cf).abs() / cf);
    }
    c.at_most("optimal_matches_closed_form", worst, 1e-9);

    let worst = (0..=n_max)
        .map(|n| (operator_norm(&constant_kernel(n), 1).value - 2.0 / (2 * n + 1) as f64).abs())
        .fold(0.0, f64::max);
    c.at_most("constant_first_order", worst, 1e-10);

    let worst = (0..=n_max)
        .map(|n| (operator_norm(&triangle_kernel(n), 2).value - 4.0 / ((n + 1) * (n + 1)) as f64).abs())
        .fold(0.0, f64::max);
    c.at_most("triangle_second_order", worst, 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut dual = 0.0f64;
    let mut sharp = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(1..=16);
        let u = random_symmetric_kernel(&mut rng, n);
        let torus = operator_norm(&u, 2).value;
        let poly = operator_norm_via_polynomial(&u).value;
        dual = dual.max((torus - poly).abs() / torus);
        sharp = sharp.min(torus - closed_form_c2(n));
    }
    c.at_most("dual_path_agreement", dual, 1e-9);
    c.holds("sharp_lower_bound", sharp >= -1e-9 * opts.tol_scale, sharp, ">= -1e-9");

    let mut first_order = f64::INFINITY;
    for n in [2usize, 5, 10] {
        for _ in 0..100 {
            let u = random_kernel(&mut rng, n);
            first_order = first_order.min(operator_norm(&u, 1).value - 2.0 / (2 * n + 1) as f64);
        }
    }
    c.holds("first_order_lower_bound", first_order >= -1e-9 * opts.tol_scale, first_order, ">= -1e-9");

    let mut excess = f64::NEG_INFINITY;
    for _ in 0..200 {
        let n = rng.gen_range(0..=8);
        let m = rng.gen_range(1..=3);
        let u = random_kernel(&mut rng, n);
        let len = rng.gen_range(1..=64);
        let f = crate::fixtures::white_noise(&mut rng, len);
        if let Ok(q) = rayleigh_quotient(&u, m, &f) {
            excess = excess.max(q - operator_norm(&u, m).value);
        }
    }
    c.holds("rayleigh_below_norm", excess <= 1e-9 * opts.tol_scale, excess, "<= 1e-9");

    let witness = optimal_kernel(10)
        .and_then(|u| {
            let b = operator_norm(&u, 2);
            let f = wave_packet(b.argmax_xi, 400.0, 20_000)?;
            Ok(rayleigh_quotient(&u, 2, &f)? / b.value)
        })
        .unwrap_or(f64::NAN);
    c.holds("wave_packet_witness", witness >= 0.99, witness, ">= 0.99");
    c.finish("multiplier")
}

pub fn asymptotics_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut c = Collector::new(opts.tol_scale);
    let mu = compute_mu();
    c.within("three_mu_over_pi", mu.three_mu_over_pi, 1.014, 1.016);
    c.holds("mu_lower_bound", mu.mu >= 1.0625, mu.mu, ">= 1.0625");

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut worst = 0.0f64;
    for n in 1..=512usize {
        for _ in 0..100 {
            let x = rng.gen_range(-1.0..1.0);
            let r = verify_identity(n, x).unwrap_or(f64::INFINITY);
            worst = worst.max(r / (n * n) as f64);
        }
    }
    c.at_most("chebyshev_identity", worst, 1e-8);

    let mut beat = true;
    for n in 1..=64usize {
        for i in 0..1000 {
            let x = if i == 0 { -1.0 } else { rng.gen_range(-1.0..1.0) };
            beat &= beat_bound_check(n, x).unwrap_or(false);
        }
    }
    c.holds("beat_frequency_bound", beat, 64.0, "all hold");

    c.at_most("uniform_convergence_4096", uniform_distance(4096, 1601), 0.005);
    c.within("optimal_ratio_2048", optimal_ratio(2048), 0.99, 1.01);
    let e = epanechnikov_ratio(2048).unwrap_or(f64::NAN) / mu.three_mu_over_pi;
    c.within("epanechnikov_ratio_2048", e, 0.99, 1.01);
    c.finish("asymptotics")
}
