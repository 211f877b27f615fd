//! The minimax problem behind the optimal kernel: among polynomials `S` of
//! degree `d` with `S(1) = 1`, minimize `max_{[-1,1]} |(1-x)·S(x)|`.
//!
//! With `N = d + 1`, the minimizer satisfies `(1-x)·S(x) = q(x) = -α·T_N(L(x))`
//! where `L` is the affine map sending `-1 ↦ -1` and `1 ↦ cos(π/2N)`, the
//! largest zero of `T_N`. The minimax value is
//! `α = 2·sin(π/2N) / (N·(1 + cos(π/2N)))`.

use std::f64::consts::PI;

use crate::chebyshev::{cheb_nodes, deflate_at_one, t_unchecked, transform, ChebSeries};
use crate::error::{Error, Result};
use crate::optimize::{grid_refined_max, Grid, Maximum};

pub const MAX_DEGREE: usize = 4096;

/// Tolerance on `S(1) = 1` accepted by [`minimax_lower_bound_check`].
pub const UNIT_VALUE_TOL: f64 = 1e-9;

/// Minimax value `α(d)` for degree `d` (so `N = d + 1`).
pub fn alpha_closed_form(d: usize) -> f64 {
    let n = (d + 1) as f64;
    let half = PI / (2.0 * n);
    2.0 * half.sin() / (n * (1.0 + half.cos()))
}

/// The affine stretch `L(x) = scale·(x + 1) + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchMap {
    pub scale: f64,
    pub shift: f64,
}

impl StretchMap {
    pub fn for_degree(d: usize) -> Self {
        let n = (d + 1) as f64;
        StretchMap {
            scale: (1.0 + (PI / (2.0 * n)).cos()) / 2.0,
            shift: -1.0,
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.scale * (x + 1.0) + self.shift
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (y - self.shift) / self.scale - 1.0
    }
}

/// `L(x)` for degree `d`.
pub fn stretch_l(d: usize, x: f64) -> f64 {
    StretchMap::for_degree(d).apply(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSolution {
    /// Degree of `S`.
    pub degree: usize,
    pub alpha: f64,
    pub stretch_scale: f64,
    pub stretch_shift: f64,
    /// The minimax polynomial, `S(1) = 1`.
    pub s: ChebSeries,
    /// `q(x) = (1 - x)·S(x)`, degree `degree + 1`.
    pub q: ChebSeries,
    /// `y_1 > … > y_N` with `q(y_i) = -α·(-1)^i` and `y_N = -1`.
    pub alternation_points: Vec<f64>,
}

impl ExtremalSolution {
    pub fn stretch(&self) -> StretchMap {
        StretchMap {
            scale: self.stretch_scale,
            shift: self.stretch_shift,
        }
    }

    /// Number of alternation points, the `N = degree + 1` of the construction.
    pub fn order(&self) -> usize {
        self.degree + 1
    }
}

pub fn build_solution(d: usize) -> Result<ExtremalSolution> {
    if d > MAX_DEGREE {
        return Err(Error::Range {
            what: "degree",
            value: d,
            range: "0..=4096",
        });
    }
    let order = d + 1;
    let alpha = alpha_closed_form(d);
    let stretch = StretchMap::for_degree(d);

    let samples: Vec<f64> = cheb_nodes(order + 1)
        .into_iter()
        .map(|x| -alpha * t_unchecked(order, stretch.apply(x).clamp(-1.0, 1.0)))
        .collect();
    let q = transform(&samples)?;
    let quotient = deflate_at_one(&q)?;
    let s = ChebSeries::new(quotient.into_coeffs().into_iter().map(|c| -c).collect())?;

    let mut alternation_points: Vec<f64> = (1..=order)
        .map(|i| stretch.inverse((i as f64 * PI / order as f64).cos()))
        .collect();
    // cos(π) is exactly -1 and L⁻¹(-1) = -1, but pin it regardless.
    alternation_points[order - 1] = -1.0;

    Ok(ExtremalSolution {
        degree: d,
        alpha,
        stretch_scale: stretch.scale,
        stretch_shift: stretch.shift,
        s,
        q,
        alternation_points,
    })
}

/// `max_{x∈[-1,1]} |(1-x)·p(x)|`, located on an arccos-uniform grid of
/// `10·(deg + 2)` points and refined by golden-section search.
pub fn weighted_sup(p: &ChebSeries) -> Maximum {
    let points = 10 * (p.degree() + 2);
    let g = |theta: f64| {
        let x = theta.cos();
        ((1.0 - x) * p.eval(x)).abs()
    };
    let m = grid_refined_max(g, 0.0, PI, points, Grid::Closed, 3, 1e-12);
    Maximum {
        arg: m.arg.cos(),
        value: m.value,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquioscillationReport {
    pub passed: bool,
    pub alpha: f64,
    /// `|(1 - y_i)·S(y_i) + α·(-1)^i|` for `i = 1..=N`.
    pub residuals: Vec<f64>,
    /// Max of `|(1-x)·S(x)|` over a `10·N`-point grid.
    pub grid_max: f64,
    pub s_at_one: f64,
}

impl EquioscillationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks the alternation values and the grid bound `|(1-x)·S| ≤ α(1 + tol)`.
///
/// Everything is evaluated from `sol.s`, so a tampered `S` is detected even
/// if `sol.q` is left untouched.
pub fn verify_equioscillation(sol: &ExtremalSolution, tol: f64) -> EquioscillationReport {
    let product = |x: f64| (1.0 - x) * sol.s.eval(x);
    let residuals: Vec<f64> = sol
        .alternation_points
        .iter()
        .enumerate()
        .map(|(idx, &y)| {
            let sign = if (idx + 1) % 2 == 0 { 1.0 } else { -1.0 };
            (product(y) + sol.alpha * sign).abs()
        })
        .collect();

    let points = 10 * sol.order();
    let grid_max = (0..points)
        .map(|i| {
            let theta = PI * i as f64 / (points - 1).max(1) as f64;
            product(theta.cos()).abs()
        })
        .fold(0.0, f64::max);

    let passed = residuals.len() == sol.order()
        && residuals.iter().all(|r| *r <= tol)
        && grid_max <= sol.alpha * (1.0 + tol);
    EquioscillationReport {
        passed,
        alpha: sol.alpha,
        residuals,
        grid_max,
        s_at_one: sol.s.eval(1.0),
    }
}

/// Roots of `q` on `[-1, 1]`: sign changes of `(1-x)·S(x)` over a
/// `50·N`-point arccos grid of `[-1, 1)`, plus the root at `x = 1`.
pub fn count_roots(sol: &ExtremalSolution) -> usize {
    let points = 50 * sol.order();
    let mut last_sign = 0.0f64;
    let mut changes = 0;
    for i in 1..=points {
        let theta = PI * i as f64 / points as f64;
        let x = theta.cos();
        let v = (1.0 - x) * sol.s.eval(x);
        if v == 0.0 {
            continue;
        }
        let sign = v.signum();
        if last_sign != 0.0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }
    let root_at_one = sol.q.eval(1.0).abs() <= 1e-9 * sol.q.abs_sum();
    changes + usize::from(root_at_one)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub passed: bool,
    /// `m(p) = max |(1-x)·p(x)|`.
    pub max_abs: f64,
    pub alpha: f64,
    /// `m(p) - α`.
    pub gap: f64,
}

/// Checks `max |(1-x)·p(x)| ≥ α(d)` for a challenger `p` of degree `≤ d`
/// with `p(1) = 1`.
pub fn minimax_lower_bound_check(p: &ChebSeries, d: usize) -> Result<LowerBoundReport> {
    if p.degree() > d {
        return Err(Error::Precondition(format!(
            "challenger has degree {} above the bound {d}",
            p.degree()
        )));
    }
    let at_one = p.eval(1.0);
    if (at_one - 1.0).abs() > UNIT_VALUE_TOL {
        return Err(Error::Precondition(format!("p(1) = {at_one} but must equal 1")));
    }
    let alpha = alpha_closed_form(d);
    let max_abs = weighted_sup(p).value;
    Ok(LowerBoundReport {
        passed: max_abs >= alpha * (1.0 - 1e-9),
        max_abs,
        alpha,
        gap: max_abs - alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alpha_examples() {
        assert_relative_eq!(alpha_closed_form(0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(alpha_closed_form(1), 2f64.sqrt() - 1.0, epsilon = 1e-15);
        // 2 sin(π/12) / (6 (1 + cos(π/12)))
        assert_relative_eq!(alpha_closed_form(5), 0.043_884_165_862_465_28, epsilon = 1e-15);
        for d in 0..200 {
            assert!(alpha_closed_form(d + 1) < alpha_closed_form(d));
            assert!(alpha_closed_form(d) > 0.0);
        }
    }

    #[test]
    fn alpha_one_brute_force() {
        // p(x) = a + (1 - a)x, minimize max |(1-x)p(x)| over a.
        let xs: Vec<f64> = (0..=4000).map(|i| -1.0 + i as f64 / 2000.0).collect();
        let best = (0..=40_000)
            .map(|i| {
                let a = -2.0 + i as f64 * 1e-4;
                xs.iter()
                    .map(|&x| ((1.0 - x) * (a + (1.0 - a) * x)).abs())
                    .fold(0.0, f64::max)
            })
            .fold(f64::MAX, f64::min);
        assert!((best - alpha_closed_form(1)).abs() < 1e-4, "brute force {best}");
    }

    #[test]
    fn stretch_examples() {
        for d in 0..20 {
            assert_eq!(stretch_l(d, -1.0), -1.0);
            let l = StretchMap::for_degree(d);
            assert!((l.inverse(l.apply(0.3)) - 0.3).abs() < 1e-15);
            assert!(l.apply(1.0) <= 1.0 && l.scale > 0.0);
        }
        assert_relative_eq!(stretch_l(1, 1.0), (PI / 4.0).cos(), epsilon = 1e-15);
        assert_relative_eq!(stretch_l(0, 0.0), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn build_examples() {
        let s0 = build_solution(0).unwrap();
        assert_eq!(s0.s.degree(), 0);
        assert_relative_eq!(s0.s.coeffs()[0], 1.0, epsilon = 1e-14);

        let s1 = build_solution(1).unwrap();
        assert_relative_eq!(s1.s.coeffs()[0], 0.396_446_609_406_726_2, epsilon = 1e-12);
        assert_relative_eq!(s1.s.coeffs()[1], 0.603_553_390_593_273_8, epsilon = 1e-12);

        let s2 = build_solution(2).unwrap();
        let expect = [1.0, -1.0, 1.0].map(|sgn| sgn * s2.alpha);
        for (y, e) in s2.alternation_points.iter().zip(expect) {
            // q(y_1) = +α, q(y_2) = -α, q(y_3) = +α
            assert!((s2.q.eval(*y) - e).abs() < 1e-12, "q({y}) vs {e}");
        }
        assert!(matches!(build_solution(MAX_DEGREE + 1), Err(Error::Range { .. })));
    }

    #[test]
    fn stretched_chebyshev_oracle() {
        // S evaluated independently as -α T_N(L(x)) / (1 - x) away from x = 1.
        for d in [1usize, 3, 8, 20] {
            let sol = build_solution(d).unwrap();
            let l = sol.stretch();
            for i in 0..40 {
                let x = -1.0 + 1.8 * i as f64 / 39.0;
                let direct = -sol.alpha * t_unchecked(d + 1, l.apply(x)) / (1.0 - x);
                assert!((sol.s.eval(x) - direct).abs() < 1e-11, "d={d} x={x}");
            }
        }
    }

    #[test]
    fn invariants_up_to_64() {
        for d in 0..=64 {
            let sol = build_solution(d).unwrap();
            assert!((sol.alpha - alpha_closed_form(d)).abs() < 1e-15);
            assert!((sol.s.eval(1.0) - 1.0).abs() <= 1e-9);
            assert!(sol.q.eval(1.0).abs() <= 1e-9 * sol.q.abs_sum());
            assert_eq!(sol.q.degree(), d + 1);
            assert_eq!(*sol.alternation_points.last().unwrap(), -1.0);
            assert!(sol.alternation_points.windows(2).all(|w| w[0] > w[1]));
            assert!(sol.alternation_points[0] < 1.0);
            for (i, &y) in sol.alternation_points.iter().enumerate() {
                let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
                assert!((sol.q.eval(y) + sol.alpha * sign).abs() <= 1e-9, "d={d} i={i}");
            }
            let report = verify_equioscillation(&sol, 1e-9);
            assert!(report.passed, "d={d}: {report:?}");
            assert_eq!(count_roots(&sol), sol.order(), "d={d}");
        }
    }

    #[test]
    fn verify_examples() {
        assert!(verify_equioscillation(&build_solution(5).unwrap(), 1e-9).passed);

        let mut bad = build_solution(5).unwrap();
        let shifted: Vec<f64> = bad.s.coeffs().iter().map(|c| c + 1e-3).collect();
        bad.s = ChebSeries::new(shifted).unwrap();
        assert!(!verify_equioscillation(&bad, 1e-9).passed);

        let zero = build_solution(0).unwrap();
        let r = verify_equioscillation(&zero, 1e-9);
        assert!(r.passed);
        assert_eq!(zero.alternation_points, vec![-1.0]);
        assert_relative_eq!(zero.q.eval(-1.0), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn negated_alpha_is_rejected() {
        let mut sol = build_solution(4).unwrap();
        sol.alpha = -sol.alpha;
        assert!(!verify_equioscillation(&sol, 1e-9).passed);
    }

    #[test]
    fn lower_bound_examples() {
        for d in [0usize, 1, 4, 9] {
            let sol = build_solution(d).unwrap();
            let r = minimax_lower_bound_check(&sol.s, d).unwrap();
            assert!(r.passed);
            assert!(r.gap.abs() < 1e-10, "d={d} gap={}", r.gap);
        }
        let one = ChebSeries::constant(1.0);
        let r = minimax_lower_bound_check(&one, 3).unwrap();
        assert_relative_eq!(r.max_abs, 2.0, epsilon = 1e-14);
        assert!(r.passed);

        // (1-x)(1+x)/2 = (1-x²)/2 peaks at x = 0.
        let tri = ChebSeries::new(vec![0.5, 0.5]).unwrap();
        let r = minimax_lower_bound_check(&tri, 1).unwrap();
        assert_relative_eq!(r.max_abs, 0.5, epsilon = 1e-12);
        assert!(r.passed);

        let off = ChebSeries::new(vec![0.5, 0.6]).unwrap();
        assert!(matches!(minimax_lower_bound_check(&off, 1), Err(Error::Precondition(_))));
        assert!(matches!(minimax_lower_bound_check(&tri, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_challengers_never_beat_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1usize, 2, 3, 5, 8] {
            let alpha = alpha_closed_form(d);
            for _ in 0..200 {
                let raw: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                if sum.abs() < 1e-3 {
                    continue;
                }
                let p = ChebSeries::new(raw.iter().map(|c| c / sum).collect()).unwrap();
                let r = minimax_lower_bound_check(&p, d).unwrap();
                assert!(r.max_abs >= alpha - 1e-9, "d={d} m={} α={alpha}", r.max_abs);
            }
        }
    }

    #[test]
    fn large_degree_builds() {
        let sol = build_solution(1024).unwrap();
        assert!(verify_equioscillation(&sol, 1e-9).passed);
    }
}
