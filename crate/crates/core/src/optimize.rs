//! One-dimensional maximization: a uniform grid localizes the candidate
//! peaks, golden-section search polishes the best few.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Relative gap under which two maxima are considered tied. Ties go to the
/// smaller argument.
pub const TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
}

impl Maximum {
    fn beats(&self, other: &Maximum) -> bool {
        let scale = self.value.abs().max(other.value.abs());
        if (self.value - other.value).abs() <= TIE_RTOL * scale {
            self.arg < other.arg
        } else {
            self.value > other.value
        }
    }
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // 200 iterations shrink any finite bracket below the f64 resolution.
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        Maximum { arg: c, value: fc }
    } else {
        Maximum { arg: d, value: fd }
    }
}

/// Sampling layout for [`grid_refined_max`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    /// `points` samples spanning `[lo, hi]` inclusive.
    Closed,
    /// `points` samples on `[lo, hi)` for a function with period `hi - lo`.
    Periodic,
}

/// Maximize `f` over `[lo, hi]` by sampling `points` grid values, then
/// golden-section refining the `brackets` highest local maxima of the grid.
pub fn grid_refined_max<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    points: usize,
    grid: Grid,
    brackets: usize,
    tol: f64,
) -> Maximum {
    assert!(points >= 2, "grid needs at least two points");
    let step = match grid {
        Grid::Closed => (hi - lo) / (points - 1) as f64,
        Grid::Periodic => (hi - lo) / points as f64,
    };
    let at = |i: usize| match grid {
        Grid::Closed if i == points - 1 => hi,
        _ => lo + step * i as f64,
    };
    let values: Vec<f64> = (0..points).map(|i| f(at(i))).collect();

    let neighbours = |i: usize| -> (Option<usize>, Option<usize>) {
        match grid {
            Grid::Closed => (i.checked_sub(1), (i + 1 < points).then_some(i + 1)),
            Grid::Periodic => (Some((i + points - 1) % points), Some((i + 1) % points)),
        }
    };

    let mut peaks: Vec<usize> = (0..points)
        .filter(|&i| {
            let (l, r) = neighbours(i);
            l.map_or(true, |l| values[i] >= values[l]) && r.map_or(true, |r| values[i] >= values[r])
        })
        .collect();
    // Stable sort keeps the lower index first among equal grid values.
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    peaks.truncate(brackets.max(1));

    let mut best: Option<Maximum> = None;
    for &i in &peaks {
        let grid_max = Maximum {
            arg: at(i),
            value: values[i],
        };
        let (a, b) = match grid {
            Grid::Closed => (at(i.saturating_sub(1)), at((i + 1).min(points - 1))),
            Grid::Periodic => (at(i) - step, at(i) + step),
        };
        let mut refined = golden_section_max(&f, a, b, tol);
        if grid == Grid::Periodic {
            refined.arg = wrap(refined.arg, lo, hi);
        }
        let candidate = if refined.value >= grid_max.value {
            refined
        } else {
            grid_max
        };
        if best.as_ref().map_or(true, |b| candidate.beats(b)) {
            best = Some(candidate);
        }
    }
    best.expect("at least one grid peak exists")
}

fn wrap(x: f64, lo: f64, hi: f64) -> f64 {
    let period = hi - lo;
    let mut y = (x - lo).rem_euclid(period) + lo;
    if y >= hi {
        y = lo;
    }
    y
}
