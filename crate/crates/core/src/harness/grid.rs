//! Log-uniform grid search with local pattern refinement.

use std::f64::consts::LN_10;

use crate::fewnomial::Fewnomial;

const TOP: usize = 8;

/// `f` with `f64` data, evaluated in `log10` coordinates.
#[derive(Clone, Debug)]
pub struct LogEvaluator {
    n: usize,
    coeffs: Vec<f64>,
    exponents: Vec<Vec<f64>>,
}

impl LogEvaluator {
    pub fn new(f: &Fewnomial) -> Self {
        LogEvaluator {
            n: f.n(),
            coeffs: f.terms().iter().map(|t| t.coeff.to_f64()).collect(),
            exponents: f.terms().iter().map(|t| t.exponent.to_f64()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `f(10^u)`, scaled by the largest monomial so that overflow yields a
    /// signed infinity rather than NaN.
    pub fn eval(&self, u: &[f64]) -> f64 {
        let logs: Vec<f64> = self
            .exponents
            .iter()
            .map(|a| a.iter().zip(u).map(|(x, y)| x * y).sum::<f64>() * LN_10)
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scaled: f64 = self.coeffs.iter().zip(&logs).map(|(c, l)| c * (l - top).exp()).sum();
        if scaled == 0.0 {
            return 0.0;
        }
        scaled * top.exp()
    }
}

/// Van der Corput point `k ≥ 1` in base 2.
fn van_der_corput(mut k: usize) -> f64 {
    let (mut v, mut denom) = (0.0, 1.0);
    while k > 0 {
        denom *= 2.0;
        v += (k & 1) as f64 / denom;
        k >>= 1;
    }
    v
}

/// Axis sample `i`: the two endpoints first, then a nested low-discrepancy
/// sequence, so the first `N` samples form the grid for `N` points per axis.
fn axis(i: usize, lo: f64, hi: f64) -> f64 {
    let t = match i {
        0 => 0.0,
        1 => 1.0,
        k => van_der_corput(k - 1),
    };
    lo + (hi - lo) * t
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    pub value: f64,
    /// Best point found, in `log10` coordinates.
    pub argmax: Vec<f64>,
    /// Largest change of `f` under the final refinement step.
    pub resolution: f64,
}

struct Refined {
    value: f64,
    point: Vec<f64>,
    step: f64,
}

/// Axes followed by the pairwise diagonals `e_i ± e_j`.
fn search_directions(n: usize) -> Vec<Vec<f64>> {
    let unit = |i: usize| -> Vec<f64> { (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
    let mut dirs: Vec<Vec<f64>> = (0..n).map(unit).collect();
    for i in 0..n {
        for j in i + 1..n {
            for s in [1.0, -1.0] {
                let mut d = unit(i);
                d[j] = s;
                dirs.push(d);
            }
        }
    }
    dirs
}

/// Hooke-Jeeves pattern search inside the box, accepting only improvements.
fn refine(g: &LogEvaluator, start: &[f64], value: f64, step: f64, rounds: usize, lo: f64, hi: f64) -> Refined {
    let mut best = start.to_vec();
    let mut best_v = value;
    let mut h = step;
    let clamp = |x: f64| x.clamp(lo, hi);
    let dirs = search_directions(g.n());
    for _ in 0..rounds {
        let base = best.clone();
        for d in &dirs {
            for sign in [1.0, -1.0] {
                let c: Vec<f64> = best.iter().zip(d).map(|(x, di)| clamp(x + sign * h * di)).collect();
                let v = g.eval(&c);
                if v > best_v {
                    best_v = v;
                    best = c;
                    break;
                }
            }
        }
        if best == base {
            h /= 2.0;
            continue;
        }
        // Pattern move along the last displacement.
        let probe: Vec<f64> = best.iter().zip(&base).map(|(b, a)| clamp(2.0 * b - a)).collect();
        let v = g.eval(&probe);
        if v > best_v {
            best_v = v;
            best = probe;
        }
    }
    Refined {
        value: best_v,
        point: best,
        step: h,
    }
}

fn insert_top(top: &mut Vec<(f64, Vec<f64>, bool)>, v: f64, p: Vec<f64>) -> bool {
    if top.len() == TOP && top.last().map_or(false, |t| !(v > t.0)) {
        return false;
    }
    let pos = top.iter().position(|t| v > t.0).unwrap_or(top.len());
    top.insert(pos, (v, p, false));
    top.truncate(TOP);
    true
}

/// Grid search over `[10^lo, 10^hi]^n` refined around the best grid points.
///
/// Nondecreasing in `points_per_axis` and `refinement_rounds`: the grid for
/// `N` points per axis is contained in the grid for `N+1`, and refinements
/// started at coarser levels are kept.
///
/// # Panics
/// When `points_per_axis < 3` or the range is empty.
pub fn grid_supremum_report(f: &Fewnomial, log_range: [f64; 2], points_per_axis: usize, refinement_rounds: usize) -> GridReport {
    assert!(points_per_axis >= 3, "points_per_axis must be at least 3");
    let [lo, hi] = log_range;
    assert!(lo < hi, "empty range");
    let g = LogEvaluator::new(f);
    let n = g.n();
    let mut top: Vec<(f64, Vec<f64>, bool)> = Vec::with_capacity(TOP + 1);
    let mut best = Refined {
        value: f64::NEG_INFINITY,
        point: vec![lo; n],
        step: hi - lo,
    };
    let mut idx = vec![0usize; n];
    for level in 3..=points_per_axis {
        // Enumerate the points of this level not present in the previous one.
        idx.iter_mut().for_each(|i| *i = 0);
        loop {
            if level == 3 || idx.contains(&(level - 1)) {
                let p: Vec<f64> = idx.iter().map(|&i| axis(i, lo, hi)).collect();
                let v = g.eval(&p);
                if v > best.value {
                    best = Refined { value: v, point: p.clone(), step: (hi - lo) / level as f64 };
                }
                insert_top(&mut top, v, p);
            }
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < level {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        let step = (hi - lo) / level as f64;
        for entry in top.iter_mut().filter(|e| !e.2) {
            entry.2 = true;
            let r = refine(&g, &entry.1, entry.0, step, refinement_rounds, lo, hi);
            if r.value > best.value {
                best = r;
            }
        }
    }
    let mut resolution: f64 = 0.0;
    for i in 0..n {
        for dir in [1.0, -1.0] {
            let mut c = best.point.clone();
            c[i] = (c[i] + dir * best.step).clamp(lo, hi);
            let d = (g.eval(&c) - best.value).abs();
            if d.is_finite() {
                resolution = resolution.max(d);
            }
        }
    }
    GridReport {
        value: best.value,
        argmax: best.point,
        resolution,
    }
}

/// See [`grid_supremum_report`].
pub fn grid_supremum(f: &Fewnomial, log_range: [f64; 2], points_per_axis: usize, refinement_rounds: usize) -> f64 {
    grid_supremum_report(f, log_range, points_per_axis, refinement_rounds).value
}

/// `log10` half-widths of the ranges used by [`widening_oracle`].
pub const WIDENING_RANGES: [f64; 4] = [6.0, 12.0, 24.0, 48.0];

#[derive(Clone, Debug, PartialEq)]
pub struct WideningReport {
    pub values: Vec<f64>,
    /// Best estimate of the supremum: the value on the widest range.
    pub value: f64,
    /// Change between the two widest ranges, or the local resolution if larger.
    pub resolution: f64,
    /// The maximum keeps growing as the range widens (saturating at `+∞`).
    pub grows: bool,
}

/// Grid suprema over `[10^{−R}, 10^R]^n` for each `R` in [`WIDENING_RANGES`].
pub fn widening_oracle(f: &Fewnomial, points_per_axis: usize, refinement_rounds: usize) -> WideningReport {
    let reports: Vec<GridReport> = WIDENING_RANGES
        .iter()
        .map(|&r| grid_supremum_report(f, [-r, r], points_per_axis, refinement_rounds))
        .collect();
    let values: Vec<f64> = reports.iter().map(|r| r.value).collect();
    let k = values.len();
    let last = values[k - 1];
    let grows = values
        .windows(2)
        .all(|w| w[1] == f64::INFINITY || w[1] > w[0] + 1e-6 * w[0].abs().max(1.0))
        && last >= 2.0 * values[0].abs().max(1.0);
    let resolution = (last - values[k - 2]).abs().max(reports[k - 1].resolution);
    WideningReport {
        value: last,
        values,
        resolution,
        grows,
    }
}

/// Sign changes of a univariate `f` over a log-uniform sweep of `[lo, hi]`.
pub fn sign_sweep_count(f: &Fewnomial, lo: f64, hi: f64, samples: usize) -> usize {
    let g = LogEvaluator::new(f);
    let (a, b) = (lo.log10(), hi.log10());
    let mut prev = 0.0f64;
    let mut changes = 0;
    for k in 0..samples {
        let u = a + (b - a) * k as f64 / (samples - 1) as f64;
        let v = g.eval(&[u]);
        if v != 0.0 {
            if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                changes += 1;
            }
            prev = v;
        }
    }
    changes
}
