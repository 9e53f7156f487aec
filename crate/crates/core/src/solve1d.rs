//! One-dimensional global minimization: coarse grid scan to locate every
//! basin, golden-section refinement per basin, and a constrained variant
//! that restricts the search to sublevel sets of a second function.
//!
//! The scan reports *all* grid-distinct minimizers whose objective lies
//! within a small gap of the best one, so callers can detect non-unique
//! minimizers instead of silently picking one. Ties are broken toward the
//! smaller coordinate. Objectives may take the value infinity (indicator
//! terms); infinite points can never be minimizers.

use alloc::vec::Vec;
use core::fmt;

use crate::ext::ExtReal;

/// 2 - golden ratio; interior probe offset of the golden-section search
const INV_GOLD: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy)]
pub struct ScanParams {
    pub grid_points: usize,
    pub bracket: (f64, f64),
    pub xtol: f64,
    /// Minimizers within this objective gap of the best are all reported.
    pub objective_gap: f64,
    pub max_candidates: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            grid_points: 4001,
            bracket: (-10.0, 10.0),
            xtol: 1e-9,
            objective_gap: 1e-8,
            max_candidates: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scan1dError {
    /// Objective infinite on the whole grid.
    AllInfinite,
    /// The grid optimum sits on the bracket boundary, so the minimum cannot
    /// be certified inside the bracket (possibly unbounded below).
    MinimumAtBracketBoundary,
    /// No point of the grid satisfies the constraint.
    EmptyFeasibleSet,
    BadBracket,
}

impl fmt::Display for Scan1dError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scan1dError::AllInfinite => write!(f, "objective is infinite on the whole bracket"),
            Scan1dError::MinimumAtBracketBoundary => {
                write!(f, "minimum at bracket boundary; enlarge the bracket")
            }
            Scan1dError::EmptyFeasibleSet => write!(f, "constraint set is empty on the bracket"),
            Scan1dError::BadBracket => write!(f, "bracket must satisfy lo < hi"),
        }
    }
}

impl core::error::Error for Scan1dError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMinimum {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// All near-optimal minimizers, sorted by coordinate.
    pub minima: Vec<ScalarMinimum>,
    pub evaluations: usize,
    pub bracket_width_achieved: f64,
    pub truncated: bool,
}

impl ScanOutcome {
    /// The minimizer with the smallest objective; ties go to the smaller
    /// coordinate (the list is coordinate-sorted and `<` keeps the first).
    pub fn best(&self) -> ScalarMinimum {
        let mut best = self.minima[0];
        for m in &self.minima[1..] {
            if m.value < best.value {
                best = *m;
            }
        }
        best
    }

    pub fn is_unique(&self) -> bool {
        self.minima.len() == 1 && !self.truncated
    }
}

/// Global scan of `f` over the bracket.
pub fn minimize_scalar<F>(f: F, params: &ScanParams) -> Result<ScanOutcome, Scan1dError>
where
    F: Fn(f64) -> ExtReal,
{
    let (lo, hi) = params.bracket;
    if lo.partial_cmp(&hi) != Some(core::cmp::Ordering::Less) {
        return Err(Scan1dError::BadBracket);
    }
    let n = params.grid_points.max(3);
    let mut evals = 0usize;
    let xs: Vec<f64> = grid(lo, hi, n);
    let vs: Vec<ExtReal> = xs
        .iter()
        .map(|&x| {
            evals += 1;
            f(x)
        })
        .collect();

    // ties broken toward the smaller coordinate: keep the first minimum
    let finite_best = vs
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.value().map(|fv| (i, fv)))
        .fold(None, |best: Option<(usize, f64)>, cand| match best {
            Some((_, bv)) if bv <= cand.1 => best,
            _ => Some(cand),
        });
    let (best_idx, _) = finite_best.ok_or(Scan1dError::AllInfinite)?;
    if best_idx == 0 || best_idx == n - 1 {
        return Err(Scan1dError::MinimumAtBracketBoundary);
    }

    let mut candidates: Vec<ScalarMinimum> = Vec::new();
    let mut width = hi - lo;
    for i in 1..n - 1 {
        if vs[i] > vs[i - 1] || vs[i] > vs[i + 1] {
            continue;
        }
        let Some(vi) = vs[i].value() else { continue };
        if vs[i] < vs[i - 1] && vs[i] < vs[i + 1] {
            // strict basin: refine
            let (x, v, w, used) = golden_refine(&f, xs[i - 1], xs[i + 1], xs[i], vi, params.xtol);
            evals += used;
            width = width.min(w);
            candidates.push(ScalarMinimum { x, value: v });
        } else {
            // plateau member; keep the grid point as a distinct minimizer
            candidates.push(ScalarMinimum { x: xs[i], value: vi });
        }
    }
    finish_scan(candidates, evals, width, params)
}

/// Minimize `f` over `{x in bracket : g(x) <= level}`.
///
/// Feasible intervals are read off the grid. With `refine_boundary` their
/// true endpoints are located by bisection on the feasibility predicate
/// (which also works for indicator-style `g` that jumps to infinity);
/// without it the outermost feasible grid points bound the search, which is
/// the right choice when `g` is so flat at the boundary that its f64 level
/// set is wider than the grid step. `f` is minimized per interval with
/// interior refinement plus endpoint comparison.
pub fn minimize_scalar_constrained<F, G>(
    f: F,
    g: G,
    level: f64,
    refine_boundary: bool,
    params: &ScanParams,
) -> Result<ScanOutcome, Scan1dError>
where
    F: Fn(f64) -> ExtReal,
    G: Fn(f64) -> ExtReal,
{
    let (lo, hi) = params.bracket;
    if lo.partial_cmp(&hi) != Some(core::cmp::Ordering::Less) {
        return Err(Scan1dError::BadBracket);
    }
    let n = params.grid_points.max(3);
    let mut evals = 0usize;
    let feasible = |x: f64| -> bool {
        match g(x) {
            ExtReal::Finite(v) => v <= level,
            ExtReal::Infinity => false,
        }
    };

    let mut xs = grid(lo, hi, n);
    let mut feas: Vec<bool> = xs
        .iter()
        .map(|&x| {
            evals += 1;
            feasible(x)
        })
        .collect();

    if !feas.iter().any(|&b| b) {
        // the feasible set may be narrower than the grid step: look for it
        // around the unconstrained minimum of g
        let g_scan = minimize_scalar(&g, params)?;
        evals += g_scan.evaluations;
        let gm = g_scan.best();
        if gm.value > level {
            return Err(Scan1dError::EmptyFeasibleSet);
        }
        let step = (hi - lo) / (n - 1) as f64;
        xs = grid(gm.x - step, gm.x + step, 257);
        feas = xs
            .iter()
            .map(|&x| {
                evals += 1;
                feasible(x)
            })
            .collect();
        if !feas.iter().any(|&b| b) {
            return Err(Scan1dError::EmptyFeasibleSet);
        }
    }

    let m = xs.len();
    let vs: Vec<ExtReal> = xs
        .iter()
        .map(|&x| {
            evals += 1;
            f(x)
        })
        .collect();

    let mut candidates: Vec<ScalarMinimum> = Vec::new();
    let mut width = hi - lo;

    let mut run_start = None;
    #[allow(clippy::needless_range_loop)]
    for i in 0..=m {
        let in_run = i < m && feas[i];
        if in_run && run_start.is_none() {
            run_start = Some(i);
        }
        if !in_run {
            let Some(start) = run_start.take() else { continue };
            let end = i - 1; // inclusive
            // endpoints of the feasible interval
            let (int_lo, used_l) = if start == 0 || !refine_boundary {
                (xs[start], 0)
            } else {
                bisect_boundary(&feasible, xs[start], xs[start - 1])
            };
            let (int_hi, used_r) = if end == m - 1 || !refine_boundary {
                (xs[end], 0)
            } else {
                bisect_boundary(&feasible, xs[end], xs[end + 1])
            };
            evals += used_l + used_r;

            // endpoint candidates
            for x in [int_lo, int_hi] {
                evals += 1;
                if let ExtReal::Finite(v) = f(x) {
                    candidates.push(ScalarMinimum { x, value: v });
                }
            }
            // interior basins among the feasible grid points
            for k in start..=end {
                let left_ok = k == start || vs[k] <= vs[k - 1];
                let right_ok = k == end || vs[k] <= vs[k + 1];
                if !(left_ok && right_ok) {
                    continue;
                }
                let Some(vk) = vs[k].value() else { continue };
                let strict = k > start && k < end && vs[k] < vs[k - 1] && vs[k] < vs[k + 1];
                if strict {
                    let a = xs[k - 1].max(int_lo);
                    let b = xs[k + 1].min(int_hi);
                    let (x, v, w, used) = golden_refine(&f, a, b, xs[k], vk, params.xtol);
                    evals += used;
                    width = width.min(w);
                    candidates.push(ScalarMinimum { x, value: v });
                } else {
                    candidates.push(ScalarMinimum { x: xs[k], value: vk });
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(Scan1dError::AllInfinite);
    }
    finish_scan(candidates, evals, width, params)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Golden-section search on `[a, b]` down to `xtol`, seeded with the best
/// known interior point. Returns the best point seen, its value, the final
/// bracket width and the number of evaluations.
fn golden_refine<F>(f: &F, a: f64, b: f64, x0: f64, v0: f64, xtol: f64) -> (f64, f64, f64, usize)
where
    F: Fn(f64) -> ExtReal,
{
    let (mut lo, mut hi) = (a, b);
    let mut best_x = x0;
    let mut best_v = v0;
    let mut evals = 0usize;

    let mut x1 = lo + INV_GOLD * (hi - lo);
    let mut x2 = hi - INV_GOLD * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evals += 2;
    while hi - lo > xtol && evals < 400 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + INV_GOLD * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - INV_GOLD * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
        for (x, v) in [(x1, f1), (x2, f2)] {
            if let ExtReal::Finite(fv) = v {
                if fv < best_v || (fv == best_v && x < best_x) {
                    best_x = x;
                    best_v = fv;
                }
            }
        }
    }
    let mid = 0.5 * (lo + hi);
    evals += 1;
    if let ExtReal::Finite(fm) = f(mid) {
        if fm < best_v {
            best_x = mid;
            best_v = fm;
        }
    }
    (best_x, best_v, hi - lo, evals)
}

/// Bisection on a feasibility predicate; `good` is feasible, `bad` is not.
/// Returns the feasible-side iterate.
fn bisect_boundary<P>(pred: &P, good: f64, bad: f64) -> (f64, usize)
where
    P: Fn(f64) -> bool,
{
    let (mut g, mut b) = (good, bad);
    let mut used = 0usize;
    for _ in 0..100 {
        let mid = 0.5 * (g + b);
        if mid == g || mid == b {
            break;
        }
        used += 1;
        if pred(mid) {
            g = mid;
        } else {
            b = mid;
        }
    }
    (g, used)
}

fn finish_scan(
    candidates: Vec<ScalarMinimum>,
    evaluations: usize,
    width: f64,
    params: &ScanParams,
) -> Result<ScanOutcome, Scan1dError> {
    if candidates.is_empty() {
        return Err(Scan1dError::AllInfinite);
    }
    let mut candidates = candidates;
    candidates.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.value.total_cmp(&b.value)));

    // merge candidates that refined into the same point
    let radius = (2.0 * params.xtol).max(1e-12);
    let mut merged: Vec<ScalarMinimum> = Vec::with_capacity(candidates.len());
    for c in candidates {
        match merged.last_mut() {
            Some(last) if (c.x - last.x).abs() <= radius => {
                if c.value < last.value {
                    *last = c;
                }
            }
            _ => merged.push(c),
        }
    }

    let best = merged.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    merged.retain(|m| m.value <= best + params.objective_gap);

    let truncated = merged.len() > params.max_candidates;
    merged.truncate(params.max_candidates);
    Ok(ScanOutcome {
        minima: merged,
        evaluations,
        bracket_width_achieved: width,
        truncated,
    })
}
