//! Solvers for the three variational problems derived from a scheme, plus
//! the cross-relation checks between their minimizers.
//!
//! One-dimensional problems go through an exhaustive grid scan with
//! golden-section refinement per basin. Multi-dimensional problems are
//! supported for the smooth quadratic misfit `||Ax - y||^2` with proximal or
//! projected gradient iterations. The Morozov problem is reduced to a
//! bisection over Tikhonov subproblems in the regularization weight, which
//! presumes a monotone weight-to-misfit path; the nonconvex one-dimensional
//! case falls back to a direct scan of the feasible set, reported in the
//! method field.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::discrepancy::DiscrepancyError;
use crate::ext::ExtReal;
use crate::linalg::{Matrix, MatrixError};
use crate::point::Point;
use crate::scheme::{ForwardOp, Scheme, SchemeError};
use crate::solve1d::{
    minimize_scalar, minimize_scalar_constrained, Scan1dError, ScanOutcome, ScanParams,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Coordinate tolerance of one-dimensional refinement and of the
    /// step-based stop of the gradient iterations.
    pub xtol: f64,
    /// Objective-decrease stop of the gradient iterations.
    pub ftol: f64,
    pub grid_points: usize,
    /// Search bracket for one-dimensional problems.
    pub bracket: (f64, f64),
    pub max_iter: usize,
    /// Cap on reported minimizers (plateaus can hold many grid points).
    pub max_minimizers: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            xtol: 1e-9,
            ftol: 1e-12,
            grid_points: 4001,
            bracket: (-10.0, 10.0),
            max_iter: 200_000,
            max_minimizers: 64,
        }
    }
}

impl SolverConfig {
    fn scan_params(&self) -> ScanParams {
        ScanParams {
            grid_points: self.grid_points,
            bracket: self.bracket,
            xtol: self.xtol,
            objective_gap: 1e-8,
            max_candidates: self.max_minimizers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    GoldenSection,
    ProjectedGradient,
    GridRefine,
    AlphaBisection,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveMethod::ClosedForm => "closed_form",
            SolveMethod::GoldenSection => "golden_section",
            SolveMethod::ProjectedGradient => "projected_gradient",
            SolveMethod::GridRefine => "grid_refine",
            SolveMethod::AlphaBisection => "alpha_bisection",
        };
        write!(f, "{s}")
    }
}

/// Result of one variational solve. `minimizers` holds the best point first
/// and then every other located point whose objective lies within `1e-8` of
/// it; the scalar fields refer to the best point.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub minimizers: Vec<Point>,
    pub objective: ExtReal,
    pub discrepancy_at_min: ExtReal,
    pub regularizer_at_min: ExtReal,
    pub method: SolveMethod,
    pub iterations: usize,
    pub tolerance_achieved: f64,
    /// True when the minimizer list was capped at `max_minimizers`.
    pub truncated: bool,
}

impl SolveReport {
    pub fn minimizer(&self) -> &Point {
        &self.minimizers[0]
    }

    pub fn is_unique(&self) -> bool {
        self.minimizers.len() == 1 && !self.truncated
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    Scheme(SchemeError),
    Scan(Scan1dError),
    Matrix(MatrixError),
    InvalidParameter(&'static str),
    /// Multi-dimensional solves need the quadratic misfit and a regularizer
    /// with a proximal map or sublevel projection.
    Unsupported(&'static str),
    /// No point satisfies the Morozov constraint.
    InfeasibleDelta { best_misfit: f64 },
    /// The weight-to-misfit path jumped over the target level and no
    /// fallback applies.
    NonMonotoneMisfitPath,
    NoConvergence,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Scheme(e) => write!(f, "{e}"),
            SolverError::Scan(e) => write!(f, "{e}"),
            SolverError::Matrix(e) => write!(f, "{e}"),
            SolverError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            SolverError::Unsupported(what) => write!(f, "unsupported problem structure: {what}"),
            SolverError::InfeasibleDelta { best_misfit } => {
                write!(f, "no feasible point: best attainable misfit {best_misfit}")
            }
            SolverError::NonMonotoneMisfitPath => {
                write!(f, "weight-to-misfit path is not monotone; no fallback applies")
            }
            SolverError::NoConvergence => write!(f, "iteration limit reached"),
        }
    }
}

impl core::error::Error for SolverError {}

impl From<SchemeError> for SolverError {
    fn from(e: SchemeError) -> Self {
        SolverError::Scheme(e)
    }
}

impl From<Scan1dError> for SolverError {
    fn from(e: Scan1dError) -> Self {
        SolverError::Scan(e)
    }
}

impl From<MatrixError> for SolverError {
    fn from(e: MatrixError) -> Self {
        SolverError::Matrix(e)
    }
}

impl From<DiscrepancyError> for SolverError {
    fn from(e: DiscrepancyError) -> Self {
        SolverError::Scheme(SchemeError::Discrepancy(e))
    }
}

/// Ridge solution `(A^T A + alpha I)^{-1} A^T y` of the quadratic problem
/// `min ||Ax - y||^2 + alpha ||x||^2` by Cholesky factorization of the
/// shifted normal equations.
pub fn tikhonov_closed_form(a: &Matrix, y: &Point, alpha: f64) -> Result<Point, SolverError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(SolverError::InvalidParameter("alpha must be positive"));
    }
    if y.dim() != a.rows() {
        return Err(SolverError::Scheme(SchemeError::DimensionMismatch));
    }
    let aty = a.transpose_apply(y);
    let system = a.gram().shift_diag(alpha);
    Ok(system.solve_spd(&aty)?)
}

/// Objective evaluation for scan closures: points where the forward map is
/// undefined are treated as infinite (they cannot be minimizers).
fn misfit_ext(s: &Scheme, x: &Point, y: &Point) -> ExtReal {
    match s.misfit(x, y) {
        Ok(v) => v,
        Err(_) => ExtReal::Infinity,
    }
}

fn scalar_misfit<'a>(s: &'a Scheme, y: &'a Point) -> impl Fn(f64) -> ExtReal + 'a {
    move |x| misfit_ext(s, &Point::scalar(x), y)
}

fn report_from_scan(
    s: &Scheme,
    y: &Point,
    scan: ScanOutcome,
    method: SolveMethod,
) -> Result<SolveReport, SolverError> {
    let best = scan.best();
    let mut minimizers: Vec<Point> = scan.minima.iter().map(|m| Point::scalar(m.x)).collect();
    let best_pos = scan.minima.iter().position(|m| m.x == best.x).unwrap_or(0);
    minimizers.swap(0, best_pos);
    let xb = minimizers[0].clone();
    Ok(SolveReport {
        discrepancy_at_min: s.misfit(&xb, y)?,
        regularizer_at_min: s.regularizer().eval(&xb),
        objective: ExtReal::finite(best.value)
            .map_err(|_| SolverError::InvalidParameter("objective must be finite"))?,
        minimizers,
        method,
        iterations: scan.evaluations,
        tolerance_achieved: scan.bracket_width_achieved,
        truncated: scan.truncated,
    })
}

/// Minimize the Tikhonov objective `rho(F(x), y) + alpha R(x)`.
pub fn tikhonov_solve(
    s: &Scheme,
    y: &Point,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(SolverError::InvalidParameter("alpha must be positive"));
    }
    if y.dim() != s.data_dim() {
        return Err(SolverError::Scheme(SchemeError::DimensionMismatch));
    }
    if s.solution_dim() == 1 {
        let obj = |x: f64| {
            let p = Point::scalar(x);
            misfit_ext(s, &p, y) + s.regularizer().eval(&p).scale(alpha)
        };
        let scan = minimize_scalar(obj, &cfg.scan_params())?;
        return report_from_scan(s, y, scan, SolveMethod::GoldenSection);
    }

    let quad = QuadraticMisfit::extract(s)?;
    let reg = s.regularizer();
    let step_map = |v: &Point, step: f64| {
        reg.prox(v, alpha * step)
            .ok_or(SolverError::Unsupported("regularizer has no proximal map"))
    };
    let objective = |x: &Point| misfit_ext(s, x, y) + reg.eval(x).scale(alpha);
    let iterate = proximal_gradient(&quad, y, step_map, objective, cfg)?;
    let objective_value = misfit_ext(s, &iterate.x, y) + reg.eval(&iterate.x).scale(alpha);
    finish_multi(s, y, iterate, objective_value)
}

/// Minimize the misfit `rho(F(x), y)` subject to `R(x) <= tau`.
pub fn ivanov_solve(
    s: &Scheme,
    y: &Point,
    tau: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(SolverError::InvalidParameter("tau must be nonnegative"));
    }
    if y.dim() != s.data_dim() {
        return Err(SolverError::Scheme(SchemeError::DimensionMismatch));
    }
    if s.solution_dim() == 1 {
        let f = scalar_misfit(s, y);
        let g = |x: f64| s.regularizer().eval(&Point::scalar(x));
        let scan = minimize_scalar_constrained(f, g, tau, true, &cfg.scan_params())?;
        return report_from_scan(s, y, scan, SolveMethod::GridRefine);
    }

    let quad = QuadraticMisfit::extract(s)?;
    let reg = s.regularizer();
    let step_map = |v: &Point, _step: f64| {
        reg.sublevel_projection(v, tau).ok_or(SolverError::Unsupported(
            "regularizer has no sublevel projection",
        ))
    };
    let objective = |x: &Point| misfit_ext(s, x, y);
    let iterate = proximal_gradient(&quad, y, step_map, objective, cfg)?;
    let objective_value = misfit_ext(s, &iterate.x, y);
    let report = finish_multi(s, y, iterate, objective_value)?;
    match report.regularizer_at_min {
        ExtReal::Finite(r) if r <= tau + 1e-10 => Ok(report),
        _ => Err(SolverError::NoConvergence),
    }
}

/// Minimize `R(x)` subject to `rho(F(x), y) <= delta`.
pub fn morozov_solve(
    s: &Scheme,
    y: &Point,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(SolverError::InvalidParameter("delta must be nonnegative"));
    }
    if y.dim() != s.data_dim() {
        return Err(SolverError::Scheme(SchemeError::DimensionMismatch));
    }

    // the unconstrained misfit minimum decides feasibility
    let best_misfit = unconstrained_misfit_min(s, y, cfg)?;
    if best_misfit > delta + 1e-8 {
        return Err(SolverError::InfeasibleDelta { best_misfit });
    }

    // inactive constraint: the global minimizer of R may already be feasible
    if let Some(gm) = s.regularizer().global_minimizer(s.solution_dim()) {
        if let ExtReal::Finite(rho) = misfit_ext(s, &gm, y) {
            if rho <= delta {
                let reg = s.regularizer().eval(&gm);
                return Ok(SolveReport {
                    objective: reg,
                    discrepancy_at_min: ExtReal::Finite(rho),
                    regularizer_at_min: reg,
                    minimizers: alloc::vec![gm],
                    method: SolveMethod::ClosedForm,
                    iterations: 0,
                    tolerance_achieved: 0.0,
                    truncated: false,
                });
            }
        }
    }

    match alpha_bisection(s, y, delta, cfg) {
        Ok(report) => Ok(report),
        Err(SolverError::NonMonotoneMisfitPath) if s.solution_dim() == 1 => {
            morozov_grid_fallback(s, y, delta, cfg)
        }
        Err(e) => Err(e),
    }
}

fn unconstrained_misfit_min(s: &Scheme, y: &Point, cfg: &SolverConfig) -> Result<f64, SolverError> {
    if s.solution_dim() == 1 {
        let scan = minimize_scalar(scalar_misfit(s, y), &cfg.scan_params())?;
        return Ok(scan.best().value);
    }
    let quad = QuadraticMisfit::extract(s)?;
    // least squares via mildly shifted normal equations; the shift perturbs
    // the attainable misfit negligibly and tolerates rank deficiency
    let x = tikhonov_closed_form(&quad.a, y, 1e-12)?;
    match misfit_ext(s, &x, y) {
        ExtReal::Finite(v) => Ok(v),
        ExtReal::Infinity => Err(SolverError::NoConvergence),
    }
}

fn alpha_bisection(
    s: &Scheme,
    y: &Point,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    let misfit_at = |alpha: f64| -> Result<(f64, SolveReport), SolverError> {
        let rep = tikhonov_solve(s, y, alpha, cfg)?;
        let rho = rep
            .discrepancy_at_min
            .value()
            .ok_or(SolverError::NoConvergence)?;
        Ok((rho, rep))
    };

    let active_tol = 1e-9 * (1.0 + delta);
    let mut lo = 1e-10;
    let (rho_lo, rep_lo) = misfit_at(lo)?;
    if rho_lo > delta + 1e-8 {
        return Err(SolverError::NonMonotoneMisfitPath);
    }
    if (rho_lo - delta).abs() <= active_tol {
        return Ok(morozov_report(rep_lo, 1));
    }
    let mut best_feasible = (rho_lo, rep_lo);
    let mut solves = 1usize;

    let mut hi = 1.0;
    loop {
        let (rho_hi, rep_hi) = misfit_at(hi)?;
        solves += 1;
        if (rho_hi - delta).abs() <= active_tol {
            return Ok(morozov_report(rep_hi, solves));
        }
        if rho_hi > delta {
            break;
        }
        best_feasible = (rho_hi, rep_hi);
        lo = hi;
        hi *= 4.0;
        if hi > 1e12 {
            // misfit never reaches delta; return the most regularized
            // feasible solve
            return Ok(morozov_report(best_feasible.1, solves));
        }
    }

    for _ in 0..200 {
        let mid = libm::sqrt(lo * hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted in floating point
        }
        let (rho_mid, rep_mid) = misfit_at(mid)?;
        solves += 1;
        if (rho_mid - delta).abs() <= active_tol {
            return Ok(morozov_report(rep_mid, solves));
        }
        if rho_mid < delta {
            best_feasible = (rho_mid, rep_mid);
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // the bracket collapsed without hitting the target: the path jumped
    let (rho, rep) = best_feasible;
    if (rho - delta).abs() <= 1e-6 * (1.0 + delta) {
        return Ok(morozov_report(rep, solves));
    }
    Err(SolverError::NonMonotoneMisfitPath)
}

fn morozov_report(inner: SolveReport, solves: usize) -> SolveReport {
    SolveReport {
        objective: inner.regularizer_at_min,
        method: SolveMethod::AlphaBisection,
        iterations: solves,
        ..inner
    }
}

fn morozov_grid_fallback(
    s: &Scheme,
    y: &Point,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    let f = |x: f64| s.regularizer().eval(&Point::scalar(x));
    let g = scalar_misfit(s, y);
    // direct grid over the feasible set: the misfit can be so flat at the
    // boundary that its f64 level set is wider than any bisection can resolve
    let scan = minimize_scalar_constrained(f, g, delta, false, &cfg.scan_params())?;
    let mut report = report_from_scan(s, y, scan, SolveMethod::GridRefine)?;
    report.objective = report.regularizer_at_min;
    match report.discrepancy_at_min {
        ExtReal::Finite(r) if r <= delta + 1e-8 => Ok(report),
        _ => Err(SolverError::NoConvergence),
    }
}

/// Quadratic misfit structure `||Ax - y||^2` required by the
/// multi-dimensional pipeline.
struct QuadraticMisfit {
    a: Matrix,
}

struct Iterate {
    x: Point,
    iterations: usize,
    step_norm: f64,
}

impl QuadraticMisfit {
    fn extract(s: &Scheme) -> Result<Self, SolverError> {
        if s.discrepancy().as_power_norm() != Some(2.0) {
            return Err(SolverError::Unsupported(
                "multi-dimensional solves need the squared-norm discrepancy",
            ));
        }
        let a = match s.forward() {
            ForwardOp::Identity { dim } => Matrix::identity(*dim),
            ForwardOp::Linear { matrix } => matrix.clone(),
            ForwardOp::ScalarMap { .. } => {
                return Err(SolverError::Unsupported("scalar map is one-dimensional"))
            }
        };
        Ok(QuadraticMisfit { a })
    }

    fn gradient(&self, x: &Point, y: &Point) -> Point {
        let residual = self.a.apply(x).sub(y);
        self.a.transpose_apply(&residual).scale(2.0)
    }

    fn step_size(&self) -> f64 {
        1.0 / (2.0 * self.a.gram().spectral_radius_est().max(1e-12) * 1.05)
    }
}

/// Proximal (or projected) gradient iteration on the quadratic misfit.
/// `step_map` applies the proximal/projection step to the gradient step.
fn proximal_gradient<P, O>(
    quad: &QuadraticMisfit,
    y: &Point,
    step_map: P,
    objective: O,
    cfg: &SolverConfig,
) -> Result<Iterate, SolverError>
where
    P: Fn(&Point, f64) -> Result<Point, SolverError>,
    O: Fn(&Point) -> ExtReal,
{
    let step = quad.step_size();
    let mut x = step_map(&Point::zeros(quad.a.cols()), step)?;
    let mut obj_prev = match objective(&x) {
        ExtReal::Finite(v) => v,
        ExtReal::Infinity => return Err(SolverError::NoConvergence),
    };
    for k in 0..cfg.max_iter {
        let v = x.axpy(-step, &quad.gradient(&x, y));
        let x_next = step_map(&v, step)?;
        let step_norm = x_next.dist(&x);
        let obj = match objective(&x_next) {
            ExtReal::Finite(v) => v,
            ExtReal::Infinity => return Err(SolverError::NoConvergence),
        };
        let decrease = obj_prev - obj;
        x = x_next;
        obj_prev = obj;
        if step_norm <= cfg.xtol * (1.0 + x.norm()) && decrease.abs() <= cfg.ftol {
            return Ok(Iterate {
                x,
                iterations: k + 1,
                step_norm,
            });
        }
    }
    Err(SolverError::NoConvergence)
}

fn finish_multi(
    s: &Scheme,
    y: &Point,
    iterate: Iterate,
    objective: ExtReal,
) -> Result<SolveReport, SolverError> {
    let rho = s.misfit(&iterate.x, y)?;
    let reg = s.regularizer().eval(&iterate.x);
    Ok(SolveReport {
        objective,
        discrepancy_at_min: rho,
        regularizer_at_min: reg,
        minimizers: alloc::vec![iterate.x],
        method: SolveMethod::ProjectedGradient,
        iterations: iterate.iterations,
        tolerance_achieved: iterate.step_norm,
        truncated: false,
    })
}

/// One leg of the minimizer cross-relation battery.
#[derive(Debug, Clone)]
pub struct CrossCheckItem {
    pub name: &'static str,
    pub outcome: CheckOutcome,
}

#[derive(Debug, Clone)]
pub enum CheckOutcome {
    Pass { agreement: f64 },
    Skip { reason: String },
    Fail { detail: String },
}

impl CheckOutcome {
    pub fn passed_or_skipped(&self) -> bool {
        !matches!(self, CheckOutcome::Fail { .. })
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckOutcome::Pass { agreement } => write!(f, "PASS (agreement {agreement:.3e})"),
            CheckOutcome::Skip { reason } => write!(f, "SKIP ({reason})"),
            CheckOutcome::Fail { detail } => write!(f, "FAIL ({detail})"),
        }
    }
}

/// Levels at which the cross-relations are exercised; legs whose level is
/// absent are not run.
#[derive(Debug, Clone, Copy, Default)]
pub struct CrossCheckLevels {
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub delta: Option<f64>,
}

const CROSS_AGREEMENT_TOL: f64 = 1e-6;

/// Verify the cross-relations between the three problems:
/// a unique Ivanov minimizer solves Morozov at the induced misfit level, a
/// unique Morozov minimizer solves Ivanov at the induced regularizer level,
/// and a unique Tikhonov minimizer solves both constrained problems at its
/// induced levels. Non-unique minimizers make the statement inapplicable and
/// produce a skip, never a failure.
pub fn cross_check_thm23(
    s: &Scheme,
    y: &Point,
    levels: CrossCheckLevels,
    cfg: &SolverConfig,
) -> Vec<CrossCheckItem> {
    let mut items = Vec::new();

    if let Some(tau) = levels.tau {
        items.push(CrossCheckItem {
            name: "ivanov->morozov",
            outcome: leg_ivanov_to_morozov(s, y, tau, cfg),
        });
    }
    if let Some(delta) = levels.delta {
        items.push(CrossCheckItem {
            name: "morozov->ivanov",
            outcome: leg_morozov_to_ivanov(s, y, delta, cfg),
        });
    }
    if let Some(alpha) = levels.alpha {
        let (iv, mo) = leg_tikhonov_both(s, y, alpha, cfg);
        items.push(CrossCheckItem {
            name: "tikhonov->ivanov",
            outcome: iv,
        });
        items.push(CrossCheckItem {
            name: "tikhonov->morozov",
            outcome: mo,
        });
    }
    items
}

fn leg_ivanov_to_morozov(s: &Scheme, y: &Point, tau: f64, cfg: &SolverConfig) -> CheckOutcome {
    let first = match ivanov_solve(s, y, tau, cfg) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::Fail { detail: alloc::format!("ivanov: {e}") },
    };
    if !first.is_unique() {
        return CheckOutcome::Skip {
            reason: alloc::format!(
                "ivanov minimizer not unique ({} candidates); the relation requires uniqueness",
                first.minimizers.len()
            ),
        };
    }
    let Some(delta) = first.discrepancy_at_min.value() else {
        return CheckOutcome::Fail { detail: String::from("infinite misfit at minimizer") };
    };
    match morozov_solve(s, y, delta, cfg) {
        Ok(second) => agreement_outcome(first.minimizer(), &second),
        Err(e) => CheckOutcome::Fail { detail: alloc::format!("morozov: {e}") },
    }
}

fn leg_morozov_to_ivanov(s: &Scheme, y: &Point, delta: f64, cfg: &SolverConfig) -> CheckOutcome {
    let first = match morozov_solve(s, y, delta, cfg) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::Fail { detail: alloc::format!("morozov: {e}") },
    };
    if !first.is_unique() {
        return CheckOutcome::Skip {
            reason: alloc::format!(
                "morozov minimizer not unique ({} candidates); the relation requires uniqueness",
                first.minimizers.len()
            ),
        };
    }
    let Some(tau) = first.regularizer_at_min.value() else {
        return CheckOutcome::Fail { detail: String::from("infinite regularizer at minimizer") };
    };
    match ivanov_solve(s, y, tau, cfg) {
        Ok(second) => agreement_outcome(first.minimizer(), &second),
        Err(e) => CheckOutcome::Fail { detail: alloc::format!("ivanov: {e}") },
    }
}

fn leg_tikhonov_both(
    s: &Scheme,
    y: &Point,
    alpha: f64,
    cfg: &SolverConfig,
) -> (CheckOutcome, CheckOutcome) {
    let first = match tikhonov_solve(s, y, alpha, cfg) {
        Ok(r) => r,
        Err(e) => {
            let f = CheckOutcome::Fail { detail: alloc::format!("tikhonov: {e}") };
            return (f.clone(), f);
        }
    };
    if !first.is_unique() {
        let skip = CheckOutcome::Skip {
            reason: alloc::format!(
                "tikhonov minimizer not unique ({} candidates); the relation requires uniqueness",
                first.minimizers.len()
            ),
        };
        return (skip.clone(), skip);
    }
    let x_alpha = first.minimizer();
    let iv = match first.regularizer_at_min.value() {
        Some(tau) => match ivanov_solve(s, y, tau, cfg) {
            Ok(second) => agreement_outcome(x_alpha, &second),
            Err(e) => CheckOutcome::Fail { detail: alloc::format!("ivanov: {e}") },
        },
        None => CheckOutcome::Fail { detail: String::from("infinite regularizer at minimizer") },
    };
    let mo = match first.discrepancy_at_min.value() {
        Some(delta) => match morozov_solve(s, y, delta, cfg) {
            Ok(second) => agreement_outcome(x_alpha, &second),
            Err(e) => CheckOutcome::Fail { detail: alloc::format!("morozov: {e}") },
        },
        None => CheckOutcome::Fail { detail: String::from("infinite misfit at minimizer") },
    };
    (iv, mo)
}

/// Distance from the first solve's minimizer to the nearest minimizer of the
/// second solve.
fn agreement_outcome(x_first: &Point, second: &SolveReport) -> CheckOutcome {
    let agreement = second
        .minimizers
        .iter()
        .map(|m| m.dist(x_first))
        .fold(f64::INFINITY, f64::min);
    if agreement <= CROSS_AGREEMENT_TOL {
        CheckOutcome::Pass { agreement }
    } else {
        CheckOutcome::Fail {
            detail: alloc::format!("minimizers disagree by {agreement:.3e}"),
        }
    }
}

/// One direction of the first-order necessary condition at a Tikhonov
/// minimizer: `-alpha R'(x*; v) <= f'(x*; v)` with `f = rho(F(.), y)`.
#[derive(Debug, Clone)]
pub struct DirectionalCheck {
    pub direction: Point,
    /// `-alpha R'(x*; v)`, from the closed-form directional derivative.
    pub lhs: f64,
    /// `f'(x*; v)`, from a one-sided difference quotient (step `1e-6`).
    pub rhs: f64,
    pub holds: bool,
}

const PROP_TOL: f64 = 1e-4;
const FD_STEP: f64 = 1e-6;

/// Check the necessary condition at a candidate minimizer along the given
/// directions. A violated direction certifies that the candidate is not a
/// local Tikhonov minimizer for this weight.
pub fn prop25_check(
    s: &Scheme,
    y: &Point,
    alpha: f64,
    x_star: &Point,
    directions: &[Point],
) -> Result<Vec<DirectionalCheck>, SolverError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(SolverError::InvalidParameter("alpha must be positive"));
    }
    let f_at = |x: &Point| -> Result<f64, SolverError> {
        match s.misfit(x, y)? {
            ExtReal::Finite(v) => Ok(v),
            ExtReal::Infinity => Err(SolverError::InvalidParameter(
                "misfit infinite near the candidate minimizer",
            )),
        }
    };
    let f0 = f_at(x_star)?;
    let mut checks = Vec::with_capacity(directions.len());
    for v in directions {
        let r_prime = s
            .regularizer()
            .directional_derivative(x_star, v)
            .ok_or(SolverError::InvalidParameter(
                "regularizer directional derivative undefined",
            ))?;
        let f_step = f_at(&x_star.axpy(FD_STEP, v))?;
        let f_prime = (f_step - f0) / FD_STEP;
        let lhs = -alpha * r_prime;
        checks.push(DirectionalCheck {
            direction: v.clone(),
            lhs,
            rhs: f_prime,
            holds: lhs <= f_prime + PROP_TOL,
        });
    }
    Ok(checks)
}

/// One row of a regularization-path trace.
#[derive(Debug, Clone)]
pub struct ParetoRow {
    pub alpha: f64,
    pub outcome: Result<ParetoPoint, SolverError>,
}

#[derive(Debug, Clone)]
pub struct ParetoPoint {
    pub rho: f64,
    pub reg: f64,
    pub x: Point,
}

/// Tikhonov path over a weight grid: per weight the minimizer's
/// (misfit, regularizer) pair, ready for frontier plotting. Solver errors
/// flag the row instead of aborting the trace.
pub fn pareto_trace(s: &Scheme, y: &Point, alphas: &[f64], cfg: &SolverConfig) -> Vec<ParetoRow> {
    alphas
        .iter()
        .map(|&alpha| {
            let outcome = tikhonov_solve(s, y, alpha, cfg).and_then(|rep| {
                let rho = rep
                    .discrepancy_at_min
                    .value()
                    .ok_or(SolverError::NoConvergence)?;
                let reg = rep
                    .regularizer_at_min
                    .value()
                    .ok_or(SolverError::NoConvergence)?;
                Ok(ParetoPoint {
                    rho,
                    reg,
                    x: rep.minimizer().clone(),
                })
            });
            ParetoRow { alpha, outcome }
        })
        .collect()
}
