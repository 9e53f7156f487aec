//! Sequence-level convergence checks for variational schemes.
//!
//! Everything here works on finite sequence prefixes, so no limit is ever
//! certified; instead a deterministic, falsifiable criterion is applied to
//! the prefix: the terminal value must lie at or below the tolerance and a
//! dyadic subsample of the trend (after a 25% burn-in) must be nonincreasing
//! within 10% slack. Terms at or below the tolerance count as a converged
//! plateau and are exempt from the slack comparison, which keeps verdicts
//! stable once a trend bottoms out at solver precision.
//!
//! The module provides the misfit-convergence and misfit-continuity checks
//! for a discrepancy, both characterizations of initial-topology convergence
//! for Bregman discrepancies (whose equivalence rests on exact algebraic
//! identities, tested elsewhere), stored witnesses for the coordinate
//! mismatch pathology, the square-root parameter choice rule, and the
//! stability/convergence experiments for full schemes.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrepancy::{Discrepancy, DiscrepancyError};
use crate::ext::ExtReal;
use crate::functionals::{random_point, ConvexFunctional, FunctionalError};
use crate::point::{Point, PointError};
use crate::scheme::{ForwardOp, Scheme, SchemeError};
use crate::solvers::{tikhonov_solve, tikhonov_closed_form, SolverConfig, SolverError};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_ALPHA_MIN: f64 = 1e-12;

/// Verdict of the numeric "tends to zero" criterion on a finite prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceVerdict {
    pub converged: bool,
    /// Final term of the trend; infinite when that term was not finite.
    pub terminal_value: f64,
    /// Finite trend values in term order.
    pub trend: Vec<f64>,
    /// Indices of terms with infinite value; any such term fails the check.
    pub infinite_terms: Vec<usize>,
    pub criterion: String,
}

/// Apply the prefix criterion to a trend that should tend to zero.
pub fn zero_trend_verdict(values: &[ExtReal], tol: f64, what: &str) -> ConvergenceVerdict {
    let mut trend = Vec::with_capacity(values.len());
    let mut infinite_terms = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match v.value() {
            Some(f) => trend.push(f),
            None => infinite_terms.push(i),
        }
    }
    let terminal_value = match values.last() {
        Some(ExtReal::Finite(v)) => *v,
        _ => f64::INFINITY,
    };
    let criterion = alloc::format!(
        "{what}: terminal value <= {tol:.1e}, 10%-slack nonincreasing dyadic subsample \
         after 25% burn-in (values <= tol exempt)"
    );
    let converged = infinite_terms.is_empty()
        && !trend.is_empty()
        && terminal_value <= tol
        && slack_monotone(&trend, tol);
    ConvergenceVerdict {
        converged,
        terminal_value,
        trend,
        infinite_terms,
        criterion,
    }
}

fn slack_monotone(trend: &[f64], tol: f64) -> bool {
    let burn_in = trend.len() / 4;
    let mut sample: Vec<f64> = trend[burn_in..].iter().copied().step_by(2).collect();
    if let Some(&last) = trend.last() {
        if sample.last() != Some(&last) {
            sample.push(last);
        }
    }
    sample.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        b <= a * 1.1 || (a <= tol && b <= tol)
    })
}

/// Finite prefix of a data sequence together with its limit candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSequence {
    terms: Vec<Point>,
    limit: Point,
}

impl DataSequence {
    pub fn new(terms: Vec<Point>, limit: Point) -> Result<Self, LabError> {
        if terms.is_empty() {
            return Err(LabError::EmptySequence);
        }
        if terms.iter().any(|t| t.dim() != limit.dim()) {
            return Err(LabError::Scheme(SchemeError::DimensionMismatch));
        }
        Ok(DataSequence { terms, limit })
    }

    /// Build a prefix from a term rule; `make(n)` is called for n = 1..=len.
    pub fn from_fn<F: FnMut(usize) -> Point>(
        limit: Point,
        len: usize,
        mut make: F,
    ) -> Result<Self, LabError> {
        let terms = (1..=len).map(&mut make).collect();
        DataSequence::new(terms, limit)
    }

    pub fn constant(limit: Point, len: usize) -> Self {
        let terms = alloc::vec![limit.clone(); len.max(1)];
        DataSequence { terms, limit }
    }

    pub fn terms(&self) -> &[Point] {
        &self.terms
    }

    pub fn limit(&self) -> &Point {
        &self.limit
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Subsequence by strictly increasing term indices, same limit.
    pub fn subsequence(&self, indices: &[usize]) -> Result<Self, LabError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= self.len()) {
            return Err(LabError::BadSubsequence);
        }
        let terms: Vec<Point> = indices.iter().map(|&i| self.terms[i].clone()).collect();
        DataSequence::new(terms, self.limit.clone())
    }
}

/// Probe sets for the continuity checks: `z_samples` plays the role of the
/// index set of test points, `ytilde_samples` of admissible data.
#[derive(Debug, Clone)]
pub struct SampleSets {
    pub z_samples: Vec<Point>,
    pub ytilde_samples: Vec<Point>,
}

impl SampleSets {
    /// Eight seeded points per bank, drawn from `[lo, hi]^dim`.
    pub fn seeded(dim: usize, lo: f64, hi: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z_samples = (0..8).map(|_| random_point(&mut rng, dim, lo, hi)).collect();
        let ytilde_samples = (0..8).map(|_| random_point(&mut rng, dim, lo, hi)).collect();
        SampleSets {
            z_samples,
            ytilde_samples,
        }
    }

    pub fn with_extra_z(mut self, extra: &[Point]) -> Self {
        self.z_samples.extend_from_slice(extra);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LabError {
    EmptySequence,
    BadSubsequence,
    /// Gradient undefined at a sequence term or probe point.
    GradientUndefined { index: usize },
    Scheme(SchemeError),
    Discrepancy(DiscrepancyError),
    Functional(FunctionalError),
    Solver(SolverError),
    Point(PointError),
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::EmptySequence => write!(f, "sequence prefix must be nonempty"),
            LabError::BadSubsequence => write!(f, "indices must be strictly increasing and in range"),
            LabError::GradientUndefined { index } => {
                write!(f, "gradient undefined at sequence term {index}")
            }
            LabError::Scheme(e) => write!(f, "{e}"),
            LabError::Discrepancy(e) => write!(f, "{e}"),
            LabError::Functional(e) => write!(f, "{e}"),
            LabError::Solver(e) => write!(f, "{e}"),
            LabError::Point(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LabError {}

impl From<SchemeError> for LabError {
    fn from(e: SchemeError) -> Self {
        LabError::Scheme(e)
    }
}

impl From<DiscrepancyError> for LabError {
    fn from(e: DiscrepancyError) -> Self {
        LabError::Discrepancy(e)
    }
}

impl From<FunctionalError> for LabError {
    fn from(e: FunctionalError) -> Self {
        LabError::Functional(e)
    }
}

impl From<SolverError> for LabError {
    fn from(e: SolverError) -> Self {
        LabError::Solver(e)
    }
}

impl From<PointError> for LabError {
    fn from(e: PointError) -> Self {
        LabError::Point(e)
    }
}

/// Misfit convergence `rho(y, y_n) -> 0`, the defining condition of the
/// discrepancy-induced convergence notion.
pub fn check_conv(
    d: &Discrepancy,
    seq: &DataSequence,
    tol: f64,
) -> Result<ConvergenceVerdict, LabError> {
    let y = seq.limit();
    let values: Vec<ExtReal> = seq
        .terms()
        .iter()
        .map(|yn| d.eval(y, yn))
        .collect::<Result<_, _>>()?;
    Ok(zero_trend_verdict(&values, tol, "rho(y, y_n)"))
}

/// Status of a per-probe continuity check.
#[derive(Debug, Clone, PartialEq)]
pub enum ZStatus {
    Checked(ConvergenceVerdict),
    /// `rho(z, y)` is infinite, so the finiteness condition excludes `z`.
    SkippedInfiniteAtLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZVerdict {
    pub z: Point,
    pub status: ZStatus,
}

#[derive(Debug, Clone)]
pub struct ContReport {
    pub per_z: Vec<ZVerdict>,
}

impl ContReport {
    /// True when every checked probe converged (skipped probes are outside
    /// the condition's scope).
    pub fn all_pass(&self) -> bool {
        self.per_z.iter().all(|v| match &v.status {
            ZStatus::Checked(verdict) => verdict.converged,
            ZStatus::SkippedInfiniteAtLimit => true,
        })
    }

    pub fn checked_count(&self) -> usize {
        self.per_z
            .iter()
            .filter(|v| matches!(v.status, ZStatus::Checked(_)))
            .count()
    }
}

/// Misfit continuity: `rho(z, y_n) -> rho(z, y)` for every probe `z` with
/// finite `rho(z, y)`.
pub fn check_cont(
    d: &Discrepancy,
    z_samples: &[Point],
    seq: &DataSequence,
    tol: f64,
) -> Result<ContReport, LabError> {
    let y = seq.limit();
    let mut per_z = Vec::with_capacity(z_samples.len());
    for z in z_samples {
        let at_limit = d.eval(z, y)?;
        let Some(rho_zy) = at_limit.value() else {
            per_z.push(ZVerdict {
                z: z.clone(),
                status: ZStatus::SkippedInfiniteAtLimit,
            });
            continue;
        };
        let mut values = Vec::with_capacity(seq.len());
        for yn in seq.terms() {
            let v = match d.eval(z, yn)? {
                ExtReal::Finite(v) => ExtReal::Finite((v - rho_zy).max(rho_zy - v)),
                ExtReal::Infinity => ExtReal::Infinity,
            };
            values.push(v);
        }
        per_z.push(ZVerdict {
            z: z.clone(),
            status: ZStatus::Checked(zero_trend_verdict(
                &values,
                tol,
                "|rho(z, y_n) - rho(z, y)|",
            )),
        });
    }
    Ok(ContReport { per_z })
}

/// Both characterizations of initial-topology convergence for a Bregman
/// discrepancy, evaluated on the same prefix.
#[derive(Debug, Clone)]
pub struct TauinReport {
    /// Route (a): `rho_i(z, y_n) -> rho_i(z, y)` per probe.
    pub route_a: Vec<ZVerdict>,
    /// Route (b), first part: `rho_i(y, y_n) -> 0`.
    pub base: ConvergenceVerdict,
    /// Route (b), second part: vanishing pairing terms per probe.
    pub pairings: Vec<ZVerdict>,
    pub a_holds: bool,
    pub b_holds: bool,
}

impl TauinReport {
    /// The two routes are connected by an exact algebraic identity and must
    /// agree whenever every term is finite.
    pub fn agree(&self) -> bool {
        self.a_holds == self.b_holds
    }
}

/// Initial-topology convergence for `rho_1(z, y) = D_J(z, y)`:
/// route (a) is continuity of `rho_1(z, .)` at the limit for all probes,
/// route (b) is `rho_1(y, y_n) -> 0` together with
/// `<grad J(y_n) - grad J(y), y - z> -> 0`.
///
/// The limit point is always added to the probe bank; with it, the two
/// routes are equivalent on the prefix through the identity
/// `rho_1(z, y_n) - rho_1(z, y) = rho_1(y, y_n) + <grad J(y_n) - grad J(y), y - z>`.
pub fn check_tauin_rho1(
    j: &ConvexFunctional,
    z_samples: &[Point],
    seq: &DataSequence,
    tol: f64,
) -> Result<TauinReport, LabError> {
    let y = seq.limit();
    let grad_y = j
        .gradient(y)
        .ok_or(LabError::GradientUndefined { index: usize::MAX })?;
    let grads: Vec<Point> = seq
        .terms()
        .iter()
        .enumerate()
        .map(|(i, yn)| j.gradient(yn).ok_or(LabError::GradientUndefined { index: i }))
        .collect::<Result<_, _>>()?;

    let rho1 = Discrepancy::bregman_first(j.clone());
    let mut bank: Vec<Point> = Vec::with_capacity(z_samples.len() + 1);
    bank.push(y.clone());
    bank.extend_from_slice(z_samples);

    let route_a = bregman_route_a(&rho1, &bank, seq, tol)?;

    let base_values: Vec<ExtReal> = seq
        .terms()
        .iter()
        .map(|yn| rho1.eval(y, yn))
        .collect::<Result<_, _>>()?;
    let base = zero_trend_verdict(&base_values, tol, "rho_1(y, y_n)");

    let mut pairings = Vec::with_capacity(bank.len());
    for z in &bank {
        let y_minus_z = y.sub(z);
        let values: Vec<ExtReal> = grads
            .iter()
            .map(|g| {
                let p = g.sub(&grad_y).inner(&y_minus_z);
                ExtReal::Finite(p.max(-p))
            })
            .collect();
        pairings.push(ZVerdict {
            z: z.clone(),
            status: ZStatus::Checked(zero_trend_verdict(
                &values,
                tol,
                "|<grad J(y_n) - grad J(y), y - z>|",
            )),
        });
    }

    let a_holds = all_checked_pass(&route_a);
    let b_holds = base.converged && all_checked_pass(&pairings);
    Ok(TauinReport {
        route_a,
        base,
        pairings,
        a_holds,
        b_holds,
    })
}

/// Initial-topology convergence for `rho_2(z, y) = D_J(y, z)`:
/// route (a) as before, route (b) is `rho_2(y, y_n) -> 0` together with
/// `<grad J(z) - grad J(y), y - y_n> -> 0` for all probes.
pub fn check_tauin_rho2(
    j: &ConvexFunctional,
    z_samples: &[Point],
    seq: &DataSequence,
    tol: f64,
) -> Result<TauinReport, LabError> {
    let y = seq.limit();
    let grad_y = j
        .gradient(y)
        .ok_or(LabError::GradientUndefined { index: usize::MAX })?;

    let rho2 = Discrepancy::bregman_second(j.clone());
    let mut bank: Vec<Point> = Vec::with_capacity(z_samples.len() + 1);
    bank.push(y.clone());
    bank.extend_from_slice(z_samples);

    let route_a = bregman_route_a(&rho2, &bank, seq, tol)?;

    let base_values: Vec<ExtReal> = seq
        .terms()
        .iter()
        .map(|yn| rho2.eval(y, yn))
        .collect::<Result<_, _>>()?;
    let base = zero_trend_verdict(&base_values, tol, "rho_2(y, y_n)");

    let mut pairings = Vec::with_capacity(bank.len());
    for z in &bank {
        let grad_z = j
            .gradient(z)
            .ok_or(LabError::GradientUndefined { index: usize::MAX })?;
        let gz_minus_gy = grad_z.sub(&grad_y);
        let values: Vec<ExtReal> = seq
            .terms()
            .iter()
            .map(|yn| {
                let p = gz_minus_gy.inner(&y.sub(yn));
                ExtReal::Finite(p.max(-p))
            })
            .collect();
        pairings.push(ZVerdict {
            z: z.clone(),
            status: ZStatus::Checked(zero_trend_verdict(
                &values,
                tol,
                "|<grad J(z) - grad J(y), y - y_n>|",
            )),
        });
    }

    let a_holds = all_checked_pass(&route_a);
    let b_holds = base.converged && all_checked_pass(&pairings);
    Ok(TauinReport {
        route_a,
        base,
        pairings,
        a_holds,
        b_holds,
    })
}

fn bregman_route_a(
    rho: &Discrepancy,
    bank: &[Point],
    seq: &DataSequence,
    tol: f64,
) -> Result<Vec<ZVerdict>, LabError> {
    let report = check_cont(rho, bank, seq, tol)?;
    Ok(report.per_z)
}

fn all_checked_pass(verdicts: &[ZVerdict]) -> bool {
    verdicts.iter().all(|v| match &v.status {
        ZStatus::Checked(c) => c.converged,
        ZStatus::SkippedInfiniteAtLimit => true,
    })
}

/// Stored witness that the ball `B_{1/2}((0,0))` of the coordinate mismatch
/// discrepancy is not open in the induced ball topology: the constant
/// sequence `(1,1)` converges (at zero discrepancy) to the ball member
/// `(1,0)` yet never enters the ball.
#[derive(Debug, Clone)]
pub struct BallWitness {
    pub center: Point,
    pub radius: f64,
    pub interior_point: Point,
    pub sequence_point: Point,
    /// `(rho(center, interior), rho(interior, seq), rho(center, seq))`,
    /// recomputed on construction; expected `(0, 0, 1)`.
    pub evals: (f64, f64, f64),
    pub interior_in_ball: bool,
    pub sequence_in_ball: bool,
    pub sequence_converges_to_interior: bool,
}

pub fn ball_openness_witness() -> BallWitness {
    let d = Discrepancy::coordinate_mismatch();
    let center = Point::zeros(2);
    let interior = Point::from_slice(&[1.0, 0.0]).expect("finite witness");
    let seq = Point::from_slice(&[1.0, 1.0]).expect("finite witness");
    let radius = 0.5;
    let ev = |a: &Point, b: &Point| {
        d.eval(a, b)
            .expect("dimension 2")
            .value()
            .expect("mismatch discrepancy is finite")
    };
    let evals = (ev(&center, &interior), ev(&interior, &seq), ev(&center, &seq));
    BallWitness {
        interior_in_ball: evals.0 < radius,
        sequence_in_ball: evals.2 < radius,
        sequence_converges_to_interior: evals.1 == 0.0,
        center,
        radius,
        interior_point: interior,
        sequence_point: seq,
        evals,
    }
}

/// Stored sequence family on which the coordinate mismatch discrepancy
/// satisfies misfit convergence but violates misfit continuity: the
/// constant sequence `(0, 5)` converges to `(0, 0)` at zero discrepancy,
/// while the probe `z = (7, 5)` sees `rho(z, y_n) = 0` against
/// `rho(z, y) = 1`.
#[derive(Debug, Clone)]
pub struct MismatchContWitness {
    pub seq: DataSequence,
    pub z: Point,
}

pub fn mismatch_cont_witness(len: usize) -> MismatchContWitness {
    let limit = Point::zeros(2);
    let term = Point::from_slice(&[0.0, 5.0]).expect("finite witness");
    let seq = DataSequence::new(alloc::vec![term; len.max(1)], limit).expect("nonempty");
    MismatchContWitness {
        seq,
        z: Point::from_slice(&[7.0, 5.0]).expect("finite witness"),
    }
}

/// The square-root a-priori parameter choice: `alpha = sqrt(rho_level)`,
/// floored at `alpha_min` so the noise-free case stays well defined. Along
/// any sequence with `rho_n -> 0` this satisfies both decay conditions
/// `alpha_n -> 0` and `rho_n / alpha_n -> 0`.
pub fn parameter_choice_sqrt(rho_level: f64, alpha_min: f64) -> f64 {
    debug_assert!(rho_level >= 0.0 && alpha_min > 0.0);
    libm::sqrt(rho_level).max(alpha_min)
}

/// Weight rule used by the convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParameterRule {
    /// `alpha_n = sqrt(rho(y, y_n))`, floored at `alpha_min`.
    SqrtMisfit { alpha_min: f64 },
    /// Constant weight; violates the decay conditions and serves as the
    /// negative control.
    Constant { alpha: f64 },
}

impl ParameterRule {
    pub fn alpha_for(&self, rho_level: f64) -> f64 {
        match self {
            ParameterRule::SqrtMisfit { alpha_min } => {
                parameter_choice_sqrt(rho_level, *alpha_min)
            }
            ParameterRule::Constant { alpha } => *alpha,
        }
    }
}

/// Stability experiment: fixed weight, perturbed data running along the
/// sequence; minimizers must approach the minimizer set of the limit
/// problem.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// Distance of each per-term minimizer to the nearest limit minimizer.
    pub distances: Vec<f64>,
    pub verdict: ConvergenceVerdict,
    pub limit_minimizers: Vec<Point>,
    /// Solver failures by term index; any failure fails the experiment.
    pub term_errors: Vec<(usize, SolverError)>,
}

pub fn run_r2_experiment(
    s: &Scheme,
    seq: &DataSequence,
    alpha: f64,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<StabilityReport, LabError> {
    let limit_report = tikhonov_solve(s, seq.limit(), alpha, cfg)?;
    let limit_minimizers = limit_report.minimizers.clone();
    let mut distances = Vec::with_capacity(seq.len());
    let mut term_errors = Vec::new();
    let mut values = Vec::with_capacity(seq.len());
    for (i, yn) in seq.terms().iter().enumerate() {
        match tikhonov_solve(s, yn, alpha, cfg) {
            Ok(rep) => {
                let xn = rep.minimizer();
                let dist = limit_minimizers
                    .iter()
                    .map(|m| m.dist(xn))
                    .fold(f64::INFINITY, f64::min);
                distances.push(dist);
                values.push(ExtReal::Finite(dist));
            }
            Err(e) => {
                term_errors.push((i, e));
                values.push(ExtReal::Infinity);
            }
        }
    }
    let mut verdict = zero_trend_verdict(&values, tol, "dist(x_n, argmin T_{alpha,y})");
    verdict.converged = verdict.converged && term_errors.is_empty();
    Ok(StabilityReport {
        distances,
        verdict,
        limit_minimizers,
        term_errors,
    })
}

/// Configuration of the convergence experiment.
#[derive(Debug, Clone)]
pub struct R3Config {
    /// Noise amplitudes per term, e.g. `2^-n`.
    pub noise_levels: Vec<f64>,
    pub rule: ParameterRule,
    /// Seed of the sign pattern on the cycling unit noise directions.
    pub seed: u64,
    /// Tolerance of the misfit-to-zero verdict.
    pub tol: f64,
    /// Allowed excess of the limiting regularizer value over `R(x*)`.
    pub reg_tol: f64,
}

impl Default for R3Config {
    fn default() -> Self {
        R3Config {
            noise_levels: (1..=20).map(|n| libm::pow(2.0, -(n as f64))).collect(),
            rule: ParameterRule::SqrtMisfit {
                alpha_min: DEFAULT_ALPHA_MIN,
            },
            seed: 17,
            tol: DEFAULT_TOL,
            reg_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct R3Row {
    pub n: usize,
    pub delta: f64,
    pub alpha: f64,
    /// Misfit `rho(F(x_n), y_n)` at the reconstruction.
    pub rho: f64,
    /// Regularizer value `R(x_n)`.
    pub reg: f64,
    /// Distance to the R-minimal solution.
    pub err: f64,
}

#[derive(Debug, Clone)]
pub struct R3Report {
    pub rows: Vec<R3Row>,
    pub r_minimal: Point,
    pub reg_at_minimal: f64,
    pub misfit_verdict: ConvergenceVerdict,
    /// `|R(x_N) - R(x*)|` at the finest noise level.
    pub reg_gap: f64,
    pub passed: bool,
}

/// Convergence experiment: exact data from `x_exact`, shrinking noise along
/// seeded sign-flipped coordinate directions, weight from the rule. Passes
/// when the misfit column tends to zero and the regularizer values approach
/// `R(x*)` from the finest quarter of the levels.
///
/// `r_minimal` is the R-minimal solution to compare against; when absent it
/// is computed as the minimum-norm least-squares solution (valid for the
/// squared-norm regularizer) and falls back to `x_exact`.
pub fn run_r3_experiment(
    s: &Scheme,
    x_exact: &Point,
    r_minimal: Option<Point>,
    cfg: &SolverConfig,
    r3: &R3Config,
) -> Result<R3Report, LabError> {
    let y = s.forward().apply(x_exact)?;
    let dim = y.dim();
    let r_minimal = match r_minimal {
        Some(p) => p,
        None => match s.forward() {
            ForwardOp::Linear { matrix } if s.regularizer().id() == "sqnorm" => {
                tikhonov_closed_form(matrix, &y, 1e-12)?
            }
            _ => x_exact.clone(),
        },
    };
    let reg_at_minimal = s
        .regularizer()
        .eval(&r_minimal)
        .value()
        .ok_or(SolverError::InvalidParameter("R infinite at the R-minimal solution"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(r3.seed);
    let mut rows = Vec::with_capacity(r3.noise_levels.len());
    let mut misfit_col = Vec::with_capacity(r3.noise_levels.len());
    for (i, &delta) in r3.noise_levels.iter().enumerate() {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let mut coords = alloc::vec![0.0; dim];
        coords[i % dim] = sign;
        let direction = Point::new(coords)?;
        let yn = y.axpy(delta, &direction);
        let rho_level = s
            .discrepancy()
            .eval(&y, &yn)?
            .value()
            .ok_or(SolverError::InvalidParameter("infinite noise-level misfit"))?;
        let alpha = r3.rule.alpha_for(rho_level);
        let rep = tikhonov_solve(s, &yn, alpha, cfg).map_err(LabError::Solver)?;
        let xn = rep.minimizer();
        let rho = s
            .misfit(xn, &yn)?
            .value()
            .ok_or(SolverError::NoConvergence)?;
        let reg = s
            .regularizer()
            .eval(xn)
            .value()
            .ok_or(SolverError::NoConvergence)?;
        rows.push(R3Row {
            n: i + 1,
            delta,
            alpha,
            rho,
            reg,
            err: xn.dist(&r_minimal),
        });
        misfit_col.push(ExtReal::Finite(rho));
    }

    let misfit_verdict = zero_trend_verdict(&misfit_col, r3.tol, "rho(F(x_n), y_n)");
    let tail_start = rows.len() - (rows.len() / 4).max(1);
    let reg_limsup = rows[tail_start..]
        .iter()
        .map(|r| r.reg)
        .fold(f64::NEG_INFINITY, f64::max);
    let reg_gap = (rows.last().map(|r| r.reg).unwrap_or(f64::NAN) - reg_at_minimal).abs();
    let passed = misfit_verdict.converged && reg_limsup <= reg_at_minimal + r3.reg_tol;
    Ok(R3Report {
        rows,
        r_minimal,
        reg_at_minimal,
        misfit_verdict,
        reg_gap,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::regularizers::Regularizer;
    use crate::scheme::{example24_scheme, hilbert_scheme, Scheme};

    fn geometric_scalar_seq(limit: f64, len: usize) -> DataSequence {
        DataSequence::from_fn(Point::scalar(limit), len, |n| {
            Point::scalar(limit + libm::pow(2.0, -(n as f64)))
        })
        .unwrap()
    }

    #[test]
    fn conv_geometric_decay() {
        let d = Discrepancy::power_norm(2.0);
        let seq = DataSequence::from_fn(Point::scalar(0.0), 40, |n| {
            Point::scalar(libm::pow(2.0, -(n as f64)))
        })
        .unwrap();
        let v = check_conv(&d, &seq, DEFAULT_TOL).unwrap();
        assert!(v.converged, "{v:?}");
    }

    #[test]
    fn conv_mismatch_two_coordinate_failure() {
        let d = Discrepancy::coordinate_mismatch();
        // y_n = (1/n, 5) differs from (0,0) in both coordinates for every n
        let bad = DataSequence::from_fn(Point::zeros(2), 30, |n| {
            Point::from_slice(&[1.0 / n as f64, 5.0]).unwrap()
        })
        .unwrap();
        let v = check_conv(&d, &bad, DEFAULT_TOL).unwrap();
        assert!(!v.converged);
        assert_eq!(v.terminal_value, 1.0);

        // y_n = (0, 5) differs in one coordinate only: converges
        let good = DataSequence::new(
            alloc::vec![Point::from_slice(&[0.0, 5.0]).unwrap(); 30],
            Point::zeros(2),
        )
        .unwrap();
        let v = check_conv(&d, &good, DEFAULT_TOL).unwrap();
        assert!(v.converged);
    }

    #[test]
    fn conv_bregman_second_quartic() {
        let d = Discrepancy::bregman_second(ConvexFunctional::quartic());
        // y_n = 1 + 1/n needs a long prefix for the 1/n^2 decay to reach tol
        let seq = DataSequence::from_fn(Point::scalar(1.0), 4000, |n| {
            Point::scalar(1.0 + 1.0 / n as f64)
        })
        .unwrap();
        let v = check_conv(&d, &seq, DEFAULT_TOL).unwrap();
        assert!(v.converged, "terminal {}", v.terminal_value);
    }

    #[test]
    fn cont_metric_follows_conv() {
        let d = Discrepancy::power_norm(2.0);
        let seq = geometric_scalar_seq(0.5, 40);
        let zs = [Point::scalar(-1.0), Point::scalar(2.0)];
        let report = check_cont(&d, &zs, &seq, DEFAULT_TOL).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.checked_count(), 2);
    }

    #[test]
    fn cont_mismatch_witness_fails() {
        let w = mismatch_cont_witness(25);
        let d = Discrepancy::coordinate_mismatch();
        let conv = check_conv(&d, &w.seq, DEFAULT_TOL).unwrap();
        assert!(conv.converged);
        let cont = check_cont(&d, std::slice::from_ref(&w.z), &w.seq, DEFAULT_TOL).unwrap();
        assert!(!cont.all_pass());
        match &cont.per_z[0].status {
            ZStatus::Checked(v) => assert_eq!(v.terminal_value, 1.0),
            other => panic!("expected a checked probe, got {other:?}"),
        }
    }

    #[test]
    fn tauin_rho1_quartic_routes_agree() {
        let j = ConvexFunctional::quartic();
        let seq = geometric_scalar_seq(1.0, 40);
        let zs = [Point::scalar(0.0), Point::scalar(2.0)];
        let r = check_tauin_rho1(&j, &zs, &seq, DEFAULT_TOL).unwrap();
        assert!(r.a_holds && r.b_holds && r.agree(), "a={} b={}", r.a_holds, r.b_holds);
    }

    #[test]
    fn seeded_sample_sets_drive_the_checks() {
        let sets = SampleSets::seeded(1, -2.0, 2.0, 99).with_extra_z(&[Point::scalar(0.5)]);
        assert_eq!(sets.z_samples.len(), 9);
        assert_eq!(sets.ytilde_samples.len(), 8);
        let d = Discrepancy::power_norm(2.0);
        let seq = geometric_scalar_seq(0.25, 40);
        let cont = check_cont(&d, &sets.z_samples, &seq, DEFAULT_TOL).unwrap();
        assert!(cont.all_pass());
        assert_eq!(cont.checked_count(), 9);
        // the data-side probe bank feeds the second orientation
        let j = ConvexFunctional::squared();
        let r = check_tauin_rho2(&j, &sets.ytilde_samples, &seq, DEFAULT_TOL).unwrap();
        assert!(r.a_holds && r.b_holds);
    }

    #[test]
    fn tauin_rho2_quartic_routes_agree() {
        let j = ConvexFunctional::quartic();
        let seq = geometric_scalar_seq(1.0, 40);
        let zs = [Point::scalar(0.5), Point::scalar(2.0)];
        let r = check_tauin_rho2(&j, &zs, &seq, DEFAULT_TOL).unwrap();
        assert!(r.a_holds && r.b_holds && r.agree());
    }

    #[test]
    fn tauin_constant_sequence_trivially_converges() {
        let j = ConvexFunctional::squared();
        let seq = DataSequence::constant(Point::scalar(1.0), 20);
        let r = check_tauin_rho2(&j, &[Point::scalar(0.0)], &seq, DEFAULT_TOL).unwrap();
        assert!(r.a_holds && r.b_holds);
        assert_eq!(r.base.terminal_value, 0.0);
    }

    #[test]
    fn tauin_gradient_undefined_is_error() {
        let j = ConvexFunctional::entropy(1);
        let seq = DataSequence::from_fn(Point::scalar(1.0), 5, |n| {
            Point::scalar(if n == 3 { 0.0 } else { 1.0 })
        })
        .unwrap();
        let err = check_tauin_rho1(&j, &[], &seq, DEFAULT_TOL);
        assert_eq!(err.unwrap_err(), LabError::GradientUndefined { index: 2 });
    }

    #[test]
    fn ball_witness_values() {
        let w = ball_openness_witness();
        assert_eq!(w.evals, (0.0, 0.0, 1.0));
        assert!(w.interior_in_ball);
        assert!(!w.sequence_in_ball);
        assert!(w.sequence_converges_to_interior);
    }

    #[test]
    fn sqrt_rule_limits() {
        assert_eq!(parameter_choice_sqrt(1e-4, DEFAULT_ALPHA_MIN), 1e-2);
        assert_eq!(parameter_choice_sqrt(0.0, DEFAULT_ALPHA_MIN), DEFAULT_ALPHA_MIN);
        // rho_n = 4^-n gives alpha_n = 2^-n and rho_n/alpha_n = 2^-n -> 0
        for n in 1..30 {
            let rho = libm::pow(4.0, -(n as f64));
            let alpha = parameter_choice_sqrt(rho, DEFAULT_ALPHA_MIN);
            assert_eq!(alpha, libm::pow(2.0, -(n as f64)));
            assert!(rho / alpha < 1.0);
        }
    }

    #[test]
    fn r2_hilbert_stability() {
        let s = hilbert_scheme(Matrix::diag(&[2.0, 1.0]));
        let y = Point::from_slice(&[1.0, 1.0]).unwrap();
        let seq = DataSequence::from_fn(y.clone(), 28, |n| {
            y.axpy(libm::pow(2.0, -(n as f64)), &Point::from_slice(&[1.0, 0.0]).unwrap())
        })
        .unwrap();
        let rep = run_r2_experiment(&s, &seq, 1.0, &SolverConfig::default(), DEFAULT_TOL).unwrap();
        assert!(rep.verdict.converged, "distances: {:?}", rep.distances);
        assert!(rep.term_errors.is_empty());
        // closed-form Lipschitz bound of the solution map: for diag(2, 1)
        // the operator norm of (A^T A + I)^-1 A^T is max(2/5, 1/2) = 1/2
        for (i, d) in rep.distances.iter().enumerate() {
            let bound = 0.5 * libm::pow(2.0, -((i + 1) as f64));
            assert!(*d <= bound + 1e-7, "term {i}: {d} > {bound}");
        }
    }

    #[test]
    fn r2_constant_sequence_is_exact() {
        let s = example24_scheme();
        let seq = DataSequence::constant(Point::scalar(1.0), 10);
        let cfg = SolverConfig {
            bracket: (-3.0, 3.0),
            ..SolverConfig::default()
        };
        let rep = run_r2_experiment(&s, &seq, 1.0, &cfg, DEFAULT_TOL).unwrap();
        assert!(rep.verdict.converged);
        assert!(rep.distances.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn r2_example24_converges_at_one_over_n() {
        let s = example24_scheme();
        let seq = DataSequence::from_fn(Point::scalar(1.0), 300, |n| {
            Point::scalar(1.0 + 1.0 / n as f64)
        })
        .unwrap();
        let cfg = SolverConfig {
            bracket: (-3.0, 3.0),
            grid_points: 801,
            ..SolverConfig::default()
        };
        let rep = run_r2_experiment(&s, &seq, 1.0, &cfg, 1e-2).unwrap();
        assert!(rep.verdict.converged, "terminal {}", rep.verdict.terminal_value);
    }

    #[test]
    fn r3_sqrt_rule_on_diagonal_system() {
        let s = hilbert_scheme(Matrix::diag(&[1.0, 0.05]));
        let x_exact = Point::from_slice(&[1.0, 1.0]).unwrap();
        let rep = run_r3_experiment(
            &s,
            &x_exact,
            None,
            &SolverConfig::default(),
            &R3Config::default(),
        )
        .unwrap();
        assert!(rep.passed, "misfit {:?}, gap {}", rep.misfit_verdict.terminal_value, rep.reg_gap);
        assert!((rep.reg_at_minimal - 2.0).abs() < 1e-6);
        let last = rep.rows.last().unwrap();
        assert!(last.rho < 1e-6);
        assert!((last.reg - 2.0).abs() <= 1e-3, "reg {}", last.reg);
    }

    #[test]
    fn r3_noise_free_hits_r_minimal_immediately() {
        let s = hilbert_scheme(Matrix::diag(&[1.0, 0.05]));
        let x_exact = Point::from_slice(&[1.0, 1.0]).unwrap();
        let r3 = R3Config {
            noise_levels: alloc::vec![0.0; 5],
            ..R3Config::default()
        };
        let rep = run_r3_experiment(&s, &x_exact, None, &SolverConfig::default(), &r3).unwrap();
        assert!(rep.passed);
        for row in &rep.rows {
            assert_eq!(row.alpha, DEFAULT_ALPHA_MIN);
            assert!(row.err < 1e-5, "err {}", row.err);
        }
    }

    #[test]
    fn r3_constant_alpha_negative_control() {
        let s = hilbert_scheme(Matrix::diag(&[1.0, 0.05]));
        let x_exact = Point::from_slice(&[1.0, 1.0]).unwrap();
        let r3 = R3Config {
            rule: ParameterRule::Constant { alpha: 0.5 },
            ..R3Config::default()
        };
        let rep = run_r3_experiment(&s, &x_exact, None, &SolverConfig::default(), &r3).unwrap();
        assert!(!rep.passed);
        assert!(rep.reg_gap >= 1e-2, "gap {}", rep.reg_gap);
    }

    #[test]
    fn subsequences_keeping_the_tail_stay_converged() {
        let d = Discrepancy::power_norm(2.0);
        let seq = geometric_scalar_seq(0.0, 40);
        let full = check_conv(&d, &seq, DEFAULT_TOL).unwrap();
        assert!(full.converged);
        // strictly decreasing trends keep the verdict on any subsequence
        // that retains the terminal element (the finite stand-in for tails)
        for indices in [
            alloc::vec![0, 1, 2, 39],
            alloc::vec![5, 17, 23, 31, 39],
            alloc::vec![39],
            (0..36).step_by(3).chain([39]).collect::<Vec<_>>(),
        ] {
            let sub = seq.subsequence(&indices).unwrap();
            let v = check_conv(&d, &sub, DEFAULT_TOL).unwrap();
            assert!(v.converged, "indices {indices:?}");
        }
    }

    #[test]
    fn r2_flags_solver_failures() {
        // boxed regularizer is unsupported in 2-D: every term fails and the
        // experiment reports it rather than panicking
        let s = Scheme::new(
            ForwardOp::identity(2),
            Discrepancy::power_norm(2.0),
            Regularizer::boxed(Regularizer::sq_norm(), -1.0, 1.0),
        )
        .unwrap();
        let seq = DataSequence::constant(Point::zeros(2), 3);
        let rep = run_r2_experiment(&s, &seq, 1.0, &SolverConfig::default(), DEFAULT_TOL);
        // the limit problem itself fails -> error
        assert!(matches!(rep, Err(LabError::Solver(_))));
    }
}
