//! Exact Kullback-Leibler machinery on step functions over `[0, 1]`.
//!
//! The negative entropy `J(y) = integral of y log(y) - y` induces the
//! Kullback-Leibler divergence as its Bregman distance,
//!
//! ```text
//! D_KL(z, y) = integral of z log(z / y) - z + y
//! ```
//!
//! with the conventions `0 log 0 = 0` and `D_KL = inf` as soon as `z` keeps
//! mass where `y` vanishes. On step functions every integral is a finite sum
//! over the merged grid, so the divergence, the L1 distance and all pairings
//! are computed exactly; this makes the classical counterexample family
//! (tall shrinking spikes whose divergence tends to one while their L1
//! distance tends to zero) reproducible to machine precision.

use alloc::vec::Vec;
use core::fmt;

use crate::convergence::{zero_trend_verdict, ConvergenceVerdict};
use crate::ext::ExtReal;
use crate::point::Point;
use crate::stepfn::{StepFn, StepFnError};

#[derive(Debug, Clone, PartialEq)]
pub enum KlError {
    /// The spike index must be at least 3.
    SpikeIndexTooSmall,
    /// Baselines, spikes and shifts must be strictly positive.
    NonPositiveParameter,
    /// Strictly positive functions are required (gradients are logarithms).
    ZeroCell,
    /// The divergence is infinite where a finite value is required.
    InfiniteDivergence,
    /// Clipping thresholds must satisfy `0 < eps < 1`.
    EpsOutOfRange,
    /// Nonnegative input required.
    NegativeInput,
    /// The exact integral and the closed form disagree, or a column of the
    /// counterexample table is not monotone.
    CounterexampleMismatch { detail: alloc::string::String },
    Step(StepFnError),
}

impl fmt::Display for KlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KlError::SpikeIndexTooSmall => write!(f, "spike index n must be at least 3"),
            KlError::NonPositiveParameter => write!(f, "parameter must be strictly positive"),
            KlError::ZeroCell => write!(f, "function must be strictly positive on every cell"),
            KlError::InfiniteDivergence => write!(f, "divergence is infinite"),
            KlError::EpsOutOfRange => write!(f, "clipping threshold must lie in (0, 1)"),
            KlError::NegativeInput => write!(f, "nonnegative step function required"),
            KlError::CounterexampleMismatch { detail } => write!(f, "{detail}"),
            KlError::Step(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for KlError {}

impl From<StepFnError> for KlError {
    fn from(e: StepFnError) -> Self {
        KlError::Step(e)
    }
}

/// Negative entropy `J(y) = integral of y log(y) - y`; `None` encodes the
/// value `+inf` taken on functions with negative parts. May be negative
/// (its minimum over nonnegative functions is -1 at the constant one).
pub fn kl_j(y: &StepFn) -> Option<f64> {
    let mut s = 0.0;
    for (w, &v) in y.breakpoints().windows(2).zip(y.values()) {
        let len = w[1] - w[0];
        if v < 0.0 {
            return None;
        }
        if v > 0.0 {
            s += (v * libm::log(v) - v) * len;
        }
        // 0 log 0 - 0 = 0
    }
    Some(s)
}

/// Whether the subdifferential of the negative entropy at `y` is the single
/// point `log(y)`: on step functions exactly when every cell value is
/// strictly positive (step functions are automatically essentially bounded).
pub fn kl_grad_domain(y: &StepFn) -> bool {
    y.min_value() > 0.0
}

/// Exact Kullback-Leibler divergence on the merged grid.
pub fn kl_divergence(z: &StepFn, y: &StepFn) -> ExtReal {
    let mut s = 0.0;
    for (len, zv, yv) in z.zip_cells(y) {
        if zv < 0.0 || yv < 0.0 {
            return ExtReal::Infinity;
        }
        if zv == 0.0 {
            s += yv * len;
        } else if yv == 0.0 {
            return ExtReal::Infinity;
        } else {
            s += (zv * libm::log(zv / yv) - zv + yv) * len;
        }
    }
    debug_assert!(s > -1e-9, "Kullback-Leibler divergence went negative: {s}");
    ExtReal::Finite(s.max(0.0))
}

/// Exact `L^1` distance on the merged grid.
pub fn l1_distance(z: &StepFn, y: &StepFn) -> f64 {
    z.sub(y).l1_norm()
}

/// Both sides of the entropy-to-norm inequality
/// `||z - y||_1^2 <= (2/3 ||z||_1 + 4/3 ||y||_1) D_KL(z, y)`
/// (the 2/3 weight belongs to the first divergence argument; with the
/// weights transposed the bound is false).
#[derive(Debug, Clone, PartialEq)]
pub struct BorweinReport {
    pub lhs: f64,
    pub rhs: f64,
    pub dkl: f64,
    pub holds: bool,
}

pub fn borwein_check(z: &StepFn, y: &StepFn) -> Result<BorweinReport, KlError> {
    let dkl = match kl_divergence(z, y) {
        ExtReal::Finite(v) => v,
        ExtReal::Infinity => return Err(KlError::InfiniteDivergence),
    };
    let l1 = l1_distance(z, y);
    let lhs = l1 * l1;
    let rhs = (2.0 / 3.0 * z.l1_norm() + 4.0 / 3.0 * y.l1_norm()) * dkl;
    Ok(BorweinReport {
        lhs,
        rhs,
        dkl,
        holds: lhs <= rhs + 1e-12,
    })
}

/// Member of the spike family: value `n` on `[0, 1/(n log n)]` and `eps`
/// beyond. Converges to the constant `eps` in `L^1` while its divergence
/// from the baseline tends to one.
pub fn counterexample_sequence(n: u64, eps: f64) -> Result<StepFn, KlError> {
    if n < 3 {
        return Err(KlError::SpikeIndexTooSmall);
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(KlError::NonPositiveParameter);
    }
    let nf = n as f64;
    let breakpoint = 1.0 / (nf * libm::log(nf));
    debug_assert!(breakpoint < 1.0);
    Ok(StepFn::nonnegative(
        alloc::vec![0.0, breakpoint, 1.0],
        alloc::vec![nf, eps],
    )?)
}

/// Closed form of `D_KL(y_n, eps)` for the spike family:
/// `(n log(n/eps) - n + eps) / (n log n)`.
pub fn counterexample_closed_form(n: u64, eps: f64) -> f64 {
    let nf = n as f64;
    (nf * libm::log(nf / eps) - nf + eps) / (nf * libm::log(nf))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRow {
    pub n: u64,
    pub eps: f64,
    pub dkl_exact: f64,
    pub dkl_closed_form: f64,
    pub l1: f64,
}

/// Tabulate the spike family against the constant baseline and verify that
/// the exact integrals reproduce the closed form to `1e-12`, that the `L^1`
/// column falls and that the divergence column rises: divergence control is
/// strictly stronger than `L^1` control on this family.
pub fn counterexample_report(n_list: &[u64], eps: f64) -> Result<Vec<CounterexampleRow>, KlError> {
    let baseline = StepFn::constant(eps);
    if !eps.is_finite() || eps <= 0.0 {
        return Err(KlError::NonPositiveParameter);
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let yn = counterexample_sequence(n, eps)?;
        let dkl_exact = match kl_divergence(&yn, &baseline) {
            ExtReal::Finite(v) => v,
            ExtReal::Infinity => return Err(KlError::InfiniteDivergence),
        };
        let dkl_closed_form = counterexample_closed_form(n, eps);
        let l1 = l1_distance(&yn, &baseline);
        if (dkl_exact - dkl_closed_form).abs() > 1e-12 {
            return Err(KlError::CounterexampleMismatch {
                detail: alloc::format!(
                    "n={n}: exact divergence {dkl_exact} vs closed form {dkl_closed_form}"
                ),
            });
        }
        rows.push(CounterexampleRow {
            n,
            eps,
            dkl_exact,
            dkl_closed_form,
            l1,
        });
    }
    for w in rows.windows(2) {
        if w[0].n < w[1].n && w[1].l1 >= w[0].l1 {
            return Err(KlError::CounterexampleMismatch {
                detail: alloc::format!("L1 column not decreasing at n={}", w[1].n),
            });
        }
        if w[0].n < w[1].n && w[1].dkl_exact <= w[0].dkl_exact {
            return Err(KlError::CounterexampleMismatch {
                detail: alloc::format!("divergence column not increasing at n={}", w[1].n),
            });
        }
    }
    Ok(rows)
}

/// Pairing trend `integral of w (log f_n - log f_lim)` of one bounded test
/// function against a positive family: vanishing pairings over a bank of
/// test functions is the step-function surrogate of weak* convergence of
/// the logarithms.
pub fn weakstar_pairing(
    w: &StepFn,
    f_seq: &[StepFn],
    f_lim: &StepFn,
    tol: f64,
) -> Result<ConvergenceVerdict, KlError> {
    if !kl_grad_domain(f_lim) || f_seq.iter().any(|f| !kl_grad_domain(f)) {
        return Err(KlError::ZeroCell);
    }
    let values: Vec<ExtReal> = f_seq
        .iter()
        .map(|fnx| {
            let diff_log = fnx.combine(f_lim, |a, b| libm::log(a) - libm::log(b));
            let pairing = w.integrate_with(&diff_log, |wv, dv| wv * dv);
            ExtReal::Finite(pairing.max(-pairing))
        })
        .collect();
    Ok(zero_trend_verdict(
        &values,
        tol,
        "|integral w (log f_n - log f_lim)|",
    ))
}

/// Eight bounded step test functions: constants, indicators, sign patterns
/// and a staircase. Deterministic; used as the default weak* probe bank.
pub fn default_test_bank() -> Vec<StepFn> {
    let f = |bps: &[f64], vals: &[f64]| {
        StepFn::new(bps.to_vec(), vals.to_vec()).expect("valid test function")
    };
    alloc::vec![
        StepFn::constant(1.0),
        StepFn::constant(-1.0),
        f(&[0.0, 0.5, 1.0], &[1.0, 0.0]),
        f(&[0.0, 0.25, 0.75, 1.0], &[0.0, 1.0, 0.0]),
        f(&[0.0, 0.25, 0.5, 0.75, 1.0], &[1.0, -1.0, 1.0, -1.0]),
        f(
            &[0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0],
            &[-1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0],
        ),
        f(&[0.0, 0.25, 0.5, 0.75, 1.0], &[0.25, 0.5, 0.75, 1.0]),
        f(&[0.0, 0.4, 0.6, 1.0], &[0.0, 2.0, 0.0]),
    ]
}

/// Outcome of the divergence-implies-pairing probe for the data-first
/// Bregman orientation.
#[derive(Debug, Clone)]
pub struct Rho2ProbeReport {
    /// Trend of `D_KL(y_n, y)`.
    pub divergence: ConvergenceVerdict,
    /// Per-probe trends of `integral (log y - log z)(y - y_n)`.
    pub pairings: Vec<ConvergenceVerdict>,
    /// True when the divergence criterion failed, making the implication
    /// vacuous on this family.
    pub vacuous: bool,
    pub implication_holds: bool,
}

/// Check that `D_KL(y_n, y) -> 0` forces every pairing
/// `integral (log y - log z)(y - y_n) -> 0` on the probe bank, the
/// implication direction that makes divergence control a full convergence
/// notion for the data-first orientation.
pub fn rho2_kl_equivalence_probe(
    y: &StepFn,
    seq: &[StepFn],
    z_samples: &[StepFn],
    tol: f64,
) -> Result<Rho2ProbeReport, KlError> {
    if !kl_grad_domain(y)
        || seq.iter().any(|f| !kl_grad_domain(f))
        || z_samples.iter().any(|f| !kl_grad_domain(f))
    {
        return Err(KlError::ZeroCell);
    }
    let div_values: Vec<ExtReal> = seq.iter().map(|yn| kl_divergence(yn, y)).collect();
    let divergence = zero_trend_verdict(&div_values, tol, "D_KL(y_n, y)");

    let mut pairings = Vec::with_capacity(z_samples.len());
    for z in z_samples {
        let weight = y.combine(z, |yv, zv| libm::log(yv) - libm::log(zv));
        let values: Vec<ExtReal> = seq
            .iter()
            .map(|yn| {
                let diff = y.sub(yn);
                let p = weight.integrate_with(&diff, |wv, dv| wv * dv);
                ExtReal::Finite(p.max(-p))
            })
            .collect();
        pairings.push(zero_trend_verdict(
            &values,
            tol,
            "|integral (log y - log z)(y - y_n)|",
        ));
    }

    let vacuous = !divergence.converged;
    let implication_holds = vacuous || pairings.iter().all(|p| p.converged);
    Ok(Rho2ProbeReport {
        divergence,
        pairings,
        vacuous,
        implication_holds,
    })
}

/// Clipped positive/negative parts of a signed step function.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatePair {
    /// `clamp(y, eps, 1/eps)`: strictly positive, essentially bounded.
    pub plus: StepFn,
    /// `clamp(y, -1/eps, -eps)`: strictly negative, essentially bounded.
    pub minus: StepFn,
    /// `||(plus + minus) - y||_1`, the clipping error.
    pub l1_error: f64,
}

/// The clipping construction behind the density of entropy-finite functions:
/// both clips have logarithmic gradients, and their sum recovers `y` in
/// `L^1` as `eps` shrinks.
pub fn truncate_decompose(y: &StepFn, eps: f64) -> Result<TruncatePair, KlError> {
    if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
        return Err(KlError::EpsOutOfRange);
    }
    let plus = y.clamp(eps, 1.0 / eps);
    let minus = y.clamp(-1.0 / eps, -eps);
    debug_assert!(kl_grad_domain(&plus));
    debug_assert!(kl_grad_domain(&minus.scale(-1.0)));
    let l1_error = plus.add(&minus).sub(y).l1_norm();
    Ok(TruncatePair {
        plus,
        minus,
        l1_error,
    })
}

/// Shift nonnegative data away from zero by a positive baseline; the result
/// always has a logarithmic gradient.
pub fn baseline_shift(y: &StepFn, c: f64) -> Result<StepFn, KlError> {
    if !c.is_finite() || c <= 0.0 {
        return Err(KlError::NonPositiveParameter);
    }
    if !y.is_nonnegative() {
        return Err(KlError::NegativeInput);
    }
    let shifted = y.shift(c);
    debug_assert!(kl_grad_domain(&shifted));
    Ok(shifted)
}

/// Represent a family of step functions on their common merged grid as
/// coordinate vectors, together with the cell lengths as quadrature
/// weights. This is the bridge from the exact step-function model to the
/// vector-space convergence checks (entropy functional with cell-length
/// weights).
pub fn common_grid_points(fns: &[&StepFn]) -> (Vec<f64>, Vec<Point>) {
    if fns.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let mut bps: Vec<f64> = fns.iter().flat_map(|f| f.breakpoints().iter().copied()).collect();
    bps.sort_unstable_by(f64::total_cmp);
    bps.dedup();
    let weights: Vec<f64> = bps.windows(2).map(|w| w[1] - w[0]).collect();
    let points = fns
        .iter()
        .map(|f| {
            let values: Vec<f64> = bps[..bps.len() - 1]
                .iter()
                .map(|&left| {
                    // the merged grid refines every input grid, so the cell
                    // containing `left` is unique
                    let idx = f
                        .breakpoints()
                        .partition_point(|&b| b <= left)
                        .saturating_sub(1);
                    f.values()[idx.min(f.values().len() - 1)]
                })
                .collect();
            Point::new(values).expect("finite step values")
        })
        .collect();
    (weights, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn j_closed_forms() {
        assert!((kl_j(&StepFn::constant(1.0)).unwrap() + 1.0).abs() < 1e-15);
        let e = core::f64::consts::E;
        assert!(kl_j(&StepFn::constant(e)).unwrap().abs() < 1e-15);
        assert_eq!(kl_j(&StepFn::constant(0.0)), Some(0.0));
        assert_eq!(kl_j(&StepFn::constant(-1.0)), None);
    }

    #[test]
    fn grad_domain_is_strict_positivity() {
        assert!(kl_grad_domain(&StepFn::constant(0.5)));
        let with_zero = StepFn::nonnegative(vec![0.0, 0.5, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(!kl_grad_domain(&with_zero));
        let spike = counterexample_sequence(100, 1.0).unwrap();
        assert!(kl_grad_domain(&spike));
    }

    #[test]
    fn divergence_closed_forms() {
        let two = StepFn::constant(2.0);
        let one = StepFn::constant(1.0);
        assert_eq!(kl_divergence(&two, &two), ExtReal::Finite(0.0));
        let d = kl_divergence(&two, &one).value().unwrap();
        assert!((d - (2.0 * libm::log(2.0) - 1.0)).abs() < 1e-15);
        assert_eq!(
            kl_divergence(&one, &StepFn::constant(0.0)),
            ExtReal::Infinity
        );
        // a zero cell in the first argument only picks up the mass of y
        let z = StepFn::nonnegative(vec![0.0, 0.5, 1.0], vec![0.0, 1.0]).unwrap();
        let d = kl_divergence(&z, &one).value().unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn l1_closed_forms() {
        let two = StepFn::constant(2.0);
        let one = StepFn::constant(1.0);
        assert_eq!(l1_distance(&two, &one), 1.0);
        assert_eq!(l1_distance(&two, &two), 0.0);
        let spike = counterexample_sequence(100, 1.0).unwrap();
        let expect = 99.0 / (100.0 * libm::log(100.0));
        assert!((l1_distance(&spike, &one) - expect).abs() < 1e-15);
    }

    #[test]
    fn borwein_example_and_degenerate() {
        let two = StepFn::constant(2.0);
        let one = StepFn::constant(1.0);
        let rep = borwein_check(&two, &one).unwrap();
        assert!(rep.holds);
        assert!((rep.lhs - 1.0).abs() < 1e-15);
        // (2/3 * 2 + 4/3 * 1) * (2 ln 2 - 1)
        assert!((rep.rhs - 1.0301182963197083).abs() < 1e-12);
        let same = borwein_check(&one, &one).unwrap();
        assert_eq!((same.lhs, same.rhs), (0.0, 0.0));
    }

    #[test]
    fn counterexample_construction() {
        let y = counterexample_sequence(10, 1.0).unwrap();
        assert_eq!(y.values(), &[10.0, 1.0]);
        assert!((y.breakpoints()[1] - 0.043429448190325175).abs() < 1e-15);
        assert!(counterexample_sequence(2, 1.0).is_err());
        assert!(counterexample_sequence(10, 0.0).is_err());
        assert!(counterexample_sequence(3, 0.5).is_ok());
    }

    #[test]
    fn counterexample_table_matches_closed_form() {
        let rows = counterexample_report(&[10, 100, 1000], 1.0).unwrap();
        assert!((rows[0].dkl_exact - 0.609134966287073).abs() < 1e-12);
        assert!((rows[0].l1 - 0.390865033712927).abs() < 1e-12);
        assert!((rows[1].dkl_exact - 0.785024231457890).abs() < 1e-12);
        assert!((rows[1].l1 - 0.214975768542110).abs() < 1e-12);
    }

    #[test]
    fn weakstar_spike_family_converges() {
        let family: Vec<StepFn> = (3..40)
            .map(|k| counterexample_sequence(1 << k, 1.0).unwrap())
            .collect();
        let lim = StepFn::constant(1.0);
        let v = weakstar_pairing(&StepFn::constant(1.0), &family, &lim, 1e-6).unwrap();
        assert!(v.converged, "terminal {}", v.terminal_value);
    }

    #[test]
    fn weakstar_spike_pairing_closed_form() {
        // against w = 1 the spike pairs to log(n) * (n log n)^-1 = 1/n
        let lim = StepFn::constant(1.0);
        let w = StepFn::constant(1.0);
        for n in [10u64, 100, 1000] {
            let yn = counterexample_sequence(n, 1.0).unwrap();
            let diff_log = yn.combine(&lim, |a, b| libm::log(a) - libm::log(b));
            let pairing = w.integrate_with(&diff_log, |wv, dv| wv * dv);
            assert!((pairing - 1.0 / n as f64).abs() < 1e-12, "n={n}: {pairing}");
        }
    }

    #[test]
    fn rho2_probe_harmonic_family() {
        // y_n = 1 + 1/n: divergence decays like 1/(2n^2), pairings like 1/n
        let family: Vec<StepFn> = (1..=4000)
            .map(|n| StepFn::constant(1.0 + 1.0 / n as f64))
            .collect();
        let rep = rho2_kl_equivalence_probe(
            &StepFn::constant(1.0),
            &family,
            &[StepFn::constant(2.0)],
            1e-3,
        )
        .unwrap();
        assert!(!rep.vacuous);
        assert!(rep.implication_holds);
        assert!(rep.pairings.iter().all(|p| p.converged));
    }

    #[test]
    fn weakstar_oscillation_negative_control() {
        // log f_n alternates +-1 on half cells; w matches the sign pattern
        let e = core::f64::consts::E;
        let osc = StepFn::new(vec![0.0, 0.5, 1.0], vec![e, 1.0 / e]).unwrap();
        let family = vec![osc; 20];
        let w = StepFn::new(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap();
        let v = weakstar_pairing(&w, &family, &StepFn::constant(1.0), 1e-6).unwrap();
        assert!(!v.converged);
        assert!((v.terminal_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weakstar_rejects_zero_cells() {
        let zero = StepFn::nonnegative(vec![0.0, 0.5, 1.0], vec![1.0, 0.0]).unwrap();
        let err = weakstar_pairing(
            &StepFn::constant(1.0),
            &[zero],
            &StepFn::constant(1.0),
            1e-6,
        );
        assert_eq!(err.unwrap_err(), KlError::ZeroCell);
    }

    #[test]
    fn rho2_probe_positive_family() {
        let family: Vec<StepFn> = (1..=40)
            .map(|n| StepFn::constant(1.0 + libm::pow(2.0, -(n as f64))))
            .collect();
        let rep = rho2_kl_equivalence_probe(
            &StepFn::constant(1.0),
            &family,
            &[StepFn::constant(2.0)],
            1e-6,
        )
        .unwrap();
        assert!(!rep.vacuous);
        assert!(rep.implication_holds);
    }

    #[test]
    fn rho2_probe_counterexample_family_is_vacuous() {
        let family: Vec<StepFn> = (3..20)
            .map(|k| counterexample_sequence(1 << k, 1.0).unwrap())
            .collect();
        let rep = rho2_kl_equivalence_probe(
            &StepFn::constant(1.0),
            &family,
            &[StepFn::constant(2.0)],
            1e-6,
        )
        .unwrap();
        assert!(rep.vacuous, "divergence terminal {}", rep.divergence.terminal_value);
        assert!(rep.implication_holds); // vacuously
    }

    #[test]
    fn truncate_examples() {
        let five = StepFn::constant(5.0);
        let pair = truncate_decompose(&five, 0.1).unwrap();
        assert_eq!(pair.plus, StepFn::constant(5.0));
        assert_eq!(pair.minus, StepFn::constant(-0.1));
        assert!((pair.l1_error - 0.1).abs() < 1e-15);

        let zero = StepFn::constant(0.0);
        let pair = truncate_decompose(&zero, 0.5).unwrap();
        assert_eq!(pair.plus, StepFn::constant(0.5));
        assert_eq!(pair.minus, StepFn::constant(-0.5));
        assert_eq!(pair.l1_error, 0.0);

        assert!(truncate_decompose(&five, 1.5).is_err());
    }

    #[test]
    fn truncate_error_halves_with_eps() {
        let y = StepFn::new(vec![0.0, 0.3, 0.7, 1.0], vec![2.0, -0.5, 0.001]).unwrap();
        let mut prev = f64::INFINITY;
        for k in 4..12 {
            let eps = libm::pow(2.0, -(k as f64));
            let pair = truncate_decompose(&y, eps).unwrap();
            assert!(pair.l1_error < prev);
            // once eps is below every |value|, the error is eps * |[0,1]|
            if eps < 0.001 {
                assert!((pair.l1_error / eps - 1.0).abs() < 1e-9);
            }
            prev = pair.l1_error;
        }
    }

    #[test]
    fn baseline_shift_enters_gradient_domain() {
        let with_zero = StepFn::nonnegative(vec![0.0, 0.5, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(!kl_grad_domain(&with_zero));
        let shifted = baseline_shift(&with_zero, 0.01).unwrap();
        assert!(kl_grad_domain(&shifted));
        assert!(baseline_shift(&with_zero, 0.0).is_err());

        // shifting both arguments makes an infinite divergence finite
        let z = StepFn::constant(1.0);
        assert_eq!(kl_divergence(&z, &with_zero), ExtReal::Infinity);
        let shifted_z = baseline_shift(&z, 0.01).unwrap();
        let d = kl_divergence(&shifted_z, &shifted);
        assert!(d.is_finite());
    }

    #[test]
    fn common_grid_round_trip() {
        let a = StepFn::new(vec![0.0, 0.25, 1.0], vec![1.0, 3.0]).unwrap();
        let b = StepFn::new(vec![0.0, 0.5, 1.0], vec![2.0, 4.0]).unwrap();
        let (weights, points) = common_grid_points(&[&a, &b]);
        assert_eq!(weights.len(), 3);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(points[0].as_slice(), &[1.0, 3.0, 3.0]);
        assert_eq!(points[1].as_slice(), &[2.0, 2.0, 4.0]);
    }
}
