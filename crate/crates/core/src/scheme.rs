//! Variational schemes: a forward operator, a discrepancy on the data space
//! and a regularizer on the solution space, bundled with the weighted
//! objective `T_{alpha,y}(x) = rho(F(x), y) + alpha R(x)`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrepancy::{Discrepancy, DiscrepancyError};
use crate::ext::ExtReal;
use crate::functionals::random_point;
use crate::linalg::Matrix;
use crate::point::Point;
use crate::regularizers::Regularizer;

/// Forward operator `F` from the solution space into the data space.
#[derive(Clone)]
pub enum ForwardOp {
    Identity { dim: usize },
    Linear { matrix: Matrix },
    /// Closed-form scalar map, one-dimensional in and out.
    ScalarMap { f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for ForwardOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForwardOp::Identity { dim } => write!(f, "Identity({dim})"),
            ForwardOp::Linear { matrix } => {
                write!(f, "Linear({}x{})", matrix.rows(), matrix.cols())
            }
            ForwardOp::ScalarMap { .. } => write!(f, "ScalarMap"),
        }
    }
}

impl ForwardOp {
    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0);
        ForwardOp::Identity { dim }
    }

    pub fn linear(matrix: Matrix) -> Self {
        ForwardOp::Linear { matrix }
    }

    pub fn scalar_map<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        ForwardOp::ScalarMap { f: Arc::new(f) }
    }

    pub fn in_dim(&self) -> usize {
        match self {
            ForwardOp::Identity { dim } => *dim,
            ForwardOp::Linear { matrix } => matrix.cols(),
            ForwardOp::ScalarMap { .. } => 1,
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            ForwardOp::Identity { dim } => *dim,
            ForwardOp::Linear { matrix } => matrix.rows(),
            ForwardOp::ScalarMap { .. } => 1,
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point, SchemeError> {
        if x.dim() != self.in_dim() {
            return Err(SchemeError::DimensionMismatch);
        }
        Ok(match self {
            ForwardOp::Identity { .. } => x.clone(),
            ForwardOp::Linear { matrix } => matrix.apply(x),
            ForwardOp::ScalarMap { f } => {
                let v = f(x.as_scalar());
                if !v.is_finite() {
                    return Err(SchemeError::NonFiniteForwardValue);
                }
                Point::scalar(v)
            }
        })
    }

    /// `F^T y` for the linear kind.
    pub fn adjoint_apply(&self, y: &Point) -> Result<Point, SchemeError> {
        match self {
            ForwardOp::Identity { dim } => {
                if y.dim() != *dim {
                    return Err(SchemeError::DimensionMismatch);
                }
                Ok(y.clone())
            }
            ForwardOp::Linear { matrix } => {
                if y.dim() != matrix.rows() {
                    return Err(SchemeError::DimensionMismatch);
                }
                Ok(matrix.transpose_apply(y))
            }
            ForwardOp::ScalarMap { .. } => Err(SchemeError::NoAdjoint),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemeError {
    DimensionMismatch,
    NonFiniteForwardValue,
    NoAdjoint,
    /// alpha, tau, delta must be strictly positive.
    NonPositiveParameter,
    /// The discrepancy failed `rho(y, y) = 0` on a probe point.
    ProbeFailed { probe: Point, value: ExtReal },
    Discrepancy(DiscrepancyError),
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeError::DimensionMismatch => write!(f, "dimension mismatch"),
            SchemeError::NonFiniteForwardValue => write!(f, "forward map produced a non-finite value"),
            SchemeError::NoAdjoint => write!(f, "forward operator has no adjoint"),
            SchemeError::NonPositiveParameter => write!(f, "parameter must be strictly positive"),
            SchemeError::ProbeFailed { probe, value } => {
                write!(f, "discrepancy at ({probe}, {probe}) is {value}, expected 0")
            }
            SchemeError::Discrepancy(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SchemeError {}

impl From<DiscrepancyError> for SchemeError {
    fn from(e: DiscrepancyError) -> Self {
        SchemeError::Discrepancy(e)
    }
}

/// A variational scheme. Construction spot-checks the axiom
/// `rho(y, y) = 0` on a probe set (16 seeded points by default); the axiom
/// is universally quantified and can only be sampled.
#[derive(Debug, Clone)]
pub struct Scheme {
    forward: ForwardOp,
    discrepancy: Discrepancy,
    regularizer: Regularizer,
}

const PROBE_SEED: u64 = 0x7a72_6567; // fixed across runs

impl Scheme {
    pub fn new(
        forward: ForwardOp,
        discrepancy: Discrepancy,
        regularizer: Regularizer,
    ) -> Result<Self, SchemeError> {
        let dim = forward.out_dim();
        let (lo, hi) = discrepancy.probe_interval();
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let probes: Vec<Point> = (0..16).map(|_| random_point(&mut rng, dim, lo, hi)).collect();
        Self::with_probes(forward, discrepancy, regularizer, &probes)
    }

    /// Construction with a caller-supplied probe set.
    pub fn with_probes(
        forward: ForwardOp,
        discrepancy: Discrepancy,
        regularizer: Regularizer,
        probes: &[Point],
    ) -> Result<Self, SchemeError> {
        for probe in probes {
            let v = discrepancy.eval(probe, probe)?;
            if v != ExtReal::Finite(0.0) {
                return Err(SchemeError::ProbeFailed {
                    probe: probe.clone(),
                    value: v,
                });
            }
        }
        Ok(Scheme {
            forward,
            discrepancy,
            regularizer,
        })
    }

    pub fn forward(&self) -> &ForwardOp {
        &self.forward
    }

    pub fn discrepancy(&self) -> &Discrepancy {
        &self.discrepancy
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }

    pub fn solution_dim(&self) -> usize {
        self.forward.in_dim()
    }

    pub fn data_dim(&self) -> usize {
        self.forward.out_dim()
    }

    /// Data misfit `rho(F(x), y)`.
    pub fn misfit(&self, x: &Point, y: &Point) -> Result<ExtReal, SchemeError> {
        let fx = self.forward.apply(x)?;
        Ok(self.discrepancy.eval(&fx, y)?)
    }

    /// The Tikhonov objective `T_{alpha,y}(x) = rho(F(x), y) + alpha R(x)`
    /// in extended-real arithmetic.
    pub fn objective(&self, x: &Point, y: &Point, alpha: f64) -> Result<ExtReal, SchemeError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(SchemeError::NonPositiveParameter);
        }
        if y.dim() != self.data_dim() {
            return Err(SchemeError::DimensionMismatch);
        }
        Ok(self.misfit(x, y)? + self.regularizer.eval(x).scale(alpha))
    }
}

/// The worked one-dimensional example: `F = id`, `rho(x, y)` the Bregman
/// distance of `t -> t^4` with the data in the first slot
/// (`rho(x, y) = y^4 - x^4 - 4x^3 (y - x)`), and `R(x) = |x + 1|`.
pub fn example24_scheme() -> Scheme {
    Scheme::new(
        ForwardOp::identity(1),
        Discrepancy::bregman_second(crate::functionals::ConvexFunctional::quartic()),
        Regularizer::abs_shift(),
    )
    .expect("built-in scheme is valid")
}

/// Linear Hilbert-space scheme: `rho(z, y) = ||z - y||^2`, `R(x) = ||x||^2`.
pub fn hilbert_scheme(matrix: Matrix) -> Scheme {
    Scheme::new(
        ForwardOp::linear(matrix),
        Discrepancy::power_norm(2.0),
        Regularizer::sq_norm(),
    )
    .expect("built-in scheme is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::ConvexFunctional;

    #[test]
    fn objective_example24_values() {
        let s = example24_scheme();
        let y = Point::scalar(1.0);
        // rho(0,1) = 1, R(0) = 1
        let t = s.objective(&Point::scalar(0.0), &y, 1.0).unwrap();
        assert_eq!(t, ExtReal::Finite(2.0));
        // rho(1,1) = 0, R(1) = 2
        let t = s.objective(&Point::scalar(1.0), &y, 1.0).unwrap();
        assert_eq!(t, ExtReal::Finite(2.0));
    }

    #[test]
    fn scheme_is_shareable_across_threads() {
        // all operations are pure over immutable schemes; concurrent
        // evaluation needs no coordination
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Scheme>();
        assert_send_sync::<ForwardOp>();
    }

    #[test]
    fn objective_absorbs_infinite_regularizer() {
        let s = Scheme::new(
            ForwardOp::identity(1),
            Discrepancy::power_norm(2.0),
            Regularizer::boxed(Regularizer::sq_norm(), -1.0, 1.0),
        )
        .unwrap();
        let t = s.objective(&Point::scalar(5.0), &Point::scalar(0.0), 1.0).unwrap();
        assert_eq!(t, ExtReal::Infinity);
    }

    #[test]
    fn objective_monotone_in_alpha() {
        let s = example24_scheme();
        let y = Point::scalar(1.0);
        let x = Point::scalar(0.3);
        let mut prev = ExtReal::zero();
        for alpha in [0.25, 0.5, 1.0, 2.0] {
            let t = s.objective(&x, &y, alpha).unwrap();
            assert!(t >= prev);
            prev = t;
        }
    }

    #[test]
    fn probe_validation_rejects_broken_discrepancy() {
        let err = Scheme::new(
            ForwardOp::identity(1),
            Discrepancy::broken_at_diagonal(),
            Regularizer::sq_norm(),
        );
        assert!(matches!(err, Err(SchemeError::ProbeFailed { .. })));
    }

    #[test]
    fn invalid_alpha_rejected() {
        let s = example24_scheme();
        let y = Point::scalar(1.0);
        assert_eq!(
            s.objective(&Point::scalar(0.0), &y, 0.0),
            Err(SchemeError::NonPositiveParameter)
        );
    }

    #[test]
    fn scalar_map_forward() {
        let s = Scheme::new(
            ForwardOp::scalar_map(|x| x * x),
            Discrepancy::bregman_first(ConvexFunctional::squared()),
            Regularizer::l1(),
        )
        .unwrap();
        let v = s.misfit(&Point::scalar(2.0), &Point::scalar(1.0)).unwrap();
        assert_eq!(v, ExtReal::Finite(4.5)); // 1/2 (4-1)^2
    }
}
