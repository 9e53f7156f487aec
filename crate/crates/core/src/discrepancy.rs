//! Discrepancy functionals on the data space.
//!
//! Besides powers of the Euclidean norm, both orientations of a Bregman
//! discrepancy are provided: `rho_1(z, y) = D_J(z, y)` puts the reconstructed
//! data in the first slot, `rho_2(z, y) = D_J(y, z)` puts the measured data
//! there. The two behave very differently (the Bregman distance is convex in
//! its first argument, not necessarily in the second), and the coordinate
//! mismatch example shows that a valid discrepancy need not induce anything
//! like a metric topology.

use alloc::string::String;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ext::ExtReal;
use crate::functionals::{random_point, ConvexFunctional, FunctionalError};
use crate::point::Point;

#[derive(Debug, Clone, PartialEq)]
enum DiscrepancyKind {
    /// `||z - y||_2^p` for `p > 0`.
    PowerNorm { p: f64 },
    /// `rho_1(z, y) = D_J(z, y)`.
    BregmanFirst { j: ConvexFunctional },
    /// `rho_2(z, y) = D_J(y, z)`.
    BregmanSecond { j: ConvexFunctional },
    /// On `R^2`: zero when at most one coordinate differs, one otherwise.
    CoordinateMismatch,
    /// Violates `rho(y, y) = 0`; only for exercising probe validation.
    #[cfg(test)]
    BrokenAtDiagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    kind: DiscrepancyKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyError {
    DimensionMismatch,
    /// The coordinate mismatch example is defined on `R^2` only.
    NotTwoDimensional,
    /// Propagated from the underlying convex functional (undefined
    /// gradient at the base point of a Bregman distance).
    Functional(FunctionalError),
    InvalidExponent,
}

impl fmt::Display for DiscrepancyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscrepancyError::DimensionMismatch => write!(f, "dimension mismatch"),
            DiscrepancyError::NotTwoDimensional => {
                write!(f, "coordinate mismatch discrepancy needs dimension 2")
            }
            DiscrepancyError::Functional(e) => write!(f, "{e}"),
            DiscrepancyError::InvalidExponent => write!(f, "norm power must be positive"),
        }
    }
}

impl core::error::Error for DiscrepancyError {}

impl From<FunctionalError> for DiscrepancyError {
    fn from(e: FunctionalError) -> Self {
        DiscrepancyError::Functional(e)
    }
}

impl Discrepancy {
    /// `||z - y||^p`; panics unless `p > 0`.
    pub fn power_norm(p: f64) -> Self {
        assert!(p > 0.0 && p.is_finite(), "norm power must be positive");
        Discrepancy {
            kind: DiscrepancyKind::PowerNorm { p },
        }
    }

    pub fn bregman_first(j: ConvexFunctional) -> Self {
        Discrepancy {
            kind: DiscrepancyKind::BregmanFirst { j },
        }
    }

    pub fn bregman_second(j: ConvexFunctional) -> Self {
        Discrepancy {
            kind: DiscrepancyKind::BregmanSecond { j },
        }
    }

    pub fn coordinate_mismatch() -> Self {
        Discrepancy {
            kind: DiscrepancyKind::CoordinateMismatch,
        }
    }

    /// Kullback-Leibler discrepancy on `dim`-cell uniform grids:
    /// `rho_1` of the negative entropy.
    pub fn kl(dim: usize) -> Self {
        Self::bregman_first(ConvexFunctional::entropy(dim))
    }

    #[cfg(test)]
    pub(crate) fn broken_at_diagonal() -> Self {
        Discrepancy {
            kind: DiscrepancyKind::BrokenAtDiagonal,
        }
    }

    /// Parse an external id: `sqnorm`, `pnorm:p`, `bregman1:J`, `bregman2:J`,
    /// `mismatch2d`, `kl`.
    pub fn from_id(id: &str, dim: usize) -> Option<Self> {
        if id == "sqnorm" {
            return Some(Self::power_norm(2.0));
        }
        if id == "mismatch2d" {
            return Some(Self::coordinate_mismatch());
        }
        if id == "kl" {
            return Some(Self::kl(dim));
        }
        if let Some(p) = id.strip_prefix("pnorm:") {
            let p: f64 = p.parse().ok()?;
            if p > 0.0 && p.is_finite() {
                return Some(Self::power_norm(p));
            }
            return None;
        }
        if let Some(j) = id.strip_prefix("bregman1:") {
            return Some(Self::bregman_first(ConvexFunctional::from_id(j, dim)?));
        }
        if let Some(j) = id.strip_prefix("bregman2:") {
            return Some(Self::bregman_second(ConvexFunctional::from_id(j, dim)?));
        }
        None
    }

    pub fn id(&self) -> String {
        match &self.kind {
            DiscrepancyKind::PowerNorm { p } if *p == 2.0 => String::from("sqnorm"),
            DiscrepancyKind::PowerNorm { p } => alloc::format!("pnorm:{p}"),
            DiscrepancyKind::BregmanFirst { j } => alloc::format!("bregman1:{}", j.id()),
            DiscrepancyKind::BregmanSecond { j } => alloc::format!("bregman2:{}", j.id()),
            DiscrepancyKind::CoordinateMismatch => String::from("mismatch2d"),
            #[cfg(test)]
            DiscrepancyKind::BrokenAtDiagonal => String::from("broken"),
        }
    }

    pub fn eval(&self, z: &Point, y: &Point) -> Result<ExtReal, DiscrepancyError> {
        if z.dim() != y.dim() {
            return Err(DiscrepancyError::DimensionMismatch);
        }
        match &self.kind {
            DiscrepancyKind::PowerNorm { p } => {
                let d = z.dist(y);
                let v = if *p == 2.0 { d * d } else { libm::pow(d, *p) };
                Ok(ExtReal::Finite(v))
            }
            DiscrepancyKind::BregmanFirst { j } => Ok(j.bregman(z, y)?),
            DiscrepancyKind::BregmanSecond { j } => Ok(j.bregman(y, z)?),
            DiscrepancyKind::CoordinateMismatch => {
                if z.dim() != 2 {
                    return Err(DiscrepancyError::NotTwoDimensional);
                }
                let differing = z
                    .as_slice()
                    .iter()
                    .zip(y.as_slice())
                    .filter(|(a, b)| a != b)
                    .count();
                Ok(ExtReal::Finite(if differing <= 1 { 0.0 } else { 1.0 }))
            }
            #[cfg(test)]
            DiscrepancyKind::BrokenAtDiagonal => Ok(ExtReal::Finite(z.dist(y) + 1.0)),
        }
    }

    /// Pointwise approximation of `z in dom rho(., y)`: finite value and,
    /// for Bregman kinds, the structure the slot requires.
    pub fn dom_first(&self, z: &Point) -> bool {
        match &self.kind {
            DiscrepancyKind::PowerNorm { .. } => true,
            DiscrepancyKind::BregmanFirst { j } => j.in_domain(z),
            DiscrepancyKind::BregmanSecond { j } => j.gradient(z).is_some(),
            DiscrepancyKind::CoordinateMismatch => z.dim() == 2,
            #[cfg(test)]
            DiscrepancyKind::BrokenAtDiagonal => true,
        }
    }

    /// The exponent when this is a power of the norm.
    pub fn as_power_norm(&self) -> Option<f64> {
        match &self.kind {
            DiscrepancyKind::PowerNorm { p } => Some(*p),
            _ => None,
        }
    }

    /// Declared symmetry flag: `rho(z, y) = rho(y, z)` for all arguments.
    pub fn symmetric(&self) -> bool {
        match &self.kind {
            DiscrepancyKind::PowerNorm { .. } | DiscrepancyKind::CoordinateMismatch => true,
            // the Bregman distance of a quadratic is symmetric
            DiscrepancyKind::BregmanFirst { j } | DiscrepancyKind::BregmanSecond { j } => {
                j.id() == "squared"
            }
            #[cfg(test)]
            DiscrepancyKind::BrokenAtDiagonal => true,
        }
    }

    /// Box from which probe points with defined discrepancy values should be
    /// drawn (entropy-based discrepancies need strictly positive data).
    pub fn probe_interval(&self) -> (f64, f64) {
        match &self.kind {
            DiscrepancyKind::BregmanFirst { j } | DiscrepancyKind::BregmanSecond { j } => {
                j.probe_interval()
            }
            _ => (-2.0, 2.0),
        }
    }

    /// Search for distinct points at zero discrepancy. The scheme axioms do
    /// not require separation; this probe only reports what it finds.
    pub fn separates_points_probe(
        &self,
        dim: usize,
        trials: usize,
        seed: u64,
    ) -> Option<(Point, Point)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = self.probe_interval();
        // deterministic candidates first: pairs differing in one coordinate
        if dim >= 2 {
            let z = random_point(&mut rng, dim, lo, hi);
            let mut w = z.as_slice().to_vec();
            w[dim - 1] += 1.0;
            let w = Point::new(w).expect("finite candidate");
            if self.eval(&z, &w) == Ok(ExtReal::Finite(0.0)) {
                return Some((z, w));
            }
        }
        for _ in 0..trials {
            let z = random_point(&mut rng, dim, lo, hi);
            let y = random_point(&mut rng, dim, lo, hi);
            if z.dist(&y) >= 1e-3 && self.eval(&z, &y) == Ok(ExtReal::Finite(0.0)) {
                return Some((z, y));
            }
        }
        None
    }
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_norm_examples() {
        let d2 = Discrepancy::power_norm(2.0);
        let v = d2
            .eval(&Point::from_slice(&[1.0, 0.0]).unwrap(), &Point::zeros(2))
            .unwrap();
        assert_eq!(v, ExtReal::Finite(1.0));
        let same = Point::from_slice(&[3.0, 4.0]).unwrap();
        assert_eq!(d2.eval(&same, &same), Ok(ExtReal::Finite(0.0)));
        let d1 = Discrepancy::power_norm(1.0);
        let v = d1
            .eval(&Point::from_slice(&[3.0, 4.0]).unwrap(), &Point::zeros(2))
            .unwrap();
        assert_eq!(v, ExtReal::Finite(5.0));
    }

    #[test]
    fn bregman_orientations() {
        let q = ConvexFunctional::quartic();
        let rho1 = Discrepancy::bregman_first(q.clone());
        let rho2 = Discrepancy::bregman_second(q);
        let z = Point::scalar(0.0);
        let y = Point::scalar(1.0);
        // D(0, 1) = 3 and D(1, 0) = 1
        assert_eq!(rho1.eval(&z, &y), Ok(ExtReal::Finite(3.0)));
        assert_eq!(rho2.eval(&z, &y), Ok(ExtReal::Finite(1.0)));
        assert_eq!(rho2.eval(&y, &y), Ok(ExtReal::Finite(0.0)));
        let sq1 = Discrepancy::bregman_first(ConvexFunctional::squared());
        assert_eq!(
            sq1.eval(&Point::scalar(2.0), &Point::scalar(0.0)),
            Ok(ExtReal::Finite(2.0))
        );
    }

    #[test]
    fn mismatch_rule_and_dimension_guard() {
        let d = Discrepancy::coordinate_mismatch();
        let o = Point::zeros(2);
        assert_eq!(
            d.eval(&o, &Point::from_slice(&[0.0, 5.0]).unwrap()),
            Ok(ExtReal::Finite(0.0))
        );
        assert_eq!(
            d.eval(&o, &Point::from_slice(&[1.0, 1.0]).unwrap()),
            Ok(ExtReal::Finite(1.0))
        );
        let same = Point::from_slice(&[2.0, 3.0]).unwrap();
        assert_eq!(d.eval(&same, &same), Ok(ExtReal::Finite(0.0)));
        assert_eq!(
            d.eval(&Point::scalar(0.0), &Point::scalar(0.0)),
            Err(DiscrepancyError::NotTwoDimensional)
        );
    }

    #[test]
    fn mismatch_violates_quasi_triangle_inequality() {
        let d = Discrepancy::coordinate_mismatch();
        let a = Point::zeros(2);
        let b = Point::from_slice(&[1.0, 0.0]).unwrap();
        let c = Point::from_slice(&[1.0, 1.0]).unwrap();
        assert_eq!(d.eval(&a, &c), Ok(ExtReal::Finite(1.0)));
        assert_eq!(d.eval(&a, &b), Ok(ExtReal::Finite(0.0)));
        assert_eq!(d.eval(&b, &c), Ok(ExtReal::Finite(0.0)));
    }

    #[test]
    fn mismatch_does_not_separate_points() {
        let d = Discrepancy::coordinate_mismatch();
        let witness = d.separates_points_probe(2, 100, 3);
        let (z, y) = witness.expect("mismatch2d admits zero-discrepancy distinct pairs");
        assert!(z.dist(&y) > 0.0);
        assert_eq!(d.eval(&z, &y), Ok(ExtReal::Finite(0.0)));
    }

    #[test]
    fn id_round_trip() {
        for id in ["sqnorm", "pnorm:1.5", "bregman1:quartic", "bregman2:hinge2", "mismatch2d"] {
            let d = Discrepancy::from_id(id, 2).unwrap();
            assert_eq!(d.id(), id);
        }
        // "kl" is an alias for the entropy Bregman discrepancy
        assert_eq!(Discrepancy::from_id("kl", 2).unwrap().id(), "bregman1:entropy");
        assert!(Discrepancy::from_id("pnorm:-1", 2).is_none());
        assert!(Discrepancy::from_id("bregman1:unknown", 2).is_none());
    }
}
