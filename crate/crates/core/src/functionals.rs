//! Convex functionals `J` and the Bregman distances they induce.
//!
//! Every built-in carries its value, its gradient where the subdifferential
//! is single valued, and a domain predicate. The induced Bregman distance is
//!
//! ```text
//! D_J(z, y) = J(z) - J(y) - <grad J(y), z - y>
//! ```
//!
//! which is nonnegative for convex `J` and vanishes at `z = y`. `J` itself is
//! allowed to take negative finite values (the negative entropy has minimum
//! -1 at the constant one) while the induced distance stays in `[0, inf]`.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ext::ExtReal;
use crate::point::Point;

#[derive(Debug, Clone, PartialEq)]
enum JKind {
    /// `J(x) = sum x_i^4`, strictly convex.
    Quartic,
    /// `J(x) = 1/2 sum x_i^2`, strictly convex.
    Squared,
    /// `J(y) = sum w_i (y_i log y_i - y_i)` on nonnegative vectors,
    /// strictly convex on its domain; gradient `w_i log y_i` needs `y_i > 0`.
    Entropy { weights: Vec<f64> },
    /// `J(x) = sum max(|x_i| - 1, 0)^2`, convex and differentiable but flat
    /// on the unit box, hence not strictly convex.
    HingeSquared,
}

/// A convex functional with single-valued gradient where defined.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexFunctional {
    kind: JKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalError {
    /// Gradient requested at a point where the subdifferential is not a
    /// single point (or is empty).
    SubdifferentialNotSingleValued,
    DimensionMismatch,
    /// Entropy weights must be positive and match the dimension.
    BadWeights,
}

impl fmt::Display for FunctionalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalError::SubdifferentialNotSingleValued => {
                write!(f, "subdifferential not single-valued")
            }
            FunctionalError::DimensionMismatch => write!(f, "dimension mismatch"),
            FunctionalError::BadWeights => write!(f, "weights must be positive, one per coordinate"),
        }
    }
}

impl core::error::Error for FunctionalError {}

fn quartic(v: f64) -> f64 {
    let s = v * v;
    s * s
}

impl ConvexFunctional {
    pub fn quartic() -> Self {
        ConvexFunctional { kind: JKind::Quartic }
    }

    pub fn squared() -> Self {
        ConvexFunctional { kind: JKind::Squared }
    }

    /// Negative entropy with uniform quadrature weights `1/dim`, so an
    /// n-vector models an n-cell step function on a uniform grid of `[0,1]`.
    pub fn entropy(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        ConvexFunctional {
            kind: JKind::Entropy {
                weights: alloc::vec![w; dim],
            },
        }
    }

    /// Negative entropy with explicit quadrature weights (cell lengths of a
    /// nonuniform grid).
    pub fn entropy_weighted(weights: Vec<f64>) -> Result<Self, FunctionalError> {
        if weights.is_empty() || weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(FunctionalError::BadWeights);
        }
        Ok(ConvexFunctional {
            kind: JKind::Entropy { weights },
        })
    }

    pub fn hinge_squared() -> Self {
        ConvexFunctional { kind: JKind::HingeSquared }
    }

    /// Look up a built-in by its external id.
    pub fn from_id(id: &str, dim: usize) -> Option<Self> {
        match id {
            "quartic" => Some(Self::quartic()),
            "squared" => Some(Self::squared()),
            "entropy" => Some(Self::entropy(dim)),
            "hinge2" => Some(Self::hinge_squared()),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            JKind::Quartic => "quartic",
            JKind::Squared => "squared",
            JKind::Entropy { .. } => "entropy",
            JKind::HingeSquared => "hinge2",
        }
    }

    pub fn strictly_convex(&self) -> bool {
        !matches!(self.kind, JKind::HingeSquared)
    }

    /// `J(x)`; `None` encodes the value `+inf` outside the effective domain.
    pub fn value(&self, x: &Point) -> Option<f64> {
        match &self.kind {
            JKind::Quartic => Some(x.as_slice().iter().map(|&v| quartic(v)).sum()),
            JKind::Squared => Some(0.5 * x.inner(x)),
            JKind::Entropy { weights } => {
                if weights.len() != x.dim() {
                    return None;
                }
                let mut s = 0.0;
                for (&v, &w) in x.as_slice().iter().zip(weights) {
                    if v < 0.0 {
                        return None;
                    }
                    if v > 0.0 {
                        s += w * (v * libm::log(v) - v);
                    }
                    // 0 log 0 - 0 = 0 by convention
                }
                Some(s)
            }
            JKind::HingeSquared => Some(
                x.as_slice()
                    .iter()
                    .map(|&v| {
                        let e = (if v < 0.0 { -v } else { v }) - 1.0;
                        if e > 0.0 {
                            e * e
                        } else {
                            0.0
                        }
                    })
                    .sum(),
            ),
        }
    }

    pub fn in_domain(&self, x: &Point) -> bool {
        self.value(x).is_some()
    }

    /// Single-valued gradient, `None` where it does not exist.
    pub fn gradient(&self, x: &Point) -> Option<Point> {
        match &self.kind {
            JKind::Quartic => Some(
                Point::new(x.as_slice().iter().map(|&v| 4.0 * v * v * v).collect())
                    .expect("finite gradient"),
            ),
            JKind::Squared => Some(x.clone()),
            JKind::Entropy { weights } => {
                if weights.len() != x.dim() {
                    return None;
                }
                let mut g = Vec::with_capacity(x.dim());
                for (&v, &w) in x.as_slice().iter().zip(weights) {
                    if v <= 0.0 {
                        return None;
                    }
                    g.push(w * libm::log(v));
                }
                Some(Point::new(g).expect("finite gradient"))
            }
            JKind::HingeSquared => Some(
                Point::new(
                    x.as_slice()
                        .iter()
                        .map(|&v| {
                            let a = if v < 0.0 { -v } else { v };
                            if a > 1.0 {
                                2.0 * (a - 1.0) * if v < 0.0 { -1.0 } else { 1.0 }
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                )
                .expect("finite gradient"),
            ),
        }
    }

    /// Bregman distance `D_J(z, y)`. Requires a single-valued gradient at
    /// `y`; returns infinity when `z` lies outside the domain of `J`.
    pub fn bregman(&self, z: &Point, y: &Point) -> Result<ExtReal, FunctionalError> {
        if z.dim() != y.dim() {
            return Err(FunctionalError::DimensionMismatch);
        }
        let grad_y = self
            .gradient(y)
            .ok_or(FunctionalError::SubdifferentialNotSingleValued)?;
        let jy = self
            .value(y)
            .ok_or(FunctionalError::SubdifferentialNotSingleValued)?;
        let jz = match self.value(z) {
            Some(v) => v,
            None => return Ok(ExtReal::Infinity),
        };
        let raw = jz - jy - grad_y.inner(&z.sub(y));
        debug_assert!(raw > -1e-9, "Bregman distance of a convex J went negative: {raw}");
        Ok(ExtReal::Finite(raw.max(0.0)))
    }

    /// Box from which random probes for this functional should be drawn so
    /// that value and gradient are defined.
    pub fn probe_interval(&self) -> (f64, f64) {
        match self.kind {
            JKind::Entropy { .. } => (0.05, 3.0),
            _ => (-2.0, 2.0),
        }
    }
}

/// Outcome of a search for distinct points at zero Bregman distance.
#[derive(Debug, Clone, PartialEq)]
pub enum DefinitenessOutcome {
    /// `y1 != y2` with `D_J(y1, y2) = 0`: `J` cannot be strictly convex.
    WitnessFound {
        y1: Point,
        y2: Point,
        bregman: f64,
        separation: f64,
    },
    NoneFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefinitenessReport {
    pub outcome: DefinitenessOutcome,
    pub trials_run: usize,
}

/// Search for `y1 != y2` (separation at least `1e-3`) with
/// `D_J(y1, y2) <= 1e-12`.
///
/// For functionals that declare themselves not strictly convex a guided
/// phase samples pairs from the flat unit box first (blind sampling can miss
/// a flat set); the canonical pair `(0.5, ..., 0.5)` vs `(-0.5, ..., -0.5)`
/// is tried before any random draw so the reported witness is deterministic.
pub fn definiteness_probe(
    j: &ConvexFunctional,
    dim: usize,
    trials: usize,
    seed: u64,
) -> DefinitenessReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = j.probe_interval();
    let mut run = 0usize;

    let check = |y1: &Point, y2: &Point, run: &mut usize| -> Option<DefinitenessOutcome> {
        *run += 1;
        let sep = y1.dist(y2);
        if sep < 1e-3 {
            return None;
        }
        match j.bregman(y1, y2) {
            Ok(ExtReal::Finite(d)) if d <= 1e-12 => Some(DefinitenessOutcome::WitnessFound {
                y1: y1.clone(),
                y2: y2.clone(),
                bregman: d,
                separation: sep,
            }),
            _ => None,
        }
    };

    if !j.strictly_convex() {
        let y1 = Point::new(alloc::vec![0.5; dim]).expect("finite candidate");
        let y2 = Point::new(alloc::vec![-0.5; dim]).expect("finite candidate");
        if let Some(outcome) = check(&y1, &y2, &mut run) {
            return DefinitenessReport { outcome, trials_run: run };
        }
        // guided phase on the flat box
        for _ in 0..trials / 4 {
            let y1 = random_point(&mut rng, dim, -0.75, 0.75);
            let y2 = random_point(&mut rng, dim, -0.75, 0.75);
            if let Some(outcome) = check(&y1, &y2, &mut run) {
                return DefinitenessReport { outcome, trials_run: run };
            }
        }
    }

    while run < trials {
        let y1 = random_point(&mut rng, dim, lo, hi);
        let y2 = random_point(&mut rng, dim, lo, hi);
        if let Some(outcome) = check(&y1, &y2, &mut run) {
            return DefinitenessReport { outcome, trials_run: run };
        }
    }
    DefinitenessReport {
        outcome: DefinitenessOutcome::NoneFound,
        trials_run: run,
    }
}

pub(crate) fn random_point<R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Point {
    Point::new((0..dim).map(|_| rng.gen_range(lo..hi)).collect()).expect("finite sample")
}
