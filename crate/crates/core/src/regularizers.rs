//! Regularization functionals on the solution space: value, one-sided
//! directional derivatives in closed form, and projections onto sublevel
//! sets where those are cheap (used by the constrained solvers).

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ext::ExtReal;
use crate::point::Point;

#[derive(Debug, Clone, PartialEq)]
enum RegKind {
    /// `R(x) = ||x||^2`.
    SqNorm,
    /// `R(x) = sum |x_i|`.
    L1,
    /// `R(x) = sum |x_i + 1|`; in one dimension the shifted absolute value.
    AbsShift,
    /// Inner regularizer plus the indicator of the box `[lo, hi]^n`.
    Boxed { inner: Box<Regularizer>, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regularizer {
    kind: RegKind,
}

impl Regularizer {
    pub fn sq_norm() -> Self {
        Regularizer { kind: RegKind::SqNorm }
    }

    pub fn l1() -> Self {
        Regularizer { kind: RegKind::L1 }
    }

    /// The `|x + 1|` regularizer (solutions should be close to -1).
    pub fn abs_shift() -> Self {
        Regularizer { kind: RegKind::AbsShift }
    }

    /// `inner + indicator([lo, hi]^n)`: infinite off the box.
    pub fn boxed(inner: Regularizer, lo: f64, hi: f64) -> Self {
        assert!(lo < hi);
        Regularizer {
            kind: RegKind::Boxed { inner: Box::new(inner), lo, hi },
        }
    }

    /// Look up by external id: `sqnorm`, `l1`, `abs_shift`.
    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "sqnorm" => Some(Self::sq_norm()),
            "l1" => Some(Self::l1()),
            "abs_shift" => Some(Self::abs_shift()),
            _ => None,
        }
    }

    pub fn id(&self) -> String {
        match &self.kind {
            RegKind::SqNorm => String::from("sqnorm"),
            RegKind::L1 => String::from("l1"),
            RegKind::AbsShift => String::from("abs_shift"),
            RegKind::Boxed { inner, lo, hi } => {
                alloc::format!("box({},{lo},{hi})", inner.id())
            }
        }
    }

    pub fn eval(&self, x: &Point) -> ExtReal {
        match &self.kind {
            RegKind::SqNorm => ExtReal::Finite(x.inner(x)),
            RegKind::L1 => ExtReal::Finite(x.as_slice().iter().map(|v| v.max(-v)).sum()),
            RegKind::AbsShift => ExtReal::Finite(
                x.as_slice().iter().map(|v| (v + 1.0).max(-(v + 1.0))).sum(),
            ),
            RegKind::Boxed { inner, lo, hi } => {
                if x.as_slice().iter().any(|&v| v < *lo || v > *hi) {
                    ExtReal::Infinity
                } else {
                    inner.eval(x)
                }
            }
        }
    }

    /// One-sided directional derivative `R'(x; v)`, `None` where `R` is
    /// infinite on every neighborhood in direction `v`.
    pub fn directional_derivative(&self, x: &Point, v: &Point) -> Option<f64> {
        assert_eq!(x.dim(), v.dim());
        match &self.kind {
            RegKind::SqNorm => Some(2.0 * x.inner(v)),
            RegKind::L1 => Some(abs_directional(x.as_slice(), v.as_slice(), 0.0)),
            RegKind::AbsShift => Some(abs_directional(x.as_slice(), v.as_slice(), 1.0)),
            RegKind::Boxed { inner, lo, hi } => {
                // moving outward from the boundary (or starting outside)
                // leaves the domain immediately
                for (&xi, &vi) in x.as_slice().iter().zip(v.as_slice()) {
                    if xi < *lo || xi > *hi {
                        return None;
                    }
                    if (xi == *lo && vi < 0.0) || (xi == *hi && vi > 0.0) {
                        return None;
                    }
                }
                inner.directional_derivative(x, v)
            }
        }
    }

    /// A point of the sublevel set `{R <= tau}` close to `x`; `None` when no
    /// cheap projection is available.
    pub fn sublevel_projection(&self, x: &Point, tau: f64) -> Option<Point> {
        if tau < 0.0 {
            return None;
        }
        match &self.kind {
            RegKind::SqNorm => {
                // Euclidean ball of radius sqrt(tau)
                let n = x.norm();
                let r = libm::sqrt(tau);
                if n <= r {
                    Some(x.clone())
                } else {
                    Some(x.scale(r / n))
                }
            }
            RegKind::L1 => Some(l1_ball_projection(x.as_slice(), tau)),
            RegKind::AbsShift => {
                // shift, project onto the l1 ball, shift back
                let u: Vec<f64> = x.as_slice().iter().map(|v| v + 1.0).collect();
                let p = l1_ball_projection(&u, tau);
                Some(
                    Point::new(p.as_slice().iter().map(|v| v - 1.0).collect())
                        .expect("finite projection"),
                )
            }
            RegKind::Boxed { .. } => None,
        }
    }

    /// Proximal map `argmin_x (1/2)||x - v||^2 + s R(x)`; `None` when no
    /// closed form is available.
    pub fn prox(&self, v: &Point, s: f64) -> Option<Point> {
        debug_assert!(s >= 0.0);
        match &self.kind {
            RegKind::SqNorm => Some(v.scale(1.0 / (1.0 + 2.0 * s))),
            RegKind::L1 => Some(soft_threshold(v.as_slice(), s, 0.0)),
            RegKind::AbsShift => Some(soft_threshold(v.as_slice(), s, 1.0)),
            RegKind::Boxed { .. } => None,
        }
    }

    /// Global minimizer of `R` in the given dimension, where unique.
    pub fn global_minimizer(&self, dim: usize) -> Option<Point> {
        match &self.kind {
            RegKind::SqNorm | RegKind::L1 => Some(Point::zeros(dim)),
            RegKind::AbsShift => Some(Point::new(alloc::vec![-1.0; dim]).expect("finite point")),
            RegKind::Boxed { inner, lo, hi } => {
                let m = inner.global_minimizer(dim)?;
                Some(
                    Point::new(m.as_slice().iter().map(|v| v.clamp(*lo, *hi)).collect())
                        .expect("finite point"),
                )
            }
        }
    }
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// One-sided derivative of `sum |x_i + shift|` in direction `v`: smooth
/// coordinates contribute `sign(x_i + shift) v_i`, kinks contribute `|v_i|`.
fn abs_directional(x: &[f64], v: &[f64], shift: f64) -> f64 {
    x.iter()
        .zip(v)
        .map(|(&xi, &vi)| {
            let u = xi + shift;
            if u > 0.0 {
                vi
            } else if u < 0.0 {
                -vi
            } else {
                vi.max(-vi)
            }
        })
        .sum()
}

/// Proximal map of `s * sum |x_i + shift|`: shift, shrink toward zero by
/// `s`, shift back.
fn soft_threshold(v: &[f64], s: f64, shift: f64) -> Point {
    Point::new(
        v.iter()
            .map(|&vi| {
                let u = vi + shift;
                let m = (u.max(-u) - s).max(0.0);
                (if u < 0.0 { -m } else { m }) - shift
            })
            .collect(),
    )
    .expect("finite prox")
}

/// Euclidean projection onto `{u : sum |u_i| <= tau}` (simplex-threshold
/// method: sort the magnitudes, find the soft-threshold level).
fn l1_ball_projection(x: &[f64], tau: f64) -> Point {
    let l1: f64 = x.iter().map(|v| v.max(-v)).sum();
    if l1 <= tau {
        return Point::from_slice(x).expect("finite input");
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.max(-v)).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = None;
    for (k, &m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - tau) / (k as f64 + 1.0);
        if t >= m {
            break;
        }
        theta = Some(t);
    }
    // no magnitude clears its threshold only when tau = 0: project to zero
    let Some(theta) = theta else {
        return Point::zeros(x.len());
    };
    Point::new(
        x.iter()
            .map(|&v| {
                let m = (v.max(-v) - theta).max(0.0);
                if v < 0.0 {
                    -m
                } else {
                    m
                }
            })
            .collect(),
    )
    .expect("finite projection")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directional_derivatives_at_kinks() {
        let r = Regularizer::abs_shift();
        // |x+1| at x=0, v=+1: slope 1
        assert_eq!(
            r.directional_derivative(&Point::scalar(0.0), &Point::scalar(1.0)),
            Some(1.0)
        );
        // kink case: one-sided limit from the right is still 1
        assert_eq!(
            r.directional_derivative(&Point::scalar(-1.0), &Point::scalar(1.0)),
            Some(1.0)
        );
        assert_eq!(
            r.directional_derivative(&Point::scalar(-1.0), &Point::scalar(-1.0)),
            Some(1.0)
        );
        // smooth point, negative side
        assert_eq!(
            r.directional_derivative(&Point::scalar(-2.0), &Point::scalar(1.0)),
            Some(-1.0)
        );
    }

    #[test]
    fn sqnorm_stationary_at_zero() {
        let r = Regularizer::sq_norm();
        assert_eq!(
            r.directional_derivative(&Point::zeros(2), &Point::from_slice(&[3.0, -1.0]).unwrap()),
            Some(0.0)
        );
    }

    #[test]
    fn l1_projection_feasible_and_idempotent() {
        let r = Regularizer::l1();
        let x = Point::from_slice(&[2.0, -3.0, 0.5]).unwrap();
        let p = r.sublevel_projection(&x, 1.5).unwrap();
        let val = p.as_slice().iter().map(|v| v.abs()).sum::<f64>();
        assert!(val <= 1.5 + 1e-10, "value {val}");
        // already feasible points are fixed
        let q = r.sublevel_projection(&p, 1.5).unwrap();
        assert!(p.dist(&q) < 1e-12);
    }

    #[test]
    fn l1_projection_onto_degenerate_ball() {
        // tau = 0: the only feasible point is the origin
        let r = Regularizer::l1();
        let x = Point::from_slice(&[2.0, -3.0, 0.5]).unwrap();
        let p = r.sublevel_projection(&x, 0.0).unwrap();
        assert_eq!(p, Point::zeros(3));
        let s = Regularizer::abs_shift();
        let p = s.sublevel_projection(&x, 0.0).unwrap();
        assert_eq!(p, Point::new(alloc::vec![-1.0; 3]).unwrap());
    }

    #[test]
    fn boxed_is_infinite_off_box() {
        let r = Regularizer::boxed(Regularizer::l1(), -1.0, 1.0);
        assert_eq!(r.eval(&Point::scalar(2.0)), ExtReal::Infinity);
        assert_eq!(r.eval(&Point::scalar(0.5)), ExtReal::Finite(0.5));
        // outward direction at the boundary has no finite one-sided derivative
        assert_eq!(
            r.directional_derivative(&Point::scalar(1.0), &Point::scalar(1.0)),
            None
        );
        assert_eq!(
            r.directional_derivative(&Point::scalar(1.0), &Point::scalar(-1.0)),
            Some(-1.0)
        );
    }
}
