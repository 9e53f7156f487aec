//! Finite-dimensional real vectors, the elements of the solution space and
//! of discretized data spaces.

use alloc::vec::Vec;
use core::fmt;

/// An element of `R^n` with all coordinates finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointError {
    Empty,
    NonFinite,
}

impl fmt::Display for PointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointError::Empty => write!(f, "point must have at least one coordinate"),
            PointError::NonFinite => write!(f, "point coordinates must be finite"),
        }
    }
}

impl core::error::Error for PointError {}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, PointError> {
        if coords.is_empty() {
            return Err(PointError::Empty);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(PointError::NonFinite);
        }
        Ok(Point { coords })
    }

    /// 1-D point.
    pub fn scalar(x: f64) -> Self {
        Point::new(alloc::vec![x]).expect("finite scalar")
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self, PointError> {
        Point::new(coords.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim > 0);
        Point {
            coords: alloc::vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    /// Value of the single coordinate; panics unless `dim() == 1`.
    pub fn as_scalar(&self) -> f64 {
        assert_eq!(self.coords.len(), 1, "point is not one-dimensional");
        self.coords[0]
    }

    pub fn inner(&self, other: &Point) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.inner(self))
    }

    pub fn dist(&self, other: &Point) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let sq: f64 = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        libm::sqrt(sq)
    }

    pub fn add(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point {
            coords: self.coords.iter().map(|a| a * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid() {
        assert_eq!(Point::new(alloc::vec![]), Err(PointError::Empty));
        assert_eq!(
            Point::new(alloc::vec![1.0, f64::NAN]),
            Err(PointError::NonFinite)
        );
        assert_eq!(
            Point::new(alloc::vec![f64::INFINITY]),
            Err(PointError::NonFinite)
        );
    }

    #[test]
    fn basic_ops() {
        let a = Point::from_slice(&[3.0, 4.0]).unwrap();
        let b = Point::zeros(2);
        assert_eq!(a.dist(&b), 5.0);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.inner(&a), 25.0);
        assert_eq!(a.axpy(2.0, &a).as_slice(), &[9.0, 12.0]);
    }
}
