//! Exact step functions on `[0, 1]`.
//!
//! A step function is a list of strictly increasing breakpoints from 0 to 1
//! and one value per cell. All integrals over step functions are finite sums
//! over a merged breakpoint grid, so every quantity in the [`crate::kl`]
//! module is computed exactly (up to f64 rounding of the summands), not by
//! quadrature.
//!
//! Functions are kept in canonical form: adjacent cells with equal values are
//! merged on construction, which makes equality of canonical forms the right
//! notion of "equal almost everywhere" for this model.

use alloc::vec::Vec;
use core::fmt;

/// Piecewise constant function on `[0, 1]`; values may be signed.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepFnError {
    /// Breakpoints must start at 0, end at 1 and be strictly increasing.
    BadBreakpoints,
    /// One value per cell is required.
    BadValueCount,
    NonFinite,
    /// A nonnegative function was required.
    NegativeValue,
}

impl fmt::Display for StepFnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepFnError::BadBreakpoints => {
                write!(f, "breakpoints must be strictly increasing from 0 to 1")
            }
            StepFnError::BadValueCount => write!(f, "need exactly one value per cell"),
            StepFnError::NonFinite => write!(f, "values and breakpoints must be finite"),
            StepFnError::NegativeValue => write!(f, "function must be nonnegative"),
        }
    }
}

impl core::error::Error for StepFnError {}

impl StepFn {
    /// Signed step function in canonical form.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, StepFnError> {
        if breakpoints.len() < 2 || breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(StepFnError::BadBreakpoints);
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(StepFnError::NonFinite);
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StepFnError::BadBreakpoints);
        }
        if values.len() != breakpoints.len() - 1 {
            return Err(StepFnError::BadValueCount);
        }
        Ok(canonicalize(breakpoints, values))
    }

    /// Nonnegative step function (the `L^1` data model).
    pub fn nonnegative(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, StepFnError> {
        if values.iter().any(|&v| v < 0.0) {
            return Err(StepFnError::NegativeValue);
        }
        StepFn::new(breakpoints, values)
    }

    pub fn constant(value: f64) -> Self {
        StepFn::new(alloc::vec![0.0, 1.0], alloc::vec![value]).expect("finite constant")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Iterate over the cells of the merged grid of `self` and `other`,
    /// yielding `(cell_length, self_value, other_value)`.
    pub fn zip_cells(&self, other: &StepFn) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.cells() + other.cells());
        let (mut i, mut j) = (0usize, 0usize);
        let mut left = 0.0;
        while left < 1.0 {
            let next_a = self.breakpoints[i + 1];
            let next_b = other.breakpoints[j + 1];
            let right = if next_a < next_b { next_a } else { next_b };
            out.push((right - left, self.values[i], other.values[j]));
            if next_a == right {
                i += 1;
            }
            if next_b == right {
                j += 1;
            }
            left = right;
        }
        out
    }

    /// Exact integral of a pointwise combination of `self` and `other`.
    pub fn integrate_with<F: Fn(f64, f64) -> f64>(&self, other: &StepFn, f: F) -> f64 {
        self.zip_cells(other)
            .iter()
            .map(|&(len, a, b)| f(a, b) * len)
            .sum()
    }

    /// Exact integral of a pointwise function of `self`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| f(v) * (w[1] - w[0]))
            .sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.integrate(|v| v.max(-v))
    }

    /// Pointwise sum on the merged grid.
    pub fn add(&self, other: &StepFn) -> StepFn {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFn) -> StepFn {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> StepFn {
        StepFn::new(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
        .expect("finite scale")
    }

    /// Pointwise `clamp(self, lo, hi)`.
    pub fn clamp(&self, lo: f64, hi: f64) -> StepFn {
        StepFn::new(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v.clamp(lo, hi)).collect(),
        )
        .expect("finite clamp")
    }

    /// Cell-wise shift by a constant.
    pub fn shift(&self, c: f64) -> StepFn {
        StepFn::new(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v + c).collect(),
        )
        .expect("finite shift")
    }

    /// Pointwise combination on the merged grid; breakpoints are the exact
    /// union of both grids, no accumulated arithmetic.
    pub fn combine<F: Fn(f64, f64) -> f64>(&self, other: &StepFn, f: F) -> StepFn {
        let mut bps = Vec::with_capacity(self.cells() + other.cells() + 1);
        let mut vals = Vec::with_capacity(self.cells() + other.cells());
        let (mut i, mut j) = (0usize, 0usize);
        bps.push(0.0);
        loop {
            vals.push(f(self.values[i], other.values[j]));
            let next_a = self.breakpoints[i + 1];
            let next_b = other.breakpoints[j + 1];
            let right = if next_a < next_b { next_a } else { next_b };
            bps.push(right);
            if right == 1.0 {
                break;
            }
            if next_a == right {
                i += 1;
            }
            if next_b == right {
                j += 1;
            }
        }
        StepFn::new(bps, vals).expect("combination of valid step functions")
    }
}

fn canonicalize(breakpoints: Vec<f64>, values: Vec<f64>) -> StepFn {
    let mut bps = Vec::with_capacity(breakpoints.len());
    let mut vals = Vec::with_capacity(values.len());
    bps.push(breakpoints[0]);
    for (i, &v) in values.iter().enumerate() {
        if let Some(&last) = vals.last() {
            if last == v {
                // extend the previous cell
                *bps.last_mut().unwrap() = breakpoints[i + 1];
                continue;
            }
        }
        vals.push(v);
        bps.push(breakpoints[i + 1]);
    }
    StepFn {
        breakpoints: bps,
        values: vals,
    }
}

impl fmt::Display for StepFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, v) in self.breakpoints.windows(2).zip(&self.values) {
            writeln!(f, "[{}, {}): {}", w[0], w[1], v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn canonical_merges_equal_cells() {
        let a = StepFn::new(vec![0.0, 0.25, 0.5, 1.0], vec![2.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(a.values(), &[2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(StepFn::new(vec![0.0, 0.5], vec![1.0]).is_err());
        assert!(StepFn::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(StepFn::nonnegative(vec![0.0, 1.0], vec![-0.1]).is_err());
    }

    #[test]
    fn merged_integration() {
        let a = StepFn::new(vec![0.0, 0.5, 1.0], vec![1.0, 3.0]).unwrap();
        let b = StepFn::new(vec![0.0, 0.25, 1.0], vec![2.0, 0.0]).unwrap();
        // integral of a*b = 0.25*2 + 0.25*0 + 0.5*0 = 0.5
        let prod = a.integrate_with(&b, |x, y| x * y);
        assert!((prod - 0.5).abs() < 1e-15);
        assert!((a.sub(&b).l1_norm() - (0.25 * 1.0 + 0.25 * 1.0 + 0.5 * 3.0)).abs() < 1e-15);
    }
}
