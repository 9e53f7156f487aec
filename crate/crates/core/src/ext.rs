//! Nonnegative extended reals, the value space of discrepancy and
//! regularization functionals.
//!
//! Infinity is a distinguished enum variant rather than `f64::INFINITY`, so
//! that an indeterminate `inf - inf` is structurally unrepresentable and has
//! to be rejected explicitly. Finite values are validated on construction:
//! nonnegative and never NaN.

use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

/// A value in `[0, +inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtRealError {
    /// Construction from NaN or a negative value.
    InvalidValue,
    /// `inf - inf` has no meaningful value.
    IndeterminateDifference,
    /// Subtraction would leave `[0, +inf]`.
    NegativeDifference,
}

impl fmt::Display for ExtRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRealError::InvalidValue => write!(f, "extended real must be nonnegative and not NaN"),
            ExtRealError::IndeterminateDifference => write!(f, "inf - inf is rejected"),
            ExtRealError::NegativeDifference => write!(f, "difference leaves [0, inf]"),
        }
    }
}

impl core::error::Error for ExtRealError {}

impl ExtReal {
    /// Validated finite value; rejects NaN, infinities and negatives.
    pub fn finite(value: f64) -> Result<Self, ExtRealError> {
        if value.is_finite() && value >= 0.0 {
            Ok(ExtReal::Finite(value))
        } else {
            Err(ExtRealError::InvalidValue)
        }
    }

    pub const fn zero() -> Self {
        ExtReal::Finite(0.0)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    /// The finite value, if any.
    pub fn value(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::Infinity => None,
        }
    }

    /// Scale by a strictly positive factor (so `0 * inf` cannot arise).
    pub fn scale(self, factor: f64) -> Self {
        debug_assert!(factor > 0.0 && factor.is_finite());
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * factor),
            ExtReal::Infinity => ExtReal::Infinity,
        }
    }

    /// Subtraction that stays inside `[0, +inf]`. `inf - inf` and results
    /// that would be negative are errors, never silent.
    pub fn checked_sub(self, other: Self) -> Result<Self, ExtRealError> {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => Err(ExtRealError::IndeterminateDifference),
            (ExtReal::Infinity, ExtReal::Finite(_)) => Ok(ExtReal::Infinity),
            (ExtReal::Finite(_), ExtReal::Infinity) => Err(ExtRealError::NegativeDifference),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                if a >= b {
                    Ok(ExtReal::Finite(a - b))
                } else {
                    Err(ExtRealError::NegativeDifference)
                }
            }
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinity,
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Infinity, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}
