//! Axis-aligned search boxes and their corner enumeration.

use rand::Rng;

use crate::error::{Result, SmgoError};
use crate::scalar::Scalar;

/// Largest dimension for which the full corner list is enumerated (2^15 corners).
pub const VERTEX_CAP: usize = 15;

/// Relative factor applied to the box diameter to get the duplicate tolerance.
const DUP_FACTOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> SearchSpace<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.is_empty() {
            return Err(SmgoError::InvalidSpace(
                "dimension must be at least 1".into(),
            ));
        }
        if lower.len() != upper.len() {
            return Err(SmgoError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (d, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(SmgoError::InvalidSpace(format!(
                    "axis {d}: lower {l} must be finite and strictly below upper {u}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lower, upper]` on every axis.
    pub fn cube(lower: T, upper: T, dim: usize) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn diameter(&self) -> T {
        crate::scalar::distance(&self.lower, &self.upper)
    }

    /// Minimum separation between two samples.
    pub fn dup_tolerance(&self) -> T {
        T::lit(DUP_FACTOR) * self.diameter()
    }

    pub fn check(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(SmgoError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        for (d, &v) in x.iter().enumerate() {
            if !(v >= self.lower[d] && v <= self.upper[d]) {
                return Err(SmgoError::OutOfBounds {
                    dim: d,
                    value: v.as_f64(),
                    lower: self.lower[d].as_f64(),
                    upper: self.upper[d].as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.check(x).is_ok()
    }

    pub fn clamp(&self, x: &mut [T]) {
        for (d, v) in x.iter_mut().enumerate() {
            *v = v.max(self.lower[d]).min(self.upper[d]);
        }
    }

    pub fn vertex_count(&self) -> Option<usize> {
        1usize.checked_shl(self.dim() as u32)
    }

    /// Corner number `index` in binary counting order: dimension 0 is the
    /// most significant bit, a set bit selects the upper bound.
    pub fn vertex(&self, index: u64) -> Vec<T> {
        let dim = self.dim();
        (0..dim)
            .map(|d| {
                let bit = (dim - 1 - d) as u32;
                if bit < 64 && (index >> bit) & 1 == 1 {
                    self.upper[d]
                } else {
                    self.lower[d]
                }
            })
            .collect()
    }

    /// All 2^D corners in binary counting order.
    pub fn vertices(&self) -> Result<Vec<Vec<T>>> {
        if self.dim() > VERTEX_CAP {
            return Err(SmgoError::DimensionTooLarge {
                dim: self.dim(),
                cap: VERTEX_CAP,
            });
        }
        Ok((0..1u64 << self.dim()).map(|v| self.vertex(v)).collect())
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| {
                let t = T::lit(rng.gen::<f64>());
                (l + t * (u - l)).min(u)
            })
            .collect()
    }
}
