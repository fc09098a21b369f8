//! Floating-point abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for decision variables, costs and bounds: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Default relative tolerance for bound equality comparisons.
    fn default_eq_tol() -> Self;

    /// Lipschitz estimate used while only one sample exists. Any positive
    /// value works; it must stay resolvable next to typical cost magnitudes.
    fn gamma_seed() -> Self;

    /// Lossy conversion from `f64`; used for constants.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_eq_tol() -> Self {
        1e-9
    }

    fn gamma_seed() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_eq_tol() -> Self {
        1e-4
    }

    fn gamma_seed() -> Self {
        1e-4
    }
}

/// `a <= b` up to a tolerance relative to `max(1, |a|, |b|)`.
#[inline]
pub fn approx_le<T: Scalar>(a: T, b: T, tol: T) -> bool {
    a <= b + tol * T::one().max(a.abs()).max(b.abs())
}

/// `|a - b|` within a tolerance relative to `max(1, |a|, |b|)`.
#[inline]
pub fn approx_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    (a - b).abs() <= tol * T::one().max(a.abs()).max(b.abs())
}

#[inline]
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&p, &q)| {
            let d = p - q;
            d * d
        })
        .sum::<T>()
        .sqrt()
}

/// Componentwise ordering from dimension 0 upward; smaller value wins.
pub fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (p, q) in a.iter().zip(b) {
        match p.partial_cmp(q) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn lex_order_is_componentwise() {
        assert_eq!(lex_cmp(&[0.0, 5.0], &[1.0, -5.0]), Ordering::Less);
        assert_eq!(lex_cmp(&[1.0, 2.0], &[1.0, 1.0]), Ordering::Greater);
        assert_eq!(lex_cmp(&[1.0, 2.0], &[1.0, 2.0]), Ordering::Equal);
    }

    #[test]
    fn tolerance_scales_with_magnitude() {
        assert!(approx_eq(1e6, 1e6 + 1e-4, 1e-9));
        assert!(!approx_eq(1.0, 1.0 + 1e-6, 1e-9));
        assert!(approx_le(1.0 + 1e-10, 1.0, 1e-9));
    }

    #[test]
    fn euclidean_distance() {
        assert_eq!(distance(&[0.0f64, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(distance(&[1.0f32], &[1.0]), 0.0);
    }
}
