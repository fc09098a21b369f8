//! Lipschitz-constant estimation and the cone-intersection bounds built on it.
//!
//! Every sample `(x_k, z_k)` spawns a downward cone `z_k - mu*gamma*|x - x_k|`
//! and an upward cone `z_k + mu*gamma*|x - x_k|`. The lower bound is the upper
//! envelope of the downward cones, the upper bound the lower envelope of the
//! upward ones, and their difference is the uncertainty at `x`.
//!
//! [`CachedBound`] keeps the cone that currently generates each bound at a
//! fixed location so that a new sample costs O(1) per location instead of a
//! full O(n) recomputation.

use crate::error::{Result, SmgoError};
use crate::history::{History, Sample};
use crate::scalar::{distance, Scalar};

/// Largest pairwise slope among `samples`, or [`Scalar::gamma_seed`] (1e-9 for
/// `f64`) for a singleton.
pub fn init_gamma<T: Scalar>(samples: &[Sample<T>]) -> T {
    let mut gamma = T::zero();
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i + 1..] {
            let d = distance(&a.x, &b.x);
            if d > T::zero() {
                gamma = gamma.max((a.z - b.z).abs() / d);
            }
        }
    }
    if samples.len() < 2 {
        T::gamma_seed()
    } else {
        gamma
    }
}

/// Lipschitz estimate after `new` joins `history`. `new` must not be part of
/// `history` yet.
pub fn update_gamma<T: Scalar>(gamma_prev: T, history: &History<T>, new: &Sample<T>) -> Result<T> {
    let mut gamma = gamma_prev;
    for (k, (xk, zk)) in history.iter().enumerate() {
        let d = distance(&new.x, xk);
        if d < history.dup_tolerance() || d == T::zero() {
            return Err(SmgoError::ZeroDistance(k, history.len()));
        }
        gamma = gamma.max((new.z - zk).abs() / d);
    }
    Ok(gamma)
}

pub fn lower_bound<T: Scalar>(x: &[T], history: &History<T>, mu: T) -> Result<T> {
    if history.is_empty() {
        return Err(SmgoError::EmptyHistory);
    }
    let slope = mu * history.gamma();
    Ok(history
        .iter()
        .map(|(xk, zk)| zk - slope * distance(x, xk))
        .fold(T::neg_infinity(), T::max))
}

pub fn upper_bound<T: Scalar>(x: &[T], history: &History<T>, mu: T) -> Result<T> {
    if history.is_empty() {
        return Err(SmgoError::EmptyHistory);
    }
    let slope = mu * history.gamma();
    Ok(history
        .iter()
        .map(|(xk, zk)| zk + slope * distance(x, xk))
        .fold(T::infinity(), T::min))
}

pub fn uncertainty<T: Scalar>(x: &[T], history: &History<T>, mu: T) -> Result<T> {
    Ok(upper_bound(x, history, mu)? - lower_bound(x, history, mu)?)
}

/// The cone generating a cached bound: tip value and height at the cached
/// location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeRecord<T> {
    pub tip_value: T,
    pub depth: T,
    pub generator_index: usize,
}

impl<T: Scalar> ConeRecord<T> {
    pub fn new(tip_value: T, depth: T, generator_index: usize) -> Self {
        Self {
            tip_value,
            depth,
            generator_index,
        }
    }

    #[inline]
    pub fn lower_value(&self) -> T {
        self.tip_value - self.depth
    }

    #[inline]
    pub fn upper_value(&self) -> T {
        self.tip_value + self.depth
    }

    #[inline]
    pub fn rescale(&mut self, ratio: T) {
        self.depth = self.depth * ratio;
    }

    /// Takes the offered cone if it raises the lower value.
    #[inline]
    pub fn offer_lower(&mut self, tip_value: T, depth: T, index: usize) -> bool {
        if tip_value - depth > self.lower_value() {
            *self = Self::new(tip_value, depth, index);
            true
        } else {
            false
        }
    }

    /// Takes the offered cone if it lowers the upper value.
    #[inline]
    pub fn offer_upper(&mut self, tip_value: T, depth: T, index: usize) -> bool {
        if tip_value + depth < self.upper_value() {
            *self = Self::new(tip_value, depth, index);
            true
        } else {
            false
        }
    }

    /// Generating cones of both bounds at `x`, recomputed over all samples.
    /// Ties go to the earliest sample.
    pub fn exact_pair(x: &[T], history: &History<T>, mu: T) -> Result<(Self, Self)> {
        if history.is_empty() {
            return Err(SmgoError::EmptyHistory);
        }
        let slope = mu * history.gamma();
        let mut iter = history.iter().enumerate();
        let (_, (x0, z0)) = iter.next().expect("non-empty");
        let d0 = slope * distance(x, x0);
        let mut lo = Self::new(z0, d0, 0);
        let mut hi = lo;
        for (k, (xk, zk)) in iter {
            let depth = slope * distance(x, xk);
            lo.offer_lower(zk, depth, k);
            hi.offer_upper(zk, depth, k);
        }
        Ok((lo, hi))
    }
}

/// Incrementally maintained bounds at one candidate location.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedBound<T> {
    pub location: Vec<T>,
    pub lower: ConeRecord<T>,
    pub upper: Option<ConeRecord<T>>,
}

impl<T: Scalar> CachedBound<T> {
    /// Full O(n) evaluation at `location`; `with_upper` also tracks the upper cone.
    pub fn evaluate(
        location: Vec<T>,
        history: &History<T>,
        mu: T,
        with_upper: bool,
    ) -> Result<Self> {
        let (lower, upper) = ConeRecord::exact_pair(&location, history, mu)?;
        Ok(Self {
            location,
            lower,
            upper: with_upper.then_some(upper),
        })
    }

    pub fn lower_value(&self) -> T {
        self.lower.lower_value()
    }

    pub fn upper_value(&self) -> Option<T> {
        self.upper.map(|c| c.upper_value())
    }

    pub fn uncertainty(&self) -> Option<T> {
        self.upper_value().map(|u| u - self.lower_value())
    }

    /// Folds the cones of a newly added sample into the cached records.
    pub fn update_new_sample(&mut self, new: &Sample<T>, index: usize, gamma: T, mu: T) {
        let depth = mu * gamma * distance(&self.location, &new.x);
        self.lower.offer_lower(new.z, depth, index);
        if let Some(up) = self.upper.as_mut() {
            up.offer_upper(new.z, depth, index);
        }
    }

    /// Scales every cone height by `gamma_new / gamma_old`.
    pub fn rescale_gamma(&mut self, gamma_old: T, gamma_new: T) {
        if gamma_new == gamma_old || gamma_old <= T::zero() {
            return;
        }
        let ratio = gamma_new / gamma_old;
        self.lower.rescale(ratio);
        if let Some(up) = self.upper.as_mut() {
            up.rescale(ratio);
        }
    }
}
