//! Evaluated samples and the running best pair.

use std::cmp::Ordering;

use crate::error::{Result, SmgoError};
use crate::scalar::{distance, lex_cmp, Scalar};
use crate::space::SearchSpace;

/// One evaluated decision vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub x: Vec<T>,
    pub z: T,
}

impl<T: Scalar> Sample<T> {
    pub fn new(x: Vec<T>, z: T) -> Self {
        Self { x, z }
    }
}

/// Ordered sample set. Coordinates are stored row-major in one buffer.
#[derive(Debug, Clone)]
pub struct History<T> {
    space: SearchSpace<T>,
    coords: Vec<T>,
    values: Vec<T>,
    best_index: usize,
    gamma: T,
    n0: usize,
    dup_tol: T,
}

impl<T: Scalar> History<T> {
    pub fn new(space: SearchSpace<T>) -> Self {
        let dup_tol = space.dup_tolerance();
        Self {
            space,
            coords: Vec::new(),
            values: Vec::new(),
            best_index: 0,
            gamma: T::zero(),
            n0: 0,
            dup_tol,
        }
    }

    /// History whose samples must be at least `tol` apart.
    pub fn with_dup_tolerance(space: SearchSpace<T>, tol: T) -> Self {
        Self {
            dup_tol: tol,
            ..Self::new(space)
        }
    }

    /// Builds a history from the initial data set and seeds the Lipschitz
    /// estimate from all initial pairs.
    pub fn with_initial(space: SearchSpace<T>, initial: &[Sample<T>]) -> Result<Self> {
        let mut h = Self::new(space);
        h.extend_initial(initial)?;
        Ok(h)
    }

    pub(crate) fn extend_initial(&mut self, initial: &[Sample<T>]) -> Result<()> {
        if initial.is_empty() {
            return Err(SmgoError::EmptyHistory);
        }
        for s in initial {
            self.add_sample(s.clone())?;
        }
        self.n0 = initial.len();
        self.gamma = crate::bounds::init_gamma(initial);
        Ok(())
    }

    pub fn space(&self) -> &SearchSpace<T> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn x(&self, i: usize) -> &[T] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    #[inline]
    pub fn z(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn sample(&self, i: usize) -> Sample<T> {
        Sample::new(self.x(i).to_vec(), self.z(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.coords
            .chunks_exact(self.dim())
            .zip(self.values.iter().copied())
    }

    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn dup_tolerance(&self) -> T {
        self.dup_tol
    }

    /// Raises the Lipschitz estimate to `gamma` if it is larger; the estimate
    /// never decreases.
    pub fn raise_gamma(&mut self, gamma: T) {
        if gamma > self.gamma {
            self.gamma = gamma;
        }
    }

    /// Index of the nearest sample and its distance, first index on ties.
    pub fn nearest(&self, x: &[T]) -> Option<(usize, T)> {
        let mut best: Option<(usize, T)> = None;
        for (i, (xi, _)) in self.iter().enumerate() {
            let d = distance(x, xi);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best
    }

    /// First sample within the duplicate tolerance of `x`, if any.
    pub fn find_duplicate(&self, x: &[T]) -> Option<usize> {
        self.iter()
            .position(|(xi, _)| distance(x, xi) < self.dup_tol)
    }

    /// Appends `s` and updates the best pair. The Lipschitz estimate is left
    /// untouched; see [`crate::bounds::update_gamma`].
    pub fn add_sample(&mut self, s: Sample<T>) -> Result<usize> {
        self.space.check(&s.x)?;
        if !s.z.is_finite() {
            return Err(SmgoError::NonFiniteValue);
        }
        if let Some(index) = self.find_duplicate(&s.x) {
            return Err(SmgoError::DuplicatePoint { index });
        }
        let index = self.len();
        self.coords.extend_from_slice(&s.x);
        self.values.push(s.z);
        if index == 0 || self.beats_best(index) {
            self.best_index = index;
        }
        Ok(index)
    }

    fn beats_best(&self, i: usize) -> bool {
        let (zb, zi) = (self.z(self.best_index), self.z(i));
        zi < zb || (zi == zb && lex_cmp(self.x(i), self.x(self.best_index)) == Ordering::Less)
    }

    pub fn best(&self) -> Result<(&[T], T)> {
        if self.is_empty() {
            return Err(SmgoError::EmptyHistory);
        }
        Ok((self.x(self.best_index), self.z(self.best_index)))
    }
}
