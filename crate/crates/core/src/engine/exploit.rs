//! Exploitation: candidates where the best point's downward cone meets the
//! cone of another sample, filtered to those where the best cone is the
//! active lower bound.

use std::cmp::Ordering;

use crate::bounds::{CachedBound, ConeRecord};
use crate::error::{Result, SmgoError};
use crate::history::History;
use crate::scalar::{approx_eq, approx_le, distance, lex_cmp, Scalar};

/// Fraction of the way from the best point toward sample `i` at which the
/// two downward cones intersect, clamped to `[0, 1/2]`.
fn intersection_fraction<T: Scalar>(x_best: &[T], z_best: T, xi: &[T], zi: T, slope: T) -> T {
    let half = T::lit(0.5);
    let dist = distance(xi, x_best);
    let rise = zi - z_best;
    let ratio = if rise <= T::zero() || dist <= T::zero() {
        T::zero()
    } else {
        (rise / dist) / slope
    };
    let a = (T::one() - ratio) * half;
    if a.is_nan() {
        return T::zero();
    }
    a.max(T::zero()).min(half)
}

fn candidate_for<T: Scalar>(history: &History<T>, i: usize, slope: T) -> Vec<T> {
    let (x_best, z_best) = history.best().expect("non-empty history");
    let xi = history.x(i);
    let a = intersection_fraction(x_best, z_best, xi, history.z(i), slope);
    x_best
        .iter()
        .zip(xi)
        .map(|(&b, &p)| b + a * (p - b))
        .collect()
}

/// One candidate per sample other than the best, each on the segment from the
/// best point toward that sample. Returned as `(sample index, location)`.
pub fn exploitation_candidates<T: Scalar>(
    history: &History<T>,
    gamma: T,
    mu: T,
) -> Result<Vec<(usize, Vec<T>)>> {
    if history.len() < 2 {
        return Err(SmgoError::TooFewSamples {
            needed: 2,
            have: history.len(),
        });
    }
    let slope = mu * gamma;
    let best = history.best_index();
    Ok((0..history.len())
        .filter(|&i| i != best)
        .map(|i| (i, candidate_for(history, i, slope)))
        .collect())
}

/// Whether `lower` equals the best point's own cone at `x`.
fn best_cone_active<T: Scalar>(x: &[T], lower: T, history: &History<T>, slope: T, tol: T) -> bool {
    let (x_best, z_best) = history.best().expect("non-empty history");
    approx_eq(lower, z_best - slope * distance(x, x_best), tol)
}

/// Smallest lower bound among candidates whose lower bound is generated by the
/// best point's cone. Ties go to the lexicographically smallest location.
fn pick<'a, T: Scalar>(
    items: impl Iterator<Item = (&'a [T], T)>,
    history: &History<T>,
    slope: T,
    tol: T,
) -> Result<(Vec<T>, T)> {
    let mut best: Option<(&[T], T)> = None;
    for (x, lower) in items {
        if !best_cone_active(x, lower, history, slope, tol) {
            continue;
        }
        let better = match best {
            None => true,
            Some((bx, bl)) => lower < bl || (lower == bl && lex_cmp(x, bx) == Ordering::Less),
        };
        if better {
            best = Some((x, lower));
        }
    }
    best.map(|(x, l)| (x.to_vec(), l))
        .ok_or(SmgoError::Infeasible)
}

/// Selects the exploitation point among `candidates`, evaluating each lower
/// bound over all samples with slope `mu * gamma`.
pub fn select_exploitation<T: Scalar>(
    candidates: &[Vec<T>],
    history: &History<T>,
    gamma: T,
    mu: T,
    tol: T,
) -> Result<(Vec<T>, T)> {
    if history.is_empty() || candidates.is_empty() {
        return Err(SmgoError::TooFewSamples {
            needed: 2,
            have: history.len(),
        });
    }
    let slope = mu * gamma;
    let lowers: Vec<T> = candidates
        .iter()
        .map(|x| {
            history
                .iter()
                .map(|(xk, zk)| zk - slope * distance(x, xk))
                .fold(T::neg_infinity(), T::max)
        })
        .collect();
    pick(
        candidates
            .iter()
            .map(Vec::as_slice)
            .zip(lowers.iter().copied()),
        history,
        slope,
        tol,
    )
}

/// Expected-improvement test: the predicted lower bound must undercut the
/// best value by at least `alpha * gamma`.
pub fn improvement_met<T: Scalar>(z_lb: T, best_z: T, alpha: T, gamma: T, tol: T) -> bool {
    approx_le(z_lb, best_z - alpha * gamma, tol)
}

#[derive(Debug, Clone)]
pub(crate) struct ThetaEntry<T> {
    pub segment: usize,
    pub bound: CachedBound<T>,
}

/// Cached exploitation candidates. Locations depend on the best point and on
/// gamma, so the cache is rebuilt whenever either changes; otherwise each new
/// sample only folds its cone into every entry and adds one candidate.
#[derive(Debug, Clone)]
pub(crate) struct ExploitationCache<T> {
    best: usize,
    gamma: T,
    entries: Vec<ThetaEntry<T>>,
}

impl<T: Scalar> ExploitationCache<T> {
    pub fn build(history: &History<T>, mu: T) -> Self {
        let gamma = history.gamma();
        let slope = mu * gamma;
        let best = history.best_index();
        let entries = if history.len() < 2 {
            Vec::new()
        } else {
            (0..history.len())
                .filter(|&i| i != best)
                .map(|i| ThetaEntry {
                    segment: i,
                    bound: Self::entry(history, candidate_for(history, i, slope), mu),
                })
                .collect()
        };
        Self {
            best,
            gamma,
            entries,
        }
    }

    fn entry(history: &History<T>, location: Vec<T>, mu: T) -> CachedBound<T> {
        let (lower, _) = ConeRecord::exact_pair(&location, history, mu).expect("non-empty history");
        CachedBound {
            location,
            lower,
            upper: None,
        }
    }

    /// Brings the cache up to date after sample `index` was appended.
    pub fn refresh(&mut self, history: &History<T>, index: usize, mu: T) {
        if history.best_index() != self.best || history.gamma() != self.gamma {
            *self = Self::build(history, mu);
            return;
        }
        let new = history.sample(index);
        for e in &mut self.entries {
            e.bound.update_new_sample(&new, index, self.gamma, mu);
        }
        let slope = mu * self.gamma;
        let location = candidate_for(history, index, slope);
        self.entries.push(ThetaEntry {
            segment: index,
            bound: Self::entry(history, location, mu),
        });
    }

    pub fn select(&self, history: &History<T>, mu: T, tol: T) -> Result<(Vec<T>, T)> {
        if self.entries.is_empty() {
            return Err(SmgoError::TooFewSamples {
                needed: 2,
                have: history.len(),
            });
        }
        pick(
            self.entries
                .iter()
                .map(|e| (e.bound.location.as_slice(), e.bound.lower_value())),
            history,
            mu * self.gamma,
            tol,
        )
    }

    pub fn entries(&self) -> &[ThetaEntry<T>] {
        &self.entries
    }
}
