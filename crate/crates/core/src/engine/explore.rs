//! Exploration: midpoints between every pair of samples, plus midpoints
//! between every sample and every corner of the box. A corner takes the value
//! of its nearest sample, so corner midpoints pull the search toward the
//! boundary without evaluating the corners themselves.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::ConeRecord;
use crate::error::{Result, SmgoError};
use crate::history::History;
use crate::scalar::{distance, lex_cmp, Scalar};
use crate::space::{SearchSpace, VERTEX_CAP};

/// Which pool entry a candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MidpointKey {
    /// Midpoint of samples `i < j`.
    Pair(usize, usize),
    /// Midpoint of sample `k` and mirrored corner `v`.
    Mirror(usize, usize),
}

#[derive(Debug, Clone)]
struct PairEntry<T> {
    i: u32,
    j: u32,
    lower: ConeRecord<T>,
    upper: ConeRecord<T>,
}

#[derive(Debug, Clone)]
struct MirrorEntry<T> {
    sample: u32,
    vertex: u32,
    /// Distance from the midpoint to its corner.
    half_span: T,
    lower: ConeRecord<T>,
    upper: ConeRecord<T>,
}

/// Mirrored corners: coordinates and the current nearest sample of each.
#[derive(Debug, Clone)]
struct Corners<T> {
    dim: usize,
    coords: Vec<T>,
    nearest: Vec<(usize, T)>,
}

impl<T: Scalar> Corners<T> {
    fn new(space: &SearchSpace<T>, seed: u64) -> Self {
        let dim = space.dim();
        let coords: Vec<T> = if dim <= VERTEX_CAP {
            (0..1u64 << dim).flat_map(|v| space.vertex(v)).collect()
        } else {
            // fixed random subset of corners, drawn once from the seed
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de_u64);
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(dim << VERTEX_CAP);
            while seen.len() < 1 << VERTEX_CAP {
                let bits: Vec<bool> = (0..dim).map(|_| rng.gen()).collect();
                if seen.insert(bits.clone()) {
                    out.extend(bits.iter().enumerate().map(|(d, &up)| {
                        if up {
                            space.upper()[d]
                        } else {
                            space.lower()[d]
                        }
                    }));
                }
            }
            out
        };
        Self {
            dim,
            nearest: Vec::new(),
            coords,
        }
    }

    fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    fn get(&self, v: usize) -> &[T] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    fn observe(&mut self, history: &History<T>, index: usize) {
        let x = history.x(index);
        if self.nearest.is_empty() {
            self.nearest = (0..self.len())
                .map(|v| (index, distance(x, self.get(v))))
                .collect();
            return;
        }
        for v in 0..self.len() {
            let d = distance(x, &self.coords[v * self.dim..(v + 1) * self.dim]);
            if d < self.nearest[v].1 {
                self.nearest[v] = (index, d);
            }
        }
    }

    fn value(&self, history: &History<T>, v: usize) -> T {
        history.z(self.nearest[v].0)
    }
}

/// A pool candidate with its bounds resolved at the current state.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolCandidate<T> {
    pub key: MidpointKey,
    pub location: Vec<T>,
    pub lower: T,
    pub upper: T,
    /// Index of the sample whose arrival created the entry.
    pub created_at: usize,
    /// Corner and its mirrored value, for corner midpoints.
    pub mirror: Option<(Vec<T>, T)>,
}

impl<T: Scalar> PoolCandidate<T> {
    pub fn uncertainty(&self) -> T {
        self.upper - self.lower
    }
}

/// Exploration candidates with incrementally cached cone records.
#[derive(Debug, Clone)]
pub struct ExplorationPool<T> {
    pairs: Vec<PairEntry<T>>,
    mirrors: Vec<MirrorEntry<T>>,
    corners: Corners<T>,
    gamma: T,
    mu: T,
}

#[inline]
fn midpoint_dist<T: Scalar>(a: &[T], b: &[T], x: &[T]) -> T {
    let half = T::lit(0.5);
    a.iter()
        .zip(b)
        .zip(x)
        .map(|((&p, &q), &r)| {
            let d = (p + q) * half - r;
            d * d
        })
        .sum::<T>()
        .sqrt()
}

fn midpoint<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let half = T::lit(0.5);
    a.iter().zip(b).map(|(&p, &q)| (p + q) * half).collect()
}

/// Generating cones at the midpoint of `a` and `b` over all samples.
fn exact_at_midpoint<T: Scalar>(
    a: &[T],
    b: &[T],
    history: &History<T>,
    slope: T,
) -> (ConeRecord<T>, ConeRecord<T>) {
    let mut lo = ConeRecord::new(T::zero(), T::infinity(), usize::MAX);
    let mut hi = ConeRecord::new(T::zero(), T::infinity(), usize::MAX);
    for (k, (xk, zk)) in history.iter().enumerate() {
        let depth = slope * midpoint_dist(a, b, xk);
        lo.offer_lower(zk, depth, k);
        hi.offer_upper(zk, depth, k);
    }
    (lo, hi)
}

impl<T: Scalar> ExplorationPool<T> {
    /// Builds the pool for every sample in `history`.
    pub fn build(history: &History<T>, mu: T, seed: u64) -> Self {
        let mut pool = Self {
            pairs: Vec::new(),
            mirrors: Vec::new(),
            corners: Corners::new(history.space(), seed),
            gamma: history.gamma(),
            mu,
        };
        for k in 0..history.len() {
            pool.corners.observe(history, k);
        }
        for k in 0..history.len() {
            pool.insert_for(history, k);
        }
        pool
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn mirror_count(&self) -> usize {
        self.mirrors.len()
    }

    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    pub fn len(&self) -> usize {
        self.pairs.len() + self.mirrors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert_for(&mut self, history: &History<T>, k: usize) {
        let slope = self.mu * self.gamma;
        let xk = history.x(k);
        for i in 0..k {
            let (lower, upper) = exact_at_midpoint(history.x(i), xk, history, slope);
            self.pairs.push(PairEntry {
                i: i as u32,
                j: k as u32,
                lower,
                upper,
            });
        }
        for v in 0..self.corners.len() {
            let corner = self.corners.get(v);
            let (lower, upper) = exact_at_midpoint(xk, corner, history, slope);
            self.mirrors.push(MirrorEntry {
                sample: k as u32,
                vertex: v as u32,
                half_span: distance(xk, corner) * T::lit(0.5),
                lower,
                upper,
            });
        }
    }

    /// Updates the pool after sample `index` joined `history`: rescales cached
    /// cone heights if gamma grew, folds in the new sample's cones, refreshes
    /// the nearest sample of each corner, and adds the new midpoints.
    pub fn refresh(&mut self, history: &History<T>, index: usize) {
        let gamma = history.gamma();
        let ratio = if gamma != self.gamma && self.gamma > T::zero() {
            Some(gamma / self.gamma)
        } else {
            None
        };
        self.gamma = gamma;
        let slope = self.mu * gamma;
        let xn = history.x(index);
        let zn = history.z(index);

        for e in &mut self.pairs {
            if let Some(r) = ratio {
                e.lower.rescale(r);
                e.upper.rescale(r);
            }
            let depth = slope * midpoint_dist(history.x(e.i as usize), history.x(e.j as usize), xn);
            e.lower.offer_lower(zn, depth, index);
            e.upper.offer_upper(zn, depth, index);
        }
        for e in &mut self.mirrors {
            if let Some(r) = ratio {
                e.lower.rescale(r);
                e.upper.rescale(r);
            }
            let corner = self.corners.get(e.vertex as usize);
            let depth = slope * midpoint_dist(history.x(e.sample as usize), corner, xn);
            e.lower.offer_lower(zn, depth, index);
            e.upper.offer_upper(zn, depth, index);
        }
        self.corners.observe(history, index);
        self.insert_for(history, index);
    }

    fn mirror_bounds(&self, history: &History<T>, e: &MirrorEntry<T>) -> (T, T) {
        let z_corner = self.corners.value(history, e.vertex as usize);
        let depth = self.mu * self.gamma * e.half_span;
        (
            e.lower.lower_value().max(z_corner - depth),
            e.upper.upper_value().min(z_corner + depth),
        )
    }

    fn location(&self, history: &History<T>, key: MidpointKey) -> Vec<T> {
        match key {
            MidpointKey::Pair(i, j) => midpoint(history.x(i), history.x(j)),
            MidpointKey::Mirror(k, v) => midpoint(history.x(k), self.corners.get(v)),
        }
    }

    fn scan(&self, history: &History<T>, skip: &HashSet<MidpointKey>) -> Option<(MidpointKey, T)> {
        let mut best: Option<(MidpointKey, T)> = None;
        let consider = |key: MidpointKey, lam: T, best: &mut Option<(MidpointKey, T)>| {
            let better = match *best {
                None => true,
                Some((bk, bl)) => {
                    lam > bl
                        || (lam == bl
                            && lex_cmp(&self.location(history, key), &self.location(history, bk))
                                == Ordering::Less)
                }
            };
            if better && !skip.contains(&key) {
                *best = Some((key, lam));
            }
        };
        for e in &self.pairs {
            let lam = e.upper.upper_value() - e.lower.lower_value();
            consider(
                MidpointKey::Pair(e.i as usize, e.j as usize),
                lam,
                &mut best,
            );
        }
        for e in &self.mirrors {
            let (lo, hi) = self.mirror_bounds(history, e);
            consider(
                MidpointKey::Mirror(e.sample as usize, e.vertex as usize),
                hi - lo,
                &mut best,
            );
        }
        best
    }

    /// Midpoint with the largest cached uncertainty, skipping candidates that
    /// coincide with an existing sample. Returns the location and its uncertainty.
    pub fn select(&self, history: &History<T>) -> Result<(Vec<T>, T)> {
        let mut skip = HashSet::new();
        while let Some((key, lam)) = self.scan(history, &skip) {
            let loc = self.location(history, key);
            if history.find_duplicate(&loc).is_none() {
                return Ok((loc, lam));
            }
            skip.insert(key);
        }
        Err(SmgoError::PoolExhausted)
    }

    /// Every candidate with its cached bounds resolved; corner midpoints
    /// include the mirrored corner cone.
    pub fn candidates<'a>(
        &'a self,
        history: &'a History<T>,
    ) -> impl Iterator<Item = PoolCandidate<T>> + 'a {
        let pairs = self.pairs.iter().map(move |e| {
            let (i, j) = (e.i as usize, e.j as usize);
            PoolCandidate {
                key: MidpointKey::Pair(i, j),
                location: midpoint(history.x(i), history.x(j)),
                lower: e.lower.lower_value(),
                upper: e.upper.upper_value(),
                created_at: j,
                mirror: None,
            }
        });
        let mirrors = self.mirrors.iter().map(move |e| {
            let (k, v) = (e.sample as usize, e.vertex as usize);
            let (lower, upper) = self.mirror_bounds(history, e);
            let corner = self.corners.get(v).to_vec();
            PoolCandidate {
                key: MidpointKey::Mirror(k, v),
                location: midpoint(history.x(k), &corner),
                lower,
                upper,
                created_at: k,
                mirror: Some((corner, self.corners.value(history, v))),
            }
        });
        pairs.chain(mirrors)
    }
}
