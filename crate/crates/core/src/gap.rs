//! Optimality-gap certificate: best sampled value minus the minimum of the
//! lower envelope over the box. The minimum is taken over a regular grid, so
//! the reported `slack` bounds how far the grid minimum can sit above the
//! continuous one.

use rayon::prelude::*;

use crate::error::{Result, SmgoError};
use crate::history::History;
use crate::scalar::{distance, Scalar};
use crate::space::SearchSpace;

/// Highest dimension for which a grid certificate is computed.
pub const GAP_MAX_DIM: usize = 3;

/// Grid points per axis used when the caller has no preference.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 1001,
        2 => 501,
        _ => 101,
    }
}

/// Where the Lipschitz constant behind a certificate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaSource {
    /// The data-driven estimate of the run; the certificate is heuristic.
    Estimated,
    /// Supplied by the caller, e.g. a known Lipschitz constant.
    Supplied,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapCertificate<T> {
    pub best_z: T,
    pub min_lower: T,
    pub argmin: Vec<T>,
    pub delta_bar: T,
    /// Maximum amount by which `min_lower` can exceed the continuous minimum.
    pub slack: T,
    pub grid_resolution: usize,
    pub gamma: T,
    pub gamma_source: GammaSource,
}

/// Certificate using the history's own Lipschitz estimate.
pub fn gap_upper_bound<T: Scalar>(
    history: &History<T>,
    space: &SearchSpace<T>,
    mu: T,
    resolution: usize,
) -> Result<GapCertificate<T>> {
    certify(
        history,
        space,
        mu,
        history.gamma(),
        resolution,
        GammaSource::Estimated,
    )
}

/// Certificate with cone slope `mu * gamma` for a caller-supplied `gamma`.
pub fn gap_upper_bound_with_gamma<T: Scalar>(
    history: &History<T>,
    space: &SearchSpace<T>,
    mu: T,
    gamma: T,
    resolution: usize,
) -> Result<GapCertificate<T>> {
    certify(history, space, mu, gamma, resolution, GammaSource::Supplied)
}

fn certify<T: Scalar>(
    history: &History<T>,
    space: &SearchSpace<T>,
    mu: T,
    gamma: T,
    resolution: usize,
    gamma_source: GammaSource,
) -> Result<GapCertificate<T>> {
    let dim = space.dim();
    if dim > GAP_MAX_DIM {
        return Err(SmgoError::DimensionTooLarge {
            dim,
            cap: GAP_MAX_DIM,
        });
    }
    if resolution < 2 {
        return Err(SmgoError::InvalidConfig(
            "grid resolution must be at least 2".into(),
        ));
    }
    let (_, best_z) = history.best()?;
    let slope = mu * gamma;
    let steps: Vec<T> = (0..dim)
        .map(|d| (space.upper()[d] - space.lower()[d]) / T::from_usize(resolution - 1).unwrap())
        .collect();
    let coord = |d: usize, i: usize| -> T {
        if i == resolution - 1 {
            space.upper()[d]
        } else {
            space.lower()[d] + steps[d] * T::from_usize(i).unwrap()
        }
    };
    let total = resolution.pow(dim as u32);

    let lower_at = |flat: usize, buf: &mut Vec<T>| -> T {
        buf.clear();
        let mut rem = flat;
        let mut idx = vec![0; dim];
        for d in (0..dim).rev() {
            idx[d] = rem % resolution;
            rem /= resolution;
        }
        buf.extend((0..dim).map(|d| coord(d, idx[d])));
        history
            .iter()
            .map(|(xk, zk)| zk - slope * distance(buf, xk))
            .fold(T::neg_infinity(), T::max)
    };

    let (flat, min_lower) = (0..total)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| (i, lower_at(i, buf)))
        .reduce(
            || (usize::MAX, T::infinity()),
            |a, b| {
                if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    let mut argmin = Vec::new();
    lower_at(flat, &mut argmin);

    let half_diag = steps.iter().map(|&h| h * h).sum::<T>().sqrt() * T::lit(0.5);
    Ok(GapCertificate {
        best_z,
        min_lower,
        argmin,
        delta_bar: best_z - min_lower,
        slack: slope * half_diag,
        grid_resolution: resolution,
        gamma,
        gamma_source,
    })
}
