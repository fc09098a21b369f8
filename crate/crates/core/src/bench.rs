//! Test functions with known optima, a brute-force grid oracle, and a uniform
//! random-search baseline.

use std::f64::consts::PI;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SmgoError};
use crate::history::Sample;
use crate::space::SearchSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchKind {
    Rosenbrock,
    StyblinskiTang,
    Deb1,
    Deb2,
    Schwefel,
    Salomon,
    Brown,
}

impl BenchKind {
    pub const ALL: [BenchKind; 7] = [
        BenchKind::Rosenbrock,
        BenchKind::StyblinskiTang,
        BenchKind::Deb1,
        BenchKind::Deb2,
        BenchKind::Schwefel,
        BenchKind::Salomon,
        BenchKind::Brown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchKind::Rosenbrock => "rosenbrock",
            BenchKind::StyblinskiTang => "styblinski-tang",
            BenchKind::Deb1 => "deb1",
            BenchKind::Deb2 => "deb2",
            BenchKind::Schwefel => "schwefel",
            BenchKind::Salomon => "salomon",
            BenchKind::Brown => "brown",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let key: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "rosenbrock" => BenchKind::Rosenbrock,
            "styblinskitang" | "st" => BenchKind::StyblinskiTang,
            "deb1" | "debs1" => BenchKind::Deb1,
            "deb2" | "debs2" => BenchKind::Deb2,
            "schwefel" => BenchKind::Schwefel,
            "salomon" => BenchKind::Salomon,
            "brown" => BenchKind::Brown,
            _ => return Err(SmgoError::UnknownFunction(name.to_string())),
        })
    }

    /// Functions that are sums of identical one-dimensional terms.
    pub fn is_separable(self) -> bool {
        matches!(
            self,
            BenchKind::StyblinskiTang | BenchKind::Deb1 | BenchKind::Deb2 | BenchKind::Schwefel
        )
    }

    /// Smallest dimension for which the function is defined.
    pub fn min_dim(self) -> usize {
        match self {
            BenchKind::Rosenbrock | BenchKind::Brown => 2,
            _ => 1,
        }
    }

    fn bounds(self) -> (f64, f64) {
        match self {
            BenchKind::Rosenbrock => (-40.0, 5.0),
            BenchKind::StyblinskiTang => (-5.0, 5.0),
            BenchKind::Deb1 => (-1.0, 1.0),
            BenchKind::Deb2 => (0.0, 150.0),
            BenchKind::Schwefel => (-500.0, 500.0),
            BenchKind::Salomon => (-40.0, 70.0),
            BenchKind::Brown => (-1.0, 4.0),
        }
    }
}

impl fmt::Display for BenchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const ST_ARGMIN: f64 = -2.903_534_027_771_178;
const ST_MIN: f64 = -39.166_165_703_771_42;
const SCHWEFEL_ARGMIN: f64 = 420.968_746_359_982;
const SCHWEFEL_MIN: f64 = -418.982_887_272_433_8;

/// Largest value of `|d/du sin^6(u)|`, reached at `sin^2 u = 5/6`.
fn sin6_slope() -> f64 {
    6.0 * (5.0f64 / 6.0).powf(2.5) * (1.0f64 / 6.0).sqrt()
}

#[derive(Debug, Clone)]
pub struct BenchmarkFunction {
    pub kind: BenchKind,
    pub dimension: usize,
    pub bounds: SearchSpace<f64>,
    pub known_optimum: f64,
    pub known_minimizer: Option<Vec<f64>>,
}

impl BenchmarkFunction {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        evaluate(self.kind, x)
    }

    /// An upper bound on the Lipschitz constant over the box, from a bound on
    /// the gradient norm. `None` when the function is not Lipschitz there.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        let (lo, hi) = self.kind.bounds();
        let m = lo.abs().max(hi.abs());
        let d = self.dimension as f64;
        let per_coord = match self.kind {
            BenchKind::Rosenbrock => {
                400.0 * m * (m + m * m) + 2.0 * (1.0 + m) + 200.0 * (m + m * m)
            }
            BenchKind::StyblinskiTang => 0.5 * (4.0 * m.powi(3) + 32.0 * m + 5.0),
            BenchKind::Deb1 => 5.0 * PI * sin6_slope() / d,
            // the inner x^(3/4) has unbounded slope at 0
            BenchKind::Deb2 => return None,
            BenchKind::Schwefel => 1.0 + m.sqrt() / 2.0,
            BenchKind::Salomon => return Some(2.0 * PI + 0.1),
            BenchKind::Brown => {
                let y = m * m;
                let own = 2.0 * (y + 1.0) * m.powf(2.0 * y + 1.0);
                let cross = 2.0 * m * (m.powf(2.0 * y + 2.0) * 2.0 * m.ln()).max(1.0);
                2.0 * (own + cross)
            }
        };
        Some(per_coord * d.sqrt())
    }
}

pub fn evaluate(kind: BenchKind, x: &[f64]) -> f64 {
    let d = x.len() as f64;
    match kind {
        BenchKind::Rosenbrock => x
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum(),
        BenchKind::StyblinskiTang => {
            0.5 * x
                .iter()
                .map(|&v| v.powi(4) - 16.0 * v * v + 5.0 * v)
                .sum::<f64>()
        }
        BenchKind::Deb1 => -x.iter().map(|&v| (5.0 * PI * v).sin().powi(6)).sum::<f64>() / d,
        BenchKind::Deb2 => {
            -x.iter()
                .map(|&v| (5.0 * PI * (v.powf(0.75) - 0.05)).sin().powi(6))
                .sum::<f64>()
                / d
        }
        BenchKind::Schwefel => -x.iter().map(|&v| v * v.abs().sqrt().sin()).sum::<f64>(),
        BenchKind::Salomon => {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            1.0 - (2.0 * PI * r).cos() + 0.1 * r
        }
        BenchKind::Brown => x
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0] * w[0], w[1] * w[1]);
                a.powf(b + 1.0) + b.powf(a + 1.0)
            })
            .sum(),
    }
}

/// Looks a benchmark up by name and dimension.
pub fn make_function(name: &str, dim: usize) -> Result<BenchmarkFunction> {
    let kind = BenchKind::parse(name)?;
    make(kind, dim)
}

pub fn make(kind: BenchKind, dim: usize) -> Result<BenchmarkFunction> {
    if dim < kind.min_dim() {
        return Err(SmgoError::InvalidSpace(format!(
            "{kind} needs dimension >= {}, got {dim}",
            kind.min_dim()
        )));
    }
    let (lo, hi) = kind.bounds();
    let d = dim as f64;
    let (known_optimum, minimizer) = match kind {
        BenchKind::Rosenbrock => (0.0, Some(1.0)),
        BenchKind::StyblinskiTang => (ST_MIN * d, Some(ST_ARGMIN)),
        BenchKind::Deb1 => (-1.0, Some(0.1)),
        // 5*pi*(x^(3/4) - 0.05) = pi/2  =>  x^(3/4) = 0.15
        BenchKind::Deb2 => (-1.0, Some(0.15f64.powf(4.0 / 3.0))),
        BenchKind::Schwefel => (SCHWEFEL_MIN * d, Some(SCHWEFEL_ARGMIN)),
        BenchKind::Salomon | BenchKind::Brown => (0.0, Some(0.0)),
    };
    Ok(BenchmarkFunction {
        kind,
        dimension: dim,
        bounds: SearchSpace::cube(lo, hi, dim)?,
        known_optimum,
        known_minimizer: minimizer.map(|v| vec![v; dim]),
    })
}

#[derive(Debug, Clone)]
pub struct RandomSearchOutcome {
    pub best: Sample<f64>,
    pub samples: Vec<Sample<f64>>,
    /// Best value after each evaluation.
    pub trace: Vec<f64>,
}

/// `n` i.i.d. uniform samples over the box.
pub fn random_search<F>(
    mut f: F,
    space: &SearchSpace<f64>,
    n: usize,
    seed: u64,
) -> Result<RandomSearchOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    if n == 0 {
        return Err(SmgoError::InvalidConfig("budget must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    let mut best: Option<Sample<f64>> = None;
    for _ in 0..n {
        let x = space.sample_uniform(&mut rng);
        let z = f(&x);
        if !z.is_finite() {
            return Err(SmgoError::NonFiniteValue);
        }
        let s = Sample::new(x, z);
        if best.as_ref().is_none_or(|b| z < b.z) {
            best = Some(s.clone());
        }
        trace.push(best.as_ref().unwrap().z);
        samples.push(s);
    }
    Ok(RandomSearchOutcome {
        best: best.unwrap(),
        samples,
        trace,
    })
}

/// Minimum of `f` over a regular grid of `resolution` points per axis,
/// corners included. First grid point wins ties.
pub fn grid_oracle_min<F>(
    f: F,
    space: &SearchSpace<f64>,
    resolution: usize,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = space.dim();
    if dim > crate::gap::GAP_MAX_DIM {
        return Err(SmgoError::DimensionTooLarge {
            dim,
            cap: crate::gap::GAP_MAX_DIM,
        });
    }
    if resolution < 2 {
        return Err(SmgoError::InvalidConfig(
            "grid resolution must be at least 2".into(),
        ));
    }
    let axis: Vec<Vec<f64>> = (0..dim)
        .map(|d| {
            let (l, u) = (space.lower()[d], space.upper()[d]);
            (0..resolution)
                .map(|i| {
                    if i == resolution - 1 {
                        u
                    } else {
                        l + (u - l) * i as f64 / (resolution - 1) as f64
                    }
                })
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut best = (Vec::new(), f64::INFINITY);
    loop {
        for d in 0..dim {
            x[d] = axis[d][idx[d]];
        }
        let z = f(&x);
        if z < best.1 {
            best = (x.clone(), z);
        }
        // odometer increment, last axis fastest
        let mut d = dim;
        loop {
            if d == 0 {
                return Ok(best);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < resolution {
                break;
            }
            idx[d] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(kind: BenchKind, x: &[f64]) -> f64 {
        evaluate(kind, x)
    }

    #[test]
    fn reference_values() {
        assert_eq!(at(BenchKind::Rosenbrock, &[1.0, 1.0]), 0.0);
        assert!((at(BenchKind::Schwefel, &[420.9687, 420.9687]) + 837.966).abs() < 0.01);
        assert_eq!(at(BenchKind::Salomon, &[0.0; 4]), 0.0);
        assert_eq!(at(BenchKind::Brown, &[0.0; 3]), 0.0);
        assert!((at(BenchKind::StyblinskiTang, &[-2.903534; 5]) + 195.83).abs() < 0.01);
        assert!((at(BenchKind::Deb1, &[0.1; 5]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rounded_optima_are_close() {
        for d in [2, 5, 10] {
            let st = make(BenchKind::StyblinskiTang, d).unwrap();
            assert!((st.known_optimum - (-39.166 * d as f64)).abs() < 1e-3 * d as f64);
            let sw = make(BenchKind::Schwefel, d).unwrap();
            assert!((sw.known_optimum - (-418.982 * d as f64)).abs() < 1e-3 * d as f64);
        }
    }

    #[test]
    fn minimizers_attain_optimum() {
        for kind in BenchKind::ALL {
            for dim in [kind.min_dim(), 2, 5, 10] {
                let f = make(kind, dim).unwrap();
                let x = f.known_minimizer.clone().unwrap();
                assert!(f.bounds.contains(&x), "{kind} {dim}");
                let tol = 1e-6 * f.known_optimum.abs().max(1.0);
                assert!(
                    (f.evaluate(&x) - f.known_optimum).abs() <= tol,
                    "{kind} D={dim}: {} vs {}",
                    f.evaluate(&x),
                    f.known_optimum
                );
            }
        }
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(
            make_function("Styblinski-Tang", 3).unwrap().kind,
            BenchKind::StyblinskiTang
        );
        assert_eq!(make_function("debs_2", 3).unwrap().kind, BenchKind::Deb2);
        assert_eq!(
            make_function("ackley", 2).unwrap_err(),
            SmgoError::UnknownFunction("ackley".into())
        );
        assert!(make(BenchKind::Rosenbrock, 1).is_err());
        let f = make_function("deb2", 4).unwrap();
        assert_eq!(f.bounds.lower(), &[0.0; 4]);
        assert_eq!(f.bounds.upper(), &[150.0; 4]);
    }

    #[test]
    fn separable_functions_decompose() {
        let base = [[0.3, -0.2, 0.7], [-0.9, 0.45, 0.1]];
        for kind in BenchKind::ALL.into_iter().filter(|k| k.is_separable()) {
            let (lo, hi) = kind.bounds();
            let map = |t: f64| lo + (hi - lo) * (t + 1.0) / 2.0;
            let mut deltas = Vec::new();
            for b in base {
                let mut p: Vec<f64> = b.iter().map(|&t| map(t)).collect();
                p[1] = map(-0.6);
                let f1 = evaluate(kind, &p);
                p[1] = map(0.35);
                let f2 = evaluate(kind, &p);
                deltas.push(f2 - f1);
            }
            assert!(
                (deltas[0] - deltas[1]).abs() < 1e-9 * deltas[0].abs().max(1.0),
                "{kind}"
            );
        }
    }

    #[test]
    fn lipschitz_bounds_dominate_sampled_slopes() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in BenchKind::ALL {
            let f = make(kind, 2).unwrap();
            let Some(bound) = f.lipschitz_bound() else {
                assert_eq!(kind, BenchKind::Deb2);
                continue;
            };
            for _ in 0..2000 {
                let a = f.bounds.sample_uniform(&mut rng);
                let b: Vec<f64> = a.iter().map(|v| v + rng.gen_range(-1e-3..1e-3)).collect();
                let mut b = b;
                f.bounds.clamp(&mut b);
                let d = crate::scalar::distance(&a, &b);
                if d > 0.0 {
                    assert!(
                        (f.evaluate(&a) - f.evaluate(&b)).abs() / d <= bound,
                        "{kind}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_search_contract() {
        let space = SearchSpace::cube(-1.0, 1.0, 3).unwrap();
        let one = random_search(|x| x[0], &space, 1, 9).unwrap();
        assert_eq!(one.samples.len(), 1);
        assert_eq!(one.best, one.samples[0]);
        let a = random_search(|x| x.iter().sum(), &space, 50, 9).unwrap();
        let b = random_search(|x| x.iter().sum(), &space, 50, 9).unwrap();
        assert_eq!(a.trace, b.trace);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        let c = random_search(|_| 4.5, &space, 20, 1).unwrap();
        assert_eq!(c.best.z, 4.5);
        assert!(a.samples.iter().all(|s| space.contains(&s.x)));
    }

    #[test]
    fn grid_oracle() {
        let line = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
        let (x, z) = grid_oracle_min(|x| (x[0] - 0.3).abs(), &line, 10001).unwrap();
        assert!(z < 1e-12 && (x[0] - 0.3).abs() < 1e-12);

        let deb = make(BenchKind::Deb1, 1).unwrap();
        let (x, z) = grid_oracle_min(|x| deb.evaluate(x), &deb.bounds, 10001).unwrap();
        assert!((z + 1.0).abs() < 1e-9);
        let k = ((x[0] + 0.9) / 0.2).round();
        assert!((x[0] - (-0.9 + 0.2 * k)).abs() < 1e-9 && (0.0..=9.0).contains(&k));

        let box2 = SearchSpace::cube(-2.0, 2.0, 2).unwrap();
        let (x, z) = grid_oracle_min(|x| evaluate(BenchKind::Rosenbrock, x), &box2, 501).unwrap();
        assert!(z < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);

        let big = SearchSpace::cube(0.0, 1.0, 4).unwrap();
        assert!(grid_oracle_min(|_| 0.0, &big, 3).is_err());
    }
}
