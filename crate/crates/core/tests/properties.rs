//! Randomized checks of the bound, cache and driver invariants against
//! brute-force recomputation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smgo::bench::{make, BenchKind, BenchmarkFunction};
use smgo::gap::gap_upper_bound_with_gamma;
use smgo::scalar::{approx_eq, approx_le, distance};
use smgo::{
    exploitation_candidates, init_gamma, lower_bound, run, select_exploitation, uncertainty,
    upper_bound, Engine, EngineConfig, History, Sample, SearchSpace,
};

const MU: f64 = 1.025;
const EPS: f64 = 1e-9;

const LIPSCHITZ_KINDS: [BenchKind; 6] = [
    BenchKind::Rosenbrock,
    BenchKind::StyblinskiTang,
    BenchKind::Deb1,
    BenchKind::Schwefel,
    BenchKind::Salomon,
    BenchKind::Brown,
];

fn random_history(f: &BenchmarkFunction, n: usize, rng: &mut ChaCha8Rng) -> History<f64> {
    let mut h = History::new(f.bounds.clone());
    while h.len() < n {
        let x = f.bounds.sample_uniform(rng);
        let z = f.evaluate(&x);
        let _ = h.add_sample(Sample::new(x, z));
    }
    let samples: Vec<_> = (0..h.len()).map(|i| h.sample(i)).collect();
    h.raise_gamma(init_gamma(&samples));
    h
}

fn benchmark_run(f: &BenchmarkFunction, budget: usize, seed: u64) -> Engine<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = f.bounds.sample_uniform(&mut rng);
    let z0 = f.evaluate(&x0);
    let config = EngineConfig {
        budget,
        seed,
        ..EngineConfig::default()
    };
    let mut engine = Engine::new(config, f.bounds.clone(), &[Sample::new(x0, z0)]).unwrap();
    while !engine.is_exhausted() {
        let x = engine.ask().unwrap();
        engine.tell(f.evaluate(&x)).unwrap();
    }
    engine
}

#[test]
fn bounds_sandwich_known_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in LIPSCHITZ_KINDS {
        let f = make(kind, 2).unwrap();
        let gamma_o = f.lipschitz_bound().unwrap();
        for _ in 0..20 {
            let n = rng.gen_range(1..30);
            let mut h = random_history(&f, n, &mut rng);
            h.raise_gamma(gamma_o / MU);
            for _ in 0..50 {
                let x = f.bounds.sample_uniform(&mut rng);
                let v = f.evaluate(&x);
                let lo = lower_bound(&x, &h, MU).unwrap();
                let hi = upper_bound(&x, &h, MU).unwrap();
                assert!(approx_le(lo, v, EPS), "{kind}: lower {lo} > f {v}");
                assert!(approx_le(v, hi, EPS), "{kind}: f {v} > upper {hi}");
                let (_, r) = h.nearest(&x).unwrap();
                let lam = uncertainty(&x, &h, MU).unwrap();
                assert!(
                    lam >= 2.0 * (MU - 1.0) * h.gamma() * r - EPS,
                    "{kind}: uncertainty {lam} at r {r}"
                );
            }
            for i in 0..h.len() {
                assert!(uncertainty(h.x(i), &h, MU).unwrap().abs() <= EPS);
            }
        }
    }
}

#[test]
fn exploitation_always_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let dim = rng.gen_range(1..=6);
        let n = rng.gen_range(2..=60);
        let space = SearchSpace::cube(0.0, 1.0, dim).unwrap();
        let mut h = History::new(space.clone());
        while h.len() < n {
            let x = space.sample_uniform(&mut rng);
            let _ = h.add_sample(Sample::new(x, rng.gen_range(-5.0..5.0)));
        }
        let samples: Vec<_> = (0..n).map(|i| h.sample(i)).collect();
        h.raise_gamma(init_gamma(&samples));
        let gamma = h.gamma();
        let cands: Vec<_> = exploitation_candidates(&h, gamma, MU)
            .unwrap()
            .into_iter()
            .map(|(_, x)| x)
            .collect();
        let (x, z_lb) = select_exploitation(&cands, &h, gamma, MU, EPS).unwrap();
        let (xb, zb) = h.best().unwrap();
        assert!(approx_eq(z_lb, zb - MU * gamma * distance(&x, xb), EPS));
    }
}

#[test]
fn caches_are_conservative_and_exact_at_fixed_gamma() {
    let kinds = [
        BenchKind::Deb1,
        BenchKind::StyblinskiTang,
        BenchKind::Salomon,
    ];
    for (run_idx, kind) in kinds.into_iter().enumerate() {
        let f = make(kind, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(run_idx as u64);
        let x0 = f.bounds.sample_uniform(&mut rng);
        let z0 = f.evaluate(&x0);
        let config = EngineConfig {
            budget: 80,
            ..EngineConfig::default()
        };
        let mut engine = Engine::new(config, f.bounds.clone(), &[Sample::new(x0, z0)]).unwrap();
        while !engine.is_exhausted() {
            let x = engine.ask().unwrap();
            engine.tell(f.evaluate(&x)).unwrap();
            let h = engine.history();
            let slope = MU * h.gamma();
            for c in engine.exploration_pool().candidates(h) {
                let mut lo = lower_bound(&c.location, h, MU).unwrap();
                let mut hi = upper_bound(&c.location, h, MU).unwrap();
                if let Some((corner, zv)) = &c.mirror {
                    let d = distance(&c.location, corner);
                    lo = lo.max(zv - slope * d);
                    hi = hi.min(zv + slope * d);
                }
                assert!(approx_le(c.lower, lo, EPS));
                assert!(approx_le(hi, c.upper, EPS));
                if engine.gamma_after(c.created_at) == Some(h.gamma()) {
                    assert!(approx_eq(c.lower, lo, EPS) && approx_eq(c.upper, hi, EPS));
                }
            }
            for (_, loc, cached) in engine.exploitation_entries() {
                assert!(approx_eq(cached, lower_bound(loc, h, MU).unwrap(), EPS));
            }
        }
    }
}

#[test]
fn benchmark_runs_respect_driver_invariants() {
    for kind in BenchKind::ALL {
        for dim in [2, 4] {
            let f = make(kind, dim).unwrap();
            let engine = benchmark_run(&f, 150, 3);
            let h = engine.history();
            assert_eq!(h.len(), 150);
            for i in 0..h.len() {
                assert!(f.bounds.contains(h.x(i)));
            }
            let reports = engine.reports();
            assert!(reports.windows(2).all(|w| w[1].best_z <= w[0].best_z));
            assert!(reports.iter().all(|r| f.bounds.contains(&r.next_point)));
        }
    }
}

#[test]
fn replay_is_bit_identical() {
    let f = make(BenchKind::Schwefel, 3).unwrap();
    let a = benchmark_run(&f, 120, 9);
    let b = benchmark_run(&f, 120, 9);
    assert_eq!(a.reports(), b.reports());
    for i in 0..a.history().len() {
        assert_eq!(a.history().x(i), b.history().x(i));
        assert_eq!(a.history().z(i).to_bits(), b.history().z(i).to_bits());
    }
}

fn max_gap_to_samples(h: &History<f64>, upto: usize, space: &SearchSpace<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..100 {
        for b in 0..100 {
            let p: Vec<f64> = [a, b]
                .iter()
                .enumerate()
                .map(|(d, &k)| {
                    space.lower()[d] + (space.upper()[d] - space.lower()[d]) * k as f64 / 99.0
                })
                .collect();
            let nearest = (0..upto)
                .map(|i| distance(&p, h.x(i)))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
    }
    worst
}

#[test]
fn coverage_shrinks_on_a_two_dimensional_run() {
    let f = make(BenchKind::Deb1, 2).unwrap();
    let engine = benchmark_run(&f, 300, 1);
    let h = engine.history();
    let trace: Vec<f64> = (1..=6)
        .map(|k| max_gap_to_samples(h, 50 * k, &f.bounds))
        .collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    assert!(trace[5] < trace[0]);
}

#[test]
fn gap_certificate_covers_the_true_gap() {
    let mut seed = 0;
    for kind in [
        BenchKind::Deb1,
        BenchKind::StyblinskiTang,
        BenchKind::Salomon,
    ] {
        for dim in [1, 2] {
            let f = make(kind, dim).unwrap();
            let gamma_o = f.lipschitz_bound().unwrap();
            seed += 1;
            let space = f.bounds.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = space.sample_uniform(&mut rng);
            let config = EngineConfig {
                budget: 40,
                ..EngineConfig::default()
            };
            let out = run(|x: &[f64]| f.evaluate(x), &[x0], config, space.clone()).unwrap();
            let gamma = out.history.gamma().max(gamma_o / MU);
            let cert = gap_upper_bound_with_gamma(&out.history, &space, MU, gamma, 201).unwrap();
            let true_gap = out.best.z - f.known_optimum;
            assert!(
                cert.delta_bar + cert.slack >= true_gap - EPS,
                "{kind} {dim}D"
            );
        }
    }
}
