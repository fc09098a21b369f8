//! The ask/tell optimizer.
//!
//! Each iteration first tries to exploit: it looks for the point around the
//! current best sample with the lowest predicted lower bound and accepts it
//! if the predicted improvement is at least `alpha * gamma`. Otherwise it
//! explores, sampling the candidate midpoint whose bounds are furthest apart.

mod exploit;
mod explore;

pub use exploit::{exploitation_candidates, improvement_met, select_exploitation};
pub use explore::{ExplorationPool, MidpointKey, PoolCandidate};

use exploit::ExploitationCache;

use crate::bounds;
use crate::error::{Result, SmgoError};
use crate::history::{History, Sample};
use crate::scalar::Scalar;
use crate::space::SearchSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig<T> {
    /// Exploitation parameter in `[0, 1)`; smaller values exploit more.
    pub alpha: T,
    /// Lipschitz overestimation factor, `> 1`.
    pub mu: T,
    /// Total number of cost evaluations, initial samples included.
    pub budget: usize,
    pub seed: u64,
    /// Relative tolerance for bound equalities.
    pub eps_eq: T,
    /// Minimum sample separation; `None` derives it from the box diameter.
    pub eps_dup: Option<T>,
}

impl<T: Scalar> Default for EngineConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.001),
            mu: T::lit(1.025),
            budget: 500,
            seed: 0,
            eps_eq: T::default_eq_tol(),
            eps_dup: None,
        }
    }
}

impl<T: Scalar> EngineConfig<T> {
    // the negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero() && self.alpha < T::one()) {
            return Err(SmgoError::InvalidConfig(format!(
                "alpha = {} must lie in [0, 1)",
                self.alpha
            )));
        }
        if !(self.mu > T::one()) || !self.mu.is_finite() {
            return Err(SmgoError::InvalidConfig(format!(
                "mu = {} must exceed 1",
                self.mu
            )));
        }
        if self.budget == 0 {
            return Err(SmgoError::InvalidConfig("budget must be at least 1".into()));
        }
        if !(self.eps_eq >= T::zero()) {
            return Err(SmgoError::InvalidConfig(
                "eps_eq must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Exploitation around the best sample.
    Theta,
    /// Exploration at the most uncertain midpoint.
    Psi,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Theta => "theta",
            Mode::Psi => "psi",
        }
    }
}

/// What the engine expected at the point it asked for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction<T> {
    /// Lower bound at an exploitation point.
    Lower(T),
    /// Bound width at an exploration point.
    Uncertainty(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport<T> {
    /// Number of samples when the point was asked for.
    pub iteration: usize,
    pub mode: Mode,
    pub next_point: Vec<T>,
    pub prediction: Prediction<T>,
    pub gamma: T,
    pub best_z: T,
}

/// Optimizer state driven by alternating [`Engine::ask`] and [`Engine::tell`].
#[derive(Debug, Clone)]
pub struct Engine<T> {
    config: EngineConfig<T>,
    history: History<T>,
    pool: ExplorationPool<T>,
    theta: ExploitationCache<T>,
    pending: Option<Vec<T>>,
    reports: Vec<IterationReport<T>>,
    /// Gamma right after each sample joined.
    gamma_log: Vec<T>,
}

impl<T: Scalar> Engine<T> {
    /// Starts from already evaluated initial samples.
    pub fn new(
        config: EngineConfig<T>,
        space: SearchSpace<T>,
        initial: &[Sample<T>],
    ) -> Result<Self> {
        config.validate()?;
        if initial.len() > config.budget {
            return Err(SmgoError::InvalidConfig(format!(
                "{} initial samples exceed the budget of {}",
                initial.len(),
                config.budget
            )));
        }
        let mut history = match config.eps_dup {
            Some(tol) => History::with_dup_tolerance(space, tol),
            None => History::new(space),
        };
        history.extend_initial(initial)?;
        // all-equal initial values give a zero slope; keep the cone slope positive
        history.raise_gamma(T::gamma_seed());
        let pool = ExplorationPool::build(&history, config.mu, config.seed);
        let theta = ExploitationCache::build(&history, config.mu);
        let gamma_log = vec![history.gamma(); history.len()];
        Ok(Self {
            config,
            history,
            pool,
            theta,
            pending: None,
            reports: Vec::new(),
            gamma_log,
        })
    }

    pub fn config(&self) -> &EngineConfig<T> {
        &self.config
    }

    pub fn history(&self) -> &History<T> {
        &self.history
    }

    pub fn gamma(&self) -> T {
        self.history.gamma()
    }

    pub fn n(&self) -> usize {
        self.history.len()
    }

    pub fn best(&self) -> (&[T], T) {
        self.history.best().expect("engine history is never empty")
    }

    pub fn reports(&self) -> &[IterationReport<T>] {
        &self.reports
    }

    pub fn pending(&self) -> Option<&[T]> {
        self.pending.as_deref()
    }

    pub fn is_exhausted(&self) -> bool {
        self.history.len() >= self.config.budget
    }

    pub fn exploration_pool(&self) -> &ExplorationPool<T> {
        &self.pool
    }

    /// Cached exploitation candidates as `(segment sample, location, lower bound)`.
    pub fn exploitation_entries(&self) -> impl Iterator<Item = (usize, &[T], T)> + '_ {
        self.theta.entries().iter().map(|e| {
            (
                e.segment,
                e.bound.location.as_slice(),
                e.bound.lower_value(),
            )
        })
    }

    /// Gamma in force right after sample `index` was added.
    pub fn gamma_after(&self, index: usize) -> Option<T> {
        self.gamma_log.get(index).copied()
    }

    /// Proposes the next point to evaluate.
    pub fn ask(&mut self) -> Result<Vec<T>> {
        if self.pending.is_some() {
            return Err(SmgoError::ProtocolViolation(
                "ask called twice without tell",
            ));
        }
        if self.is_exhausted() {
            return Err(SmgoError::BudgetExhausted(self.config.budget));
        }
        let (_, best_z) = self.best();
        let gamma = self.gamma();
        let tol = self.config.eps_eq;

        let exploit = if self.history.len() >= 2 {
            let (x, z_lb) = self.theta.select(&self.history, self.config.mu, tol)?;
            let accept = improvement_met(z_lb, best_z, self.config.alpha, gamma, tol)
                && self.history.find_duplicate(&x).is_none();
            accept.then_some((x, z_lb))
        } else {
            None
        };

        let (mode, mut point, prediction) = match exploit {
            Some((x, z_lb)) => (Mode::Theta, x, Prediction::Lower(z_lb)),
            None => {
                let (x, lam) = self.pool.select(&self.history)?;
                (Mode::Psi, x, Prediction::Uncertainty(lam))
            }
        };
        self.history.space().clamp(&mut point);

        self.reports.push(IterationReport {
            iteration: self.history.len(),
            mode,
            next_point: point.clone(),
            prediction,
            gamma,
            best_z,
        });
        self.pending = Some(point.clone());
        Ok(point)
    }

    /// Records the cost of the pending point. A non-finite `z` is rejected and
    /// leaves the state untouched.
    pub fn tell(&mut self, z: T) -> Result<()> {
        let Some(x) = self.pending.as_ref() else {
            return Err(SmgoError::ProtocolViolation(
                "tell called without a pending ask",
            ));
        };
        if !z.is_finite() {
            return Err(SmgoError::NonFiniteValue);
        }
        let sample = Sample::new(x.clone(), z);
        let gamma = bounds::update_gamma(self.history.gamma(), &self.history, &sample)?;
        let index = self.history.add_sample(sample)?;
        self.history.raise_gamma(gamma);
        self.pending = None;

        self.pool.refresh(&self.history, index);
        self.theta.refresh(&self.history, index, self.config.mu);
        self.gamma_log.push(self.history.gamma());
        Ok(())
    }
}

/// Result of a complete optimization run.
#[derive(Debug, Clone)]
pub struct RunOutcome<T> {
    pub best: Sample<T>,
    pub reports: Vec<IterationReport<T>>,
    pub history: History<T>,
}

/// Evaluates `initial_points`, then alternates ask/tell until `config.budget`
/// evaluations of `f` have been made in total.
pub fn run<T, F>(
    mut f: F,
    initial_points: &[Vec<T>],
    config: EngineConfig<T>,
    space: SearchSpace<T>,
) -> Result<RunOutcome<T>>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    if initial_points.is_empty() {
        return Err(SmgoError::EmptyHistory);
    }
    config.validate()?;
    if initial_points.len() > config.budget {
        return Err(SmgoError::InvalidConfig(format!(
            "{} initial points exceed the budget of {}",
            initial_points.len(),
            config.budget
        )));
    }
    for x in initial_points {
        space.check(x)?;
    }
    let mut initial = Vec::with_capacity(initial_points.len());
    for x in initial_points {
        let z = f(x);
        if !z.is_finite() {
            return Err(SmgoError::NonFiniteValue);
        }
        initial.push(Sample::new(x.clone(), z));
    }
    let mut engine = Engine::new(config, space, &initial)?;
    while !engine.is_exhausted() {
        let x = engine.ask()?;
        let z = f(&x);
        engine.tell(z)?;
    }
    let (bx, bz) = engine.best();
    let best = Sample::new(bx.to_vec(), bz);
    Ok(RunOutcome {
        best,
        reports: engine.reports,
        history: engine.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_sample_engine(alpha: f64) -> Engine<f64> {
        let space = SearchSpace::new(vec![0.0], vec![2.0]).unwrap();
        let config = EngineConfig {
            alpha,
            budget: 10,
            ..EngineConfig::default()
        };
        let init = [Sample::new(vec![0.0], 0.0), Sample::new(vec![1.0], 2.0)];
        Engine::new(config, space, &init).unwrap()
    }

    #[test]
    fn worked_scenario_exploits() {
        let mut e = two_sample_engine(0.001);
        let x = e.ask().unwrap();
        assert!((x[0] - 0.012195).abs() < 1e-6);
        let r = e.reports().last().unwrap();
        assert_eq!(r.mode, Mode::Theta);
        match r.prediction {
            Prediction::Lower(z) => assert!((z + 0.025).abs() < 1e-12),
            _ => panic!("expected a lower-bound prediction"),
        }
    }

    #[test]
    fn large_alpha_explores() {
        // a box whose corners coincide with the samples, so the pair midpoint is the only candidate
        let space = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
        let config = EngineConfig {
            alpha: 0.9,
            budget: 10,
            ..EngineConfig::default()
        };
        let init = [Sample::new(vec![0.0], 0.0), Sample::new(vec![1.0], 2.0)];
        let mut e = Engine::new(config, space, &init).unwrap();
        assert_eq!(e.ask().unwrap(), vec![0.5]);
        assert_eq!(e.reports()[0].mode, Mode::Psi);
    }

    #[test]
    fn single_initial_sample_explores_corners() {
        let space = SearchSpace::cube(0.0, 1.0, 2).unwrap();
        let mut e = Engine::new(
            EngineConfig::default(),
            space,
            &[Sample::new(vec![0.2, 0.2], 1.0)],
        )
        .unwrap();
        e.ask().unwrap();
        assert_eq!(e.reports()[0].mode, Mode::Psi);
        // farthest corner (1, 1) gives the widest bounds
        assert_eq!(e.pending().unwrap(), &[0.6, 0.6]);
    }

    #[test]
    fn protocol_is_enforced() {
        let mut e = two_sample_engine(0.001);
        assert_eq!(
            e.tell(1.0),
            Err(SmgoError::ProtocolViolation(
                "tell called without a pending ask"
            ))
        );
        e.ask().unwrap();
        assert!(matches!(e.ask(), Err(SmgoError::ProtocolViolation(_))));
        assert_eq!(e.tell(f64::NAN), Err(SmgoError::NonFiniteValue));
        assert_eq!(e.n(), 2);
        assert!(e.pending().is_some());
        e.tell(-0.1).unwrap();
        assert_eq!(e.n(), 3);
    }

    #[test]
    fn steeper_slope_raises_gamma() {
        let mut e = two_sample_engine(0.001);
        let x = e.ask().unwrap();
        // |5 - 0| / 0.012195 is far above the current 2
        e.tell(5.0).unwrap();
        assert!((e.gamma() - 5.0 / x[0]).abs() < 1e-9);
    }

    #[test]
    fn budget_is_enforced() {
        let space = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
        let config = EngineConfig {
            budget: 2,
            ..EngineConfig::default()
        };
        let init = [Sample::new(vec![0.0], 0.0), Sample::new(vec![1.0], 2.0)];
        let mut e = Engine::new(config, space, &init).unwrap();
        assert_eq!(e.ask(), Err(SmgoError::BudgetExhausted(2)));
    }

    #[test]
    fn run_with_budget_of_initials() {
        let space = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
        let config = EngineConfig {
            budget: 2,
            ..EngineConfig::default()
        };
        let mut calls = 0;
        let out = run(
            |x: &[f64]| {
                calls += 1;
                x[0] * 3.0
            },
            &[vec![0.4], vec![0.1]],
            config,
            space,
        )
        .unwrap();
        assert_eq!(calls, 2);
        assert!(out.reports.is_empty());
        assert_eq!(out.best, Sample::new(vec![0.1], 0.30000000000000004));
    }

    #[test]
    fn run_finds_kink_minimum() {
        let space = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
        let config = EngineConfig {
            budget: 50,
            ..EngineConfig::default()
        };
        let mut calls = 0;
        let out = run(
            |x: &[f64]| {
                calls += 1;
                (x[0] - 0.3).abs()
            },
            &[vec![0.83]],
            config,
            space,
        )
        .unwrap();
        assert_eq!(calls, 50);
        assert!(out.best.z <= 0.01, "best {}", out.best.z);
    }

    #[test]
    fn invalid_configs() {
        let space = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
        let init = [Sample::new(vec![0.5], 0.0)];
        for cfg in [
            EngineConfig {
                alpha: 1.0,
                ..EngineConfig::default()
            },
            EngineConfig {
                mu: 1.0,
                ..EngineConfig::default()
            },
            EngineConfig {
                budget: 0,
                ..EngineConfig::default()
            },
        ] {
            assert!(matches!(
                Engine::new(cfg, space.clone(), &init),
                Err(SmgoError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn single_precision_run() {
        let space = SearchSpace::cube(-1.0f32, 1.0, 2).unwrap();
        let config = EngineConfig {
            budget: 60,
            ..EngineConfig::default()
        };
        let out = run(
            |x: &[f32]| x.iter().map(|v| (v - 0.25) * (v - 0.25)).sum(),
            &[vec![-0.7, 0.6]],
            config,
            space,
        )
        .unwrap();
        assert!(out.best.z < 0.05, "best {}", out.best.z);
    }
}
