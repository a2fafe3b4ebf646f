//! Path-generation strategies and the registry that builds them by name.
//!
//! A [`PathStrategy`] is a recipe (`uniform`, `approx:10:10`, ...). Preparing
//! it for a model runs any expensive preprocessing once (alpha matrix and
//! LP for the biased strategies) and yields a [`PathGenerator`] that trials
//! share read-only.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};

use crate::alpha::{alpha_approx, alpha_exact, AlphaMatrix};
use crate::automaton::{Automaton, StateId};
use crate::count::{num_paths, PathCountTable};
use crate::error::{Error, Result};
use crate::lp::{build_lp, solve_lp, CoverageDistribution};
use crate::path::{random_walk, sample_one, Path, VisitingCache};
use crate::rng::RngHandle;

/// Everything a strategy may need to know about the model it runs on.
#[derive(Debug, Clone)]
pub struct ModelContext {
    pub automaton: Arc<Automaton>,
    pub bound: usize,
    /// Seed for preprocessing randomness (the approximate alpha matrix).
    pub seed: u64,
}

impl ModelContext {
    pub fn new(automaton: Arc<Automaton>, bound: usize, seed: u64) -> Self {
        Self {
            automaton,
            bound,
            seed,
        }
    }
}

/// A named way of producing test paths.
pub trait PathStrategy: Send + Sync + fmt::Debug {
    /// Canonical spelling, accepted back by [`StrategyRegistry::build`].
    fn label(&self) -> String;

    fn prepare(&self, ctx: &ModelContext) -> Result<Box<dyn PathGenerator>>;
}

/// A prepared strategy: draws one path per call.
pub trait PathGenerator: Send + Sync {
    fn generate(&self, rng: &mut RngHandle) -> Result<Path>;

    /// The biased distribution, for strategies that solve the LP.
    fn distribution(&self) -> Option<&CoverageDistribution> {
        None
    }

    /// The alpha matrix the distribution was computed from.
    fn alpha(&self) -> Option<&AlphaMatrix> {
        None
    }
}

/// Isotropic random walk of at most `bound` steps.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomWalk;

/// Uniform among bounded successful paths.
#[derive(Debug, Clone, Copy, Default)]
pub struct Uniform;

/// LP-biased with the exact alpha matrix.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactBiased;

/// LP-biased with alpha estimated from `m_factor * n` samples and
/// refinement threshold `r`.
#[derive(Debug, Clone, Copy)]
pub struct ApproxBiased {
    pub m_factor: usize,
    pub r: usize,
}

impl PathStrategy for RandomWalk {
    fn label(&self) -> String {
        "rw".into()
    }

    fn prepare(&self, ctx: &ModelContext) -> Result<Box<dyn PathGenerator>> {
        Ok(Box::new(WalkGenerator {
            automaton: ctx.automaton.clone(),
            max_len: ctx.bound,
        }))
    }
}

impl PathStrategy for Uniform {
    fn label(&self) -> String {
        "uniform".into()
    }

    fn prepare(&self, ctx: &ModelContext) -> Result<Box<dyn PathGenerator>> {
        let table = num_paths(&ctx.automaton, ctx.bound);
        if table.is_empty() {
            return Err(Error::EmptyLanguage { bound: ctx.bound });
        }
        Ok(Box::new(UniformGenerator {
            automaton: ctx.automaton.clone(),
            table,
        }))
    }
}

impl PathStrategy for ExactBiased {
    fn label(&self) -> String {
        "exact".into()
    }

    fn prepare(&self, ctx: &ModelContext) -> Result<Box<dyn PathGenerator>> {
        let alpha = alpha_exact(&ctx.automaton, ctx.bound)?;
        BiasedGenerator::from_alpha(ctx, alpha).map(|g| Box::new(g) as Box<dyn PathGenerator>)
    }
}

impl PathStrategy for ApproxBiased {
    fn label(&self) -> String {
        format!("approx:{}:{}", self.m_factor, self.r)
    }

    fn prepare(&self, ctx: &ModelContext) -> Result<Box<dyn PathGenerator>> {
        let m = self.m_factor * ctx.automaton.num_states();
        let alpha = alpha_approx(&ctx.automaton, ctx.bound, m, self.r, ctx.seed)?;
        BiasedGenerator::from_alpha(ctx, alpha).map(|g| Box::new(g) as Box<dyn PathGenerator>)
    }
}

struct WalkGenerator {
    automaton: Arc<Automaton>,
    max_len: usize,
}

impl PathGenerator for WalkGenerator {
    fn generate(&self, rng: &mut RngHandle) -> Result<Path> {
        Ok(random_walk(&self.automaton, self.max_len, rng))
    }
}

struct UniformGenerator {
    automaton: Arc<Automaton>,
    table: PathCountTable,
}

impl PathGenerator for UniformGenerator {
    fn generate(&self, rng: &mut RngHandle) -> Result<Path> {
        sample_one(&self.automaton, &self.table, rng)
    }
}

/// Picks a state from the LP distribution, then a uniform path through it.
pub struct BiasedGenerator {
    alpha: Option<AlphaMatrix>,
    dist: CoverageDistribution,
    picker: WeightedIndex<f64>,
    cache: VisitingCache,
}

impl BiasedGenerator {
    fn from_alpha(ctx: &ModelContext, alpha: AlphaMatrix) -> Result<Self> {
        let dist = solve_lp(&build_lp(&alpha, None)?)?;
        let mut g = Self::new(ctx.automaton.clone(), dist, ctx.bound)?;
        g.alpha = Some(alpha);
        Ok(g)
    }

    /// Fails with an unreachable-mass error if `dist` puts weight on a state
    /// that no bounded successful path visits.
    pub fn new(
        automaton: Arc<Automaton>,
        dist: CoverageDistribution,
        bound: usize,
    ) -> Result<Self> {
        if dist.pi.len() != automaton.num_states() {
            return Err(Error::Domain(format!(
                "distribution has {} entries for {} states",
                dist.pi.len(),
                automaton.num_states()
            )));
        }
        let weights: Vec<f64> = dist.pi.iter().map(|p| p.max(0.0)).collect();
        let picker = WeightedIndex::new(&weights)
            .map_err(|e| Error::Domain(format!("unusable distribution: {e}")))?;
        let cache = VisitingCache::new(automaton.clone(), bound);
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 && cache.get(i as StateId).is_none() {
                return Err(Error::UnreachableMass {
                    state: automaton.state_name(i as StateId).to_string(),
                });
            }
        }
        Ok(Self {
            alpha: None,
            dist,
            picker,
            cache,
        })
    }
}

impl PathGenerator for BiasedGenerator {
    fn generate(&self, rng: &mut RngHandle) -> Result<Path> {
        let i = self.picker.sample(rng) as StateId;
        let sampler = self.cache.get(i).expect("checked at construction");
        Ok(sampler.sample(rng))
    }

    fn distribution(&self) -> Option<&CoverageDistribution> {
        Some(&self.dist)
    }

    fn alpha(&self) -> Option<&AlphaMatrix> {
        self.alpha.as_ref()
    }
}

/// `k` paths, each through a state drawn from `dist`.
pub fn generate_biased(
    a: &Automaton,
    dist: &CoverageDistribution,
    bound: usize,
    k: usize,
    rng: &mut RngHandle,
) -> Result<Vec<Path>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let g = BiasedGenerator::new(Arc::new(a.clone()), dist.clone(), bound)?;
    (0..k).map(|_| g.generate(rng)).collect()
}

type Factory = fn(&[&str]) -> std::result::Result<Box<dyn PathStrategy>, String>;

/// Strategies by name. A spec is `name` or `name:arg:arg...`.
pub struct StrategyRegistry {
    factories: BTreeMap<&'static str, Factory>,
}

fn no_args(args: &[&str]) -> std::result::Result<(), String> {
    if args.is_empty() {
        Ok(())
    } else {
        Err("takes no arguments".into())
    }
}

fn positive(arg: &str, what: &str) -> std::result::Result<usize, String> {
    arg.parse::<usize>()
        .map_err(|_| format!("{what} must be a non-negative integer, got {arg:?}"))
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("rw", |args| {
            no_args(args).map(|_| Box::new(RandomWalk) as Box<dyn PathStrategy>)
        });
        r.register("uniform", |args| {
            no_args(args).map(|_| Box::new(Uniform) as Box<dyn PathStrategy>)
        });
        r.register("exact", |args| {
            no_args(args).map(|_| Box::new(ExactBiased) as Box<dyn PathStrategy>)
        });
        r.register("approx", |args| {
            let [m, r] = args else {
                return Err("expected approx:<m-factor>:<r>".into());
            };
            let m_factor = positive(m, "m-factor")?;
            if m_factor == 0 {
                return Err("m-factor must be at least 1".into());
            }
            let r = positive(r, "r")?;
            Ok(Box::new(ApproxBiased { m_factor, r }))
        });
        r
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build(&self, spec: &str) -> Result<Box<dyn PathStrategy>> {
        let mut parts = spec.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))?;
        factory(&args).map_err(|reason| Error::InvalidStrategy {
            spec: spec.to_string(),
            reason,
        })
    }
}
