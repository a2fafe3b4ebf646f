//! Paths, uniform sampling of bounded successful paths, conditioned
//! sampling and isotropic random walks.

use std::sync::{Arc, OnceLock};

use crate::automaton::{must_visit, Automaton, ProductTag, StateId, Transition};
use crate::count::{num_paths, CountTable, PathCountTable, Weight};
use crate::error::{Error, Result};
use crate::rng::RngHandle;

/// A sequence of chained transitions starting in `start`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    start: StateId,
    transitions: Vec<Transition>,
}

impl Path {
    pub fn new(start: StateId, transitions: Vec<Transition>) -> Self {
        debug_assert!(transitions.first().is_none_or(|t| t.source == start));
        debug_assert!(transitions.windows(2).all(|w| w[0].target == w[1].source));
        Self { start, transitions }
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn end(&self) -> StateId {
        self.transitions.last().map_or(self.start, |t| t.target)
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Every state on the path, in order of occurrence (with repeats).
    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        std::iter::once(self.start).chain(self.transitions.iter().map(|t| t.target))
    }

    /// Sorted, de-duplicated visited states.
    pub fn visited_states(&self) -> Vec<StateId> {
        let mut v: Vec<StateId> = self.states().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn visits(&self, q: StateId) -> bool {
        self.states().any(|s| s == q)
    }

    pub fn is_successful(&self, a: &Automaton) -> bool {
        !self.is_empty() && a.is_initial(self.start) && a.is_final(self.end())
    }

    /// The label word, e.g. `acd`. Symbols are concatenated when all are
    /// single characters and space-separated otherwise.
    pub fn word(&self, a: &Automaton) -> String {
        let labels: Vec<&str> = self
            .transitions
            .iter()
            .map(|t| a.symbol_name(t.symbol))
            .collect();
        if labels.iter().all(|l| l.chars().count() == 1) {
            labels.concat()
        } else {
            labels.join(" ")
        }
    }

    /// One `p a p'` triple per line.
    pub fn render(&self, a: &Automaton) -> String {
        let mut out = String::new();
        for t in &self.transitions {
            out.push_str(a.state_name(t.source));
            out.push(' ');
            out.push_str(a.symbol_name(t.symbol));
            out.push(' ');
            out.push_str(a.state_name(t.target));
            out.push('\n');
        }
        out
    }
}

fn draw_from<W: Weight>(a: &Automaton, table: &CountTable<W>, rng: &mut RngHandle) -> Path {
    // One uniform draw indexes the whole bounded language; the remainder
    // left after each choice is uniform within the chosen block.
    let mut x = table.grand_total().sample_below(rng);
    let bound = table.totals().len() - 1;
    let (mut state, mut remaining) = 'pick: {
        for len in 1..=bound {
            for &s in a.initials() {
                let c = table.count(s, len);
                if x < *c {
                    break 'pick (s, len);
                }
                x = x.sub(c);
            }
        }
        unreachable!("draw exceeded grand total");
    };
    let start = state;
    let mut transitions = Vec::with_capacity(remaining);
    while remaining > 0 {
        let mut chosen = None;
        for t in a.out_transitions(state) {
            let c = table.count(t.target, remaining - 1);
            if x < *c {
                chosen = Some(*t);
                break;
            }
            x = x.sub(c);
        }
        let t = chosen.expect("completion counts are consistent");
        transitions.push(t);
        state = t.target;
        remaining -= 1;
    }
    Path::new(start, transitions)
}

/// Draws one path uniformly among the successful paths of length
/// `1..=bound` counted by `table`.
pub fn sample_one(a: &Automaton, table: &PathCountTable, rng: &mut RngHandle) -> Result<Path> {
    if table.is_empty() {
        return Err(Error::EmptyLanguage {
            bound: table.bound(),
        });
    }
    Ok(match table {
        PathCountTable::Small(t) => draw_from(a, t, rng),
        PathCountTable::Big(t) => draw_from(a, t, rng),
    })
}

/// `k` independent uniform draws.
pub fn sample_uniform(
    a: &Automaton,
    table: &PathCountTable,
    k: usize,
    rng: &mut RngHandle,
) -> Result<Vec<Path>> {
    (0..k).map(|_| sample_one(a, table, rng)).collect()
}

/// Uniform sampler over the bounded successful paths that visit a fixed
/// state, built on the must-visit product.
#[derive(Debug, Clone)]
pub struct ConditionedSampler {
    target: StateId,
    product: Automaton,
    tags: Vec<ProductTag>,
    table: PathCountTable,
}

impl ConditionedSampler {
    /// `None` when no successful path of length `1..=bound` visits `q`.
    pub fn new(a: &Automaton, q: StateId, bound: usize) -> Option<Self> {
        let (product, tags) = must_visit(a, q).ok()?;
        let table = num_paths(&product, bound);
        if table.is_empty() {
            return None;
        }
        Some(Self {
            target: q,
            product,
            tags,
            table,
        })
    }

    pub fn target(&self) -> StateId {
        self.target
    }

    pub fn table(&self) -> &PathCountTable {
        &self.table
    }

    pub fn product(&self) -> &Automaton {
        &self.product
    }

    /// A path of the original automaton, projected through the product tags.
    pub fn sample(&self, rng: &mut RngHandle) -> Path {
        let p = sample_one(&self.product, &self.table, rng).expect("table is non-empty");
        let base = |s: StateId| self.tags[s as usize].base;
        Path::new(
            base(p.start()),
            p.transitions()
                .iter()
                .map(|t| Transition::new(base(t.source), t.symbol, base(t.target)))
                .collect(),
        )
    }
}

/// `k` paths uniform among the bounded successful paths of `a` visiting `q`.
pub fn sample_visiting(
    a: &Automaton,
    q: StateId,
    bound: usize,
    k: usize,
    rng: &mut RngHandle,
) -> Result<Vec<Path>> {
    let sampler = ConditionedSampler::new(a, q, bound).ok_or(Error::EmptyLanguage { bound })?;
    Ok((0..k).map(|_| sampler.sample(rng)).collect())
}

/// Lazily built, shared conditioned samplers for every state of a model.
#[derive(Debug)]
pub struct VisitingCache {
    model: Arc<Automaton>,
    bound: usize,
    slots: Vec<OnceLock<Option<Arc<ConditionedSampler>>>>,
}

impl VisitingCache {
    pub fn new(model: Arc<Automaton>, bound: usize) -> Self {
        let slots = (0..model.num_states()).map(|_| OnceLock::new()).collect();
        Self {
            model,
            bound,
            slots,
        }
    }

    pub fn get(&self, q: StateId) -> Option<Arc<ConditionedSampler>> {
        self.slots[q as usize]
            .get_or_init(|| ConditionedSampler::new(&self.model, q, self.bound).map(Arc::new))
            .clone()
    }
}

/// Isotropic random walk: uniform initial state, then uniform out-transition
/// until a dead end or `max_len` steps.
pub fn random_walk(a: &Automaton, max_len: usize, rng: &mut RngHandle) -> Path {
    let start = a.initials()[rng.below(a.initials().len())];
    let mut state = start;
    let mut transitions = Vec::new();
    while transitions.len() < max_len {
        let outs = a.out_transitions(state);
        if outs.is_empty() {
            break;
        }
        let t = outs[rng.below(outs.len())];
        transitions.push(t);
        state = t.target;
    }
    Path::new(start, transitions)
}
