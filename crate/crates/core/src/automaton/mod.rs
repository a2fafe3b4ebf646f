//! Finite automata over dense state ids.
//!
//! An [`Automaton`] is immutable once built. Transitions are kept sorted by
//! `(source, symbol, target)` and indexed by source, so the out-edges of a
//! state are a contiguous slice.

mod format;
mod product;

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub use format::parse_automaton;
pub use product::{must_visit, must_visit_any, ProductTag};

pub type StateId = u32;
pub type SymbolId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: StateId,
    pub symbol: SymbolId,
    pub target: StateId,
}

impl Transition {
    pub fn new(source: StateId, symbol: SymbolId, target: StateId) -> Self {
        Self {
            source,
            symbol,
            target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    state_names: Vec<String>,
    alphabet: Vec<String>,
    transitions: Vec<Transition>,
    // out_offsets[s]..out_offsets[s + 1] indexes the out-edges of s
    out_offsets: Vec<usize>,
    initials: Vec<StateId>,
    finals: Vec<StateId>,
    is_final: Vec<bool>,
}

impl Automaton {
    /// Builds an automaton, validating every id and rejecting duplicate
    /// transitions, duplicate state names and empty initial/final sets.
    pub fn new(
        state_names: Vec<String>,
        alphabet: Vec<String>,
        mut transitions: Vec<Transition>,
        initials: impl IntoIterator<Item = StateId>,
        finals: impl IntoIterator<Item = StateId>,
    ) -> Result<Self> {
        let n = state_names.len();
        let mut seen = HashSet::with_capacity(n);
        for name in &state_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidAutomaton(format!(
                    "duplicate state name `{name}`"
                )));
            }
        }
        let check_state = |s: StateId| -> Result<()> {
            if (s as usize) < n {
                Ok(())
            } else {
                Err(Error::InvalidAutomaton(format!(
                    "state id {s} out of range (n = {n})"
                )))
            }
        };
        for t in &transitions {
            check_state(t.source)?;
            check_state(t.target)?;
            if t.symbol as usize >= alphabet.len() {
                return Err(Error::InvalidAutomaton(format!(
                    "symbol id {} out of range (|alphabet| = {})",
                    t.symbol,
                    alphabet.len()
                )));
            }
        }
        transitions.sort_unstable();
        if let Some(w) = transitions.windows(2).find(|w| w[0] == w[1]) {
            let t = w[0];
            return Err(Error::InvalidAutomaton(format!(
                "duplicate transition ({}, {}, {})",
                state_names[t.source as usize],
                alphabet[t.symbol as usize],
                state_names[t.target as usize]
            )));
        }

        let mut initials: Vec<StateId> = initials.into_iter().collect();
        let mut finals: Vec<StateId> = finals.into_iter().collect();
        for &s in initials.iter().chain(&finals) {
            check_state(s)?;
        }
        initials.sort_unstable();
        initials.dedup();
        finals.sort_unstable();
        finals.dedup();
        if initials.is_empty() {
            return Err(Error::EmptyInitial);
        }
        if finals.is_empty() {
            return Err(Error::EmptyFinal);
        }

        let mut out_offsets = vec![0usize; n + 1];
        for t in &transitions {
            out_offsets[t.source as usize + 1] += 1;
        }
        for s in 0..n {
            out_offsets[s + 1] += out_offsets[s];
        }
        let mut is_final = vec![false; n];
        for &f in &finals {
            is_final[f as usize] = true;
        }

        Ok(Self {
            state_names,
            alphabet,
            transitions,
            out_offsets,
            initials,
            finals,
            is_final,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s as usize]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as StateId)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn symbol_name(&self, a: SymbolId) -> &str {
        &self.alphabet[a as usize]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn out_transitions(&self, s: StateId) -> &[Transition] {
        let s = s as usize;
        &self.transitions[self.out_offsets[s]..self.out_offsets[s + 1]]
    }

    pub fn initials(&self) -> &[StateId] {
        &self.initials
    }

    pub fn finals(&self) -> &[StateId] {
        &self.finals
    }

    pub fn is_initial(&self, s: StateId) -> bool {
        self.initials.binary_search(&s).is_ok()
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.is_final[s as usize]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.num_states() as StateId
    }

    /// States reachable from an initial state.
    pub fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = self.initials.clone();
        for &s in &stack {
            seen[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for t in self.out_transitions(s) {
                if !seen[t.target as usize] {
                    seen[t.target as usize] = true;
                    stack.push(t.target);
                }
            }
        }
        seen
    }

    /// States from which a final state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for t in &self.transitions {
            preds[t.target as usize].push(t.source);
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<StateId> = self.finals.clone();
        for &s in &stack {
            seen[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &preds[s as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    pub fn is_trim(&self) -> bool {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        acc.iter().zip(&coacc).all(|(a, c)| *a && *c)
    }

    /// Restricts to states that are both accessible and co-accessible.
    pub fn trim(&self) -> Result<Automaton> {
        self.trim_with_map().map(|(a, _)| a)
    }

    /// Like [`trim`](Self::trim), also returning for each surviving state
    /// its id in `self`.
    pub fn trim_with_map(&self) -> Result<(Automaton, Vec<StateId>)> {
        let keep: Vec<bool> = self
            .accessible()
            .into_iter()
            .zip(self.coaccessible())
            .map(|(a, c)| a && c)
            .collect();
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[bool]) -> Result<(Automaton, Vec<StateId>)> {
        let mut new_id = vec![StateId::MAX; self.num_states()];
        let mut old_id = Vec::new();
        for s in self.states() {
            if keep[s as usize] {
                new_id[s as usize] = old_id.len() as StateId;
                old_id.push(s);
            }
        }
        let initials: Vec<StateId> = self
            .initials
            .iter()
            .filter(|&&s| keep[s as usize])
            .map(|&s| new_id[s as usize])
            .collect();
        let finals: Vec<StateId> = self
            .finals
            .iter()
            .filter(|&&s| keep[s as usize])
            .map(|&s| new_id[s as usize])
            .collect();
        if initials.is_empty() || finals.is_empty() {
            return Err(Error::EmptyTrim);
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep[t.source as usize] && keep[t.target as usize])
            .map(|t| {
                Transition::new(
                    new_id[t.source as usize],
                    t.symbol,
                    new_id[t.target as usize],
                )
            })
            .collect();
        let names = old_id
            .iter()
            .map(|&s| self.state_names[s as usize].clone())
            .collect();
        let trimmed = Automaton::new(names, self.alphabet.clone(), transitions, initials, finals)?;
        Ok((trimmed, old_id))
    }

    /// Breadth-first distance from the initial-state set to every state;
    /// `None` for unreachable states.
    pub fn distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_states()];
        let mut queue = VecDeque::new();
        for &s in &self.initials {
            dist[s as usize] = Some(0);
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            let d = dist[s as usize].unwrap();
            for t in self.out_transitions(s) {
                if dist[t.target as usize].is_none() {
                    dist[t.target as usize] = Some(d + 1);
                    queue.push_back(t.target);
                }
            }
        }
        dist
    }

    /// Largest BFS distance from the initial states to any reachable state.
    pub fn eccentricity(&self) -> usize {
        self.distances().into_iter().flatten().max().unwrap_or(0)
    }

    /// Default path-length bound: twice the eccentricity, at least 1.
    pub fn default_length_bound(&self) -> usize {
        (2 * self.eccentricity()).max(1)
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::serialize(self))
    }
}
