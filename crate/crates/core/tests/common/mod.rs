//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use pathcov::automaton::{Automaton, StateId, Transition};
use pathcov::{parse_automaton, Path, RngHandle};

pub const TOY: &str = include_str!("../../../../models/toy.aut");

pub fn toy() -> Automaton {
    parse_automaton(TOY).unwrap()
}

/// Every successful path of length `1..=bound`, by depth-first search.
pub fn enumerate_paths(a: &Automaton, bound: usize) -> Vec<Path> {
    fn extend(
        a: &Automaton,
        start: StateId,
        prefix: &mut Vec<Transition>,
        bound: usize,
        out: &mut Vec<Path>,
    ) {
        let state = prefix.last().map_or(start, |t| t.target);
        if !prefix.is_empty() && a.is_final(state) {
            out.push(Path::new(start, prefix.clone()));
        }
        if prefix.len() == bound {
            return;
        }
        for &t in a.out_transitions(state) {
            prefix.push(t);
            extend(a, start, prefix, bound, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for &i in a.initials() {
        extend(a, i, &mut Vec::new(), bound, &mut out);
    }
    out
}

pub fn count_visiting(paths: &[Path], q: StateId) -> u64 {
    paths.iter().filter(|p| p.visits(q)).count() as u64
}

pub fn count_visiting_both(paths: &[Path], i: StateId, j: StateId) -> u64 {
    paths.iter().filter(|p| p.visits(i) && p.visits(j)).count() as u64
}

/// Random nondeterministic automaton on `1..=max_states` states with out-degree
/// at most 3, trimmed; `None` when nothing survives trimming.
pub fn random_small_automaton(max_states: usize, rng: &mut RngHandle) -> Option<Automaton> {
    let n = 1 + rng.below(max_states);
    let k = 1 + rng.below(3);
    let names: Vec<String> = (0..n).map(|s| format!("q{s}")).collect();
    let symbols: Vec<String> = (0..k)
        .map(|a| ((b'a' + a as u8) as char).to_string())
        .collect();
    let mut transitions = Vec::new();
    for s in 0..n {
        for _ in 0..rng.below(4) {
            let t = Transition::new(s as u32, rng.below(k) as u32, rng.below(n) as u32);
            if !transitions.contains(&t) {
                transitions.push(t);
            }
        }
    }
    let mut initials: Vec<u32> = (0..n as u32).filter(|_| rng.below(4) == 0).collect();
    if initials.is_empty() {
        initials.push(0);
    }
    let mut finals: Vec<u32> = (0..n as u32).filter(|_| rng.below(2) == 0).collect();
    if finals.is_empty() {
        finals.push(rng.below(n) as u32);
    }
    Automaton::new(names, symbols, transitions, initials, finals)
        .ok()?
        .trim()
        .ok()
}

/// Pearson statistic of `observed` counts against `expected` probabilities.
pub fn chi_square<K: std::hash::Hash + Eq>(
    observed: &HashMap<K, u64>,
    expected: &HashMap<K, f64>,
    draws: u64,
) -> f64 {
    assert!(
        observed.keys().all(|k| expected.contains_key(k)),
        "observation outside the support"
    );
    expected
        .iter()
        .map(|(k, &p)| {
            let e = p * draws as f64;
            let o = *observed.get(k).unwrap_or(&0) as f64;
            (o - e) * (o - e) / e
        })
        .sum()
}

pub fn histogram(paths: impl IntoIterator<Item = Path>) -> HashMap<Path, u64> {
    let mut h = HashMap::new();
    for p in paths {
        *h.entry(p).or_insert(0) += 1;
    }
    h
}

/// 0.999 quantile of chi-square with 15 degrees of freedom.
pub const CHI2_15_999: f64 = 37.70;

/// 0.999 quantile of chi-square with 3 degrees of freedom.
pub const CHI2_3_999: f64 = 16.27;
