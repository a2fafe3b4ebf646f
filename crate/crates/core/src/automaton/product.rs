//! The two-copy "must visit" construction.
//!
//! Copy 0 holds paths that have not yet met a target state, copy 1 paths
//! that have. Leaving a target state from copy 0 always crosses to copy 1,
//! and only copy-1 states (or a target that is itself final) accept, so
//! successful paths of the product are in length-preserving bijection with
//! the successful paths of the original that visit a target.

use super::{Automaton, StateId, Transition};
use crate::error::{Error, Result};

/// Origin of a product state: `(base, flag)` with `flag` 0 before the
/// target has been visited and 1 after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductTag {
    pub base: StateId,
    pub flag: u8,
}

/// Trimmed product automaton whose successful paths are those of `a`
/// visiting `q`, together with the origin of each product state.
pub fn must_visit(a: &Automaton, q: StateId) -> Result<(Automaton, Vec<ProductTag>)> {
    must_visit_any(a, &[q])
}

/// Generalisation of [`must_visit`] to "visits at least one of `targets`".
pub fn must_visit_any(a: &Automaton, targets: &[StateId]) -> Result<(Automaton, Vec<ProductTag>)> {
    let n = a.num_states();
    let mut is_target = vec![false; n];
    for &q in targets {
        if q as usize >= n {
            return Err(Error::InvalidAutomaton(format!(
                "state id {q} out of range (n = {n})"
            )));
        }
        is_target[q as usize] = true;
    }
    let id = |p: StateId, flag: u32| 2 * p + flag;

    let mut names = Vec::with_capacity(2 * n);
    for p in a.states() {
        for flag in 0..2 {
            names.push(format!("({},{flag})", a.state_name(p)));
        }
    }

    let mut transitions = Vec::with_capacity(2 * a.num_transitions());
    for t in a.transitions() {
        if is_target[t.source as usize] {
            transitions.push(Transition::new(id(t.source, 0), t.symbol, id(t.target, 1)));
        } else {
            transitions.push(Transition::new(id(t.source, 0), t.symbol, id(t.target, 0)));
        }
        transitions.push(Transition::new(id(t.source, 1), t.symbol, id(t.target, 1)));
    }

    let initials = a.initials().iter().map(|&p| id(p, 0));
    let finals = a.finals().iter().map(|&p| id(p, 1)).chain(
        a.finals()
            .iter()
            .filter(|&&p| is_target[p as usize])
            .map(|&p| id(p, 0)),
    );

    let product = Automaton::new(names, a.alphabet().to_vec(), transitions, initials, finals)?;
    let (trimmed, origin) = product.trim_with_map()?;
    let tags = origin
        .into_iter()
        .map(|s| ProductTag {
            base: s / 2,
            flag: (s % 2) as u8,
        })
        .collect();
    Ok((trimmed, tags))
}
