//! Random trim automata for scale and variety tests.
//!
//! Draws a complete deterministic transition function uniformly, marks
//! finals independently with the given density (at least one), fixes state
//! 0 as the initial state and trims. The resulting distribution over trim
//! automata is not uniform.

use crate::automaton::{Automaton, Transition};
use crate::error::{Error, Result};
use crate::rng::RngHandle;

pub const MAX_ATTEMPTS: usize = 100;

fn symbol_name(k: usize, a: usize) -> String {
    if k <= 26 {
        ((b'a' + a as u8) as char).to_string()
    } else {
        format!("s{a}")
    }
}

pub fn random_trim_automaton(
    states: usize,
    alphabet: usize,
    final_density: f64,
    rng: &mut RngHandle,
) -> Result<Automaton> {
    if states == 0 || alphabet == 0 {
        return Err(Error::Domain(
            "state and alphabet sizes must be at least 1".into(),
        ));
    }
    if !(final_density > 0.0 && final_density <= 1.0) {
        return Err(Error::Domain(format!(
            "final density must lie in (0,1], got {final_density}"
        )));
    }
    let names: Vec<String> = (0..states).map(|s| s.to_string()).collect();
    let symbols: Vec<String> = (0..alphabet).map(|a| symbol_name(alphabet, a)).collect();
    for _ in 0..MAX_ATTEMPTS {
        let mut transitions = Vec::with_capacity(states * alphabet);
        for s in 0..states {
            for a in 0..alphabet {
                let t = rng.below(states);
                transitions.push(Transition::new(s as u32, a as u32, t as u32));
            }
        }
        let mut finals: Vec<u32> = (0..states as u32)
            .filter(|_| rng.unit() < final_density)
            .collect();
        if finals.is_empty() {
            finals.push(rng.below(states) as u32);
        }
        let full = Automaton::new(names.clone(), symbols.clone(), transitions, [0], finals)?;
        match full.trim() {
            Ok(a) => return Ok(a),
            Err(Error::EmptyTrim) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GeneratorGaveUp {
        attempts: MAX_ATTEMPTS,
    })
}
