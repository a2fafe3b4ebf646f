//! Exact counting of bounded-length successful paths.
//!
//! Counts are computed in `u128` when they fit and transparently recomputed
//! with `BigUint` otherwise; both representations are exact.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::automaton::{Automaton, StateId};
use crate::rng::RngHandle;

/// Exact non-negative integer used as a path count.
pub trait Weight: Clone + Ord + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// `None` on overflow.
    fn checked_add(&self, other: &Self) -> Option<Self>;
    /// Requires `other <= self`.
    fn sub(&self, other: &Self) -> Self;
    fn to_biguint(&self) -> BigUint;
    /// Uniform draw in `[0, self)`; `self` must be non-zero.
    fn sample_below(&self, rng: &mut RngHandle) -> Self;
}

impl Weight for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        u128::checked_add(*self, *other)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn sample_below(&self, rng: &mut RngHandle) -> Self {
        rng.below_u128(*self)
    }
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        BigUint::from(1u8)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
    fn sample_below(&self, rng: &mut RngHandle) -> Self {
        sample_biguint_below(self, rng)
    }
}

/// Rejection sampling over the bit length of `bound`.
fn sample_biguint_below(bound: &BigUint, rng: &mut RngHandle) -> BigUint {
    use rand::RngCore;
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (words as u64 - 1);
    let top_mask = if top_bits == 32 {
        u32::MAX
    } else {
        (1u32 << top_bits) - 1
    };
    let mut digits = vec![0u32; words];
    loop {
        for d in digits.iter_mut() {
            *d = rng.next_u32();
        }
        digits[words - 1] &= top_mask;
        let x = BigUint::from_slice(&digits);
        if &x < bound {
            return x;
        }
    }
}

/// Backward counts `counts[ℓ][s]` = number of paths of length exactly `ℓ`
/// from `s` to a final state, for `ℓ` in `0..=bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable<W> {
    bound: usize,
    num_states: usize,
    counts: Vec<W>,
    totals: Vec<W>,
    grand_total: W,
}

impl<W: Weight> CountTable<W> {
    fn build(a: &Automaton, bound: usize) -> Option<Self> {
        let n = a.num_states();
        let mut counts = Vec::with_capacity((bound + 1) * n);
        counts.extend(
            a.states()
                .map(|s| if a.is_final(s) { W::one() } else { W::zero() }),
        );
        for len in 1..=bound {
            let prev = (len - 1) * n;
            for s in a.states() {
                let mut acc = W::zero();
                for t in a.out_transitions(s) {
                    let c = &counts[prev + t.target as usize];
                    if !c.is_zero() {
                        acc = acc.checked_add(c)?;
                    }
                }
                counts.push(acc);
            }
        }
        let mut totals = Vec::with_capacity(bound + 1);
        let mut grand_total = W::zero();
        for len in 0..=bound {
            let mut acc = W::zero();
            for &s in a.initials() {
                acc = acc.checked_add(&counts[len * n + s as usize])?;
            }
            if len >= 1 {
                grand_total = grand_total.checked_add(&acc)?;
            }
            totals.push(acc);
        }
        Some(Self {
            bound,
            num_states: n,
            counts,
            totals,
            grand_total,
        })
    }

    pub fn count(&self, s: StateId, len: usize) -> &W {
        &self.counts[len * self.num_states + s as usize]
    }

    pub fn grand_total(&self) -> &W {
        &self.grand_total
    }

    pub fn totals(&self) -> &[W] {
        &self.totals
    }
}

/// Per-(state, remaining length) completion counts for a fixed automaton
/// and length bound.
#[derive(Debug, Clone, PartialEq)]
pub enum PathCountTable {
    Small(CountTable<u128>),
    Big(CountTable<BigUint>),
}

impl PathCountTable {
    pub fn bound(&self) -> usize {
        match self {
            PathCountTable::Small(t) => t.bound,
            PathCountTable::Big(t) => t.bound,
        }
    }

    pub fn num_states(&self) -> usize {
        match self {
            PathCountTable::Small(t) => t.num_states,
            PathCountTable::Big(t) => t.num_states,
        }
    }

    /// Paths of length exactly `len` from `s` to a final state.
    pub fn count(&self, s: StateId, len: usize) -> BigUint {
        match self {
            PathCountTable::Small(t) => BigUint::from(*t.count(s, len)),
            PathCountTable::Big(t) => t.count(s, len).clone(),
        }
    }

    /// Successful paths of length exactly `len`, for `len` in `0..=bound`.
    /// Entry 0 counts empty paths and is excluded from the grand total.
    pub fn totals(&self) -> Vec<BigUint> {
        match self {
            PathCountTable::Small(t) => t.totals.iter().map(|&x| BigUint::from(x)).collect(),
            PathCountTable::Big(t) => t.totals.clone(),
        }
    }

    /// Successful paths of length in `1..=bound`.
    pub fn grand_total(&self) -> BigUint {
        match self {
            PathCountTable::Small(t) => BigUint::from(t.grand_total),
            PathCountTable::Big(t) => t.grand_total.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            PathCountTable::Small(t) => t.grand_total == 0,
            PathCountTable::Big(t) => Zero::is_zero(&t.grand_total),
        }
    }

    /// Grand total as a float (may be `inf` for astronomically large counts).
    pub fn grand_total_f64(&self) -> f64 {
        match self {
            PathCountTable::Small(t) => t.grand_total as f64,
            PathCountTable::Big(t) => t.grand_total.to_f64().unwrap_or(f64::INFINITY),
        }
    }
}

/// Counts the successful paths of `a` of every length up to `bound`.
pub fn num_paths(a: &Automaton, bound: usize) -> PathCountTable {
    match CountTable::<u128>::build(a, bound) {
        Some(t) => PathCountTable::Small(t),
        None => PathCountTable::Big(
            CountTable::<BigUint>::build(a, bound).expect("BigUint counting cannot overflow"),
        ),
    }
}

/// Scratch buffers for repeated "avoiding" counts on one automaton.
pub(crate) struct AvoidCounter<'a, W> {
    a: &'a Automaton,
    bound: usize,
    cur: Vec<W>,
    next: Vec<W>,
}

impl<'a, W: Weight> AvoidCounter<'a, W> {
    pub(crate) fn new(a: &'a Automaton, bound: usize) -> Self {
        let n = a.num_states();
        Self {
            a,
            bound,
            cur: vec![W::zero(); n],
            next: vec![W::zero(); n],
        }
    }

    /// Number of successful paths of length `1..=bound` that never visit a
    /// state in `blocked`. `None` on overflow.
    pub(crate) fn total(&mut self, blocked: &[StateId]) -> Option<W> {
        let a = self.a;
        let is_blocked = |s: StateId| blocked.contains(&s);
        for s in a.states() {
            self.cur[s as usize] = if a.is_final(s) && !is_blocked(s) {
                W::one()
            } else {
                W::zero()
            };
        }
        let mut total = W::zero();
        for _ in 1..=self.bound {
            for s in a.states() {
                let mut acc = W::zero();
                if !is_blocked(s) {
                    for t in a.out_transitions(s) {
                        let c = &self.cur[t.target as usize];
                        if !c.is_zero() {
                            acc = acc.checked_add(c)?;
                        }
                    }
                }
                self.next[s as usize] = acc;
            }
            std::mem::swap(&mut self.cur, &mut self.next);
            for &s in a.initials() {
                total = total.checked_add(&self.cur[s as usize])?;
            }
        }
        Some(total)
    }
}
