use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{AlphaMatrix, Provenance};
use crate::automaton::{must_visit, must_visit_any, Automaton, StateId};
use crate::count::{num_paths, AvoidCounter, Weight};
use crate::error::{Error, Result};

/// How the exact pair counts are obtained. Both give identical integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExactRoute {
    /// `#visit(i and j) = T - avoid(i) - avoid(j) + avoid(i, j)`, one
    /// avoiding count per pair on the original automaton.
    #[default]
    InclusionExclusion,
    /// Counts on the nested must-visit products `trim((A_j)_i)`.
    Product,
}

/// Exact numbers of bounded successful paths visiting single states and
/// pairs of states.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCounts {
    n: usize,
    pub total: BigUint,
    pub visiting: Vec<BigUint>,
    // full n x n, symmetric
    both: Vec<BigUint>,
}

impl ExactCounts {
    pub fn both(&self, i: StateId, j: StateId) -> &BigUint {
        &self.both[i as usize * self.n + j as usize]
    }

    /// `alpha(i, j)` as an exact fraction `(numerator, denominator)`.
    pub fn ratio(&self, i: StateId, j: StateId) -> (BigUint, BigUint) {
        (self.both(i, j).clone(), self.visiting[j as usize].clone())
    }
}

pub fn exact_counts(a: &Automaton, bound: usize, route: ExactRoute) -> ExactCounts {
    match route {
        ExactRoute::InclusionExclusion => inclusion_exclusion::<u128>(a, bound)
            .unwrap_or_else(|| inclusion_exclusion::<BigUint>(a, bound).expect("no overflow")),
        ExactRoute::Product => via_products(a, bound),
    }
}

fn inclusion_exclusion<W: Weight>(a: &Automaton, bound: usize) -> Option<ExactCounts> {
    let n = a.num_states();
    let mut counter = AvoidCounter::<W>::new(a, bound);
    let total = counter.total(&[])?;
    let avoid: Vec<W> = a
        .states()
        .map(|i| counter.total(&[i]))
        .collect::<Option<_>>()?;
    let mut both = vec![<BigUint as Zero>::zero(); n * n];
    for i in a.states() {
        let iu = i as usize;
        both[iu * n + iu] = total.sub(&avoid[iu]).to_biguint();
        for j in (i + 1)..n as StateId {
            let ju = j as usize;
            let avoid_both = counter.total(&[i, j])?;
            // T + avoid(i,j) >= avoid(i) + avoid(j), and both sides fit
            let c = total
                .checked_add(&avoid_both)?
                .sub(&avoid[iu])
                .sub(&avoid[ju])
                .to_biguint();
            both[iu * n + ju] = c.clone();
            both[ju * n + iu] = c;
        }
    }
    let visiting = (0..n).map(|i| both[i * n + i].clone()).collect();
    Some(ExactCounts {
        n,
        total: total.to_biguint(),
        visiting,
        both,
    })
}

fn via_products(a: &Automaton, bound: usize) -> ExactCounts {
    let n = a.num_states();
    let total = num_paths(a, bound).grand_total();
    let mut both = vec![<BigUint as Zero>::zero(); n * n];
    for j in a.states() {
        let Ok((aj, tags)) = must_visit(a, j) else {
            continue;
        };
        both[j as usize * n + j as usize] = num_paths(&aj, bound).grand_total();
        for i in a.states().filter(|&i| i != j) {
            let copies: Vec<StateId> = tags
                .iter()
                .enumerate()
                .filter(|(_, t)| t.base == i)
                .map(|(s, _)| s as StateId)
                .collect();
            if copies.is_empty() {
                continue;
            }
            if let Ok((aji, _)) = must_visit_any(&aj, &copies) {
                both[i as usize * n + j as usize] = num_paths(&aji, bound).grand_total();
            }
        }
    }
    let visiting = (0..n).map(|i| both[i * n + i].clone()).collect();
    ExactCounts {
        n,
        total,
        visiting,
        both,
    }
}

/// Correctly rounded `num / den`.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    const EXACT: u64 = 1 << 53;
    match (num.to_u64(), den.to_u64()) {
        (Some(x), Some(y)) if x <= EXACT && y <= EXACT => x as f64 / y as f64,
        _ => BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
            .to_f64()
            .expect("finite ratio"),
    }
}

/// Exact alpha matrix for successful paths of length `1..=bound`.
pub fn alpha_exact(a: &Automaton, bound: usize) -> Result<AlphaMatrix> {
    alpha_exact_via(a, bound, ExactRoute::default())
}

pub fn alpha_exact_via(a: &Automaton, bound: usize, route: ExactRoute) -> Result<AlphaMatrix> {
    let counts = exact_counts(a, bound, route);
    let n = a.num_states();
    if let Some(j) = counts.visiting.iter().position(Zero::is_zero) {
        return Err(Error::UncoveredState {
            state: a.state_name(j as StateId).to_string(),
            bound,
        });
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = if i == j {
                1.0
            } else {
                ratio_to_f64(&counts.both[i * n + j], &counts.visiting[j])
            };
        }
    }
    Ok(AlphaMatrix::from_parts(
        a.state_names().to_vec(),
        entries,
        Provenance::Exact { bound },
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::tests::fig1;

    #[test]
    fn fig1_matrix() {
        let a = fig1();
        let m = alpha_exact(&a, 3).unwrap();
        let id = |s: &str| a.state_id(s).unwrap() as usize;
        let at = |i: &str, j: &str| m.get(id(i), id(j));
        for j in ["1", "2", "3", "4"] {
            assert_eq!(at("1", j), 1.0);
        }
        assert_eq!(at("2", "1"), 0.25);
        assert_eq!(at("2", "3"), 1.0 / 13.0);
        assert_eq!(at("2", "4"), 1.0 / 6.0);
        assert_eq!(at("3", "1"), 13.0 / 16.0);
        assert_eq!(at("3", "2"), 0.25);
        assert_eq!(at("4", "2"), 0.25);
        assert_eq!(at("3", "4"), 1.0);
        assert_eq!(at("4", "3"), 6.0 / 13.0);
        assert_eq!(at("4", "1"), 0.375);
    }

    #[test]
    fn routes_agree_on_fig1() {
        let a = fig1();
        for bound in 1..=5 {
            assert_eq!(
                exact_counts(&a, bound, ExactRoute::InclusionExclusion),
                exact_counts(&a, bound, ExactRoute::Product)
            );
        }
    }

    #[test]
    fn uncovered_state_is_reported() {
        let a = fig1();
        let err = alpha_exact(&a, 1).unwrap_err();
        assert!(matches!(err, Error::UncoveredState { ref state, bound: 1 } if state == "4"));
    }

    #[test]
    fn ratio_rounding() {
        assert_eq!(
            ratio_to_f64(&BigUint::from(1u8), &BigUint::from(13u8)),
            1.0 / 13.0
        );
        let big = BigUint::from(10u8).pow(200);
        let third = ratio_to_f64(&big, &(&big * 3u8));
        assert_eq!(third, 1.0 / 3.0);
    }
}
