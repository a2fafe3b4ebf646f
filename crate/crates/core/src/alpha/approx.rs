use rayon::prelude::*;

use super::{AlphaMatrix, Provenance, SamplingStats, SymmetricCounts};
use crate::automaton::{Automaton, StateId};
use crate::count::num_paths;
use crate::error::{Error, Result};
use crate::path::{sample_one, ConditionedSampler};
use crate::rng::RngHandle;

const STEP1_STREAM: u64 = 1;
const COLUMN_STREAM_BASE: u64 = 2;

/// `m x n` bitmap: bit `(k, s)` is set when the `k`-th sampled path visits `s`.
#[derive(Debug, Clone)]
pub struct VisitTable {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl VisitTable {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, row: usize, col: StateId) {
        let c = col as usize;
        self.bits[row * self.words_per_row + c / 64] |= 1 << (c % 64);
    }

    pub fn get(&self, row: usize, col: StateId) -> bool {
        let c = col as usize;
        self.bits[row * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    /// Set columns of one row, ascending.
    pub fn row_ones(&self, row: usize) -> impl Iterator<Item = StateId> + '_ {
        let words = &self.bits[row * self.words_per_row..(row + 1) * self.words_per_row];
        words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some((w * 64) as StateId + b)
            })
        })
    }

    /// Column sums and pairwise co-occurrence counts.
    pub fn counts(&self) -> (Vec<u64>, SymmetricCounts) {
        let mut single = vec![0u64; self.cols];
        let mut pairs = SymmetricCounts::new(self.cols);
        let mut ones = Vec::new();
        for row in 0..self.rows {
            ones.clear();
            ones.extend(self.row_ones(row));
            for (k, &i) in ones.iter().enumerate() {
                single[i as usize] += 1;
                for &j in &ones[k..] {
                    pairs.increment(i, j);
                }
            }
        }
        (single, pairs)
    }
}

/// Sampling estimate of the alpha matrix.
///
/// Draws `samples` uniform bounded paths (stream 1 of `seed`). Column `j`
/// is then filled from those draws when more than `threshold` of them
/// visit `j`; otherwise, if `threshold > 0`, it is recomputed from
/// `threshold` fresh paths conditioned on visiting `j` (stream `2 + j`),
/// and if `threshold == 0` its off-diagonal entries are zero.
pub fn alpha_approx(
    a: &Automaton,
    bound: usize,
    samples: usize,
    threshold: usize,
    seed: u64,
) -> Result<AlphaMatrix> {
    if samples == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let n = a.num_states();
    let table = num_paths(a, bound);
    if table.is_empty() {
        return Err(Error::EmptyLanguage { bound });
    }

    let mut visits = VisitTable::new(samples, n);
    let mut rng = RngHandle::with_stream(seed, STEP1_STREAM);
    for k in 0..samples {
        let path = sample_one(a, &table, &mut rng)?;
        for s in path.states() {
            visits.set(k, s);
        }
    }
    let (single, pairs) = visits.counts();
    drop(visits);

    let deficient: Vec<StateId> = a
        .states()
        .filter(|&j| threshold > 0 && single[j as usize] <= threshold as u64)
        .collect();
    let refined: Vec<(StateId, Vec<u32>)> = deficient
        .par_iter()
        .map(|&j| {
            let sampler = ConditionedSampler::new(a, j, bound).ok_or_else(|| {
                Error::ConditioningImpossible {
                    state: a.state_name(j).to_string(),
                    bound,
                }
            })?;
            let mut rng = RngHandle::with_stream(seed, COLUMN_STREAM_BASE + j as u64);
            let mut hits = vec![0u32; n];
            let mut seen = Vec::new();
            for _ in 0..threshold {
                seen.clear();
                seen.extend(sampler.sample(&mut rng).states());
                seen.sort_unstable();
                seen.dedup();
                for &i in &seen {
                    hits[i as usize] += 1;
                }
            }
            Ok((j, hits))
        })
        .collect::<Result<_>>()?;

    let mut entries = vec![0.0; n * n];
    let mut zero_columns = Vec::new();
    for j in a.states() {
        let ju = j as usize;
        let mj = single[ju];
        if threshold == 0 && mj == 0 {
            zero_columns.push(j);
        } else if mj > threshold as u64 {
            for i in a.states() {
                entries[i as usize * n + ju] = pairs.get(i, j) as f64 / mj as f64;
            }
        }
    }
    for (j, hits) in &refined {
        let ju = *j as usize;
        for i in 0..n {
            entries[i * n + ju] = hits[i] as f64 / threshold as f64;
        }
    }
    for i in 0..n {
        entries[i * n + i] = 1.0;
    }

    let stats = SamplingStats {
        samples,
        visits: single,
        pair_visits: pairs,
        refined_columns: refined.iter().map(|(j, _)| *j).collect(),
        zero_columns,
    };
    Ok(AlphaMatrix::from_parts(
        a.state_names().to_vec(),
        entries,
        Provenance::Approx {
            bound,
            samples,
            threshold,
            seed,
        },
        Some(stats),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_exact;
    use crate::automaton::tests::fig1;

    #[test]
    fn visit_table_bits() {
        let mut t = VisitTable::new(2, 130);
        t.set(0, 0);
        t.set(0, 64);
        t.set(0, 129);
        t.set(1, 3);
        assert!(t.get(0, 129) && !t.get(1, 129));
        assert_eq!(t.row_ones(0).collect::<Vec<_>>(), vec![0, 64, 129]);
        let (single, pairs) = t.counts();
        assert_eq!(single[64], 1);
        assert_eq!(pairs.get(0, 129), 1);
        assert_eq!(pairs.get(3, 0), 0);
    }

    #[test]
    fn diagonal_and_range() {
        let a = fig1();
        let m = alpha_approx(&a, 3, 1000, 0, 17).unwrap();
        m.validate().unwrap();
        let stats = m.stats().unwrap();
        for i in a.states() {
            for j in a.states() {
                let p = stats.pair_visits.get(i, j);
                assert_eq!(p, stats.pair_visits.get(j, i));
                assert!(p as u64 <= stats.visits[i as usize].min(stats.visits[j as usize]));
            }
        }
        // every path starts in 1
        assert_eq!(stats.visits[0], 1000);
    }

    #[test]
    fn refinement_replaces_only_deficient_columns() {
        let a = fig1();
        let coarse = alpha_approx(&a, 3, 1000, 0, 5).unwrap();
        let fine = alpha_approx(&a, 3, 1000, 250, 5).unwrap();
        let stats = coarse.stats().unwrap();
        let refined = &fine.stats().unwrap().refined_columns;
        for j in a.states() {
            let deficient = stats.visits[j as usize] <= 250;
            assert_eq!(refined.contains(&j), deficient);
            if !deficient {
                for i in 0..4 {
                    assert_eq!(
                        coarse.get(i, j as usize).to_bits(),
                        fine.get(i, j as usize).to_bits()
                    );
                }
            }
        }
        // state 2 is visited by a quarter of the paths
        assert!(refined.contains(&a.state_id("2").unwrap()));
    }

    #[test]
    fn zero_column_when_unvisited_and_r0() {
        // state 4 needs length >= 2, so bound 1 keeps it unvisited
        let a = fig1();
        let m = alpha_approx(&a, 1, 100, 0, 1).unwrap();
        let four = a.state_id("4").unwrap() as usize;
        assert_eq!(m.stats().unwrap().zero_columns, vec![four as StateId]);
        for i in 0..4 {
            assert_eq!(m.get(i, four), if i == four { 1.0 } else { 0.0 });
        }
        let err = alpha_approx(&a, 1, 100, 5, 1).unwrap_err();
        assert!(matches!(err, Error::ConditioningImpossible { .. }));
    }

    #[test]
    fn close_to_exact_with_many_samples() {
        let a = fig1();
        let exact = alpha_exact(&a, 3).unwrap();
        let approx = alpha_approx(&a, 3, 20_000, 0, 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((exact.get(i, j) - approx.get(i, j)).abs() < 0.05);
            }
        }
    }
}
