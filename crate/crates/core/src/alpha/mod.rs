//! Conditional visit probabilities.
//!
//! Entry `(i, j)` of an [`AlphaMatrix`] is the probability that a bounded
//! successful path visiting state `j` also visits state `i`: columns
//! condition, rows are the event. The matrix is not symmetric in general.

mod approx;
mod bounds;
mod exact;

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::automaton::StateId;
use crate::error::{Error, Result};

pub use approx::{alpha_approx, VisitTable};
pub use bounds::{chebyshev_bound, hoeffding_bound, required_samples, BoundKind};
pub use exact::{alpha_exact, alpha_exact_via, exact_counts, ExactCounts, ExactRoute};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Provenance {
    Exact {
        bound: usize,
    },
    Approx {
        bound: usize,
        samples: usize,
        threshold: usize,
        seed: u64,
    },
    /// Loaded from a file or built by hand.
    External,
}

/// Symmetric matrix of counts stored as its upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCounts {
    n: usize,
    data: Vec<u32>,
}

impl SymmetricCounts {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * (n + 1) / 2],
        }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * self.n - i + 1) / 2 + (j - i)
    }

    pub fn get(&self, i: StateId, j: StateId) -> u32 {
        self.data[self.index(i as usize, j as usize)]
    }

    pub(crate) fn increment(&mut self, i: StateId, j: StateId) {
        let k = self.index(i as usize, j as usize);
        self.data[k] += 1;
    }
}

/// Raw counts from the sampling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingStats {
    /// Number of uniformly drawn paths.
    pub samples: usize,
    /// Paths visiting each state.
    pub visits: Vec<u64>,
    /// Paths visiting both states of a pair.
    pub pair_visits: SymmetricCounts,
    /// Columns recomputed from conditioned draws.
    pub refined_columns: Vec<StateId>,
    /// Columns set to zero because no sample visited them.
    pub zero_columns: Vec<StateId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatrix {
    labels: Vec<String>,
    entries: Vec<f64>,
    provenance: Provenance,
    stats: Option<SamplingStats>,
}

impl AlphaMatrix {
    /// Builds a matrix from row-major entries after checking that it is
    /// square, has a unit diagonal and entries in `[0, 1]`.
    pub fn from_rows(
        labels: Vec<String>,
        rows: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedAlpha(format!("expected a {n}x{n} matrix")));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        let m = Self {
            labels,
            entries,
            provenance,
            stats: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn from_parts(
        labels: Vec<String>,
        entries: Vec<f64>,
        provenance: Provenance,
        stats: Option<SamplingStats>,
    ) -> Self {
        debug_assert_eq!(entries.len(), labels.len() * labels.len());
        Self {
            labels,
            entries,
            provenance,
            stats,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self::from_parts(default_labels(n), entries, Provenance::External, None)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                let v = self.entries[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::MalformedAlpha(format!(
                        "entry ({i},{j}) = {v} outside [0,1]"
                    )));
                }
                if i == j && v != 1.0 {
                    return Err(Error::MalformedAlpha(format!(
                        "diagonal entry ({i},{i}) = {v} is not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn stats(&self) -> Option<&SamplingStats> {
        self.stats.as_ref()
    }

    /// P(path visits `i` | path visits `j`).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.len().max(1))
    }

    /// Reorders states: new state `k` is old state `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        let labels = perm.iter().map(|&k| self.labels[k].clone()).collect();
        Self::from_parts(labels, entries, self.provenance.clone(), None)
    }

    /// `i,j,alpha` lines using state names, row-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,alpha\n");
        for (i, li) in self.labels.iter().enumerate() {
            for (j, lj) in self.labels.iter().enumerate() {
                let _ = writeln!(out, "{li},{lj},{}", self.get(i, j));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut cells: Vec<(String, String, f64)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line.starts_with("i,")) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::MalformedAlpha(format!(
                    "line {}: expected 3 fields",
                    idx + 1
                )));
            }
            let v: f64 = fields[2]
                .trim()
                .parse()
                .map_err(|_| Error::MalformedAlpha(format!("line {}: bad number", idx + 1)))?;
            for name in &fields[..2] {
                if !labels.iter().any(|l| l == name) {
                    labels.push(name.to_string());
                }
            }
            cells.push((fields[0].into(), fields[1].into(), v));
        }
        let n = labels.len();
        let pos = |name: &str| labels.iter().position(|l| l == name).unwrap();
        let mut rows = vec![vec![f64::NAN; n]; n];
        for (i, j, v) in cells {
            rows[pos(&i)][pos(&j)] = v;
        }
        if rows.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::MalformedAlpha("missing entries".into()));
        }
        Self::from_rows(labels, rows, Provenance::External)
    }

    pub fn to_json(&self) -> String {
        let doc = AlphaDocument {
            provenance: self.provenance.clone(),
            states: self.labels.clone(),
            alpha: self.rows().map(<[f64]>::to_vec).collect(),
            visits: self.stats.as_ref().map(|s| s.visits.clone()),
            refined_columns: self.stats.as_ref().map(|s| {
                s.refined_columns
                    .iter()
                    .map(|&j| self.labels[j as usize].clone())
                    .collect()
            }),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlphaDocument =
            serde_json::from_str(text).map_err(|e| Error::MalformedAlpha(e.to_string()))?;
        Self::from_rows(doc.states, doc.alpha, doc.provenance)
    }
}

#[derive(Serialize, Deserialize)]
struct AlphaDocument {
    provenance: Provenance,
    states: Vec<String>,
    alpha: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    visits: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    refined_columns: Option<Vec<String>>,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}
