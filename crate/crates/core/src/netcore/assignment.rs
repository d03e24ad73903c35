use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Class membership vector. Labels are 0-based (`0..k`); `k` is an upper bound
/// and classes may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClassAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return domain("number of classes must be at least 1");
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return domain(format!("label {l} of node {i} outside 0..{k}"));
        }
        Ok(Self { labels, k })
    }

    /// Accepts labels in `1..=k`.
    pub fn from_one_based(labels: &[usize], k: usize) -> Result<Self> {
        if let Some(i) = labels.iter().position(|&l| l == 0) {
            return domain(format!("label 0 of node {i} in a 1-based assignment"));
        }
        Self::new(labels.iter().map(|l| l - 1).collect(), k)
    }

    /// Everyone in class 0.
    pub fn single_class(n: usize) -> Self {
        Self { labels: vec![0; n], k: 1 }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    /// Relabels classes through `perm` (old label -> new label).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k {
            return domain("permutation length differs from K");
        }
        Self::new(self.labels.iter().map(|&l| perm[l]).collect(), self.k)
    }
}
