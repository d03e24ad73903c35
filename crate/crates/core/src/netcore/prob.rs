use super::assignment::ClassAssignment;
use super::block::BlockMatrix;
use super::pairs::{n_pairs, pair_index_unordered, pairs};
use crate::error::{domain, Result, SbmError};

/// Dense upper-triangular matrix of independent edge probabilities `P_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    p: Vec<f64>,
}

impl ProbabilityMatrix {
    /// `values` in upper-triangular order (see [`super::pairs::pair_index`]).
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_pairs(n) {
            return Err(SbmError::DimensionMismatch(format!(
                "expected {} pair probabilities for {n} nodes, got {}",
                n_pairs(n),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return domain(format!("probability {bad} outside [0, 1]"));
        }
        Ok(Self { n, p: values })
    }

    pub fn constant(n: usize, p: f64) -> Result<Self> {
        Self::new(n, vec![p; n_pairs(n)])
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(n, pairs(n).map(|(i, j)| f(i, j)).collect())
    }

    /// `P_ij = theta[z_i, z_j]`.
    pub fn from_blockmodel(z: &ClassAssignment, theta: &BlockMatrix) -> Result<Self> {
        if theta.k() != z.k() {
            return Err(SbmError::DimensionMismatch(format!(
                "block matrix is {}x{} but assignment declares K = {}",
                theta.k(),
                theta.k(),
                z.k()
            )));
        }
        let labels = z.labels();
        let mut values = Vec::with_capacity(n_pairs(z.n_nodes()));
        for (i, j) in pairs(z.n_nodes()) {
            let (a, b) = (labels[i], labels[j]);
            match theta.get(a, b) {
                Some(v) => values.push(v),
                None => return domain(format!("block ({a}, {b}) of theta is undefined")),
            }
        }
        Self::new(z.n_nodes(), values)
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[pair_index_unordered(self.n, i, j)]
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    /// Expected number of edges `M = sum_{i<j} P_ij`.
    pub fn expected_edges(&self) -> f64 {
        self.p.iter().sum()
    }
}
