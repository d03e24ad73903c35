use crate::error::{domain, Result, SbmError};
use crate::netcore::Graph;

/// Categorical node attribute: one level index per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covariate {
    pub name: String,
    pub levels: Vec<usize>,
    pub level_names: Vec<String>,
}

impl Covariate {
    pub fn new(name: impl Into<String>, levels: Vec<usize>, level_names: Vec<String>) -> Result<Self> {
        let name = name.into();
        if level_names.len() < 2 {
            return domain(format!("covariate {name} needs at least 2 levels"));
        }
        if let Some(bad) = levels.iter().find(|&&l| l >= level_names.len()) {
            return domain(format!("covariate {name}: level {bad} out of range"));
        }
        Ok(Self { name, levels, level_names })
    }

    /// Levels named `0..n_levels`.
    pub fn from_indices(name: impl Into<String>, levels: Vec<usize>, n_levels: usize) -> Result<Self> {
        Self::new(name, levels, (0..n_levels).map(|l| l.to_string()).collect())
    }

    pub fn n_levels(&self) -> usize {
        self.level_names.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovariateTable {
    n_nodes: usize,
    covariates: Vec<Covariate>,
}

impl CovariateTable {
    pub fn new(n_nodes: usize, covariates: Vec<Covariate>) -> Result<Self> {
        for c in &covariates {
            if c.levels.len() != n_nodes {
                return Err(SbmError::DimensionMismatch(format!(
                    "covariate {} has {} entries for {n_nodes} nodes",
                    c.name,
                    c.levels.len()
                )));
            }
        }
        Ok(Self { n_nodes, covariates })
    }

    pub fn empty(n_nodes: usize) -> Self {
        Self { n_nodes, covariates: Vec::new() }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn covariates(&self) -> &[Covariate] {
        &self.covariates
    }

    pub fn push(&mut self, c: Covariate) -> Result<()> {
        if c.levels.len() != self.n_nodes {
            return Err(SbmError::DimensionMismatch(format!("covariate {} has wrong length", c.name)));
        }
        self.covariates.push(c);
        Ok(())
    }
}

/// Bins nodes by observed degree at quantile cut points.
///
/// Cut `b` (for `b = 1..n_bins`) is the degree at sorted rank
/// `ceil(b N / n_bins) - 1`; a node's bin is the number of cuts strictly below
/// its degree, so degrees equal to a cut fall in the lower bin.
pub fn degree_bin_covariate(g: &Graph, n_bins: usize) -> Result<Covariate> {
    if n_bins < 2 {
        return domain("degree binning needs at least 2 bins");
    }
    Covariate::new(
        "degree_bin",
        quantile_bins(&g.degrees(), n_bins),
        (0..n_bins).map(|b| format!("bin{b}")).collect(),
    )
}

pub(crate) fn quantile_bins(values: &[usize], n_bins: usize) -> Vec<usize> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let cuts: Vec<usize> = (1..n_bins).map(|b| sorted[(b * n).div_ceil(n_bins).max(1) - 1]).collect();
    values.iter().map(|&d| cuts.iter().filter(|&&c| c < d).count()).collect()
}
