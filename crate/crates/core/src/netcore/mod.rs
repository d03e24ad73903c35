//! Core data types and blockmodel likelihoods.

mod assignment;
mod block;
mod graph;
mod kl;
mod likelihood;
mod pairs;
mod partition;
mod prob;

pub use assignment::ClassAssignment;
pub use block::{BlockMatrix, BlockStats};
pub(crate) use block::node_class_counts;
pub use graph::Graph;
pub use kl::{bernoulli_kl, block_term, neg_entropy, xlnx};
pub(crate) use kl::{bernoulli_kl_unchecked, XlnxTable};
pub use likelihood::{
    block_stats, expected_log_likelihood, expected_profile_log_likelihood, likelihood_gap_decomposition,
    log_likelihood, profile_log_likelihood, theta_bar, theta_hat, LikelihoodGap,
};
pub use pairs::{n_pairs, pair_index, pair_index_unordered, pairs, PairMask};
pub use partition::{partition_expected_log_likelihood, refine_partition, Partition};
pub use prob::ProbabilityMatrix;
