//! Maximum-likelihood fitting of K-class stochastic blockmodels to undirected
//! binary networks, finite-sample confidence bounds on block-probability
//! estimates, a covariate-adjusted logit blockmodel, and simulation drivers
//! that check the large-network behavior of the estimators.

pub mod bounds;
pub mod error;
pub mod fit;
pub mod harness;
pub mod logit;
pub mod netcore;
pub mod seed;
pub mod synth;

pub use error::{Result, SbmError};
