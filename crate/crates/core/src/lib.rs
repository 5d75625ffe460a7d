//! Clustering with outliers by uniform sampling.
//!
//! Draw a uniform sample, solve k-center, k-median or k-means with outliers
//! on the sample with a classical algorithm, and return the resulting centers
//! for the full data. [`selector`] boosts the success probability by keeping
//! the best of several runs in one pass over the data.

pub mod datagen;
pub mod error;
pub mod harness;
pub mod objective;
pub mod rng;
pub mod sampler;
pub mod selector;
pub mod subroutines;
pub mod sum;
pub mod types;

pub use error::{Error, Result};
pub use objective::{assign_memberships, cost, dist_to_set, objective_with_outliers};
pub use sampler::{run_framework, Budget, FrameworkConfig, FrameworkRun, SampleBudget, SignificanceParams, Variant};
pub use selector::{boosted_run, one_pass_select, CandidateSet};
pub use types::{CenterSet, ClusteringResult, Dataset, Label, Membership, ObjectiveKind, Point};
