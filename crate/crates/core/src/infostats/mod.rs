//! Pairwise statistics: correlation, entropies, mutual information and the
//! distances that feed spanning-tree construction.
//!
//! All entropies are in nats.

mod correlation;
mod entropy;
mod estimator;
mod pairs;
mod partition;
mod permutation;

pub use correlation::{corr_distance, correlation_matrix, pearson_correlation};
pub use entropy::{entropy_discrete, joint_entropy_discrete, mi_distance, normalized_mi};
pub use estimator::{
    estimators, mutual_information_adaptive, EquiprobableGridEstimator, MiEstimate, MiEstimator,
    RecursivePartitionEstimator, DEFAULT_ESTIMATOR, MIN_SAMPLES,
};
pub use pairs::{pair_count, pair_sweep, PairConfig, PairMatrix, PairStats};
pub use partition::{ranks, reference_bins, sqrt_rule_bins, AdaptivePartition, PartitionCell};
pub use permutation::{permutation_test, permutation_test_mi, PermutationOutcome, DEFAULT_ALPHA, DEFAULT_TRIALS};
