//! f-divergence mutual-information matrices for finite discrete random
//! variables: computation, positive-semidefiniteness testing, and
//! constructive verification of the local characterization of PSD-generating
//! divergences.
//!
//! A convex generator `f` with `f(1) = 0` induces the mutual information
//! `I_f(X;Y) = D_f(P_XY || P_X x P_Y)` and, for a family of variables, the
//! matrix `M_il = I_f(X_i; X_l)`. Generators whose Taylor coefficients at 1
//! are all nonnegative from order 2 produce PSD matrices in the
//! weak-dependence regime; this crate verifies that direction through the
//! replica Gram identity ([`replica`]) and builds explicit indefinite
//! examples for generators outside that cone through a biased latent family
//! and replica amplification ([`latent`], [`forcing`], [`search`]).

pub mod dist;
pub mod error;
pub mod fit;
pub mod fmi;
pub mod forcing;
pub mod generators;
pub mod latent;
pub mod replica;
pub mod search;
pub mod taylor;

pub use dist::{DistributionSpec, JointDistribution, PairwiseJoint};
pub use error::{Error, Result};
pub use fmi::{f_mutual_information, mi_matrix, psd_check, KernelReport};
pub use forcing::{
    assemble_block, block_spectrum, delta_matrix, kernel_matrix,
    min_replicas_for_indefiniteness, CounterexampleCertificate, ForcingResult, ReplicaBlock,
};
pub use generators::{classify, ConeVerdict, Generator, GeneratorSpec, Registry, VerdictKind};
pub use latent::{diagonal_value, kernel_value, FamilySpec, LatentFamily, PAPER_PRESET};
pub use replica::{centered_correlation, mixture_mi, monomial_mi, verify_gram_psd};
pub use search::{certify, find_counterexample, reproduce_paper_example, SearchConfig, SearchOutcome};
pub use taylor::{
    coefficient_table, empirical_coefficients, predicted_coefficients, transfer,
    verify_transfer_positivity, CoefficientTable,
};
