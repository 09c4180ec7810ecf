//! Extremal functions for `M_n` and subsystem extraction.

mod extremal;
mod subsystem;

pub use extremal::{
    extremal_function, h_decomposition, sign_partition, ExtremalProfile, HDecomposition,
    SignPartition, ROOT_TOL,
};
pub use subsystem::{
    certify_selection, subsystem_select, weighted_mn, Certification, CertifiedIndex,
    SubsystemConfig, SubsystemSelection, WeightedMn,
};
