//! Weighted-homogeneous algebra and the growth constants of a system.

mod constants;
mod estimate;
mod structure;

pub use constants::{BoundConstants, Provenance, ProvenanceTable};
pub use estimate::{
    check_homogeneity, estimate_all, estimate_eta, estimate_m, estimate_v_constants, EtaEstimate,
    HomogeneityReport, MEstimate, Partition, SamplingSpec, VConstants, VConstantsEstimate,
};
pub use structure::{dilate, hom_norm, HomogeneousStructure};
