//! Response-subset identifiability studies.
//!
//! Calibration is repeated over every nonempty combination of the measured
//! responses; a parameter's posterior standard deviation per subset is the
//! identifiability measure. The engine correlates those STDs with the
//! parameter's sensitivity to the included responses, iterates calibration
//! with recycled posteriors, and flags "fake identifiability" — tight
//! posteriors centered far from the reference.

mod flags;
mod iterate;
mod score;
mod study;
mod subsets;

pub use flags::{
    flag_fake_identifiability, FakeFlagThresholds, FlagEntry, FlagReport, SubsetClassification,
};
pub use iterate::{iterate_inverse_uq, IterateConfig, IterationResult};
pub use score::sensitivity_identifiability_score;
pub use study::{
    assemble_report, default_theta_ref, run_subset_study, run_subset_study_lenient,
    IdentifiabilityReport, StudyOptions, StudySetup, SubsetStudyResult,
};
pub use subsets::{enumerate_subsets, ResponseSubset};
