//! Spectral measures, their limits, and the invariants read off from them.

pub mod invariants;
pub mod measure;
pub mod norms;

pub use invariants::{fit_invariants, fit_invariants_with_period, InvariantSet};
pub use measure::{cdf_distance, dh_measure, spectral_measure, CdfDistance, DhMeasure, DhPiece, SpectralMeasure};
pub use norms::{
    check_n2_identity, integral_f0, level_sums, level_sums_from_table, norms, stability_ratio_from, strong_stability_ratio, Exponent,
    LevelSums, NormReport, StabilityRatio, TRIVIAL_RAY_DIAGNOSIS,
};
