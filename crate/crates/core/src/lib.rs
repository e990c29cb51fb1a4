//! Exact spectral invariants of toric test configurations, and grid numerics
//! for the weak geodesic rays and metric bounds attached to them.

pub mod config;
pub mod ehrhart;
pub mod error;
pub mod geodesic;
pub mod io;
pub mod ke;
pub mod linalg;
pub mod pl;
pub mod polytope;
pub mod rat;
pub mod spectra;
pub mod verify;

pub use config::{FiltrationTable, FlagIdealConfig, NormalConeConfig, Rounding, TestConfiguration, ToricConfig};
pub use error::{Error, Result};
pub use geodesic::{Equilibrium, GeodesicLab, PotentialGrid};
pub use io::{ConfigDocument, RunManifest, Table};
pub use ke::{FanoModel, SymplecticMetric};
pub use pl::{Affine, PlConcave};
pub use polytope::{Halfspace, Polytope};
pub use rat::Rat;
pub use spectra::{DhMeasure, Exponent, InvariantSet, SpectralMeasure};
pub use verify::{Suite, VerifyOptions};
