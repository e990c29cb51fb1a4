//! Grid numerics for the weak geodesic ray in the toric picture.

pub mod checks;
pub mod grid;
pub mod lab;
pub mod legendre;
pub mod ma;
pub mod potential;

pub use checks::{
    aubin_mabuchi_slope, comparison_monotonicity, equilibrium_family_defects, gradient_map_residual,
    ma_mass_identity, maximality_leakage, ray_convexity_defect, tangent_law_distance, Comparison, EnergyFit,
};
pub use grid::{Axis, PotentialGrid, Role};
pub use lab::{Equilibrium, GeodesicLab, LEVEL_TOL};
pub use legendre::{conjugate_1d, legendre, Conjugate};
pub use ma::{ma_mass, ma_masses};
pub use potential::{guillemin, lattice_facets, perturbed, softplus, PotentialFn};
