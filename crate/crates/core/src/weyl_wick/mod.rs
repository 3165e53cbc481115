//! Weyl operators, normal-ordered functionals, Wick field densities, the
//! coincidence forms and the stress-energy integral.

mod coincidence;
mod density;
mod functional;
mod sigma;
mod stress;
mod weyl;

pub use coincidence::{coincidence_form, normal_ordered_weyl, Coincidence};
pub use density::{spectral_density_of, wick_field_density, DensityLattice};
pub use functional::FiniteRankFunctional;
pub use sigma::{sigma_functional, sigma_with_sign, BFamily, SigmaValue};
pub use stress::{stress_energy_integral, StressEnergy};
pub use weyl::{
    composition_phase, exp_annihilate, exp_create, vacuum_weyl_expectation, weyl_apply, weyl_apply_coeffs, WeylImage,
    WeylWord,
};
