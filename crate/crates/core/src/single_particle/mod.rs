//! Discretised single-particle space: momentum grids, vectors, Taylor vectors,
//! localization subspaces, the operator T, and correlation scans.

mod correlation;
mod grid;
mod localization;
mod qm;
mod taylor;

pub use correlation::{
    correlation, correlation_along_axis, exponential_decay_fit, geomspace, linspace, localized_probe,
    power_decay_fit, radial_ft3, radial_massless_correlation, DECAY_FLOOR,
};
pub use grid::{chi_energy, mollifier, smooth_step, ConfigLattice, MomentumGrid, SPVector};
pub use localization::{
    default_h_r0, gram_schmidt_real, schatten_p_norm, LocalizationFamily, Sign, TComponents, TOperator, GS_DROP_TOL,
};
pub use qm::{
    disjoint_support_pair, divergence_witness_growth, gamma_fn, qm_translation_check, TranslationReport, WitnessGrowth,
};
pub use taylor::{kappa_factorial, localized_monomials, s_indices, taylor_vectors, TaylorVectors};
