//! Rank-one expansions, collective norms, the mollifier identity, time smearing
//! and moment witnesses.

mod collective;
mod expansion;
mod mollifier;
mod moments;
mod smearing;

pub use collective::{collective_majorant, collective_norm, pair_correlation_sup, CollectiveReport, NPointConfig};
pub use expansion::{
    expansion_term_bounds, graded_weights, majorant_weights, n_point_majorant, p_norm_partial_sum, ExpansionTerm, PNormSum,
    RankOneExpansion,
};
pub use mollifier::{mollifier_g, mollifier_gamma, mollifier_identity_check, MollifierReport, TensorInstance, ThetaQuadrature};
pub use moments::{gauss_hermite, moment_witness, MomentWitness};
pub use smearing::{smearing_factors, time_smeared_norm, time_smeared_word, SmearedNorm, TimeProfile};
