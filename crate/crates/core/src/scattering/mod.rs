//! Klein–Gordon wavepackets, Haag–Ruelle creators and detector sums for the free field.

mod detector;
mod haag_ruelle;
mod kg;
mod radial;

pub use detector::{detector_integral, DetectorReport};
pub use haag_ruelle::{
    asymptotic_state_convergence, asymptotic_states_on, chi_delta, hr_fock_space, permanent_overlap, split_point, velocity_split, AsymptoticReport, HRCreationSpec,
    HRFockSpec, HRTimeProfile, VelocitySplit,
};
pub use kg::{dispersion_fit, kg_propagate, DispersionFit, KGSnapshot, KGWavepacket};
pub use radial::{radial_dispersion_fit, RadialDispersion, RadialPacket, RadialProfile, RadialSnapshot};

#[cfg(test)]
mod tests;
