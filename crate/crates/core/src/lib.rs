//! Numerical checks for free scalar quantum fields on truncated Fock spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod epsilon_content;
pub mod error;
pub mod fft;
pub mod fit;
pub mod fock;
pub mod infrared;
pub mod multiindex;
pub mod phase_space;
pub mod quadrature;
pub mod scattering;
pub mod single_particle;
pub mod weyl_wick;

pub use error::{Error, Result};
pub use fock::{FockSpace, FockState, ModeBasis, OperatorWord};
pub use multiindex::{MultiIndex, TwoMultiIndex};
pub use single_particle::{MomentumGrid, SPVector};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
