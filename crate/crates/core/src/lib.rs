//! Elementary landscape decomposition of the Quadratic Assignment Problem
//! under the swap neighborhood, with brute-force oracles, random-walk
//! autocorrelation analysis and a QAPLIB-reading CLI.
//!
//! Permutations are 0-based throughout: facility `i` sits at location
//! `x.at(i)`, where the usual 1-based notation writes `x(i+1) = x.at(i)+1`.

pub mod cli;
pub mod decomposition;
mod error;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod permutation;
pub mod qaplib;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use decomposition::{
    averages, component_average, component_value_fast, component_value_ref, decompose, neighborhood_avg_wave, omega,
    omega_neighborhood_sum_oracle, phi_diag, wave_predict_component, AverageTriple, Component, ComponentTriple,
    Decompose, OmegaCase, OmegaParams,
};
pub use error::{Error, Result};
pub use generate::generate_instance;
pub use instance::{tensor_from_qap, GeneralTensor, Landscape, QapInstance};
pub use permutation::Permutation;
pub use scalar::{Literal, Mode, Rational, Scalar};
