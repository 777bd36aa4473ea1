//! Entanglement criteria for states and combs.
//!
//! Combs are treated as unnormalised states: every criterion whose value
//! depends on the scale (PPT eigenvalues, witness values) is evaluated on
//! the unit-trace normalisation of its input.

mod eb;
mod gme;
mod ppt;
mod slocc;
mod steering;

pub use eb::{eb_check, sigma_map, EbReport, EbVerdict};
pub use gme::{bipartitions, gme_witness, gme_witness_with, witness_expectation, CutDecomposition, GmeVerdict, WitnessReport};
pub use ppt::{bisep_inequality, ppt_min_eig, BisepReport, CutSpec};
pub use slocc::{ghz_slocc_witness, local_filter, pure_tangle};
pub use steering::{lhs_feasibility, SteeringReport, SteeringVerdict};
