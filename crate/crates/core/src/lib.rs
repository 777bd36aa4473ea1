//! Quantum combs and the entanglement structure of multi-time processes.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`] labelled multipartite operators (tensor products, partial
//!   traces and transposes, Hermitian eigendecomposition, purification).
//! * [`sdp`] a primal-dual interior-point solver for complex Hermitian SDPs.
//! * [`comb`] channels, circuits and combs glued together with the link
//!   product, plus causality verification and conditioning.
//! * [`entanglement`] PPT tests, the PPT-mixture GME witness, the
//!   biseparability inequality, three-tangle, entanglement-breaking checks
//!   and channel steering.
//! * [`constructions`] named example combs and circuits, dilation,
//!   entanglement-breaking representations, conditional scans and the
//!   see-saw search.
//! * [`cli`] and [`report`] back the `comblab` binary.

pub mod cli;
pub mod comb;
pub mod config;
pub mod constructions;
pub mod entanglement;
pub mod error;
pub mod random;
pub mod report;
pub mod sdp;
pub mod tensor;

pub use comb::{Assemblage, Channel, ChannelKind, Circuit, Comb, Dir, Leg};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use tensor::{Operator, StateVector, C64};
