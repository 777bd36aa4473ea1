//! Named example combs and circuits, and constructions on two-step combs:
//! dilation, circuits with entanglement-breaking wires, conditional scans
//! and the see-saw search.

mod dilation;
mod eb;
mod examples;
mod scan;
mod seesaw;

pub use dilation::{audit, dilate, round_trip_residual, Dilation, DilationAudit};
pub use eb::{
    eb_representation, eb_representation_with, two_eb_product_form, Decomposition, EbOptions, EbRepresentation,
    ProductForm,
};
pub use examples::*;
pub use scan::{conditional_scan, effect, effect_operator, sample_angles, PartyScan, ScanOptions, ScanReport, Sampling};
pub use seesaw::{
    fibonacci_sphere, random_start, seesaw, EffectConstraint, IterationRecord, SeesawOptions, SeesawOutcome, SeesawState,
};
