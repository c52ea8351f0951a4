//! Inverse problems: from integrated acoustic spectra back to lattice
//! lengths, the Poisson identity that ties the two, and generalized models.

pub mod generalized;
pub mod poisson;
pub mod recovery;

pub use generalized::{
    example1_candidates, example1_forward, example1_spectrum, example2_forward, example2_search, form_value, hausdorff,
    score_tuple, Example1Candidate, Example1Element, Example1Geometry, Example1Report, Example1Sample, GridAxis,
    TupleCandidate, TupleGrid,
};
pub use poisson::{gaussian_tail_bound, theta_check, theta_sides, truncation_radius, ThetaReport, ThetaSides};
pub use recovery::{estimate_scale, recover_lsp, ScaleEstimate};
