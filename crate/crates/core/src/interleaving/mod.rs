//! Scale maps between offset filtrations, their certificates, and empirical
//! validation of the containments they assert.

pub mod certificate;
pub mod mobius;
pub mod offsets;

pub use certificate::{
    a_to_b, adaptive_to_balls, compose_interleavings, filtration, l_to_lhat, smoothed_to_balls, smoothing,
    x_to_xhat, InterleavingCertificate,
};
pub use mobius::{closed_form, make_h, rational, HKind, Interval, MobiusFunction};
pub use offsets::{
    admissible_scales, landmark_hausdorff_bound, membership_a, membership_b, validate_certificate,
    validate_containment, CertificateReport, DirectionReport, SublevelField, Violation,
};
