//! Invariant metrics on bounded domains of `Cⁿ`, contraction constants for
//! relatively compact inclusions, and certified Picard iteration for
//! holomorphic self-maps.
//!
//! * [`domains`]: disks, polydiscs and semi-analytic domains with sampling
//!   and boundary geometry.
//! * [`holomap`]: holomorphic maps parsed from rational expressions, with
//!   forward-mode derivatives.
//! * [`metrics`]: Carathéodory and Kobayashi metrics and their integrated
//!   distances, each reported as an exact value or a one-sided bound.
//! * [`contraction`]: contraction constants `k < 1` and their verification.
//! * [`fixedpoint`]: Picard iteration with tail bounds.

pub mod contraction;
pub mod domains;
pub mod error;
pub mod fixedpoint;
pub mod holomap;
pub mod metrics;
pub mod point;
pub mod sampling;

pub use num_complex::Complex64;

pub use contraction::{
    caratheodory_diameter, dilate_disk, dilation_constant, theorem1_constant, verify_metric_contraction,
    CertificateMethod, ContractionCertificate, ContractionReport, DiameterOptions, Verdict,
};
pub use domains::{inner_gap, BoxRange, Constraint, Domain, InclusionGeometry, SemiAnalytic};
pub use error::{Error, Result};
pub use fixedpoint::{
    certify_tail, picard_solve, verify_decay, DecayReport, DecayVerdict, FixedPointResult, IterationTrace,
    SolveOptions, StepDistance, StopRule,
};
pub use holomap::{parse_constant, range_check, HoloMap, RangeEvidence, RangeVerdict};
pub use metrics::{
    caratheodory_distance, caratheodory_metric, integrated_distance, kobayashi_metric, poincare_distance,
    poincare_metric, Bound, BoundKind, Caratheodory, Kobayashi, Metric, MetricKind, PathOptions,
};
pub use point::{Point, TangentVector};
