//! Invariant pseudometrics and pseudodistances with bound-direction
//! bookkeeping.

mod bound;
mod competitors;
mod infinitesimal;
mod path;
mod poincare;
mod quadrature;
mod query;

pub use bound::{Bound, BoundKind};
pub use competitors::{CompetitorFamily, DEFAULT_DIRECTIONS};
pub use infinitesimal::{
    caratheodory_distance, caratheodory_metric, kobayashi_metric, metric_for, Caratheodory, Enclosure, Kobayashi,
    Metric, MetricKind, DISK_RADIUS_TOL,
};
pub use path::{integrated_distance, path_length, PathOptions, Polyline, DEFAULT_QUAD_ORDER, MAX_QUAD_REFINEMENTS};
pub use poincare::{mobius, poincare_distance, poincare_metric};
pub use quadrature::GaussLegendre;
pub use query::MetricQuery;
