use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::Domain;
use crate::error::Result;
use crate::metrics::bound::Bound;
use crate::metrics::infinitesimal::{metric_for, MetricKind};
use crate::point::Point;

fn unit_disk() -> Domain {
    Domain::unit_disk()
}

/// A serialized infinitesimal-metric query:
/// `{"metric": …, "domain": …, "point": …, "vector": …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricQuery {
    pub metric: MetricKind,
    /// Defaults to the unit disk (required for `poincare`).
    #[serde(default = "unit_disk")]
    pub domain: Domain,
    pub point: Point,
    pub vector: Vec<Complex64>,
}

impl MetricQuery {
    pub fn evaluate(&self) -> Result<Bound> {
        metric_for(self.metric, &self.domain)?.eval(&self.point, &self.vector)
    }
}
