use serde::{Deserialize, Serialize};

use crate::domains::Domain;
use crate::error::Result;
use crate::holomap::HoloMap;
use crate::point::check_dim;

/// Minimum image margin for a `supported` verdict.
pub const RANGE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeVerdict {
    Supported,
    Refuted,
    Inconclusive,
}

/// Sampled evidence that `f(X)` is relatively compact in `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeEvidence {
    pub samples: usize,
    /// Smallest signed margin of an image point in the target (negative when
    /// an image escaped).
    pub worst_margin: f64,
    /// Images outside the target, including evaluation singularities.
    pub escaped: usize,
    pub verdict: RangeVerdict,
}

pub fn range_check(f: &HoloMap, x: &Domain, u: &Domain, samples: usize, seed: u64) -> Result<RangeEvidence> {
    range_check_with_floor(f, x, u, samples, seed, RANGE_FLOOR)
}

pub fn range_check_with_floor(
    f: &HoloMap,
    x: &Domain,
    u: &Domain,
    samples: usize,
    seed: u64,
    floor: f64,
) -> Result<RangeEvidence> {
    check_dim(x.dim(), f.input_dim())?;
    check_dim(u.dim(), f.output_dim())?;
    let mut points = x.sample(samples, seed)?;
    if let Some(c) = x.center() {
        points.push(c);
    }
    let mut worst = f64::INFINITY;
    let mut escaped = 0;
    for p in &points {
        match f.eval(p) {
            Ok(image) => {
                let m = u.signed_margin(&image)?;
                if m <= 0.0 {
                    escaped += 1;
                }
                worst = worst.min(m);
            }
            Err(_) => escaped += 1,
        }
    }
    let verdict = if escaped > 0 {
        RangeVerdict::Refuted
    } else if worst >= floor {
        RangeVerdict::Supported
    } else {
        RangeVerdict::Inconclusive
    };
    Ok(RangeEvidence {
        samples: points.len(),
        worst_margin: if worst.is_finite() { worst } else { f64::MIN },
        escaped,
        verdict,
    })
}
