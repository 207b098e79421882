//! Points and tangent vectors of C^n.

use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of C^n, n ≥ 1, with finite coordinates.
///
/// Serializes as a list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Point(Vec<Complex64>);

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a point needs at least one coordinate"));
        }
        check_finite(&coords)?;
        Ok(Point(coords))
    }

    /// One-dimensional point.
    pub fn scalar(z: Complex64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.0
    }

    /// `self + t·dir`, unchecked against any domain.
    pub fn offset(&self, dir: &[Complex64], t: f64) -> Result<Point> {
        if dir.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dir.len(),
            });
        }
        Point::new(self.0.iter().zip(dir).map(|(p, d)| p + d * t).collect())
    }

    pub fn distance(&self, other: &Point) -> f64 {
        euclid_norm_diff(&self.0, &other.0)
    }
}

impl Deref for Point {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl TryFrom<Vec<Complex64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<Complex64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<Complex64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// A complex direction `dir` attached at `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Point,
    pub dir: Vec<Complex64>,
}

impl TangentVector {
    pub fn new(base: Point, dir: Vec<Complex64>) -> Result<Self> {
        if dir.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: dir.len(),
            });
        }
        check_finite(&dir)?;
        Ok(TangentVector { base, dir })
    }
}

pub(crate) fn check_finite(v: &[Complex64]) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("coordinates must be finite"))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Euclidean norm of a vector of C^n (identified with R^{2n}).
pub fn euclid_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn euclid_norm_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
