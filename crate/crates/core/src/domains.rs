//! Bounded domains of C^n and the Euclidean geometry of inclusions.
//!
//! Disks and polydiscs carry closed forms. Semi-analytic domains
//! `{z in box : |g_i(z)| < t_i}` are handled by sampling, always rounding
//! toward the side that keeps contraction constants valid: diameters are
//! overestimated and boundary gaps underestimated.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holomap::HoloMap;
use crate::point::{check_dim, euclid_norm, Point};
use crate::sampling::{seeded_rng, Halton};

/// Multiplier applied to sampled boundary gaps.
pub const GAP_SAFETY: f64 = 0.9;
/// Gaps at or below this are treated as touching the boundary.
pub const GAP_FLOOR: f64 = 1e-12;
/// Default sample count for sampled geometry.
pub const DEFAULT_SAMPLES: usize = 512;
/// Near-boundary samples sit within this fraction of the domain scale from the boundary.
pub const NEAR_BOUNDARY_FRACTION: f64 = 0.01;

const RAY_COUNT: usize = 64;
const RAY_SEED: u64 = 0x005e_ed0f_2a75;
const MARCH_STEPS: usize = 64;
const BISECTIONS: usize = 60;

/// `|map(z)| < threshold`, with `map` a single-component holomorphic expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub map: HoloMap,
    pub threshold: f64,
}

impl Constraint {
    pub fn new(map: HoloMap, threshold: f64) -> Result<Self> {
        if map.output_dim() != 1 {
            return Err(Error::invalid("constraint maps must have one component"));
        }
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(Error::invalid("constraint thresholds must be positive"));
        }
        Ok(Constraint { map, threshold })
    }

    pub fn parse(text: &str, dim: usize, threshold: f64) -> Result<Self> {
        Self::new(HoloMap::parse(text, dim)?, threshold)
    }

    fn holds(&self, z: &[Complex64]) -> bool {
        match self.map.components()[0].eval(z) {
            Ok(w) => w.norm() < self.threshold,
            Err(_) => false,
        }
    }
}

/// Real and imaginary extent of one coordinate, as `[re_lo, re_hi, im_lo, im_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoxRange {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl BoxRange {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        BoxRange { re, im }
    }

    fn around(center: Complex64, radius: f64) -> Self {
        BoxRange {
            re: (center.re - radius, center.re + radius),
            im: (center.im - radius, center.im + radius),
        }
    }

    fn contains(&self, z: Complex64) -> bool {
        self.re.0 < z.re && z.re < self.re.1 && self.im.0 < z.im && z.im < self.im.1
    }

    fn is_valid(&self) -> bool {
        [self.re.0, self.re.1, self.im.0, self.im.1]
            .iter()
            .all(|x| x.is_finite())
            && self.re.0 < self.re.1
            && self.im.0 < self.im.1
    }

    fn lerp(&self, u: f64, v: f64) -> Complex64 {
        Complex64::new(
            self.re.0 + u * (self.re.1 - self.re.0),
            self.im.0 + v * (self.im.1 - self.im.0),
        )
    }

    fn diagonal_sqr(&self) -> f64 {
        (self.re.1 - self.re.0).powi(2) + (self.im.1 - self.im.0).powi(2)
    }

    fn min_half_width(&self) -> f64 {
        0.5 * (self.re.1 - self.re.0).min(self.im.1 - self.im.0)
    }

    fn center(&self) -> Complex64 {
        self.lerp(0.5, 0.5)
    }
}

impl From<[f64; 4]> for BoxRange {
    fn from(a: [f64; 4]) -> Self {
        BoxRange::new((a[0], a[1]), (a[2], a[3]))
    }
}

impl From<BoxRange> for [f64; 4] {
    fn from(b: BoxRange) -> Self {
        [b.re.0, b.re.1, b.im.0, b.im.1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiAnalytic {
    dim: usize,
    constraints: Vec<Constraint>,
    bbox: Vec<BoxRange>,
}

impl SemiAnalytic {
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounding_box(&self) -> &[BoxRange] {
        &self.bbox
    }

    fn contains_raw(&self, z: &[Complex64]) -> bool {
        self.bbox.iter().zip(z).all(|(b, &w)| b.contains(w)) && self.constraints.iter().all(|c| c.holds(z))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub enum Domain {
    Disk { center: Complex64, radius: f64 },
    Polydisc { centers: Vec<Complex64>, radii: Vec<f64> },
    SemiAnalytic(SemiAnalytic),
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("radius must be positive and finite, got {r}")))
    }
}

impl Domain {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        crate::point::check_finite(&[center])?;
        Ok(Domain::Disk { center, radius })
    }

    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn polydisc(centers: Vec<Complex64>, radii: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::invalid("a polydisc needs at least one factor"));
        }
        check_dim(centers.len(), radii.len())?;
        crate::point::check_finite(&centers)?;
        radii.iter().try_for_each(|&r| check_radius(r))?;
        Ok(Domain::Polydisc { centers, radii })
    }

    /// `{z in bbox : |g_i(z)| < t_i for all i}`.
    ///
    /// The box must enclose the domain: probes on the box boundary that
    /// satisfy every constraint are rejected.
    pub fn semianalytic(dim: usize, constraints: Vec<Constraint>, bbox: Vec<BoxRange>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        check_dim(dim, bbox.len())?;
        if !bbox.iter().all(BoxRange::is_valid) {
            return Err(Error::UnsupportedDomain(
                "bounding box must be finite and nondegenerate".into(),
            ));
        }
        for c in &constraints {
            check_dim(dim, c.map.input_dim())?;
        }
        let s = SemiAnalytic { dim, constraints, bbox };
        probe_box_boundary(&s)?;
        Ok(Domain::SemiAnalytic(s))
    }

    /// The same open set described by `|z_j - c_j| < ρ_j` inequalities.
    pub fn to_semianalytic(&self) -> Result<Domain> {
        match self.product_form() {
            None => Ok(self.clone()),
            Some((centers, radii)) => {
                let n = centers.len();
                let mut constraints = Vec::with_capacity(n);
                for (j, (c, r)) in centers.iter().zip(&radii).enumerate() {
                    let text = format!("z{} - ({:?}+{:?}i)", j + 1, c.re, c.im);
                    constraints.push(Constraint::parse(&text, n, *r)?);
                }
                let bbox = centers
                    .iter()
                    .zip(&radii)
                    .map(|(c, r)| BoxRange::around(*c, *r))
                    .collect();
                Domain::semianalytic(n, constraints, bbox)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Disk { .. } => 1,
            Domain::Polydisc { centers, .. } => centers.len(),
            Domain::SemiAnalytic(s) => s.dim,
        }
    }

    /// Centers and radii for Disk and Polydisc.
    pub fn product_form(&self) -> Option<(Vec<Complex64>, Vec<f64>)> {
        match self {
            Domain::Disk { center, radius } => Some((vec![*center], vec![*radius])),
            Domain::Polydisc { centers, radii } => Some((centers.clone(), radii.clone())),
            Domain::SemiAnalytic(_) => None,
        }
    }

    pub fn is_product(&self) -> bool {
        !matches!(self, Domain::SemiAnalytic(_))
    }

    pub fn bounding_box(&self) -> Vec<BoxRange> {
        match self {
            Domain::SemiAnalytic(s) => s.bbox.clone(),
            _ => {
                let (centers, radii) = self.product_form().unwrap();
                centers
                    .iter()
                    .zip(&radii)
                    .map(|(c, r)| BoxRange::around(*c, *r))
                    .collect()
            }
        }
    }

    /// Characteristic length: the smallest half-width of the bounding box.
    pub fn scale(&self) -> f64 {
        self.bounding_box()
            .iter()
            .map(BoxRange::min_half_width)
            .fold(f64::INFINITY, f64::min)
    }

    /// A distinguished interior point if one is known: the center of a
    /// disk or polydisc, or the box center of a semi-analytic domain when
    /// it belongs to the domain.
    pub fn center(&self) -> Option<Point> {
        let p = match self {
            Domain::Disk { center, .. } => Point::scalar(*center),
            Domain::Polydisc { centers, .. } => Point::new(centers.clone()),
            Domain::SemiAnalytic(s) => Point::new(s.bbox.iter().map(BoxRange::center).collect()),
        }
        .ok()?;
        self.contains_raw(&p).then_some(p)
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self.contains_raw(p))
    }

    /// Membership without the dimension check.
    pub fn contains_raw(&self, z: &[Complex64]) -> bool {
        match self {
            Domain::Disk { center, radius } => (z[0] - center).norm() < *radius,
            Domain::Polydisc { centers, radii } => {
                z.iter().zip(centers).zip(radii).all(|((w, c), r)| (w - c).norm() < *r)
            }
            Domain::SemiAnalytic(s) => s.contains_raw(z),
        }
    }

    fn require_inside(&self, p: &Point) -> Result<()> {
        if self.contains(p)? {
            Ok(())
        } else {
            Err(Error::outside(format!("point {:?} is not in the domain", p.coords())))
        }
    }

    /// Lower bound on the Euclidean distance from `p` to the complement.
    pub fn boundary_distance(&self, p: &Point) -> Result<f64> {
        self.require_inside(p)?;
        Ok(match self.product_form() {
            Some((centers, radii)) => product_margin(&centers, &radii, p),
            None => GAP_SAFETY * self.ray_distance(p),
        })
    }

    /// Signed margin of `p`: positive inside (a boundary-distance lower
    /// bound), negative outside. Outside a semi-analytic domain the
    /// magnitude is the worst constraint excess rather than a distance.
    pub fn signed_margin(&self, p: &Point) -> Result<f64> {
        check_dim(self.dim(), p.dim())?;
        if let Some((centers, radii)) = self.product_form() {
            return Ok(product_margin(&centers, &radii, p));
        }
        if self.contains_raw(p) {
            return self.boundary_distance(p);
        }
        let Domain::SemiAnalytic(s) = self else { unreachable!() };
        let mut excess: f64 = 0.0;
        for (b, w) in s.bbox.iter().zip(p.iter()) {
            excess = excess
                .max(b.re.0 - w.re)
                .max(w.re - b.re.1)
                .max(b.im.0 - w.im)
                .max(w.im - b.im.1);
        }
        for c in &s.constraints {
            match c.map.components()[0].eval(p) {
                Ok(w) => excess = excess.max(w.norm() - c.threshold),
                Err(_) => excess = f64::MAX,
            }
        }
        Ok(-excess.max(f64::MIN_POSITIVE))
    }

    /// Upper bound `R` on the Euclidean diameter.
    pub fn diameter_bound(&self) -> Result<f64> {
        match self.product_form() {
            Some((_, radii)) => Ok(2.0 * radii.iter().map(|r| r * r).sum::<f64>().sqrt()),
            None => {
                let d = self
                    .bounding_box()
                    .iter()
                    .map(BoxRange::diagonal_sqr)
                    .sum::<f64>()
                    .sqrt();
                if d.is_finite() {
                    Ok(d)
                } else {
                    Err(Error::UnsupportedDomain("unbounded bounding box".into()))
                }
            }
        }
    }

    /// Exit distance from `p` along the unit direction `u` (real 2n-vector
    /// packed as complex coordinates), found by marching then bisection.
    /// Returns a distance at which the point is still inside.
    fn exit_distance(&self, p: &[Complex64], u: &[Complex64], max_t: f64) -> f64 {
        let at = |t: f64| -> Vec<Complex64> { p.iter().zip(u).map(|(a, d)| a + d * t).collect() };
        let step = max_t / MARCH_STEPS as f64;
        let mut inside = 0.0;
        let mut outside = None;
        for k in 1..=MARCH_STEPS {
            let t = step * k as f64;
            if self.contains_raw(&at(t)) {
                inside = t;
            } else {
                outside = Some(t);
                break;
            }
        }
        let Some(mut outside) = outside else {
            return inside;
        };
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (inside + outside);
            if self.contains_raw(&at(mid)) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    fn ray_distance(&self, p: &[Complex64]) -> f64 {
        let diag = self.diameter_bound().unwrap_or(1.0);
        ray_directions(self.dim())
            .iter()
            .map(|u| self.exit_distance(p, u, diag))
            .fold(f64::INFINITY, f64::min)
    }

    /// `count` seeded low-discrepancy points of the domain. Every fourth
    /// point lies within [`NEAR_BOUNDARY_FRACTION`] of the scale from the
    /// boundary so that suprema are not biased toward the interior.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        if count == 0 {
            return Err(Error::invalid("sample count must be positive"));
        }
        match self.product_form() {
            Some((centers, radii)) => Ok(sample_product(&centers, &radii, count, seed)),
            None => self.sample_rejection(count, seed),
        }
    }

    fn sample_rejection(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        let n = self.dim();
        let bbox = self.bounding_box();
        let mut halton = Halton::new(2 * n, seed);
        let mut rng = seeded_rng(seed ^ 0x9e37_79b9_7f4a_7c15);
        let max_t = self.diameter_bound()?;
        let delta_scale = NEAR_BOUNDARY_FRACTION * self.scale();
        let max_attempts = 1000 * count + 1000;
        let mut out = Vec::with_capacity(count);
        for _ in 0..max_attempts {
            if out.len() == count {
                break;
            }
            let u = halton.next_point();
            let z: Vec<Complex64> = bbox
                .iter()
                .enumerate()
                .map(|(j, b)| b.lerp(u[2 * j], u[2 * j + 1]))
                .collect();
            if !self.contains_raw(&z) {
                continue;
            }
            let mut z = z;
            if out.len() % 4 == 3 {
                let dir = random_unit(&mut rng, n);
                let exit = self.exit_distance(&z, &dir, max_t);
                let w: f64 = rng.random::<f64>();
                let delta = delta_scale * (1e-3 + (1.0 - 1e-3) * w * w);
                let t = if exit > delta { exit - delta } else { 0.5 * exit };
                let moved: Vec<Complex64> = z.iter().zip(&dir).map(|(a, d)| a + d * t).collect();
                if self.contains_raw(&moved) {
                    z = moved;
                }
            }
            out.push(Point::new(z)?);
        }
        if out.len() < count {
            return Err(Error::SamplingExhausted {
                found: out.len(),
                requested: count,
            });
        }
        Ok(out)
    }
}

fn product_margin(centers: &[Complex64], radii: &[f64], p: &[Complex64]) -> f64 {
    p.iter()
        .zip(centers)
        .zip(radii)
        .map(|((w, c), r)| r - (w - c).norm())
        .fold(f64::INFINITY, f64::min)
}

fn sample_product(centers: &[Complex64], radii: &[f64], count: usize, seed: u64) -> Vec<Point> {
    let n = centers.len();
    let mut halton = Halton::new(2 * n + 1, seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = out.len();
        let u = halton.next_point();
        let near = |j: usize| -> bool {
            match i % 4 {
                3 => true,
                2 => j == (i / 4) % n,
                _ => false,
            }
        };
        let z: Vec<Complex64> = (0..n)
            .map(|j| {
                let rho = radii[j];
                let radius = if near(j) {
                    let w = u[2 * j];
                    rho - NEAR_BOUNDARY_FRACTION * rho * (1e-3 + (1.0 - 1e-3) * w * w)
                } else {
                    rho * u[2 * j].sqrt()
                };
                let theta = std::f64::consts::TAU * u[2 * j + 1];
                centers[j] + Complex64::from_polar(radius, theta)
            })
            .collect();
        let inside = z.iter().zip(centers).zip(radii).all(|((w, c), r)| (w - c).norm() < *r);
        if inside {
            out.push(Point::new(z).expect("finite sample"));
        }
    }
    out
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = euclid_norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Unit directions in C^n: the 4n real axes followed by seeded random ones.
pub(crate) fn ray_directions(n: usize) -> Vec<Vec<Complex64>> {
    let mut dirs = Vec::with_capacity(RAY_COUNT.max(4 * n));
    for j in 0..n {
        for unit in [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ] {
            let mut d = vec![Complex64::new(0.0, 0.0); n];
            d[j] = unit;
            dirs.push(d);
        }
    }
    let mut rng = seeded_rng(RAY_SEED);
    while dirs.len() < RAY_COUNT {
        dirs.push(random_unit(&mut rng, n));
    }
    dirs
}

pub(crate) fn random_unit_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    random_unit(rng, n)
}

fn probe_box_boundary(s: &SemiAnalytic) -> Result<()> {
    let n = s.dim;
    let mut halton = Halton::new(2 * n + 1, 0xb0c5);
    for _ in 0..(256 * n) {
        let u = halton.next_point();
        let face = ((u[2 * n] * (4 * n) as f64) as usize).min(4 * n - 1);
        let z: Vec<Complex64> = s
            .bbox
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let mut w = b.lerp(u[2 * j], u[2 * j + 1]);
                if face / 4 == j {
                    match face % 4 {
                        0 => w.re = b.re.0,
                        1 => w.re = b.re.1,
                        2 => w.im = b.im.0,
                        _ => w.im = b.im.1,
                    }
                }
                w
            })
            .collect();
        if s.constraints.iter().all(|c| c.holds(&z)) {
            return Err(Error::invalid(format!(
                "bounding box does not enclose the domain (boundary probe {z:?} satisfies every constraint)"
            )));
        }
    }
    Ok(())
}

/// Euclidean data of a relatively compact inclusion `U ⊂⊂ X`: `R` bounds
/// the diameter of `U` from above and `r` bounds the gap between `U` and
/// the boundary of `X` from below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InclusionGeometry {
    #[serde(rename = "R")]
    pub diameter: f64,
    #[serde(rename = "r")]
    pub gap: f64,
}

impl InclusionGeometry {
    pub fn compute(u: &Domain, x: &Domain, samples: usize, seed: u64) -> Result<Self> {
        Ok(InclusionGeometry {
            diameter: u.diameter_bound()?,
            gap: inner_gap(u, x, samples, seed)?,
        })
    }
}

/// Lower bound `r` on `inf_{x ∈ U} dist(x, ∂X)`.
pub fn inner_gap(u: &Domain, x: &Domain, samples: usize, seed: u64) -> Result<f64> {
    check_dim(x.dim(), u.dim())?;
    let gap = match (u.product_form(), x.product_form()) {
        (Some((cu, ru)), Some((cx, rx))) => (0..cu.len())
            .map(|j| rx[j] - ru[j] - (cx[j] - cu[j]).norm())
            .fold(f64::INFINITY, f64::min),
        _ => {
            let mut worst = f64::INFINITY;
            for p in u.sample(samples, seed)? {
                if !x.contains_raw(&p) {
                    return Err(Error::NotRelativelyCompact { gap: 0.0 });
                }
                // the nearest point of ∂U is at most boundary_distance(p) away
                worst = worst.min(x.boundary_distance(&p)? - u.boundary_distance(&p)?);
            }
            GAP_SAFETY * worst
        }
    };
    if gap > GAP_FLOOR {
        Ok(gap)
    } else {
        Err(Error::NotRelativelyCompact { gap })
    }
}

#[derive(Serialize, Deserialize)]
struct ConstraintRepr {
    map: String,
    threshold: f64,
}

#[derive(Serialize, Deserialize)]
struct DomainRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    centers: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constraints: Vec<ConstraintRepr>,
    #[serde(rename = "box", default, skip_serializing_if = "Vec::is_empty")]
    bbox: Vec<BoxRange>,
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        let mut repr = DomainRepr {
            kind: String::new(),
            dim: None,
            centers: vec![],
            radii: vec![],
            constraints: vec![],
            bbox: vec![],
        };
        match d {
            Domain::Disk { center, radius } => {
                repr.kind = "disk".into();
                repr.centers = vec![center];
                repr.radii = vec![radius];
            }
            Domain::Polydisc { centers, radii } => {
                repr.kind = "polydisc".into();
                repr.centers = centers;
                repr.radii = radii;
            }
            Domain::SemiAnalytic(s) => {
                repr.kind = "semianalytic".into();
                repr.dim = Some(s.dim);
                repr.constraints = s
                    .constraints
                    .iter()
                    .map(|c| ConstraintRepr {
                        map: c.map.to_string(),
                        threshold: c.threshold,
                    })
                    .collect();
                repr.bbox = s.bbox;
            }
        }
        repr
    }
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;

    fn try_from(r: DomainRepr) -> Result<Self> {
        match r.kind.as_str() {
            "disk" => {
                if r.centers.len() != 1 || r.radii.len() != 1 {
                    return Err(Error::invalid("a disk has exactly one center and one radius"));
                }
                Domain::disk(r.centers[0], r.radii[0])
            }
            "polydisc" => Domain::polydisc(r.centers, r.radii),
            "semianalytic" => {
                let dim = r.dim.unwrap_or(r.bbox.len());
                let constraints = r
                    .constraints
                    .iter()
                    .map(|c| Constraint::parse(&c.map, dim, c.threshold))
                    .collect::<Result<Vec<_>>>()?;
                Domain::semianalytic(dim, constraints, r.bbox)
            }
            other => Err(Error::invalid(format!("unknown domain kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(z: &[Complex64]) -> Point {
        Point::new(z.to_vec()).unwrap()
    }

    fn bidisc(r1: f64, r2: f64) -> Domain {
        Domain::polydisc(vec![c(0.0, 0.0); 2], vec![r1, r2]).unwrap()
    }

    fn unit_box_bidisc() -> Domain {
        bidisc(1.0, 1.0).to_semianalytic().unwrap()
    }

    #[test]
    fn membership() {
        let d = Domain::unit_disk();
        assert!(d.contains(&pt(&[c(0.0, 0.0)])).unwrap());
        assert!(!d.contains(&pt(&[c(1.0, 0.0)])).unwrap());
        assert!(bidisc(1.0, 1.0).contains(&pt(&[c(0.5, 0.0), c(0.0, 0.9)])).unwrap());
        assert!(matches!(
            d.contains(&pt(&[c(0.0, 0.0), c(0.0, 0.0)])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn boundary_distances() {
        let d = Domain::unit_disk();
        assert_eq!(d.boundary_distance(&pt(&[c(0.0, 0.0)])).unwrap(), 1.0);
        assert_eq!(d.boundary_distance(&pt(&[c(0.5, 0.0)])).unwrap(), 0.5);
        assert_eq!(
            bidisc(1.0, 2.0)
                .boundary_distance(&pt(&[c(0.0, 0.0), c(1.0, 0.0)]))
                .unwrap(),
            1.0
        );
        assert!(matches!(
            d.boundary_distance(&pt(&[c(2.0, 0.0)])),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn semianalytic_boundary_distance_is_conservative() {
        let d = unit_box_bidisc();
        let p = pt(&[c(0.3, 0.0), c(0.0, -0.2)]);
        let exact = 0.7;
        let got = d.boundary_distance(&p).unwrap();
        assert!(got <= exact && got > 0.8 * exact, "{got}");
        let origin = pt(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let got = d.boundary_distance(&origin).unwrap();
        assert!((got - GAP_SAFETY).abs() < 1e-9, "{got}");
    }

    #[test]
    fn diameters() {
        assert_eq!(Domain::disk(c(0.0, 0.0), 0.5).unwrap().diameter_bound().unwrap(), 1.0);
        assert_eq!(Domain::disk(c(3.0, 4.0), 0.5).unwrap().diameter_bound().unwrap(), 1.0);
        let r = bidisc(1.0, 1.0).diameter_bound().unwrap();
        assert!((r - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        // box diagonal of [-1,1]^4
        assert!((unit_box_bidisc().diameter_bound().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gaps() {
        let x = Domain::unit_disk();
        let u = Domain::disk(c(0.0, 0.0), 0.5).unwrap();
        assert_eq!(inner_gap(&u, &x, 64, 0).unwrap(), 0.5);
        let u = Domain::disk(c(0.25, 0.0), 0.5).unwrap();
        assert_eq!(inner_gap(&u, &x, 64, 0).unwrap(), 0.25);
        assert!(matches!(
            inner_gap(&x, &x, 64, 0),
            Err(Error::NotRelativelyCompact { .. })
        ));
        let big = Domain::disk(c(0.0, 0.0), 2.0).unwrap();
        assert!(matches!(
            inner_gap(&big, &x, 64, 0),
            Err(Error::NotRelativelyCompact { .. })
        ));
    }

    #[test]
    fn sampled_gap_is_a_lower_bound() {
        let x = unit_box_bidisc();
        let u = bidisc(0.5, 0.5);
        let r = inner_gap(&u, &x, 128, 3).unwrap();
        assert!(r <= 0.5 && r > 0.35, "{r}");
    }

    #[test]
    fn samples_are_members_and_deterministic() {
        let d = Domain::unit_disk();
        let a = d.sample(10, 7).unwrap();
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|p| p[0].norm() < 1.0));
        assert_eq!(a, d.sample(10, 7).unwrap());
        assert_ne!(a, d.sample(10, 8).unwrap());

        let pd = bidisc(1.0, 1.0);
        let pts = pd.sample(100, 1).unwrap();
        assert!(pts.iter().all(|p| pd.contains(p).unwrap()));
        assert!(matches!(d.sample(0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn samples_reach_near_boundary() {
        for d in [Domain::unit_disk(), unit_box_bidisc()] {
            let pts = d.sample(64, 5).unwrap();
            let closest = pts
                .iter()
                .map(|p| d.signed_margin(p).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(closest > 0.0 && closest < 0.02, "{closest}");
        }
    }

    #[test]
    fn semianalytic_sampling_exhaustion() {
        // |z1| < 1 and |z1 - 3| < 1 is empty
        let cons = vec![
            Constraint::parse("z1", 1, 1.0).unwrap(),
            Constraint::parse("z1 - 3", 1, 1.0).unwrap(),
        ];
        let d = Domain::semianalytic(1, cons, vec![BoxRange::new((-1.0, 4.0), (-1.0, 1.0))]).unwrap();
        assert!(matches!(d.sample(3, 0), Err(Error::SamplingExhausted { .. })));
    }

    #[test]
    fn box_must_enclose_domain() {
        let cons = vec![Constraint::parse("z1", 1, 1.0).unwrap()];
        let err = Domain::semianalytic(1, cons.clone(), vec![BoxRange::new((-0.5, 0.5), (-1.0, 1.0))]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        let err = Domain::semianalytic(1, cons, vec![BoxRange::new((-1.0, f64::INFINITY), (-1.0, 1.0))]);
        assert!(matches!(err, Err(Error::UnsupportedDomain(_))));
    }

    #[test]
    fn json_round_trip() {
        let d = Domain::disk(c(0.25, -0.5), 0.75).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"kind":"disk","centers":[[0.25,-0.5]],"radii":[0.75]}"#);
        assert_eq!(serde_json::from_str::<Domain>(&json).unwrap(), d);

        let p = bidisc(1.0, 0.3);
        let back: Domain = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);

        let s = unit_box_bidisc();
        let back: Domain = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);

        assert!(serde_json::from_str::<Domain>(r#"{"kind":"disk","centers":[[0,0]],"radii":[-1]}"#).is_err());
        assert!(serde_json::from_str::<Domain>(r#"{"kind":"annulus"}"#).is_err());
    }
}
