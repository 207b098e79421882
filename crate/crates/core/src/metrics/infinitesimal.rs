use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{Domain, InclusionGeometry};
use crate::error::{Error, Result};
use crate::metrics::bound::{Bound, BoundKind};
use crate::metrics::competitors::{semianalytic, CompetitorFamily, Competitors};
use crate::metrics::poincare::pseudo_hyperbolic;
use crate::point::{check_dim, euclid_norm};

/// Radius tolerance for the affine-disk bisection.
pub const DISK_RADIUS_TOL: f64 = 1e-6;
const DISK_ANGLES: usize = 64;
const DISK_RINGS: [f64; 3] = [1.0, 0.5, 0.25];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Caratheodory,
    Kobayashi,
    Poincare,
}

/// An infinitesimal pseudometric `E(x, v)` on a fixed domain.
pub trait Metric: Sync {
    fn domain(&self) -> &Domain;

    /// Errors with [`Error::OutsideDomain`] when `x` is not in the domain.
    fn eval(&self, x: &[Complex64], v: &[Complex64]) -> Result<Bound>;

    /// Direction in which values are guaranteed, independent of `(x, v)`.
    fn bound_kind(&self) -> BoundKind;
}

fn check_args(d: &Domain, x: &[Complex64], v: &[Complex64]) -> Result<()> {
    check_dim(d.dim(), x.len())?;
    check_dim(d.dim(), v.len())?;
    if d.contains_raw(x) {
        Ok(())
    } else {
        Err(Error::outside(format!("base point {x:?} is not in the domain")))
    }
}

/// `max_j ρ_j |v_j| / (ρ_j² - |x_j - c_j|²)`, shared by both metrics on
/// disks and polydiscs.
fn product_metric(centers: &[Complex64], radii: &[f64], x: &[Complex64], v: &[Complex64]) -> Bound {
    let mut value: f64 = 0.0;
    let mut tol: f64 = 0.0;
    for j in 0..x.len() {
        let rho2 = radii[j] * radii[j];
        let denom = rho2 - (x[j] - centers[j]).norm_sqr();
        let m = radii[j] * v[j].norm() / denom;
        if m >= value {
            value = m;
            tol = 8.0 * f64::EPSILON * m * rho2 / denom;
        }
    }
    Bound::exact(value, tol)
}

/// Carathéodory–Reiffen pseudometric.
#[derive(Debug, Clone)]
pub struct Caratheodory<'a> {
    domain: &'a Domain,
    family: CompetitorFamily,
    competitors: Option<Competitors>,
}

impl<'a> Caratheodory<'a> {
    pub fn new(domain: &'a Domain) -> Self {
        Self::with_family(domain, CompetitorFamily::default())
    }

    pub fn with_family(domain: &'a Domain, family: CompetitorFamily) -> Self {
        let competitors = semianalytic(domain).map(|s| Competitors::build(s, &family));
        Caratheodory {
            domain,
            family,
            competitors,
        }
    }

    /// Carathéodory pseudodistance `c_X(a, b)`.
    pub fn distance(&self, a: &[Complex64], b: &[Complex64]) -> Result<Bound> {
        let d = self.domain;
        check_args(d, a, b)?;
        if !d.contains_raw(b) {
            return Err(Error::outside(format!("{b:?} is not in the domain")));
        }
        if a == b {
            return Ok(Bound::zero());
        }
        match (d.product_form(), &self.competitors) {
            (Some((centers, radii)), _) => {
                let mut value: f64 = 0.0;
                for j in 0..a.len() {
                    let z = (a[j] - centers[j]) / radii[j];
                    let w = (b[j] - centers[j]) / radii[j];
                    value = value.max(pseudo_hyperbolic(z, w).atanh());
                }
                Ok(Bound::exact(value, 16.0 * f64::EPSILON * (1.0 + value)))
            }
            (None, Some(comp)) => {
                let s = semianalytic(d).unwrap();
                let value = comp.distance_lower(s, self.family.use_constraints, a, b)?;
                Ok(Bound::lower(value, 16.0 * f64::EPSILON * (1.0 + value)))
            }
            (None, None) => unreachable!("competitors exist for semi-analytic domains"),
        }
    }
}

impl Metric for Caratheodory<'_> {
    fn domain(&self) -> &Domain {
        self.domain
    }

    fn eval(&self, x: &[Complex64], v: &[Complex64]) -> Result<Bound> {
        check_args(self.domain, x, v)?;
        match (self.domain.product_form(), &self.competitors) {
            (Some((centers, radii)), _) => Ok(product_metric(&centers, &radii, x, v)),
            (None, Some(comp)) => {
                let s = semianalytic(self.domain).unwrap();
                let value = comp.metric_lower(s, self.family.use_constraints, x, v)?;
                Ok(Bound::lower(value, 16.0 * f64::EPSILON * value))
            }
            (None, None) => unreachable!("competitors exist for semi-analytic domains"),
        }
    }

    fn bound_kind(&self) -> BoundKind {
        if self.domain.is_product() {
            BoundKind::Exact
        } else {
            BoundKind::Lower
        }
    }
}

/// A relatively compact `inner ⊂⊂ domain` whose affine disks, dilated by
/// `1 + r/R`, stay in the outer domain.
#[derive(Debug, Clone, Copy)]
pub struct Enclosure<'a> {
    pub inner: &'a Domain,
    pub geometry: InclusionGeometry,
}

/// Kobayashi–Royden pseudometric.
#[derive(Debug, Clone)]
pub struct Kobayashi<'a> {
    domain: &'a Domain,
    enclosure: Option<Enclosure<'a>>,
}

impl<'a> Kobayashi<'a> {
    pub fn new(domain: &'a Domain) -> Self {
        Kobayashi {
            domain,
            enclosure: None,
        }
    }

    pub fn with_enclosure(domain: &'a Domain, enclosure: Enclosure<'a>) -> Self {
        Kobayashi {
            domain,
            enclosure: Some(enclosure),
        }
    }

    /// Largest `ρ` (to [`DISK_RADIUS_TOL`]) such that `ζ ↦ x + ζ ρ u`
    /// keeps the sampled rings of the closed unit disk inside `d`.
    pub fn affine_disk_radius(d: &Domain, x: &[Complex64], u: &[Complex64]) -> f64 {
        let mut p = x.to_vec();
        let mut fits_on = |rings: &[f64], rho: f64| -> bool {
            rings.iter().all(|&ring| {
                (0..DISK_ANGLES).all(|k| {
                    let zeta = Complex64::from_polar(ring * rho, std::f64::consts::TAU * k as f64 / DISK_ANGLES as f64);
                    for ((pj, a), b) in p.iter_mut().zip(x).zip(u) {
                        *pj = a + zeta * b;
                    }
                    d.contains_raw(&p)
                })
            })
        };
        // the outer ring almost always decides; the full check confirms
        let lo = bisect_radius(d, |rho| fits_on(&DISK_RINGS[..1], rho), 0.0);
        if fits_on(&DISK_RINGS, lo) {
            return lo;
        }
        bisect_radius(d, |rho| fits_on(&DISK_RINGS, rho), 0.0).min(lo)
    }
}

fn bisect_radius(d: &Domain, mut fits: impl FnMut(f64) -> bool, mut lo: f64) -> f64 {
    let mut hi = d.diameter_bound().unwrap_or(1.0);
    while fits(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > DISK_RADIUS_TOL {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

impl Metric for Kobayashi<'_> {
    fn domain(&self) -> &Domain {
        self.domain
    }

    fn eval(&self, x: &[Complex64], v: &[Complex64]) -> Result<Bound> {
        check_args(self.domain, x, v)?;
        if let Some((centers, radii)) = self.domain.product_form() {
            return Ok(product_metric(&centers, &radii, x, v));
        }
        let norm = euclid_norm(v);
        if norm == 0.0 {
            return Ok(Bound::zero());
        }
        // fix the phase so that v and λv probe the same disks
        let lead = v.iter().fold(
            Complex64::new(0.0, 0.0),
            |m, w| if w.norm() > m.norm() { *w } else { m },
        );
        let phase = lead.conj() / lead.norm();
        let u: Vec<Complex64> = v.iter().map(|w| w * phase / norm).collect();
        let mut rho = Self::affine_disk_radius(self.domain, x, &u);
        if let Some(enc) = &self.enclosure {
            if enc.inner.contains_raw(x) {
                let g = enc.geometry;
                let dilated = (1.0 + g.gap / g.diameter) * Self::affine_disk_radius(enc.inner, x, &u);
                rho = rho.max(dilated);
            }
        }
        if rho.is_nan() || rho <= 0.0 {
            return Err(Error::outside("no analytic disk found through the base point"));
        }
        let value = norm / rho;
        let tol = norm / rho - norm / (rho + DISK_RADIUS_TOL);
        Ok(Bound::upper(value, tol))
    }

    fn bound_kind(&self) -> BoundKind {
        if self.domain.is_product() {
            BoundKind::Exact
        } else {
            BoundKind::Upper
        }
    }
}

/// Convenience wrapper returning the metric evaluator named by `kind`.
/// `Poincare` requires the unit disk.
pub fn metric_for(kind: MetricKind, domain: &Domain) -> Result<Box<dyn Metric + '_>> {
    Ok(match kind {
        MetricKind::Caratheodory => Box::new(Caratheodory::new(domain)),
        MetricKind::Kobayashi => Box::new(Kobayashi::new(domain)),
        MetricKind::Poincare => {
            if *domain != Domain::unit_disk() {
                return Err(Error::invalid("the Poincaré metric lives on the unit disk"));
            }
            Box::new(Caratheodory::new(domain))
        }
    })
}

pub fn caratheodory_metric(d: &Domain, x: &[Complex64], v: &[Complex64]) -> Result<Bound> {
    Caratheodory::new(d).eval(x, v)
}

pub fn kobayashi_metric(d: &Domain, x: &[Complex64], v: &[Complex64]) -> Result<Bound> {
    Kobayashi::new(d).eval(x, v)
}

pub fn caratheodory_distance(d: &Domain, a: &[Complex64], b: &[Complex64]) -> Result<Bound> {
    Caratheodory::new(d).distance(a, b)
}
