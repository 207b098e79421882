//! Contraction constants for relatively compact inclusions `U ⊂⊂ X`.
//!
//! Two routes give `k < 1` with `E_X(a, v) ≤ k E_U(a, v)`:
//!
//! * `tanh_diameter`: `k = tanh M`, `M` the Carathéodory diameter of `U`
//!   measured in `X`. Rigorous only when `M` is known exactly or from
//!   above; sampled `M` is a lower bound and the certificate is flagged.
//! * `dilation`: `k = R / (R + r)` from a Euclidean diameter bound `R` of
//!   `U` and a boundary gap `r`; any analytic disk in `U` dilated by
//!   `1 + r/R` about its center stays in `X`. Rigorous whenever `R` is an
//!   upper and `r` a lower bound.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{inner_gap, Domain, InclusionGeometry};
use crate::error::{Error, Result};
use crate::holomap::{Expr, HoloMap};
use crate::metrics::{Bound, Caratheodory, Kobayashi, Metric, MetricKind};
use crate::point::{check_dim, Point};
use crate::sampling::seeded_rng;

pub const DEFAULT_VERIFY_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMethod {
    TanhDiameter,
    Dilation,
}

/// `{"k", "method", "M", "R", "r", "rigorous"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub k: f64,
    pub method: CertificateMethod,
    #[serde(rename = "M")]
    pub diameter_m: Option<f64>,
    #[serde(rename = "R")]
    pub diameter_r: Option<f64>,
    #[serde(rename = "r")]
    pub gap: Option<f64>,
    pub rigorous: bool,
}

impl ContractionCertificate {
    /// `k = tanh M`; rigorous when `M` is exact or an upper bound.
    pub fn from_diameter(m: &Bound) -> Result<Self> {
        let k = theorem1_constant(m.value)?;
        Ok(ContractionCertificate {
            k,
            method: CertificateMethod::TanhDiameter,
            diameter_m: Some(m.value),
            diameter_r: None,
            gap: None,
            rigorous: m.upper_estimate().is_some(),
        })
    }

    pub fn from_geometry(g: InclusionGeometry) -> Result<Self> {
        Ok(ContractionCertificate {
            k: dilation_constant(g.diameter, g.gap)?,
            method: CertificateMethod::Dilation,
            diameter_m: None,
            diameter_r: Some(g.diameter),
            gap: Some(g.gap),
            rigorous: true,
        })
    }

    /// Certificate for `U ⊂⊂ X` by the requested route.
    pub fn for_inclusion(x: &Domain, u: &Domain, method: CertificateMethod, samples: usize, seed: u64) -> Result<Self> {
        match method {
            CertificateMethod::Dilation => Self::from_geometry(InclusionGeometry::compute(u, x, samples, seed)?),
            CertificateMethod::TanhDiameter => {
                let m = caratheodory_diameter(
                    x,
                    u,
                    &DiameterOptions {
                        samples,
                        seed,
                        closed_form: true,
                    },
                )?;
                Self::from_diameter(&m)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterOptions {
    pub samples: usize,
    pub seed: u64,
    /// Use `max_j 2 atanh(ρ_U,j / ρ_X,j)` for concentric disks and polydiscs.
    pub closed_form: bool,
}

impl Default for DiameterOptions {
    fn default() -> Self {
        DiameterOptions {
            samples: crate::domains::DEFAULT_SAMPLES,
            seed: 0,
            closed_form: true,
        }
    }
}

fn concentric(x: &Domain, u: &Domain) -> Option<Vec<(f64, f64)>> {
    let (cx, rx) = x.product_form()?;
    let (cu, ru) = u.product_form()?;
    (cx == cu).then(|| ru.into_iter().zip(rx).collect())
}

/// Carathéodory diameter `M = sup_{x, y ∈ U} c_X(x, y)`.
///
/// Exact for concentric disks and polydiscs (antipodal points of the
/// distinguished boundary are extremal); otherwise the maximum over
/// sampled pairs, a lower bound.
pub fn caratheodory_diameter(x: &Domain, u: &Domain, opts: &DiameterOptions) -> Result<Bound> {
    inner_gap(u, x, opts.samples, opts.seed)?;
    if opts.closed_form {
        if let Some(pairs) = concentric(x, u) {
            let m = pairs.iter().map(|(ru, rx)| 2.0 * (ru / rx).atanh()).fold(0.0, f64::max);
            return Ok(Bound::exact(m, 8.0 * f64::EPSILON * (1.0 + m)));
        }
    }
    let mut pts = u.sample(opts.samples, opts.seed)?;
    if let Some(c) = u.center() {
        pts.push(c);
    }
    let metric = Caratheodory::new(x);
    let row_max: Vec<(f64, f64)> = (0..pts.len())
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let mut best = (0.0_f64, 0.0_f64);
            for j in (i + 1)..pts.len() {
                let d = metric.distance(&pts[i], &pts[j])?;
                if d.value > best.0 {
                    best = (d.value, d.tol);
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let (m, tol) = row_max
        .into_iter()
        .fold((0.0, 0.0), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(Bound::lower(m, tol))
}

/// `k = tanh M`.
pub fn theorem1_constant(m: f64) -> Result<f64> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::invalid(format!(
            "diameter must be finite and nonnegative, got {m}"
        )));
    }
    let k = m.tanh();
    if k >= 1.0 {
        return Err(Error::invalid(format!("tanh({m}) rounds to 1")));
    }
    Ok(k)
}

/// `k = 1 / (1 + r/R) = R / (R + r)`.
pub fn dilation_constant(diameter: f64, gap: f64) -> Result<f64> {
    if !(diameter > 0.0 && diameter.is_finite() && gap > 0.0 && gap.is_finite()) {
        return Err(Error::invalid(format!(
            "R and r must be positive and finite, got R = {diameter}, r = {gap}"
        )));
    }
    Ok(diameter / (diameter + gap))
}

/// `ψ(ζ) = (1 + r/R)(φ(ζ) - φ(0)) + φ(0)`: the analytic disk `φ` dilated
/// about its center. `ψ(0) = φ(0)` and `ψ'(0) = (1 + r/R) φ'(0)`.
pub fn dilate_disk(phi: &HoloMap, gap: f64, diameter: f64) -> Result<HoloMap> {
    check_dim(1, phi.input_dim())?;
    dilation_constant(diameter, gap)?;
    let factor = Complex64::new(1.0 + gap / diameter, 0.0);
    let center = phi.eval_raw(&[Complex64::new(0.0, 0.0)])?;
    let components = phi
        .components()
        .iter()
        .zip(center)
        .map(|(e, c)| {
            Expr::Add(
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(factor)),
                    Box::new(Expr::Sub(Box::new(e.clone()), Box::new(Expr::Const(c)))),
                )),
                Box::new(Expr::Const(c)),
            )
        })
        .collect();
    HoloMap::from_components(1, components)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Inconclusive,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub point: Point,
    pub direction: Vec<Complex64>,
    /// `E_X(x, v)`
    pub outer: Bound,
    /// `E_U(x, v)`
    pub inner: Bound,
    pub ratio: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub k: f64,
    pub metric: MetricKind,
    pub samples: usize,
    pub holds: usize,
    pub inconclusive: usize,
    pub violated: usize,
    pub verdict: Verdict,
    pub max_ratio: Option<f64>,
    pub worst_point: Option<Point>,
    #[serde(skip)]
    pub checks: Vec<SampleCheck>,
}

/// Absolute slack allowed in the contraction comparison.
const VERIFY_TOL: f64 = 1e-12;

fn judge(outer: &Bound, inner: &Bound, k: f64) -> Verdict {
    let slack = VERIFY_TOL * (1.0 + k * inner.value);
    if let (Some(hi), Some(lo)) = (outer.upper_estimate(), inner.lower_estimate()) {
        if hi <= k * lo + slack {
            return Verdict::Holds;
        }
    }
    if outer.is_exact() && inner.is_exact() && outer.value - outer.tol > k * (inner.value + inner.tol) + slack {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// Checks `E_X(x, v) ≤ k E_U(x, v)` at sampled `x ∈ U` (the center of `U`
/// first, then boundary-biased samples) and directions `v` (coordinate axes
/// and random unit vectors).
pub fn verify_metric_contraction(
    x: &Domain,
    u: &Domain,
    k: f64,
    metric: MetricKind,
    samples: usize,
    seed: u64,
) -> Result<ContractionReport> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::invalid(format!("k must lie in (0, 1), got {k}")));
    }
    check_dim(x.dim(), u.dim())?;
    let n = u.dim();
    let mut points: Vec<Point> = u.center().into_iter().collect();
    if samples > points.len() {
        points.extend(u.sample(samples - points.len(), seed)?);
    }
    let mut rng = seeded_rng(seed.wrapping_add(0x7e57));
    let directions: Vec<Vec<Complex64>> = (0..points.len())
        .map(|i| {
            if i % 4 == 0 {
                let mut d = vec![Complex64::new(0.0, 0.0); n];
                d[(i / 4) % n] = Complex64::new(1.0, 0.0);
                d
            } else {
                let mut d = crate::domains::random_unit_direction(&mut rng, n);
                let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                d.iter_mut().for_each(|z| *z *= Complex64::from_polar(1.0, phase));
                d
            }
        })
        .collect();

    let (outer_m, inner_m): (Box<dyn Metric>, Box<dyn Metric>) = match metric {
        MetricKind::Caratheodory | MetricKind::Poincare => {
            (Box::new(Caratheodory::new(x)), Box::new(Caratheodory::new(u)))
        }
        MetricKind::Kobayashi => (Box::new(Kobayashi::new(x)), Box::new(Kobayashi::new(u))),
    };

    let checks: Vec<SampleCheck> = points
        .par_iter()
        .zip(directions.par_iter())
        .map(|(p, v)| -> Result<SampleCheck> {
            let outer = outer_m.eval(p, v)?;
            let inner = inner_m.eval(p, v)?;
            let ratio = (inner.value > 0.0).then(|| outer.value / inner.value);
            Ok(SampleCheck {
                point: p.clone(),
                direction: v.clone(),
                outer,
                inner,
                ratio,
                verdict: judge(&outer, &inner, k),
            })
        })
        .collect::<Result<_>>()?;

    let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
    let (holds, inconclusive, violated) = (
        count(Verdict::Holds),
        count(Verdict::Inconclusive),
        count(Verdict::Violated),
    );
    let verdict = if violated > 0 {
        Verdict::Violated
    } else if inconclusive > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    };
    let mut max_ratio: Option<f64> = None;
    let mut worst_point = None;
    for c in &checks {
        if let Some(r) = c.ratio {
            if max_ratio.is_none_or(|m| r > m) {
                max_ratio = Some(r);
                worst_point = Some(c.point.clone());
            }
        }
    }
    Ok(ContractionReport {
        k,
        metric,
        samples: checks.len(),
        holds,
        inconclusive,
        violated,
        verdict,
        max_ratio,
        worst_point,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk(r: f64) -> Domain {
        Domain::disk(c(0.0, 0.0), r).unwrap()
    }

    #[test]
    fn diameter_of_half_disk() {
        let m = caratheodory_diameter(&disk(1.0), &disk(0.5), &DiameterOptions::default()).unwrap();
        assert!(m.is_exact());
        assert!((m.value - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn sampled_diameter_is_a_close_lower_bound() {
        let opts = DiameterOptions {
            samples: 100,
            seed: 3,
            closed_form: false,
        };
        let m = caratheodory_diameter(&disk(1.0), &disk(0.5), &opts).unwrap();
        assert_eq!(m.kind, crate::metrics::BoundKind::Lower);
        let ln3 = 3f64.ln();
        assert!(m.value <= ln3 && m.value >= 0.98 * ln3, "{}", m.value);
    }

    #[test]
    fn point_like_inner_domain() {
        let m = caratheodory_diameter(&disk(1.0), &disk(1e-12), &DiameterOptions::default()).unwrap();
        assert!(m.value.abs() < 1e-11);
    }

    #[test]
    fn diameter_needs_relative_compactness() {
        assert!(matches!(
            caratheodory_diameter(&disk(1.0), &disk(1.0), &DiameterOptions::default()),
            Err(Error::NotRelativelyCompact { .. })
        ));
    }

    #[test]
    fn tanh_constants() {
        assert!((theorem1_constant(3f64.ln()).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(theorem1_constant(0.0).unwrap(), 0.0);
        let k = theorem1_constant(2.0 * 0.6f64.atanh()).unwrap();
        assert!((k - 1.2 / 1.36).abs() < 1e-15);
        assert!(theorem1_constant(-1.0).is_err());
        assert!(theorem1_constant(50.0).is_err());
    }

    #[test]
    fn dilation_constants() {
        assert_eq!(dilation_constant(1.0, 0.5).unwrap(), 2.0 / 3.0);
        assert_eq!(dilation_constant(2.0, 2.0).unwrap(), 0.5);
        let k = dilation_constant(1.0, 1e-9).unwrap();
        assert!(k < 1.0 && (1.0 - k - 1e-9).abs() < 1e-15);
        assert!(dilation_constant(0.0, 1.0).is_err());
        assert!(dilation_constant(1.0, -1.0).is_err());
    }

    #[test]
    fn dilation_monotonicity() {
        let grid = [0.1, 0.3, 0.7, 1.0, 2.5];
        for &big_r in &grid {
            for w in grid.windows(2) {
                assert!(dilation_constant(big_r, w[1]).unwrap() < dilation_constant(big_r, w[0]).unwrap());
                assert!(dilation_constant(w[1], big_r).unwrap() > dilation_constant(w[0], big_r).unwrap());
            }
        }
    }

    #[test]
    fn certificates() {
        let cert =
            ContractionCertificate::for_inclusion(&disk(1.0), &disk(0.5), CertificateMethod::Dilation, 64, 0).unwrap();
        assert_eq!(cert.k, 2.0 / 3.0);
        assert!(cert.rigorous);
        let json = serde_json::to_string(&cert).unwrap();
        assert_eq!(
            json,
            r#"{"k":0.6666666666666666,"method":"dilation","M":null,"R":1.0,"r":0.5,"rigorous":true}"#
        );

        let cert =
            ContractionCertificate::for_inclusion(&disk(1.0), &disk(0.5), CertificateMethod::TanhDiameter, 64, 0)
                .unwrap();
        assert!((cert.k - 0.8).abs() < 1e-15);
        assert!(cert.rigorous);

        let sampled = Bound::lower(1.0, 0.0);
        assert!(!ContractionCertificate::from_diameter(&sampled).unwrap().rigorous);
    }

    #[test]
    fn dilated_disks() {
        let phi = HoloMap::parse("0.4*z1", 1).unwrap();
        let psi = dilate_disk(&phi, 0.5, 1.0).unwrap();
        for z in [c(0.3, 0.0), c(-0.2, 0.7)] {
            let got = psi.eval_raw(&[z]).unwrap()[0];
            assert!((got - 0.6 * z).norm() < 1e-15);
        }

        let konst = HoloMap::parse("0.1+0.2i", 1).unwrap();
        let psi = dilate_disk(&konst, 0.5, 1.0).unwrap();
        assert_eq!(
            psi.eval_raw(&[c(0.5, 0.0)]).unwrap(),
            konst.eval_raw(&[c(0.5, 0.0)]).unwrap()
        );

        let phi = HoloMap::parse("0.2 + 0.3*z1 - 0.1*z1^2; 0.25*(z1 + 1)^2 - 0.25", 1).unwrap();
        let psi = dilate_disk(&phi, 0.5, 1.0).unwrap();
        let zero = [c(0.0, 0.0)];
        assert_eq!(psi.eval_raw(&zero).unwrap(), phi.eval_raw(&zero).unwrap());
        let dpsi = psi.jvp(&zero, &[c(1.0, 0.0)]).unwrap();
        let dphi = phi.jvp(&zero, &[c(1.0, 0.0)]).unwrap();
        for (a, b) in dpsi.iter().zip(&dphi) {
            assert!((a / b - 1.5).norm() < 1e-15);
        }

        let two_d = HoloMap::parse("z1 + z2", 2).unwrap();
        assert!(dilate_disk(&two_d, 0.5, 1.0).is_err());
        assert!(dilate_disk(&phi, 0.0, 1.0).is_err());
    }

    #[test]
    fn verify_examples() {
        let (x, u) = (disk(1.0), disk(0.5));
        let rep = verify_metric_contraction(&x, &u, 0.8, MetricKind::Caratheodory, 64, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_eq!(rep.holds, 64);
        assert!((rep.max_ratio.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(rep.worst_point.as_ref().unwrap()[0], c(0.0, 0.0));

        let rep = verify_metric_contraction(&x, &u, 0.4, MetricKind::Caratheodory, 64, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Violated);
        assert_eq!(rep.checks[0].verdict, Verdict::Violated);

        let rep = verify_metric_contraction(&x, &u, 2.0 / 3.0, MetricKind::Kobayashi, 64, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.max_ratio.unwrap() <= 2.0 / 3.0);
    }

    #[test]
    fn bounds_without_direction_are_inconclusive() {
        let x = disk(1.0).to_semianalytic().unwrap();
        let u = disk(0.5).to_semianalytic().unwrap();
        let rep = verify_metric_contraction(&x, &u, 0.4, MetricKind::Kobayashi, 16, 1).unwrap();
        assert_eq!(rep.violated, 0);
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert!(verify_metric_contraction(&x, &u, 1.0, MetricKind::Kobayashi, 16, 1).is_err());
    }
}
