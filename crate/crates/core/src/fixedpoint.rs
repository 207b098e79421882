//! Picard iteration for holomorphic maps `f: X → X` with `f(X) ⊂⊂ U ⊂⊂ X`.
//!
//! With a contraction constant `k` for `(X, U)`, consecutive invariant
//! steps satisfy `d(x_n, x_{n+1}) ≤ kⁿ d_0` and the invariant distance from
//! `x_n` to the fixed point is at most `kⁿ d_0 / (1 - k)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::contraction::{CertificateMethod, ContractionCertificate};
use crate::domains::{Domain, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::holomap::{range_check, HoloMap, RangeEvidence, RangeVerdict};
use crate::metrics::{caratheodory_distance, integrated_distance, Bound, Caratheodory, Kobayashi, Metric, PathOptions};
use crate::point::{check_dim, euclid_norm_diff, Point};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Relative slack of the decay comparison.
pub const DECAY_SLACK: f64 = 1e-6;
const DECAY_FLOOR: f64 = 1e-15;

/// Invariant distance between two points of a domain, as a bound.
pub trait StepDistance: Sync {
    fn distance(&self, a: &Point, b: &Point) -> Result<Bound>;
}

/// Closed-form distance on disks and polydiscs (Carathéodory and Kobayashi
/// agree there).
pub struct ClosedForm<'a> {
    domain: &'a Domain,
}

impl<'a> ClosedForm<'a> {
    pub fn new(domain: &'a Domain) -> Result<Self> {
        if domain.is_product() {
            Ok(ClosedForm { domain })
        } else {
            Err(Error::UnsupportedDomain(
                "closed-form distances need a disk or polydisc".into(),
            ))
        }
    }
}

impl StepDistance for ClosedForm<'_> {
    fn distance(&self, a: &Point, b: &Point) -> Result<Bound> {
        caratheodory_distance(self.domain, a, b)
    }
}

/// Integrated distance from the polyline optimizer.
pub struct Integrated<'a> {
    metric: Box<dyn Metric + 'a>,
    opts: PathOptions,
}

impl<'a> Integrated<'a> {
    pub fn kobayashi(domain: &'a Domain, opts: PathOptions) -> Self {
        Integrated {
            metric: Box::new(Kobayashi::new(domain)),
            opts,
        }
    }

    pub fn caratheodory(domain: &'a Domain, opts: PathOptions) -> Self {
        Integrated {
            metric: Box::new(Caratheodory::new(domain)),
            opts,
        }
    }
}

impl StepDistance for Integrated<'_> {
    fn distance(&self, a: &Point, b: &Point) -> Result<Bound> {
        integrated_distance(self.metric.as_ref(), a, b, &self.opts)
    }
}

/// Closed form on product domains, integrated Kobayashi otherwise; both
/// bound the invariant distance from above.
pub fn default_step_distance(domain: &Domain, opts: PathOptions) -> Box<dyn StepDistance + '_> {
    match ClosedForm::new(domain) {
        Ok(c) => Box::new(c),
        Err(_) => Box::new(Integrated::kobayashi(domain, opts)),
    }
}

fn upper(b: &Bound) -> Result<f64> {
    b.upper_estimate()
        .ok_or_else(|| Error::Configuration("step distance must be an upper bound".into()))
}

/// The iterates `x_0, x_1 = f(x_0), …` with the data needed for tail bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub points: Vec<Point>,
    /// `‖x_{n+1} - x_n‖`
    pub step_euclid: Vec<f64>,
    /// Invariant step bounds, when recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_invariant: Option<Vec<Bound>>,
    pub k: f64,
    /// Upper bound on the first invariant step `d(x_0, x_1)`.
    pub d0: Option<f64>,
}

impl IterationTrace {
    pub fn new(x0: Point, k: f64) -> Self {
        IterationTrace {
            points: vec![x0],
            step_euclid: Vec::new(),
            step_invariant: None,
            k,
            d0: None,
        }
    }

    /// Exactly `steps` Picard steps from `x0`, without stopping rule.
    pub fn iterate(f: &HoloMap, x0: Point, steps: usize, k: f64) -> Result<Self> {
        let mut trace = IterationTrace::new(x0, k);
        for _ in 0..steps {
            trace.push(f.eval(trace.last())?);
        }
        Ok(trace)
    }

    pub fn last(&self) -> &Point {
        self.points.last().expect("trace holds x_0")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, next: Point) {
        self.step_euclid.push(euclid_norm_diff(self.last(), &next));
        self.points.push(next);
    }

    /// Records `d_0` from `distance(x_0, x_1)`.
    pub fn record_d0(&mut self, distance: &dyn StepDistance) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::Configuration("d_0 needs two iterates".into()));
        }
        let d0 = upper(&distance.distance(&self.points[0], &self.points[1])?)?;
        self.d0 = Some(d0);
        Ok(d0)
    }

    /// Replays `f` over the stored points; true when every image matches
    /// the next point bitwise.
    pub fn replays(&self, f: &HoloMap) -> bool {
        self.points
            .windows(2)
            .all(|w| f.eval(&w[0]).is_ok_and(|img| img == w[1]))
    }

    /// CSV with columns `iter, z{j}_re, z{j}_im, …, step_euclid,
    /// certified_tail`; reals in 17 significant digits. The last row has
    /// an empty `step_euclid`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let dim = self.points[0].dim();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["iter".to_string()];
        for j in 1..=dim {
            header.push(format!("z{j}_re"));
            header.push(format!("z{j}_im"));
        }
        header.push("step_euclid".into());
        header.push("certified_tail".into());
        w.write_record(&header).map_err(csv_err)?;
        let real = |x: f64| format!("{x:.16e}");
        for (n, p) in self.points.iter().enumerate() {
            let mut row = vec![n.to_string()];
            for z in p.iter() {
                row.push(real(z.re));
                row.push(real(z.im));
            }
            row.push(self.step_euclid.get(n).map(|&s| real(s)).unwrap_or_default());
            row.push(certify_tail(self, n).map(real).unwrap_or_default());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| Error::Configuration(format!("writing trace: {e}")))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Configuration(format!("writing trace: {e}"))
}

/// `kⁿ d_0 / (1 - k)`: bound on the invariant distance from `x_n` to the
/// fixed point.
pub fn certify_tail(trace: &IterationTrace, n: usize) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::Configuration("empty trace".into()));
    }
    let k = trace.k;
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Configuration(format!("contraction constant {k} is not below 1")));
    }
    let d0 = trace
        .d0
        .ok_or_else(|| Error::Configuration("first-step distance d_0 was not recorded".into()))?;
    if d0 == 0.0 {
        return Ok(0.0);
    }
    Ok(k.powi(n as i32) * d0 / (1.0 - k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// `‖x_{n+1} - x_n‖ < tol (1 - k) / k`
    EuclideanStep,
    /// `diam(X) · k/(1 - k) · d(x_n, x_{n+1}) < tol`
    InvariantTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub method: CertificateMethod,
    pub samples: usize,
    pub seed: u64,
    /// Record invariant step distances and stop on the invariant tail.
    pub step_invariant: bool,
    /// Proceed when range evidence is inconclusive.
    pub allow_inconclusive_range: bool,
    pub path: PathOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            method: CertificateMethod::Dilation,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            step_invariant: false,
            allow_inconclusive_range: false,
            path: PathOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub c: Point,
    /// `‖f(c) - c‖`
    pub residual: f64,
    pub iterations: usize,
    pub certificate: ContractionCertificate,
    /// `kⁿ d_0 / (1 - k)` at `n = iterations`.
    pub certified_tail: f64,
    pub stop_rule: StopRule,
    pub range: RangeEvidence,
    /// True when the certificate is rigorous and the range check supported.
    pub rigorous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
    #[serde(skip)]
    pub trace: IterationTrace,
}

/// Iterates `f` from `x0` until the stop rule holds and `‖f(c) - c‖ ≤ tol`.
pub fn picard_solve(f: &HoloMap, x: &Domain, u: &Domain, x0: &Point, opts: &SolveOptions) -> Result<FixedPointResult> {
    check_dim(x.dim(), f.input_dim())?;
    check_dim(x.dim(), f.output_dim())?;
    check_dim(x.dim(), u.dim())?;
    check_dim(x.dim(), x0.dim())?;
    if !(opts.tol > 0.0 && opts.tol.is_finite()) || opts.max_iter == 0 {
        return Err(Error::Configuration("tol and max_iter must be positive".into()));
    }
    if !x.contains_raw(x0) {
        return Err(Error::invalid(format!("starting point {:?} is not in X", x0.coords())));
    }
    let range = range_check(f, x, u, opts.samples, opts.seed)?;
    match range.verdict {
        RangeVerdict::Supported => {}
        RangeVerdict::Refuted => {
            return Err(Error::Precondition(format!(
                "f(X) is not relatively compact in U: {} of {} sampled images escape (worst margin {:e})",
                range.escaped, range.samples, range.worst_margin
            )))
        }
        RangeVerdict::Inconclusive if opts.allow_inconclusive_range => {}
        RangeVerdict::Inconclusive => {
            return Err(Error::Precondition(format!(
                "range check inconclusive: worst image margin {:e} in U",
                range.worst_margin
            )))
        }
    }
    let certificate = ContractionCertificate::for_inclusion(x, u, opts.method, opts.samples, opts.seed)?;
    let k = certificate.k;
    let distance = default_step_distance(x, opts.path);
    let diam = x.diameter_bound()?;
    let threshold = opts.tol * (1.0 - k) / k;

    let mut trace = IterationTrace::new(x0.clone(), k);
    if opts.step_invariant {
        trace.step_invariant = Some(Vec::new());
    }
    let mut last_step = f64::NAN;
    for n in 0..opts.max_iter {
        let next = f.eval(trace.last())?;
        if !u.contains_raw(&next) {
            return Err(Error::Precondition(format!(
                "iterate {} = {:?} left U",
                n + 1,
                next.coords()
            )));
        }
        trace.push(next);
        last_step = trace.step_euclid[n];
        if n == 0 {
            trace.record_d0(distance.as_ref())?;
        }
        let stop = if opts.step_invariant {
            let a = &trace.points[n];
            let b = &trace.points[n + 1];
            let d = distance.distance(a, b)?;
            let hi = upper(&d)?;
            trace.step_invariant.as_mut().expect("enabled above").push(d);
            diam * k / (1.0 - k) * hi < opts.tol
        } else {
            last_step < threshold
        };
        if stop {
            let c = trace.last();
            let residual = euclid_norm_diff(&f.eval(c)?, c);
            if residual <= opts.tol {
                let iterations = trace.len() - 1;
                let caveat = (!opts.step_invariant).then(|| {
                    "stopped on the Euclidean step surrogate; certified_tail is the invariant bound".to_string()
                });
                return Ok(FixedPointResult {
                    c: c.clone(),
                    residual,
                    iterations,
                    certified_tail: certify_tail(&trace, iterations)?,
                    rigorous: certificate.rigorous && range.verdict == RangeVerdict::Supported,
                    certificate,
                    stop_rule: if opts.step_invariant {
                        StopRule::InvariantTail
                    } else {
                        StopRule::EuclideanStep
                    },
                    range,
                    caveat,
                    trace,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        last_step,
        trace: Box::new(trace),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVerdict {
    Consistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub k: f64,
    /// `d_n = d(x_n, x_{n+1})`
    pub steps: Vec<Bound>,
    /// `d_{n+1} / d_n` where `d_n > 0`.
    pub ratios: Vec<Option<f64>>,
    /// Steps failing `upper(d_n) ≤ kⁿ upper(d_0) (1 + slack)`.
    pub failures: Vec<usize>,
    pub verdict: DecayVerdict,
}

/// Compares every invariant step with `kⁿ d_0`.
///
/// Both sides are upper bounds, so a failure cannot refute the decay
/// estimate; it is reported as inconclusive. Evaluation errors make the
/// affected step inconclusive.
pub fn verify_decay(trace: &IterationTrace, k: f64, distance: &dyn StepDistance) -> DecayReport {
    let mut steps = Vec::new();
    let mut failures = Vec::new();
    let mut d0 = None;
    for (n, w) in trace.points.windows(2).enumerate() {
        let d = distance.distance(&w[0], &w[1]);
        let hi = d.as_ref().ok().and_then(Bound::upper_estimate);
        if n == 0 {
            d0 = hi;
        }
        let ok = match (hi, d0) {
            (Some(hi), Some(d0)) => hi <= k.powi(n as i32) * d0 * (1.0 + DECAY_SLACK) + DECAY_FLOOR,
            _ => false,
        };
        if !ok {
            failures.push(n);
        }
        steps.push(d.unwrap_or(Bound::upper(f64::NAN, 0.0)));
    }
    let ratios = steps
        .windows(2)
        .map(|w| (w[0].value > 0.0).then(|| w[1].value / w[0].value))
        .collect();
    let verdict = if trace.len() >= 3 && failures.is_empty() {
        DecayVerdict::Consistent
    } else {
        DecayVerdict::Inconclusive
    };
    DecayReport {
        k,
        steps,
        ratios,
        failures,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk(r: f64) -> Domain {
        Domain::disk(c(0.0, 0.0), r).unwrap()
    }

    #[test]
    fn halving_map() {
        let f = HoloMap::parse("z1/2", 1).unwrap();
        let x0 = Point::scalar(c(0.9, 0.0)).unwrap();
        let res = picard_solve(&f, &disk(1.0), &disk(0.6), &x0, &SolveOptions::default()).unwrap();
        assert!(res.c[0].norm() < 1e-9);
        assert!(res.residual < 1e-10);
        assert!(res.iterations <= 40);
        assert!((res.certificate.k - 0.75).abs() < 1e-15);
        assert!(res.rigorous);
        assert!(res.trace.replays(&f));
    }

    #[test]
    fn quadratic_map() {
        let f = HoloMap::parse("(z1^2+1)/4", 1).unwrap();
        let x0 = Point::scalar(c(0.0, 0.0)).unwrap();
        let res = picard_solve(&f, &disk(1.0), &disk(0.6), &x0, &SolveOptions::default()).unwrap();
        assert!((res.c[0] - (2.0 - 3f64.sqrt())).norm() < 1e-10);
        let brute = IterationTrace::iterate(&f, x0, 60, 0.75).unwrap();
        assert!((brute.last()[0] - res.c[0]).norm() < 1e-10);
    }

    #[test]
    fn bidisc_map() {
        let f = HoloMap::parse("z1/3 + 0.1; z2^2/4", 2).unwrap();
        let x = Domain::polydisc(vec![c(0.0, 0.0); 2], vec![1.0, 1.0]).unwrap();
        let u = Domain::polydisc(vec![c(0.0, 0.0); 2], vec![0.6, 0.6]).unwrap();
        let x0 = Point::real(&[0.5, 0.5]).unwrap();
        let res = picard_solve(&f, &x, &u, &x0, &SolveOptions::default()).unwrap();
        assert!((res.c[0] - 0.15).norm() < 1e-9 && res.c[1].norm() < 1e-9);
    }

    #[test]
    fn identity_is_refuted() {
        let f = HoloMap::parse("z1", 1).unwrap();
        let x0 = Point::scalar(c(0.1, 0.0)).unwrap();
        let err = picard_solve(&f, &disk(1.0), &disk(0.5), &x0, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err}");
    }

    #[test]
    fn start_outside_and_iteration_cap() {
        let f = HoloMap::parse("z1/2", 1).unwrap();
        let outside = Point::scalar(c(1.5, 0.0)).unwrap();
        assert!(matches!(
            picard_solve(&f, &disk(1.0), &disk(0.6), &outside, &SolveOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
        let x0 = Point::scalar(c(0.9, 0.0)).unwrap();
        let opts = SolveOptions {
            max_iter: 5,
            ..SolveOptions::default()
        };
        match picard_solve(&f, &disk(1.0), &disk(0.6), &x0, &opts) {
            Err(Error::NonConvergence { iterations, trace, .. }) => {
                assert_eq!(iterations, 5);
                assert_eq!(trace.len(), 6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariant_stop_rule() {
        let f = HoloMap::parse("(z1^2+1)/4", 1).unwrap();
        let x0 = Point::scalar(c(0.0, 0.0)).unwrap();
        let opts = SolveOptions {
            step_invariant: true,
            ..SolveOptions::default()
        };
        let res = picard_solve(&f, &disk(1.0), &disk(0.6), &x0, &opts).unwrap();
        assert_eq!(res.stop_rule, StopRule::InvariantTail);
        assert!(res.caveat.is_none());
        let steps = res.trace.step_invariant.as_ref().unwrap();
        assert_eq!(steps.len(), res.iterations);
    }

    #[test]
    fn tail_examples() {
        let mut t = IterationTrace::new(Point::scalar(c(0.0, 0.0)).unwrap(), 0.8);
        assert!(matches!(certify_tail(&t, 0), Err(Error::Configuration(_))));
        t.d0 = Some(1.0);
        assert!((certify_tail(&t, 0).unwrap() - 5.0).abs() < 1e-14);
        assert!((certify_tail(&t, 10).unwrap() - 0.8f64.powi(10) / 0.2).abs() < 1e-14);
        t.d0 = Some(0.0);
        assert_eq!(certify_tail(&t, 7).unwrap(), 0.0);
    }

    #[test]
    fn decay_examples() {
        let d = disk(1.0);
        let closed = ClosedForm::new(&d).unwrap();
        let f = HoloMap::parse("z1/2", 1).unwrap();
        let t = IterationTrace::iterate(&f, Point::scalar(c(0.9, 0.0)).unwrap(), 20, 0.8).unwrap();
        let rep = verify_decay(&t, 0.8, &closed);
        assert_eq!(rep.verdict, DecayVerdict::Consistent);
        assert!((rep.ratios.last().unwrap().unwrap() - 0.5).abs() < 1e-4);

        let konst = HoloMap::parse("0.3", 1).unwrap();
        let t = IterationTrace::iterate(&konst, Point::scalar(c(0.5, 0.0)).unwrap(), 5, 0.8).unwrap();
        let rep = verify_decay(&t, 0.8, &closed);
        assert_eq!(rep.verdict, DecayVerdict::Consistent);
        assert!(rep.steps[1..].iter().all(|b| b.value == 0.0));

        let q = HoloMap::parse("(z1^2+1)/4", 1).unwrap();
        let k = (2.0 * 0.6f64.atanh()).tanh();
        let t = IterationTrace::iterate(&q, Point::scalar(c(0.0, 0.0)).unwrap(), 12, k).unwrap();
        let rep = verify_decay(&t, k, &closed);
        assert_eq!(rep.verdict, DecayVerdict::Consistent);
        let r = rep.ratios[10].unwrap();
        assert!((r - (2.0 - 3f64.sqrt()) / 2.0).abs() < 1e-3, "{r}");

        let short = IterationTrace::iterate(&q, Point::scalar(c(0.0, 0.0)).unwrap(), 1, k).unwrap();
        assert_eq!(verify_decay(&short, k, &closed).verdict, DecayVerdict::Inconclusive);
    }

    #[test]
    fn csv_export() {
        let f = HoloMap::parse("z1/2", 1).unwrap();
        let mut t = IterationTrace::iterate(&f, Point::scalar(c(0.5, 0.25)).unwrap(), 2, 0.75).unwrap();
        t.d0 = Some(1.0);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "iter,z1_re,z1_im,step_euclid,certified_tail");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,5.0000000000000000e-1,2.5000000000000000e-1,"));
        assert!(lines[3].ends_with(",,2.2500000000000000e0"));
    }
}
