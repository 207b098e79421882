//! Metric lengths of polylines and the integrated pseudodistance.
//!
//! The integrated distance between `a` and `b` is approximated from above
//! by minimizing the length of polylines with fixed endpoints: coordinate
//! descent on the interior vertices, doubling the vertex count each round.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::metrics::bound::{Bound, BoundKind};
use crate::metrics::infinitesimal::Metric;
use crate::metrics::quadrature::GaussLegendre;
use crate::point::{check_dim, euclid_norm, euclid_norm_diff, Point};

pub const DEFAULT_QUAD_ORDER: usize = 32;
/// Cap on the number of quadrature doublings in [`path_length`].
pub const MAX_QUAD_REFINEMENTS: usize = 10;

/// A piecewise-affine path whose quadrature nodes all lie in a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Point>,
    order: usize,
}

impl Polyline {
    pub fn new(domain: &Domain, vertices: Vec<Point>, order: usize) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("a polyline needs at least one vertex"));
        }
        if order == 0 {
            return Err(Error::invalid("quadrature order must be positive"));
        }
        for p in &vertices {
            check_dim(domain.dim(), p.dim())?;
            if !domain.contains_raw(p) {
                return Err(Error::PathInvalid(format!(
                    "vertex {:?} is outside the domain",
                    p.coords()
                )));
            }
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("consecutive polyline vertices must be distinct"));
        }
        let gl = GaussLegendre::new(order);
        for w in vertices.windows(2) {
            for &t in &gl.nodes {
                if !domain.contains_raw(&lerp(&w[0], &w[1], t)) {
                    return Err(Error::PathInvalid(format!(
                        "segment {:?} -> {:?} leaves the domain",
                        w[0].coords(),
                        w[1].coords()
                    )));
                }
            }
        }
        Ok(Polyline { vertices, order })
    }

    /// `segments` equal pieces of the segment `[a, b]`.
    pub fn straight(domain: &Domain, a: &Point, b: &Point, segments: usize, order: usize) -> Result<Self> {
        if a == b {
            return Self::new(domain, vec![a.clone()], order);
        }
        let segments = segments.max(1);
        let vertices = (0..=segments)
            .map(|k| Point::new(lerp(a, b, k as f64 / segments as f64)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, vertices, order)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

fn lerp(a: &[Complex64], b: &[Complex64], t: f64) -> Vec<Complex64> {
    a.iter().zip(b).map(|(p, q)| p + (q - p) * t).collect()
}

/// `∫_0^1 E(p + t(q - p), q - p) dt` with the segment split into `pieces`.
fn segment_length(
    metric: &dyn Metric,
    gl: &GaussLegendre,
    p: &[Complex64],
    q: &[Complex64],
    pieces: usize,
) -> Result<f64> {
    let dir: Vec<Complex64> = p.iter().zip(q).map(|(a, b)| b - a).collect();
    let h = 1.0 / pieces as f64;
    let mut total = 0.0;
    let mut z = vec![Complex64::new(0.0, 0.0); p.len()];
    for k in 0..pieces {
        let t0 = k as f64 * h;
        let mut piece = 0.0;
        for (&s, &w) in gl.nodes.iter().zip(&gl.weights) {
            let t = t0 + s * h;
            for j in 0..p.len() {
                z[j] = p[j] + dir[j] * t;
            }
            piece += w * metric.eval(&z, &dir)?.value;
        }
        total += piece * h;
    }
    Ok(total)
}

fn as_path_error(e: Error) -> Error {
    match e {
        Error::OutsideDomain(msg) => Error::PathInvalid(msg),
        other => other,
    }
}

fn length_bound(metric: &dyn Metric, value: f64, tol: f64) -> Bound {
    match metric.bound_kind() {
        BoundKind::Lower => Bound {
            caveat: true,
            ..Bound::lower(value, tol)
        },
        _ => Bound::upper(value, tol),
    }
}

/// Metric length of `path`, doubling the subdivision of every segment until
/// successive totals agree to `1e-6` relative (at most
/// [`MAX_QUAD_REFINEMENTS`] doublings).
///
/// With an exact or upper metric the result is an upper bound on the
/// integrated distance between the endpoints. With a lower metric it is
/// reported as `lower` with `caveat` set: the length of a given path under
/// a lower bound of the metric bounds neither the path's true length from
/// above nor the distance.
pub fn path_length(metric: &dyn Metric, path: &Polyline) -> Result<Bound> {
    path_length_with(metric, path, 1e-6)
}

fn path_length_with(metric: &dyn Metric, path: &Polyline, rel_tol: f64) -> Result<Bound> {
    check_dim(metric.domain().dim(), path.vertices[0].dim())?;
    if path.vertices.len() < 2 {
        return Ok(Bound::zero());
    }
    let gl = GaussLegendre::new(path.order);
    let total = |pieces: usize| -> Result<f64> {
        path.vertices
            .windows(2)
            .map(|w| segment_length(metric, &gl, &w[0], &w[1], pieces))
            .sum::<Result<f64>>()
            .map_err(as_path_error)
    };
    let mut prev = total(1)?;
    let mut diff = f64::INFINITY;
    for k in 1..=MAX_QUAD_REFINEMENTS {
        let next = total(1 << k)?;
        diff = (next - prev).abs();
        prev = next;
        if diff <= rel_tol * next.abs() {
            break;
        }
    }
    Ok(length_bound(metric, prev, diff))
}

/// Controls for [`integrated_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    /// Segments of the initial polyline.
    pub segments: usize,
    /// Maximum number of optimization rounds; each round after the first
    /// doubles the vertex count.
    pub refinements: usize,
    pub quad_order: usize,
    /// Rounds stop once the relative improvement drops below this.
    pub rel_tol: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            segments: 8,
            refinements: 5,
            quad_order: DEFAULT_QUAD_ORDER,
            rel_tol: 1e-6,
        }
    }
}

const SWEEPS_PER_STEP: usize = 16;
/// Chords shorter than this fraction of the domain scale are measured
/// directly; bending them cannot change the length measurably.
const SHORT_CHORD: f64 = 1e-6;
/// Quadrature order used while searching; lengths are re-evaluated at the
/// requested order afterwards.
const SEARCH_QUAD_ORDER: usize = 8;

struct Optimizer<'m> {
    metric: &'m dyn Metric,
    gl: GaussLegendre,
    vertices: Vec<Vec<Complex64>>,
    lengths: Vec<f64>,
    /// Relative gain a move must achieve; nonzero for metrics whose values
    /// carry bisection noise.
    min_gain: f64,
}

impl<'m> Optimizer<'m> {
    fn new(metric: &'m dyn Metric, gl: GaussLegendre, vertices: Vec<Vec<Complex64>>) -> Result<Self> {
        let mut opt = Optimizer {
            metric,
            gl,
            vertices,
            lengths: vec![],
            min_gain: if metric.bound_kind() == BoundKind::Upper {
                1e-7
            } else {
                0.0
            },
        };
        opt.recompute()?;
        Ok(opt)
    }

    fn seg(&self, p: &[Complex64], q: &[Complex64]) -> Result<f64> {
        segment_length(self.metric, &self.gl, p, q, 1)
    }

    fn recompute(&mut self) -> Result<()> {
        self.lengths = self
            .vertices
            .windows(2)
            .map(|w| self.seg(&w[0], &w[1]))
            .collect::<Result<_>>()?;
        Ok(())
    }

    fn total(&self) -> f64 {
        self.lengths.iter().sum()
    }

    fn subdivide(&mut self) -> Result<()> {
        let mut out = Vec::with_capacity(2 * self.vertices.len());
        for w in self.vertices.windows(2) {
            out.push(w[0].clone());
            out.push(lerp(&w[0], &w[1], 0.5));
        }
        out.push(self.vertices.last().unwrap().clone());
        self.vertices = out;
        self.recompute()
    }

    /// Tries `vertex i += t * dir`; keeps it on strict improvement.
    fn try_move(&mut self, i: usize, dir: &[Complex64], t: f64) -> bool {
        let cand: Vec<Complex64> = self.vertices[i].iter().zip(dir).map(|(z, d)| z + d * t).collect();
        if !self.metric.domain().contains_raw(&cand) {
            return false;
        }
        let (Ok(l1), Ok(l2)) = (
            self.seg(&self.vertices[i - 1], &cand),
            self.seg(&cand, &self.vertices[i + 1]),
        ) else {
            return false;
        };
        let old = self.lengths[i - 1] + self.lengths[i];
        if l1 + l2 < old * (1.0 - self.min_gain) {
            self.vertices[i] = cand;
            self.lengths[i - 1] = l1;
            self.lengths[i] = l2;
            true
        } else {
            false
        }
    }

    /// Move directions for vertex `i`: `i` times the unit chord through its
    /// neighbours, then every real coordinate axis.
    fn directions(&self, i: usize) -> Vec<Vec<Complex64>> {
        let n = self.vertices[0].len();
        let chord: Vec<Complex64> = self.vertices[i + 1]
            .iter()
            .zip(&self.vertices[i - 1])
            .map(|(p, q)| p - q)
            .collect();
        let norm = euclid_norm(&chord);
        let mut dirs = Vec::with_capacity(2 * n + 1);
        if norm > 0.0 {
            dirs.push(chord.iter().map(|z| Complex64::i() * z / norm).collect());
        }
        for j in 0..n {
            for unit in [Complex64::new(1.0, 0.0), Complex64::i()] {
                let mut d = vec![Complex64::new(0.0, 0.0); n];
                d[j] = unit;
                dirs.push(d);
            }
        }
        dirs
    }

    /// One pass of pattern moves over every interior vertex; successful
    /// moves are extended by doubling.
    fn sweep(&mut self, step: f64) -> bool {
        let mut moved = false;
        for i in 1..self.vertices.len() - 1 {
            for dir in self.directions(i) {
                for sign in [1.0, -1.0] {
                    if self.try_move(i, &dir, sign * step) {
                        moved = true;
                        let mut s = 2.0 * step;
                        while self.try_move(i, &dir, sign * s) {
                            s *= 2.0;
                        }
                        break;
                    }
                }
            }
        }
        moved
    }

    /// Pattern search, halving the step once sweeps stop paying off.
    fn descend(&mut self, initial_step: f64, min_step: f64) {
        let mut step = initial_step;
        while step > min_step {
            for _ in 0..SWEEPS_PER_STEP {
                let before = self.total();
                if !self.sweep(step) || before - self.total() <= 1e-10 * before {
                    break;
                }
            }
            step *= 0.5;
        }
    }

    /// Vertex displacements below this fraction of the mean segment change
    /// lengths by less than the metric resolves.
    fn min_step_fraction(&self) -> f64 {
        if self.min_gain > 0.0 {
            1e-3
        } else {
            1e-5
        }
    }

    fn mean_segment(&self) -> f64 {
        let n = self.vertices.len() - 1;
        self.vertices
            .windows(2)
            .map(|w| euclid_norm_diff(&w[0], &w[1]))
            .sum::<f64>()
            / n as f64
    }
}

fn seed_polyline(metric: &dyn Metric, a: &Point, b: &Point, opts: &PathOptions) -> Result<Polyline> {
    let domain = metric.domain();
    match Polyline::straight(domain, a, b, opts.segments, opts.quad_order) {
        Ok(p) => return Ok(p),
        Err(Error::PathInvalid(_)) => {}
        Err(e) => return Err(e),
    }
    let half = (opts.segments / 2).max(1);
    let mut hubs: Vec<Point> = domain.center().into_iter().collect();
    hubs.extend(domain.sample(64, 0)?);
    let mut best: Option<(f64, Polyline)> = None;
    for hub in hubs {
        if hub == *a || hub == *b {
            continue;
        }
        let (Ok(first), Ok(second)) = (
            Polyline::straight(domain, a, &hub, half, opts.quad_order),
            Polyline::straight(domain, &hub, b, half, opts.quad_order),
        ) else {
            continue;
        };
        let mut vertices = first.vertices;
        vertices.extend(second.vertices.into_iter().skip(1));
        let path = Polyline::new(domain, vertices, opts.quad_order)?;
        let len = path.vertices.windows(2).map(|w| w[0].distance(&w[1])).sum::<f64>();
        if best.as_ref().is_none_or(|(l, _)| len < *l) {
            best = Some((len, path));
        }
    }
    best.map(|(_, p)| p).ok_or(Error::Connectivity)
}

/// Integrated pseudodistance between `a` and `b` for `metric`
/// (`c^i` for Carathéodory, `k` for Kobayashi), approximated from above.
pub fn integrated_distance(metric: &dyn Metric, a: &Point, b: &Point, opts: &PathOptions) -> Result<Bound> {
    let domain = metric.domain();
    check_dim(domain.dim(), a.dim())?;
    check_dim(domain.dim(), b.dim())?;
    for p in [a, b] {
        if !domain.contains_raw(p) {
            return Err(Error::outside(format!(
                "endpoint {:?} is not in the domain",
                p.coords()
            )));
        }
    }
    if a == b {
        return Ok(Bound::zero());
    }
    if opts.segments == 0 || opts.refinements == 0 || opts.quad_order == 0 {
        return Err(Error::Configuration("path options must be positive".into()));
    }
    if a.distance(b) <= SHORT_CHORD * domain.scale() {
        if let Ok(p) = Polyline::new(domain, vec![a.clone(), b.clone()], opts.quad_order) {
            return path_length_with(metric, &p, opts.rel_tol);
        }
    }
    let seed = seed_polyline(metric, a, b, opts)?;
    let vertices = seed.vertices.iter().map(|p| p.coords().to_vec()).collect();
    let mut opt = Optimizer::new(
        metric,
        GaussLegendre::new(SEARCH_QUAD_ORDER.min(opts.quad_order)),
        vertices,
    )
    .map_err(as_path_error)?;
    let mut prev = f64::INFINITY;
    for round in 0..opts.refinements {
        if round > 0 {
            opt.subdivide().map_err(as_path_error)?;
        }
        let h = opt.mean_segment();
        let step = if round == 0 { 0.25 * h } else { 0.02 * h };
        opt.descend(step, opt.min_step_fraction() * h);
        let now = opt.total();
        if prev - now < opts.rel_tol * now {
            break;
        }
        prev = now;
    }
    let vertices = opt.vertices.into_iter().map(Point::new).collect::<Result<Vec<_>>>()?;
    let path = Polyline::new(domain, vertices, opts.quad_order)?;
    path_length_with(metric, &path, opts.rel_tol)
}
