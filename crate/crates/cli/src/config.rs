use std::fmt;
use std::path::PathBuf;

use hypermetric::contraction::DEFAULT_VERIFY_SAMPLES;
use hypermetric::domains::DEFAULT_SAMPLES;
use hypermetric::fixedpoint::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use hypermetric::{parse_constant, CertificateMethod, Complex64, Domain, HoloMap, MetricKind, PathOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Infinitesimal metric E(x, v)
    Metric,
    /// Distance between two points
    Distance,
    /// Carathéodory diameter of U inside X
    Diameter,
    /// Contraction certificate for U inside X
    Contraction,
    /// Sampled check of E_X <= k E_U on U
    Verify,
    /// Picard iteration of a holomorphic self-map
    Fixpoint,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).expect("unit variant");
        f.write_str(name.as_str().unwrap_or_default())
    }
}

/// A domain as a compact literal (`disk:c,r`, `polydisc:c1,r1;c2,r2`) or as
/// its JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Full(Domain),
    Literal(String),
}

/// A point or vector as comma-separated complex literals or as
/// `[[re, im], …]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Coords(Vec<Complex64>),
    Literal(String),
}

/// Everything a job needs. Files and flags fill the same structure; after
/// [`JobConfig::resolve`] every literal is replaced by its canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<DomainSpec>,
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub u: Option<DomainSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub metric: MetricKind,
    pub method: CertificateMethod,
    /// Use the integrated form of the metric for `distance`.
    pub integrated: bool,
    /// Exact diameter for concentric disks and polydiscs.
    pub closed_form: bool,
    pub seed: u64,
    pub samples: usize,
    pub verify_samples: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub step_invariant: bool,
    pub allow_inconclusive_range: bool,
    pub path: PathOptions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            command: None,
            domain: None,
            x: None,
            u: None,
            point: None,
            vector: None,
            a: None,
            b: None,
            x0: None,
            map: None,
            dim: None,
            k: None,
            metric: MetricKind::Caratheodory,
            method: CertificateMethod::Dilation,
            integrated: false,
            closed_form: true,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            verify_samples: DEFAULT_VERIFY_SAMPLES,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            step_invariant: false,
            allow_inconclusive_range: false,
            path: PathOptions::default(),
            out: None,
            trace: None,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn fail<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// The domains, points and map of a resolved job.
#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    pub domain: Option<Domain>,
    pub x: Option<Domain>,
    pub u: Option<Domain>,
    pub point: Option<Vec<Complex64>>,
    pub vector: Option<Vec<Complex64>>,
    pub a: Option<Vec<Complex64>>,
    pub b: Option<Vec<Complex64>>,
    pub x0: Option<Vec<Complex64>>,
    pub map: Option<HoloMap>,
}

pub fn parse_complex(text: &str) -> Result<Complex64, ConfigError> {
    parse_constant(text.trim()).map_err(|e| ConfigError(format!("bad complex number {text:?}: {e}")))
}

fn parse_radius(text: &str) -> Result<f64, ConfigError> {
    match text.trim().parse::<f64>() {
        Ok(r) => Ok(r),
        Err(_) => fail(format!("bad radius {text:?}")),
    }
}

/// `disk:c,r` or `polydisc:c1,r1;c2,r2;…`.
pub fn parse_domain(text: &str) -> Result<Domain, ConfigError> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| ConfigError(format!("bad domain JSON: {e}")));
    }
    let Some((kind, body)) = text.split_once(':') else {
        return fail(format!(
            "domain {text:?} must look like disk:c,r or polydisc:c1,r1;c2,r2"
        ));
    };
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    for factor in body.split(';') {
        let Some((c, r)) = factor.rsplit_once(',') else {
            return fail(format!("factor {factor:?} of {text:?} must be center,radius"));
        };
        centers.push(parse_complex(c)?);
        radii.push(parse_radius(r)?);
    }
    let built = match kind.trim() {
        "disk" if centers.len() == 1 => Domain::disk(centers[0], radii[0]),
        "disk" => return fail(format!("disk literal {text:?} has {} factors", centers.len())),
        "polydisc" => Domain::polydisc(centers, radii),
        other => {
            return fail(format!(
                "unknown domain kind {other:?}; use disk, polydisc or a JSON object"
            ))
        }
    };
    built.map_err(|e| ConfigError(format!("domain {text:?}: {e}")))
}

pub fn parse_point(text: &str) -> Result<Vec<Complex64>, ConfigError> {
    text.split(',').map(parse_complex).collect()
}

fn resolve_domain(spec: &mut Option<DomainSpec>) -> Result<Option<Domain>, ConfigError> {
    let domain = match spec.as_ref() {
        None => return Ok(None),
        Some(DomainSpec::Full(d)) => d.clone(),
        Some(DomainSpec::Literal(s)) => parse_domain(s)?,
    };
    *spec = Some(DomainSpec::Full(domain.clone()));
    Ok(Some(domain))
}

fn resolve_point(spec: &mut Option<PointSpec>) -> Result<Option<Vec<Complex64>>, ConfigError> {
    let coords = match spec.as_ref() {
        None => return Ok(None),
        Some(PointSpec::Coords(c)) => c.clone(),
        Some(PointSpec::Literal(s)) => parse_point(s)?,
    };
    *spec = Some(PointSpec::Coords(coords.clone()));
    Ok(Some(coords))
}

fn require<'a, T>(value: &'a Option<T>, field: &str, command: Command) -> Result<&'a T, ConfigError> {
    match value {
        Some(v) => Ok(v),
        None => fail(format!("{command} requires {field}")),
    }
}

fn check_len(name: &str, coords: &Option<Vec<Complex64>>, dim: usize) -> Result<(), ConfigError> {
    match coords {
        Some(c) if c.len() != dim => fail(format!(
            "{name} has {} coordinates but the domain has dimension {dim}",
            c.len()
        )),
        _ => Ok(()),
    }
}

impl JobConfig {
    /// Parses every literal, fills defaults that depend on other fields and
    /// checks that the command has what it needs.
    pub fn resolve(&mut self) -> Result<Job, ConfigError> {
        let Some(command) = self.command else {
            return fail("no command given; use one of metric, distance, diameter, contraction, verify, fixpoint");
        };
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if self.samples == 0 || self.verify_samples == 0 {
            return fail("samples and verify_samples must be positive");
        }
        if self.max_iter == 0 {
            return fail("max_iter must be positive");
        }
        if self.path.segments == 0 || self.path.quad_order == 0 || self.path.rel_tol.is_nan() || self.path.rel_tol < 0.0
        {
            return fail("path.segments and path.quad_order must be positive and path.rel_tol nonnegative");
        }
        if let Some(k) = self.k {
            if !(k > 0.0 && k < 1.0) {
                return fail(format!("k must lie in (0, 1), got {k}"));
            }
        }
        let mut job = Job {
            command,
            domain: resolve_domain(&mut self.domain)?,
            x: resolve_domain(&mut self.x)?,
            u: resolve_domain(&mut self.u)?,
            point: resolve_point(&mut self.point)?,
            vector: resolve_point(&mut self.vector)?,
            a: resolve_point(&mut self.a)?,
            b: resolve_point(&mut self.b)?,
            x0: resolve_point(&mut self.x0)?,
            map: None,
        };
        match command {
            Command::Metric | Command::Distance => {
                if job.domain.is_none() {
                    job.domain = Some(Domain::unit_disk());
                    self.domain = Some(DomainSpec::Full(Domain::unit_disk()));
                }
                let dim = job.domain.as_ref().map_or(1, Domain::dim);
                if command == Command::Metric {
                    require(&job.point, "--point", command)?;
                    require(&job.vector, "--vector", command)?;
                    check_len("point", &job.point, dim)?;
                    check_len("vector", &job.vector, dim)?;
                } else {
                    require(&job.a, "--a", command)?;
                    require(&job.b, "--b", command)?;
                    check_len("a", &job.a, dim)?;
                    check_len("b", &job.b, dim)?;
                }
            }
            Command::Diameter | Command::Contraction | Command::Verify | Command::Fixpoint => {
                let x = require(&job.x, "--X", command)?;
                let u = require(&job.u, "--U", command)?;
                if x.dim() != u.dim() {
                    return fail(format!("X has dimension {} but U has dimension {}", x.dim(), u.dim()));
                }
                let dim = x.dim();
                if command == Command::Fixpoint {
                    let text = require(&self.map, "--map", command)?;
                    if let Some(d) = self.dim {
                        if d != dim {
                            return fail(format!("dim {d} does not match the dimension {dim} of X"));
                        }
                    }
                    self.dim = Some(dim);
                    let map = HoloMap::parse(text, dim).map_err(|e| ConfigError(format!("map {text:?}: {e}")))?;
                    if map.output_dim() != dim {
                        return fail(format!(
                            "map has {} components but X has dimension {dim}",
                            map.output_dim()
                        ));
                    }
                    job.map = Some(map);
                    require(&job.x0, "--x0", command)?;
                    check_len("x0", &job.x0, dim)?;
                }
            }
        }
        Ok(job)
    }
}
