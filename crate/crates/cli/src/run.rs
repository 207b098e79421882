use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hypermetric::contraction::verify_metric_contraction;
use hypermetric::metrics::metric_for;
use hypermetric::{
    caratheodory_diameter, caratheodory_distance, inner_gap, integrated_distance, picard_solve, poincare_distance,
    Bound, Complex64, ContractionCertificate, DiameterOptions, Domain, Error, IterationTrace, MetricKind, Point,
    SolveOptions,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Command, Job, JobConfig};

/// What a job produced besides its JSON document.
pub struct Outcome {
    pub document: Value,
    pub trace: Option<IterationTrace>,
}

fn object(value: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(value).expect("serializable result") {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("value".into(), other);
            map
        }
    }
}

fn point(coords: &Option<Vec<Complex64>>) -> Result<Point, Error> {
    Point::new(coords.clone().expect("checked by resolve"))
}

pub fn execute(cfg: &JobConfig, job: &Job) -> Result<Outcome, Error> {
    let mut trace = None;
    let doc = match job.command {
        Command::Metric => {
            let d = job.domain.as_ref().expect("defaulted by resolve");
            let m = metric_for(cfg.metric, d)?;
            object(m.eval(&point(&job.point)?, job.vector.as_ref().expect("checked"))?)
        }
        Command::Distance => {
            let d = job.domain.as_ref().expect("defaulted by resolve");
            let (a, b) = (point(&job.a)?, point(&job.b)?);
            let (bound, method) = match cfg.metric {
                MetricKind::Poincare if !cfg.integrated => {
                    if *d != Domain::unit_disk() {
                        return Err(Error::UnsupportedDomain(
                            "the Poincaré distance needs the unit disk".into(),
                        ));
                    }
                    let value = poincare_distance(a[0], b[0])?;
                    (Bound::exact(value, 4.0 * f64::EPSILON * value.max(1.0)), "closed_form")
                }
                MetricKind::Caratheodory if !cfg.integrated => {
                    let method = if d.is_product() { "closed_form" } else { "competitors" };
                    (caratheodory_distance(d, &a, &b)?, method)
                }
                kind => {
                    let m = metric_for(kind, d)?;
                    (integrated_distance(m.as_ref(), &a, &b, &cfg.path)?, "integrated")
                }
            };
            let mut map = object(bound);
            map.insert("method".into(), json!(method));
            map
        }
        Command::Diameter => {
            let (x, u) = (job.x.as_ref().expect("checked"), job.u.as_ref().expect("checked"));
            let opts = DiameterOptions {
                samples: cfg.samples,
                seed: cfg.seed,
                closed_form: cfg.closed_form,
            };
            let mut map = object(caratheodory_diameter(x, u, &opts)?);
            map.insert("R".into(), json!(u.diameter_bound()?));
            map.insert("r".into(), json!(inner_gap(u, x, cfg.samples, cfg.seed)?));
            map
        }
        Command::Contraction => {
            let (x, u) = (job.x.as_ref().expect("checked"), job.u.as_ref().expect("checked"));
            object(ContractionCertificate::for_inclusion(
                x,
                u,
                cfg.method,
                cfg.samples,
                cfg.seed,
            )?)
        }
        Command::Verify => {
            let (x, u) = (job.x.as_ref().expect("checked"), job.u.as_ref().expect("checked"));
            let certificate = match cfg.k {
                Some(_) => None,
                None => Some(ContractionCertificate::for_inclusion(
                    x,
                    u,
                    cfg.method,
                    cfg.samples,
                    cfg.seed,
                )?),
            };
            let k = cfg.k.or(certificate.as_ref().map(|c| c.k)).expect("k or certificate");
            let report = verify_metric_contraction(x, u, k, cfg.metric, cfg.verify_samples, cfg.seed)?;
            let mut map = object(report);
            if let Some(c) = certificate {
                map.insert("certificate".into(), serde_json::to_value(c).expect("serializable"));
            }
            map
        }
        Command::Fixpoint => {
            let (x, u) = (job.x.as_ref().expect("checked"), job.u.as_ref().expect("checked"));
            let f = job.map.as_ref().expect("checked");
            let opts = SolveOptions {
                tol: cfg.tol,
                max_iter: cfg.max_iter,
                method: cfg.method,
                samples: cfg.samples,
                seed: cfg.seed,
                step_invariant: cfg.step_invariant,
                allow_inconclusive_range: cfg.allow_inconclusive_range,
                path: cfg.path,
            };
            let res = picard_solve(f, x, u, &point(&job.x0)?, &opts)?;
            let map = object(&res);
            trace = Some(res.trace);
            map
        }
    };
    Ok(Outcome {
        document: Value::Object(doc),
        trace,
    })
}

/// The result fields with the resolved config under `"config"`.
pub fn with_config(document: Value, cfg: &JobConfig) -> Value {
    let mut map = match document {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("result".into(), other);
            map
        }
    };
    map.insert("config".into(), serde_json::to_value(cfg).expect("serializable config"));
    Value::Object(map)
}

pub fn write_document(doc: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("serializable document");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn write_trace(trace: &IterationTrace, path: &Path) -> Result<(), Error> {
    let file =
        File::create(path).map_err(|e| Error::Configuration(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    trace.write_csv(&mut w)?;
    w.flush()
        .map_err(|e| Error::Configuration(format!("cannot write {}: {e}", path.display())))
}
