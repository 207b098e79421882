//! `hypermetric`: invariant metrics, contraction certificates and certified
//! fixed points from the command line.
//!
//! Every run writes one JSON document (to stdout or `--out`) that embeds the
//! resolved job under `"config"`. Exit status: 0 success, 1 usage or
//! configuration error, 2 unmet precondition, 3 non-convergence.

mod config;
mod run;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hypermetric::{CertificateMethod, Error, MetricKind};
use serde::de::DeserializeOwned;

use config::{Command, DomainSpec, JobConfig, PointSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

fn snake_case<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(text.replace('-', "_")))
        .map_err(|_| format!("unrecognized value {text:?}"))
}

#[derive(Debug, Parser)]
#[command(
    name = "hypermetric",
    version,
    about = "Invariant metrics, contraction constants and certified fixed points"
)]
struct Cli {
    /// Job to run; may instead come from the config file
    #[arg(value_enum)]
    command: Option<Command>,

    /// JSON job file, or `-` for stdin; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Domain for metric and distance (`disk:c,r`, `polydisc:c1,r1;c2,r2` or JSON)
    #[arg(long)]
    domain: Option<String>,
    /// Outer domain
    #[arg(long = "X")]
    x: Option<String>,
    /// Inner domain, relatively compact in X
    #[arg(long = "U")]
    u: Option<String>,

    /// Base point, comma-separated complex coordinates
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Tangent vector, comma-separated complex coordinates
    #[arg(long, allow_hyphen_values = true)]
    vector: Option<String>,
    /// First endpoint for distance
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Second endpoint for distance
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Starting point for fixpoint
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Map components separated by `;`, in variables z1, z2, …
    #[arg(long, allow_hyphen_values = true)]
    map: Option<String>,

    /// caratheodory, kobayashi or poincare
    #[arg(long, value_parser = snake_case::<MetricKind>)]
    metric: Option<MetricKind>,
    /// dilation or tanh-diameter
    #[arg(long, value_parser = snake_case::<CertificateMethod>)]
    method: Option<CertificateMethod>,
    /// Contraction constant to verify instead of the certified one
    #[arg(long)]
    k: Option<f64>,
    /// Integrate the infinitesimal metric along optimized polylines
    #[arg(long)]
    integrated: bool,
    /// Estimate the diameter from samples even when a closed form exists
    #[arg(long)]
    sampled: bool,

    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples for gaps, diameters and range checks
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Sample points for verify
    #[arg(long)]
    verify_samples: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Stop fixpoint on the invariant tail (slower)
    #[arg(long)]
    step_invariant: bool,
    /// Run fixpoint even when range evidence is inconclusive
    #[arg(long)]
    allow_inconclusive_range: bool,

    /// Initial polyline segments
    #[arg(long)]
    segments: Option<usize>,
    /// Polyline refinement rounds
    #[arg(long)]
    refinements: Option<usize>,
    /// Gauss-Legendre order per segment
    #[arg(long)]
    quad_order: Option<usize>,
    /// Relative improvement that ends polyline refinement
    #[arg(long)]
    path_rel_tol: Option<f64>,

    /// Write the JSON document here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the fixpoint iteration trace as CSV
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
}

impl Cli {
    fn load(&self) -> Result<JobConfig, String> {
        let Some(path) = &self.config else {
            return Ok(JobConfig::default());
        };
        let mut text = String::new();
        let read = if path.as_os_str() == "-" {
            std::io::stdin().read_to_string(&mut text).map(|_| ())
        } else {
            std::fs::read_to_string(path).map(|t| text = t)
        };
        read.map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    fn overlay(self, cfg: &mut JobConfig) {
        let domain = |s: Option<String>| s.map(DomainSpec::Literal);
        let point = |s: Option<String>| s.map(PointSpec::Literal);
        cfg.command = self.command.or(cfg.command);
        cfg.domain = domain(self.domain).or(cfg.domain.take());
        cfg.x = domain(self.x).or(cfg.x.take());
        cfg.u = domain(self.u).or(cfg.u.take());
        cfg.point = point(self.point).or(cfg.point.take());
        cfg.vector = point(self.vector).or(cfg.vector.take());
        cfg.a = point(self.a).or(cfg.a.take());
        cfg.b = point(self.b).or(cfg.b.take());
        cfg.x0 = point(self.x0).or(cfg.x0.take());
        cfg.map = self.map.or(cfg.map.take());
        cfg.k = self.k.or(cfg.k);
        cfg.metric = self.metric.unwrap_or(cfg.metric);
        cfg.method = self.method.unwrap_or(cfg.method);
        cfg.integrated |= self.integrated;
        cfg.closed_form &= !self.sampled;
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.samples = self.samples.unwrap_or(cfg.samples);
        cfg.verify_samples = self.verify_samples.unwrap_or(cfg.verify_samples);
        cfg.tol = self.tol.unwrap_or(cfg.tol);
        cfg.max_iter = self.max_iter.unwrap_or(cfg.max_iter);
        cfg.step_invariant |= self.step_invariant;
        cfg.allow_inconclusive_range |= self.allow_inconclusive_range;
        cfg.path.segments = self.segments.unwrap_or(cfg.path.segments);
        cfg.path.refinements = self.refinements.unwrap_or(cfg.path.refinements);
        cfg.path.quad_order = self.quad_order.unwrap_or(cfg.path.quad_order);
        cfg.path.rel_tol = self.path_rel_tol.unwrap_or(cfg.path.rel_tol);
        cfg.out = self.out.or(cfg.out.take());
        cfg.trace = self.trace.or(cfg.trace.take());
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        e if e.is_precondition() => EXIT_PRECONDITION,
        _ => EXIT_USAGE,
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut cfg = match cli.load() {
        Ok(cfg) => cfg,
        Err(msg) => return usage(msg),
    };
    cli.overlay(&mut cfg);
    let job = match cfg.resolve() {
        Ok(job) => job,
        Err(e) => return usage(e),
    };

    match run::execute(&cfg, &job) {
        Ok(outcome) => {
            if let (Some(trace), Some(path)) = (&outcome.trace, &cfg.trace) {
                if let Err(e) = run::write_trace(trace, path) {
                    return usage(e);
                }
            }
            let doc = run::with_config(outcome.document, &cfg);
            match run::write_document(&doc, cfg.out.as_deref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage(format!("cannot write output: {e}")),
            }
        }
        Err(e) => {
            if let (Error::NonConvergence { trace, .. }, Some(path)) = (&e, &cfg.trace) {
                if let Err(w) = run::write_trace(trace, path) {
                    eprintln!("error: {w}");
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
