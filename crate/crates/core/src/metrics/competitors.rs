//! Finite families of holomorphic maps `X → Δ` used for Carathéodory
//! lower bounds on semi-analytic domains.
//!
//! Two kinds of competitor are used:
//!
//! * complex-linear functionals `ℓ(z) = Σ a_j (z_j - m_j) / S`, with `m` the
//!   bounding-box center and `S = Σ |a_j| h_j` (`h_j` the half-diagonal of
//!   the box in coordinate `j`), so `|ℓ| < 1` on the box;
//! * the defining functions `g_i / t_i`, which map the domain into Δ by
//!   definition.
//!
//! Every competitor is post-composed with the disk automorphism sending
//! its value at the base point to 0, which does not change `ω(φ(a), φ(b))`
//! and turns `|φ'(x)·v|` into `|dφ_x(v)| / (1 - |φ(x)|²)`.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::domains::{Domain, SemiAnalytic};
use crate::error::Result;
use crate::sampling::seeded_rng;

/// Default number of linear functional directions.
pub const DEFAULT_DIRECTIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompetitorFamily {
    /// Linear directions: the coordinate axes, then seeded random ones.
    pub directions: usize,
    pub seed: u64,
    /// Include the domain's defining functions as competitors.
    pub use_constraints: bool,
}

impl Default for CompetitorFamily {
    fn default() -> Self {
        CompetitorFamily {
            directions: DEFAULT_DIRECTIONS,
            seed: 0,
            use_constraints: true,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Linear {
    coeffs: Vec<Complex64>,
    offset: Complex64,
}

impl Linear {
    fn value(&self, z: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(z).map(|(a, w)| a * w).sum::<Complex64>() + self.offset
    }

    fn differential(&self, v: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(v).map(|(a, w)| a * w).sum()
    }
}

/// A materialized competitor family for one domain.
#[derive(Debug, Clone)]
pub(crate) struct Competitors {
    linear: Vec<Linear>,
}

impl Competitors {
    pub(crate) fn build(s: &SemiAnalytic, family: &CompetitorFamily) -> Self {
        let n = s.bounding_box().len();
        let half_diag: Vec<f64> = s
            .bounding_box()
            .iter()
            .map(|b| 0.5 * ((b.re.1 - b.re.0).hypot(b.im.1 - b.im.0)))
            .collect();
        let mid: Vec<Complex64> = s
            .bounding_box()
            .iter()
            .map(|b| Complex64::new(0.5 * (b.re.0 + b.re.1), 0.5 * (b.im.0 + b.im.1)))
            .collect();
        let mut rng = seeded_rng(family.seed);
        let mut linear = Vec::with_capacity(family.directions);
        for k in 0..family.directions {
            let dir: Vec<Complex64> = if k < n {
                let mut d = vec![Complex64::new(0.0, 0.0); n];
                d[k] = Complex64::new(1.0, 0.0);
                d
            } else {
                (0..n)
                    .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                    .collect()
            };
            let sup: f64 = dir.iter().zip(&half_diag).map(|(a, h)| a.norm() * h).sum();
            if sup.is_nan() || sup <= 0.0 {
                continue;
            }
            // a tiny inflation absorbs rounding in the sup estimate
            let s_norm = sup * (1.0 + 1e-12);
            let coeffs: Vec<Complex64> = dir.iter().map(|a| a / s_norm).collect();
            let offset = -coeffs.iter().zip(&mid).map(|(a, m)| a * m).sum::<Complex64>();
            linear.push(Linear { coeffs, offset });
        }
        Competitors { linear }
    }

    /// For each competitor `φ`, calls `visit(φ(x), dφ_x(v))` with `φ`
    /// already normalized into Δ. `v` may be empty when only values matter.
    fn for_each(
        &self,
        s: &SemiAnalytic,
        use_constraints: bool,
        x: &[Complex64],
        v: &[Complex64],
        mut visit: impl FnMut(Complex64, Complex64),
    ) -> Result<()> {
        let want_d = !v.is_empty();
        for l in &self.linear {
            let d = if want_d {
                l.differential(v)
            } else {
                Complex64::new(0.0, 0.0)
            };
            visit(l.value(x), d);
        }
        if use_constraints {
            for c in s.constraints() {
                let e = &c.map.components()[0];
                let (val, d) = if want_d {
                    e.eval_dual(x, v)?
                } else {
                    (e.eval(x)?, Complex64::new(0.0, 0.0))
                };
                visit(val / c.threshold, d / c.threshold);
            }
        }
        Ok(())
    }

    /// `max_φ |dφ_x(v)| / (1 - |φ(x)|²)`.
    pub(crate) fn metric_lower(
        &self,
        s: &SemiAnalytic,
        use_constraints: bool,
        x: &[Complex64],
        v: &[Complex64],
    ) -> Result<f64> {
        let mut best: f64 = 0.0;
        self.for_each(s, use_constraints, x, v, |w, d| {
            let denom = 1.0 - w.norm_sqr();
            if denom > 0.0 {
                best = best.max(d.norm() / denom);
            }
        })?;
        Ok(best)
    }

    /// `max_φ ω(φ(a), φ(b))`.
    pub(crate) fn distance_lower(
        &self,
        s: &SemiAnalytic,
        use_constraints: bool,
        a: &[Complex64],
        b: &[Complex64],
    ) -> Result<f64> {
        let mut at_a = Vec::new();
        self.for_each(s, use_constraints, a, &[], |w, _| at_a.push(w))?;
        let mut best: f64 = 0.0;
        let mut k = 0;
        self.for_each(s, use_constraints, b, &[], |w, _| {
            let z = at_a[k];
            k += 1;
            if z.norm() < 1.0 && w.norm() < 1.0 {
                best = best.max(super::poincare::pseudo_hyperbolic(z, w).atanh());
            }
        })?;
        Ok(best)
    }
}

pub(crate) fn semianalytic(d: &Domain) -> Option<&SemiAnalytic> {
    match d {
        Domain::SemiAnalytic(s) => Some(s),
        _ => None,
    }
}
