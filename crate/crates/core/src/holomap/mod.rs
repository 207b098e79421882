//! Holomorphic maps C^n → C^m given by rational expressions.

mod dual;
mod expr;
mod parse;
mod range;

use std::fmt;

use num_complex::Complex64;

pub use dual::Dual;
pub use expr::{Expr, SINGULAR_MODULUS};
pub use parse::{ParseError, ParseErrorKind};
pub use range::{range_check, range_check_with_floor, RangeEvidence, RangeVerdict, RANGE_FLOOR};

use crate::error::{Error, Result};
use crate::point::{check_dim, Point};

/// A map `z ↦ (f_1(z), …, f_m(z))` with each `f_i` an [`Expr`] in `z_1..z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloMap {
    dim: usize,
    components: Vec<Expr>,
}

impl HoloMap {
    /// Parses `;`-separated components over `z1..z{dim}`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let components = parse::parse_components(text, dim)?;
        Ok(HoloMap { dim, components })
    }

    pub fn from_components(dim: usize, components: Vec<Expr>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("a map needs at least one component"));
        }
        if let Some(e) = components.iter().find(|e| e.arity() > dim) {
            return Err(Error::invalid(format!(
                "component {e} references variables beyond z{dim}"
            )));
        }
        Ok(HoloMap { dim, components })
    }

    pub fn identity(dim: usize) -> Self {
        HoloMap {
            dim,
            components: (0..dim).map(Expr::Var).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.dim
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn eval_raw(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.dim, z.len())?;
        self.components.iter().map(|e| e.eval(z)).collect()
    }

    pub fn eval(&self, p: &Point) -> Result<Point> {
        let out = self.eval_raw(p)?;
        Point::new(out).map_err(|_| Error::Singularity { modulus: f64::INFINITY })
    }

    /// `f'(p)·v` by forward-mode propagation of complex dual numbers.
    pub fn jvp(&self, p: &[Complex64], v: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.eval_jvp(p, v)?.1)
    }

    /// `(f(p), f'(p)·v)` in one pass.
    pub fn eval_jvp(&self, p: &[Complex64], v: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        check_dim(self.dim, p.len())?;
        check_dim(self.dim, v.len())?;
        let mut values = Vec::with_capacity(self.components.len());
        let mut tangents = Vec::with_capacity(self.components.len());
        for e in &self.components {
            let (val, tan) = e.eval_dual(p, v)?;
            values.push(val);
            tangents.push(tan);
        }
        Ok((values, tangents))
    }

    /// `self ∘ inner`, by substituting `inner`'s components for the variables.
    pub fn compose(&self, inner: &HoloMap) -> Result<HoloMap> {
        check_dim(self.dim, inner.output_dim())?;
        Ok(HoloMap {
            dim: inner.dim,
            components: self
                .components
                .iter()
                .map(|e| e.substitute(&inner.components))
                .collect(),
        })
    }
}

impl fmt::Display for HoloMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Parses a constant complex literal such as `0.25-0.5i`.
pub fn parse_constant(text: &str) -> Result<Complex64> {
    let map = HoloMap::parse(text, 0)?;
    match map.components() {
        [Expr::Const(c)] => Ok(*c),
        _ => Err(Error::invalid(format!("{text:?} is not a complex constant"))),
    }
}
