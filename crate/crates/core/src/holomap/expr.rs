use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holomap::dual::Dual;

/// Denominators with modulus below this are treated as poles.
pub const SINGULAR_MODULUS: f64 = 1e-300;

/// Abstract syntax tree of a rational expression in z_1..z_n.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    /// Zero-based coordinate index; printed as `z{index + 1}`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Arithmetic shared by plain and dual evaluation.
pub(crate) trait Scalar: Copy {
    fn constant(c: Complex64) -> Self;
    fn value(self) -> Complex64;
    fn neg(self) -> Self;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn div(self, rhs: Self) -> Self;
    fn powu(self, k: u32) -> Self;
}

impl Scalar for Complex64 {
    fn constant(c: Complex64) -> Self {
        c
    }
    fn value(self) -> Complex64 {
        self
    }
    fn neg(self) -> Self {
        -self
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn div(self, rhs: Self) -> Self {
        self / rhs
    }
    fn powu(self, k: u32) -> Self {
        Complex64::powu(&self, k)
    }
}

impl Expr {
    pub(crate) fn eval_with<S: Scalar>(&self, vars: &[S]) -> Result<S> {
        Ok(match self {
            Expr::Const(c) => S::constant(*c),
            Expr::Var(j) => vars[*j],
            Expr::Neg(a) => a.eval_with(vars)?.neg(),
            Expr::Add(a, b) => a.eval_with(vars)?.add(b.eval_with(vars)?),
            Expr::Sub(a, b) => a.eval_with(vars)?.sub(b.eval_with(vars)?),
            Expr::Mul(a, b) => a.eval_with(vars)?.mul(b.eval_with(vars)?),
            Expr::Div(a, b) => {
                let num = a.eval_with(vars)?;
                let den = b.eval_with(vars)?;
                let modulus = den.value().norm();
                if modulus.is_nan() || modulus < SINGULAR_MODULUS {
                    return Err(Error::Singularity { modulus });
                }
                num.div(den)
            }
            Expr::Pow(a, k) => a.eval_with(vars)?.powu(*k),
        })
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        self.eval_with(z)
    }

    /// Value and directional derivative at `z` along `v`.
    pub fn eval_dual(&self, z: &[Complex64], v: &[Complex64]) -> Result<(Complex64, Complex64)> {
        let vars: Vec<Dual> = z.iter().zip(v).map(|(&a, &b)| Dual::new(a, b)).collect();
        let out = self.eval_with(&vars)?;
        Ok((out.re, out.eps))
    }

    /// Largest variable index referenced plus one (0 for constants).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(j) => j + 1,
            Expr::Neg(a) | Expr::Pow(a, _) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.arity().max(b.arity()),
        }
    }

    /// Replaces every `Var(j)` by `subst[j]`.
    pub fn substitute(&self, subst: &[Expr]) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(subst));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(j) => subst[*j].clone(),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Div(a, b) => Expr::Div(sub(a), sub(b)),
            Expr::Pow(a, k) => Expr::Pow(sub(a), *k),
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Expr::Const(_))
    }
}

fn write_complex(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    // `{:?}` on f64 is the shortest representation that round-trips.
    if c.im.is_sign_negative() {
        write!(f, "({:?}-{:?}i)", c.re, -c.im)
    } else {
        write!(f, "({:?}+{:?}i)", c.re, c.im)
    }
}

/// Fully parenthesized; reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_complex(f, *c),
            Expr::Var(j) => write!(f, "z{}", j + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "({a}^{k})"),
        }
    }
}
