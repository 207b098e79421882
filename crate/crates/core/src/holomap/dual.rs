//! Complex dual numbers `re + eps·ε`, ε² = 0.

use num_complex::Complex64;

use crate::holomap::expr::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: Complex64,
    pub eps: Complex64,
}

impl Dual {
    pub fn new(re: Complex64, eps: Complex64) -> Self {
        Dual { re, eps }
    }
}

impl Scalar for Dual {
    fn constant(c: Complex64) -> Self {
        Dual::new(c, Complex64::new(0.0, 0.0))
    }
    fn value(self) -> Complex64 {
        self.re
    }
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
    fn mul(self, rhs: Self) -> Self {
        Dual::new(self.re * rhs.re, self.eps * rhs.re + self.re * rhs.eps)
    }
    fn div(self, rhs: Self) -> Self {
        let q = self.re / rhs.re;
        Dual::new(q, (self.eps - q * rhs.eps) / rhs.re)
    }
    fn powu(self, k: u32) -> Self {
        match k {
            0 => Dual::constant(Complex64::new(1.0, 0.0)),
            _ => {
                let lower = self.re.powu(k - 1);
                Dual::new(lower * self.re, self.eps * lower * k as f64)
            }
        }
    }
}
