//! The unit disk Δ with its Poincaré distance and metric.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn require_in_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::outside(format!("{z} is not in the unit disk")))
    }
}

/// The disk automorphism `z ↦ (z - a)/(1 - conj(a) z)`, sending `a` to 0.
pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (1.0 - a.conj() * z)
}

/// `|(z - w)/(1 - conj(w) z)|`, the pseudo-hyperbolic distance.
pub(crate) fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    let den = (1.0 - w.conj() * z).norm();
    ((z - w).norm() / den).min(1.0)
}

/// ω(z, w) = atanh |(z - w)/(1 - conj(w) z)|.
pub fn poincare_distance(z: Complex64, w: Complex64) -> Result<f64> {
    require_in_disk(z)?;
    require_in_disk(w)?;
    Ok(pseudo_hyperbolic(z, w).atanh())
}

/// |v| / (1 - |z|²).
pub fn poincare_metric(z: Complex64, v: Complex64) -> Result<f64> {
    require_in_disk(z)?;
    Ok(v.norm() / (1.0 - z.norm_sqr()))
}
