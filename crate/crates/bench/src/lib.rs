//! Shared fixtures for the criterion benches.

use hypermetric::{Complex64, Domain, HoloMap, Point};

pub fn unit_disk() -> Domain {
    Domain::unit_disk()
}

pub fn disk(radius: f64) -> Domain {
    Domain::disk(Complex64::new(0.0, 0.0), radius).expect("valid disk")
}

pub fn bidisc(radius: f64) -> Domain {
    Domain::polydisc(vec![Complex64::new(0.0, 0.0); 2], vec![radius; 2]).expect("valid polydisc")
}

/// The unit disk as a semi-analytic domain `{|z1| < 1}`.
pub fn semianalytic_disk() -> Domain {
    unit_disk().to_semianalytic().expect("disk re-encodes")
}

pub fn quadratic_map() -> HoloMap {
    HoloMap::parse("(z1^2+1)/4", 1).expect("valid map")
}

pub fn scalar(re: f64, im: f64) -> Point {
    Point::scalar(Complex64::new(re, im)).expect("finite point")
}
