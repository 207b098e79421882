use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
}

/// A nonnegative estimate of a metric quantity together with the direction
/// in which it is guaranteed.
///
/// * `Exact`: `|value - true| <= tol`
/// * `Lower`: `value <= true + tol`
/// * `Upper`: `true <= value + tol`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub kind: BoundKind,
    pub tol: f64,
    /// Set when no direction is actually guaranteed (a minimum taken over
    /// lower-bound integrands); `kind` is then only indicative.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub caveat: bool,
}

impl Bound {
    pub fn new(value: f64, kind: BoundKind, tol: f64) -> Self {
        Bound {
            value,
            kind,
            tol,
            caveat: false,
        }
    }

    pub fn exact(value: f64, tol: f64) -> Self {
        Self::new(value, BoundKind::Exact, tol)
    }

    pub fn lower(value: f64, tol: f64) -> Self {
        Self::new(value, BoundKind::Lower, tol)
    }

    pub fn upper(value: f64, tol: f64) -> Self {
        Self::new(value, BoundKind::Upper, tol)
    }

    pub fn zero() -> Self {
        Self::exact(0.0, 0.0)
    }

    pub fn is_exact(&self) -> bool {
        self.kind == BoundKind::Exact && !self.caveat
    }

    /// A value the true quantity cannot exceed, if one is guaranteed.
    pub fn upper_estimate(&self) -> Option<f64> {
        match (self.kind, self.caveat) {
            (BoundKind::Exact | BoundKind::Upper, false) => Some(self.value + self.tol),
            _ => None,
        }
    }

    /// A value the true quantity cannot fall below, if one is guaranteed.
    pub fn lower_estimate(&self) -> Option<f64> {
        match (self.kind, self.caveat) {
            (BoundKind::Exact | BoundKind::Lower, false) => Some((self.value - self.tol).max(0.0)),
            _ => None,
        }
    }

    /// Multiplies value and tolerance by `s ≥ 0`.
    pub fn scaled(self, s: f64) -> Self {
        Bound {
            value: self.value * s,
            tol: self.tol * s,
            ..self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimates_follow_direction() {
        let e = Bound::exact(1.0, 0.1);
        assert_eq!(e.upper_estimate(), Some(1.1));
        assert_eq!(e.lower_estimate(), Some(0.9));
        assert_eq!(Bound::lower(1.0, 0.0).upper_estimate(), None);
        assert_eq!(Bound::upper(1.0, 0.0).lower_estimate(), None);
        let mut c = Bound::lower(1.0, 0.0);
        c.caveat = true;
        assert_eq!(c.lower_estimate(), None);
    }

    #[test]
    fn json_shape() {
        let b = Bound::exact(0.5, 0.0);
        assert_eq!(
            serde_json::to_string(&b).unwrap(),
            r#"{"value":0.5,"kind":"exact","tol":0.0}"#
        );
    }
}
