use serde::Serialize;

/// Relative slack allowed by [`BoundReport::pass`].
pub const BOUND_SLACK: f64 = 1e-12;

/// A measured value next to the bound it is supposed to respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub value: f64,
    pub bound: f64,
    /// `value / bound`, or 0 when both vanish.
    pub ratio: f64,
    /// `value ≤ bound·(1 + 1e−12)`.
    pub pass: bool,
}

impl BoundReport {
    pub fn new(n: usize, value: f64, bound: f64) -> Self {
        let ratio = if bound == 0.0 {
            if value == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            value / bound
        };
        Self {
            n,
            value,
            bound,
            ratio,
            pass: value <= bound * (1.0 + BOUND_SLACK),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_over_zero() {
        let r = BoundReport::new(3, 0.0, 0.0);
        assert!(r.pass);
        assert_eq!(r.ratio, 0.0);
        let r = BoundReport::new(3, 1e-300, 0.0);
        assert!(!r.pass);
    }

    #[test]
    fn slack() {
        assert!(BoundReport::new(1, 1.0 + 5e-13, 1.0).pass);
        assert!(!BoundReport::new(1, 1.0 + 5e-12, 1.0).pass);
    }
}
