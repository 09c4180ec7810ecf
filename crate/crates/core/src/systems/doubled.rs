use super::{OrthonormalSystem, SystemRef};

/// `Φ_n(x) = φ_n(2x)` on [0,½] and `−φ_n(2x − 1)` on (½,1].
///
/// Every `Φ_n` has zero mean, so the result is never complete.
#[derive(Clone)]
pub struct DoubledSystem {
    base: SystemRef,
}

impl DoubledSystem {
    pub fn new(base: SystemRef) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &SystemRef {
        &self.base
    }
}

impl OrthonormalSystem for DoubledSystem {
    fn label(&self) -> String {
        format!("doubled:{}", self.base.label())
    }

    fn eval(&self, n: usize, x: f64) -> f64 {
        if x <= 0.5 {
            self.base.eval(n, 2.0 * x)
        } else {
            -self.base.eval(n, 2.0 * x - 1.0)
        }
    }

    fn primitive(&self, n: usize, x: f64) -> f64 {
        if x <= 0.5 {
            0.5 * self.base.primitive(n, 2.0 * x)
        } else {
            0.5 * (self.base.primitive(n, 1.0) - self.base.primitive(n, 2.0 * x - 1.0))
        }
    }

    fn has_exact_primitive(&self) -> bool {
        self.base.has_exact_primitive()
    }

    fn is_complete(&self) -> bool {
        false
    }

    fn is_piecewise_constant(&self) -> bool {
        self.base.is_piecewise_constant()
    }

    fn breakpoints(&self, n: usize) -> Vec<f64> {
        let inner = self.base.breakpoints(n);
        let mut out: Vec<f64> = inner.iter().map(|b| 0.5 * b).collect();
        out.push(0.5);
        out.extend(inner.iter().map(|b| 0.5 + 0.5 * b));
        out
    }

    fn frequency(&self, n: usize) -> usize {
        2 * self.base.frequency(n)
    }

    fn sup_abs(&self, n: usize) -> f64 {
        self.base.sup_abs(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{Haar, Walsh};
    use std::sync::Arc;

    #[test]
    fn substitution() {
        let sys = DoubledSystem::new(Arc::new(Haar));
        assert_eq!(sys.eval(1, 0.25), 1.0);
        assert_eq!(sys.eval(1, 0.75), -1.0);
        assert_eq!(sys.primitive(1, 1.0), 0.0);
    }

    #[test]
    fn zero_mean() {
        let sys = DoubledSystem::new(Arc::new(Walsh));
        for n in 1..=32 {
            assert_eq!(sys.primitive(n, 1.0), 0.0);
        }
    }
}
