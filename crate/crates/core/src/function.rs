//! Real functions on [0,1] with optional regularity witnesses.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A finite real function on [0,1].
///
/// `lip_const` is a Lipschitz constant witness, `total_variation` an exact
/// value of the variation on [0,1] when one is known in closed form, and
/// `breakpoints` lists interior points where the function (or its
/// derivative) is not smooth, so quadrature can split panels there.
#[derive(Clone)]
pub struct UnitIntervalFn {
    eval: EvalFn,
    lip_const: Option<f64>,
    total_variation: Option<f64>,
    breakpoints: Vec<f64>,
    label: String,
}

impl fmt::Debug for UnitIntervalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitIntervalFn")
            .field("label", &self.label)
            .field("lip_const", &self.lip_const)
            .field("total_variation", &self.total_variation)
            .field("breakpoints", &self.breakpoints.len())
            .finish()
    }
}

impl UnitIntervalFn {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            lip_const: None,
            total_variation: None,
            breakpoints: Vec::new(),
            label: label.into(),
        }
    }

    pub fn with_lip_const(mut self, lip: f64) -> Self {
        debug_assert!(lip >= 0.0);
        self.lip_const = Some(lip);
        self
    }

    pub fn with_total_variation(mut self, tv: f64) -> Self {
        self.total_variation = Some(tv);
        self
    }

    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|&x| x > 0.0 && x < 1.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.breakpoints = points;
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn lip_const(&self) -> Option<f64> {
        self.lip_const
    }

    pub fn total_variation(&self) -> Option<f64> {
        self.total_variation
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `f ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self::new(format!("const:{c}"), move |_| c)
            .with_lip_const(0.0)
            .with_total_variation(0.0)
    }

    /// `f(x) = x`.
    pub fn linear() -> Self {
        Self::new("linear", |x| x)
            .with_lip_const(1.0)
            .with_total_variation(1.0)
    }

    /// Piecewise-linear interpolant through `(x, y)` samples.
    ///
    /// The abscissae must start at 0, end at 1 and be strictly increasing.
    /// The Lipschitz constant is the steepest segment slope; a declared
    /// constant below that is rejected.
    pub fn piecewise_linear(
        label: impl Into<String>,
        xs: Vec<f64>,
        ys: Vec<f64>,
        declared_lip: Option<f64>,
    ) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::invalid(
                "piecewise-linear data needs at least two (x, y) pairs",
            ));
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(Error::invalid(
                "piecewise-linear abscissae must start at 0 and end at 1",
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "piecewise-linear abscissae must be strictly increasing",
            ));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::invalid("piecewise-linear ordinates must be finite"));
        }
        let slopes: Vec<f64> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        let lip = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        if let Some(declared) = declared_lip {
            if declared < lip * (1.0 - 1e-12) {
                return Err(Error::invalid(format!(
                    "declared Lipschitz constant {declared} is below the data slope {lip}"
                )));
            }
        }
        let tv: f64 = ys.windows(2).map(|y| (y[1] - y[0]).abs()).sum();
        let breaks = xs[1..xs.len() - 1].to_vec();
        let (xs2, ys2) = (xs.clone(), ys.clone());
        let f = move |x: f64| {
            let x = x.clamp(0.0, 1.0);
            let j = match xs2.binary_search_by(|p| p.total_cmp(&x)) {
                Ok(j) => return ys2[j],
                Err(j) => j - 1,
            };
            let t = (x - xs2[j]) / (xs2[j + 1] - xs2[j]);
            ys2[j] + t * (ys2[j + 1] - ys2[j])
        };
        Ok(Self::new(label, f)
            .with_lip_const(declared_lip.unwrap_or(lip))
            .with_total_variation(tv)
            .with_breakpoints(breaks))
    }
}

/// `f(x) = 1 − cos(4π(x − ½))`: two full cosine periods, vanishing at 0, ½ and 1.
pub fn banach_seed_function() -> UnitIntervalFn {
    UnitIntervalFn::new("banach-seed", |x| 1.0 - (4.0 * PI * (x - 0.5)).cos())
        .with_lip_const(4.0 * PI)
        .with_total_variation(8.0)
}

/// `g(x) = f(2x)` on [0,½] and `0` on (½,1].
///
/// `g` is Lipschitz with constant `2L` only when `f(1) = 0`; otherwise it
/// jumps at ½ and a warning is logged. `g(½) = f(1)` (left branch).
pub fn doubled_function(f: &UnitIntervalFn) -> UnitIntervalFn {
    let end = f.eval(1.0);
    if end != 0.0 {
        log::warn!("doubled_function: f(1) = {end} is nonzero, the doubled function jumps at 1/2");
    }
    let inner = f.clone();
    let mut breaks: Vec<f64> = f.breakpoints().iter().map(|b| 0.5 * b).collect();
    breaks.push(0.5);
    let mut g = UnitIntervalFn::new(format!("doubled:{}", f.label()), move |x| {
        if x <= 0.5 {
            inner.eval(2.0 * x)
        } else {
            0.0
        }
    })
    .with_breakpoints(breaks);
    if end == 0.0 {
        if let Some(l) = f.lip_const() {
            g = g.with_lip_const(2.0 * l);
        }
    }
    if let Some(tv) = f.total_variation() {
        g = g.with_total_variation(tv + end.abs());
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_function_values() {
        let f = banach_seed_function();
        assert!(f.eval(0.0).abs() < 1e-15);
        assert!((f.eval(0.25) - 2.0).abs() < 1e-15);
        assert_eq!(f.eval(0.5), 0.0);
        assert!(f.eval(1.0).abs() < 1e-15);
    }

    #[test]
    fn doubled_values() {
        let f = banach_seed_function();
        let g = doubled_function(&f);
        assert_eq!(g.eval(0.25), f.eval(0.5));
        assert_eq!(g.eval(0.75), 0.0);
        assert!((g.eval(0.125) - 2.0).abs() < 1e-15);
        assert_eq!(g.breakpoints(), &[0.5]);
    }

    #[test]
    fn doubled_lipschitz_constant() {
        // cos(2π) rounds to exactly 1, so the seed keeps its constant; x ↦ x does not.
        let g = doubled_function(&banach_seed_function());
        assert_eq!(g.lip_const(), Some(8.0 * PI));
        let h = doubled_function(&UnitIntervalFn::linear());
        assert_eq!(h.lip_const(), None);
        assert_eq!(h.total_variation(), Some(2.0));
    }

    #[test]
    fn piecewise_linear_interpolates() {
        let f =
            UnitIntervalFn::piecewise_linear("pl", vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0], None)
                .unwrap();
        assert_eq!(f.eval(0.25), 0.5);
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.lip_const(), Some(2.0));
        assert_eq!(f.total_variation(), Some(2.0));
        assert!(
            UnitIntervalFn::piecewise_linear("pl", vec![0.0, 1.0], vec![0.0, 3.0], Some(1.0))
                .is_err()
        );
        assert!(
            UnitIntervalFn::piecewise_linear("pl", vec![0.0, 0.7], vec![0.0, 3.0], None).is_err()
        );
    }
}
