//! Constructive orthonormal systems on [0,1].
//!
//! Indices are 1-based throughout. Step systems (Haar, Walsh, Rademacher)
//! are right-continuous at dyadic points.

mod doubled;
mod haar;
mod trig;
mod walsh;

use std::sync::Arc;

pub use doubled::DoubledSystem;
pub use haar::{haar_level_range, Haar, HaarCell};
pub use trig::{SineSystem, Trig};
pub use walsh::{Rademacher, Walsh};

use crate::error::{Error, Result};
use crate::quadrature::{kronrod15, panel_edges};
use crate::sum::CompensatedSum;

pub type SystemRef = Arc<dyn OrthonormalSystem>;

/// An orthonormal family `φ_1, φ_2, …` in L²[0,1].
pub trait OrthonormalSystem: Send + Sync {
    fn label(&self) -> String;

    fn eval(&self, n: usize, x: f64) -> f64;

    /// `∫₀ˣ φ_n`.
    fn primitive(&self, n: usize, x: f64) -> f64;

    /// `(∫₀ˣ φ_n)²`. Step systems override this to stay exact on dyadic grids.
    fn primitive_squared(&self, n: usize, x: f64) -> f64 {
        let p = self.primitive(n, x);
        p * p
    }

    /// Writes `primitive(k, x)` into `out[k - 1]` for `k = 1..=out.len()`.
    fn primitive_row(&self, x: f64, out: &mut [f64]) {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.primitive(k + 1, x);
        }
    }

    fn has_exact_primitive(&self) -> bool {
        true
    }

    /// Whether the system is complete in L²[0,1].
    fn is_complete(&self) -> bool;

    fn is_piecewise_constant(&self) -> bool {
        false
    }

    /// Closed interval outside of which `φ_n` vanishes.
    fn support(&self, _n: usize) -> (f64, f64) {
        (0.0, 1.0)
    }

    /// Interior points of (0,1) where `φ_n` jumps, sorted.
    fn breakpoints(&self, _n: usize) -> Vec<f64> {
        Vec::new()
    }

    /// Number of oscillations of `φ_n` on [0,1]; sizes fixed quadrature panels.
    fn frequency(&self, _n: usize) -> usize {
        1
    }

    /// `sup |φ_n|`.
    fn sup_abs(&self, n: usize) -> f64;

    /// `∫₀¹ φ_i φ_j` when the system can do better than panelwise quadrature.
    fn exact_inner_product(&self, _i: usize, _j: usize) -> Option<f64> {
        None
    }

    /// Known bound on `sup_x [x − Σ_{n≤count} (∫₀ˣφ_n)²]`, if any.
    fn parseval_tail_bound(&self, _count: usize) -> Option<f64> {
        None
    }
}

/// `2^{−m−1}` for the largest `2^m ≤ count`: the first `2^m` functions of a
/// dyadic system span the step functions on `2^m` equal cells, which leave
/// at most `2^{−m−2}` of `x`.
pub(crate) fn dyadic_tail_bound(count: usize) -> Option<f64> {
    if count == 0 {
        return None;
    }
    let m = usize::BITS - 1 - count.leading_zeros();
    Some(0.5f64.powi(m as i32 + 1))
}

/// Sorted union of the breakpoints of `φ_1..=φ_n`.
pub fn union_breakpoints(sys: &dyn OrthonormalSystem, n: usize) -> Vec<f64> {
    let mut all: Vec<f64> = (1..=n).flat_map(|k| sys.breakpoints(k)).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// `∫₀¹ φ_i φ_j`, computed panelwise with one Kronrod rule per panel.
///
/// Panels are cut at the jumps of both functions and refined to a quarter
/// of the shortest oscillation, which makes the rule exact for step systems
/// and accurate to rounding for trigonometric ones.
pub fn inner_product(sys: &dyn OrthonormalSystem, i: usize, j: usize) -> f64 {
    if let Some(v) = sys.exact_inner_product(i, j) {
        return v;
    }
    let (ai, bi) = sys.support(i);
    let (aj, bj) = sys.support(j);
    let (a, b) = (ai.max(aj), bi.min(bj));
    if a >= b {
        return 0.0;
    }
    let mut breaks = sys.breakpoints(i);
    breaks.extend(sys.breakpoints(j));
    let edges = panel_edges(a, b, &breaks);
    let pieces = 4 * sys.frequency(i).max(sys.frequency(j));
    let mut acc = CompensatedSum::new();
    let f = |x: f64| sys.eval(i, x) * sys.eval(j, x);
    for w in edges.windows(2) {
        let sub = (((w[1] - w[0]) * pieces as f64).ceil() as usize).max(1);
        let h = (w[1] - w[0]) / sub as f64;
        for s in 0..sub {
            let lo = w[0] + h * s as f64;
            let hi = if s + 1 == sub { w[1] } else { lo + h };
            acc.add(kronrod15(&f, lo, hi).0);
        }
    }
    acc.value()
}

/// Gram matrix of the first `count` functions.
#[allow(clippy::needless_range_loop)]
pub fn gram_matrix(sys: &dyn OrthonormalSystem, count: usize) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; count]; count];
    for i in 0..count {
        for j in i..count {
            let v = inner_product(sys, i + 1, j + 1);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// `max |G − I|` over the first `count` functions.
pub fn gram_deviation(sys: &dyn OrthonormalSystem, count: usize) -> f64 {
    let g = gram_matrix(sys, count);
    let mut worst = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

/// Look a system up by its CLI name: `trig`, `sine`, `walsh`, `haar`,
/// `rademacher`, or `doubled:<name>` (nestable).
pub fn system_by_name(name: &str) -> Result<SystemRef> {
    let name = name.trim();
    if let Some(base) = name.strip_prefix("doubled:") {
        return Ok(Arc::new(DoubledSystem::new(system_by_name(base)?)));
    }
    match name {
        "trig" => Ok(Arc::new(Trig)),
        "sine" => Ok(Arc::new(SineSystem)),
        "walsh" => Ok(Arc::new(Walsh)),
        "haar" => Ok(Arc::new(Haar)),
        "rademacher" => Ok(Arc::new(Rademacher)),
        other => Err(Error::invalid(format!(
            "unknown system '{other}' (expected trig, sine, walsh, haar, rademacher or doubled:<system>)"
        ))),
    }
}

/// Doubled copy of `base`.
pub fn doubled_system(base: SystemRef) -> SystemRef {
    Arc::new(DoubledSystem::new(base))
}

/// Right-continuous dyadic cell index `⌊x·2^level⌋`, clamped so `x = 1` maps to `2^level`.
#[inline]
pub(crate) fn dyadic_cell(x: f64, level: u32) -> u64 {
    debug_assert!(level <= 62);
    let scaled = x * (1u64 << level) as f64;
    if scaled <= 0.0 {
        0
    } else {
        (scaled.floor() as u64).min(1u64 << level)
    }
}

/// `∫` of a ±1 square wave with period `width` (positive first half) from
/// the start of the period containing `x` up to `x`: a triangle of height `width/2`.
#[inline]
pub(crate) fn triangle(x: f64, width: f64) -> f64 {
    let t = x / width;
    let u = t - t.floor();
    if u < 0.5 {
        u * width
    } else {
        (1.0 - u) * width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        for name in [
            "trig",
            "sine",
            "walsh",
            "haar",
            "rademacher",
            "doubled:haar",
            "doubled:doubled:walsh",
        ] {
            let sys = system_by_name(name).unwrap();
            assert_eq!(sys.label(), name);
        }
        assert!(matches!(
            system_by_name("legendre"),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn triangle_shape() {
        assert_eq!(triangle(0.0, 0.5), 0.0);
        assert_eq!(triangle(0.125, 0.5), 0.125);
        assert_eq!(triangle(0.25, 0.5), 0.25);
        assert_eq!(triangle(0.375, 0.5), 0.125);
        assert_eq!(triangle(0.5, 0.5), 0.0);
    }
}
