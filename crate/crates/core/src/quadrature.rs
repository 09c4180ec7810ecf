//! One-dimensional quadrature on subintervals of [0,1].
//!
//! Integrands here are products of a piecewise-smooth function with members of
//! an orthonormal system, so every routine takes a list of breakpoints and
//! never places a node on one of them.

#![allow(clippy::excessive_precision)]

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK `qk15`).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadScheme {
    /// Recursive bisection of each smooth panel with a 7/15 Gauss-Kronrod pair.
    AdaptiveBisection,
    /// Each smooth panel is cut into `panels` equal pieces; one Kronrod rule per piece.
    FixedPanel { panels: usize },
    /// Piecewise-constant systems only: the system value on each dyadic cell
    /// multiplies an adaptive integral of the function alone.
    ExactDyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: usize,
    pub scheme: QuadScheme,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_depth: 40,
            scheme: QuadScheme::AdaptiveBisection,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::invalid(format!(
                "abs_tol must be finite and positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::invalid("max_depth must be at least 1"));
        }
        if let QuadScheme::FixedPanel { panels: 0 } = self.scheme {
            return Err(Error::invalid(
                "fixed-panel scheme needs at least one panel",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Kronrod evaluation; returns (kronrod, |kronrod - gauss|).
#[inline]
pub fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        resk += WGK[j] * fsum;
        if j % 2 == 1 {
            resg += WG[j / 2] * fsum;
        }
    }
    (resk * half, ((resk - resg) * half).abs())
}

/// Sorted, deduplicated panel edges: `a`, every breakpoint strictly inside, `b`.
pub fn panel_edges(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}

/// Integrate `f` over `[a, b]`, splitting at `breakpoints`.
///
/// `ExactDyadic` behaves like `AdaptiveBisection` here; the distinction only
/// matters to callers that factor a piecewise-constant weight out of each panel.
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::invalid(format!(
            "bad integration interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let edges = panel_edges(a, b, breakpoints);
    let total_width = b - a;
    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let mut failed = false;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        match cfg.scheme {
            QuadScheme::FixedPanel { panels } => {
                let h = (hi - lo) / panels as f64;
                for p in 0..panels {
                    let pa = lo + h * p as f64;
                    let pb = if p + 1 == panels { hi } else { pa + h };
                    let (k, e) = kronrod15(&f, pa, pb);
                    value.add(k);
                    error += e;
                }
            }
            QuadScheme::AdaptiveBisection | QuadScheme::ExactDyadic => {
                let tol = cfg.abs_tol * (hi - lo) / total_width;
                let (k, e) = kronrod15(&f, lo, hi);
                failed |= !adapt(
                    &f,
                    lo,
                    hi,
                    k,
                    e,
                    tol,
                    0,
                    cfg.max_depth,
                    &mut value,
                    &mut error,
                );
            }
        }
    }
    let est = Estimate {
        value: value.value(),
        error,
    };
    if failed {
        Err(Error::Integration {
            estimate: est.value,
            error_bound: est.error,
        })
    } else {
        Ok(est)
    }
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    err: f64,
    tol: f64,
    depth: usize,
    max_depth: usize,
    value: &mut CompensatedSum,
    error: &mut f64,
) -> bool {
    // Round-off floor: once the estimate is at the level of its own rounding
    // there is nothing left to gain from splitting.
    let floor = 50.0 * f64::EPSILON * whole.abs();
    if err <= tol || err <= floor {
        value.add(whole);
        *error += err;
        return true;
    }
    if depth >= max_depth || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300) {
        value.add(whole);
        *error += err;
        return false;
    }
    let mid = 0.5 * (a + b);
    let (left, el) = kronrod15(f, a, mid);
    let (right, er) = kronrod15(f, mid, b);
    let ok_left = adapt(
        f,
        a,
        mid,
        left,
        el,
        0.5 * tol,
        depth + 1,
        max_depth,
        value,
        error,
    );
    let ok_right = adapt(
        f,
        mid,
        b,
        right,
        er,
        0.5 * tol,
        depth + 1,
        max_depth,
        value,
        error,
    );
    ok_left && ok_right
}
