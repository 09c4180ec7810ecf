//! Fourier coefficients and the finite functionals built from them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::UnitIntervalFn;
use crate::quadrature::{integrate, panel_edges, QuadScheme, QuadratureConfig};
use crate::report::BoundReport;
use crate::sequence::{lp_norm, CoefficientSeq, EpsilonParams};
use crate::sum::{pairwise_dot, CompensatedSum};
use crate::systems::{union_breakpoints, OrthonormalSystem};

/// `C_n(f) = ∫₀¹ f φ_n`.
pub fn fourier_coefficient(
    f: &UnitIntervalFn,
    sys: &dyn OrthonormalSystem,
    n: usize,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("system indices start at 1"));
    }
    let (a, b) = sys.support(n);
    match quad.scheme {
        QuadScheme::ExactDyadic => {
            if !sys.is_piecewise_constant() {
                return Err(Error::invalid(format!(
                    "exact-dyadic quadrature needs a piecewise-constant system, '{}' is not",
                    sys.label()
                )));
            }
            let edges = panel_edges(a, b, &sys.breakpoints(n));
            let mut acc = CompensatedSum::new();
            for w in edges.windows(2) {
                let level = sys.eval(n, 0.5 * (w[0] + w[1]));
                if level == 0.0 {
                    continue;
                }
                let cell_cfg = QuadratureConfig {
                    abs_tol: quad.abs_tol * (w[1] - w[0]) / ((b - a) * level.abs()),
                    ..*quad
                };
                let est = integrate(|x| f.eval(x), w[0], w[1], f.breakpoints(), &cell_cfg)?;
                acc.add(level * est.value);
            }
            Ok(acc.value())
        }
        _ => {
            let mut breaks = sys.breakpoints(n);
            breaks.extend_from_slice(f.breakpoints());
            let est = integrate(|x| f.eval(x) * sys.eval(n, x), a, b, &breaks, quad)?;
            Ok(est.value)
        }
    }
}

/// `C_1(f), …, C_count(f)`. Failures carry the first failing index.
pub fn coefficients(
    f: &UnitIntervalFn,
    sys: &dyn OrthonormalSystem,
    count: usize,
    quad: &QuadratureConfig,
) -> Result<CoefficientSeq> {
    if count == 0 {
        return Err(Error::invalid("need at least one coefficient"));
    }
    quad.validate()?;
    let results: Vec<Result<f64>> = (1..=count)
        .into_par_iter()
        .map(|n| fourier_coefficient(f, sys, n, quad))
        .collect();
    let mut values = Vec::with_capacity(count);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(e) => {
                return Err(Error::IntegrationAt {
                    index: i + 1,
                    source: Box::new(e),
                })
            }
        }
    }
    CoefficientSeq::new(format!("C({},{})", f.label(), sys.label()), values)
}

/// `P_n(a, x) = Σ_{k≤n} a_k φ_k(x)`.
pub fn polynomial_eval(
    a: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
    x: f64,
) -> Result<f64> {
    let head = a.head(n)?;
    let mut acc = CompensatedSum::new();
    for (k, &ak) in head.iter().enumerate() {
        if ak != 0.0 {
            acc.add(ak * sys.eval(k + 1, x));
        }
    }
    Ok(acc.value())
}

/// `S_n(f, x) = Σ_{k≤n} C_k φ_k(x)`; the empty sum for `n = 0` is 0.
pub fn partial_sum(
    coeffs: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
    x: f64,
) -> Result<f64> {
    polynomial_eval(coeffs, sys, n, x)
}

/// `∫₀ˣ P_n(a, u) du`, from the systems' primitives.
pub fn polynomial_primitive(
    a: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
    x: f64,
) -> Result<f64> {
    Ok(primitive_with_magnitude(a.head(n)?, sys, x).0)
}

/// `(Σ a_k ∫₀ˣφ_k, Σ |a_k ∫₀ˣφ_k|)`; the second entry bounds the rounding error of the first.
pub(crate) fn primitive_with_magnitude(
    coeffs: &[f64],
    sys: &dyn OrthonormalSystem,
    x: f64,
) -> (f64, f64) {
    let mut acc = CompensatedSum::new();
    let mut mag = 0.0;
    for (k, &ak) in coeffs.iter().enumerate() {
        if ak != 0.0 {
            let t = ak * sys.primitive(k + 1, x);
            acc.add(t);
            mag += t.abs();
        }
    }
    (acc.value(), mag)
}

/// `M_n(a, ε) = (1/n) Σ_{i=1}^{n−1} |∫₀^{i/n} P_n(a)|`.
///
/// `ε` does not enter the value; it is validated and the `ℓ_q(ε)` norm of
/// `a` is logged next to the result.
pub fn mn_functional(
    a: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
    eps: &EpsilonParams,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("M_n needs n >= 2, got {n}")));
    }
    let value = mn_value(a.head(n)?, sys);
    if log::log_enabled!(log::Level::Debug) {
        log::debug!(
            "M_{n}({}, {}) = {value:e}, |a|_q = {:e}",
            a.label(),
            sys.label(),
            lp_norm(a.head(n)?, eps.q())?
        );
    }
    Ok(value)
}

/// `M_n` for `n = coeffs.len()`.
pub(crate) fn mn_value(coeffs: &[f64], sys: &dyn OrthonormalSystem) -> f64 {
    let n = coeffs.len();
    let mut row = vec![0.0; n];
    let mut acc = CompensatedSum::new();
    for i in 1..n {
        sys.primitive_row(i as f64 / n as f64, &mut row);
        acc.add(pairwise_dot(coeffs, &row).abs());
    }
    acc.value() / n as f64
}

/// `M_n` for several `n` at once (parallel over `n`, results in input order).
pub fn mn_values(
    a: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    ns: &[usize],
) -> Result<Vec<f64>> {
    for &n in ns {
        if n < 2 {
            return Err(Error::invalid(format!("M_n needs n >= 2, got {n}")));
        }
        a.head(n)?;
    }
    Ok(ns
        .par_iter()
        .map(|&n| mn_value(&a.values()[..n], sys))
        .collect())
}

/// `B_n(f) = Σ_{k≤n} C_k(f) a_k`.
pub fn banach_functional(coeffs: &CoefficientSeq, a: &CoefficientSeq, n: usize) -> Result<f64> {
    let c = coeffs.head(n)?;
    let w = a.head(n)?;
    let mut acc = CompensatedSum::new();
    for (ck, ak) in c.iter().zip(w) {
        acc.add(ck * ak);
    }
    Ok(acc.value())
}

const MAX_GRID_LOG2: u32 = 22;

fn grid_sup(f: &UnitIntervalFn, resolution: usize) -> f64 {
    (0..=resolution)
        .map(|i| f.eval(i as f64 / resolution as f64).abs())
        .fold(0.0, f64::max)
}

fn grid_variation(f: &UnitIntervalFn, resolution: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut prev = f.eval(0.0);
    for i in 1..=resolution {
        let cur = f.eval(i as f64 / resolution as f64);
        acc.add((cur - prev).abs());
        prev = cur;
    }
    acc.value()
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution == 0 || resolution > 1 << MAX_GRID_LOG2 {
        return Err(Error::invalid(format!(
            "grid resolution must be in 1..=2^{MAX_GRID_LOG2}, got {resolution}"
        )));
    }
    Ok(())
}

/// Sup norm on a uniform grid. With a Lipschitz witness `L` the grid is
/// refined until `L h / 2 ≤ 1e−6 max(1, sup)` (or the grid cap), after
/// which the true sup is within that margin.
pub fn sup_norm(f: &UnitIntervalFn, grid_resolution: usize) -> Result<f64> {
    check_resolution(grid_resolution)?;
    let mut res = grid_resolution;
    let mut sup = grid_sup(f, res);
    if let Some(lip) = f.lip_const() {
        while lip / (2.0 * res as f64) > 1e-6 * sup.max(1.0) && res < 1 << 20 {
            res *= 2;
            sup = sup.max(grid_sup(f, res));
        }
    }
    Ok(sup)
}

/// Total variation on [0,1]: the closed-form value when the function
/// carries one, otherwise grid variations on successively doubled grids with
/// geometric extrapolation of the increments.
pub fn total_variation(f: &UnitIntervalFn, grid_resolution: usize) -> Result<f64> {
    check_resolution(grid_resolution)?;
    if let Some(tv) = f.total_variation() {
        return Ok(tv);
    }
    let mut res = grid_resolution;
    let mut tv = grid_variation(f, res);
    let mut prev_inc: Option<f64> = None;
    let mut ratios = Vec::new();
    while res < 1 << MAX_GRID_LOG2 {
        res *= 2;
        let next = grid_variation(f, res);
        let inc = (next - tv).max(0.0);
        tv = next;
        if inc <= 1e-13 * tv.max(1.0) {
            return Ok(tv);
        }
        if let Some(p) = prev_inc {
            let r = inc / p;
            ratios.push(r);
            if r < 0.75 {
                let tail = inc * r / (1.0 - r);
                if tail <= 1e-10 * tv.max(1.0) {
                    return Ok(tv + tail);
                }
            }
        }
        prev_inc = Some(inc);
    }
    // Increments that no longer shrink mean the variation grows without bound.
    let recent = &ratios[ratios.len().saturating_sub(4)..];
    if recent.iter().all(|&r| r >= 0.75) {
        return Err(Error::UnboundedVariation { last: tv });
    }
    Ok(tv)
}

/// `‖f‖_A = ‖f‖_C + ∫|f′|`.
pub fn norm_a(f: &UnitIntervalFn, grid_resolution: usize) -> Result<f64> {
    if f.total_variation().is_none() && f.lip_const().is_none() {
        log::warn!(
            "norm_a: '{}' has neither a variation value nor a Lipschitz witness",
            f.label()
        );
    }
    Ok(sup_norm(f, grid_resolution)? + total_variation(f, grid_resolution)?)
}

/// Grid lower estimate of `‖f‖_C + sup |f(x) − f(y)|/|x − y|`.
///
/// Adjacent grid points suffice: any difference quotient over a wider span is
/// an average of adjacent ones.
pub fn lip_norm(f: &UnitIntervalFn, grid_resolution: usize) -> Result<f64> {
    check_resolution(grid_resolution)?;
    let h = 1.0 / grid_resolution as f64;
    let mut sup = 0.0f64;
    let mut slope = 0.0f64;
    let mut prev = f.eval(0.0);
    sup = sup.max(prev.abs());
    for i in 1..=grid_resolution {
        let cur = f.eval(i as f64 * h);
        sup = sup.max(cur.abs());
        slope = slope.max((cur - prev).abs() / h);
        prev = cur;
    }
    Ok(sup + slope)
}

/// `(1/n)(Σ a_k²)^{1/2} ≤ n^{−1/2−1/q} (Σ|a_k|^q)^{1/q}` (power-mean inequality).
pub fn lemma2_check(a: &CoefficientSeq, eps: &EpsilonParams, n: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let head = a.head(n)?;
    let nf = n as f64;
    let lhs = lp_norm(head, 2.0)? / nf;
    let rhs = nf.powf(-0.5 - 1.0 / eps.q()) * lp_norm(head, eps.q())?;
    Ok(BoundReport::new(n, lhs, rhs))
}

/// The three terms of `∫₀¹ f F = I₁ + I₂ + I₃` with `F = P_n(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `∫₀¹ f P_n`, by direct quadrature.
    pub total: f64,
    pub residual: f64,
}

impl DecompositionResult {
    pub fn sum(&self) -> f64 {
        self.i1 + self.i2 + self.i3
    }
}

/// Tolerance multiplier applied to `quad.abs_tol` for identity residuals.
pub const IDENTITY_TOL_FACTOR: f64 = 10.0;

/// `I₁ = Σ_{i<n} (f(i/n) − f((i+1)/n)) ∫₀^{i/n} P_n`,
/// `I₂ = Σ_{i≤n} ∫_{(i−1)/n}^{i/n} (f − f(i/n)) P_n`,
/// `I₃ = f(1) ∫₀¹ P_n`, checked against a direct quadrature of `∫ f P_n`.
pub fn abel_decomposition(
    f: &UnitIntervalFn,
    a: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
    quad: &QuadratureConfig,
) -> Result<DecompositionResult> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "decomposition needs n >= 2, got {n}"
        )));
    }
    quad.validate()?;
    let coeffs = a.head(n)?;
    let nf = n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / nf).collect();
    let fvals: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    let prims: Vec<f64> = grid
        .iter()
        .map(|&x| primitive_with_magnitude(coeffs, sys, x).0)
        .collect();

    let mut i1 = CompensatedSum::new();
    for i in 1..n {
        i1.add((fvals[i] - fvals[i + 1]) * prims[i]);
    }
    let i3 = fvals[n] * prims[n];

    let active: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(k, &c)| (k + 1, c))
        .collect();
    let poly = |x: f64| {
        let mut acc = CompensatedSum::new();
        for &(k, c) in &active {
            acc.add(c * sys.eval(k, x));
        }
        acc.value()
    };
    let mut breaks = union_breakpoints(sys, n);
    breaks.extend_from_slice(f.breakpoints());

    let panel_cfg = QuadratureConfig {
        abs_tol: quad.abs_tol / nf,
        ..*quad
    };
    let panels: Vec<Result<f64>> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let anchor = fvals[i];
            integrate(
                |x| (f.eval(x) - anchor) * poly(x),
                grid[i - 1],
                grid[i],
                &breaks,
                &panel_cfg,
            )
            .map(|e| e.value)
        })
        .collect();
    let mut i2 = CompensatedSum::new();
    for p in panels {
        i2.add(p?);
    }
    let total = integrate(|x| f.eval(x) * poly(x), 0.0, 1.0, &breaks, quad)?.value;

    let mut out = DecompositionResult {
        i1: i1.value(),
        i2: i2.value(),
        i3,
        total,
        residual: 0.0,
    };
    out.residual = (out.sum() - total).abs();
    let tolerance = IDENTITY_TOL_FACTOR * quad.abs_tol;
    if out.residual > tolerance {
        return Err(Error::IdentityViolation {
            what: "abel decomposition",
            residual: out.residual,
            tolerance,
        });
    }
    Ok(out)
}
