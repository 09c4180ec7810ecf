//! `g_n(x) = ∫₀ˣ sign Q(t) dt` with `Q(t) = ∫₀ᵗ P_n(b)`.
//!
//! `g_n` is piecewise linear with slopes in {−1, 0, 1}: the sign of `Q` is
//! resolved by sampling, sign changes are located by bisection, and
//! `sign(0) = 0` wherever `Q` vanishes identically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::UnitIntervalFn;
use crate::functionals::{abel_decomposition, primitive_with_magnitude, DecompositionResult};
use crate::quadrature::QuadratureConfig;
use crate::sequence::{lp_norm, CoefficientSeq, EpsilonParams};
use crate::sum::CompensatedSum;
use crate::systems::OrthonormalSystem;

/// Bisection stops once the bracket is this narrow.
pub const ROOT_TOL: f64 = 1e-12;

/// Samples per unit of `n` on the first pass.
const INITIAL_SAMPLES_PER_N: usize = 4;
/// The sampling grid is doubled at most this many times.
const MAX_DOUBLINGS: u32 = 8;

/// Indices `i ∈ {1, …, n−1}` split by whether `sign Q` is constant on `[i/n, (i+1)/n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignPartition {
    /// `sign Q` takes more than one value on the closed cell.
    pub e_set: Vec<usize>,
    pub f_set: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ExtremalProfile {
    pub n: usize,
    /// Detected zeros of `Q` (0 always; 1 when `Q(1) = 0`).
    pub zeros: Vec<f64>,
    /// `0 = t_0 < … < t_m = 1`; `g_n` has slope `piece_signs[j]` on `[t_j, t_{j+1}]`.
    pub breakpoints: Vec<f64>,
    pub piece_signs: Vec<i8>,
    pub gn: UnitIntervalFn,
    pub partition: SignPartition,
    /// `Q(i/n)`, `i = 0..=n`.
    pub grid_primitives: Vec<f64>,
    /// Sampling resolution that produced a stable sign structure.
    pub samples: usize,
}

impl ExtremalProfile {
    pub fn eval(&self, x: f64) -> f64 {
        self.gn.eval(x)
    }
}

struct SignOracle<'a> {
    coeffs: &'a [f64],
    sys: &'a dyn OrthonormalSystem,
    /// `64 ε² Σ |b_k| sup|φ_k|`: primitives evaluated at an exact zero of
    /// a smooth system (e.g. `sin²(π)`) come out at this scale.
    zero_floor: f64,
}

impl<'a> SignOracle<'a> {
    fn new(coeffs: &'a [f64], sys: &'a dyn OrthonormalSystem) -> Self {
        let scale: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, b)| b.abs() * sys.sup_abs(k + 1))
            .sum();
        Self {
            coeffs,
            sys,
            zero_floor: 64.0 * f64::EPSILON * f64::EPSILON * scale,
        }
    }

    /// Three-valued sign of `Q(t)`; values within the rounding bound of the
    /// sum count as zero.
    fn sign(&self, t: f64) -> i8 {
        let (q, mag) = primitive_with_magnitude(self.coeffs, self.sys, t);
        if q.abs() <= 64.0 * f64::EPSILON * mag + self.zero_floor {
            0
        } else if q > 0.0 {
            1
        } else {
            -1
        }
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, sign_lo: i8) -> f64 {
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.sign(mid) == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Sign-change points between `samples + 1` uniform samples, and the
    /// resulting merged piece structure.
    fn structure(&self, samples: usize) -> (Vec<f64>, Vec<f64>, Vec<i8>) {
        let ts: Vec<f64> = (0..=samples).map(|j| j as f64 / samples as f64).collect();
        let signs: Vec<i8> = ts.iter().map(|&t| self.sign(t)).collect();
        let mut events = Vec::new();
        for j in 0..samples {
            if signs[j] != signs[j + 1] {
                events.push(self.bisect(ts[j], ts[j + 1], signs[j]));
            }
        }
        // Sampled zeros of Q that are not sign changes (touch points).
        let touches: Vec<f64> = (1..samples)
            .filter(|&j| signs[j] == 0 && signs[j - 1] != 0 && signs[j + 1] != 0)
            .map(|j| ts[j])
            .collect();

        let near = 2.0 * ROOT_TOL;
        events.retain(|&e| e > near && e < 1.0 - near);
        events.sort_by(f64::total_cmp);
        let mut merged: Vec<f64> = Vec::with_capacity(events.len());
        for e in events {
            match merged.last_mut() {
                Some(last) if e - *last <= near => *last = 0.5 * (*last + e),
                _ => merged.push(e),
            }
        }

        let mut edges = vec![0.0];
        edges.extend(merged.iter().copied());
        edges.push(1.0);
        let mut out_edges = vec![0.0];
        let mut out_signs: Vec<i8> = Vec::new();
        for w in edges.windows(2) {
            let s = self.sign(0.5 * (w[0] + w[1]));
            if out_signs.last() == Some(&s) {
                *out_edges.last_mut().unwrap() = w[1];
            } else {
                out_signs.push(s);
                out_edges.push(w[1]);
            }
        }

        let mut zeros = merged;
        zeros.extend(touches);
        zeros.push(0.0);
        if self.sign(1.0) == 0 {
            zeros.push(1.0);
        }
        zeros.sort_by(f64::total_cmp);
        zeros.dedup_by(|a, b| (*a - *b).abs() <= near);
        (zeros, out_edges, out_signs)
    }
}

fn same_structure(
    a: &(Vec<f64>, Vec<f64>, Vec<i8>),
    b: &(Vec<f64>, Vec<f64>, Vec<i8>),
) -> Option<(f64, f64)> {
    let (ea, sa) = (&a.1, &a.2);
    let (eb, sb) = (&b.1, &b.2);
    let len = ea.len().min(eb.len());
    for j in 0..len {
        let sign_differs = j < sa.len().min(sb.len()) && sa[j] != sb[j];
        if (ea[j] - eb[j]).abs() > 1e-9 || sign_differs {
            let lo = ea[j.saturating_sub(1)].min(eb[j.saturating_sub(1)]);
            let hi = ea[j].max(eb[j]);
            return Some((lo, hi));
        }
    }
    if ea.len() != eb.len() {
        let lo = ea[len - 1].min(eb[len - 1]);
        return Some((lo, 1.0));
    }
    None
}

fn build_gn(n: usize, edges: &[f64], signs: &[i8]) -> UnitIntervalFn {
    let mut cumulative = Vec::with_capacity(edges.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for (w, &s) in edges.windows(2).zip(signs) {
        acc += f64::from(s) * (w[1] - w[0]);
        cumulative.push(acc);
    }
    let tv: f64 = edges
        .windows(2)
        .zip(signs)
        .filter(|(_, &s)| s != 0)
        .map(|(w, _)| w[1] - w[0])
        .sum();
    let lip = if signs.iter().any(|&s| s != 0) {
        1.0
    } else {
        0.0
    };
    let interior = edges[1..edges.len() - 1].to_vec();
    let (e, s, c) = (edges.to_vec(), signs.to_vec(), cumulative);
    UnitIntervalFn::new(format!("g_{n}"), move |x: f64| {
        let x = x.clamp(0.0, 1.0);
        let j = e
            .partition_point(|&t| t <= x)
            .saturating_sub(1)
            .min(s.len() - 1);
        c[j] + f64::from(s[j]) * (x - e[j])
    })
    .with_lip_const(lip)
    .with_total_variation(tv)
    .with_breakpoints(interior)
}

fn partition(n: usize, oracle: &SignOracle<'_>, zeros: &[f64], edges: &[f64]) -> SignPartition {
    let tau = 4.0 * ROOT_TOL;
    let nf = n as f64;
    let interior = &edges[1..edges.len() - 1];
    let mut e_set = Vec::new();
    let mut f_set = Vec::new();
    for i in 1..n {
        let (lo, hi) = (i as f64 / nf, (i + 1) as f64 / nf);
        let hit = |z: &f64| *z >= lo - tau && *z <= hi + tau;
        let changes =
            zeros.iter().any(hit) || interior.iter().any(hit) || oracle.sign(lo) != oracle.sign(hi);
        if changes {
            e_set.push(i);
        } else {
            f_set.push(i);
        }
    }
    SignPartition { e_set, f_set }
}

/// Build `g_n` for `P_n(b)`.
///
/// The sign structure is accepted once two consecutive sampling resolutions
/// (starting at `4n` and doubling) agree; otherwise the first disagreeing
/// interval is returned in [`Error::RefinementRequired`].
pub fn extremal_function(
    b: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
    _eps: &EpsilonParams,
) -> Result<ExtremalProfile> {
    build_profile(b, sys, n)
}

fn build_profile(
    b: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
) -> Result<ExtremalProfile> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "extremal function needs n >= 2, got {n}"
        )));
    }
    let coeffs = b.head(n)?;
    let oracle = SignOracle::new(coeffs, sys);
    let mut samples = INITIAL_SAMPLES_PER_N * n;
    let mut coarse = oracle.structure(samples);
    let mut last_gap = (0.0, 1.0);
    let mut accepted = None;
    for _ in 0..MAX_DOUBLINGS {
        let fine = oracle.structure(2 * samples);
        samples *= 2;
        match same_structure(&coarse, &fine) {
            None => {
                accepted = Some(fine);
                break;
            }
            Some(gap) => {
                last_gap = gap;
                coarse = fine;
            }
        }
    }
    let Some((zeros, edges, signs)) = accepted else {
        return Err(Error::RefinementRequired {
            lo: last_gap.0,
            hi: last_gap.1,
        });
    };
    let grid_primitives = (0..=n)
        .map(|i| primitive_with_magnitude(coeffs, sys, i as f64 / n as f64).0)
        .collect();
    let partition = partition(n, &oracle, &zeros, &edges);
    Ok(ExtremalProfile {
        n,
        gn: build_gn(n, &edges, &signs),
        zeros,
        breakpoints: edges,
        piece_signs: signs,
        partition,
        grid_primitives,
        samples,
    })
}

/// `E_n` / `F_n` for `P_n(b)`.
pub fn sign_partition(
    b: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
) -> Result<SignPartition> {
    Ok(build_profile(b, sys, n)?.partition)
}

/// `∫ g_n P_n = h₁ + h₂ + h₃` with the estimates used on each term.
#[derive(Debug, Clone, Serialize)]
pub struct HDecomposition {
    pub terms: DecompositionResult,
    pub e_set: Vec<usize>,
    pub f_set: Vec<usize>,
    /// `Σ_{i∈E} |Q(i/n)|`.
    pub e_sum: f64,
    /// `Σ_{i∈F} |Q(i/n)|`.
    pub f_sum: f64,
    /// `(Σ_{k≤n} b_k²)^{1/2}`.
    pub l2_norm: f64,
    /// `M_n(b) = (e_sum + f_sum)/n`.
    pub mn: f64,
    /// Largest `|(g(i/n) − g((i+1)/n)) Q(i/n) + |Q(i/n)|/n|` over `i ∈ F`.
    pub f_identity_deviation: f64,
    /// `(f_sum − e_sum)/n`, a lower bound for `|h₁|`.
    pub h1_lower_bound: f64,
    pub h1_bound_holds: bool,
    /// `|h₂| ≤ l2_norm / n`.
    pub h2_bound_holds: bool,
    /// `e_sum ≤ l2_norm`.
    pub e_bound_holds: bool,
}

/// Evaluate the `h` terms for a profile and check the identities and bounds.
///
/// A residual in `h₁ + h₂ + h₃ = ∫ g_n P_n` above `10 · abs_tol`, or a failed
/// `F`-term identity, is an error: either means the construction is wrong.
pub fn h_decomposition(
    profile: &ExtremalProfile,
    b: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    n: usize,
    quad: &QuadratureConfig,
) -> Result<HDecomposition> {
    if profile.n != n {
        return Err(Error::invalid(format!(
            "profile was built for n = {}, not {n}",
            profile.n
        )));
    }
    let terms = abel_decomposition(&profile.gn, b, sys, n, quad).map_err(|e| match e {
        Error::IdentityViolation {
            residual,
            tolerance,
            ..
        } => Error::IdentityViolation {
            what: "h1 + h2 + h3 = integral of g_n P_n",
            residual,
            tolerance,
        },
        other => other,
    })?;
    let nf = n as f64;
    let q = &profile.grid_primitives;
    let g = |i: usize| profile.gn.eval(i as f64 / nf);

    let mut deviation = 0.0f64;
    let mut f_acc = CompensatedSum::new();
    for &i in &profile.partition.f_set {
        let lhs = (g(i) - g(i + 1)) * q[i];
        let rhs = -q[i].abs() / nf;
        deviation = deviation.max((lhs - rhs).abs());
        f_acc.add(q[i].abs());
    }
    let f_tol = 4.0 * ROOT_TOL * q.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1e-15;
    if deviation > f_tol {
        return Err(Error::IdentityViolation {
            what: "F-term identity",
            residual: deviation,
            tolerance: f_tol,
        });
    }
    let mut e_acc = CompensatedSum::new();
    for &i in &profile.partition.e_set {
        e_acc.add(q[i].abs());
    }
    let (e_sum, f_sum) = (e_acc.value(), f_acc.value());
    let l2_norm = lp_norm(b.head(n)?, 2.0)?;
    let h1_lower_bound = (f_sum - e_sum) / nf;
    let slack = 10.0 * quad.abs_tol;
    Ok(HDecomposition {
        e_set: profile.partition.e_set.clone(),
        f_set: profile.partition.f_set.clone(),
        e_sum,
        f_sum,
        l2_norm,
        mn: (e_sum + f_sum) / nf,
        f_identity_deviation: deviation,
        h1_lower_bound,
        h1_bound_holds: terms.i1.abs() >= h1_lower_bound - 1e-12 * (1.0 + f_sum / nf),
        h2_bound_holds: terms.i2.abs() <= l2_norm / nf + slack,
        e_bound_holds: e_sum <= l2_norm * (1.0 + 1e-12) + 4.0 * ROOT_TOL * l2_norm,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::polynomial_primitive;
    use crate::systems::{Haar, SineSystem, Trig, Walsh};

    fn eps() -> EpsilonParams {
        EpsilonParams::new(0.5).unwrap()
    }

    #[test]
    fn zero_coefficients_give_zero_function() {
        let p = extremal_function(&CoefficientSeq::zeros(8), &Trig, 8, &eps()).unwrap();
        assert_eq!(p.piece_signs, vec![0]);
        for i in 0..=10 {
            assert_eq!(p.eval(i as f64 / 10.0), 0.0);
        }
        let h = h_decomposition(
            &p,
            &CoefficientSeq::zeros(8),
            &Trig,
            8,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!((h.terms.i1, h.terms.i2, h.terms.i3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn positive_primitive_gives_identity() {
        let e1 = CoefficientSeq::unit(1, 4).unwrap();
        let p = extremal_function(&e1, &Haar, 4, &eps()).unwrap();
        assert_eq!(p.piece_signs, vec![1]);
        for i in 0..=8 {
            let x = i as f64 / 8.0;
            assert!((p.eval(x) - x).abs() < 1e-15);
        }
        let h = h_decomposition(&p, &e1, &Haar, 4, &QuadratureConfig::default()).unwrap();
        assert!((h.terms.i3 - 1.0).abs() < 1e-15);

        let s = extremal_function(&CoefficientSeq::unit(1, 2).unwrap(), &SineSystem, 2, &eps())
            .unwrap();
        assert_eq!(s.zeros, vec![0.0, 1.0]);
        assert!((s.eval(0.37) - 0.37).abs() < 1e-15);
    }

    #[test]
    fn haar_second_function_partition() {
        // Q(t) = min(t, 1 − t) ≥ 0 vanishes only at the ends; the last cell
        // touches Q(1) = 0, so it lands in E by the closed-cell rule.
        let p = extremal_function(&CoefficientSeq::unit(2, 2).unwrap(), &Haar, 2, &eps()).unwrap();
        assert_eq!(p.piece_signs, vec![1]);
        assert!(p.zeros.iter().all(|&z| z == 0.0 || z == 1.0));
        assert_eq!(p.partition.e_set, vec![1]);
    }

    #[test]
    fn crossing_inside_cell() {
        // Haar b = e₁ + c·e₃: on [¼, ½], Q(t) = t + c√2(½ − t), which with
        // c√2 = −1.5 crosses zero at t = 0.3 going from negative to positive.
        let n = 10;
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        v[2] = -1.5 / std::f64::consts::SQRT_2;
        let b = CoefficientSeq::new("b", v).unwrap();
        let q = polynomial_primitive(&b, &Haar, n, 0.3).unwrap();
        assert!(q.abs() < 1e-15);
        let p = extremal_function(&b, &Haar, n, &eps()).unwrap();
        assert!(p.zeros.iter().any(|&z| (z - 0.3).abs() < 1e-10));
        assert!(p.partition.e_set.contains(&3));
        let mut all = p.partition.e_set.clone();
        all.extend(&p.partition.f_set);
        all.sort();
        assert_eq!(all, (1..n).collect::<Vec<_>>());
        let h = h_decomposition(&p, &b, &Haar, n, &QuadratureConfig::default()).unwrap();
        assert!(h.h1_bound_holds && h.h2_bound_holds && h.e_bound_holds);
    }

    #[test]
    fn identities_on_walsh_mixture() {
        let b = CoefficientSeq::new("b", vec![0.2, -1.0, 0.7, 0.4, -0.9, 0.1, 0.3, -0.5]).unwrap();
        let p = extremal_function(&b, &Walsh, 8, &eps()).unwrap();
        let h = h_decomposition(&p, &b, &Walsh, 8, &QuadratureConfig::default()).unwrap();
        assert!(h.terms.residual <= 1e-8);
        assert!(h.h1_bound_holds && h.h2_bound_holds && h.e_bound_holds);
    }
}
