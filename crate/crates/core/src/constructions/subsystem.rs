//! Subsystems of a complete system whose primitives have a small uniform tail.
//!
//! For a complete system Parseval gives `Σ_s (∫₀ˣφ_s)² = x`, so the tail
//! `Σ_{s≥n} (∫₀ˣφ_s)²` equals `x − Σ_{s<n} (∫₀ˣφ_s)²` and can be evaluated
//! from finitely many terms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{lp_norm, CoefficientSeq, EpsilonParams, WeightSeq};
use crate::sum::{compensated_sum, pairwise_dot, CompensatedSum};
use crate::systems::OrthonormalSystem;

/// Dyadic resolutions and index budget for [`subsystem_select`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubsystemConfig {
    /// The tail is evaluated at `j / 2^grid_log2`.
    pub grid_log2: u32,
    pub max_index: usize,
}

impl Default for SubsystemConfig {
    fn default() -> Self {
        Self {
            grid_log2: 14,
            max_index: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsystemSelection {
    /// `n_1 < n_2 < …`.
    pub indices: Vec<usize>,
    /// Grid sup of `x − Σ_{s<n_k} (∫₀ˣφ_s)²`.
    pub tail_bounds: Vec<f64>,
    /// Grid sup of `|∫₀ˣφ_{n_k}|`.
    pub primitive_sups: Vec<f64>,
    pub weights: WeightSeq,
}

impl SubsystemSelection {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `min(1/k⁴, (1/(d_k k²))²)`.
fn tail_target(k: usize, d: f64) -> f64 {
    let k2 = (k * k) as f64;
    (1.0 / (k2 * k2)).min((1.0 / (d * k2)).powi(2))
}

/// Relative slack on the targets: with irrational weights the target can
/// round just below a tail value it equals exactly.
const TARGET_SLACK: f64 = 1e-12;

fn primitive_bound(k: usize, d: f64) -> f64 {
    1.0 / (d * (k * k) as f64)
}

/// Running `Σ_{s<n} (∫₀ˣφ_s)²` on a dyadic grid.
struct TailGrid {
    xs: Vec<f64>,
    sums: Vec<CompensatedSum>,
}

impl TailGrid {
    fn new(grid_log2: u32) -> Self {
        let m = 1usize << grid_log2;
        Self {
            xs: (0..=m).map(|j| j as f64 / m as f64).collect(),
            sums: vec![CompensatedSum::new(); m + 1],
        }
    }

    /// Sup over the grid points of `x − Σ`.
    fn sup_tail(&self) -> f64 {
        self.xs
            .iter()
            .zip(&self.sums)
            .map(|(x, s)| x - s.value())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn sup_primitive(&self, sys: &dyn OrthonormalSystem, n: usize) -> f64 {
        let (lo, _) = sys.support(n);
        self.xs[self.span(lo)]
            .iter()
            .map(|&x| sys.primitive(n, x).abs())
            .fold(0.0, f64::max)
    }

    /// Grid indices that can see a change when `φ_n` is added: its support
    /// and everything to the right (the primitive is constant there but may
    /// be nonzero).
    fn span(&self, lo: f64) -> std::ops::Range<usize> {
        let m = (self.xs.len() - 1) as f64;
        let start = ((lo * m).floor() as usize).min(self.xs.len() - 1);
        start..self.xs.len()
    }

    fn add(&mut self, sys: &dyn OrthonormalSystem, n: usize) {
        let (lo, hi) = sys.support(n);
        let beyond = sys.primitive_squared(n, hi);
        for j in self.span(lo) {
            let x = self.xs[j];
            if x > hi {
                if beyond == 0.0 {
                    break;
                }
                self.sums[j].add(beyond);
            } else {
                self.sums[j].add(sys.primitive_squared(n, x));
            }
        }
    }
}

/// Pick `n_1 < … < n_K`, each the smallest admissible index with
/// `sup_x [x − Σ_{s<n_k} (∫₀ˣφ_s)²] ≤ min(1/k⁴, 1/(d_k k²)²)` on the grid.
///
/// Since the tail dominates `(∫₀ˣφ_{n_k})²`, this also gives
/// `|∫₀ˣφ_{n_k}| ≤ 1/(d_k k²)`.
pub fn subsystem_select(
    sys: &dyn OrthonormalSystem,
    d: &WeightSeq,
    k_max: usize,
    cfg: &SubsystemConfig,
) -> Result<SubsystemSelection> {
    if !sys.is_complete() {
        return Err(Error::invalid(format!(
            "{} is not complete; the tail has no closed form",
            sys.label()
        )));
    }
    if k_max == 0 {
        return Err(Error::invalid("need at least one index (K >= 1)"));
    }
    if d.len() < k_max {
        return Err(Error::invalid(format!(
            "{} weights given for K = {k_max}",
            d.len()
        )));
    }
    if cfg.grid_log2 == 0 || cfg.grid_log2 > 24 {
        return Err(Error::invalid(format!(
            "grid_log2 must lie in 1..=24, got {}",
            cfg.grid_log2
        )));
    }

    let mut grid = TailGrid::new(cfg.grid_log2);
    let mut indices = Vec::with_capacity(k_max);
    let mut tail_bounds = Vec::with_capacity(k_max);
    let mut primitive_sups = Vec::with_capacity(k_max);
    // `grid` holds Σ_{s<candidate}.
    let mut candidate = 1;
    for k in 1..=k_max {
        let target = tail_target(k, d.get(k));
        loop {
            if candidate > cfg.max_index {
                return Err(Error::BudgetExceeded {
                    budget: cfg.max_index,
                    partial: indices,
                });
            }
            let tail = grid.sup_tail();
            grid.add(sys, candidate);
            candidate += 1;
            if tail <= target * (1.0 + TARGET_SLACK) {
                indices.push(candidate - 1);
                tail_bounds.push(tail);
                primitive_sups.push(grid.sup_primitive(sys, candidate - 1));
                break;
            }
        }
        log::debug!("n_{k} = {} (tail {:e})", indices[k - 1], tail_bounds[k - 1]);
    }
    Ok(SubsystemSelection {
        indices,
        tail_bounds,
        primitive_sups,
        weights: d.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedIndex {
    pub k: usize,
    pub index: usize,
    pub tail_sup: f64,
    pub tail_target: f64,
    pub primitive_sup: f64,
    pub primitive_target: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certification {
    pub grid_log2: u32,
    pub per_k: Vec<CertifiedIndex>,
    pub pass: bool,
}

/// Re-evaluate both bounds of a selection on a (finer) dyadic grid.
pub fn certify_selection(
    sel: &SubsystemSelection,
    sys: &dyn OrthonormalSystem,
    grid_log2: u32,
) -> Result<Certification> {
    if !sys.is_complete() {
        return Err(Error::invalid(format!("{} is not complete", sys.label())));
    }
    if grid_log2 == 0 || grid_log2 > 24 {
        return Err(Error::invalid(format!(
            "grid_log2 must lie in 1..=24, got {grid_log2}"
        )));
    }
    if sel.indices.windows(2).any(|w| w[0] >= w[1]) || sel.indices.first() == Some(&0) {
        return Err(Error::invalid(
            "selection indices must be positive and strictly increasing",
        ));
    }
    let mut grid = TailGrid::new(grid_log2);
    let mut next = 1;
    let mut per_k = Vec::with_capacity(sel.len());
    for (pos, &index) in sel.indices.iter().enumerate() {
        let k = pos + 1;
        while next < index {
            grid.add(sys, next);
            next += 1;
        }
        let dk = sel.weights.get(k);
        let tail_sup = grid.sup_tail();
        let tail_target = tail_target(k, dk);
        let primitive_sup = grid.sup_primitive(sys, index);
        let primitive_target = primitive_bound(k, dk);
        per_k.push(CertifiedIndex {
            k,
            index,
            tail_sup,
            tail_target,
            primitive_sup,
            primitive_target,
            pass: tail_sup <= tail_target * (1.0 + TARGET_SLACK)
                && primitive_sup <= primitive_target * (1.0 + TARGET_SLACK),
        });
    }
    let pass = per_k.iter().all(|c| c.pass);
    Ok(Certification {
        grid_log2,
        per_k,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedMn {
    /// `M_n` of `Σ_{k≤n} d_k a_k φ_{n_k}`.
    pub value: f64,
    /// `(Σ_{k≤n} |a_k|^p)^{1/p} (Σ_{k≤n} k^{−2q})^{1/q}`.
    pub proof_bound: f64,
}

pub fn weighted_mn(
    a: &CoefficientSeq,
    d: &WeightSeq,
    sel: &SubsystemSelection,
    sys: &dyn OrthonormalSystem,
    n: usize,
    eps: &EpsilonParams,
) -> Result<WeightedMn> {
    let limit = a.len().min(d.len()).min(sel.len());
    if n < 2 || n > limit {
        return Err(Error::invalid(format!(
            "weighted M_n needs 2 <= n <= {limit}, got {n}"
        )));
    }
    let coeffs: Vec<f64> = (1..=n).map(|k| d.get(k) * a.get(k)).collect();
    let nf = n as f64;
    let mut row = vec![0.0; n];
    let mut acc = CompensatedSum::new();
    for i in 1..n {
        let x = i as f64 / nf;
        for (slot, &idx) in row.iter_mut().zip(&sel.indices[..n]) {
            *slot = sys.primitive(idx, x);
        }
        acc.add(pairwise_dot(&coeffs, &row).abs());
    }
    let q = eps.q();
    let k_sum = compensated_sum((1..=n).map(|k| (k as f64).powf(-2.0 * q)));
    Ok(WeightedMn {
        value: acc.value() / nf,
        proof_bound: lp_norm(a.head(n)?, eps.p())? * k_sum.powf(1.0 / q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::mn_functional;
    use crate::systems::{Haar, Trig, Walsh};

    /// Brute-force tail on a dyadic grid straight from the definition.
    fn tail_oracle(sys: &dyn OrthonormalSystem, n: usize, grid_log2: u32) -> f64 {
        let m = 1usize << grid_log2;
        (0..=m)
            .map(|j| {
                let x = j as f64 / m as f64;
                let s: f64 = (1..n).map(|s| sys.primitive(s, x).powi(2)).sum();
                x - s
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn haar_first_two_indices() {
        let d = WeightSeq::constant(1.0, 2).unwrap();
        let cfg = SubsystemConfig {
            grid_log2: 10,
            ..Default::default()
        };
        let sel = subsystem_select(&Haar, &d, 2, &cfg).unwrap();
        assert_eq!(sel.indices[0], 1);
        let n2 = (2..64)
            .find(|&n| tail_oracle(&Haar, n, 10) <= 1.0 / 16.0)
            .unwrap();
        assert_eq!(sel.indices[1], n2);
        // Level 2 starts at index 5; the first four functions leave 1/16.
        assert_eq!(n2, 5);
    }

    #[test]
    fn strictly_increasing_and_certified() {
        let d = WeightSeq::sqrt(6);
        let sel = subsystem_select(&Haar, &d, 6, &SubsystemConfig::default()).unwrap();
        assert!(sel.indices.windows(2).all(|w| w[0] < w[1]));
        // Targets 1/k⁵ against the 2^{−m−2} tail after the first 2^m functions.
        assert_eq!(sel.indices, vec![1, 9, 65, 257, 1025, 2049]);
        let cert = certify_selection(&sel, &Haar, 16).unwrap();
        assert!(cert.pass, "{cert:?}");
    }

    #[test]
    fn walsh_selection_matches_haar_at_powers_of_two() {
        // Both span the same dyadic step functions after 2^m terms.
        let d = WeightSeq::constant(1.0, 3).unwrap();
        let cfg = SubsystemConfig {
            grid_log2: 10,
            ..Default::default()
        };
        let w = subsystem_select(&Walsh, &d, 3, &cfg).unwrap();
        for (&n, &t) in w.indices.iter().zip(&w.tail_bounds) {
            assert!((tail_oracle(&Walsh, n, 10) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_and_budget() {
        let d = WeightSeq::constant(1.0, 3).unwrap();
        assert!(matches!(
            subsystem_select(&Trig, &d, 3, &SubsystemConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
        let cfg = SubsystemConfig {
            grid_log2: 10,
            max_index: 6,
        };
        match subsystem_select(&Haar, &d, 3, &cfg) {
            Err(Error::BudgetExceeded { budget, partial }) => {
                assert_eq!(budget, 6);
                assert_eq!(partial, vec![1, 5]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weighted_reductions() {
        let eps = EpsilonParams::new(0.5).unwrap();
        let n = 8;
        let ident = SubsystemSelection {
            indices: (1..=n).collect(),
            tail_bounds: vec![0.0; n],
            primitive_sups: vec![0.0; n],
            weights: WeightSeq::constant(1.0, n).unwrap(),
        };
        let d = WeightSeq::constant(1.0, n).unwrap();
        let e1 = CoefficientSeq::unit(1, n).unwrap();
        let w = weighted_mn(&e1, &d, &ident, &Haar, n, &eps).unwrap();
        assert_eq!(w.value, mn_functional(&e1, &Haar, n, &eps).unwrap());
        let zero = weighted_mn(&CoefficientSeq::zeros(n), &d, &ident, &Haar, n, &eps).unwrap();
        assert_eq!(zero.value, 0.0);
    }
}
