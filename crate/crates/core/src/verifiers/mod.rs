//! Numerical checks of the explicit bounds and identities, and experiment drivers.
//!
//! Every check produces [`BoundReport`]s with the bound's constants computed
//! from the inputs; none of them asserts anything asymptotic.

mod experiments;

pub use experiments::{
    decay_experiment, mn_scan, mr_convergence_experiment, DecayReport, DecayRow, MnScan, MnScanRow,
    MrReport, MrRow, PermutationModel,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{doubled_function, UnitIntervalFn};
use crate::functionals::{fourier_coefficient, mn_value};
use crate::quadrature::QuadratureConfig;
use crate::report::BoundReport;
use crate::sequence::{lp_norm, CoefficientSeq};
use crate::sum::{compensated_sum, CompensatedSum};
use crate::systems::{doubled_system, haar_level_range, OrthonormalSystem, SystemRef};

/// Shared knobs for the checks and experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub eps_values: Vec<f64>,
    pub seed: u64,
    /// Number of cells of the evaluation grid; a power of two.
    pub grid_resolution: usize,
    pub trials: usize,
    /// Worker threads the caller intends to use. Results never depend on it.
    pub parallelism_hint: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_values: vec![16, 64, 256, 1024],
            eps_values: vec![0.5],
            seed: 0,
            grid_resolution: 1 << 12,
            trials: 20,
            parallelism_hint: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::invalid(
                "n_values must be a nonempty list of positive integers",
            ));
        }
        if let Some(e) = self.eps_values.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::invalid(format!("eps must lie in (0,1), got {e}")));
        }
        if !self.grid_resolution.is_power_of_two() {
            return Err(Error::invalid(format!(
                "grid resolution must be a power of two, got {}",
                self.grid_resolution
            )));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.parallelism_hint == 0 {
            return Err(Error::invalid("parallelism hint must be at least 1"));
        }
        Ok(())
    }

    fn max_n(&self) -> usize {
        self.n_values.iter().copied().max().unwrap_or(0)
    }
}

/// `M_n(a) ≤ c (Σ_{k≤n} a_k²)^{1/2} (Σ_{k≤n} k^{−2})^{1/2}` with
/// `c = max_{k≤n} k · sup_grid |∫₀ˣφ_k|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem7Report {
    pub reports: Vec<BoundReport>,
    /// Measured `c` for each entry of `reports`.
    pub constants: Vec<f64>,
    /// `c(n_max) ≤ 1.25 c(n_max / 2)`: the primitives decay like `1/k` over
    /// the scanned range.
    pub decay_hypothesis_holds: bool,
}

/// `max_{k≤j} k · sup_grid |∫₀ˣφ_k|` for `j = 1..=n`.
fn primitive_decay_constants(sys: &dyn OrthonormalSystem, n: usize, grid: usize) -> Vec<f64> {
    let sups = (0..=grid)
        .into_par_iter()
        .fold(
            || (vec![0.0f64; n], vec![0.0f64; n]),
            |(mut acc, mut row), j| {
                sys.primitive_row(j as f64 / grid as f64, &mut row);
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a = a.max(r.abs());
                }
                (acc, row)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![0.0f64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x = x.max(*y);
                }
                a
            },
        );
    let mut running = 0.0f64;
    sups.iter()
        .enumerate()
        .map(|(k, s)| {
            running = running.max((k + 1) as f64 * s);
            running
        })
        .collect()
}

pub fn theorem7_check(
    sys: &dyn OrthonormalSystem,
    a: &CoefficientSeq,
    cfg: &ExperimentConfig,
) -> Result<Theorem7Report> {
    cfg.validate()?;
    let label = sys.label();
    if label != "trig" && label != "walsh" {
        log::warn!(
            "the 1/k primitive decay is only established for trig and walsh, running on {label}"
        );
    }
    let n_max = cfg.max_n();
    a.head(n_max)?;
    if cfg.n_values.contains(&1) {
        return Err(Error::invalid("M_n needs n >= 2"));
    }
    let c = primitive_decay_constants(sys, n_max, cfg.grid_resolution);
    let values: Vec<f64> = cfg
        .n_values
        .par_iter()
        .map(|&n| mn_value(&a.values()[..n], sys))
        .collect();
    let mut reports = Vec::with_capacity(values.len());
    let mut constants = Vec::with_capacity(values.len());
    for (&n, value) in cfg.n_values.iter().zip(values) {
        let cn = c[n - 1];
        let harmonic = compensated_sum((1..=n).map(|k| 1.0 / (k * k) as f64)).sqrt();
        let bound = cn * lp_norm(&a.values()[..n], 2.0)? * harmonic;
        reports.push(BoundReport::new(n, value, bound));
        constants.push(cn);
    }
    let half = (n_max / 2).max(1);
    let decay_hypothesis_holds = c[n_max - 1] <= 1.25 * c[half - 1];
    if !decay_hypothesis_holds {
        log::warn!(
            "primitive decay constant grows: c({n_max}) = {:e}, c({half}) = {:e}",
            c[n_max - 1],
            c[half - 1]
        );
    }
    Ok(Theorem7Report {
        reports,
        constants,
        decay_hypothesis_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem8Report {
    /// `V_n ≤ |a_1|(n−1)/(2n) + Σ_{m<p} 2^{−m/2} max_{k∈level m} |a_k|` at `n = 2^p`.
    pub reports: Vec<BoundReport>,
    /// Level sum against `(Σ_{2≤k≤n} a_k²)^{1/2} (Σ_{m≤p} 2^{−m})^{1/2}`.
    pub closing: Vec<BoundReport>,
}

/// Haar at `n = 2^p`, `p = 1..=p_max`.
///
/// Level `m` (indices `2^m + 1 ..= 2^{m+1}`) has disjoint supports and
/// primitives bounded by `2^{−m/2}/2`, which gives the level sum; `φ_1`
/// contributes exactly `|a_1| (n−1)/(2n)`.
pub fn theorem8_check(
    a: &CoefficientSeq,
    p_max: u32,
    _cfg: &ExperimentConfig,
) -> Result<Theorem8Report> {
    if p_max == 0 || p_max > 24 {
        return Err(Error::invalid(format!(
            "p_max must lie in 1..=24, got {p_max}"
        )));
    }
    a.head(1usize << p_max)?;
    let haar = crate::systems::Haar;
    let mut reports = Vec::new();
    let mut closing = Vec::new();
    for p in 1..=p_max {
        let n = 1usize << p;
        let nf = n as f64;
        let value = mn_value(&a.values()[..n], &haar);
        let mut levels = CompensatedSum::new();
        for m in 0..p {
            let peak = haar_level_range(m)
                .map(|k| a.get(k).abs())
                .fold(0.0, f64::max);
            levels.add(0.5f64.powf(f64::from(m) / 2.0) * peak);
        }
        let level_sum = levels.value();
        let constant = a.get(1).abs() * (nf - 1.0) / (2.0 * nf);
        reports.push(BoundReport::new(n, value, constant + level_sum));
        let geometric = compensated_sum((0..=p).map(|m| 0.5f64.powi(m as i32))).sqrt();
        closing.push(BoundReport::new(
            n,
            level_sum,
            lp_norm(&a.values()[1..n], 2.0)? * geometric,
        ));
    }
    Ok(Theorem8Report { reports, closing })
}

/// `sup_grid |x − Σ_{n≤count} (∫₀ˣφ_n)²|` against the system's analytic tail bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsevalReport {
    pub report: BoundReport,
    /// Smallest deficiency seen; Bessel's inequality makes it nonnegative.
    pub min_deficiency: f64,
}

pub fn parseval_check(
    sys: &dyn OrthonormalSystem,
    count: usize,
    grid: usize,
) -> Result<ParsevalReport> {
    if !sys.is_complete() {
        return Err(Error::invalid(format!("{} is not complete", sys.label())));
    }
    if !grid.is_power_of_two() {
        return Err(Error::invalid(format!(
            "grid must be a power of two, got {grid}"
        )));
    }
    let Some(bound) = sys.parseval_tail_bound(count) else {
        return Err(Error::invalid(format!(
            "no analytic tail bound for {} with {count} terms",
            sys.label()
        )));
    };
    let (sup, min) = (0..=grid)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 / grid as f64;
            let mut acc = CompensatedSum::new();
            for n in 1..=count {
                let (lo, hi) = sys.support(n);
                if x >= lo && x <= hi || sys.primitive(n, hi) != 0.0 {
                    acc.add(sys.primitive_squared(n, x));
                }
            }
            let d = x - acc.value();
            (d.abs(), d)
        })
        .reduce(|| (0.0, f64::INFINITY), |a, b| (a.0.max(b.0), a.1.min(b.1)));
    Ok(ParsevalReport {
        report: BoundReport::new(count, sup, bound),
        min_deficiency: min,
    })
}

/// `max_{n≤N} |C_n(g, Φ) − ½ C_n(f)|` with `g`, `Φ` the doubled function and system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    /// Bound is `10 · quad.abs_tol`.
    pub report: BoundReport,
    /// `max_{n≤N} |∫₀¹ Φ_n|`.
    pub max_mean: f64,
    pub deviations: Vec<f64>,
}

pub fn doubling_identity_check(
    f: &UnitIntervalFn,
    base: SystemRef,
    count: usize,
    quad: &QuadratureConfig,
) -> Result<DoublingReport> {
    if count == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    quad.validate()?;
    let g = doubled_function(f);
    let phi = doubled_system(base.clone());
    let deviations: Vec<Result<f64>> = (1..=count)
        .into_par_iter()
        .map(|n| {
            let cg = fourier_coefficient(&g, phi.as_ref(), n, quad)?;
            let cf = fourier_coefficient(f, base.as_ref(), n, quad)?;
            Ok((cg - 0.5 * cf).abs())
        })
        .collect();
    let deviations = deviations
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::IntegrationAt {
                index: i + 1,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_mean = (1..=count)
        .map(|n| phi.primitive(n, 1.0).abs())
        .fold(0.0, f64::max);
    let worst = deviations.iter().copied().fold(0.0, f64::max);
    Ok(DoublingReport {
        report: BoundReport::new(count, worst, 10.0 * quad.abs_tol),
        max_mean,
        deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::banach_seed_function;
    use crate::systems::{Haar, Trig, Walsh};
    use std::sync::Arc;

    fn cfg(ns: &[usize]) -> ExperimentConfig {
        ExperimentConfig {
            n_values: ns.to_vec(),
            grid_resolution: 1 << 10,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let c = ExperimentConfig {
            grid_resolution: 1000,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            eps_values: vec![1.0],
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn theorem7_zero_and_unit() {
        let r = theorem7_check(&Trig, &CoefficientSeq::zeros(64), &cfg(&[2, 8, 64])).unwrap();
        assert!(r.reports.iter().all(|b| b.value == 0.0 && b.pass));
        let r = theorem7_check(
            &Walsh,
            &CoefficientSeq::unit(1, 64).unwrap(),
            &cfg(&[2, 8, 64]),
        )
        .unwrap();
        for b in &r.reports {
            let nf = b.n as f64;
            assert!((b.value - (nf - 1.0) / (2.0 * nf)).abs() < 1e-15);
            assert!(b.pass);
        }
        assert!(r.decay_hypothesis_holds);
    }

    #[test]
    fn theorem8_single_level_zero() {
        // a = e₂: Q(t) = min(t, 1 − t); V_8 = (1/8) Σ_{i=1}^7 min(i/8, 1 − i/8) = 2/8.
        let r = theorem8_check(
            &CoefficientSeq::unit(2, 8).unwrap(),
            3,
            &ExperimentConfig::default(),
        )
        .unwrap();
        let last = r.reports.last().unwrap();
        assert_eq!(last.n, 8);
        assert!((last.value - 0.25).abs() < 1e-15);
        assert_eq!(last.bound, 1.0);
        assert!(r.reports.iter().chain(&r.closing).all(|b| b.pass));
    }

    #[test]
    fn parseval_haar_and_walsh_agree() {
        let h = parseval_check(&Haar, 64, 1 << 10).unwrap();
        let w = parseval_check(&Walsh, 64, 1 << 10).unwrap();
        assert!(h.report.pass && w.report.pass);
        assert!(h.min_deficiency >= 0.0);
        assert!((h.report.value - 1.0 / 256.0).abs() < 1e-15);
        assert!((h.report.value - w.report.value).abs() < 1e-15);
        assert!(parseval_check(&Trig, 64, 1 << 10).is_err());
    }

    #[test]
    fn doubling_zero_and_seed() {
        let q = QuadratureConfig::default();
        let z =
            doubling_identity_check(&UnitIntervalFn::constant(0.0), Arc::new(Haar), 8, &q).unwrap();
        assert_eq!(z.report.value, 0.0);
        let r = doubling_identity_check(&banach_seed_function(), Arc::new(Haar), 16, &q).unwrap();
        assert!(r.report.pass, "{:?}", r.report);
        assert!(r.max_mean <= 1e-12);
    }
}
