//! Seeded experiment drivers: rearranged partial sums, coefficient decay and `M_n` scans.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::function::UnitIntervalFn;
use crate::functionals::{coefficients, mn_value};
use crate::quadrature::QuadratureConfig;
use crate::sequence::{decay_sum, CoefficientSeq, EpsilonParams};
use crate::sum::CompensatedSum;
use crate::systems::OrthonormalSystem;

/// How the terms of a series are rearranged in each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum PermutationModel {
    /// Shuffle only within the blocks `{1}`, `(2^j, 2^{j+1}]`.
    #[default]
    DyadicBlock,
    /// Uniform permutation of all indices.
    Uniform,
}

impl PermutationModel {
    fn permutation(self, len: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut idx: Vec<usize> = (1..=len).collect();
        match self {
            PermutationModel::Uniform => idx.shuffle(rng),
            PermutationModel::DyadicBlock => {
                let mut lo = 1;
                while lo < len {
                    let hi = (2 * lo).min(len);
                    idx[lo..hi].shuffle(rng);
                    lo = hi;
                }
            }
        }
        idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MrRow {
    pub trial: usize,
    pub n: usize,
    /// `max_x max_{n≤m≤2n} |S_m(x) − S_n(x)|`.
    pub osc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MrReport {
    /// `Σ |a_k|^{2−ε}` over the whole sequence.
    pub decay_sum: f64,
    pub model: PermutationModel,
    /// Ordered by trial, then by `n` as listed in the config.
    pub rows: Vec<MrRow>,
    /// `(n, median over trials of osc(n))`.
    pub medians: Vec<(usize, f64)>,
}

/// Tail oscillation of randomly rearranged, randomly signed partial sums
/// `S_m(x) = Σ_{j≤m} σ_j a_{π(j)} φ_{π(j)}(x)` at the midpoints of the grid.
///
/// Trial `t` draws from ChaCha8 seeded with `cfg.seed` on stream `t`, so each
/// trial is independent of how trials are scheduled.
pub fn mr_convergence_experiment(
    a: &CoefficientSeq,
    eps: &EpsilonParams,
    sys: &dyn OrthonormalSystem,
    cfg: &ExperimentConfig,
    model: PermutationModel,
) -> Result<MrReport> {
    cfg.validate()?;
    let len = a.len();
    let needed = 2 * cfg.max_n();
    if needed > len {
        return Err(Error::invalid(format!(
            "osc(n) looks up to 2n = {needed} terms, the sequence has {len}"
        )));
    }
    let decay = decay_sum(a, eps, len)?;
    let grid = cfg.grid_resolution;
    let xs: Vec<f64> = (0..grid).map(|j| (j as f64 + 0.5) / grid as f64).collect();

    let per_trial: Vec<Vec<f64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial as u64);
            let perm = model.permutation(len, &mut rng);
            let signed: Vec<(usize, f64)> = perm[..needed]
                .iter()
                .map(|&k| {
                    let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    (k, s * a.get(k))
                })
                .collect();
            let mut osc = vec![0.0f64; cfg.n_values.len()];
            let mut partial = vec![0.0; needed + 1];
            for &x in &xs {
                let mut acc = CompensatedSum::new();
                for (j, &(k, c)) in signed.iter().enumerate() {
                    if c != 0.0 {
                        acc.add(c * sys.eval(k, x));
                    }
                    partial[j + 1] = acc.value();
                }
                for (slot, &n) in osc.iter_mut().zip(&cfg.n_values) {
                    let base = partial[n];
                    let local = partial[n..=2 * n]
                        .iter()
                        .fold(0.0f64, |m, s| m.max((s - base).abs()));
                    *slot = slot.max(local);
                }
            }
            osc
        })
        .collect();

    let mut rows = Vec::with_capacity(cfg.trials * cfg.n_values.len());
    for (trial, osc) in per_trial.iter().enumerate() {
        for (&n, &o) in cfg.n_values.iter().zip(osc) {
            rows.push(MrRow { trial, n, osc: o });
        }
    }
    let medians = cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut v: Vec<f64> = per_trial.iter().map(|o| o[i]).collect();
            (n, median(&mut v))
        })
        .collect();
    Ok(MrReport {
        decay_sum: decay,
        model,
        rows,
        medians,
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Least-squares slope of `log y` against `log x` over the positive pairs.
fn log_slope(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub eps: f64,
    /// `Σ_{k≤n} |C_k|^{2−ε}` for `n = 1..=N`.
    pub partial_sums: Vec<f64>,
    /// Share of the total contributed by the second half, `n > N/2`.
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub coefficients: Vec<f64>,
    pub per_eps: Vec<DecayRow>,
    /// Fitted exponent of `|C_n| ≈ n^s` over the nonzero coefficients.
    pub log_slope: Option<f64>,
}

pub fn decay_experiment(
    f: &UnitIntervalFn,
    sys: &dyn OrthonormalSystem,
    eps_list: &[f64],
    count: usize,
    quad: &QuadratureConfig,
) -> Result<DecayReport> {
    if f.lip_const().is_none() {
        return Err(Error::invalid(format!(
            "function '{}' has no Lipschitz constant",
            f.label()
        )));
    }
    if count == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let params = eps_list
        .iter()
        .map(|&e| EpsilonParams::new(e))
        .collect::<Result<Vec<_>>>()?;
    let c = coefficients(f, sys, count, quad)?;
    let per_eps = params
        .iter()
        .map(|e| {
            let mut acc = CompensatedSum::new();
            let partial_sums: Vec<f64> = c
                .values()
                .iter()
                .map(|v| {
                    acc.add(v.abs().powf(e.p()));
                    acc.value()
                })
                .collect();
            let total = partial_sums[count - 1];
            let tail_fraction = if total == 0.0 {
                0.0
            } else {
                (total - partial_sums[count / 2 - usize::from(count / 2 > 0)]) / total
            };
            DecayRow {
                eps: e.eps(),
                partial_sums,
                tail_fraction,
            }
        })
        .collect();
    let scale = c.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let log_slope = log_slope(
        c.values()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 1e-12 * scale)
            .map(|(k, v)| ((k + 1) as f64, v.abs())),
    );
    Ok(DecayReport {
        coefficients: c.values().to_vec(),
        per_eps,
        log_slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MnScanRow {
    pub n: usize,
    pub value: f64,
    pub running_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MnScan {
    pub rows: Vec<MnScanRow>,
    /// Fitted exponent of `M_n ≈ n^s` over the second half of the scan.
    pub growth_slope: Option<f64>,
}

/// `M_n(a, ε)` over `cfg.n_values` in the given order, with the running maximum.
pub fn mn_scan(
    a: &CoefficientSeq,
    sys: &dyn OrthonormalSystem,
    _eps: &EpsilonParams,
    cfg: &ExperimentConfig,
) -> Result<MnScan> {
    cfg.validate()?;
    if cfg.n_values.contains(&1) {
        return Err(Error::invalid("M_n needs n >= 2"));
    }
    a.head(cfg.max_n())?;
    let values: Vec<f64> = cfg
        .n_values
        .par_iter()
        .map(|&n| mn_value(&a.values()[..n], sys))
        .collect();
    let mut running = 0.0f64;
    let rows: Vec<MnScanRow> = cfg
        .n_values
        .iter()
        .zip(values)
        .map(|(&n, value)| {
            running = running.max(value);
            MnScanRow {
                n,
                value,
                running_max: running,
            }
        })
        .collect();
    let half = rows.len() / 2;
    let growth_slope = log_slope(rows[half..].iter().map(|r| (r.n as f64, r.value)));
    Ok(MnScan { rows, growth_slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{Haar, Trig};

    fn cfg(ns: &[usize], trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            n_values: ns.to_vec(),
            grid_resolution: 1 << 8,
            trials,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn dyadic_blocks_stay_in_place() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = PermutationModel::DyadicBlock.permutation(37, &mut rng);
        for (j, &k) in p.iter().enumerate() {
            let pos = j + 1;
            assert_eq!(
                usize::BITS - (pos - 1).leading_zeros(),
                usize::BITS - (k - 1).leading_zeros()
            );
        }
        let mut sorted = p.clone();
        sorted.sort();
        assert_eq!(sorted, (1..=37).collect::<Vec<_>>());
    }

    #[test]
    fn finite_series_has_no_tail() {
        let eps = EpsilonParams::new(0.5).unwrap();
        let mut v = vec![0.0; 64];
        v[0] = 1.0;
        let a = CoefficientSeq::new("e1", v).unwrap();
        let r = mr_convergence_experiment(
            &a,
            &eps,
            &Haar,
            &cfg(&[1, 4, 16], 3),
            PermutationModel::DyadicBlock,
        )
        .unwrap();
        assert!(r.rows.iter().all(|row| row.osc == 0.0));
        let mut v = vec![0.0; 64];
        v[..8].fill(1.0);
        let a = CoefficientSeq::new("head", v).unwrap();
        let r = mr_convergence_experiment(
            &a,
            &eps,
            &Haar,
            &cfg(&[8, 16], 3),
            PermutationModel::DyadicBlock,
        )
        .unwrap();
        assert!(r.rows.iter().all(|row| row.osc == 0.0));
    }

    #[test]
    fn trials_are_reproducible() {
        let eps = EpsilonParams::new(0.5).unwrap();
        let a = CoefficientSeq::power(1.2, 128);
        let c = cfg(&[8, 32], 4);
        let r1 = mr_convergence_experiment(&a, &eps, &Haar, &c, PermutationModel::Uniform).unwrap();
        let r2 = mr_convergence_experiment(&a, &eps, &Haar, &c, PermutationModel::Uniform).unwrap();
        assert_eq!(r1, r2);
        let other = ExperimentConfig { seed: 8, ..c };
        let r3 =
            mr_convergence_experiment(&a, &eps, &Haar, &other, PermutationModel::Uniform).unwrap();
        assert_ne!(r1.rows, r3.rows);
    }

    #[test]
    fn decay_trivial_cases() {
        let q = QuadratureConfig::default();
        let one = UnitIntervalFn::constant(1.0);
        let r = decay_experiment(&one, &Trig, &[0.5], 16, &q).unwrap();
        assert!(r.per_eps[0].partial_sums.iter().all(|s| s.abs() < 1e-20));

        let phi5 = UnitIntervalFn::new("phi5", |x| Trig.eval(5, x))
            .with_lip_const(6.0 * std::f64::consts::PI * 2f64.sqrt());
        let r = decay_experiment(&phi5, &Trig, &[0.25, 0.5, 0.75], 12, &q).unwrap();
        for row in &r.per_eps {
            assert!((row.partial_sums[11] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn haar_coefficients_of_identity_decay() {
        // C_n(x) = −2^{−3m/2}/4 at level m.
        let r = decay_experiment(
            &UnitIntervalFn::linear(),
            &Haar,
            &[0.5],
            64,
            &QuadratureConfig::default(),
        )
        .unwrap();
        for (k, c) in r.coefficients.iter().enumerate().skip(1) {
            let m = usize::BITS - 1 - k.leading_zeros();
            assert!(
                (c.abs() - 0.25 * 0.5f64.powf(1.5 * f64::from(m))).abs() < 1e-12,
                "k={}",
                k + 1
            );
        }
        let s = r.log_slope.unwrap();
        assert!(s < -1.0 && s > -2.0, "{s}");
    }

    #[test]
    fn mn_scan_haar_unit() {
        let eps = EpsilonParams::new(0.5).unwrap();
        let r = mn_scan(
            &CoefficientSeq::unit(1, 256).unwrap(),
            &Haar,
            &eps,
            &cfg(&[2, 4, 16, 256], 1),
        )
        .unwrap();
        for row in &r.rows {
            let nf = row.n as f64;
            assert!((row.value - (nf - 1.0) / (2.0 * nf)).abs() < 1e-15);
        }
        assert_eq!(
            r.rows.last().unwrap().running_max,
            r.rows.last().unwrap().value
        );
        let z = mn_scan(&CoefficientSeq::zeros(16), &Trig, &eps, &cfg(&[2, 16], 1)).unwrap();
        assert!(z.rows.iter().all(|row| row.value == 0.0));
    }
}
