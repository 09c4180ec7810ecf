//! One line per acceptance criterion, at the tolerances the toolkit promises.

use std::sync::Arc;
use std::time::{Duration, Instant};

use onskit_core::constructions::{
    certify_selection, extremal_function, h_decomposition, subsystem_select, weighted_mn,
    SubsystemConfig,
};
use onskit_core::functionals::{abel_decomposition, mn_functional};
use onskit_core::systems::{doubled_system, gram_deviation, Haar, Rademacher, Trig, Walsh};
use onskit_core::verifiers::{
    doubling_identity_check, mr_convergence_experiment, parseval_check, theorem7_check,
    theorem8_check, ExperimentConfig, PermutationModel,
};
use onskit_core::{
    banach_seed_function, CoefficientSeq, EpsilonParams, OrthonormalSystem, QuadratureConfig,
    UnitIntervalFn, WeightSeq,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn line(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {id:>2} {verdict} {name}: {detail} [{:.2}s]",
        elapsed.as_secs_f64()
    );
}

fn random_function(rng: &mut ChaCha8Rng) -> UnitIntervalFn {
    match rng.random_range(0..4) {
        0 => banach_seed_function(),
        1 => UnitIntervalFn::linear(),
        2 => {
            let knots = rng.random_range(2..7);
            let mut xs: Vec<f64> = (0..knots).map(|_| rng.random_range(0.02..0.98)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            xs.insert(0, 0.0);
            xs.push(1.0);
            let ys = xs.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            UnitIntervalFn::piecewise_linear("random-pl", xs, ys, None).unwrap()
        }
        _ => {
            let w: f64 = rng.random_range(1.0..6.0);
            UnitIntervalFn::new("sin-mix", move |x: f64| (w * x).sin() + x * x)
                .with_lip_const(w + 2.0)
        }
    }
}

fn random_coefficients(rng: &mut ChaCha8Rng, n: usize) -> CoefficientSeq {
    let values = (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
        .collect();
    CoefficientSeq::new("random", values).unwrap()
}

fn pick_system(rng: &mut ChaCha8Rng) -> &'static dyn OrthonormalSystem {
    match rng.random_range(0..3) {
        0 => &Trig,
        1 => &Walsh,
        _ => &Haar,
    }
}

fn c01_orthonormality() -> bool {
    let t = Instant::now();
    let step = [
        gram_deviation(&Haar, 64),
        gram_deviation(&Walsh, 64),
        gram_deviation(&Rademacher, 64),
    ];
    let trig = gram_deviation(&Trig, 64);
    let elapsed = t.elapsed();
    let pass = step.iter().all(|d| *d <= 1e-12) && trig <= 1e-9 && elapsed < Duration::from_secs(5);
    line(
        1,
        "orthonormality of the first 64 functions",
        pass,
        format!(
            "haar {:.1e}, walsh {:.1e}, rademacher {:.1e}, trig {:.1e}",
            step[0], step[1], step[2], trig
        ),
        elapsed,
    );
    pass
}

fn c02_abel_identity() -> bool {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let quad = QuadratureConfig::with_tol(1e-9);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..25 {
        let f = random_function(&mut rng);
        let sys = pick_system(&mut rng);
        let n = rng.random_range(2..=64);
        let a = random_coefficients(&mut rng, n);
        match abel_decomposition(&f, &a, sys, n, &quad) {
            Ok(d) => worst = worst.max(d.residual),
            Err(e) => {
                eprintln!("{} n={n} f={}: {e}", sys.label(), f.label());
                failures += 1;
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = failures == 0 && worst <= 1e-8 && elapsed < Duration::from_secs(30);
    line(
        2,
        "summation-by-parts identity, 25 random cases",
        pass,
        format!("max residual {worst:.2e}, errors {failures}"),
        elapsed,
    );
    pass
}

fn c03_doubling() -> bool {
    let t = Instant::now();
    let phi = doubled_system(Arc::new(Haar));
    let max_mean = (1..=64)
        .map(|n| phi.primitive(n, 1.0).abs())
        .fold(0.0, f64::max);
    let gram = gram_deviation(phi.as_ref(), 64);
    let report = doubling_identity_check(
        &banach_seed_function(),
        Arc::new(Haar),
        64,
        &QuadratureConfig::with_tol(1e-9),
    )
    .unwrap();
    let elapsed = t.elapsed();
    let pass = max_mean <= 1e-12 && gram <= 1e-9 && report.report.value <= 1e-8;
    line(
        3,
        "doubled Haar system and seed function",
        pass,
        format!(
            "max |mean| {max_mean:.1e}, gram {gram:.1e}, max |C(g,Φ) − C(f)/2| {:.2e}",
            report.report.value
        ),
        elapsed,
    );
    pass
}

fn c04_primitive_decay_bound() -> bool {
    let t = Instant::now();
    let a = CoefficientSeq::power(0.75, 2048);
    let cfg = ExperimentConfig {
        n_values: (2..=2048).collect(),
        grid_resolution: 1 << 14,
        ..Default::default()
    };
    let mut pass = true;
    let mut detail = Vec::new();
    for sys in [&Trig as &dyn OrthonormalSystem, &Walsh] {
        let r = theorem7_check(sys, &a, &cfg).unwrap();
        let all = r.reports.iter().all(|b| b.pass);
        let worst = r.reports.iter().map(|b| b.ratio).fold(0.0, f64::max);
        pass &= all && r.decay_hypothesis_holds;
        detail.push(format!(
            "{}: max ratio {worst:.3}, c {:.3}",
            sys.label(),
            r.constants.last().unwrap()
        ));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    line(
        4,
        "M_n ≤ c‖a‖₂(Σk⁻²)^½ for n ≤ 2048",
        pass,
        detail.join("; "),
        elapsed,
    );
    pass
}

fn c05_haar_level_bound() -> bool {
    let t = Instant::now();
    let a = CoefficientSeq::power(0.75, 1 << 12);
    let r = theorem8_check(&a, 12, &ExperimentConfig::default()).unwrap();
    let levels = r.reports.iter().all(|b| b.pass);
    let closing = r.closing.iter().all(|b| b.pass);
    let eps = EpsilonParams::new(0.5).unwrap();
    let mut spot = 0.0f64;
    for p in 1..=12 {
        let n = 1usize << p;
        let v = mn_functional(&CoefficientSeq::unit(1, n).unwrap(), &Haar, n, &eps).unwrap();
        spot = spot.max((v - (n as f64 - 1.0) / (2.0 * n as f64)).abs());
    }
    let elapsed = t.elapsed();
    let worst = r.reports.iter().map(|b| b.ratio).fold(0.0, f64::max);
    let pass = levels && closing && spot <= 1e-15;
    line(
        5,
        "Haar levelwise bound, n = 2^p, p ≤ 12",
        pass,
        format!("max ratio {worst:.3}, closing bound {closing}, |M_n(e₁) − (n−1)/2n| ≤ {spot:.1e}"),
        elapsed,
    );
    pass
}

fn c06_extremal_construction() -> bool {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let quad = QuadratureConfig::with_tol(1e-9);
    let eps = EpsilonParams::new(0.5).unwrap();
    let grid = 1 << 12;
    let (mut sup, mut lip, mut residual, mut fdev) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for case in 0..25 {
        let sys = pick_system(&mut rng);
        let n = rng.random_range(2..=64);
        let b = random_coefficients(&mut rng, n);
        let outcome = extremal_function(&b, sys, n, &eps).and_then(|p| {
            let h = h_decomposition(&p, &b, sys, n, &quad)?;
            Ok((p, h))
        });
        let (p, h) = match outcome {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("case {case} ({}, n={n}): {e}", sys.label()));
                continue;
            }
        };
        let values: Vec<f64> = (0..=grid).map(|j| p.eval(j as f64 / grid as f64)).collect();
        sup = values.iter().fold(sup, |m, v| m.max(v.abs()));
        lip = values
            .windows(2)
            .fold(lip, |m, w| m.max((w[1] - w[0]).abs() * grid as f64));
        residual = residual.max(h.terms.residual);
        fdev = fdev.max(h.f_identity_deviation);
        if !(h.h1_bound_holds && h.h2_bound_holds && h.e_bound_holds) {
            failures.push(format!(
                "case {case} ({}, n={n}): bound flags {:?}",
                sys.label(),
                (h.h1_bound_holds, h.h2_bound_holds, h.e_bound_holds)
            ));
        }
    }
    let elapsed = t.elapsed();
    for f in &failures {
        eprintln!("{f}");
    }
    let pass =
        failures.is_empty() && sup <= 1.0 && lip <= 1.0 + 1e-9 && residual <= 1e-8 && fdev <= 1e-10;
    line(
        6,
        "extremal function, 25 random cases",
        pass,
        format!("‖g‖ {sup:.3}, lip {lip:.6}, residual {residual:.1e}, F-identity {fdev:.1e}, failures {}", failures.len()),
        elapsed,
    );
    pass
}

fn c07_subsystem() -> bool {
    let t = Instant::now();
    let k = 6;
    let d = WeightSeq::sqrt(k);
    let sel = subsystem_select(&Haar, &d, k, &SubsystemConfig::default()).unwrap();
    let cert = certify_selection(&sel, &Haar, 16).unwrap();
    let eps = EpsilonParams::new(0.5).unwrap();
    let a = CoefficientSeq::power(1.0, k);
    // weighted_mn uses one selected index per coefficient, so n is capped by K.
    let mut weighted = true;
    let mut worst = 0.0f64;
    for n in 2..=k {
        let w = weighted_mn(&a, &d, &sel, &Haar, n, &eps).unwrap();
        weighted &= w.value <= w.proof_bound;
        worst = worst.max(w.value / w.proof_bound);
    }
    let elapsed = t.elapsed();
    let increasing = sel.indices.windows(2).all(|w| w[0] < w[1]);
    let pass = cert.pass && increasing && weighted;
    line(
        7,
        "Haar subsystem with d_k = √k, K = 6",
        pass,
        format!(
            "indices {:?}, certified on 2^16: {}, weighted M_n / bound ≤ {worst:.3} (n ≤ {k})",
            sel.indices, cert.pass
        ),
        elapsed,
    );
    pass
}

fn c08_parseval() -> bool {
    let t = Instant::now();
    let r = parseval_check(&Haar, 1 << 12, 1 << 14).unwrap();
    let elapsed = t.elapsed();
    let pass = r.min_deficiency >= 0.0 && r.report.value <= 0.5f64.powi(13);
    line(
        8,
        "Haar Parseval deficiency, N = 2^12",
        pass,
        format!(
            "sup {:.3e} (bound {:.3e}), min {:.1e}",
            r.report.value,
            0.5f64.powi(13),
            r.min_deficiency
        ),
        elapsed,
    );
    pass
}

fn c09_rearranged_partial_sums() -> bool {
    let t = Instant::now();
    let a = CoefficientSeq::power(1.2, 2048);
    let eps = EpsilonParams::new(0.5).unwrap();
    let cfg = ExperimentConfig {
        n_values: vec![64, 1024],
        trials: 20,
        seed: 9,
        grid_resolution: 1 << 10,
        ..Default::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                mr_convergence_experiment(&a, &eps, &Haar, &cfg, PermutationModel::DyadicBlock)
                    .unwrap()
            })
    };
    let one = run(1);
    let four = run(4);
    let same = one
        .rows
        .iter()
        .zip(&four.rows)
        .all(|(x, y)| x.osc.to_bits() == y.osc.to_bits())
        && one.rows.len() == four.rows.len();
    let (m64, m1024) = (one.medians[0].1, one.medians[1].1);
    let elapsed = t.elapsed();
    let pass = m1024 < m64 && same;
    line(
        9,
        "median tail oscillation, 20 seeded trials",
        pass,
        format!("osc(64) {m64:.4e}, osc(1024) {m1024:.4e}, identical across 1/4 threads: {same}"),
        elapsed,
    );
    pass
}

fn main() {
    let criteria: [(u32, fn() -> bool); 9] = [
        (1, c01_orthonormality),
        (2, c02_abel_identity),
        (3, c03_doubling),
        (4, c04_primitive_decay_bound),
        (5, c05_haar_level_bound),
        (6, c06_extremal_construction),
        (7, c07_subsystem),
        (8, c08_parseval),
        (9, c09_rearranged_partial_sums),
    ];
    let mut failed = Vec::new();
    for (id, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(true) => {}
            Ok(false) => failed.push(id),
            Err(_) => {
                println!("criterion {id:>2} FAIL (panicked)");
                failed.push(id);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
