//! Subcommand execution: library calls in, tables and a JSON summary out.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use onskit_core::constructions::{
    certify_selection, extremal_function, h_decomposition, subsystem_select, weighted_mn,
    SubsystemConfig,
};
use onskit_core::functionals::{abel_decomposition, coefficients, mn_values};
use onskit_core::verifiers::{
    decay_experiment, doubling_identity_check, mn_scan, mr_convergence_experiment, parseval_check,
    theorem7_check, theorem8_check, ExperimentConfig, PermutationModel,
};
use onskit_core::{
    system_by_name, BoundReport, EpsilonParams, QuadScheme, QuadratureConfig, SystemRef,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{fmt_f64, Outputs, Table};
use crate::specs::{parse_floats, parse_function, parse_index_list, parse_sequence, parse_weights};

impl Command {
    /// Space-separated subcommand path, e.g. `verify t7`.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs(_) => "coeffs",
            Command::Mn(_) => "mn",
            Command::Decomp(_) => "decomp",
            Command::Extremal(_) => "extremal",
            Command::Subsystem(_) => "subsystem",
            Command::Verify(VerifyCommand::T7(_)) => "verify t7",
            Command::Verify(VerifyCommand::T8(_)) => "verify t8",
            Command::Verify(VerifyCommand::Parseval(_)) => "verify parseval",
            Command::Verify(VerifyCommand::Doubling(_)) => "verify doubling",
            Command::Experiment(ExperimentCommand::Mr(_)) => "experiment mr",
            Command::Experiment(ExperimentCommand::Decay(_)) => "experiment decay",
            Command::Experiment(ExperimentCommand::Mnscan(_)) => "experiment mnscan",
        }
    }

    pub fn stem(&self) -> String {
        self.name().replace(' ', "-")
    }

    pub fn parameters(&self) -> Result<BTreeMap<String, Value>> {
        let v = match self {
            Command::Coeffs(a) => to_value(a),
            Command::Mn(a) => to_value(a),
            Command::Decomp(a) => to_value(a),
            Command::Extremal(a) => to_value(a),
            Command::Subsystem(a) => to_value(a),
            Command::Verify(VerifyCommand::T7(a)) => to_value(a),
            Command::Verify(VerifyCommand::T8(a)) => to_value(a),
            Command::Verify(VerifyCommand::Parseval(a)) => to_value(a),
            Command::Verify(VerifyCommand::Doubling(a)) => to_value(a),
            Command::Experiment(ExperimentCommand::Mr(a)) => to_value(a),
            Command::Experiment(ExperimentCommand::Decay(a)) => to_value(a),
            Command::Experiment(ExperimentCommand::Mnscan(a)) => to_value(a),
        }?;
        match v {
            Value::Object(m) => Ok(m.into_iter().collect()),
            _ => unreachable!("argument structs serialize to objects"),
        }
    }

    /// Rebuild a command from its name and a full parameter map.
    pub fn from_parameters(name: &str, params: BTreeMap<String, Value>) -> Result<Command> {
        let v = Value::Object(params.into_iter().collect());
        let cmd = match name {
            "coeffs" => Command::Coeffs(from_value(v)?),
            "mn" => Command::Mn(from_value(v)?),
            "decomp" => Command::Decomp(from_value(v)?),
            "extremal" => Command::Extremal(from_value(v)?),
            "subsystem" => Command::Subsystem(from_value(v)?),
            "verify t7" => Command::Verify(VerifyCommand::T7(from_value(v)?)),
            "verify t8" => Command::Verify(VerifyCommand::T8(from_value(v)?)),
            "verify parseval" => Command::Verify(VerifyCommand::Parseval(from_value(v)?)),
            "verify doubling" => Command::Verify(VerifyCommand::Doubling(from_value(v)?)),
            "experiment mr" => Command::Experiment(ExperimentCommand::Mr(from_value(v)?)),
            "experiment decay" => Command::Experiment(ExperimentCommand::Decay(from_value(v)?)),
            "experiment mnscan" => Command::Experiment(ExperimentCommand::Mnscan(from_value(v)?)),
            other => bail!("--config: unknown command '{other}'"),
        };
        Ok(cmd)
    }

    pub fn execute(&self) -> Result<Outputs> {
        match self {
            Command::Coeffs(a) => run_coeffs(a),
            Command::Mn(a) => run_mn(a),
            Command::Decomp(a) => run_decomp(a),
            Command::Extremal(a) => run_extremal(a),
            Command::Subsystem(a) => run_subsystem(a),
            Command::Verify(VerifyCommand::T7(a)) => run_t7(a),
            Command::Verify(VerifyCommand::T8(a)) => run_t8(a),
            Command::Verify(VerifyCommand::Parseval(a)) => run_parseval(a),
            Command::Verify(VerifyCommand::Doubling(a)) => run_doubling(a),
            Command::Experiment(ExperimentCommand::Mr(a)) => run_mr(a),
            Command::Experiment(ExperimentCommand::Decay(a)) => run_decay(a),
            Command::Experiment(ExperimentCommand::Mnscan(a)) => run_mnscan(a),
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).context("--config: parameters do not match the command")
}

fn system(flag: &str, name: &str) -> Result<SystemRef> {
    system_by_name(name).with_context(|| format!("{flag}: unknown system '{name}'"))
}

fn eps_params(eps: f64) -> Result<EpsilonParams> {
    EpsilonParams::new(eps).context("--eps")
}

fn quad(q: &QuadArgs) -> Result<QuadratureConfig> {
    let scheme = match q.scheme {
        Scheme::Adaptive => QuadScheme::AdaptiveBisection,
        Scheme::Fixed => QuadScheme::FixedPanel { panels: q.panels },
        Scheme::Exact => QuadScheme::ExactDyadic,
    };
    let cfg = QuadratureConfig {
        abs_tol: q.tol,
        scheme,
        ..QuadratureConfig::default()
    };
    cfg.validate().context("--tol/--scheme")?;
    Ok(cfg)
}

fn f(v: f64) -> String {
    fmt_f64(v)
}

fn bound_row(r: &BoundReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        f(r.value),
        f(r.bound),
        f(r.ratio),
        r.pass.to_string(),
    ]
}

const BOUND_HEADER: [&str; 5] = ["n", "value", "bound", "ratio", "pass"];

fn with_bound_header(extra: &[&'static str]) -> Vec<&'static str> {
    BOUND_HEADER
        .iter()
        .copied()
        .chain(extra.iter().copied())
        .collect()
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run_coeffs(a: &CoeffsArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let func = parse_function(&a.function)?;
    if a.count == 0 {
        bail!("--N must be at least 1");
    }
    let c = coefficients(&func, sys.as_ref(), a.count, &quad(&a.quad)?)?;
    let mut t = Table::new("", &["n", "coefficient"]);
    for (k, v) in c.values().iter().enumerate() {
        t.push(vec![(k + 1).to_string(), f(*v)]);
    }
    let l2 = c.lp_norm(2.0)?;
    Ok(Outputs {
        tables: vec![t],
        summary: json!({ "system": sys.label(), "function": func.label(), "N": a.count, "l2_norm": l2 }),
        headline: format!(
            "{} coefficients of {} on {}, l2 norm {}",
            a.count,
            func.label(),
            sys.label(),
            f(l2)
        ),
    })
}

fn run_mn(a: &MnArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let ns = parse_index_list("--n", &a.n)?;
    if let Some(bad) = ns.iter().find(|&&n| n < 2) {
        bail!("--n: M_n needs n >= 2, got {bad}");
    }
    eps_params(a.eps)?;
    let len = *ns.iter().max().unwrap();
    let seq = parse_sequence(&a.seq, len)?;
    let values = mn_values(&seq, sys.as_ref(), &ns)?;
    let mut t = Table::new("", &["n", "value"]);
    for (n, v) in ns.iter().zip(&values) {
        t.push(vec![n.to_string(), f(*v)]);
    }
    Ok(Outputs {
        tables: vec![t],
        summary: json!({ "system": sys.label(), "sequence": seq.label(), "eps": a.eps, "n": ns, "values": values }),
        headline: format!(
            "M_n({}, {}) at {} n values, last {}",
            seq.label(),
            sys.label(),
            ns.len(),
            f(*values.last().unwrap())
        ),
    })
}

fn run_decomp(a: &DecompArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let func = parse_function(&a.function)?;
    let seq = parse_sequence(&a.seq, a.n)?;
    let d = abel_decomposition(&func, &seq, sys.as_ref(), a.n, &quad(&a.quad)?)?;
    let mut t = Table::new("", &["n", "i1", "i2", "i3", "total", "residual"]);
    t.push(vec![
        a.n.to_string(),
        f(d.i1),
        f(d.i2),
        f(d.i3),
        f(d.total),
        f(d.residual),
    ]);
    Ok(Outputs {
        tables: vec![t],
        summary: json!({ "system": sys.label(), "function": func.label(), "sequence": seq.label(), "n": a.n, "terms": d }),
        headline: format!(
            "I1 + I2 + I3 = {}, direct {}, residual {}",
            f(d.sum()),
            f(d.total),
            f(d.residual)
        ),
    })
}

fn run_extremal(a: &ExtremalArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let eps = eps_params(a.eps)?;
    let seq = parse_sequence(&a.seq, a.n)?;
    let profile = extremal_function(&seq, sys.as_ref(), a.n, &eps)?;
    let h = h_decomposition(&profile, &seq, sys.as_ref(), a.n, &quad(&a.quad)?)?;
    let mut t = Table::new("", &["i", "x", "q", "g", "set"]);
    for i in 0..=a.n {
        let set = if h.e_set.contains(&i) {
            "E"
        } else if h.f_set.contains(&i) {
            "F"
        } else {
            "-"
        };
        let x = i as f64 / a.n as f64;
        t.push(vec![
            i.to_string(),
            f(x),
            f(profile.grid_primitives[i]),
            f(profile.eval(x)),
            set.into(),
        ]);
    }
    let mut pieces = Table::new("pieces", &["start", "end", "slope"]);
    for (w, s) in profile.breakpoints.windows(2).zip(&profile.piece_signs) {
        pieces.push(vec![f(w[0]), f(w[1]), s.to_string()]);
    }
    let ok = h.h1_bound_holds && h.h2_bound_holds && h.e_bound_holds;
    Ok(Outputs {
        tables: vec![t, pieces],
        summary: json!({
            "system": sys.label(),
            "sequence": seq.label(),
            "n": a.n,
            "zeros": profile.zeros,
            "samples": profile.samples,
            "decomposition": h,
            "bounds_hold": ok,
        }),
        headline: format!(
            "g_n with {} pieces, |E| = {}, |F| = {}, bounds {}",
            profile.piece_signs.len(),
            h.e_set.len(),
            h.f_set.len(),
            verdict(ok)
        ),
    })
}

fn run_subsystem(a: &SubsystemArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let eps = eps_params(a.eps)?;
    let d = parse_weights(&a.weights, a.k_max)?;
    let cfg = SubsystemConfig {
        grid_log2: a.grid_log2,
        max_index: a.max_index,
    };
    let sel = subsystem_select(sys.as_ref(), &d, a.k_max, &cfg)?;
    let cert = certify_selection(&sel, sys.as_ref(), a.certify_log2)?;
    let coeffs = parse_sequence(&a.seq, a.k_max)?;
    let mut t = Table::new(
        "",
        &[
            "k",
            "index",
            "weight",
            "tail_bound",
            "primitive_sup",
            "tail_target",
            "primitive_target",
            "certified_tail_sup",
            "certified_primitive_sup",
            "pass",
            "weighted_mn",
            "proof_bound",
        ],
    );
    for (i, c) in cert.per_k.iter().enumerate() {
        let (wmn, pb) = if c.k >= 2 {
            let w = weighted_mn(&coeffs, &d, &sel, sys.as_ref(), c.k, &eps)?;
            (f(w.value), f(w.proof_bound))
        } else {
            (String::new(), String::new())
        };
        t.push(vec![
            c.k.to_string(),
            c.index.to_string(),
            f(d.get(c.k)),
            f(sel.tail_bounds[i]),
            f(sel.primitive_sups[i]),
            f(c.tail_target),
            f(c.primitive_target),
            f(c.tail_sup),
            f(c.primitive_sup),
            c.pass.to_string(),
            wmn,
            pb,
        ]);
    }
    Ok(Outputs {
        tables: vec![t],
        summary: json!({
            "system": sys.label(),
            "indices": sel.indices,
            "grid_log2": a.grid_log2,
            "certify_log2": a.certify_log2,
            "certified": cert.pass,
        }),
        headline: format!(
            "indices {:?}, certified on 2^{}: {}",
            sel.indices,
            a.certify_log2,
            verdict(cert.pass)
        ),
    })
}

fn run_t7(a: &T7Args) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let ns = parse_index_list("--n", &a.n)?;
    let seq = parse_sequence(&a.seq, *ns.iter().max().unwrap())?;
    let cfg = ExperimentConfig {
        n_values: ns,
        grid_resolution: a.grid,
        ..ExperimentConfig::default()
    };
    let r = theorem7_check(sys.as_ref(), &seq, &cfg)?;
    let mut t = Table::new("", &with_bound_header(&["c"]));
    for (b, c) in r.reports.iter().zip(&r.constants) {
        let mut row = bound_row(b);
        row.push(f(*c));
        t.push(row);
    }
    let pass = r.reports.iter().all(|b| b.pass);
    Ok(Outputs {
        tables: vec![t],
        summary: json!({
            "system": sys.label(),
            "sequence": seq.label(),
            "all_pass": pass,
            "decay_hypothesis_holds": r.decay_hypothesis_holds,
            "max_ratio": r.reports.iter().map(|b| b.ratio).fold(0.0, f64::max),
        }),
        headline: format!(
            "{} reports {}, primitive decay hypothesis {}",
            r.reports.len(),
            verdict(pass),
            verdict(r.decay_hypothesis_holds)
        ),
    })
}

fn run_t8(a: &T8Args) -> Result<Outputs> {
    if a.p_max == 0 || a.p_max > 24 {
        bail!("--p-max must lie in 1..=24");
    }
    let seq = parse_sequence(&a.seq, 1usize << a.p_max)?;
    let r = theorem8_check(&seq, a.p_max, &ExperimentConfig::default())?;
    let mut t = Table::new(
        "",
        &with_bound_header(&["level_sum", "closing_bound", "closing_pass"]),
    );
    for (b, c) in r.reports.iter().zip(&r.closing) {
        let mut row = bound_row(b);
        row.extend([f(c.value), f(c.bound), c.pass.to_string()]);
        t.push(row);
    }
    let pass = r.reports.iter().chain(&r.closing).all(|b| b.pass);
    Ok(Outputs {
        tables: vec![t],
        summary: json!({ "sequence": seq.label(), "p_max": a.p_max, "all_pass": pass }),
        headline: format!(
            "Haar levelwise bound for p <= {}: {}",
            a.p_max,
            verdict(pass)
        ),
    })
}

fn run_parseval(a: &ParsevalArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let r = parseval_check(sys.as_ref(), a.count, a.grid)?;
    let mut t = Table::new("", &with_bound_header(&["min_deficiency"]));
    let mut row = bound_row(&r.report);
    row.push(f(r.min_deficiency));
    t.push(row);
    let pass = r.report.pass && r.min_deficiency >= 0.0;
    Ok(Outputs {
        tables: vec![t],
        summary: json!({ "system": sys.label(), "N": a.count, "grid": a.grid, "report": r.report, "min_deficiency": r.min_deficiency, "pass": pass }),
        headline: format!(
            "sup deficiency {} vs bound {}: {}",
            f(r.report.value),
            f(r.report.bound),
            verdict(pass)
        ),
    })
}

fn run_doubling(a: &DoublingArgs) -> Result<Outputs> {
    let base = system("--base", &a.base)?;
    let func = parse_function(&a.function)?;
    let r = doubling_identity_check(&func, base.clone(), a.count, &quad(&a.quad)?)?;
    let mut t = Table::new("", &["n", "deviation"]);
    for (k, d) in r.deviations.iter().enumerate() {
        t.push(vec![(k + 1).to_string(), f(*d)]);
    }
    let pass = r.report.pass && r.max_mean <= 1e-12;
    Ok(Outputs {
        tables: vec![t],
        summary: json!({
            "base": base.label(),
            "function": func.label(),
            "N": a.count,
            "report": r.report,
            "max_mean": r.max_mean,
            "pass": pass,
        }),
        headline: format!(
            "max |C_n(g,Φ) − C_n(f)/2| = {} (bound {}): {}",
            f(r.report.value),
            f(r.report.bound),
            verdict(pass)
        ),
    })
}

fn run_mr(a: &MrArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let eps = eps_params(a.eps)?;
    let ns = parse_index_list("--n", &a.n)?;
    let len = a.len.unwrap_or(2 * ns.iter().max().unwrap());
    let seq = parse_sequence(&a.seq, len)?;
    let cfg = ExperimentConfig {
        n_values: ns,
        eps_values: vec![a.eps],
        seed: a.seed,
        grid_resolution: a.grid,
        trials: a.trials,
        parallelism_hint: rayon::current_num_threads(),
    };
    let model = match a.model {
        Model::Dyadic => PermutationModel::DyadicBlock,
        Model::Uniform => PermutationModel::Uniform,
    };
    let r = mr_convergence_experiment(&seq, &eps, sys.as_ref(), &cfg, model)?;
    let mut t = Table::new("", &["trial", "n", "osc"]);
    for row in &r.rows {
        t.push(vec![row.trial.to_string(), row.n.to_string(), f(row.osc)]);
    }
    let mut m = Table::new("median", &["n", "median_osc"]);
    for (n, v) in &r.medians {
        m.push(vec![n.to_string(), f(*v)]);
    }
    let medians: Vec<String> = r
        .medians
        .iter()
        .map(|(n, v)| format!("osc({n}) = {}", f(*v)))
        .collect();
    Ok(Outputs {
        tables: vec![t, m],
        summary: json!({
            "system": sys.label(),
            "sequence": seq.label(),
            "decay_sum": r.decay_sum,
            "model": r.model,
            "trials": a.trials,
            "seed": a.seed,
            "medians": r.medians,
        }),
        headline: format!("median {}", medians.join(", ")),
    })
}

fn run_decay(a: &DecayArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let func = parse_function(&a.function)?;
    let eps_list = parse_floats(&a.eps).context("--eps")?;
    for &e in &eps_list {
        eps_params(e)?;
    }
    let r = decay_experiment(&func, sys.as_ref(), &eps_list, a.count, &quad(&a.quad)?)?;
    let mut t = Table::new("", &["eps", "n", "coefficient", "partial_sum"]);
    for row in &r.per_eps {
        for (k, (c, s)) in r.coefficients.iter().zip(&row.partial_sums).enumerate() {
            t.push(vec![f(row.eps), (k + 1).to_string(), f(*c), f(*s)]);
        }
    }
    let tails: Vec<Value> = r
        .per_eps
        .iter()
        .map(|row| json!({ "eps": row.eps, "total": row.partial_sums.last(), "tail_fraction": row.tail_fraction }))
        .collect();
    Ok(Outputs {
        tables: vec![t],
        summary: json!({ "system": sys.label(), "function": func.label(), "N": a.count, "log_slope": r.log_slope, "per_eps": tails }),
        headline: format!(
            "|C_n| log-slope {}",
            r.log_slope.map(f).unwrap_or_else(|| "n/a".into())
        ),
    })
}

fn run_mnscan(a: &MnScanArgs) -> Result<Outputs> {
    let sys = system("--system", &a.system)?;
    let eps = eps_params(a.eps)?;
    let ns = parse_index_list("--n", &a.n)?;
    let seq = parse_sequence(&a.seq, *ns.iter().max().unwrap())?;
    let cfg = ExperimentConfig {
        n_values: ns,
        eps_values: vec![a.eps],
        ..ExperimentConfig::default()
    };
    let r = mn_scan(&seq, sys.as_ref(), &eps, &cfg)?;
    let mut t = Table::new("", &["n", "value", "running_max"]);
    for row in &r.rows {
        t.push(vec![row.n.to_string(), f(row.value), f(row.running_max)]);
    }
    let last = r.rows.last().expect("nonempty scan");
    Ok(Outputs {
        tables: vec![t],
        summary: json!({ "system": sys.label(), "sequence": seq.label(), "eps": a.eps, "running_max": last.running_max, "growth_slope": r.growth_slope }),
        headline: format!(
            "running max {}, growth slope {}",
            f(last.running_max),
            r.growth_slope.map(f).unwrap_or_else(|| "n/a".into())
        ),
    })
}
