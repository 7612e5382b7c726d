//! Subcommand implementations: translate flags into library calls, render
//! rows, and write outputs plus their manifest sidecars.

use std::fs;
use std::path::Path;

use jscc_core::bounds;
use jscc_core::experiments::{self, EpsPolicy, FitMode};
use jscc_core::{SchemeConfig, SourceSpec, SweepRow};
use serde_json::{json, Map, Value};

use crate::cli::{
    BoundsArgs, Cli, Command, EpsArg, Format, PolicyArg, SimulateArgs, SolveEpsArgs,
    SolvePolicy, SourceArg, SweepArgs,
};
use crate::emit;
use crate::CliError;

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::SolveEps(a) => cmd_solve_eps(a),
    }
}

fn init_workers(workers: Option<usize>) -> Result<(), CliError> {
    if let Some(w) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn source_spec(kind: SourceArg, variance: f64) -> Result<SourceSpec, CliError> {
    let src = match kind {
        SourceArg::Gaussian => SourceSpec::gaussian(variance)?,
        SourceArg::Uniform => SourceSpec::uniform(variance)?,
    };
    Ok(src)
}

/// Apply the power/headroom/tail-constant flags shared by the simulation
/// commands. Changing the headroom re-derives the default tail constant
/// unless one was given explicitly.
fn apply_shared(
    mut cfg: SchemeConfig,
    power: Option<f64>,
    delta: Option<f64>,
    k: Option<f64>,
) -> Result<SchemeConfig, CliError> {
    if let Some(p) = power {
        cfg = cfg.with_power(p)?;
    }
    if let Some(d) = delta {
        cfg = cfg.with_delta(d)?;
        if k.is_none() {
            let k_default = 1.0 / (8.0 * (cfg.sigma_s2 + d));
            cfg = cfg.with_k(k_default)?;
        }
    }
    if let Some(kv) = k {
        cfg = cfg.with_k(kv)?;
    }
    Ok(cfg)
}

fn policy_of(arg: PolicyArg, eps: f64) -> EpsPolicy {
    match arg {
        PolicyArg::Fixed => EpsPolicy::Fixed(eps),
        PolicyArg::Achievability => EpsPolicy::Achievability,
        PolicyArg::Optimal => EpsPolicy::Optimal,
    }
}

fn build_point_config(a: &SimulateArgs, src: &SourceSpec) -> Result<SchemeConfig, CliError> {
    if matches!(a.noise_var, Some(v) if v == 0.0) {
        let beta = a.beta.ok_or_else(|| {
            CliError::Usage("--noise-var 0 needs an explicit --beta for the resolution".into())
        })?;
        if !matches!(a.eps, EpsArg::Fixed(v) if v == 0.0) {
            return Err(CliError::Usage(
                "in noiseless mode --beta sets the resolution; leave --eps at 0".into(),
            ));
        }
        let cfg = SchemeConfig::noiseless(a.n, beta, src)?;
        return apply_shared(cfg, a.power, a.delta, a.k);
    }

    let snr = 10f64.powf(a.snr_db / 10.0);
    let mut cfg = SchemeConfig::new(a.n, snr, src)?;
    if let Some(nv) = a.noise_var {
        cfg = cfg.with_noise_var(nv)?;
    }
    cfg = apply_shared(cfg, a.power, a.delta, a.k)?;
    cfg = match (a.beta, a.eps) {
        (Some(b), _) => cfg.with_beta(b)?,
        (None, EpsArg::Fixed(v)) => cfg.with_epsilon(v)?,
        (None, EpsArg::Auto) => {
            let eps =
                experiments::policy_epsilon(EpsPolicy::Achievability, cfg.snr(), a.n, cfg.k)?;
            cfg.with_epsilon(eps)?
        }
        (None, EpsArg::Optimal) => {
            let eps = experiments::policy_epsilon(EpsPolicy::Optimal, cfg.snr(), a.n, cfg.k)?;
            cfg.with_epsilon(eps)?
        }
    };
    Ok(cfg)
}

fn write_output(
    out: Option<&Path>,
    text: &str,
    command: &str,
    config: Value,
    seed: Option<u64>,
    echo_to_stdout: bool,
) -> Result<(), CliError> {
    if echo_to_stdout || out.is_none() {
        print!("{text}");
    }
    if let Some(path) = out {
        fs::write(path, text)?;
        emit::write_manifest(path, command, config, seed)?;
    }
    Ok(())
}

fn cfg_json(cfg: &SchemeConfig, src: &SourceSpec, samples: Option<u64>) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(cfg.n));
    obj.insert("power".into(), json!(cfg.power));
    obj.insert("noise_var".into(), json!(cfg.noise_var));
    obj.insert("beta".into(), json!(cfg.beta));
    obj.insert("eps".into(), json!(cfg.epsilon));
    obj.insert("delta".into(), json!(cfg.delta));
    obj.insert("k".into(), json!(cfg.k));
    obj.insert("source".into(), json!(format!("{:?}", src.kind).to_lowercase()));
    obj.insert("variance".into(), json!(src.variance));
    if let Some(s) = samples {
        obj.insert("samples".into(), json!(s));
    }
    Value::Object(obj)
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), CliError> {
    init_workers(a.workers)?;
    let src = source_spec(a.source, a.variance)?;
    let cfg = build_point_config(&a, &src)?;
    let row = experiments::run_point(&cfg, &src, a.samples, a.seed)?;
    let text = emit::render_sweep(std::slice::from_ref(&row), cfg.n, a.format);
    write_output(
        a.out.as_deref(),
        &text,
        "simulate",
        cfg_json(&cfg, &src, Some(a.samples)),
        Some(a.seed),
        true,
    )
}

fn fit_summary(rows: &[SweepRow], grid: &[f64], window: Option<(f64, f64)>) -> String {
    let Some((&first, &last)) = grid.first().zip(grid.last()) else {
        return "# fit unavailable: empty grid".to_string();
    };
    let (lo, hi) = window.unwrap_or((first, last));
    let raw = experiments::fit_scaling(rows, (lo, hi), FitMode::RawLogLog);
    let thm = experiments::fit_scaling(rows, (lo, hi), FitMode::VsTheoremCurve);
    match (raw, thm) {
        (Ok(r), Ok(t)) => format!(
            "# fit window_db={lo}:{hi} raw_loglog_slope={:.6} raw_loglog_r2={:.6} \
             vs_theorem_slope={:.6} vs_theorem_r2={:.6} points={}",
            r.slope, r.r2, t.slope, t.r2, r.points
        ),
        (Err(e), _) | (_, Err(e)) => format!("# fit unavailable: {e}"),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<(), CliError> {
    init_workers(a.workers)?;
    let src = source_spec(a.source, a.variance)?;
    let grid = a.snr_db_range.grid();
    let base_snr = 10f64.powf(grid[0] / 10.0);
    let mut base = SchemeConfig::new(a.n, base_snr, &src)?;
    base = apply_shared(base, a.power, a.delta, a.k)?;
    let policy = policy_of(a.eps_policy, a.eps);
    let rows = experiments::sweep(&base, &src, &grid, policy, a.samples, a.seed)?;

    let text = emit::render_sweep(&rows, a.n, a.format);
    let mut config = cfg_json(&base, &src, Some(a.samples));
    if let Value::Object(ref mut obj) = config {
        obj.insert("snr_db_range".into(), json!(a.snr_db_range.to_string()));
        obj.insert("eps_policy".into(), json!(format!("{:?}", a.eps_policy).to_lowercase()));
        obj.insert("grid_points".into(), json!(grid.len()));
    }
    write_output(a.out.as_deref(), &text, "sweep", config, Some(a.seed), false)?;
    println!(
        "{}",
        fit_summary(&rows, &grid, a.fit_window.map(|w| (w.lo, w.hi)))
    );
    Ok(())
}

fn cmd_bounds(a: BoundsArgs) -> Result<(), CliError> {
    let src = source_spec(a.source, a.variance)?;
    let grid = a.snr_db_range.grid();
    let mut rows = Vec::with_capacity(grid.len());
    let mut resolved = None;
    for &db in &grid {
        let snr = 10f64.powf(db / 10.0);
        let cfg = SchemeConfig::new(a.n, snr, &src)?;
        let cfg = apply_shared(cfg, None, a.delta, a.k)?;
        let eps = experiments::policy_epsilon(policy_of(a.eps_policy, a.eps), snr, a.n, cfg.k)?;
        let cfg = cfg.with_epsilon(eps)?;
        let row = emit::BoundRow {
            snr_db: db,
            snr,
            eps,
            opta: bounds::opta_bound(snr, a.n, &src)?,
            lemma4: bounds::subcell_bound(snr, a.n, eps, &src, cfg.sigma_e2)?.value(),
            lemma5: bounds::lattice_step_bound(snr, a.n, eps, &src, cfg.delta)?.value(),
            ziv: experiments::ziv_column(&cfg, &src, snr)?,
            theorem_ref: bounds::scaling_reference(snr, a.n)?,
        };
        rows.push(row);
        resolved.get_or_insert_with(|| cfg_json(&cfg, &src, None));
    }

    let text = emit::render_bounds(&rows, a.format);
    let mut config = resolved.unwrap_or_else(|| json!({}));
    if let Value::Object(ref mut obj) = config {
        obj.insert("snr_db_range".into(), json!(a.snr_db_range.to_string()));
        obj.insert("eps_policy".into(), json!(format!("{:?}", a.eps_policy).to_lowercase()));
    }
    write_output(a.out.as_deref(), &text, "bounds", config, None, false)
}

fn cmd_solve_eps(a: SolveEpsArgs) -> Result<(), CliError> {
    match a.policy {
        SolvePolicy::Achievability => {
            let eps = bounds::achievability_eps(a.snr, a.n, a.k)?;
            let snr_pow_eps = a.snr.powf(eps);
            match a.format {
                Format::Csv => {
                    println!("policy = achievability");
                    println!("snr = {}", emit::sig(a.snr));
                    println!("n = {}", a.n);
                    println!("k = {}", emit::sig(a.k));
                    println!("eps = {}", emit::sig(eps));
                    println!("snr_pow_eps = {}", emit::sig(snr_pow_eps));
                }
                Format::Json => {
                    let obj = json!({
                        "policy": "achievability",
                        "snr": a.snr,
                        "n": a.n,
                        "k": a.k,
                        "eps": eps,
                        "snr_pow_eps": snr_pow_eps,
                    });
                    println!("{obj}");
                }
            }
        }
        SolvePolicy::Optimal => {
            // The solver works with the dividing tail form exp(-x/k'); the
            // flag is the multiplying form exp(-k x), so pass the reciprocal.
            let sol = bounds::solve_eps_star(a.snr, a.n, 1.0 / a.k)?;
            let snr_pow_eps = a.snr.powf(sol.eps_star);
            match a.format {
                Format::Csv => {
                    println!("policy = optimal");
                    println!("snr = {}", emit::sig(a.snr));
                    println!("n = {}", a.n);
                    println!("k = {}", emit::sig(a.k));
                    println!("eps_star = {}", emit::sig(sol.eps_star));
                    println!("snr_pow_eps = {}", emit::sig(snr_pow_eps));
                    println!("l1 = {}", emit::sig(sol.l1));
                    println!("l2 = {}", emit::sig(sol.l2));
                    println!("residual = {}", emit::sig(sol.residual()));
                    println!("xi = {}", emit::sig(sol.xi));
                    println!("w_arg = {}", emit::sig(sol.w_arg));
                }
                Format::Json => {
                    let obj = json!({
                        "policy": "optimal",
                        "snr": a.snr,
                        "n": a.n,
                        "k": a.k,
                        "eps_star": sol.eps_star,
                        "snr_pow_eps": snr_pow_eps,
                        "l1": sol.l1,
                        "l2": sol.l2,
                        "residual": sol.residual(),
                        "xi": sol.xi,
                        "w_arg": sol.w_arg,
                    });
                    println!("{obj}");
                }
            }
        }
    }
    Ok(())
}
