//! Command-line front end. Every artifact lands under `--out` with a stable
//! name and embeds the resolved configuration and its hash.
//!
//! Exit codes: 0 all certificates pass, 1 a certificate failed, 2 the
//! configuration was rejected (including CFL guards), 3 the run produced a
//! non-finite state.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::checkpoint::Checkpoint;
use crate::config::{FieldSpec, ForcingSpec, RunConfig};
use crate::error::{Error, Result};
use crate::estimates::{
    check_energy_identity, check_estimate_i, check_estimate_ii, convergence_study, regularity_monitor, shell_spectrum,
    twin_run_gronwall, GronwallConstant,
};
use crate::pressure::{check_compatibility, evaluate, pressure_residuals, recover_pressure};
use crate::spectral::{default_grid, l2_norm, leray_project, lp_norm, max_divergence, sobolev_norm, SpectralField};
use crate::timestepper::{dynamics_of, init_state, simulate, Snapshot};

#[derive(Debug, Parser)]
#[command(
    name = "periodic-ns",
    version,
    about = "Fourier–Galerkin Navier–Stokes on the periodic cube"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides every seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate and check the energy certificates.
    Run(Common),
    /// Refinement study over several cutoffs.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated cutoffs, e.g. `4,8,16`.
        #[arg(long, value_delimiter = ',')]
        cutoffs: Option<Vec<usize>>,
    },
    /// Twin runs checked against the Gronwall bound.
    Uniqueness {
        #[command(flatten)]
        common: Common,
        /// Perturbation amplitude `|δ|` (overrides the config).
        #[arg(long)]
        delta: Option<f64>,
        /// `derived`, `measure`, or a number.
        #[arg(long, default_value = "derived")]
        constant: String,
    },
    /// Recover the pressure of a checkpointed velocity.
    Pressure {
        #[command(flatten)]
        common: Common,
        /// Velocity checkpoint written by `run`
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Face-jump compatibility of forcing and initial data.
    CheckCompat(Common),
    /// Norms of the (projected) initial field or of a checkpoint.
    Norms {
        #[command(flatten)]
        common: Common,
        /// Velocity checkpoint; the projected initial field when absent
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

/// Process exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Toml(_) | Error::Cfl { .. } => 2,
        Error::NonFinite { .. } => 3,
        _ => 1,
    }
}

pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a command; `Ok(false)` means a certificate failed.
pub fn execute(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Run(c) => cmd_run(c),
        Command::Convergence { common, cutoffs } => cmd_convergence(common, cutoffs.as_deref()),
        Command::Uniqueness {
            common,
            delta,
            constant,
        } => cmd_uniqueness(common, *delta, constant),
        Command::Pressure { common, checkpoint } => cmd_pressure(common, checkpoint),
        Command::CheckCompat(c) => cmd_check_compat(c),
        Command::Norms { common, checkpoint } => cmd_norms(common, checkpoint.as_deref()),
    }
}

fn load(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&c.config).map_err(|e| match e {
        Error::Io(io) => Error::Config(format!("cannot read {}: {io}", c.config.display())),
        other => other,
    })?;
    if let Some(seed) = c.seed {
        cfg.override_seed(seed);
        cfg.validate()?;
    }
    fs::create_dir_all(&c.out)?;
    Ok(cfg)
}

fn write_json(out: &Path, name: &str, cfg: &RunConfig, kind: &str, report: impl Serialize) -> Result<()> {
    let doc = json!({
        "artifact": kind,
        "config_hash": cfg.hash(),
        "config": cfg.resolved_toml(),
        "report": report,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(out.join(name), text)?;
    Ok(())
}

fn ledger_csv(cfg: &RunConfig, csv: &str) -> String {
    let mut s = format!("# config_hash {}\n", cfg.hash());
    s.push_str(csv);
    s
}

fn cmd_run(c: &Common) -> Result<bool> {
    let cfg = load(c)?;
    let forcing = cfg.forcing()?;
    let hash = cfg.hash();
    let every = cfg.output.checkpoint_every;
    let out = c.out.clone();

    let mut ck_err: Option<Error> = None;
    let mut checkpoints = |s: &Snapshot<'_>| -> Result<()> {
        if every > 0 && s.state.step.is_multiple_of(every) {
            let path = out.join(format!("checkpoint_{:08}.json", s.state.step));
            if let Err(e) = Checkpoint::from_field(&s.state.u, s.state.t, &hash).write(&path) {
                ck_err.get_or_insert(e);
            }
        }
        Ok(())
    };

    // Decay law of the Taylor–Green vortex when it is an exact solution.
    let tg = match (&cfg.ic, &cfg.forcing) {
        (FieldSpec::TaylorGreen { .. }, ForcingSpec::Zero) => Some(init_state(&cfg.initial_field(), cfg.cutoff).u),
        _ => None,
    };
    let rate = 2.0 * cfg.viscosity * (std::f64::consts::TAU / cfg.box_l).powi(2);
    let mut tg_err: f64 = 0.0;
    let mut tg_monitor = |s: &Snapshot<'_>| -> Result<()> {
        if let Some(u0) = &tg {
            let exact = u0.scaled((-rate * s.state.t).exp());
            let norm = l2_norm(&exact);
            if norm > 0.0 {
                tg_err = tg_err.max(l2_norm(&(&s.state.u - &exact)) / norm);
            }
        }
        Ok(())
    };

    let result = simulate(
        &cfg,
        &cfg.initial_field(),
        forcing.as_ref(),
        &mut [&mut checkpoints, &mut tg_monitor],
    );
    let result = match result {
        Ok(r) => r,
        Err(fail) => {
            fs::write(c.out.join("ledger.csv"), ledger_csv(&cfg, &fail.ledger.to_csv()))?;
            write_json(
                &c.out,
                "certificates.json",
                &cfg,
                "certificates",
                json!({ "passed": false, "error": fail.error.to_string(), "rows": fail.ledger.len() }),
            )?;
            return Err(fail.error);
        }
    };
    if let Some(e) = ck_err {
        return Err(e);
    }
    fs::write(c.out.join("ledger.csv"), ledger_csv(&cfg, &result.ledger.to_csv()))?;
    Checkpoint::from_field(&result.final_state.u, result.final_state.t, &hash).write(&c.out.join("final.json"))?;

    let tol = &cfg.tolerances;
    let energy = check_energy_identity(&result.ledger);
    let est_i = check_estimate_i(&result.ledger);
    let est_ii = check_estimate_ii(&result.ledger);
    let steady = !matches!(cfg.forcing, ForcingSpec::RandomBand { omega, .. } if omega != 0.0)
        && !matches!(cfg.forcing, ForcingSpec::Series { .. });
    let reg = regularity_monitor(&result.ledger, &result.final_state.u, steady);

    let energy_ok = energy.passes(tol.energy_identity);
    let mut certs = vec![
        ("energy_identity", energy_ok),
        ("estimate_i", est_i.passed),
        ("estimate_ii", est_ii.finite),
        ("regularity", reg.passed),
    ];
    let mut taylor_green = Value::Null;
    if tg.is_some() {
        let ok = tg_err <= tol.taylor_green;
        certs.push(("taylor_green_decay", ok));
        taylor_green = json!({ "max_relative_error": tg_err, "tolerance": tol.taylor_green, "passed": ok });
    }
    let passed = certs.iter().all(|c| c.1);
    for (name, ok) in &certs {
        println!("{name}: {}", if *ok { "pass" } else { "FAIL" });
    }
    write_json(
        &c.out,
        "certificates.json",
        &cfg,
        "certificates",
        json!({
            "passed": passed,
            "steps": cfg.steps(),
            "quadrature_grid": default_grid(cfg.cutoff),
            "energy_identity": {
                "max_relative_residual": energy.max_relative,
                "tolerance": tol.energy_identity,
                "passed": energy_ok,
            },
            "estimate_i": {
                "derivation": est_i.derivation,
                "worst_margin": est_i.worst_margin,
                "worst_time": est_i.worst_time,
                "constant_mode_worst_margin": est_i.const_worst_margin,
                "forcing_vdual_integral": est_i.f_vdual_integral,
                "passed": est_i.passed,
            },
            "estimate_ii": est_ii,
            "regularity": reg,
            "taylor_green_decay": taylor_green,
        }),
    )?;
    Ok(passed)
}

fn cmd_convergence(c: &Common, cutoffs: Option<&[usize]>) -> Result<bool> {
    let cfg = load(c)?;
    let cutoffs = cutoffs
        .map(<[usize]>::to_vec)
        .unwrap_or_else(|| cfg.study.cutoffs.clone());
    let table = convergence_study(&cfg, &cutoffs)?;
    let mut csv = format!("# config_hash {}\ncoarse,fine,final_diff,sup_diff\n", cfg.hash());
    for r in &table.rows {
        csv.push_str(&format!("{},{},{},{}\n", r.coarse, r.fine, r.final_diff, r.sup_diff));
        println!("K={:>3} vs {:>3}: sup_t diff {:.3e}", r.coarse, r.fine, r.sup_diff);
    }
    fs::write(c.out.join("convergence.csv"), csv)?;
    write_json(&c.out, "convergence.json", &cfg, "convergence", &table)?;
    println!("monotone: {}", if table.monotone { "pass" } else { "FAIL" });
    Ok(table.monotone)
}

fn cmd_uniqueness(c: &Common, delta: Option<f64>, constant: &str) -> Result<bool> {
    let mut cfg = load(c)?;
    if let Some(a) = delta {
        if !(a >= 0.0) {
            return Err(Error::Config(format!(
                "perturbation amplitude must be nonnegative, got {a}"
            )));
        }
        cfg.perturbation.amplitude = a;
    }
    let constant = match constant {
        "derived" => GronwallConstant::Derived,
        "measure" => GronwallConstant::Measure,
        v => GronwallConstant::Fixed(
            v.parse()
                .map_err(|_| Error::Config(format!("--constant expects derived, measure or a number, got {v}")))?,
        ),
    };
    let forcing = cfg.forcing()?;
    let report = twin_run_gronwall(
        &cfg,
        &cfg.initial_field(),
        &cfg.perturbation_field(),
        forcing.as_ref(),
        constant,
        cfg.tolerances.gronwall,
    )?;
    println!(
        "gronwall ({}): c = {}, measured c = {:.6e}, worst margin {:.3e}: {}",
        report.mode,
        report.c,
        report.measured_c,
        report.worst_margin,
        if report.passed { "pass" } else { "FAIL" }
    );
    write_json(&c.out, "gronwall.json", &cfg, "gronwall", &report)?;
    Ok(report.passed)
}

fn cmd_pressure(c: &Common, checkpoint: &Path) -> Result<bool> {
    let cfg = load(c)?;
    let ck = Checkpoint::read(checkpoint)?;
    let u = ck.field()?;
    if u.components() != 3 {
        return Err(Error::Checkpoint("pressure needs a velocity checkpoint".into()));
    }
    if u.box_l() != cfg.box_l {
        return Err(Error::BoxMismatch(u.box_l(), cfg.box_l));
    }
    let u = leray_project(&u);
    let f = cfg.forcing_at(u.cutoff())?.at(ck.time);
    let p = recover_pressure(&u, &f, cfg.q0())?;
    let res = pressure_residuals(&p, &u, &f, dynamics_of(&cfg))?;
    let passed = res.passes(cfg.tolerances.pressure_residual);

    let mut snapshot = Checkpoint::from_field(&p.p, ck.time, &cfg.hash());
    snapshot.q0 = Some(p.q0);
    snapshot.write(&c.out.join("pressure.json"))?;

    let analytic = match (&cfg.ic, &cfg.forcing) {
        (FieldSpec::TaylorGreen { amplitude }, ForcingSpec::Zero) => {
            let exact = crate::config::taylor_green_pressure(
                u.cutoff(),
                cfg.box_l,
                *amplitude,
                cfg.viscosity,
                ck.time,
                cfg.q0(),
            );
            json!({ "taylor_green_relative_error": l2_norm(&(&p.p - &exact)) / l2_norm(&exact) })
        }
        _ => Value::Null,
    };
    println!("pressure residual: {}", if passed { "pass" } else { "FAIL" });
    write_json(
        &c.out,
        "pressure_report.json",
        &cfg,
        "pressure",
        json!({
            "time": ck.time,
            "q0": p.q0,
            "mean_integral": p.mean_integral(),
            "residuals": res,
            "tolerance": cfg.tolerances.pressure_residual,
            "analytic": analytic,
            "passed": passed,
        }),
    )?;
    Ok(passed)
}

fn cmd_check_compat(c: &Common) -> Result<bool> {
    let cfg = load(c)?;
    let times = cfg
        .study
        .compat_times
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.5 * cfg.t_final, cfg.t_final]);
    let forcing = cfg.forcing()?;
    let frames: Vec<(f64, SpectralField)> = std::iter::once(0.0)
        .chain(times.iter().copied())
        .map(|t| (t, forcing.at(t)))
        .collect();
    let eval = |x: [f64; 3], t: f64| -> [f64; 3] {
        let v = match frames.iter().find(|(s, _)| *s == t) {
            Some((_, f)) => evaluate(f, x),
            None => evaluate(&forcing.at(t), x),
        };
        [v[0], v[1], v[2]]
    };
    let m = 2 * (cfg.cutoff + 1);
    let report = check_compatibility(&eval, &cfg.initial_field(), &times, m, cfg.tolerances.compat);
    println!("compatibility: {}", if report.passed { "pass" } else { "FAIL" });
    write_json(&c.out, "compat.json", &cfg, "compatibility", &report)?;
    Ok(report.passed)
}

fn cmd_norms(c: &Common, checkpoint: Option<&Path>) -> Result<bool> {
    let cfg = load(c)?;
    let field = match checkpoint {
        Some(p) => Checkpoint::read(p)?.field()?,
        None => init_state(&cfg.initial_field(), cfg.cutoff).u,
    };
    let n = default_grid(field.cutoff());
    let mut lp = serde_json::Map::new();
    for (name, p) in [("2", 2.0), ("3", 3.0), ("4", 4.0), ("6", 6.0), ("inf", f64::INFINITY)] {
        lp.insert(name.into(), json!(lp_norm(&field, p, n)?));
    }
    let mut hs = serde_json::Map::new();
    for s in [-1.5, -1.0, 0.0, 1.0, 1.5, 2.0, 3.0] {
        hs.insert(format!("{s}"), json!(sobolev_norm(&field, s)));
    }
    let (l2, l3, l6) = (lp["2"].as_f64(), lp["3"].as_f64(), lp["6"].as_f64());
    let holder = match (l2, l3, l6) {
        (Some(a), Some(b), Some(c)) => {
            json!({ "l3": b, "sqrt_l6_l2": (c * a).sqrt(), "holds": b <= (c * a).sqrt() * (1.0 + 1e-14) })
        }
        _ => Value::Null,
    };
    let report = json!({
        "cutoff": field.cutoff(),
        "components": field.components(),
        "grid": n,
        "l2": l2_norm(&field),
        "lp": lp,
        "sobolev": hs,
        "max_divergence": if field.components() == 3 { json!(max_divergence(&field)) } else { Value::Null },
        "interpolation": holder,
        "shell_spectrum": shell_spectrum(&field),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    write_json(&c.out, "norms.json", &cfg, "norms", &report)?;
    Ok(true)
}
