use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use ckn_cli::config::{ConstantsQuery, MinimizeConfig, Mode, SweepConfig};
use ckn_cli::sweep::{sweep_to_csv, GroundStateCache};
use ckn_cli::verify::{checks, Suite};
use ckn_core::constants::{ckn_p2_constant, ckn_radial, gross_ls, thresholds, wlh_radial};
use ckn_core::cylinder::{detect_symmetry_breaking, minimize_ckn, minimize_radial_ckn, minimize_wlh, MinimizeResult};
use ckn_core::ground_state::{
    a_bar_existence, gn_constant_from, moments, r_expansion, solve_ground_state, DEFAULT_TOL,
};
use ckn_core::params::{make_ckn_params, make_wlh_params, theta_lower};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "ckn",
    version,
    about = "Weighted interpolation and logarithmic Hardy inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form constants and thresholds at one parameter point.
    Constants {
        /// JSON object `{"d":..,"a":..,"p":..,"theta":..,"gamma":..}`, or a path to one.
        params: String,
    },
    /// Radial ground state of `-Δu + u = u^{p-1}`.
    GroundState {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: i32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Write the profile as `r,u` CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize one energy on the cylinder.
    Minimize { config: PathBuf },
    /// Sweep a parameter plane and write the region report.
    Regions {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        run_minimizer: bool,
    },
    /// Run a verification suite: identities, closed-forms, minimizer or all.
    Verify { suite: Suite },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Constants { params } => constants(&params)?,
        Command::GroundState { p, d, tol, out } => ground_state(p, d, tol, out.as_deref())?,
        Command::Minimize { config } => minimize(&MinimizeConfig::from_path(&config)?)?,
        Command::Regions {
            config,
            out,
            run_minimizer,
        } => {
            let mut cfg = SweepConfig::from_path(&config)?;
            cfg.run_minimizer |= run_minimizer;
            if out.is_some() {
                cfg.output = out;
            }
            regions(&cfg)?
        }
        Command::Verify { suite } => {
            let results = checks(suite);
            let failed = results.iter().filter(|c| !c.passed).count();
            for c in &results {
                println!("{c}");
            }
            println!("{} checks, {failed} failed", results.len());
            return Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn constants(arg: &str) -> Result<()> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    let q: ConstantsQuery = serde_json::from_str(&text).context("parsing parameters")?;
    let mut out = json!({ "d": q.d, "a": q.a, "c_ls": gross_ls(q.d).ok().map(|c| c.value) });
    if let Some(p) = q.p {
        let theta = match q.theta {
            Some(t) => t,
            None => theta_lower(p, q.d)?,
        };
        make_ckn_params(q.d, q.a, p, theta)?;
        let c = if p == 2.0 {
            ckn_p2_constant(theta, q.a, q.d)?
        } else {
            ckn_radial(theta, p, q.a, q.d)?
        };
        out["p"] = json!(p);
        out["theta"] = json!(theta);
        out["ckn_radial"] = serde_json::to_value(c)?;
        out["thresholds"] = serde_json::to_value(thresholds(q.a, p, q.d))?;
    }
    if let Some(gamma) = q.gamma {
        make_wlh_params(q.d, q.a, gamma)?;
        out["gamma"] = json!(gamma);
        out["wlh_radial"] = serde_json::to_value(wlh_radial(gamma, q.a, q.d)?)?;
    }
    print_json(&out)
}

fn ground_state(p: f64, d: i32, tol: f64, out: Option<&Path>) -> Result<()> {
    let profile = solve_ground_state(p, d, tol)?;
    let m = moments(&profile)?;
    let mut report = json!({
        "p": p,
        "d": d,
        "u0": profile.u0,
        "r_max": profile.r_max,
        "c_gn": gn_constant_from(&m),
        "moments": { "x0": m.x0, "y0": m.y0, "z0": m.z0, "x2": m.x2, "y2": m.y2, "z2": m.z2 },
        "t": m.t(),
        "identity_residual": m.max_identity_residual(),
        "ode_residual": profile.max_ode_residual(),
    });
    if d >= 5 {
        if let Ok(iv) = a_bar_existence(p, d) {
            report["a_bar_existence"] = json!([iv.lower, iv.upper]);
        }
        if let Ok(r) = r_expansion(ckn_core::params::a_crit(d), p, d, &m) {
            report["r_split"] = json!({ "r1": r.r1, "r0": r.r0 });
        }
    }
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        profile.write_csv(&mut w)?;
        w.flush()?;
    }
    print_json(&report)
}

fn write_outputs(cfg: &MinimizeConfig, run: &MinimizeResult) -> Result<Value> {
    if let Some(path) = &cfg.field_output {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        run.field.write_csv(&mut w)?;
        w.flush()?;
    }
    let record = serde_json::to_value(run.record(&cfg.grid))?;
    if let Some(path) = &cfg.record_output {
        std::fs::write(path, serde_json::to_string_pretty(&record)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(record)
}

fn minimize(cfg: &MinimizeConfig) -> Result<()> {
    match cfg.mode {
        Mode::Ckn => {
            let p = cfg.p.context("ckn runs need `p`")?;
            let theta = match cfg.theta {
                Some(t) => t,
                None => theta_lower(p, cfg.d)?,
            };
            let pr = make_ckn_params(cfg.d, cfg.a, p, theta)?;
            if cfg.detect_symmetry {
                let rep = detect_symmetry_breaking(&pr, &cfg.grid)?;
                let record = write_outputs(cfg, &rep.full)?;
                print_json(&json!({
                    "broken": rep.broken,
                    "gap": rep.gap,
                    "anisotropy": rep.anisotropy,
                    "radial": serde_json::to_value(rep.radial.record(&cfg.grid))?,
                    "full": record,
                }))
            } else {
                let run = if cfg.grid.n_xi == 1 {
                    minimize_radial_ckn(&pr, &cfg.grid)?
                } else {
                    minimize_ckn(&pr, &cfg.grid)?
                };
                print_json(&write_outputs(cfg, &run)?)
            }
        }
        Mode::Wlh => {
            if cfg.detect_symmetry {
                bail!("symmetry detection is only implemented for the ckn family");
            }
            let pr = make_wlh_params(cfg.d, cfg.a, cfg.gamma.context("wlh runs need `gamma`")?)?;
            let run = minimize_wlh(&pr, &cfg.grid)?;
            print_json(&write_outputs(cfg, &run)?)
        }
    }
}

fn regions(cfg: &SweepConfig) -> Result<()> {
    let cache = GroundStateCache::default();
    let (csv, skipped) = sweep_to_csv(cfg, &cache)?;
    for s in &skipped {
        log::info!("skipped {}: {}", s.point, s.reason);
    }
    match &cfg.output {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}
