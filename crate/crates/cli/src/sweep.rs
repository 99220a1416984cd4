//! Region sweeps over `(a, p, θ)` and `(a, γ)`.
//!
//! Every row carries the numbers its flags are derived from, and the flags
//! are always recomputed from those numbers through [`ckn_existence`],
//! [`ckn_sb_flag`], [`wlh_existence`] and [`wlh_sb_flag`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use anyhow::{Context, Result};
use ckn_core::constants::{
    a0_star, a_bar_sb, a_star, ckn_p2_constant, ckn_radial, gross_ls, theta_sb_threshold, wlh_radial, wlh_sb_threshold,
};
use ckn_core::cylinder::{detect_symmetry_breaking, minimize_wlh};
use ckn_core::ground_state::{a_bar_existence, gn_constant_from, moments, solve_ground_state, MomentSet};
use ckn_core::params::{critical_exponent, make_ckn_params, make_wlh_params, theta_lower, CknParams};
use log::debug;
use rayon::prelude::*;

use crate::config::{Mode, SweepConfig, ThetaSpec};
use crate::worker_pool;

pub const SCHEMA: &str = "v1";

/// `θ` within this distance of `ϑ(p, d)` counts as the critical case.
const CRITICAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    Yes,
    No,
    Indeterminate,
}

impl Existence {
    pub fn as_str(self) -> &'static str {
        match self {
            Existence::Yes => "true",
            Existence::No => "false",
            Existence::Indeterminate => "indeterminate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "true" => Some(Existence::Yes),
            "false" => Some(Existence::No),
            "indeterminate" => Some(Existence::Indeterminate),
            _ => None,
        }
    }
}

/// Ground state, its moments and `C_GN`, computed once per key.
#[derive(Debug)]
pub struct GroundState {
    pub u0: f64,
    pub moments: MomentSet,
    pub c_gn: f64,
}

type Slot = Arc<OnceLock<std::result::Result<Arc<GroundState>, String>>>;

/// Ground states keyed by `(p, d, tol)`. Concurrent lookups of the same key
/// block on a single computation.
#[derive(Default)]
pub struct GroundStateCache {
    slots: Mutex<HashMap<(u64, i32, u64), Slot>>,
}

impl GroundStateCache {
    pub fn get(&self, p: f64, d: i32, tol: f64) -> std::result::Result<Arc<GroundState>, String> {
        let slot = {
            let mut map = self.slots.lock().expect("cache lock poisoned");
            map.entry((p.to_bits(), d, tol.to_bits())).or_default().clone()
        };
        slot.get_or_init(|| {
            debug!("ground state for p = {p}, d = {d}");
            let profile = solve_ground_state(p, d, tol).map_err(|e| e.to_string())?;
            let m = moments(&profile).map_err(|e| e.to_string())?;
            Ok(Arc::new(GroundState {
                u0: profile.u0,
                c_gn: gn_constant_from(&m),
                moments: m,
            }))
        })
        .clone()
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A parameter point dropped before evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub point: String,
    pub reason: String,
}

pub trait CsvRow {
    const MODE: &'static str;
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

#[derive(Debug, Clone)]
pub struct RegionReport<R> {
    pub rows: Vec<R>,
    pub skipped: Vec<Skipped>,
}

impl<R: CsvRow> RegionReport<R> {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "#schema={SCHEMA},mode={}", R::MODE)?;
        writeln!(w, "{}", R::header().join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.fields().join(","))?;
        }
        for s in &self.skipped {
            writeln!(w, "#skipped {}: {}", s.point, s.reason)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn opt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CknRow {
    pub d: i32,
    pub a: f64,
    pub p: f64,
    pub theta: f64,
    pub lambda: f64,
    pub theta_min: f64,
    /// Radial constant, or `Λ^{-θ}` at `p = 2`.
    pub ckn_radial: Option<f64>,
    pub c_gn: Option<f64>,
    pub theta_sb: f64,
    pub a_bar_sb: f64,
    pub a0_star: Option<f64>,
    /// Lower end of the interval where both expansion coefficients are negative (`d ≥ 5`).
    pub a_bar_r: Option<f64>,
    pub boundary_case: bool,
    pub sb_predicted: bool,
    pub existence: Existence,
    pub min_radial: Option<f64>,
    pub min_estimate: Option<f64>,
    pub min_gap: Option<f64>,
    pub min_broken: Option<bool>,
    pub status: String,
}

impl CsvRow for CknRow {
    const MODE: &'static str = "ckn";
    fn header() -> &'static [&'static str] {
        &[
            "d",
            "a",
            "p",
            "theta",
            "lambda",
            "theta_min",
            "ckn_radial",
            "c_gn",
            "theta_sb",
            "a_bar_sb",
            "a0_star",
            "a_bar_r",
            "boundary_case",
            "sb_predicted",
            "existence",
            "min_radial",
            "min_estimate",
            "min_gap",
            "min_broken",
            "status",
        ]
    }
    fn fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            num(self.a),
            num(self.p),
            num(self.theta),
            num(self.lambda),
            num(self.theta_min),
            opt(self.ckn_radial),
            opt(self.c_gn),
            num(self.theta_sb),
            num(self.a_bar_sb),
            opt(self.a0_star),
            opt(self.a_bar_r),
            self.boundary_case.to_string(),
            self.sb_predicted.to_string(),
            self.existence.as_str().to_string(),
            opt(self.min_radial),
            opt(self.min_estimate),
            opt(self.min_gap),
            opt_bool(self.min_broken),
            self.status.clone(),
        ]
    }
}

/// Whether `p` is `2` or `2*`.
pub fn ckn_boundary_flag(p: f64, d: i32) -> bool {
    p == 2.0 || critical_exponent(d).map_or(false, |c| c.is_finite() && p == c.as_f64())
}

/// Proven symmetry-breaking region: `a < ā`, or `θ < Θ(a, p, d)`.
pub fn ckn_sb_flag(p: f64, a: f64, theta: f64, a_bar: f64, theta_sb: f64) -> bool {
    p > 2.0 && (a < a_bar || theta < theta_sb)
}

/// Existence of an extremal from the numeric columns of a row.
///
/// * `p = 2`: never attained.
/// * `p = 2*` (so `θ = 1`): extremals exist exactly for `a ≥ 0`.
/// * `θ > ϑ`: always.
/// * `θ = ϑ`: guaranteed when `a > a₀*`, or when `C_GN` falls strictly below a
///   lower bound for the constant (the radial constant, a minimizer estimate,
///   or the sign condition on the expansion coefficients).
#[allow(clippy::too_many_arguments)]
pub fn ckn_existence(
    p: f64,
    d: i32,
    a: f64,
    theta: f64,
    theta_min: f64,
    ckn_radial: Option<f64>,
    c_gn: Option<f64>,
    a0_star: Option<f64>,
    a_bar_r: Option<f64>,
    min_estimate: Option<f64>,
) -> Existence {
    if p == 2.0 {
        return Existence::No;
    }
    if ckn_boundary_flag(p, d) {
        return if a >= 0.0 { Existence::Yes } else { Existence::No };
    }
    if theta > theta_min + CRITICAL_EPS {
        return Existence::Yes;
    }
    let below = |bound: Option<f64>| matches!((c_gn, bound), (Some(g), Some(c)) if g < c);
    if a0_star.map_or(false, |t| a > t)
        || below(ckn_radial)
        || below(min_estimate)
        || a_bar_r.map_or(false, |lo| a > lo)
    {
        Existence::Yes
    } else {
        Existence::Indeterminate
    }
}

fn theta_values(cfg: &SweepConfig, p: f64) -> Result<Vec<f64>> {
    match cfg.theta.context("missing theta")? {
        ThetaSpec::Named(_) => Ok(vec![theta_lower(p, cfg.d)?]),
        ThetaSpec::Range(r) => r.values(),
    }
}

fn ckn_row(params: &CknParams, cfg: &SweepConfig, cache: &GroundStateCache) -> CknRow {
    let (d, a, p, theta) = (params.d, params.a, params.p, params.theta);
    let mut status = Vec::new();
    let boundary_case = ckn_boundary_flag(p, d);
    let ckn_radial = if p == 2.0 {
        ckn_p2_constant(theta, a, d)
    } else {
        ckn_radial(theta, p, a, d)
    };
    let ckn_radial = match ckn_radial {
        Ok(c) => Some(c.value),
        Err(e) => {
            status.push(format!("constant: {e}"));
            None
        }
    };
    let interior = p > 2.0 && !boundary_case;
    let c_gn = if interior {
        match cache.get(p, d, cfg.ground_state_tol) {
            Ok(gs) => Some(gs.c_gn),
            Err(e) => {
                status.push(format!("ground state: {e}"));
                None
            }
        }
    } else {
        None
    };
    let a0 = if interior && d >= 3 { a0_star(p, d).ok() } else { None };
    let a_bar_r = if p > 2.0 && d >= 5 {
        a_bar_existence(p, d).ok().map(|iv| iv.lower)
    } else {
        None
    };
    let (mut min_radial, mut min_estimate, mut min_gap, mut min_broken) = (None, None, None, None);
    if cfg.run_minimizer && interior {
        match detect_symmetry_breaking(params, &cfg.grid) {
            Ok(rep) => {
                min_radial = Some(rep.radial.constant_estimate);
                min_estimate = Some(rep.full.constant_estimate);
                min_gap = Some(rep.gap);
                min_broken = Some(rep.broken);
            }
            Err(e) => status.push(format!("minimizer: {e}")),
        }
    }
    let theta_sb = theta_sb_threshold(a, p, d);
    let a_bar = a_bar_sb(p, d);
    CknRow {
        d,
        a,
        p,
        theta,
        lambda: params.lambda,
        theta_min: params.theta_min,
        ckn_radial,
        c_gn,
        theta_sb,
        a_bar_sb: a_bar,
        a0_star: a0,
        a_bar_r,
        boundary_case,
        sb_predicted: ckn_sb_flag(p, a, theta, a_bar, theta_sb),
        existence: ckn_existence(
            p,
            d,
            a,
            theta,
            params.theta_min,
            ckn_radial,
            c_gn,
            a0,
            a_bar_r,
            min_estimate,
        ),
        min_radial,
        min_estimate,
        min_gap,
        min_broken,
        status: if status.is_empty() {
            "ok".into()
        } else {
            sanitize(&status.join("; "))
        },
    }
}

/// Keep free text inside one CSV field.
fn sanitize(s: &str) -> String {
    s.replace([',', '\n', '\r'], " ")
}

pub fn sweep_ckn(cfg: &SweepConfig, cache: &GroundStateCache) -> Result<RegionReport<CknRow>> {
    anyhow::ensure!(cfg.mode == Mode::Ckn, "sweep_ckn needs mode = ckn");
    cfg.check()?;
    let mut points = Vec::new();
    for p in cfg.p.context("missing p")?.values()? {
        let thetas = match theta_values(cfg, p) {
            Ok(t) => t,
            Err(e) => {
                points.push(Err(Skipped {
                    point: format!("p={p}"),
                    reason: e.to_string(),
                }));
                continue;
            }
        };
        for theta in thetas {
            for a in cfg.a.values()? {
                let point = || format!("d={},a={a},p={p},theta={theta}", cfg.d);
                let params = make_ckn_params(cfg.d, a, p, theta).map_err(|e| Skipped {
                    point: point(),
                    reason: e.tag().to_string(),
                });
                // at p = 2 the endpoints θ = 0, 1 are the trivial and Hardy cases
                let params = params.and_then(|pr| {
                    if p == 2.0 && !(theta > 0.0 && theta < 1.0) {
                        Err(Skipped {
                            point: point(),
                            reason: "p2-theta-endpoint".into(),
                        })
                    } else {
                        Ok(pr)
                    }
                });
                points.push(params);
            }
        }
    }
    let pool = worker_pool()?;
    let evaluated: Vec<std::result::Result<CknRow, Skipped>> = pool.install(|| {
        points
            .par_iter()
            .map(|pt| pt.clone().map(|params| ckn_row(&params, cfg, cache)))
            .collect()
    });
    let mut report = RegionReport {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for r in evaluated {
        match r {
            Ok(row) => report.rows.push(row),
            Err(s) => report.skipped.push(s),
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WlhRow {
    pub d: i32,
    pub a: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub wlh_radial: Option<f64>,
    pub c_ls: f64,
    pub wlh_sb_threshold: f64,
    pub a_star: Option<f64>,
    pub boundary_case: bool,
    pub sb_predicted: bool,
    pub existence: Existence,
    pub min_estimate: Option<f64>,
    pub status: String,
}

impl CsvRow for WlhRow {
    const MODE: &'static str = "wlh";
    fn header() -> &'static [&'static str] {
        &[
            "d",
            "a",
            "gamma",
            "lambda",
            "wlh_radial",
            "c_ls",
            "wlh_sb_threshold",
            "a_star",
            "boundary_case",
            "sb_predicted",
            "existence",
            "min_estimate",
            "status",
        ]
    }
    fn fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            num(self.a),
            num(self.gamma),
            num(self.lambda),
            opt(self.wlh_radial),
            num(self.c_ls),
            num(self.wlh_sb_threshold),
            opt(self.a_star),
            self.boundary_case.to_string(),
            self.sb_predicted.to_string(),
            self.existence.as_str().to_string(),
            opt(self.min_estimate),
            self.status.clone(),
        ]
    }
}

/// `γ = d/4`.
pub fn wlh_boundary_flag(gamma: f64, d: i32) -> bool {
    gamma == f64::from(d) / 4.0
}

/// Proven symmetry-breaking region: `a < -1/2` and `γ < 1/4 + Λ/(d-1)`.
pub fn wlh_sb_flag(a: f64, gamma: f64, threshold: f64) -> bool {
    a < -0.5 && gamma < threshold
}

/// `γ > d/4`: always. `γ = d/4`, `d ≥ 3`: when `a > a_⋆`, equivalently when
/// `C_LS` lies strictly below the radial constant.
pub fn wlh_existence(d: i32, a: f64, gamma: f64, wlh_radial: Option<f64>, c_ls: f64, a_star: Option<f64>) -> Existence {
    if gamma > f64::from(d) / 4.0 {
        return Existence::Yes;
    }
    if d >= 3 && (a_star.map_or(false, |s| a > s) || wlh_radial.map_or(false, |c| c_ls < c)) {
        Existence::Yes
    } else {
        Existence::Indeterminate
    }
}

pub fn sweep_wlh(cfg: &SweepConfig) -> Result<RegionReport<WlhRow>> {
    anyhow::ensure!(cfg.mode == Mode::Wlh, "sweep_wlh needs mode = wlh");
    cfg.check()?;
    let c_ls = gross_ls(cfg.d)?.value;
    let a_st = a_star(cfg.d).ok();
    let mut points = Vec::new();
    for gamma in cfg.gamma.context("missing gamma")?.values()? {
        for a in cfg.a.values()? {
            points.push(make_wlh_params(cfg.d, a, gamma).map_err(|e| Skipped {
                point: format!("d={},a={a},gamma={gamma}", cfg.d),
                reason: e.tag().to_string(),
            }));
        }
    }
    let pool = worker_pool()?;
    let evaluated: Vec<std::result::Result<WlhRow, Skipped>> = pool.install(|| {
        points
            .par_iter()
            .map(|pt| {
                pt.clone().map(|pr| {
                    let mut status = String::new();
                    let radial = match wlh_radial(pr.gamma, pr.a, pr.d) {
                        Ok(c) => Some(c.value),
                        Err(e) => {
                            let _ = write!(status, "constant: {e}; ");
                            None
                        }
                    };
                    let mut min_estimate = None;
                    if cfg.run_minimizer {
                        match minimize_wlh(&pr, &cfg.grid) {
                            Ok(r) => min_estimate = Some(r.constant_estimate),
                            Err(e) => {
                                let _ = write!(status, "minimizer: {e}; ");
                            }
                        }
                    }
                    let threshold = wlh_sb_threshold(pr.a, pr.d);
                    WlhRow {
                        d: pr.d,
                        a: pr.a,
                        gamma: pr.gamma,
                        lambda: pr.lambda,
                        wlh_radial: radial,
                        c_ls,
                        wlh_sb_threshold: threshold,
                        a_star: a_st,
                        boundary_case: wlh_boundary_flag(pr.gamma, pr.d),
                        sb_predicted: wlh_sb_flag(pr.a, pr.gamma, threshold),
                        existence: wlh_existence(pr.d, pr.a, pr.gamma, radial, c_ls, a_st),
                        min_estimate,
                        status: if status.is_empty() {
                            "ok".into()
                        } else {
                            sanitize(status.trim_end_matches("; "))
                        },
                    }
                })
            })
            .collect()
    });
    let mut report = RegionReport {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for r in evaluated {
        match r {
            Ok(row) => report.rows.push(row),
            Err(s) => report.skipped.push(s),
        }
    }
    Ok(report)
}

/// Run the sweep named by `cfg.mode` and render it as CSV.
pub fn sweep_to_csv(cfg: &SweepConfig, cache: &GroundStateCache) -> Result<(String, Vec<Skipped>)> {
    Ok(match cfg.mode {
        Mode::Ckn => {
            let r = sweep_ckn(cfg, cache)?;
            (r.to_csv_string(), r.skipped)
        }
        Mode::Wlh => {
            let r = sweep_wlh(cfg)?;
            (r.to_csv_string(), r.skipped)
        }
    })
}
