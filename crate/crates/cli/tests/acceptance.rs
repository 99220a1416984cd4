//! Acceptance criteria, one line each. Runs as a plain binary so the
//! summary is always printed; exits non-zero if any criterion fails.

use std::f64::consts::E;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ckn_core::constants::{
    a_bar_sb, a_star, ckn_p2_constant, ckn_radial, gross_ls, lambda_star, theta_sb_threshold, wlh_radial,
};
use ckn_core::cylinder::{
    detect_symmetry_breaking, minimize_radial_ckn, minimize_wlh, spreading_sequence_demo, Geometry, GridSpec,
};
use ckn_core::ground_state::{
    a_bar_existence, gn_constant, moments, r_at_critical_weight, r_expansion, solve_ground_state, DEFAULT_TOL,
};
use ckn_core::inequalities::{entropy_holder_gap, interpolation_gap, young_gap};
use ckn_core::params::{a_crit, critical_exponent, make_ckn_params, make_wlh_params, theta_lower};
use rand::{rngs::StdRng, Rng, SeedableRng};

type Outcome = Result<String, String>;

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

fn require(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for (p, d) in [(3.0, 3), (4.0, 3), (2.5, 5), (3.0, 5)] {
        let profile = solve_ground_state(p, d, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let m = moments(&profile).map_err(|e| e.to_string())?;
        worst = worst.max(m.max_identity_residual());
    }
    require(worst <= 1e-6, format!("max relative residual {worst:.2e}"))
}

fn threshold_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=10 {
        let top = critical_exponent(d).map_err(|e| e.to_string())?.as_f64().min(10.0);
        for i in 1..=10 {
            let p = 2.0 + (top - 2.0) * f64::from(i) / 11.0;
            worst = worst.max((theta_sb_threshold(a_bar_sb(p, d), p, d) - 1.0).abs());
        }
    }
    require(worst <= 1e-10, format!("max |Θ(ā) - 1| = {worst:.2e} over 90 points"))
}

fn lambda_star_d3() -> Outcome {
    let l = lambda_star(3).map_err(|e| e.to_string())?;
    let s = a_star(3).map_err(|e| e.to_string())?;
    let (e1, e2) = ((l - E / 4.0).abs(), (s - (0.5 - E.sqrt() / 2.0)).abs());
    require(
        e1 <= 1e-12 && e2 <= 1e-12,
        format!("|Λ⋆ - e/4| = {e1:.1e}, |a⋆ - (1 - √e)/2| = {e2:.1e}"),
    )
}

fn ls_below_wlh_radial() -> Outcome {
    let mut margin = f64::INFINITY;
    for d in 3..=5 {
        let lo = a_star(d).map_err(|e| e.to_string())? + 1e-3;
        let hi = a_crit(d) - 1e-3;
        let c_ls = gross_ls(d).map_err(|e| e.to_string())?.value;
        for i in 0..20 {
            let a = lo + (hi - lo) * f64::from(i) / 19.0;
            let c = wlh_radial(f64::from(d) / 4.0, a, d).map_err(|e| e.to_string())?.value;
            margin = margin.min(c - c_ls);
        }
    }
    require(margin > 0.0, format!("min C*_WLH - C_LS = {margin:.3e} over 60 points"))
}

fn radial_minimizer() -> Outcome {
    let grid = GridSpec {
        l: 20.0,
        n_s: 801,
        ..GridSpec::default()
    };
    let mut worst: f64 = 0.0;
    for theta in [0.8, 0.9, 1.0] {
        for a in [0.0, -1.0] {
            let pr = make_ckn_params(3, a, 4.0, theta).map_err(|e| e.to_string())?;
            let run = minimize_radial_ckn(&pr, &grid).map_err(|e| e.to_string())?;
            let exact = ckn_radial(theta, 4.0, a, 3).map_err(|e| e.to_string())?.value;
            worst = worst.max(rel(run.constant_estimate, exact));
        }
    }
    let pr = make_wlh_params(3, 0.0, 1.0).map_err(|e| e.to_string())?;
    let run = minimize_wlh(&pr, &grid.radial()).map_err(|e| e.to_string())?;
    let wlh = rel(
        run.constant_estimate,
        wlh_radial(1.0, 0.0, 3).map_err(|e| e.to_string())?.value,
    );
    require(worst <= 1e-2 && wlh <= 1e-2, format!("ckn {worst:.2e}, wlh {wlh:.2e}"))
}

fn r_split() -> Outcome {
    let (p, d) = (3.0, 5);
    let m = moments(&solve_ground_state(p, d, DEFAULT_TOL).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut split: f64 = 0.0;
    for a in [-2.0, -1.0, 0.0, 1.0, 1.4] {
        let r = r_expansion(a, p, d, &m).map_err(|e| e.to_string())?;
        split = split.max((r.r_direct - r.r_value).abs());
    }
    let r = r_expansion(a_crit(d), p, d, &m).map_err(|e| e.to_string())?;
    let closed = -(10.0 + r.t) / 66.0;
    let at_c = rel(r.r_direct, closed).max(rel(r_at_critical_weight(p, d, r.t), closed));
    require(
        split <= 1e-8 && at_c <= 1e-6,
        format!("split {split:.1e}, R(a_c) vs -(10+t)/66 {at_c:.1e} at t = {:.10}", r.t),
    )
}

fn existence_interval() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [5, 6] {
        for p in [2.5, 3.0] {
            let iv = a_bar_existence(p, d).map_err(|e| format!("d={d} p={p}: {e}"))?;
            ok &= iv.lower < iv.upper && iv.upper == a_crit(d);
            parts.push(format!("d={d} p={p}: ({:.6}, {})", iv.lower, iv.upper));
        }
    }
    require(ok, parts.join("; "))
}

fn gn_comparison() -> Outcome {
    let (p, d) = (4.0, 3);
    let c_gn = gn_constant(p, d).map_err(|e| e.to_string())?.value;
    let theta = theta_lower(p, d).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = vec![format!("C_GN = {c_gn:.8}")];
    for a in [-2.0, -1.0, 0.0] {
        let c = ckn_radial(theta, p, a, d).map_err(|e| e.to_string())?.value;
        let holds = c_gn <= c * (1.0 + 1e-6);
        ok &= holds;
        parts.push(format!(
            "a={a}: radial {c:.6} {}",
            if holds { "ok" } else { "violated" }
        ));
    }
    require(ok, parts.join(", "))
}

fn p2_nonattainment() -> Outcome {
    let grid = GridSpec::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.0, -1.0] {
        let limit = 1.0 / ckn_p2_constant(0.5, a, 3).map_err(|e| e.to_string())?.value;
        let mut excess = Vec::new();
        for n in [4.0, 8.0, 16.0] {
            excess.push(spreading_sequence_demo(0.5, a, 3, n, &grid).map_err(|e| e.to_string())? - limit);
        }
        ok &= excess.iter().all(|&x| x > 0.0) && excess.windows(2).all(|w| w[1] < w[0]);
        for w in excess.windows(2) {
            let ratio = w[0] / w[1];
            ok &= (ratio - 4.0).abs() <= 0.2 * 4.0;
            parts.push(format!("{ratio:.3}"));
        }
    }
    require(ok, format!("ratios {}", parts.join(", ")))
}

fn symmetry_breaking() -> Outcome {
    let grid = GridSpec {
        n_s: 801,
        n_xi: 65,
        ..GridSpec::default()
    };
    let broken = make_ckn_params(2, a_bar_sb(4.0, 2) - 3.0, 4.0, 1.0).map_err(|e| e.to_string())?;
    let rb = detect_symmetry_breaking(&broken, &grid).map_err(|e| e.to_string())?;
    let sym = make_ckn_params(3, a_crit(3) - 0.1, 4.0, 1.0).map_err(|e| e.to_string())?;
    let rs = detect_symmetry_breaking(&sym, &grid).map_err(|e| e.to_string())?;
    require(
        rb.broken && rb.gap > 1e-3 && !rs.broken,
        format!(
            "d=2 broken={} gap {:.3e}; d=3 broken={} gap {:.1e}",
            rb.broken, rb.gap, rs.broken, rs.gap
        ),
    )
}

fn property_suites() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20);
    let mut violations = 0usize;
    let mut not_strict = 0usize;
    for _ in 0..10_000 {
        let x = 10f64.powf(rng.gen_range(-3.0..3.0));
        let y = 10f64.powf(rng.gen_range(-3.0..3.0));
        let eta = rng.gen_range(0.0..=1.0);
        let gap = interpolation_gap(x, y, eta);
        if gap < -1e-12 {
            violations += 1;
        }
        if (x - y).abs() > 1e-6 && eta > 0.0 && eta < 1.0 && gap <= 0.0 {
            not_strict += 1;
        }
    }
    for _ in 0..10_000 {
        let x = rng.gen_range(0.0..3.0);
        let y = rng.gen_range(0.0..3.0);
        let eta = rng.gen_range(0.01..0.99);
        if young_gap(x, y, eta) < -1e-12 {
            violations += 1;
        }
    }
    let grid = GridSpec {
        l: 3.0,
        n_s: 31,
        n_xi: 5,
        ..GridSpec::default()
    };
    let geo = Geometry::new(3, &grid).map_err(|e| e.to_string())?;
    for _ in 0..1000 {
        let w: Vec<f64> = (0..geo.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for p in [2.5, 3.0, 4.0] {
            if entropy_holder_gap(&geo, &w, p) < -1e-12 {
                violations += 1;
            }
        }
    }
    require(
        violations == 0 && not_strict == 0,
        format!("{violations} violations, {not_strict} non-strict off-diagonal samples"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"mode": "ckn", "d": 3, "a": {"min": -1.5, "max": 0.4, "count": 5},
            "p": {"min": 2.5, "max": 5.5, "count": 4}, "theta": "critical",
            "run_minimizer": true, "grid": {"l": 16, "n_s": 201, "n_xi": 9}}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("regions{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_ckn"))
            .arg("regions")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env("CKN_WORKERS", workers)
            .env("RUST_LOG", "error")
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("ckn regions exited with {status}"));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count();
    require(
        outputs[0] == outputs[1] && rows > 2,
        format!(
            "{} bytes, {rows} lines, identical = {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            id: 1,
            name: "ground-state moment identities",
            budget: secs(10),
            run: identities,
        },
        Criterion {
            id: 2,
            name: "symmetry threshold at a-bar",
            budget: secs(1),
            run: threshold_identity,
        },
        Criterion {
            id: 3,
            name: "Lambda-star and a-star in d = 3",
            budget: secs(1),
            run: lambda_star_d3,
        },
        Criterion {
            id: 4,
            name: "log-Sobolev below radial WLH",
            budget: secs(1),
            run: ls_below_wlh_radial,
        },
        Criterion {
            id: 5,
            name: "radial minimizer vs closed form",
            budget: secs(120),
            run: radial_minimizer,
        },
        Criterion {
            id: 6,
            name: "expansion coefficient split",
            budget: secs(5),
            run: r_split,
        },
        Criterion {
            id: 7,
            name: "existence interval nonempty",
            budget: secs(10),
            run: existence_interval,
        },
        Criterion {
            id: 8,
            name: "C_GN below radial CKN",
            budget: secs(10),
            run: gn_comparison,
        },
        Criterion {
            id: 9,
            name: "p = 2 spreading sequence",
            budget: secs(5),
            run: p2_nonattainment,
        },
        Criterion {
            id: 10,
            name: "symmetry breaking sign",
            budget: secs(600),
            run: symmetry_breaking,
        },
        Criterion {
            id: 11,
            name: "inequality property suites",
            budget: secs(10),
            run: property_suites,
        },
        Criterion {
            id: 12,
            name: "regions determinism",
            budget: None,
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let over = c.budget.map_or(false, |b| elapsed > b);
        let (pass, detail) = match outcome {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {} ({:.2}s) {detail}",
            c.id,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
