//! Cross-check suites run by `ckn verify`.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use anyhow::bail;
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    ClosedForms,
    Minimizer,
    All,
}

impl FromStr for Suite {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "identities" => Suite::Identities,
            "closed-forms" => Suite::ClosedForms,
            "minimizer" => Suite::Minimizer,
            "all" => Suite::All,
            _ => bail!("unknown suite `{s}` (identities, closed-forms, minimizer, all)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest residual, or smallest margin, seen by the check.
    pub worst: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, worst: f64, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed,
            worst,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, err: impl fmt::Display) -> Self {
        Check::new(name, false, f64::NAN, err.to_string())
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<24} worst={:.3e} {}", self.name, self.worst, self.detail)
    }
}

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

/// Turn an `Err` anywhere in a check body into a failed check.
fn guard(name: &'static str, body: impl FnOnce() -> anyhow::Result<Check>) -> Check {
    body().unwrap_or_else(|e| Check::failed(name, e))
}

pub fn pohozaev() -> Check {
    guard("pohozaev", || {
        let mut worst: f64 = 0.0;
        for (p, d) in [(3.0, 3), (4.0, 3), (2.5, 5), (3.0, 5)] {
            let m = moments(&solve_ground_state(p, d, DEFAULT_TOL)?)?;
            worst = worst.max(m.max_identity_residual());
        }
        Ok(Check::new("pohozaev", worst <= 1e-6, worst, "4 cases, tol 1e-6"))
    })
}

pub fn interpolation_inequality() -> Check {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let x = 10f64.powf(rng.gen_range(-3.0..3.0));
        let y = 10f64.powf(rng.gen_range(-3.0..3.0));
        let eta = rng.gen_range(0.0..=1.0);
        worst = worst.min(interpolation_gap(x, y, eta));
    }
    Check::new("interpolation", worst >= -1e-12, worst, "10^4 samples, min gap")
}

pub fn young_inequality() -> Check {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let x = rng.gen_range(0.0..3.0);
        let y = rng.gen_range(0.0..3.0);
        let eta = rng.gen_range(0.05..0.95);
        worst = worst.min(young_gap(x, y, eta));
    }
    Check::new("young", worst >= -1e-12, worst, "10^4 samples, min gap")
}

pub fn entropy_holder() -> Check {
    guard("entropy_holder", || {
        let grid = GridSpec {
            l: 3.0,
            n_s: 31,
            n_xi: 5,
            ..GridSpec::default()
        };
        let geo = Geometry::new(3, &grid)?;
        let mut rng = StdRng::seed_from_u64(3);
        let mut worst = f64::INFINITY;
        for _ in 0..1000 {
            let w: Vec<f64> = (0..geo.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for p in [2.5, 3.0, 4.0] {
                worst = worst.min(entropy_holder_gap(&geo, &w, p));
            }
        }
        Ok(Check::new(
            "entropy_holder",
            worst >= -1e-12,
            worst,
            "10^3 fields x 3 exponents, min gap",
        ))
    })
}

pub fn r_split_consistency() -> Check {
    guard("r_split", || {
        let (p, d) = (3.0, 5);
        let m = moments(&solve_ground_state(p, d, DEFAULT_TOL)?)?;
        let split = r_expansion(-1.0, p, d, &m)?;
        let e_split = (split.r_direct - split.r_value).abs();
        let at_c = r_expansion(a_crit(d), p, d, &m)?;
        let closed = -(10.0 + at_c.t) / 66.0;
        let e_closed = rel(at_c.r_direct, closed).max(rel(r_at_critical_weight(p, d, at_c.t), closed));
        Ok(Check::new(
            "r_split",
            e_split <= 1e-8 && e_closed <= 1e-6,
            e_split.max(e_closed),
            format!("split {e_split:.1e}, a=a_c {e_closed:.1e}"),
        ))
    })
}

pub fn theta_at_a_bar() -> Check {
    guard("theta_at_a_bar", || {
        let mut worst: f64 = 0.0;
        for d in 2..=10 {
            let top = critical_exponent(d)?.as_f64().min(10.0);
            for i in 1..=10 {
                let p = 2.0 + (top - 2.0) * f64::from(i) / 11.0;
                worst = worst.max((theta_sb_threshold(a_bar_sb(p, d), p, d) - 1.0).abs());
            }
        }
        Ok(Check::new("theta_at_a_bar", worst <= 1e-10, worst, "10x9 grid"))
    })
}

pub fn lambda_star_d3() -> Check {
    guard("lambda_star", || {
        let e1 = (lambda_star(3)? - E / 4.0).abs();
        let e2 = (a_star(3)? - (0.5 - E.sqrt() / 2.0)).abs();
        Ok(Check::new("lambda_star", e1.max(e2) <= 1e-12, e1.max(e2), "d = 3"))
    })
}

pub fn ls_below_radial() -> Check {
    guard("ls_below_radial", || {
        let mut margin = f64::INFINITY;
        for d in 3..=5 {
            let lo = a_star(d)? + 1e-3;
            let hi = a_crit(d) - 1e-3;
            let c_ls = gross_ls(d)?.value;
            for i in 0..20 {
                let a = lo + (hi - lo) * f64::from(i) / 19.0;
                let c = wlh_radial(f64::from(d) / 4.0, a, d)?.value;
                margin = margin.min((c - c_ls) / c_ls);
            }
        }
        Ok(Check::new(
            "ls_below_radial",
            margin > 0.0,
            margin,
            "d = 3..5, 20 weights, min rel margin",
        ))
    })
}

pub fn wlh_branch_continuity() -> Check {
    guard("wlh_branch", || {
        let mut worst: f64 = 0.0;
        for d in 2..=6 {
            let a = a_crit(d) - 1.0;
            let at = wlh_radial(0.25, a, d)?.value;
            let near = wlh_radial(0.25 + 1e-8, a, d)?.value;
            worst = worst.max(rel(near, at));
        }
        Ok(Check::new("wlh_branch", worst < 1e-6, worst, "gamma = 1/4 + 1e-8"))
    })
}

pub fn existence_interval() -> Check {
    guard("existence_interval", || {
        let mut detail = Vec::new();
        let mut ok = true;
        let mut width = f64::INFINITY;
        for d in [5, 6] {
            for p in [2.5, 3.0] {
                let iv = a_bar_existence(p, d)?;
                ok &= iv.lower < iv.upper;
                width = width.min(iv.upper - iv.lower);
                detail.push(format!("({d},{p}): {:.4}", iv.lower));
            }
        }
        Ok(Check::new("existence_interval", ok, width, detail.join(" ")))
    })
}

pub fn gn_below_radial() -> Check {
    guard("gn_below_radial", || {
        let c_gn = gn_constant(4.0, 3)?.value;
        let radial = ckn_radial(theta_lower(4.0, 3)?, 4.0, 0.0, 3)?.value;
        let margin = (radial - c_gn) / c_gn;
        Ok(Check::new(
            "gn_below_radial",
            margin > 0.0,
            margin,
            "(p,d) = (4,3), a = 0",
        ))
    })
}

pub fn radial_minimizer() -> Check {
    guard("radial_minimizer", || {
        let grid = GridSpec::default();
        let mut worst: f64 = 0.0;
        for a in [0.0, -1.0] {
            for theta in [0.8, 0.9, 1.0] {
                let pr = make_ckn_params(3, a, 4.0, theta)?;
                let run = minimize_radial_ckn(&pr, &grid)?;
                worst = worst.max(rel(run.constant_estimate, ckn_radial(theta, 4.0, a, 3)?.value));
            }
        }
        let pr = make_wlh_params(3, 0.0, 1.0)?;
        let run = minimize_wlh(&pr, &grid.radial())?;
        worst = worst.max(rel(run.constant_estimate, wlh_radial(1.0, 0.0, 3)?.value));
        Ok(Check::new(
            "radial_minimizer",
            worst <= 1e-2,
            worst,
            "7 runs vs closed forms",
        ))
    })
}

pub fn p2_spreading() -> Check {
    guard("p2_spreading", || {
        let grid = GridSpec::default();
        let mut ok = true;
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for a in [0.0, -1.0] {
            let limit = 1.0 / ckn_p2_constant(0.5, a, 3)?.value;
            let mut e = Vec::new();
            for n in [4.0, 8.0, 16.0] {
                e.push(spreading_sequence_demo(0.5, a, 3, n, &grid)? - limit);
            }
            ok &= e.iter().all(|&x| x > 0.0) && e[1] < e[0] && e[2] < e[1];
            for w in e.windows(2) {
                let dev = (w[0] / w[1] - 4.0).abs() / 4.0;
                worst = worst.max(dev);
                detail.push(format!("{:.2}", w[0] / w[1]));
            }
        }
        Ok(Check::new(
            "p2_spreading",
            ok && worst <= 0.2,
            worst,
            format!("ratios {}", detail.join(" ")),
        ))
    })
}

pub fn symmetry_breaking() -> Check {
    guard("symmetry_breaking", || {
        let grid = GridSpec::default();
        let broken = make_ckn_params(2, a_bar_sb(4.0, 2) - 3.0, 4.0, 1.0)?;
        let rb = detect_symmetry_breaking(&broken, &grid)?;
        let sym = make_ckn_params(3, a_crit(3) - 0.1, 4.0, 1.0)?;
        let rs = detect_symmetry_breaking(&sym, &grid)?;
        Ok(Check::new(
            "symmetry_breaking",
            rb.broken && rb.gap > 1e-3 && !rs.broken,
            rb.gap,
            format!("gap {:.3e} (d=2), {:.3e} (d=3)", rb.gap, rs.gap),
        ))
    })
}

pub fn checks(suite: Suite) -> Vec<Check> {
    let identities: [fn() -> Check; 5] = [
        pohozaev,
        interpolation_inequality,
        young_inequality,
        entropy_holder,
        r_split_consistency,
    ];
    let closed: [fn() -> Check; 5] = [
        theta_at_a_bar,
        lambda_star_d3,
        ls_below_radial,
        wlh_branch_continuity,
        existence_interval,
    ];
    let minimizer: [fn() -> Check; 4] = [gn_below_radial, radial_minimizer, p2_spreading, symmetry_breaking];
    let mut run: Vec<fn() -> Check> = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        run.extend(identities);
    }
    if matches!(suite, Suite::ClosedForms | Suite::All) {
        run.extend(closed);
    }
    if matches!(suite, Suite::Minimizer | Suite::All) {
        run.extend(minimizer);
    }
    run.into_iter().map(|f| f()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for c in checks(Suite::Identities).into_iter().chain(checks(Suite::ClosedForms)) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!("closed-forms".parse::<Suite>().unwrap(), Suite::ClosedForms);
        assert!("everything".parse::<Suite>().is_err());
    }
}
