//! Radial ground state of `-Δu + u = u^{p-1}` and the quantities built on it.
//!
//! The profile is found by shooting on `u(0)`. Bisection pins `u(0)` down to
//! a few ulps, after which the two bracketing trajectories still separate
//! exponentially (the growing mode `e^{r}` is always present). The solution
//! is kept up to the radius where they disagree at `1e-6` relative, and the
//! rest of the decaying branch is rebuilt from the Riccati form of the
//! equation, which is stable when integrated inwards.

use std::io::Write;

use crate::constants::{ConstantKind, ConstantParams, ConstantValue};
use crate::error::{Error, ParamError, Result};
use crate::ode::{Dp45, State};
use crate::params::{a_crit, critical_exponent, theta_lower};
use crate::quadrature::{integrate, Rule};
use crate::special::sphere_area;

/// Default spacing of the output grid.
pub const DEFAULT_STEP: f64 = 0.004;
/// Default relative bisection tolerance on `u(0)`.
pub const DEFAULT_TOL: f64 = 1e-14;

const R_CAP: f64 = 50.0;
const FLOOR: f64 = 1e-10;
const MATCH_REL: f64 = 1e-6;
const MATCH_MAX: f64 = 1e-3;
const MAX_BISECTIONS: usize = 200;
const IDENTITY_FAIL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub p: f64,
    pub d: i32,
    /// Uniform nodes `0, h, 2h, ...` up to `r_max`.
    pub r_grid: Vec<f64>,
    pub u_values: Vec<f64>,
    pub du_values: Vec<f64>,
    pub u0: f64,
    pub r_max: f64,
    /// Radius beyond which the shooting trajectory was replaced by the inward tail.
    pub r_match: f64,
    /// Fit of `u ≈ A r^{-(d-1)/2} e^{-rate r}` on the last decade of samples.
    pub tail_rate: f64,
    pub tail_amplitude: f64,
    pub bisections: usize,
}

impl RadialProfile {
    pub fn step(&self) -> f64 {
        self.r_grid[1] - self.r_grid[0]
    }

    /// Largest `|u'' + (d-1)/r u' - u + u^{p-1}|` over interior nodes,
    /// relative to `max(u0, u0^{p-1})`, with `u''` from fourth-order central
    /// differences of `u'` (extended as an odd function through `r = 0`).
    pub fn max_ode_residual(&self) -> f64 {
        let h = self.step();
        let dm1 = f64::from(self.d - 1);
        let du = &self.du_values;
        let n = du.len();
        let at = |i: isize| if i < 0 { -du[(-i) as usize] } else { du[i as usize] };
        let mut worst = 0.0f64;
        for i in 1..n - 2 {
            let k = i as isize;
            let d2u = (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h);
            let r = self.r_grid[i];
            let u = self.u_values[i];
            let res = d2u + dm1 / r * du[i] - u + u.powf(self.p - 1.0);
            worst = worst.max(res.abs());
        }
        worst / self.u0.max(self.u0.powf(self.p - 1.0))
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.u_values.windows(2).all(|w| w[1] < w[0]) && self.u_values.iter().all(|&u| u > 0.0)
    }

    /// Samples as `r,u` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,u")?;
        for (r, u) in self.r_grid.iter().zip(&self.u_values) {
            writeln!(w, "{r:.16e},{u:.16e}")?;
        }
        Ok(())
    }
}

fn check_exponent(p: f64, d: i32) -> Result<()> {
    if d < 2 {
        return Err(ParamError::Dimension(d).into());
    }
    if !(p > 2.0) || !p.is_finite() || !critical_exponent(d)?.exceeds(p) {
        return Err(ParamError::Exponent(p).into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Overshoot,
    Undershoot,
}

struct Shot {
    outcome: Outcome,
    u: Vec<f64>,
    du: Vec<f64>,
}

fn shoot(p: f64, d: i32, u0: f64, h: f64) -> Shot {
    let dm1 = f64::from(d - 1);
    let df = f64::from(d);
    let rhs = move |r: f64, y: &State| {
        let nl = y[0].abs().powf(p - 2.0) * y[0];
        [y[1], -dm1 / r * y[1] + y[0] - nl]
    };
    let mut u = vec![u0];
    let mut du = vec![0.0];
    if u0 == 1.0 {
        // the constant solution, counted as an undershoot
        return Shot {
            outcome: Outcome::Undershoot,
            u,
            du,
        };
    }
    // series through the regular singular point
    let alpha = (u0 - u0.powf(p - 1.0)) / (2.0 * df);
    let beta = (1.0 - (p - 1.0) * u0.powf(p - 2.0)) * alpha / (4.0 * (df + 2.0));
    let y0 = [
        u0 + alpha * h * h + beta * h.powi(4),
        2.0 * alpha * h + 4.0 * beta * h.powi(3),
    ];
    let mut solver = Dp45::new(rhs, h, y0, h, 1e-12, 1e-16 * u0);
    let n_cap = (R_CAP / h).round() as usize;
    let mut outcome = Outcome::Undershoot;
    for i in 1..=n_cap {
        if i > 1 && !solver.advance_to(i as f64 * h) {
            break;
        }
        let [ui, dui] = solver.y;
        if ui <= 0.0 {
            outcome = Outcome::Overshoot;
            break;
        }
        if dui >= 0.0 {
            break;
        }
        u.push(ui);
        du.push(dui);
    }
    Shot { outcome, u, du }
}

/// Shoot with the default grid spacing.
///
/// `tol` bounds the relative width of the final bracket on `u(0)`. Bisection
/// goes on past it while the bracketing trajectories separate too early to
/// hand over to the far-field tail, so coarse values only ever tighten.
pub fn solve_ground_state(p: f64, d: i32, tol: f64) -> Result<RadialProfile> {
    solve_ground_state_with(p, d, tol, DEFAULT_STEP)
}

pub fn solve_ground_state_with(p: f64, d: i32, tol: f64, h: f64) -> Result<RadialProfile> {
    check_exponent(p, d)?;
    if !(tol > 0.0) || !(h > 0.0 && h < 0.1) {
        return Err(Error::Domain(format!("tol = {tol}, h = {h}")));
    }
    let (mut lo, mut hi) = (1.0f64, 10.0f64);
    let mut lo_shot = shoot(p, d, lo, h);
    let mut hi_shot = shoot(p, d, hi, h);
    while hi_shot.outcome == Outcome::Undershoot {
        if hi > 1e6 {
            return Err(Error::NoGroundState { p, d });
        }
        lo = hi;
        lo_shot = hi_shot;
        hi *= 2.0;
        hi_shot = shoot(p, d, hi, h);
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hi - lo <= tol * hi && matched(&lo_shot, &hi_shot, hi).is_some() {
            break;
        }
        if iterations == MAX_BISECTIONS {
            return Err(Error::Convergence {
                iterations,
                residual: (hi - lo) / hi,
            });
        }
        iterations += 1;
        let s = shoot(p, d, mid, h);
        match s.outcome {
            Outcome::Overshoot => (hi, hi_shot) = (mid, s),
            Outcome::Undershoot => (lo, lo_shot) = (mid, s),
        }
    }
    let u0 = 0.5 * (lo + hi);

    let Some(j) = matched(&lo_shot, &hi_shot, u0) else {
        let n = lo_shot.u.len().min(hi_shot.u.len());
        return Err(Error::Convergence {
            iterations,
            residual: 0.5 * (lo_shot.u[n - 1] + hi_shot.u[n - 1]) / u0,
        });
    };
    let mut u: Vec<f64> = (0..=j).map(|i| 0.5 * (lo_shot.u[i] + hi_shot.u[i])).collect();
    let mut du: Vec<f64> = (0..=j).map(|i| 0.5 * (lo_shot.du[i] + hi_shot.du[i])).collect();

    let r_j = j as f64 * h;
    let r_end = (r_j + (u[j] / (FLOOR * u0)).ln() + 1.0).min(R_CAP);
    let n_end = j + ((r_end - r_j) / h).ceil() as usize;
    let (tail_u, tail_du) = inward_tail(p, d, h, j, n_end, u[j]);
    u.extend_from_slice(&tail_u[1..]);
    du.extend_from_slice(&tail_du[1..]);

    let r_grid: Vec<f64> = (0..u.len()).map(|i| i as f64 * h).collect();
    let (tail_rate, tail_amplitude) = fit_tail(&r_grid, &u, d);
    Ok(RadialProfile {
        p,
        d,
        r_max: *r_grid.last().unwrap(),
        r_grid,
        u_values: u,
        du_values: du,
        u0,
        r_match: r_j,
        tail_rate,
        tail_amplitude,
        bisections: iterations,
    })
}

/// Last node where the bracketing trajectories agree to `MATCH_REL`, provided
/// `u` has already decayed below `MATCH_MAX · u0` there.
fn matched(lo: &Shot, hi: &Shot, u0: f64) -> Option<usize> {
    let n = lo.u.len().min(hi.u.len());
    let m = (0..n)
        .find(|&i| {
            let (a, b) = (lo.u[i], hi.u[i]);
            (a - b).abs() > MATCH_REL * 0.5 * (a + b)
        })
        .unwrap_or(n);
    let j = m.checked_sub(1)?;
    let u = 0.5 * (lo.u[j] + hi.u[j]);
    (j >= 1 && u <= MATCH_MAX * u0).then_some(j)
}

/// Decaying branch on nodes `j..=n_end`, pinned to `u_j` at node `j`.
///
/// `q = u'/u` obeys `q' = 1 - u^{p-2} - q² - (d-1)q/r`; the decaying solution
/// attracts inward integration, so RK4 from the asymptotic root at `r_end`
/// converges onto it. The nonlinear term is resolved by fixed-point iteration.
fn inward_tail(p: f64, d: i32, h: f64, j: usize, n_end: usize, u_j: f64) -> (Vec<f64>, Vec<f64>) {
    let len = n_end - j + 1;
    let r = |k: usize| (j + k) as f64 * h;
    let dm1 = f64::from(d - 1);
    let f = |rr: f64, q: f64, g: f64| 1.0 - g - q * q - dm1 / rr * q;
    let mut g = vec![0.0; len];
    let mut u = vec![u_j; len];
    let mut q = vec![0.0; len];
    for _ in 0..50 {
        let c = dm1 / (2.0 * r(len - 1));
        q[len - 1] = -c - (c * c + 1.0 - g[len - 1]).sqrt();
        let mut ln_u = vec![0.0; len];
        for k in (1..len).rev() {
            let (r1, r0) = (r(k), r(k - 1));
            let rm = 0.5 * (r1 + r0);
            let gm = (g[k] * g[k - 1]).sqrt();
            let hs = -h;
            let q1 = q[k];
            let k1 = f(r1, q1, g[k]);
            let k2 = f(rm, q1 + 0.5 * hs * k1, gm);
            let k3 = f(rm, q1 + 0.5 * hs * k2, gm);
            let k4 = f(r0, q1 + hs * k3, g[k - 1]);
            q[k - 1] = q1 + hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            // ∫ q over the step by Simpson with the RK4 midpoint value
            let qm = q1 + 0.5 * hs * (k1 + k2 + k3 + k4) / 4.0;
            ln_u[k - 1] = ln_u[k] + hs / 6.0 * (q1 + 4.0 * qm + q[k - 1]);
        }
        let mut change = 0.0f64;
        for k in 0..len {
            let new = u_j * (ln_u[k] - ln_u[0]).exp();
            change = change.max(((new - u[k]) / new).abs());
            u[k] = new;
            g[k] = new.powf(p - 2.0);
        }
        if change < 1e-15 {
            break;
        }
    }
    let du = u.iter().zip(&q).map(|(a, b)| a * b).collect();
    (u, du)
}

fn fit_tail(r: &[f64], u: &[f64], d: i32) -> (f64, f64) {
    let u_last = *u.last().unwrap();
    let start = u.iter().position(|&v| v <= 10.0 * u_last).unwrap_or(0);
    let half = 0.5 * f64::from(d - 1);
    let pts: Vec<(f64, f64)> = (start..u.len())
        .map(|i| (r[i], (u[i] * r[i].powf(half)).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (-slope, (my - slope * mx).exp())
}

/// The six radial moments (without the sphere area).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub p: f64,
    pub d: i32,
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
    pub x2: f64,
    pub y2: f64,
    pub z2: f64,
}

impl MomentSet {
    /// `y2 / y0`.
    pub fn t(&self) -> f64 {
        self.y2 / self.y0
    }

    /// The four identities, each as `|Σ terms| / max |term|`.
    pub fn identity_residuals(&self) -> [f64; 4] {
        let d = f64::from(self.d);
        let p = self.p;
        let rel = |terms: &[f64]| {
            let s: f64 = terms.iter().sum();
            let m = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            s.abs() / m
        };
        [
            rel(&[self.x0, self.y0, -self.z0]),
            rel(&[(d - 2.0) / 2.0 * self.x0, d / 2.0 * self.y0, -d / p * self.z0]),
            rel(&[self.x2, -d * self.y0, self.y2, -self.z2]),
            rel(&[
                (d - 4.0) / 2.0 * self.x2,
                (d + 2.0) / 2.0 * self.y2,
                -(d + 2.0) / p * self.z2,
            ]),
        ]
    }

    pub fn max_identity_residual(&self) -> f64 {
        self.identity_residuals().into_iter().fold(0.0, f64::max)
    }
}

/// Moments by composite Simpson, checked against the identities.
pub fn moments(profile: &RadialProfile) -> Result<MomentSet> {
    let m = moments_with(profile, Rule::Simpson);
    for (i, &res) in m.identity_residuals().iter().enumerate() {
        if !(res <= IDENTITY_FAIL) {
            return Err(Error::InconsistentProfile {
                identity: i + 1,
                residual: res,
            });
        }
    }
    Ok(m)
}

/// Moments with the given rule and no consistency check.
pub fn moments_with(profile: &RadialProfile, rule: Rule) -> MomentSet {
    let h = profile.step();
    let d = profile.d;
    let p = profile.p;
    let r = &profile.r_grid;
    let u = &profile.u_values;
    let du = &profile.du_values;
    let moment = |weight: i32, n: f64, f: &dyn Fn(usize) -> f64| {
        let g: Vec<f64> = (0..r.len()).map(|i| f(i) * r[i].powi(weight)).collect();
        integrate(rule, &g, h) + tail_integral(profile, *g.last().unwrap(), n, weight)
    };
    let grad = |i: usize| du[i] * du[i];
    let sq = |i: usize| u[i] * u[i];
    let pw = |i: usize| u[i].powf(p);
    MomentSet {
        p,
        d,
        x0: moment(d - 1, 2.0, &grad),
        y0: moment(d - 1, 2.0, &sq),
        z0: moment(d - 1, p, &pw),
        x2: moment(d + 1, 2.0, &grad),
        y2: moment(d + 1, 2.0, &sq),
        z2: moment(d + 1, p, &pw),
    }
}

/// `∫_{r_max}^∞` of an integrand behaving like `r^{weight} u^n`, from the fitted tail.
fn tail_integral(profile: &RadialProfile, f_end: f64, n: f64, weight: i32) -> f64 {
    let big_r = profile.r_max;
    let k = n * profile.tail_rate;
    let s = f64::from(weight) - n * 0.5 * f64::from(profile.d - 1);
    // leading two terms of the asymptotic expansion of ∫ r^s e^{-kr}
    f_end / k * (1.0 + s / (k * big_r))
}

/// `1/C_GN = (ω x0)^ϑ (ω y0)^{1-ϑ} / (ω z0)^{2/p}` with `ω = |S^{d-1}|`.
pub fn gn_constant_from(m: &MomentSet) -> f64 {
    let th = theta_lower(m.p, m.d).expect("moments carry validated p, d");
    let w = sphere_area(m.d);
    let ln_inv = th * (w * m.x0).ln() + (1.0 - th) * (w * m.y0).ln() - 2.0 / m.p * (w * m.z0).ln();
    (-ln_inv).exp()
}

/// Optimal Gagliardo–Nirenberg constant
/// `‖u‖_p² ≤ C_GN ‖∇u‖₂^{2ϑ} ‖u‖₂^{2(1-ϑ)}`, from the ground state.
pub fn gn_constant(p: f64, d: i32) -> Result<ConstantValue> {
    let profile = solve_ground_state(p, d, DEFAULT_TOL)?;
    let m = moments(&profile)?;
    ConstantValue::new(
        gn_constant_from(&m),
        ConstantKind::Gn,
        ConstantParams {
            d,
            p: Some(p),
            ..Default::default()
        },
    )
}

/// `r(γ) = (2/d) γ (γ - a_c)`.
pub fn r_gamma(gamma: f64, d: i32) -> f64 {
    2.0 / f64::from(d) * gamma * (gamma - a_crit(d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RCoefficients {
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
    /// `r1 · t + r0`.
    pub r_value: f64,
    /// `R` evaluated directly on the measured moments.
    pub r_direct: f64,
}

/// `(R₁, R₀)` with `R = R₁ t + R₀`, after eliminating `x0, z0, x2, z2` through
/// the identities. Depends on `(a, p, d)` only.
pub fn r_split(a: f64, p: f64, d: i32) -> Result<(f64, f64)> {
    check_exponent(p, d)?;
    let (n1, n0) = r_split_scaled(a, p, d);
    let w = 1.0 - theta_lower(p, d)?;
    Ok((w * n1, w * n0))
}

/// `(R₁, R₀) / (1 - ϑ)`. With `y0 = 1` the identities give
/// `x0 = k`, `z0 = 1 + k` and `k(1 - ϑ) = k/(1 + k) = ϑ`, so after dividing
/// out `1 - ϑ` nothing degenerates as `p → 2*`.
fn r_split_scaled(a: f64, p: f64, d: i32) -> (f64, f64) {
    let df = f64::from(d);
    let b = a - a_crit(d) + df / p;
    let den = 2.0 * (df + 2.0) - p * (df - 4.0);
    let x2_t = (df + 2.0) * (p - 2.0) / den;
    let x2_c = 2.0 * df * (df + 2.0) / den;
    let (ra, ra1, rb) = (r_gamma(a, d), r_gamma(a + 1.0, d), r_gamma(b * p / 2.0, d));
    let n1 = ra * x2_t + ra1 - 2.0 / p * rb * (x2_t + 1.0);
    let n0 = ra * x2_c - 2.0 / p * rb * (x2_c - df);
    (n1, n0)
}

/// `R = θ r(a) x2/x0 + (1-θ) r(a+1) y2/y0 - (2/p) r(bp/2) z2/z0` at `θ = ϑ(p,d)`,
/// both directly and through [`r_split`].
pub fn r_expansion(a: f64, p: f64, d: i32, m: &MomentSet) -> Result<RCoefficients> {
    let (r1, r0) = r_split(a, p, d)?;
    let th = theta_lower(p, d)?;
    let b = a - a_crit(d) + f64::from(d) / p;
    let t = m.t();
    let r_direct = th * r_gamma(a, d) * m.x2 / m.x0 + (1.0 - th) * r_gamma(a + 1.0, d) * t
        - 2.0 / p * r_gamma(b * p / 2.0, d) * m.z2 / m.z0;
    Ok(RCoefficients {
        r0,
        r1,
        t,
        r_value: r1 * t + r0,
        r_direct,
    })
}

/// `R` at `a = a_c` in closed form.
pub fn r_at_critical_weight(p: f64, d: i32, t: f64) -> f64 {
    let df = f64::from(d);
    -(df - 4.0) / (2.0 * p) * (2.0 * df - (df - 2.0) * p) / (2.0 * (df + 2.0) - (df - 4.0) * p)
        * (2.0 * df + (p - 2.0) * t)
}

/// Open interval `(lower, upper)`; `lower` may be `-∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, a: f64) -> bool {
        a > self.lower && a < self.upper
    }
}

/// Exact quadratic through three points, as coefficients of `1, s, s²`.
fn quadratic_through(s: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    let [s0, s1, s2] = s;
    let [v0, v1, v2] = v;
    let d01 = (v1 - v0) / (s1 - s0);
    let d12 = (v2 - v1) / (s2 - s1);
    let c2 = (d12 - d01) / (s2 - s0);
    let c1 = d01 - c2 * (s0 + s1);
    let c0 = v0 - c1 * s0 - c2 * s0 * s0;
    [c0, c1, c2]
}

fn real_roots([c0, c1, c2]: [f64; 3]) -> Vec<f64> {
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if c2.abs() <= 1e-14 * scale {
        return if c1 != 0.0 { vec![-c0 / c1] } else { vec![] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    let mut out = vec![q / c2];
    if q != 0.0 {
        out.push(c0 / q);
    }
    out
}

/// Largest `(ā, a_c)` on which `R₁ < 0` and `R₀ < 0`, a sufficient condition
/// for `R < 0`.
///
/// Only the signs matter, so the scaled coefficients are used and `p = 2*`
/// is accepted as the limit of the interior case.
pub fn a_bar_existence(p: f64, d: i32) -> Result<Interval> {
    if d < 5 {
        return Err(ParamError::Dimension(d).into());
    }
    if !(p > 2.0) || !critical_exponent(d)?.admits(p) {
        return Err(ParamError::Exponent(p).into());
    }
    let a_c = a_crit(d);
    // both coefficients are quadratic in a; sample at s = a - a_c
    let s = [0.0, -1.0, -2.0];
    let vals = s.map(|si| r_split_scaled(a_c + si, p, d));
    let mut lower = f64::NEG_INFINITY;
    for v in [vals.map(|x| x.0), vals.map(|x| x.1)] {
        for root in real_roots(quadratic_through(s, v)) {
            if root < 0.0 {
                lower = lower.max(a_c + root);
            }
        }
    }
    let probe = if lower.is_finite() {
        0.5 * (lower + a_c)
    } else {
        a_c - 1.0
    };
    let (n1, n0) = r_split_scaled(probe, p, d);
    if !(n1 < 0.0 && n0 < 0.0) {
        return Err(Error::EmptyInterval { p, d });
    }
    Ok(Interval { lower, upper: a_c })
}
