//! Projected Barzilai–Borwein descent.
//!
//! Both functionals are invariant under `v ↦ cv`, so projecting onto the
//! constraint is a rescaling. The gradient is taken in the `H¹` metric
//! `K + ΛM`: the angular part of `K` is diagonalized once per run, leaving a
//! tridiagonal solve in `s` for every angular mode.

use std::collections::VecDeque;
use std::f64::consts::PI;

use log::{debug, warn};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::energy::{ckn_log, norm_p, wlh_log};
use super::grid::{CylinderField, Geometry, GridSpec};
use crate::constants::ckn_p2_constant;
use crate::error::{Error, Result};
use crate::params::{CknParams, WlhParams};

/// Relative gap above which [`detect_symmetry_breaking`] reports a broken symmetry.
pub const DEFAULT_GAP_THRESHOLD: f64 = 1e-3;

const NONMONOTONE_WINDOW: usize = 10;
const ARMIJO: f64 = 1e-4;
const BOUNDARY_WARN: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    /// `1 / energy` at the minimizer.
    pub constant_estimate: f64,
    pub energy: f64,
    pub field: CylinderField,
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub boundary_ratio: f64,
}

/// Everything in a [`MinimizeResult`] except the sampled field.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub d: i32,
    pub grid: GridSpec,
    pub constant_estimate: f64,
    pub energy: f64,
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub boundary_ratio: f64,
}

impl MinimizeResult {
    pub fn record(&self, grid: &GridSpec) -> RunRecord {
        RunRecord {
            d: self.field.d,
            grid: *grid,
            constant_estimate: self.constant_estimate,
            energy: self.energy,
            el_residual: self.el_residual,
            iterations: self.iterations,
            converged: self.converged,
            boundary_ratio: self.boundary_ratio,
        }
    }
}

/// Solves `(K + ΛM) z = g` mode by mode.
struct Preconditioner {
    n_s: usize,
    n_xi: usize,
    h: f64,
    /// Columns are `W`-orthonormal angular modes.
    phi: DMatrix<f64>,
    shift: Vec<f64>,
}

impl Preconditioner {
    fn new(geo: &Geometry, lambda: f64) -> Self {
        let n = geo.n_xi;
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (i, j, c) in geo.faces() {
            a[(i, i)] += c;
            a[(j, j)] += c;
            a[(i, j)] -= c;
            a[(j, i)] -= c;
        }
        let isq: Vec<f64> = geo.w.iter().map(|w| 1.0 / w.sqrt()).collect();
        let b = DMatrix::from_fn(n, n, |i, j| isq[i] * a[(i, j)] * isq[j]);
        let eig = SymmetricEigen::new(b);
        let phi = DMatrix::from_fn(n, n, |i, k| isq[i] * eig.eigenvectors[(i, k)]);
        let shift = eig
            .eigenvalues
            .iter()
            .map(|mu: &f64| geo.h * (mu.max(0.0) + lambda))
            .collect();
        Self {
            n_s: geo.n_s,
            n_xi: n,
            h: geo.h,
            phi,
            shift,
        }
    }

    fn solve(&self, g: &[f64], z: &mut [f64]) {
        let (ns, nx) = (self.n_s, self.n_xi);
        let mut modal = vec![0.0; ns * nx];
        for i in 0..ns {
            for k in 0..nx {
                let mut acc = 0.0;
                for j in 0..nx {
                    acc += self.phi[(j, k)] * g[i * nx + j];
                }
                modal[i * nx + k] = acc;
            }
        }
        // Thomas algorithm on (1/h) tridiag(-1, 2, -1) + shift
        let off = -1.0 / self.h;
        let mut cp = vec![0.0; ns];
        let mut dp = vec![0.0; ns];
        for k in 0..nx {
            let diag = 2.0 / self.h + self.shift[k];
            cp[0] = off / diag;
            dp[0] = modal[k] / diag;
            for i in 1..ns {
                let m = diag - off * cp[i - 1];
                cp[i] = off / m;
                dp[i] = (modal[i * nx + k] - off * dp[i - 1]) / m;
            }
            modal[(ns - 1) * nx + k] = dp[ns - 1];
            for i in (0..ns - 1).rev() {
                modal[i * nx + k] = dp[i] - cp[i] * modal[(i + 1) * nx + k];
            }
        }
        for i in 0..ns {
            for j in 0..nx {
                let mut acc = 0.0;
                for k in 0..nx {
                    acc += self.phi[(j, k)] * modal[i * nx + k];
                }
                z[i * nx + j] = acc;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative `L²` norm of the Riesz representative of `d log E`; zero exactly
/// at discrete critical points.
fn el_residual(geo: &Geometry, v: &[f64], g: &[f64]) -> f64 {
    let dual: f64 = g.iter().enumerate().map(|(k, x)| x * x / geo.mass(k)).sum();
    0.5 * (dual * geo.mass_norm_sq(v)).sqrt()
}

struct Problem<'a> {
    geo: &'a Geometry,
    eval: &'a dyn Fn(&[f64], Option<&mut [f64]>) -> Result<f64>,
    normalize: &'a dyn Fn(&mut [f64]),
    lambda: f64,
}

fn descend(pb: &Problem, mut v: Vec<f64>, grid: &GridSpec) -> Result<(Vec<f64>, f64, f64, usize, bool)> {
    let geo = pb.geo;
    let pre = Preconditioner::new(geo, pb.lambda);
    let n = v.len();
    (pb.normalize)(&mut v);
    let mut g = vec![0.0; n];
    let mut f = (pb.eval)(&v, Some(&mut g))?;
    let mut z = vec![0.0; n];
    pre.solve(&g, &mut z);
    let h1 = |x: &[f64]| {
        let mut kx = vec![0.0; x.len()];
        geo.apply_k(x, &mut kx);
        dot(x, &kx) + pb.lambda * geo.mass_norm_sq(x)
    };
    let mut alpha = 0.05 * (h1(&v) / dot(&g, &z)).sqrt();
    let mut history: VecDeque<f64> = VecDeque::from([f]);
    let mut res = el_residual(geo, &v, &g);
    let mut v_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    for it in 0..grid.max_iter {
        if res < grid.tol {
            return Ok((v, f, res, it, true));
        }
        let gz = dot(&g, &z);
        let f_ref = history.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut tries = 0;
        let f_new = loop {
            for k in 0..n {
                v_new[k] = v[k] - alpha * z[k];
            }
            (pb.normalize)(&mut v_new);
            let trial = (pb.eval)(&v_new, Some(&mut g_new));
            match trial {
                Ok(fv) if fv <= f_ref - ARMIJO * alpha * gz => break fv,
                _ => {}
            }
            alpha *= 0.5;
            tries += 1;
            if tries > 60 {
                debug!("line search stalled at iteration {it}, residual {res:e}");
                return Ok((v, f, res, it, false));
            }
        };
        let s: Vec<f64> = v_new.iter().zip(&v).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        std::mem::swap(&mut v, &mut v_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        pre.solve(&g, &mut z);
        alpha = if sy > 0.0 { h1(&s) / sy } else { 2.0 * alpha };
        history.push_back(f);
        if history.len() > NONMONOTONE_WINDOW {
            history.pop_front();
        }
        res = el_residual(geo, &v, &g);
    }
    Ok((v, f, res, grid.max_iter, res < grid.tol))
}

fn finish(
    d: i32,
    grid: &GridSpec,
    v: Vec<f64>,
    log_e: f64,
    res: f64,
    iterations: usize,
    converged: bool,
) -> Result<MinimizeResult> {
    if !converged {
        return Err(Error::Convergence {
            iterations,
            residual: res,
        });
    }
    let field = CylinderField {
        d,
        l: grid.l,
        n_s: grid.n_s,
        n_xi: grid.n_xi,
        values: v,
    };
    let boundary_ratio = field.boundary_ratio();
    if boundary_ratio > BOUNDARY_WARN {
        warn!("field at s = ±L is {boundary_ratio:e} of its maximum; consider a larger L");
    }
    let energy = log_e.exp();
    Ok(MinimizeResult {
        constant_estimate: 1.0 / energy,
        energy,
        field,
        el_residual: res,
        iterations,
        converged,
        boundary_ratio,
    })
}

fn ckn_problem_run(params: &CknParams, grid: &GridSpec, init: &CylinderField) -> Result<MinimizeResult> {
    if !(params.p > 2.0) {
        return Err(Error::BoundaryExponent(params.p));
    }
    if init.n_s != grid.n_s || init.n_xi != grid.n_xi || init.d != params.d {
        return Err(Error::Grid("initial field does not match the grid".into()));
    }
    let geo = Geometry::new(params.d, grid)?;
    let p = params.p;
    let eval = |v: &[f64], g: Option<&mut [f64]>| ckn_log(&geo, v, params, g);
    let normalize = |v: &mut [f64]| {
        let c = 1.0 / norm_p(&geo, v, p);
        v.iter_mut().for_each(|x| *x *= c);
    };
    let pb = Problem {
        geo: &geo,
        eval: &eval,
        normalize: &normalize,
        lambda: params.lambda,
    };
    let (v, f, res, it, ok) = descend(&pb, init.values.clone(), grid)?;
    finish(params.d, grid, v, f, res, it, ok)
}

/// Profile `cosh(κ s)^{-2/(p-2)}` with `κ = (p-2)√Λ / 2`, the shape of the
/// radial extremals.
fn sech_guess(params: &CknParams, grid: &GridSpec) -> Result<CylinderField> {
    let k = 0.5 * (params.p - 2.0) * params.lambda.sqrt();
    let e = -2.0 / (params.p - 2.0);
    CylinderField::from_fn(params.d, grid, |s, _| (k * s).cosh().powf(e))
}

/// Minimize `E_θ` over fields depending on `s` only.
pub fn minimize_radial_ckn(params: &CknParams, grid: &GridSpec) -> Result<MinimizeResult> {
    let grid = grid.radial();
    let init = sech_guess(params, &grid)?;
    ckn_problem_run(params, &grid, &init)
}

/// Minimize `E_θ` over fields on `(s, ξ)`, starting from a slightly
/// anisotropic radial profile.
pub fn minimize_ckn(params: &CknParams, grid: &GridSpec) -> Result<MinimizeResult> {
    let mut init = sech_guess(params, grid)?;
    perturb(&mut init, 0.05)?;
    ckn_problem_run(params, grid, &init)
}

pub fn minimize_ckn_from(params: &CknParams, grid: &GridSpec, init: &CylinderField) -> Result<MinimizeResult> {
    ckn_problem_run(params, grid, init)
}

fn perturb(field: &mut CylinderField, eps: f64) -> Result<()> {
    let geo = field.geometry()?;
    for (k, v) in field.values.iter_mut().enumerate() {
        *v *= 1.0 + eps * geo.xi[k % geo.n_xi].cos();
    }
    Ok(())
}

/// Minimize `F_γ` under `‖w‖₂ = 1` from a Gaussian in `s`.
pub fn minimize_wlh(params: &WlhParams, grid: &GridSpec) -> Result<MinimizeResult> {
    let init = CylinderField::from_fn(params.d, grid, |s, x| {
        let base = (-0.5 * s * s).exp();
        if grid.n_xi > 1 {
            base * (1.0 + 0.05 * x.cos())
        } else {
            base
        }
    })?;
    minimize_wlh_from(params, grid, &init)
}

pub fn minimize_wlh_from(params: &WlhParams, grid: &GridSpec, init: &CylinderField) -> Result<MinimizeResult> {
    if init.n_s != grid.n_s || init.n_xi != grid.n_xi || init.d != params.d {
        return Err(Error::Grid("initial field does not match the grid".into()));
    }
    let geo = Geometry::new(params.d, grid)?;
    let eval = |v: &[f64], g: Option<&mut [f64]>| wlh_log(&geo, v, params, g);
    let normalize = |v: &mut [f64]| {
        let c = 1.0 / geo.mass_norm_sq(v).sqrt();
        v.iter_mut().for_each(|x| *x *= c);
    };
    let pb = Problem {
        geo: &geo,
        eval: &eval,
        normalize: &normalize,
        lambda: params.lambda,
    };
    let (v, f, res, it, ok) = descend(&pb, init.values.clone(), grid)?;
    finish(params.d, grid, v, f, res, it, ok)
}

#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub broken: bool,
    /// `(E_radial - E_full) / E_radial`.
    pub gap: f64,
    pub anisotropy: f64,
    pub radial: MinimizeResult,
    pub full: MinimizeResult,
}

pub fn detect_symmetry_breaking(params: &CknParams, grid: &GridSpec) -> Result<SymmetryReport> {
    detect_symmetry_breaking_with(params, grid, DEFAULT_GAP_THRESHOLD)
}

/// Radial run, then a full run started from the radial minimizer tilted by
/// `cos ξ`, the direction of the first unstable mode.
pub fn detect_symmetry_breaking_with(params: &CknParams, grid: &GridSpec, threshold: f64) -> Result<SymmetryReport> {
    if grid.n_xi < 2 {
        return Err(Error::Grid("symmetry detection needs n_xi ≥ 2".into()));
    }
    let radial = minimize_radial_ckn(params, grid)?;
    let mut init = radial.field.lift(grid.n_xi);
    perturb(&mut init, 0.1)?;
    let full = ckn_problem_run(params, grid, &init)?;
    let gap = (radial.energy - full.energy) / radial.energy;
    Ok(SymmetryReport {
        broken: gap > threshold,
        gap,
        anisotropy: full.field.anisotropy()?,
        radial,
        full,
    })
}

/// `E_θ[v_n]` at `p = 2` for `v_n(s) = n^{-1/2} v(s/n)`, `v = cos²(πs/2)` on `|s| < 1`.
///
/// At `p = 2` the energy reduces to `(‖∇v‖²/‖v‖² + Λ)^θ`, which decreases to
/// `Λ^θ = 1/C(θ, 2, a)` as the bump spreads.
pub fn spreading_sequence_demo(theta: f64, a: f64, d: i32, n: f64, grid: &GridSpec) -> Result<f64> {
    let limit = ckn_p2_constant(theta, a, d)?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(crate::error::ParamError::Theta(theta).into());
    }
    if !(n >= 1.0) {
        return Err(Error::Domain(format!("spreading factor n = {n} must be ≥ 1")));
    }
    if n >= grid.l {
        return Err(Error::GridOverflow { support: n, l: grid.l });
    }
    let grid = grid.radial();
    let scale = n.powf(-0.5);
    let field = CylinderField::from_fn(d, &grid, |s, _| {
        let x = s / n;
        if x.abs() < 1.0 {
            scale * (0.5 * PI * x).cos().powi(2)
        } else {
            0.0
        }
    })?;
    let geo = field.geometry()?;
    let nn = geo.mass_norm_sq(&field.values);
    let t = geo.dirichlet(&field.values) / nn;
    let lambda = (1.0 / limit.value).powf(1.0 / theta);
    Ok((t + lambda).powf(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::energy_ckn;
    use crate::params::make_ckn_params;

    fn small() -> GridSpec {
        GridSpec {
            l: 12.0,
            n_s: 241,
            n_xi: 9,
            tol: 1e-8,
            max_iter: 5000,
        }
    }

    #[test]
    fn preconditioner_inverts_h1_operator() {
        for d in [2, 3, 6] {
            let gr = small();
            let geo = Geometry::new(d, &gr).unwrap();
            let lam = 0.3;
            let pre = Preconditioner::new(&geo, lam);
            let v: Vec<f64> = (0..geo.len()).map(|k| ((k * 13 % 7) as f64 - 3.0) * 0.1).collect();
            let mut kv = vec![0.0; v.len()];
            geo.apply_k(&v, &mut kv);
            for (k, x) in kv.iter_mut().enumerate() {
                *x += lam * geo.mass(k) * v[k];
            }
            let mut back = vec![0.0; v.len()];
            pre.solve(&kv, &mut back);
            let err = v.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 1e-10, "d = {d}: {err}");
        }
    }

    #[test]
    fn radial_run_is_normalized_and_converged() {
        let pr = make_ckn_params(3, 0.0, 4.0, 0.8).unwrap();
        let r = minimize_radial_ckn(&pr, &small()).unwrap();
        assert!(r.converged && r.el_residual < 1e-8);
        let geo = r.field.geometry().unwrap();
        assert!((norm_p(&geo, &r.field.values, 4.0) - 1.0).abs() < 1e-12);
        let e = energy_ckn(&r.field, &pr).unwrap();
        assert!(((e - r.energy) / e).abs() < 1e-12);
    }

    #[test]
    fn wlh_run_keeps_unit_mass() {
        let pr = crate::params::make_wlh_params(3, 0.0, 1.0).unwrap();
        let r = minimize_wlh(&pr, &small().radial()).unwrap();
        let geo = r.field.geometry().unwrap();
        assert!((geo.mass_norm_sq(&r.field.values) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spreading_overflow() {
        let gr = GridSpec::default();
        assert!(matches!(
            spreading_sequence_demo(0.5, 0.0, 3, 25.0, &gr),
            Err(Error::GridOverflow { .. })
        ));
        let e1 = spreading_sequence_demo(0.5, 0.0, 3, 1.0, &gr).unwrap();
        assert!(e1 > 0.25f64.powf(0.5));
    }
}
