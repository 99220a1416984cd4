use super::grid::{CylinderField, Geometry};
use crate::error::{Error, Result};
use crate::params::{CknParams, WlhParams};

const CLAMP: f64 = 1e-300;

/// `‖v‖_p^p` with the cylinder measure.
pub fn norm_p_pow(geo: &Geometry, v: &[f64], p: f64) -> f64 {
    v.iter().enumerate().map(|(k, x)| geo.mass(k) * x.abs().powf(p)).sum()
}

pub fn norm_p(geo: &Geometry, v: &[f64], p: f64) -> f64 {
    norm_p_pow(geo, v, p).powf(1.0 / p)
}

/// `∫ |v|² log(|v|² / ‖v‖₂²)`, with `0 · log 0 = 0`.
pub fn entropy(geo: &Geometry, v: &[f64]) -> f64 {
    let n = geo.mass_norm_sq(v);
    v.iter()
        .enumerate()
        .map(|(k, x)| {
            let q = x * x / n;
            geo.mass(k) * n * q * q.max(CLAMP).ln()
        })
        .sum()
}

/// `(‖∇v‖² + Λ‖v‖²)^θ ‖v‖₂^{2(1-θ)} / ‖v‖_p²`.
pub fn energy_ckn(field: &CylinderField, params: &CknParams) -> Result<f64> {
    let geo = checked(field, params.d)?;
    Ok(ckn_log(&geo, &field.values, params, None)?.exp())
}

/// `(‖∇w‖²/‖w‖₂² + Λ) · exp[-(1/2γ) ∫ ŵ² log ŵ²]` with `ŵ = w/‖w‖₂`.
pub fn energy_wlh(field: &CylinderField, params: &WlhParams) -> Result<f64> {
    let geo = checked(field, params.d)?;
    Ok(wlh_log(&geo, &field.values, params, None)?.exp())
}

fn checked(field: &CylinderField, d: i32) -> Result<Geometry> {
    if field.d != d {
        return Err(Error::Grid(format!(
            "field built for d = {}, parameters have d = {d}",
            field.d
        )));
    }
    field.geometry()
}

/// `log E_θ`, and its gradient with respect to the nodal values when `grad` is given.
pub(crate) fn ckn_log(geo: &Geometry, v: &[f64], pr: &CknParams, grad: Option<&mut [f64]>) -> Result<f64> {
    let (th, p, lam) = (pr.theta, pr.p, pr.lambda);
    let n = geo.mass_norm_sq(v);
    if !(n > 0.0) {
        return Err(Error::ZeroField);
    }
    let g = geo.dirichlet(v);
    let pp = norm_p_pow(geo, v, p);
    let q = g + lam * n;
    let value = th * q.ln() + (1.0 - th) * n.ln() - 2.0 / p * pp.ln();
    if let Some(out) = grad {
        geo.apply_k(v, out);
        for (k, o) in out.iter_mut().enumerate() {
            let m = geo.mass(k);
            let x = v[k];
            let kv = *o;
            *o = 2.0 * th * (kv + lam * m * x) / q + 2.0 * (1.0 - th) * m * x / n
                - 2.0 * m * x.abs().powf(p - 2.0) * x / pp;
        }
    }
    Ok(value)
}

/// `log F_γ`, and its gradient when `grad` is given.
pub(crate) fn wlh_log(geo: &Geometry, v: &[f64], pr: &WlhParams, grad: Option<&mut [f64]>) -> Result<f64> {
    let (gam, lam) = (pr.gamma, pr.lambda);
    let n = geo.mass_norm_sq(v);
    if !(n > 0.0) {
        return Err(Error::ZeroField);
    }
    let g = geo.dirichlet(v);
    let t = g / n;
    // ⟨log ŵ²⟩ in the probability measure ŵ² dμ
    let mut mean_log = 0.0;
    for (k, x) in v.iter().enumerate() {
        let q = x * x / n;
        mean_log += geo.mass(k) * q * q.max(CLAMP).ln();
    }
    let value = (t + lam).ln() - mean_log / (2.0 * gam);
    if let Some(out) = grad {
        geo.apply_k(v, out);
        for (k, o) in out.iter_mut().enumerate() {
            let m = geo.mass(k);
            let x = v[k];
            let lq = (x * x / n).max(CLAMP).ln();
            *o = 2.0 * (*o - t * m * x) / (n * (t + lam)) - m * x * (lq - mean_log) / (gam * n);
        }
    }
    Ok(value)
}
