//! Closed-form constants, symmetry-breaking curves and existence thresholds.
//!
//! The radial optimal constants on the cylinder `R × S^{d-1}` are products of
//! powers of positive factors whose magnitudes span many decades, so every
//! product is accumulated as a sum of `exponent · ln(factor)` and exponentiated
//! once at the end.

use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

use crate::error::{Error, ParamError, Result};
use crate::params::{a_crit, critical_exponent, lambda, theta_lower, CknParams, Exponent, WlhParams};
use crate::special::{ln_gamma, ln_sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    CknRadial,
    WlhRadial,
    GrossLs,
    Gn,
    P2Exact,
}

/// The parameter tuple a constant was generated from. Unused entries are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstantParams {
    pub d: i32,
    pub a: Option<f64>,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantValue {
    pub value: f64,
    pub kind: ConstantKind,
    pub params: ConstantParams,
    /// The constant is an infimum that no admissible function attains.
    pub no_extremal: bool,
}

impl ConstantValue {
    pub(crate) fn new(value: f64, kind: ConstantKind, params: ConstantParams) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!("{kind:?} evaluated to {value}")));
        }
        Ok(Self {
            value,
            kind,
            params,
            no_extremal: false,
        })
    }
}

fn require_dimension(d: i32, min: i32) -> Result<()> {
    if d < min {
        Err(ParamError::Dimension(d).into())
    } else {
        Ok(())
    }
}

fn ln_ckn_radial_base(theta: f64, p: f64, d: i32) -> Result<f64> {
    require_dimension(d, 2)?;
    if !p.is_finite() || !critical_exponent(d)?.admits(p) {
        return Err(ParamError::Exponent(p).into());
    }
    if p <= 2.0 {
        return Err(Error::BoundaryExponent(p));
    }
    let theta_min = theta_lower(p, d)?;
    if !(theta >= theta_min && theta <= 1.0) {
        return Err(ParamError::Theta(theta).into());
    }
    let q = 2.0 + (2.0 * theta - 1.0) * p;
    if !(q > 0.0) {
        return Err(Error::Domain(format!("2 + (2θ-1)p = {q} must be positive")));
    }
    let m = 2.0 / (p - 2.0);
    let ln_gamma_ratio = ln_gamma(m + 0.5) - 0.5 * PI.ln() - ln_gamma(m);
    let terms = [
        (-(p - 2.0) / p, ln_sphere_area(d)),
        ((p - 2.0) / (2.0 * p), ((p - 2.0) * (p - 2.0) / q).ln()),
        (theta, (q / (2.0 * p * theta)).ln()),
        ((6.0 - p) / (2.0 * p), (4.0 / (p + 2.0)).ln()),
        ((p - 2.0) / p, ln_gamma_ratio),
    ];
    Ok(terms.iter().map(|(e, l)| e * l).sum())
}

/// Radial optimal constant at `Λ = 1` (that is, `a = a_c - 1`).
///
/// Requires `2 < p ≤ 2*` and `ϑ(p,d) ≤ θ ≤ 1`; `p = 2` is rejected since the
/// Gamma factor diverges there.
pub fn ckn_radial_base(theta: f64, p: f64, d: i32) -> Result<ConstantValue> {
    let v = ln_ckn_radial_base(theta, p, d)?.exp();
    ConstantValue::new(
        v,
        ConstantKind::CknRadial,
        ConstantParams {
            d,
            a: Some(a_crit(d) - 1.0),
            p: Some(p),
            theta: Some(theta),
            gamma: None,
        },
    )
}

/// Exponent of `Λ` in the radial constant: `(p-2)/(2p) - θ`.
pub fn ckn_lambda_exponent(theta: f64, p: f64) -> f64 {
    (p - 2.0) / (2.0 * p) - theta
}

/// Radial optimal constant `C*(θ,p,a_c-1) · Λ^{(p-2)/(2p) - θ}`.
pub fn ckn_radial(theta: f64, p: f64, a: f64, d: i32) -> Result<ConstantValue> {
    require_dimension(d, 2)?;
    if !(a < a_crit(d)) {
        return Err(ParamError::Weight { a, a_c: a_crit(d) }.into());
    }
    let ln_base = ln_ckn_radial_base(theta, p, d)?;
    let v = (ln_base + ckn_lambda_exponent(theta, p) * lambda(a, d).ln()).exp();
    ConstantValue::new(
        v,
        ConstantKind::CknRadial,
        ConstantParams {
            d,
            a: Some(a),
            p: Some(p),
            theta: Some(theta),
            gamma: None,
        },
    )
}

/// [`ckn_radial`] on a validated tuple.
pub fn ckn_radial_for(params: &CknParams) -> Result<ConstantValue> {
    ckn_radial(params.theta, params.p, params.a, params.d)
}

fn ln_wlh_radial_base(gamma: f64, d: i32) -> Result<f64> {
    require_dimension(d, 2)?;
    if !(gamma >= 0.25) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "gamma = {gamma}: the radial constant needs gamma >= 1/4"
        )));
    }
    let ln_den = (2.0f64).ln() + (f64::from(d) + 1.0) * PI.ln() + 1.0;
    let ln_g = ln_gamma(f64::from(d) / 2.0);
    if gamma == 0.25 {
        return Ok(2.0 * ln_g - ln_den);
    }
    let k = 1.0 / (4.0 * gamma);
    let s = 4.0 * gamma - 1.0;
    Ok(-(4.0 * gamma).ln() + (1.0 - k) * s.ln() - k * ln_den + 2.0 * k * ln_g)
}

/// Radial optimal constant of the logarithmic Hardy inequality at `Λ = 1`.
pub fn wlh_radial_base(gamma: f64, d: i32) -> Result<ConstantValue> {
    ConstantValue::new(
        ln_wlh_radial_base(gamma, d)?.exp(),
        ConstantKind::WlhRadial,
        ConstantParams {
            d,
            a: Some(a_crit(d) - 1.0),
            gamma: Some(gamma),
            ..Default::default()
        },
    )
}

/// Radial optimal constant `C*_WLH(γ, a_c-1) · Λ^{-1 + 1/(4γ)}`.
pub fn wlh_radial(gamma: f64, a: f64, d: i32) -> Result<ConstantValue> {
    require_dimension(d, 2)?;
    if !(a < a_crit(d)) {
        return Err(ParamError::Weight { a, a_c: a_crit(d) }.into());
    }
    let ln_base = ln_wlh_radial_base(gamma, d)?;
    let expo = -1.0 + 1.0 / (4.0 * gamma);
    ConstantValue::new(
        (ln_base + expo * lambda(a, d).ln()).exp(),
        ConstantKind::WlhRadial,
        ConstantParams {
            d,
            a: Some(a),
            gamma: Some(gamma),
            ..Default::default()
        },
    )
}

pub fn wlh_radial_for(params: &WlhParams) -> Result<ConstantValue> {
    wlh_radial(params.gamma, params.a, params.d)
}

/// Gross' logarithmic Sobolev constant in scale-invariant form, `2/(π d e)`.
pub fn gross_ls(d: i32) -> Result<ConstantValue> {
    require_dimension(d, 1)?;
    ConstantValue::new(
        2.0 / (PI * f64::from(d) * E),
        ConstantKind::GrossLs,
        ConstantParams {
            d,
            ..Default::default()
        },
    )
}

/// Optimal constant `Λ^{-θ}` for `p = 2`; never attained.
pub fn ckn_p2_constant(theta: f64, a: f64, d: i32) -> Result<ConstantValue> {
    require_dimension(d, 2)?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(ParamError::Theta(theta).into());
    }
    if !(a < a_crit(d)) {
        return Err(ParamError::Weight { a, a_c: a_crit(d) }.into());
    }
    let mut c = ConstantValue::new(
        lambda(a, d).powf(-theta),
        ConstantKind::P2Exact,
        ConstantParams {
            d,
            a: Some(a),
            p: Some(2.0),
            theta: Some(theta),
            gamma: None,
        },
    )?;
    c.no_extremal = true;
    Ok(c)
}

/// Upper end `Θ(a,p,d)` of the proven symmetry-breaking range in `θ`.
pub fn theta_sb_threshold(a: f64, p: f64, d: i32) -> f64 {
    let d = f64::from(d);
    let bracket = (p + 2.0).powi(2) * (d * d + 4.0 * a * a - 4.0 * a * (d - 2.0)) - 4.0 * p * (p + 4.0) * (d - 1.0);
    (p - 2.0) / (32.0 * (d - 1.0) * p) * bracket
}

/// `ā(p,d) = a_c - 2√(d-1)/√((p-2)(p+2))`; below it symmetry breaks for every `θ`.
pub fn a_bar_sb(p: f64, d: i32) -> f64 {
    let df = f64::from(d);
    a_crit(d) - 2.0 * (df - 1.0).sqrt() / ((p - 2.0) * (p + 2.0)).sqrt()
}

/// `1/4 + (a-a_c)²/(d-1)`: logarithmic Hardy symmetry breaking holds below this `γ` when `a < -1/2`.
pub fn wlh_sb_threshold(a: f64, d: i32) -> f64 {
    0.25 + lambda(a, d) / (f64::from(d) - 1.0)
}

/// Proven symmetry-breaking region for the interpolation family.
pub fn ckn_sb_predicted(params: &CknParams) -> bool {
    if !(params.p > 2.0) {
        return false;
    }
    let (a, p, d) = (params.a, params.p, params.d);
    if a >= a_bar_sb(p, d) {
        params.theta < theta_sb_threshold(a, p, d)
    } else {
        true
    }
}

/// Proven symmetry-breaking region for the logarithmic Hardy family.
pub fn wlh_sb_predicted(params: &WlhParams) -> bool {
    params.a < -0.5 && params.gamma < wlh_sb_threshold(params.a, params.d)
}

/// `Λ_⋆ = (d-1) e (2^{d+1} π)^{-1/(d-1)} Γ(d/2)^{2/(d-1)}`, defined for `d ≥ 3`.
pub fn lambda_star(d: i32) -> Result<f64> {
    require_dimension(d, 3)?;
    let dm1 = f64::from(d) - 1.0;
    let ln =
        dm1.ln() + 1.0 - ((f64::from(d) + 1.0) * 2f64.ln() + PI.ln()) / dm1 + 2.0 * ln_gamma(f64::from(d) / 2.0) / dm1;
    Ok(ln.exp())
}

/// `a_⋆ = a_c - √Λ_⋆`: for `a ∈ (a_⋆, a_c)`, `C_LS < C*_WLH(d/4, a)`.
pub fn a_star(d: i32) -> Result<f64> {
    Ok(a_crit(d) - lambda_star(d)?.sqrt())
}

/// `κ₀` with `κ₀^θ = C*(1, 2*, a_c-1)^θ / C*(θ, p, a_c-1)` at `θ = ϑ(p,d)`.
pub fn kappa0(p: f64, d: i32) -> Result<f64> {
    require_dimension(d, 3)?;
    let crit = critical_exponent(d)?;
    if !(p > 2.0) || !crit.exceeds(p) {
        return Err(Error::BoundaryExponent(p));
    }
    let theta = theta_lower(p, d)?;
    let sobolev = ln_ckn_radial_base(1.0, crit.as_f64(), d)?;
    let interp = ln_ckn_radial_base(theta, p, d)?;
    Ok(((theta * sobolev - interp) / theta).exp())
}

/// Threshold `a₀*(p) = a_c - a_c · min{κ₀^{-d/(2(d-1))}, κ₀^{d/2}}` above which
/// the critical case `θ = ϑ(p,d)` has an extremal.
pub fn a0_star(p: f64, d: i32) -> Result<f64> {
    let k = kappa0(p, d)?;
    Ok(a0_star_from_kappa(k, d))
}

pub(crate) fn a0_star_from_kappa(kappa: f64, d: i32) -> f64 {
    let df = f64::from(d);
    let m = kappa.powf(-df / (2.0 * (df - 1.0))).min(kappa.powf(df / 2.0));
    a_crit(d) - a_crit(d) * m
}

/// All thresholds at one parameter point; entries undefined for the given `(p, d)` are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub theta_sb: f64,
    pub a_bar_sb: f64,
    pub wlh_gamma_sb: f64,
    pub a0_star: Option<f64>,
    pub a_star: Option<f64>,
    pub lambda_star: Option<f64>,
}

pub fn thresholds(a: f64, p: f64, d: i32) -> ThresholdReport {
    ThresholdReport {
        theta_sb: theta_sb_threshold(a, p, d),
        a_bar_sb: a_bar_sb(p, d),
        wlh_gamma_sb: wlh_sb_threshold(a, d),
        a0_star: a0_star(p, d).ok(),
        a_star: a_star(d).ok(),
        lambda_star: lambda_star(d).ok(),
    }
}

/// Whether `p` lies in the open range `(2, 2*)`.
pub fn is_interior_exponent(p: f64, d: i32) -> bool {
    p > 2.0 && critical_exponent(d).map_or(false, |c: Exponent| c.exceeds(p))
}
