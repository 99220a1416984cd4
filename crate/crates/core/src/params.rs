//! Parameter arithmetic and admissibility checks.
//!
//! Every quantity downstream is a function of the dimension `d`, the weight
//! exponent `a` and either the pair `(p, theta)` (interpolation family) or the
//! entropy parameter `gamma` (logarithmic Hardy family). The validated tuples
//! carry their derived quantities so callers never recompute them by hand.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::ParamError;

/// An exponent that may be `+∞` (the critical Sobolev exponent for `d ≤ 2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    /// `true` when `p` does not exceed this exponent.
    pub fn admits(self, p: f64) -> bool {
        match self {
            Exponent::Finite(q) => p <= q,
            Exponent::Infinite => p.is_finite(),
        }
    }

    /// `true` when `p` is strictly below this exponent.
    pub fn exceeds(self, p: f64) -> bool {
        match self {
            Exponent::Finite(q) => p < q,
            Exponent::Infinite => p.is_finite(),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    /// Lossy view as `f64`, mapping the sentinel to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(q) => q,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

/// Critical exponent `2* = 2d/(d-2)` for `d ≥ 3`, `+∞` for `d ∈ {1, 2}`.
pub fn critical_exponent(d: i32) -> Result<Exponent, ParamError> {
    match d {
        d if d <= 0 => Err(ParamError::Dimension(d)),
        1 | 2 => Ok(Exponent::Infinite),
        d => {
            let d = f64::from(d);
            Ok(Exponent::Finite(2.0 * d / (d - 2.0)))
        }
    }
}

/// Scaling-critical lower bound `ϑ(p,d) = d(p-2)/(2p)` for the interpolation parameter.
pub fn theta_lower(p: f64, d: i32) -> Result<f64, ParamError> {
    if d <= 0 {
        return Err(ParamError::Dimension(d));
    }
    if !(p >= 2.0) || !p.is_finite() {
        return Err(ParamError::Exponent(p));
    }
    // 2* = 2d/(d-2) is not exactly representable for every d; keep ϑ(2*, d) = 1
    let crit = critical_exponent(d)?;
    if p == crit.as_f64() {
        return Ok(1.0);
    }
    let th = f64::from(d) * (p - 2.0) / (2.0 * p);
    Ok(if crit.admits(p) { th.min(1.0) } else { th })
}

/// Largest exponent `p(θ,d) = 2d/(d-2θ)` compatible with `θ`; inverse of [`theta_lower`].
pub fn p_upper(theta: f64, d: i32) -> Result<Exponent, ParamError> {
    if d < 2 {
        return Err(ParamError::Dimension(d));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(ParamError::Theta(theta));
    }
    let d = f64::from(d);
    let den = d - 2.0 * theta;
    if den == 0.0 {
        Ok(Exponent::Infinite)
    } else {
        Ok(Exponent::Finite(2.0 * d / den))
    }
}

/// Critical weight `a_c = (d-2)/2`.
pub fn a_crit(d: i32) -> f64 {
    (f64::from(d) - 2.0) / 2.0
}

/// `Λ = (a_c - a)²`.
pub fn lambda(a: f64, d: i32) -> f64 {
    let g = a_crit(d) - a;
    g * g
}

fn check_dimension_and_weight(d: i32, a: f64) -> Result<(), ParamError> {
    if d < 2 {
        return Err(ParamError::Dimension(d));
    }
    if !(a < a_crit(d)) {
        return Err(ParamError::Weight { a, a_c: a_crit(d) });
    }
    Ok(())
}

/// Validated parameters of the weighted interpolation (CKN) family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CknParams {
    pub d: i32,
    pub a: f64,
    pub p: f64,
    pub theta: f64,
    pub a_c: f64,
    pub b: f64,
    pub lambda: f64,
    pub theta_min: f64,
    pub critical_exponent: Exponent,
    /// `p = 2` or `p = 2*`: admitted, but outside the open range the minimizers need.
    pub boundary: bool,
}

impl CknParams {
    pub fn new(d: i32, a: f64, p: f64, theta: f64) -> Result<Self, ParamError> {
        check_dimension_and_weight(d, a)?;
        let crit = critical_exponent(d)?;
        if !(p >= 2.0) || !crit.admits(p) {
            return Err(ParamError::Exponent(p));
        }
        let theta_min = theta_lower(p, d)?;
        if !(theta >= theta_min && theta <= 1.0) {
            return Err(ParamError::Theta(theta));
        }
        let a_c = a_crit(d);
        Ok(Self {
            d,
            a,
            p,
            theta,
            a_c,
            b: a - a_c + f64::from(d) / p,
            lambda: lambda(a, d),
            theta_min,
            critical_exponent: crit,
            boundary: p == 2.0 || p == crit.as_f64(),
        })
    }

    /// `θ` sits exactly on the scaling-critical value `ϑ(p,d)`.
    pub fn is_critical_theta(&self) -> bool {
        self.theta == self.theta_min
    }
}

/// Shorthand for [`CknParams::new`].
pub fn make_ckn_params(d: i32, a: f64, p: f64, theta: f64) -> Result<CknParams, ParamError> {
    CknParams::new(d, a, p, theta)
}

/// Validated parameters of the weighted logarithmic Hardy (WLH) family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WlhParams {
    pub d: i32,
    pub a: f64,
    pub gamma: f64,
    pub a_c: f64,
    pub lambda: f64,
}

impl WlhParams {
    pub fn new(d: i32, a: f64, gamma: f64) -> Result<Self, ParamError> {
        check_dimension_and_weight(d, a)?;
        let quarter_d = f64::from(d) / 4.0;
        let ok = gamma >= quarter_d && (d != 2 || gamma > 0.5) && gamma.is_finite();
        if !ok {
            return Err(ParamError::Gamma(gamma));
        }
        Ok(Self {
            d,
            a,
            gamma,
            a_c: a_crit(d),
            lambda: lambda(a, d),
        })
    }

    /// `γ = d/4`, the limit case of the existence theory.
    pub fn is_critical_gamma(&self) -> bool {
        self.gamma == f64::from(self.d) / 4.0
    }
}

/// Shorthand for [`WlhParams::new`].
pub fn make_wlh_params(d: i32, a: f64, gamma: f64) -> Result<WlhParams, ParamError> {
    WlhParams::new(d, a, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(4).unwrap(), Exponent::Finite(4.0));
        assert_eq!(critical_exponent(3).unwrap(), Exponent::Finite(6.0));
        assert_eq!(critical_exponent(2).unwrap(), Exponent::Infinite);
        assert_eq!(critical_exponent(1).unwrap(), Exponent::Infinite);
        assert!(matches!(critical_exponent(0), Err(ParamError::Dimension(0))));
        assert!(Exponent::Infinite.exceeds(1e300));
    }

    #[test]
    fn theta_lower_values() {
        assert_eq!(theta_lower(4.0, 3).unwrap(), 0.75);
        assert_eq!(theta_lower(2.0, 5).unwrap(), 0.0);
        assert_eq!(theta_lower(6.0, 3).unwrap(), 1.0);
        for d in 3..20 {
            let crit = critical_exponent(d).unwrap().as_f64();
            assert_eq!(theta_lower(crit, d).unwrap(), 1.0);
            assert!(CknParams::new(d, -1.0, crit, 1.0).unwrap().boundary);
        }
        assert!(matches!(theta_lower(1.5, 3), Err(ParamError::Exponent(_))));
    }

    #[test]
    fn p_upper_values() {
        assert_eq!(p_upper(1.0, 3).unwrap(), Exponent::Finite(6.0));
        assert_eq!(p_upper(0.0, 5).unwrap(), Exponent::Finite(2.0));
        assert_eq!(p_upper(0.75, 3).unwrap(), Exponent::Finite(4.0));
        assert_eq!(p_upper(1.0, 2).unwrap(), Exponent::Infinite);
    }

    #[test]
    fn ckn_construction() {
        let c = make_ckn_params(3, 0.0, 4.0, 0.8).unwrap();
        assert_eq!(c.a_c, 0.5);
        assert_eq!(c.b, 0.25);
        assert_eq!(c.lambda, 0.25);
        assert_eq!(c.theta_min, 0.75);
        assert!(!c.boundary);

        assert!(matches!(
            make_ckn_params(3, 0.5, 4.0, 0.8),
            Err(ParamError::Weight { .. })
        ));
        assert!(matches!(make_ckn_params(3, 0.0, 4.0, 0.7), Err(ParamError::Theta(_))));
        assert!(matches!(
            make_ckn_params(1, -1.0, 4.0, 0.8),
            Err(ParamError::Dimension(1))
        ));
        assert!(matches!(
            make_ckn_params(3, 0.0, 7.0, 1.0),
            Err(ParamError::Exponent(_))
        ));
        assert!(matches!(
            make_ckn_params(2, -1.0, f64::INFINITY, 1.0),
            Err(ParamError::Exponent(_))
        ));
    }

    #[test]
    fn ckn_boundary_flags() {
        assert!(make_ckn_params(3, 0.0, 2.0, 0.5).unwrap().boundary);
        let crit = make_ckn_params(3, 0.0, 6.0, 1.0).unwrap();
        assert!(crit.boundary);
        // b = a at the critical exponent
        assert_eq!(crit.b, crit.a);
        assert!(!make_ckn_params(2, 0.0 - 1.0, 100.0, 1.0).unwrap().boundary);
    }

    #[test]
    fn wlh_construction() {
        let w = make_wlh_params(3, -1.0, 1.0).unwrap();
        assert_eq!(w.lambda, 2.25);
        assert!(matches!(make_wlh_params(2, 0.0 - 0.5, 0.5), Err(ParamError::Gamma(_))));
        // a_c = 0 for d = 2, so a = 0 fails on the weight first
        assert!(matches!(make_wlh_params(2, 0.0, 0.5), Err(ParamError::Weight { .. })));
        let w = make_wlh_params(4, 0.0, 1.0).unwrap();
        assert!(w.is_critical_gamma());
        assert!(make_wlh_params(4, 0.0, 0.99).is_err());
    }

    proptest! {
        #[test]
        fn p_upper_inverts_theta_lower(d in 2i32..12, u in 0.0f64..1.0) {
            let p = match critical_exponent(d).unwrap() {
                Exponent::Finite(q) => 2.0 + u * (q - 2.0),
                Exponent::Infinite => 2.0 + 50.0 * u,
            };
            let th = theta_lower(p, d).unwrap();
            let back = p_upper(th, d).unwrap().as_f64();
            prop_assert!((back - p).abs() <= 1e-12 * p);
        }

        #[test]
        fn b_has_unit_slope(d in 2i32..10, a in -20.0f64..-0.01, delta in 0.0f64..0.01, u in 0.0f64..1.0) {
            let p = 2.0 + u * (critical_exponent(d).unwrap().as_f64().min(6.0) - 2.0);
            let th = theta_lower(p, d).unwrap();
            let lo = CknParams::new(d, a, p, th).unwrap();
            let hi = CknParams::new(d, a + delta, p, th).unwrap();
            prop_assert!(((hi.b - lo.b) - delta).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn b_between_a_and_a_plus_one(d in 2i32..10, a in -20.0f64..0.0, u in 0.0f64..=1.0) {
            let p = match critical_exponent(d).unwrap() {
                Exponent::Finite(q) => 2.0 + u * (q - 2.0),
                Exponent::Infinite => 2.0 + 40.0 * u,
            };
            let c = CknParams::new(d, a, p, 1.0).unwrap();
            prop_assert!(c.a <= c.b && c.b <= c.a + 1.0);
            if p == 2.0 {
                prop_assert!(c.b == c.a + 1.0);
            }
            if !c.boundary {
                prop_assert!(c.a < c.b && c.b < c.a + 1.0);
            }
            prop_assert!(c.lambda > 0.0);
        }

        #[test]
        fn validation_is_total(d in -2i32..12, a in -10.0f64..10.0, p in 0.0f64..12.0, theta in -0.5f64..1.5) {
            match CknParams::new(d, a, p, theta) {
                Ok(c) => {
                    prop_assert!(c.d >= 2 && c.a < c.a_c);
                    prop_assert!(c.p >= 2.0 && c.critical_exponent.admits(c.p));
                    prop_assert!(c.theta_min <= c.theta && c.theta <= 1.0);
                    prop_assert!(c.lambda > 0.0);
                }
                Err(_) => {}
            }
        }
    }
}
