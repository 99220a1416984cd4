//! Composite quadrature on uniform grids.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Trapezoid,
    #[default]
    Simpson,
}

pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (f[0] + f[n - 1]) + f[1..n - 1].iter().sum::<f64>()),
    }
}

/// Composite Simpson; an odd number of intervals closes with Simpson's 3/8 rule.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    if n < 3 {
        return trapezoid(f, h);
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals % 2 == 0 || intervals < 3 {
        (n - 1, 0.0)
    } else {
        let m = n - 4;
        (m, 3.0 * h / 8.0 * (f[m] + 3.0 * f[m + 1] + 3.0 * f[m + 2] + f[m + 3]))
    };
    if intervals % 2 == 1 && intervals < 3 {
        return trapezoid(f, h);
    }
    let mut acc = f[0] + f[even_end];
    for (i, v) in f[1..even_end].iter().enumerate() {
        acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0 + tail
}

pub fn integrate(rule: Rule, f: &[f64], h: f64) -> f64 {
    match rule {
        Rule::Trapezoid => trapezoid(f, h),
        Rule::Simpson => simpson(f, h),
    }
}
