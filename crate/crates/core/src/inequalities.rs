//! Elementary inequalities behind the cylinder estimates, as signed gaps.
//!
//! Every function returns `rhs - lhs` arranged so that the inequality holds
//! exactly when the result is non-negative.

use crate::cylinder::{entropy, norm_p, Geometry};

/// `(1 + x)^η (1 + y)^{1-η} - 1 - x^η y^{1-η}` for `x, y ≥ 0`, `η ∈ [0, 1]`.
/// Vanishes only on the diagonal `x = y`.
pub fn interpolation_gap(x: f64, y: f64, eta: f64) -> f64 {
    (1.0 + x).powf(eta) * (1.0 + y).powf(1.0 - eta) - 1.0 - x.powf(eta) * y.powf(1.0 - eta)
}

/// `η x^{1/η} + (1-η) y^{1/(1-η)} - xy` for `x, y ≥ 0`, `η ∈ (0, 1)`.
pub fn young_gap(x: f64, y: f64, eta: f64) -> f64 {
    eta * x.powf(1.0 / eta) + (1.0 - eta) * y.powf(1.0 / (1.0 - eta)) - x * y
}

/// `p/(p-2) ‖w‖₂² log(‖w‖_p²/‖w‖₂²) - ∫ |w|² log(|w|²/‖w‖₂²)` for `p > 2`.
pub fn entropy_holder_gap(geo: &Geometry, w: &[f64], p: f64) -> f64 {
    let n2 = geo.mass_norm_sq(w);
    let np = norm_p(geo, w, p);
    p / (p - 2.0) * n2 * (np * np / n2).ln() - entropy(geo, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::GridSpec;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    #[test]
    fn interpolation_holds_and_is_strict_off_diagonal() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = 10f64.powf(rng.gen_range(-3.0..3.0));
            let y = 10f64.powf(rng.gen_range(-3.0..3.0));
            let eta = rng.gen_range(0.01..0.99);
            let gap = interpolation_gap(x, y, eta);
            let scale = (1.0 + x).max(1.0 + y);
            assert!(gap >= -1e-12 * scale, "{x} {y} {eta}: {gap}");
            if (x - y).abs() > 1e-6 {
                assert!(gap > 0.0);
            }
        }
        assert!(interpolation_gap(2.5, 2.5, 0.3).abs() < 1e-15);
    }

    #[test]
    fn young_holds() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10_000 {
            let x = rng.gen_range(0.0..3.0);
            let y = rng.gen_range(0.0..3.0);
            let eta = rng.gen_range(0.05..0.95);
            let gap = young_gap(x, y, eta);
            assert!(gap >= -1e-12 * (1.0 + x * y), "{x} {y} {eta}: {gap}");
        }
    }

    #[test]
    fn entropy_holder_on_random_fields() {
        let gr = GridSpec {
            l: 3.0,
            n_s: 31,
            n_xi: 5,
            ..GridSpec::default()
        };
        let geo = Geometry::new(3, &gr).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let w: Vec<f64> = (0..geo.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for p in [2.5, 3.0, 4.0] {
                assert!(entropy_holder_gap(&geo, &w, p) >= -1e-12);
            }
        }
    }
}
