//! Adaptive Dormand–Prince 5(4) integrator for small autonomous-in-form systems.
//!
//! The integrator is driven node by node: [`Dp45::advance_to`] takes as many
//! adaptive steps as needed to land exactly on the next output radius, so the
//! caller gets samples on a uniform grid without dense-output interpolation.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also the last stage row, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub type State = [f64; 2];

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

pub struct Dp45<F> {
    rhs: F,
    pub t: f64,
    pub y: State,
    h: f64,
    rtol: f64,
    atol: f64,
    pub steps: usize,
}

impl<F: Fn(f64, &State) -> State> Dp45<F> {
    pub fn new(rhs: F, t0: f64, y0: State, h0: f64, rtol: f64, atol: f64) -> Self {
        Self {
            rhs,
            t: t0,
            y: y0,
            h: h0,
            rtol,
            atol,
            steps: 0,
        }
    }

    fn try_step(&self, h: f64) -> (State, f64) {
        let (t, y) = (self.t, &self.y);
        let f = &self.rhs;
        let k1 = f(t, y);
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new);
        let mut err = 0.0f64;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        (y_new, err)
    }

    /// Integrate up to `t_end` exactly. Returns `false` if the step size underflows.
    pub fn advance_to(&mut self, t_end: f64) -> bool {
        while self.t < t_end {
            let remaining = t_end - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let (y_new, err) = self.try_step(h);
            if err <= 1.0 {
                self.t = if last { t_end } else { self.t + h };
                self.y = y_new;
                self.steps += 1;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // keep the step proposed before truncating to hit the node
            let base = if last && err <= 1.0 { self.h.max(h) } else { h };
            self.h = base * factor;
            if self.h < 1e-14 * self.t.abs().max(1.0) {
                return false;
            }
        }
        true
    }
}
