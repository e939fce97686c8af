//! Adaptive Dormand-Prince 5(4) stepper for small autonomous-size systems.

use crate::error::{Error, Result};

pub type State = [f64; 2];

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error coefficients: 5th order minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for i in 0..2 {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Dormand-Prince 5(4) with mixed absolute/relative error control.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            max_steps: 1_000_000,
        }
    }

    /// One trial step; returns the 5th-order solution and the scaled error norm.
    pub fn try_step<F>(&self, f: &F, t: f64, y: &State, h: f64) -> (State, f64)
    where
        F: Fn(f64, &State) -> State,
    {
        let k1 = f(t, y);
        let k2 = f(t + C2 * h, &axpy(y, &[(A21, &k1)], h));
        let k3 = f(t + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(t + C4 * h, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(
            t + C5 * h,
            &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            t + h,
            &axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        );
        let y_new = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = f(t + h, &y_new);
        let mut norm: f64 = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            norm = norm.max((e / scale).abs());
        }
        (y_new, norm)
    }

    /// Integrates from `t0` towards `t_end` (either direction).
    ///
    /// `on_step(t, y)` is called after every accepted step and may stop the
    /// integration by returning `false`. The last step is clipped to land on
    /// `t_end` exactly. Returns the final `(t, y, h)` where `h` is the step
    /// size the controller would try next.
    pub fn integrate<F, C>(
        &self,
        f: &F,
        t0: f64,
        y0: State,
        t_end: f64,
        h0: f64,
        mut on_step: C,
    ) -> Result<(f64, State, f64)>
    where
        F: Fn(f64, &State) -> State,
        C: FnMut(f64, &State) -> bool,
    {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = y0;
        let mut h = dir * h0.abs().max(f64::MIN_POSITIVE);
        let mut steps = 0usize;
        while dir * (t_end - t) > 0.0 {
            if steps >= self.max_steps {
                return Err(Error::Integration(format!(
                    "step limit {} reached at t = {t}",
                    self.max_steps
                )));
            }
            let remaining = t_end - t;
            let clipped = dir * h > dir * remaining;
            let h_try = if clipped { remaining } else { h };
            let (y_new, err) = self.try_step(f, t, &y, h_try);
            if err <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
                t = if clipped { t_end } else { t + h_try };
                y = y_new;
                steps += 1;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !clipped {
                    h = h_try * grow;
                }
                if !on_step(t, &y) {
                    return Ok((t, y, h));
                }
            } else {
                let shrink = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h = h_try * shrink;
                if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
                    return Err(Error::Integration(format!("step size underflow at t = {t}")));
                }
            }
        }
        Ok((t, y, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let solver = Dopri5::new(1e-12, 1e-14);
        let f = |_t: f64, y: &State| [y[1], -y[0]];
        let (t, y, _) = solver
            .integrate(&f, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, 0.1, |_, _| true)
            .unwrap();
        assert_eq!(t, 2.0 * std::f64::consts::PI);
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn backward_integration_and_early_stop() {
        let solver = Dopri5::new(1e-12, 1e-14);
        let f = |_t: f64, y: &State| [y[0], 0.0];
        let (_, y, _) = solver.integrate(&f, 1.0, [1.0, 0.0], 0.0, 0.1, |_, _| true).unwrap();
        assert!((y[0] - (-1f64).exp()).abs() < 1e-11);

        let (t, y, _) = solver
            .integrate(&f, 0.0, [1.0, 0.0], 10.0, 0.1, |_, y| y[0] < 2.0)
            .unwrap();
        assert!(y[0] >= 2.0 && t < 10.0);
    }
}
