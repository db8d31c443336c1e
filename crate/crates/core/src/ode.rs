//! Adaptive Dormand–Prince 5(4) integration with zero-crossing detection.
//!
//! Steps are clipped to land exactly on every requested output abscissa, so
//! recorded samples carry the full fifth-order accuracy of a step rather
//! than that of an interpolant. Sign changes of the first state component
//! are refined by Illinois regula falsi over the length of a fresh step from
//! the left end of the bracketing step.

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
// Difference between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// State dimension used throughout: `(u, u′)`.
pub type State = [f64; 2];

/// Termination status of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    Completed,
    /// `|y₀|` exceeded the blow-up bound at this abscissa.
    Diverged { at: f64 },
}

#[derive(Debug, Clone)]
pub struct Integration {
    /// States at the requested output abscissae (only those reached).
    pub outputs: Vec<State>,
    /// Abscissae of sign changes of the first component.
    pub zeros: Vec<f64>,
    pub status: Status,
    /// Final abscissa and state.
    pub end: (f64, State),
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub blowup_bound: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tolerance: f64, blowup_bound: f64) -> Self {
        Self {
            rtol: tolerance,
            atol: tolerance,
            max_step: f64::INFINITY,
            blowup_bound,
            max_steps: 10_000_000,
        }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    /// Integrates from `(t0, y0)` to `t_end`, recording the state at each of
    /// `outputs` (sorted, within `[t0, t_end]`). When `stop_after_zeros` is
    /// set, integration ends as soon as that many zeros have been found.
    pub fn integrate<F>(
        &self,
        rhs: F,
        t0: f64,
        y0: State,
        t_end: f64,
        outputs: &[f64],
        stop_after_zeros: Option<usize>,
    ) -> Integration
    where
        F: Fn(f64, &State) -> State,
    {
        let mut result = Integration {
            outputs: Vec::with_capacity(outputs.len()),
            zeros: Vec::new(),
            status: Status::Completed,
            end: (t0, y0),
            accepted_steps: 0,
            rejected_steps: 0,
        };
        let mut t = t0;
        let mut y = y0;
        let mut next_output = 0;
        while next_output < outputs.len() && outputs[next_output] <= t0 {
            result.outputs.push(y0);
            next_output += 1;
        }
        let span = t_end - t0;
        if span <= 0.0 {
            return result;
        }
        let mut h = self.initial_step(&rhs, t, &y, span);
        let mut last_sign = y[0].signum() * (y[0] != 0.0) as i32 as f64;

        while t < t_end {
            if result.accepted_steps + result.rejected_steps >= self.max_steps {
                result.status = Status::Diverged { at: t };
                break;
            }
            let target = if next_output < outputs.len() {
                outputs[next_output].min(t_end)
            } else {
                t_end
            };
            let remaining = target - t;
            let landing = h >= remaining * (1.0 - 1e-12);
            let h_try = if landing { remaining } else { h };
            let (y_new, err_vec) = step(&rhs, t, &y, h_try);
            let err = self.error_norm(&y, &y_new, &err_vec);
            if !err.is_finite() || err > 1.0 {
                result.rejected_steps += 1;
                let factor = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
                } else {
                    0.2
                };
                h = h_try * factor;
                if h < 1e-15 * t_end.abs().max(1.0) {
                    result.status = Status::Diverged { at: t };
                    break;
                }
                continue;
            }
            result.accepted_steps += 1;

            // Zero crossing inside (t, t + h_try].
            if y_new[0] != 0.0 && last_sign != 0.0 && y_new[0].signum() != last_sign {
                let z = refine_zero(&rhs, t, &y, h_try, y_new[0]);
                result.zeros.push(z);
                if stop_after_zeros.is_some_and(|n| result.zeros.len() >= n) {
                    result.end = (t + h_try, y_new);
                    return result;
                }
            } else if y_new[0] == 0.0 {
                result.zeros.push(t + h_try);
            }
            if y_new[0] != 0.0 {
                last_sign = y_new[0].signum();
            }

            t = if landing { target } else { t + h_try };
            y = y_new;
            if landing {
                while next_output < outputs.len() && outputs[next_output] <= t {
                    result.outputs.push(y);
                    next_output += 1;
                }
            }
            if y[0].abs() > self.blowup_bound || !y[0].is_finite() {
                result.status = Status::Diverged { at: t };
                break;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // A step shortened to hit an output should not shrink the next one.
            let base = if landing { h.max(h_try) } else { h_try };
            h = (base * factor).min(self.max_step);
        }
        result.end = (t, y);
        result
    }

    fn error_norm(&self, y: &State, y_new: &State, err: &State) -> f64 {
        (0..2)
            .map(|i| {
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                (err[i] / scale).abs()
            })
            .fold(0.0, f64::max)
    }

    fn initial_step<F>(&self, rhs: &F, t: f64, y: &State, span: f64) -> f64
    where
        F: Fn(f64, &State) -> State,
    {
        let f0 = rhs(t, y);
        let d0 = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let d1 = f0.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let guess = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * span.max(1.0)
        } else {
            0.01 * d0 / d1
        };
        guess.min(span).min(self.max_step).max(1e-12 * span)
    }
}

/// One Dormand–Prince step; returns the fifth-order state and the embedded
/// error estimate.
fn step<F>(rhs: &F, t: f64, y: &State, h: f64) -> (State, State)
where
    F: Fn(f64, &State) -> State,
{
    let comb = |terms: &[(f64, &State)]| {
        let mut out = *y;
        for (c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let k1 = rhs(t, y);
    let k2 = rhs(t + C2 * h, &comb(&[(A21, &k1)]));
    let k3 = rhs(t + C3 * h, &comb(&[(A31, &k1), (A32, &k2)]));
    let k4 = rhs(t + C4 * h, &comb(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = rhs(
        t + C5 * h,
        &comb(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = rhs(
        t + h,
        &comb(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = comb(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = rhs(t + h, &y_new);
    let mut err = [0.0; 2];
    for i in 0..2 {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err)
}

/// Single fifth-order step without error control.
pub fn single_step<F>(rhs: &F, t: f64, y: &State, h: f64) -> State
where
    F: Fn(f64, &State) -> State,
{
    step(rhs, t, y, h).0
}

/// Locates the zero of `y₀` in `(t, t + h]` given `y₀(t) = y[0]` and
/// `y₀(t + h) = y_end`.
fn refine_zero<F>(rhs: &F, t: f64, y: &State, h: f64, y_end: f64) -> f64
where
    F: Fn(f64, &State) -> State,
{
    let (mut a, mut fa) = (0.0, y[0]);
    let (mut b, mut fb) = (h, y_end);
    let mut side = 0i8;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) || (b - a) <= 4.0 * f64::EPSILON * (t.abs() + b) {
            break;
        }
        let fc = step(rhs, t, y, c).0[0];
        if fc == 0.0 {
            return t + c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    t + (a * fb - b * fa) / (fb - fa)
}

/// Classical fourth-order Runge–Kutta over `[t0, t1]` with `substeps` equal steps.
pub fn rk4<F>(rhs: &F, t0: f64, y0: State, t1: f64, substeps: usize) -> State
where
    F: Fn(f64, &State) -> State,
{
    let h = (t1 - t0) / substeps as f64;
    let mut y = y0;
    let mut t = t0;
    let add = |y: &State, k: &State, c: f64| [y[0] + c * k[0], y[1] + c * k[1]];
    for _ in 0..substeps {
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = rhs(t + h, &add(&y, &k3, h));
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn harmonic(_: f64, y: &State) -> State {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_outputs_and_zeros() {
        let solver = Dopri5::new(1e-12, 1e8);
        let outputs: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
        let run = solver.integrate(harmonic, 0.0, [1.0, 0.0], 10.0, &outputs, None);
        assert_eq!(run.status, Status::Completed);
        assert_eq!(run.outputs.len(), outputs.len());
        for (t, y) in outputs.iter().zip(&run.outputs) {
            assert!((y[0] - t.cos()).abs() < 1e-10, "t = {t}");
        }
        let expected: Vec<f64> = (0..3).map(|k| PI / 2.0 + k as f64 * PI).collect();
        assert_eq!(run.zeros.len(), expected.len());
        for (z, e) in run.zeros.iter().zip(expected) {
            assert_relative_eq!(*z, e, epsilon = 1e-11);
        }
    }

    #[test]
    fn stops_after_requested_zero_count() {
        let solver = Dopri5::new(1e-10, 1e8);
        let run = solver.integrate(harmonic, 0.0, [1.0, 0.0], 100.0, &[], Some(2));
        assert_eq!(run.zeros.len(), 2);
        assert!(run.end.0 < 6.0);
    }

    #[test]
    fn blowup_is_reported() {
        let solver = Dopri5::new(1e-10, 1e3);
        // y' = y² blows up at t = 1 from y(0) = 1.
        let run = solver.integrate(|_, y: &State| [y[0] * y[0], 0.0], 0.0, [1.0, 0.0], 2.0, &[], None);
        assert!(matches!(run.status, Status::Diverged { at } if at < 1.0));
    }

    #[test]
    fn rk4_matches_exponential() {
        let y = rk4(&|_, y: &State| [y[0], 0.0], 0.0, [1.0, 0.0], 1.0, 100);
        assert_relative_eq!(y[0], 1f64.exp(), max_relative = 1e-9);
    }
}
