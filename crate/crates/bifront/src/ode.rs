//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4) pair).
//!
//! The driver records every accepted step with the state and derivative at
//! both ends, so callers get free third-order Hermite dense output for event
//! localization and resampling. Integration direction follows the sign of
//! `t_end - t0`; the reduction module runs it backward.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (|h| = {h:.3e}): problem too stiff for the explicit pair")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("exceeded {0} accepted steps")]
    TooManySteps(usize),
}

/// One accepted step with endpoint derivatives, enough for cubic Hermite
/// interpolation anywhere inside `[t0, t1]` (or `[t1, t0]` when backward).
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> DenseStep<N> {
    /// Hermite value of component `k` at `t` inside the step.
    pub fn eval(&self, k: usize, t: f64) -> f64 {
        crate::numerics::interp::hermite_eval(
            self.t0, self.t1, self.y0[k], self.y1[k], self.f0[k], self.f1[k], t,
        )
    }
}

/// What the per-step inspection callback tells the driver to do.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Continue,
    /// Stop after this step; the step is kept.
    Halt,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerances {
    pub fn scaled(self, factor: f64) -> Self {
        Tolerances { rel: self.rel * factor, abs: self.abs * factor }
    }
}

pub struct Dopri5 {
    pub tol: Tolerances,
    /// largest |h| the controller may take
    pub max_step: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: Tolerances) -> Self {
        Dopri5 { tol, max_step: f64::INFINITY, max_steps: 2_000_000 }
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    /// Integrate `y' = rhs(t, y)` from `(t0, y0)` toward `t_end`, invoking
    /// `inspect` after every accepted step. Returns the recorded dense steps;
    /// the final state is the `y1` of the last one.
    pub fn solve<const N: usize>(
        &self,
        rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
        t0: f64,
        t_end: f64,
        y0: [f64; N],
        mut inspect: impl FnMut(&DenseStep<N>) -> StepControl,
    ) -> Result<Vec<DenseStep<N>>, OdeError> {
        // Dormand-Prince coefficients
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
        // error coefficients (5th minus embedded 4th order weights)
        const E1: f64 = 71.0 / 57600.0;
        const E3: f64 = -71.0 / 16695.0;
        const E4: f64 = 71.0 / 1920.0;
        const E5: f64 = -17253.0 / 339200.0;
        const E6: f64 = 22.0 / 525.0;
        const E7: f64 = -1.0 / 40.0;
        const C2: f64 = 1.0 / 5.0;
        const C3: f64 = 3.0 / 10.0;
        const C4: f64 = 4.0 / 5.0;
        const C5: f64 = 8.0 / 9.0;

        let dir = (t_end - t0).signum();
        if dir == 0.0 || t0 == t_end {
            return Ok(Vec::new());
        }

        let mut t = t0;
        let mut y = y0;
        let mut f_now = rhs(t, &y);

        // initial step: conservative fraction of the span, limited by max_step
        let span = (t_end - t0).abs();
        let mut h = dir * (span * 1e-4).min(self.max_step).max(span * 1e-12);

        let mut steps: Vec<DenseStep<N>> = Vec::new();
        let mut accepted = 0usize;

        loop {
            if accepted >= self.max_steps {
                return Err(OdeError::TooManySteps(self.max_steps));
            }
            // done when the remaining span is below rounding resolution
            if (t_end - t) * dir <= span * 1e-14 {
                return Ok(steps);
            }
            // clamp the final step onto t_end
            if (t + h - t_end) * dir > 0.0 {
                h = t_end - t;
            }
            if h.abs() < 1e-15 * t.abs().max(1.0) {
                return Err(OdeError::StepSizeUnderflow { t, h });
            }

            let k1 = f_now;
            let mut yt = [0.0; N];
            for i in 0..N {
                yt[i] = y[i] + h * A21 * k1[i];
            }
            let k2 = rhs(t + C2 * h, &yt);
            for i in 0..N {
                yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            let k3 = rhs(t + C3 * h, &yt);
            for i in 0..N {
                yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            let k4 = rhs(t + C4 * h, &yt);
            for i in 0..N {
                yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            let k5 = rhs(t + C5 * h, &yt);
            for i in 0..N {
                yt[i] =
                    y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let k6 = rhs(t + h, &yt);
            let mut y_new = [0.0; N];
            for i in 0..N {
                y_new[i] = y[i]
                    + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            let k7 = rhs(t + h, &y_new); // FSAL

            let mut err_sq = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let scale = self.tol.abs + self.tol.rel * y[i].abs().max(y_new[i].abs());
                err_sq += (e / scale) * (e / scale);
            }
            let err = (err_sq / N as f64).sqrt();

            if !err.is_finite() {
                return Err(OdeError::NonFinite { t });
            }

            if err <= 1.0 {
                let step = DenseStep { t0: t, t1: t + h, y0: y, y1: y_new, f0: k1, f1: k7 };
                t += h;
                y = y_new;
                f_now = k7;
                accepted += 1;
                let control = inspect(&step);
                steps.push(step);
                if control == StepControl::Halt || (t_end - t) * dir <= span * 1e-14 {
                    return Ok(steps);
                }
            }

            // standard I controller with safety factor and growth clamps
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h.abs() > self.max_step {
                h = dir * self.max_step;
            }
        }
    }
}
