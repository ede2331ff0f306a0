//! First-order reduction of the wave problem.
//!
//! A monotone front `v(z)` with speed `c` corresponds, through
//! `y(v) = ε(1/√(1-v'²) - 1)`, to a positive solution of the singular
//! two-point problem
//!
//! ```text
//! y' = (c + h'(v)) · √(y(2ε+y))/(ε+y) - f(v),   y(0) = 0, y(1) = 0.
//! ```
//!
//! The solver integrates backward from the degenerate endpoint `v = 1`,
//! where the solution leaves the corner like `A·(1-v)²`; the quadratic
//! coefficient comes from a local series, so the integration starts a
//! distance `delta` inside the interval with the correct asymptotics. The
//! admissibility verdict at `v_min` feeds the bisection in [`crate::speed`].

use serde::Serialize;
use thiserror::Error;

use crate::model::ModelSpec;
use crate::numerics::interp::{hermite_deriv, hermite_eval};
use crate::numerics::rootfind::bisect_root;
use crate::ode::{Dopri5, OdeError, StepControl, Tolerances};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("y = {y} is negative; the reduction is defined for y ≥ 0")]
    NegativeY { y: f64 },
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("series start requires 0 < delta ≤ 1e-3, got {0}")]
    InvalidDelta(f64),
    #[error(
        "degenerate endpoint: c + h(1) = {value:.6e} ≤ 0, no increasing front can attach at v = 1 \
         (speed far below the admissible range)"
    )]
    DegenerateEndpoint { value: f64 },
    #[error("invalid range: need 0 < v_min < 1 - delta, got v_min = {v_min}")]
    InvalidRange { v_min: f64 },
    #[error("stiffness failure during backward integration: {0}")]
    Stiffness(#[from] OdeError),
}

/// A model with diffusion `ε` and a candidate speed `c`.
#[derive(Debug, Clone, Copy)]
pub struct FrontProblem<'m> {
    pub model: &'m ModelSpec,
    pub epsilon: f64,
    pub speed_c: f64,
}

impl<'m> FrontProblem<'m> {
    pub fn new(model: &'m ModelSpec, epsilon: f64, speed_c: f64) -> Result<Self, ReductionError> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(ReductionError::NonPositiveEpsilon(epsilon));
        }
        Ok(FrontProblem { model, epsilon, speed_c })
    }

    /// The slope factor g(y) = √(y(2ε+y))/(ε+y) ∈ [0, 1); equals v'(z) along
    /// the front.
    pub fn slope_factor(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        (y * (2.0 * self.epsilon + y)).sqrt() / (self.epsilon + y)
    }

    /// Right-hand side of the reduced equation; `rhs_y(v, 0) = -f(v)`.
    pub fn rhs_y(&self, v: f64, y: f64) -> Result<f64, ReductionError> {
        if y < 0.0 {
            return Err(ReductionError::NegativeY { y });
        }
        Ok(self.rhs_raw(v, y))
    }

    /// Unchecked right-hand side; clamps y below 0 so integrator stage
    /// probes slightly past the axis remain consistent.
    fn rhs_raw(&self, v: f64, y: f64) -> f64 {
        (self.speed_c + self.model.h_prime(v)) * self.slope_factor(y) - self.model.f(v)
    }
}

/// Admissibility verdict of a backward trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// y stayed positive and fell below the decay threshold at `v_min`
    Admissible,
    /// y touched zero at some interior `v_cross > v_min`
    InteriorCrossing { v_cross: f64 },
    /// y reached `v_min` still above the threshold: no solution with
    /// y(0) = 0 exists for this speed
    TerminalPositive { y_end: f64 },
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Verdict::Admissible)
    }
}

/// Sampled backward solution y(v) with its verdict.
///
/// Samples are stored in integration order, i.e. `v_grid` strictly
/// decreasing from `1 - delta` toward `v_min`. Slopes at the sample points
/// are retained so the trajectory interpolates to fourth order.
#[derive(Debug, Clone)]
pub struct YTrajectory {
    pub v_grid: Vec<f64>,
    pub y_values: Vec<f64>,
    slopes: Vec<f64>,
    pub verdict: Verdict,
    pub v_min_reached: f64,
    pub epsilon: f64,
    pub speed_c: f64,
    /// set when the quadratic series coefficient vanished and the
    /// next-order seed was used instead
    pub shallow_start: bool,
}

impl YTrajectory {
    /// Hermite-interpolated y at `v` inside the sampled range (clamped).
    pub fn y_at(&self, v: f64) -> f64 {
        let n = self.v_grid.len();
        if v >= self.v_grid[0] {
            return self.y_values[0];
        }
        if v <= self.v_grid[n - 1] {
            return self.y_values[n - 1];
        }
        // grid is decreasing
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.v_grid[mid] > v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hermite_eval(
            self.v_grid[lo],
            self.v_grid[hi],
            self.y_values[lo],
            self.y_values[hi],
            self.slopes[lo],
            self.slopes[hi],
            v,
        )
        .max(0.0)
    }

    pub fn max_y(&self) -> f64 {
        self.y_values.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with header `v,y`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.v_grid.len() * 32 + 8);
        out.push_str("v,y\n");
        for (v, y) in self.v_grid.iter().zip(&self.y_values) {
            out.push_str(&format!("{v:.11e},{y:.11e}\n"));
        }
        out
    }

    /// JSON verdict record.
    pub fn verdict_json(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            #[serde(flatten)]
            verdict: &'a Verdict,
            v_min_reached: f64,
            epsilon: f64,
            speed_c: f64,
            shallow_start: bool,
        }
        serde_json::to_string(&Record {
            verdict: &self.verdict,
            v_min_reached: self.v_min_reached,
            epsilon: self.epsilon,
            speed_c: self.speed_c,
            shallow_start: self.shallow_start,
        })
        .expect("verdict serialization cannot fail")
    }
}

/// Series start at the degenerate corner `v = 1`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesStart {
    pub v_start: f64,
    pub y_start: f64,
    /// quadratic coefficient A of y ≈ A(1-v)²
    pub coefficient: f64,
    pub shallow: bool,
}

/// Local analysis at `y(1) = 0`: the backward solution leaves the corner as
/// `y = A(1-v)² + O((1-v)³)` where `A = B²` and `B` is the positive root of
/// `2B² + γB - m = 0`, `γ = (c + h'(1))√(2/ε)`, `m` the limit slope of `f`
/// at 1.
///
/// When `m = 0` and `γ ≥ 0` the quadratic branch degenerates (B = 0); the
/// integration then starts from the next-order balance
/// `y = (ε/2)(f(1-δ)/(c+h'(1)))²` and the start is flagged shallow.
pub fn series_start_at_one(
    problem: &FrontProblem,
    delta: f64,
) -> Result<SeriesStart, ReductionError> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(ReductionError::InvalidDelta(delta));
    }
    let c = problem.speed_c;
    let model = problem.model;
    // necessary condition cv + h(v) > 0 evaluated at v = 1; equality is the
    // pure-convection boundary case c = -h(1) and is allowed through
    let attach = c + model.h(1.0);
    if attach < 0.0 {
        return Err(ReductionError::DegenerateEndpoint { value: attach });
    }

    let eps = problem.epsilon;
    let gamma = (c + model.h_prime(1.0)) * (2.0 / eps).sqrt();
    let m = model.f_limit_slope_at_one().max(0.0);
    let b = (-gamma + (gamma * gamma + 8.0 * m).sqrt()) / 4.0;
    let coefficient = b * b;
    let v_start = 1.0 - delta;

    // B ≈ 0 happens iff m ≈ 0 with γ ≥ 0; fall back to the balance seed
    let quadratic_seed = coefficient * delta * delta;
    let shallow_scale = 1e-14 * delta * delta;
    if quadratic_seed > shallow_scale {
        return Ok(SeriesStart { v_start, y_start: quadratic_seed, coefficient, shallow: false });
    }
    let denom = c + model.h_prime(1.0);
    let y_shallow = if denom > 0.0 {
        let ratio = model.f(v_start).max(0.0) / denom;
        0.5 * eps * ratio * ratio
    } else {
        0.0
    };
    Ok(SeriesStart { v_start, y_start: y_shallow, coefficient, shallow: true })
}

/// Tunable knobs of the backward integration.
#[derive(Debug, Clone, Copy)]
pub struct ReductionSettings {
    pub tol: Tolerances,
    /// offset of the series start below v = 1
    pub delta: f64,
    /// left end of the integration window
    pub v_min: f64,
    /// cap on the step length, keeps dense output accurate mid-domain
    pub max_step: f64,
}

impl Default for ReductionSettings {
    fn default() -> Self {
        ReductionSettings {
            tol: Tolerances { rel: 1e-9, abs: 1e-12 },
            delta: 1e-6,
            v_min: 1e-4,
            // keeps the cubic dense output below ~1e-9 on smooth stretches
            max_step: 0.005,
        }
    }
}

/// The decay corridor at `v_min`: an admissible trajectory behaves like
/// `(cv)²/(2ε)` near the origin, so anything within a factor 4 of that is
/// accepted. The floor keeps the test meaningful when c ≈ 0.
pub fn admissibility_threshold(epsilon: f64, c: f64, v_min: f64) -> f64 {
    let c_eff = c.max(0.01);
    (2.0 * (c_eff * v_min) * (c_eff * v_min) / epsilon).max(1e-12)
}

/// Integrate the reduced equation backward from the series start at `v = 1`
/// down to `v_min`, classifying the trajectory.
///
/// Interior zero crossings above `v_min` stop the integration early with
/// [`Verdict::InteriorCrossing`]; crossings that would occur below `v_min`
/// are deliberately not chased (the bisection limit is insensitive to them
/// at the default tolerances). A trajectory still above the admissibility
/// threshold at `v_min` yields [`Verdict::TerminalPositive`], which the
/// speed search treats as "not admissible" and logs.
pub fn integrate_backward(
    problem: &FrontProblem,
    v_min: f64,
    settings: &ReductionSettings,
) -> Result<YTrajectory, ReductionError> {
    let start = series_start_at_one(problem, settings.delta)?;
    if !(v_min > 0.0 && v_min < start.v_start) {
        return Err(ReductionError::InvalidRange { v_min });
    }

    let solver = Dopri5::new(settings.tol).with_max_step(settings.max_step);
    let rhs = |v: f64, y: &[f64; 1]| [problem.rhs_raw(v, y[0].max(0.0))];

    // Sub-tolerance excursions below zero are integrator noise (the clamped
    // right-hand side y' = -f pushes the state back up immediately); only a
    // decisive dip counts as a crossing. A true crossing passes this floor
    // within ~1e-8 in v, so localization accuracy is unaffected.
    let noise_floor = 1e3 * settings.tol.abs;
    let mut crossed = false;
    let steps = solver.solve(rhs, start.v_start, v_min, [start.y_start], |step| {
        // event probe: endpoint or an interior dip of the dense cubic
        if step.y1[0] < -noise_floor {
            crossed = true;
            return StepControl::Halt;
        }
        for k in 1..4 {
            let t = step.t0 + (step.t1 - step.t0) * (k as f64 / 4.0);
            if step.eval(0, t) < -noise_floor {
                crossed = true;
                return StepControl::Halt;
            }
        }
        StepControl::Continue
    })?;

    let mut v_grid = Vec::with_capacity(steps.len() + 1);
    let mut y_values = Vec::with_capacity(steps.len() + 1);
    let mut slopes = Vec::with_capacity(steps.len() + 1);
    if let Some(first) = steps.first() {
        v_grid.push(first.t0);
        y_values.push(first.y0[0]);
        slopes.push(first.f0[0]);
    } else {
        v_grid.push(start.v_start);
        y_values.push(start.y_start);
        slopes.push(problem.rhs_raw(start.v_start, start.y_start));
    }
    for s in &steps {
        v_grid.push(s.t1);
        y_values.push(s.y1[0]);
        slopes.push(s.f1[0]);
    }

    let verdict = if crossed {
        let last = steps.last().expect("crossing implies at least one step");
        // locate the highest v with y = 0 inside the last step
        let cross_fn =
            |v: f64| hermite_eval(last.t0, last.t1, last.y0[0], last.y1[0], last.f0[0], last.f1[0], v);
        // bracket: y(t0) > 0; scan toward t1 for the first non-positive probe
        let mut hi = last.t1;
        for k in 1..=16 {
            let t = last.t0 + (last.t1 - last.t0) * (k as f64 / 16.0);
            if cross_fn(t) <= 0.0 {
                hi = t;
                break;
            }
        }
        let v_cross = if cross_fn(last.t0) <= 0.0 {
            last.t0
        } else if cross_fn(hi) == 0.0 {
            hi
        } else {
            bisect_root(cross_fn, last.t0, hi, 1e-10)
        };
        // truncate the retained samples at the crossing
        while let Some(&v) = v_grid.last() {
            if v < v_cross && v_grid.len() > 1 {
                v_grid.pop();
                y_values.pop();
                slopes.pop();
            } else {
                break;
            }
        }
        let slope_at_cross = hermite_deriv(
            last.t0, last.t1, last.y0[0], last.y1[0], last.f0[0], last.f1[0], v_cross,
        );
        v_grid.push(v_cross);
        y_values.push(0.0);
        slopes.push(slope_at_cross);

        if v_cross > v_min {
            Verdict::InteriorCrossing { v_cross }
        } else {
            Verdict::Admissible
        }
    } else {
        let y_end = y_values.last().copied().unwrap_or(start.y_start);
        let threshold = admissibility_threshold(problem.epsilon, problem.speed_c, v_min);
        if y_end <= threshold {
            Verdict::Admissible
        } else {
            Verdict::TerminalPositive { y_end }
        }
    };

    // retained samples are nonnegative by construction; wipe sign noise
    for y in &mut y_values {
        if *y < 0.0 {
            *y = 0.0;
        }
    }

    let v_min_reached = *v_grid.last().unwrap();
    Ok(YTrajectory {
        v_grid,
        y_values,
        slopes,
        verdict,
        v_min_reached,
        epsilon: problem.epsilon,
        speed_c: problem.speed_c,
        shallow_start: start.shallow,
    })
}

/// The integrated a-priori bound: along any admissible solution,
/// `y(v) ≤ √(ε² + (cv + h(v) - F(v))²) - ε`, valid wherever
/// `cv + h(v) - F(v) > 0`. A nonpositive argument certifies that the speed
/// is inadmissible (the integral lower bound on c is violated at this v).
pub fn y_upper_bound(problem: &FrontProblem, v: f64) -> Result<f64, InadmissibleAt> {
    let m = problem.model;
    let arg = problem.speed_c * v + m.h(v) - m.big_f(v);
    if v > 0.0 && arg <= 0.0 {
        return Err(InadmissibleAt { v, deficit: arg });
    }
    let eps = problem.epsilon;
    Ok((eps * eps + arg * arg).sqrt() - eps)
}

/// Signal that `cv + h(v) - F(v) ≤ 0`: the candidate speed violates the
/// necessary lower bound at this `v`.
#[derive(Debug, Clone, Copy, Error)]
#[error("speed necessarily inadmissible: cv + h(v) - F(v) = {deficit:.6e} ≤ 0 at v = {v}")]
pub struct InadmissibleAt {
    pub v: f64,
    pub deficit: f64,
}
