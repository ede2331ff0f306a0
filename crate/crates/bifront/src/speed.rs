//! Critical-speed computation.
//!
//! Two certified bounds sandwich the critical speed:
//!
//! * lower: `c ≥ max(0, sup_{v∈(0,1]} S(v))` with `S = (F - h)/v` — follows
//!   from integrating the reduced equation from `y(0) = 0`;
//! * upper: any `c ≥ max f - min h' + 2√(ε · sup f(v)/v)` is admissible — a
//!   positive lower solution exists for such speeds.
//!
//! The admissible speeds form an interval `[c*_ε, ∞)`, so the verdict of the
//! backward integration is a monotone boolean predicate of `c` and plain
//! bisection is certified. No randomness anywhere: results are reproducible
//! bit for bit at fixed tolerances.

use serde::Serialize;
use thiserror::Error;

use crate::model::{ModelSpec, ValidationReport};
use crate::numerics::rootfind::golden_max;
use crate::reduction::{
    integrate_backward, FrontProblem, ReductionError, ReductionSettings, Verdict, YTrajectory,
};

#[derive(Debug, Error)]
pub enum SpeedError {
    #[error("model failed validation:\n{0}")]
    InvalidModel(ValidationReport),
    #[error(
        "internal inconsistency: the certified upper bound c = {c} classified as not admissible \
         ({verdict:?}); integration tolerances are likely misconfigured"
    )]
    InconsistentUpperBound { c: f64, verdict: Verdict },
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("eps list must be strictly decreasing and positive")]
    InvalidEpsList,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// The certified sandwich for `c*_ε`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpeedBounds {
    /// integral lower bound, clamped at 0
    pub lower: f64,
    /// sufficient-admissibility value
    pub upper: f64,
    /// v attaining the supremum of S
    pub sup_s_arg: f64,
}

/// One probe of the bisection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IterationRecord {
    pub c: f64,
    pub admissible: bool,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// Result of the critical-speed search.
#[derive(Debug)]
pub struct CriticalSpeedResult {
    pub c_star: f64,
    /// (largest inadmissible probe or the lower bound, smallest admissible probe)
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub final_bracket_width: f64,
    pub bounds: SpeedBounds,
    pub epsilon: f64,
    pub tol_c: f64,
    /// trajectory at the admissible bracket end
    pub trajectory_at_c_star: YTrajectory,
    pub log: Vec<IterationRecord>,
}

impl CriticalSpeedResult {
    /// JSON record: `{c_star, lower_bound, upper_bound, iterations, epsilon,
    /// model_digest}`.
    pub fn to_json(&self, model: &ModelSpec) -> String {
        #[derive(Serialize)]
        struct Record {
            c_star: f64,
            lower_bound: f64,
            upper_bound: f64,
            iterations: usize,
            epsilon: f64,
            model_digest: String,
        }
        serde_json::to_string(&Record {
            c_star: self.c_star,
            lower_bound: self.bounds.lower,
            upper_bound: self.bounds.upper,
            iterations: self.iterations,
            epsilon: self.epsilon,
            model_digest: model.digest(),
        })
        .expect("result serialization cannot fail")
    }
}

/// Grid scan plus golden-section refinement of the supremum of `f` on
/// `(lo, hi]`; returns `(argmax, sup)`.
fn refined_sup(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, tol_x: f64) -> (f64, f64) {
    let mut best_v = hi;
    let mut best = f(hi);
    for i in 1..=n {
        let v = lo + (hi - lo) * i as f64 / n as f64;
        let s = f(v);
        if s > best {
            best = s;
            best_v = v;
        }
    }
    let span = (hi - lo) / n as f64;
    let a = (best_v - span).max(lo + (hi - lo) * 1e-12);
    let b = (best_v + span).min(hi);
    let (v_ref, s_ref) = golden_max(&f, a, b, tol_x);
    if s_ref > best {
        (v_ref, s_ref)
    } else {
        (best_v, best)
    }
}

/// Lower bound `max(0, sup S)` together with the argmax of S.
pub fn lower_bound_detailed(model: &ModelSpec) -> (f64, f64) {
    let n = model.quadrature_grid_size;
    let (v_arg, sup_s) = refined_sup(
        |v| model.evaluate_s(v).unwrap_or(f64::NEG_INFINITY),
        0.0,
        1.0,
        n,
        1e-10,
    );
    (sup_s.max(0.0), v_arg)
}

/// `max(0, sup_{v∈(0,1]} (F(v)-h(v))/v)` — every admissible speed is at
/// least this large.
pub fn lower_bound(model: &ModelSpec) -> f64 {
    lower_bound_detailed(model).0
}

/// The sufficient-admissibility bound
/// `max f - min h' + 2√(ε · sup f(v)/v)`.
///
/// `sup f/v` can be attained in the limit v → 0⁺ (it tends to the initial
/// slope of f); a log-spaced scan down to 1e-8 picks that up.
pub fn upper_bound(model: &ModelSpec, epsilon: f64) -> f64 {
    let n = model.quadrature_grid_size;
    let (_, max_f) = refined_sup(|v| model.f(v), 0.0, 1.0, n, 1e-10);
    let max_f = max_f.max(model.f(0.0));
    let (_, neg_min_hp) = refined_sup(|v| -model.h_prime(v), 0.0, 1.0, n, 1e-10);
    let min_hp = -neg_min_hp.max(-model.h_prime(0.0));

    let (_, mut sup_fv) = refined_sup(|v| model.f(v) / v, 0.0, 1.0, n, 1e-10);
    let mut v = 1e-8;
    while v < 1.0 {
        sup_fv = sup_fv.max(model.f(v) / v);
        v *= 2.0;
    }
    max_f - min_hp + 2.0 * (epsilon * sup_fv.max(0.0)).sqrt()
}

/// Settings shared by the bisection probes; the reduction defaults apply.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpeedSettings {
    pub reduction: ReductionSettings,
}

pub const DEFAULT_TOL_C: f64 = 1e-6;
const MAX_BISECTION_ITER: usize = 60;

/// Find the critical speed by bisection over the admissibility verdict.
///
/// Every probe integrates the reduced problem backward from `v = 1`. A
/// degenerate-endpoint failure (speed below the attachable range) counts as
/// inadmissible; a terminal-positive trajectory counts as inadmissible and
/// stays visible in the iteration log.
pub fn critical_speed(
    model: &ModelSpec,
    epsilon: f64,
    tol_c: f64,
    settings: &SpeedSettings,
) -> Result<CriticalSpeedResult, SpeedError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(SpeedError::InvalidEpsilon(epsilon));
    }
    let report = model.validate();
    if !report.is_valid() {
        return Err(SpeedError::InvalidModel(report));
    }

    let (lower, sup_s_arg) = lower_bound_detailed(model);
    let upper = upper_bound(model, epsilon).max(lower + 4.0 * tol_c);
    let bounds = SpeedBounds { lower, upper, sup_s_arg };

    let mut log: Vec<IterationRecord> = Vec::new();
    let rsettings = settings.reduction;
    let v_min = rsettings.v_min;

    let classify = |c: f64,
                        log: &mut Vec<IterationRecord>|
     -> Result<(bool, Option<YTrajectory>), SpeedError> {
        let problem = FrontProblem::new(model, epsilon, c)?;
        match integrate_backward(&problem, v_min, &rsettings) {
            Ok(traj) => {
                let adm = traj.verdict.is_admissible();
                log.push(IterationRecord { c, admissible: adm, verdict: traj.verdict });
                Ok((adm, Some(traj)))
            }
            Err(ReductionError::DegenerateEndpoint { .. }) => {
                log.push(IterationRecord {
                    c,
                    admissible: false,
                    verdict: Verdict::TerminalPositive { y_end: f64::INFINITY },
                });
                Ok((false, None))
            }
            Err(e) => Err(SpeedError::Reduction(e)),
        }
    };

    // the certified upper bound must classify admissible
    let (upper_ok, upper_traj) = classify(upper, &mut log)?;
    if !upper_ok {
        let verdict = log.last().map(|r| r.verdict).expect("probe was logged");
        return Err(SpeedError::InconsistentUpperBound { c: upper, verdict });
    }
    let upper_traj = upper_traj.expect("admissible probe carries a trajectory");

    // the lower bound may itself be admissible (pure-convection exactness)
    let (lower_ok, lower_traj) = classify(lower, &mut log)?;
    if lower_ok {
        let traj = lower_traj.expect("admissible probe carries a trajectory");
        let iterations = log.len();
        return Ok(CriticalSpeedResult {
            c_star: lower,
            bracket: (lower, lower),
            iterations,
            final_bracket_width: 0.0,
            bounds,
            epsilon,
            tol_c,
            trajectory_at_c_star: traj,
            log,
        });
    }

    let (mut c_lo, mut c_hi) = (lower, upper);
    let mut hi_traj = upper_traj;
    let mut iterations = 0usize;
    while c_hi - c_lo > tol_c && iterations < MAX_BISECTION_ITER {
        let mid = 0.5 * (c_lo + c_hi);
        if mid <= c_lo || mid >= c_hi {
            break;
        }
        let (adm, traj) = classify(mid, &mut log)?;
        if adm {
            c_hi = mid;
            hi_traj = traj.expect("admissible probe carries a trajectory");
        } else {
            c_lo = mid;
        }
        iterations += 1;
    }

    Ok(CriticalSpeedResult {
        c_star: 0.5 * (c_lo + c_hi),
        bracket: (c_lo, c_hi),
        iterations,
        final_bracket_width: c_hi - c_lo,
        bounds,
        epsilon,
        tol_c,
        trajectory_at_c_star: hi_traj,
        log,
    })
}

/// Row of the ε-sweep table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub c_star: f64,
    /// `c*(previous larger ε) ≥ c*(this ε) - tol_c` held at this row
    pub monotone_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub rows: Vec<SweepRow>,
    pub monotone: bool,
}

/// Critical speeds along a decreasing ε list, with `c*_ε` monotonicity
/// checked row by row. A violation is reported in the rows, never raised.
pub fn speed_monotonicity_check(
    model: &ModelSpec,
    eps_list: &[f64],
    tol_c: f64,
    settings: &SpeedSettings,
) -> Result<MonotonicityReport, SpeedError> {
    if eps_list.is_empty()
        || eps_list.iter().any(|&e| !e.is_finite() || e <= 0.0)
        || eps_list.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(SpeedError::InvalidEpsList);
    }
    let mut rows: Vec<SweepRow> = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let r = critical_speed(model, eps, tol_c, settings)?;
        let monotone_ok = rows
            .last()
            .map(|prev: &SweepRow| prev.c_star >= r.c_star - tol_c)
            .unwrap_or(true);
        rows.push(SweepRow { epsilon: eps, c_star: r.c_star, monotone_ok });
    }
    let monotone = rows.iter().all(|r| r.monotone_ok);
    Ok(MonotonicityReport { rows, monotone })
}
