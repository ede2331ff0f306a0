//! Vanishing-diffusion analysis.
//!
//! The regime function `S(v) = (F(v) - h(v))/v` (extended by S(0) = 0)
//! selects what happens to the critical front as ε → 0⁺:
//!
//! * **Case 1** — S' < 0 on (0,1]: the limit speed is 0 and the limit
//!   profile is the inviscid profile V_I through (0, 1/2), truncated at 0;
//! * **Case 2** — 0 < sup S ≠ S(1): the limit speed is f(v₊) - h'(v₊) where
//!   v₊ is the largest solution of F - h = v(f - h'); the limit profile is a
//!   slope-1 ramp glued C¹ to V_I at v₊;
//! * **Case 3** — S' > 0 on (0,1): the limit speed is F(1) - h(1) and the
//!   limit profile is the full slope-1 ramp between the equilibria.
//!
//! Anything else is reported as Unclassified, never guessed.
//!
//! Sharpness at the 0-equilibrium in case 1 is decided by
//! `ℓ = lim_{s→0⁺} f(s)/h'(s)` and by whether `∫₀ h'/f` converges (finite
//! attachment point z₀) or diverges (z₀ = -∞, profile positive everywhere).

use serde::Serialize;
use thiserror::Error;

use crate::model::ModelSpec;
use crate::numerics::quad::{self, ImproperVerdict};
use crate::numerics::rootfind::bisect_root;
use crate::profile::FrontProfile;
use crate::reduction::{integrate_backward, FrontProblem};
use crate::speed::{self, SpeedError, SpeedSettings};

#[derive(Debug, Error)]
pub enum LimitsError {
    #[error("operation requires regime {expected:?}, model classifies {found:?}")]
    WrongRegime { expected: Regime, found: Regime },
    #[error("theorem hypotheses not satisfied (Unclassified regime); limit profile undefined")]
    Unclassified,
    #[error("classification inconsistency: no sign change of S' found in (0, 1)")]
    NoSignChange,
    #[error("inviscid equation degenerates at v = {v} (z = {z}): c̄ + h'(v) ≤ 0 with f(v) > 0")]
    DegenerateInviscid { v: f64, z: f64 },
    #[error("anchor violates c̄ + h'(v) > 0 at v = {v}")]
    DegenerateAnchor { v: f64 },
    #[error("interval [{v0}, {v1}] rejected: need v0 < v1 within [0, 1]")]
    BadInterval { v0: f64, v1: f64 },
    #[error("need at least 3 epsilon values for extrapolation, got {0}")]
    TooFewEps(usize),
    #[error(transparent)]
    Speed(#[from] SpeedError),
}

const CLASSIFICATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Case1,
    Case2,
    Case3,
    Unclassified,
}

/// Outcome of the regime classification with its grid evidence.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub sup_s: f64,
    pub sup_s_arg: f64,
    pub s_at_1: f64,
    /// min and max of S' over the classification grid
    pub s_prime_sign_summary: (f64, f64),
    /// the case-2 side condition: f - h' has a unique maximum point
    pub unique_max_fminus_hprime: bool,
}

/// Classify the ε → 0 regime on a grid of `quadrature_grid_size` points.
///
/// Strict uniform signs are required beyond `1e-9`; when no case matches the
/// model is reported Unclassified.
pub fn classify_regime(model: &ModelSpec) -> RegimeReport {
    let n = model.quadrature_grid_size;
    let mut sp_min = f64::INFINITY;
    let mut sp_max = f64::NEG_INFINITY;
    // S' over the open interval (0, 1)
    for i in 1..n {
        let v = i as f64 / n as f64;
        let sp = model.evaluate_s_prime(v).expect("grid point inside domain");
        sp_min = sp_min.min(sp);
        sp_max = sp_max.max(sp);
    }
    let sp_at_1 = model.evaluate_s_prime(1.0).expect("v = 1 inside domain");

    let (lower, sup_s_arg) = speed::lower_bound_detailed(model);
    let sup_s = if lower > 0.0 {
        lower
    } else {
        // keep the true (possibly negative) supremum for reporting
        let mut s = model.evaluate_s(1.0).unwrap();
        for i in 1..n {
            let v = i as f64 / n as f64;
            s = s.max(model.evaluate_s(v).unwrap());
        }
        s
    };
    let s_at_1 = model.evaluate_s(1.0).expect("v = 1 inside domain");

    let unique_max = count_local_maxima(model, n) == 1;

    let regime = if sp_max.max(sp_at_1) < -CLASSIFICATION_TOL {
        Regime::Case1
    } else if sp_min > CLASSIFICATION_TOL {
        Regime::Case3
    } else if sup_s > CLASSIFICATION_TOL && (sup_s - s_at_1).abs() > CLASSIFICATION_TOL {
        Regime::Case2
    } else {
        Regime::Unclassified
    };

    RegimeReport {
        regime,
        sup_s,
        sup_s_arg,
        s_at_1,
        s_prime_sign_summary: (sp_min, sp_max),
        unique_max_fminus_hprime: unique_max,
    }
}

/// Count strict local maxima of f - h' on the closed grid, merging plateaus.
fn count_local_maxima(model: &ModelSpec, n: usize) -> usize {
    let d: Vec<f64> = (0..=n)
        .map(|i| {
            let v = i as f64 / n as f64;
            model.f(v) - model.h_prime(v)
        })
        .collect();
    let tol = 1e-12;
    let mut count = 0;
    let mut i = 0;
    while i <= n {
        // extent of the plateau starting at i
        let mut j = i;
        while j < n && (d[j + 1] - d[i]).abs() <= tol {
            j += 1;
        }
        let left_lower = i == 0 || d[i - 1] < d[i] - tol;
        let right_lower = j == n || d[j + 1] < d[i] - tol;
        if left_lower && right_lower {
            count += 1;
        }
        i = j + 1;
    }
    count
}

/// Largest solution of `F(v) - h(v) = v(f(v) - h'(v))` in (0, 1),
/// equivalently the largest zero of S'. Requires regime Case2.
pub fn find_v_plus(model: &ModelSpec) -> Result<f64, LimitsError> {
    let report = classify_regime(model);
    if report.regime != Regime::Case2 {
        return Err(LimitsError::WrongRegime { expected: Regime::Case2, found: report.regime });
    }
    find_v_plus_unchecked(model)
}

fn find_v_plus_unchecked(model: &ModelSpec) -> Result<f64, LimitsError> {
    let n = model.quadrature_grid_size;
    let sp = |v: f64| model.evaluate_s_prime(v).expect("inside domain");
    // scan from the right for the last sign change
    let mut prev_v = 1.0;
    let mut prev_s = sp(1.0);
    for i in (1..n).rev() {
        let v = i as f64 / n as f64;
        let s = sp(v);
        if s == 0.0 {
            return Ok(v);
        }
        if s * prev_s < 0.0 {
            return Ok(bisect_root(sp, v, prev_v, 1e-12));
        }
        prev_v = v;
        prev_s = s;
    }
    Err(LimitsError::NoSignChange)
}

/// Limit speed by the theorem formula for classified regimes; Unclassified
/// falls back to the integral lower bound with `theorem_value = false`.
#[derive(Debug, Clone, Serialize)]
pub struct LimitSpeed {
    pub c_bar: f64,
    pub regime: Regime,
    /// false when the returned number is only the lower bound (Unclassified)
    pub theorem_value: bool,
}

pub fn limit_speed(model: &ModelSpec) -> Result<LimitSpeed, LimitsError> {
    let report = classify_regime(model);
    let (c_bar, theorem_value) = match report.regime {
        Regime::Case1 => (0.0, true),
        Regime::Case2 => {
            let v_plus = find_v_plus_unchecked(model)?;
            (model.f(v_plus) - model.h_prime(v_plus), true)
        }
        Regime::Case3 => (model.big_f(1.0) - model.h(1.0), true),
        Regime::Unclassified => (speed::lower_bound(model), false),
    };
    Ok(LimitSpeed { c_bar, regime: report.regime, theorem_value })
}

/// Sampled inviscid profile V_I: the C¹ solution of `(c̄ + h'(v)) v' = f(v)`
/// through the anchor, as `[z, v, dv/dz]` triples with z increasing (the
/// slope `dv/dz = f(v)/(c̄ + h'(v))` is analytic, so segments interpolate
/// with cubic Hermite accuracy).
///
/// `z(v) = z̲ + ∫_{v̲}^v (c̄ + h'(s))/f(s) ds`, marched with steps of roughly
/// constant z advance (ramped in geometrically near the anchor) so the sharp
/// region is resolved. Marching stops at the requested z range, at the
/// equilibria, or at a degeneracy (`c̄ + h'(v) ≤ 0` with f(v) > 0), which is
/// reported with its location.
pub fn inviscid_profile(
    model: &ModelSpec,
    c_bar: f64,
    anchor: (f64, f64),
    z_range: (f64, f64),
) -> Result<Vec<[f64; 3]>, LimitsError> {
    let (z_anchor, v_anchor) = anchor;
    if c_bar + model.h_prime(v_anchor) <= 0.0 {
        return Err(LimitsError::DegenerateAnchor { v: v_anchor });
    }
    let (z_lo, z_hi) = z_range;
    let integrand = |s: f64| (c_bar + model.h_prime(s)) / model.f(s);
    let slope = |s: f64| model.f(s) / (c_bar + model.h_prime(s));
    let dz_target = 0.004;
    let max_iter = 2_000_000;

    let mut up: Vec<[f64; 3]> = Vec::new();
    let mut v = v_anchor;
    let mut z = z_anchor;
    let mut dz_step = dz_target / 256.0;
    let mut iter = 0;
    while z < z_hi && v < 1.0 - 1e-12 {
        iter += 1;
        if iter > max_iter {
            break;
        }
        let denom = c_bar + model.h_prime(v);
        if denom <= 0.0 {
            return Err(LimitsError::DegenerateInviscid { v, z });
        }
        let dv = (dz_step * model.f(v) / denom).min(0.25 * (1.0 - v)).min(5e-3);
        if dv <= 0.0 || v + dv <= v {
            break;
        }
        z += quad::integrate(integrand, v, v + dv, 1e-12, 1e-10);
        v += dv;
        up.push([z, v, slope(v)]);
        dz_step = (dz_step * 2.0).min(dz_target);
    }

    let mut down: Vec<[f64; 3]> = Vec::new();
    v = v_anchor;
    z = z_anchor;
    dz_step = dz_target / 256.0;
    iter = 0;
    while z > z_lo && v > 1e-13 {
        iter += 1;
        if iter > max_iter {
            break;
        }
        let denom = c_bar + model.h_prime(v);
        if denom <= 0.0 {
            return Err(LimitsError::DegenerateInviscid { v, z });
        }
        let mut dv = (dz_step * model.f(v) / denom).min(5e-3);
        // final partial step onto the equilibrium when the slope stays
        // bounded away from zero (ℓ > 0: the profile exits at finite z)
        if dv >= v {
            dv = v - 1e-300;
        }
        if dv <= 0.0 {
            break;
        }
        let v_next = (v - dv).max(1e-300);
        z -= quad::integrate(integrand, v_next, v, 1e-12, 1e-10);
        v = v_next;
        down.push([z, v, slope(v.max(1e-30))]);
        dz_step = (dz_step * 2.0).min(dz_target);
        if dv < 1e-14 {
            break; // z converging (finite z₀ with C¹ attachment)
        }
    }

    down.reverse();
    down.push([z_anchor, v_anchor, slope(v_anchor)]);
    down.extend(up);
    Ok(down)
}

/// Sharpness classification at the 0-equilibrium (regime Case1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SharpnessReport {
    /// `lim_{s→0⁺} f(s)/h'(s)`; None when the probe did not converge
    pub ell: Option<f64>,
    pub sharp: bool,
    pub z0_finite: bool,
}

/// Decide `ℓ = lim f/h'` by a log-spaced probe with one Richardson step of
/// empirically fitted order, and z₀ finiteness by the convergence of
/// `∫₀ h'/f`.
pub fn sharpness_at_zero(model: &ModelSpec) -> Result<SharpnessReport, LimitsError> {
    let report = classify_regime(model);
    if report.regime != Regime::Case1 {
        return Err(LimitsError::WrongRegime { expected: Regime::Case1, found: report.regime });
    }

    let ratio = |s: f64| model.f(s) / model.h_prime(s);
    let probes: Vec<f64> = (4..=12).map(|k| 10f64.powi(-k)).collect();
    let values: Vec<f64> = probes.iter().map(|&s| ratio(s)).collect();
    let ell = estimate_limit(&values);

    let (verdict, _) = quad::probe_improper_lower(|s| model.h_prime(s) / model.f(s), 0.5, 1e-9);
    let z0_finite = verdict == ImproperVerdict::Convergent;
    let sharp = ell.map(|l| l > CLASSIFICATION_TOL).unwrap_or(false);
    Ok(SharpnessReport { ell, sharp, z0_finite })
}

/// Limit of a sequence sampled at s = 10^-4, 10^-5, ... — returns None when
/// the tail neither settles nor follows a consistent power law.
fn estimate_limit(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 4 {
        return None;
    }
    let d1 = values[n - 2] - values[n - 3];
    let d2 = values[n - 1] - values[n - 2];
    let last = values[n - 1];
    if d2.abs() < 1e-12 * (1.0 + last.abs()) {
        return Some(last);
    }
    // power-law tail: value(s) ≈ ℓ + C s^θ with s shrinking 10x per probe
    if d1.abs() > 0.0 && d2.abs() < d1.abs() {
        let rho = d2 / d1; // = 10^{-θ}
        if rho > 0.0 && rho < 0.95 {
            let extrapolated = last + d2 * rho / (1.0 - rho);
            return Some(extrapolated);
        }
    }
    None
}

/// One piece of the limit profile.
#[derive(Debug, Clone, Serialize)]
pub enum Segment {
    /// constant 0 or 1
    Constant { value: f64, z_from: f64, z_to: f64 },
    /// slope exactly 1 through (z_from, v_at_from)
    Linear { z_from: f64, z_to: f64, v_at_from: f64 },
    /// sampled inviscid piece; samples are [z, v, dv/dz]
    Inviscid { z_from: f64, z_to: f64, samples: Vec<[f64; 3]> },
}

impl Segment {
    fn contains(&self, z: f64) -> bool {
        let (a, b) = self.span();
        z >= a && z <= b
    }

    fn span(&self) -> (f64, f64) {
        match self {
            Segment::Constant { z_from, z_to, .. }
            | Segment::Linear { z_from, z_to, .. }
            | Segment::Inviscid { z_from, z_to, .. } => (*z_from, *z_to),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Segment::Constant { value, .. } => {
                if *value < 0.5 {
                    "const0"
                } else {
                    "const1"
                }
            }
            Segment::Linear { .. } => "linear",
            Segment::Inviscid { .. } => "inviscid",
        }
    }

    fn eval(&self, z: f64) -> f64 {
        match self {
            Segment::Constant { value, .. } => *value,
            Segment::Linear { z_from, v_at_from, .. } => v_at_from + (z - z_from),
            Segment::Inviscid { samples, .. } => {
                if samples.is_empty() {
                    return f64::NAN;
                }
                if z <= samples[0][0] {
                    return samples[0][1];
                }
                let last = samples[samples.len() - 1];
                if z >= last[0] {
                    return last[1];
                }
                let mut lo = 0;
                let mut hi = samples.len() - 1;
                while hi - lo > 1 {
                    let m = (lo + hi) / 2;
                    if samples[m][0] <= z {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                let (a, b) = (samples[lo], samples[hi]);
                crate::numerics::interp::hermite_eval(a[0], b[0], a[1], b[1], a[2], b[2], z)
            }
        }
    }
}

/// The piecewise limit profile; contiguous segments covering the real line,
/// equal to 1/2 at z = 0.
#[derive(Debug, Clone, Serialize)]
pub struct PiecewiseProfile {
    pub segments: Vec<Segment>,
}

impl PiecewiseProfile {
    pub fn eval(&self, z: f64) -> f64 {
        for s in &self.segments {
            if s.contains(z) {
                return s.eval(z).clamp(0.0, 1.0);
            }
        }
        // outside all spans: clamp onto the nearest end
        let first = self.segments.first().expect("profile has segments");
        let last = self.segments.last().expect("profile has segments");
        if z < first.span().0 {
            first.eval(first.span().0).clamp(0.0, 1.0)
        } else {
            last.eval(last.span().1.min(1e18)).clamp(0.0, 1.0)
        }
    }

    pub fn tag_at(&self, z: f64) -> &'static str {
        for s in &self.segments {
            if s.contains(z) {
                return s.tag();
            }
        }
        "outside"
    }

    /// CSV `z,v,segment_tag` sampled uniformly on [z_lo, z_hi].
    pub fn to_csv(&self, z_lo: f64, z_hi: f64, n: usize) -> String {
        let mut out = String::from("z,v,segment_tag\n");
        for i in 0..n {
            let z = z_lo + (z_hi - z_lo) * i as f64 / (n - 1) as f64;
            out.push_str(&format!("{z:.11e},{:.11e},{}\n", self.eval(z), self.tag_at(z)));
        }
        out
    }
}

/// Everything the ε → 0 theory yields for one model.
#[derive(Debug, Clone, Serialize)]
pub struct LimitAnalysis {
    pub regime: RegimeReport,
    pub c_bar: f64,
    /// false when c_bar is only the lower-bound fallback (Unclassified)
    pub theorem_value: bool,
    pub v_plus: Option<f64>,
    pub z_plus: Option<f64>,
    pub kink_points: Vec<f64>,
    /// z where the slope-1 ramp meets V_I in case 2 (a C¹ junction, not a
    /// kink): v₊ - 1/2 when v₊ ≥ 1/2, otherwise z₊
    pub vl_vi_joint: Option<f64>,
    pub sharp_at_zero: bool,
    pub ell: Option<f64>,
    /// finite attachment point of the case-1 profile; None in other cases
    /// or when z₀ = -∞
    pub z0: Option<f64>,
    pub z0_is_minus_infinity: bool,
    #[serde(skip)]
    pub limit_profile: Option<PiecewiseProfile>,
}

/// z-extent over which inviscid tails are sampled.
const PROFILE_SPAN: f64 = 14.0;

/// Assemble the full limit analysis: regime, limit speed, v₊/z₊, sharpness
/// diagnostics and the piecewise limit profile. Unclassified models get the
/// report and the fallback speed, but no profile.
pub fn analyze(model: &ModelSpec) -> Result<LimitAnalysis, LimitsError> {
    let regime = classify_regime(model);
    let ls = limit_speed(model)?;
    let c_bar = ls.c_bar;

    match regime.regime {
        Regime::Case3 => {
            let profile = PiecewiseProfile {
                segments: vec![
                    Segment::Constant { value: 0.0, z_from: f64::NEG_INFINITY, z_to: -0.5 },
                    Segment::Linear { z_from: -0.5, z_to: 0.5, v_at_from: 0.0 },
                    Segment::Constant { value: 1.0, z_from: 0.5, z_to: f64::INFINITY },
                ],
            };
            Ok(LimitAnalysis {
                regime,
                c_bar,
                theorem_value: true,
                v_plus: None,
                z_plus: None,
                kink_points: vec![-0.5, 0.5],
                vl_vi_joint: None,
                sharp_at_zero: true,
                ell: None,
                z0: None,
                z0_is_minus_infinity: false,
                limit_profile: Some(profile),
            })
        }
        Regime::Case2 => {
            let v_plus = find_v_plus_unchecked(model)?;
            if !regime.unique_max_fminus_hprime {
                // the theorem's side condition failed: refuse the profile
                return Ok(LimitAnalysis {
                    regime: RegimeReport { regime: Regime::Unclassified, ..regime },
                    c_bar,
                    theorem_value: false,
                    v_plus: Some(v_plus),
                    z_plus: None,
                    kink_points: vec![],
                    vl_vi_joint: None,
                    sharp_at_zero: false,
                    ell: None,
                    z0: None,
                    z0_is_minus_infinity: false,
                    limit_profile: None,
                });
            }
            if v_plus >= 0.5 {
                let joint = v_plus - 0.5;
                let samples =
                    inviscid_profile(model, c_bar, (joint, v_plus), (joint, joint + PROFILE_SPAN))?;
                let profile = PiecewiseProfile {
                    segments: vec![
                        Segment::Constant { value: 0.0, z_from: f64::NEG_INFINITY, z_to: -0.5 },
                        Segment::Linear { z_from: -0.5, z_to: joint, v_at_from: 0.0 },
                        Segment::Inviscid { z_from: joint, z_to: f64::INFINITY, samples },
                    ],
                };
                Ok(LimitAnalysis {
                    regime,
                    c_bar,
                    theorem_value: true,
                    v_plus: Some(v_plus),
                    z_plus: None,
                    kink_points: vec![-0.5],
                    vl_vi_joint: Some(joint),
                    sharp_at_zero: true,
                    ell: None,
                    z0: None,
                    z0_is_minus_infinity: false,
                    limit_profile: Some(profile),
                })
            } else {
                // z₊ < 0 is where V_I(·; 0, 1/2) passes through v₊
                let z_plus = -quad::integrate(
                    |s| (c_bar + model.h_prime(s)) / model.f(s),
                    v_plus,
                    0.5,
                    1e-13,
                    1e-11,
                );
                let samples =
                    inviscid_profile(model, c_bar, (0.0, 0.5), (z_plus, PROFILE_SPAN))?;
                let profile = PiecewiseProfile {
                    segments: vec![
                        Segment::Constant {
                            value: 0.0,
                            z_from: f64::NEG_INFINITY,
                            z_to: z_plus - v_plus,
                        },
                        Segment::Linear { z_from: z_plus - v_plus, z_to: z_plus, v_at_from: 0.0 },
                        Segment::Inviscid { z_from: z_plus, z_to: f64::INFINITY, samples },
                    ],
                };
                Ok(LimitAnalysis {
                    regime,
                    c_bar,
                    theorem_value: true,
                    v_plus: Some(v_plus),
                    z_plus: Some(z_plus),
                    kink_points: vec![z_plus - v_plus],
                    vl_vi_joint: Some(z_plus),
                    sharp_at_zero: true,
                    ell: None,
                    z0: None,
                    z0_is_minus_infinity: false,
                    limit_profile: Some(profile),
                })
            }
        }
        Regime::Case1 => {
            let sharpness = sharpness_at_zero(model)?;
            let samples = inviscid_profile(
                model,
                0.0,
                (0.0, 0.5),
                (-PROFILE_SPAN, PROFILE_SPAN),
            )?;
            let z_first = samples[0][0];
            let v_first = samples[0][1];
            let (segments, z0, kinks) = if sharpness.z0_finite {
                // attachment at finite z₀ ≈ the leftmost sample (v ≈ 0)
                let z0 = z_first - if sharpness.sharp {
                    // linear exit with slope ℓ: close the残 gap exactly
                    v_first / sharpness.ell.unwrap_or(1.0).max(1e-300)
                } else {
                    0.0
                };
                let kinks = if sharpness.sharp { vec![z0] } else { vec![] };
                (
                    vec![
                        Segment::Constant { value: 0.0, z_from: f64::NEG_INFINITY, z_to: z0 },
                        Segment::Inviscid { z_from: z0, z_to: f64::INFINITY, samples },
                    ],
                    Some(z0),
                    kinks,
                )
            } else {
                (
                    vec![Segment::Inviscid {
                        z_from: f64::NEG_INFINITY,
                        z_to: f64::INFINITY,
                        samples,
                    }],
                    None,
                    vec![],
                )
            };
            Ok(LimitAnalysis {
                regime,
                c_bar: 0.0,
                theorem_value: true,
                v_plus: None,
                z_plus: None,
                kink_points: kinks,
                vl_vi_joint: None,
                sharp_at_zero: sharpness.sharp,
                ell: sharpness.ell,
                z0,
                z0_is_minus_infinity: !sharpness.z0_finite,
                limit_profile: Some(PiecewiseProfile { segments }),
            })
        }
        Regime::Unclassified => Ok(LimitAnalysis {
            regime,
            c_bar,
            theorem_value: false,
            v_plus: None,
            z_plus: None,
            kink_points: vec![],
            vl_vi_joint: None,
            sharp_at_zero: false,
            ell: None,
            z0: None,
            z0_is_minus_infinity: false,
            limit_profile: None,
        }),
    }
}

/// The piecewise limit profile of the classified regime.
pub fn limit_profile(model: &ModelSpec) -> Result<PiecewiseProfile, LimitsError> {
    let analysis = analyze(model)?;
    analysis.limit_profile.ok_or(LimitsError::Unclassified)
}

/// sup over a z window of |v_ε(z) - v̄(z)| on a uniform probe grid.
pub fn profile_distance(
    profile: &FrontProfile,
    limit: &PiecewiseProfile,
    z_window: (f64, f64),
    n: usize,
) -> f64 {
    let (lo, hi) = z_window;
    let mut worst = 0.0f64;
    for i in 0..n {
        let z = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        worst = worst.max((profile.v_at_z(z) - limit.eval(z)).abs());
    }
    worst
}

/// Richardson extrapolation with empirically fitted order from the last
/// three values sampled at a geometrically decreasing parameter.
/// Returns (extrapolated value, fitted order).
pub fn richardson_extrapolate(eps: &[f64], values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n >= 3 && eps.len() == n);
    let r = eps[n - 3] / eps[n - 2];
    let d1 = values[n - 2] - values[n - 3];
    let d2 = values[n - 1] - values[n - 2];
    if d2 == 0.0 || d1 == 0.0 || (d2 / d1) <= 0.0 {
        return (values[n - 1], f64::NAN);
    }
    let p = ((d1 / d2).ln() / r.ln()).clamp(0.25, 4.0);
    let rp = eps[n - 2] / eps[n - 1];
    let extrapolated = values[n - 1] + d2 / (rp.powf(p) - 1.0);
    (extrapolated, p)
}

/// Result of the linear-piece speed identity check (regime Case3).
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub v0: f64,
    pub v1: f64,
    pub c_bar_extrapolated: f64,
    pub fitted_order: f64,
    pub y_bar_v0: f64,
    pub y_bar_v1: f64,
    pub identity_rhs: f64,
    pub residual: f64,
    pub pass: bool,
}

/// Check the weak-limit identity
/// `c̄ = [F(v1)-F(v0)-h(v1)+h(v0)]/(v1-v0) + [ȳ(v1)-ȳ(v0)]/(v1-v0)`
/// by extrapolating `c*_ε` and `y_ε` over a decreasing ε list. With
/// `(v0, v1) = (0, 1)` the ȳ terms vanish and the identity reduces to
/// `c̄ = F(1) - h(1)`.
pub fn check_linear_piece_identity(
    model: &ModelSpec,
    eps_list: &[f64],
    v0: f64,
    v1: f64,
    settings: &SpeedSettings,
    threshold: f64,
) -> Result<IdentityReport, LimitsError> {
    if !(v0 < v1 && (0.0..=1.0).contains(&v0) && (0.0..=1.0).contains(&v1)) {
        return Err(LimitsError::BadInterval { v0, v1 });
    }
    let regime = classify_regime(model);
    if regime.regime != Regime::Case3 {
        return Err(LimitsError::WrongRegime { expected: Regime::Case3, found: regime.regime });
    }
    if eps_list.len() < 3 {
        return Err(LimitsError::TooFewEps(eps_list.len()));
    }

    let mut c_values = Vec::with_capacity(eps_list.len());
    let mut y0_values = Vec::with_capacity(eps_list.len());
    let mut y1_values = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let r = speed::critical_speed(model, eps, 1e-7, settings)?;
        let problem = FrontProblem::new(model, eps, r.bracket.1).map_err(SpeedError::from)?;
        let traj = integrate_backward(&problem, settings.reduction.v_min, &settings.reduction)
            .map_err(SpeedError::from)?;
        c_values.push(r.c_star);
        // boundary values fall back to the two-point conditions y(0)=y(1)=0
        y0_values.push(if v0 <= settings.reduction.v_min { 0.0 } else { traj.y_at(v0) });
        y1_values.push(if v1 >= 1.0 - settings.reduction.delta { 0.0 } else { traj.y_at(v1) });
    }

    let (c_bar, order) = richardson_extrapolate(eps_list, &c_values);
    let (y_bar_v0, _) = richardson_extrapolate(eps_list, &y0_values);
    let (y_bar_v1, _) = richardson_extrapolate(eps_list, &y1_values);

    let dv = v1 - v0;
    let identity_rhs = (model.big_f(v1) - model.big_f(v0) - model.h(v1) + model.h(v0)) / dv
        + (y_bar_v1 - y_bar_v0) / dv;
    let residual = (c_bar - identity_rhs).abs();
    Ok(IdentityReport {
        v0,
        v1,
        c_bar_extrapolated: c_bar,
        fitted_order: order,
        y_bar_v0,
        y_bar_v1,
        identity_rhs,
        residual,
        pass: residual <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConvectionSpec, ReactionSpec};

    fn fb(alpha: f64) -> ModelSpec {
        ModelSpec::fisher_burgers(1.0, alpha)
    }

    fn fig3_model() -> ModelSpec {
        ModelSpec::new(
            ReactionSpec::Logistic { k: 1.0 },
            ConvectionSpec::Power { q: 1.5, coef: 1.0 },
        )
        .unwrap()
    }

    fn fig4_model() -> ModelSpec {
        ModelSpec::new(
            ReactionSpec::PowerLogistic { p: 2.0, k: 1.0 },
            ConvectionSpec::Quadratic { alpha: 1.0 },
        )
        .unwrap()
    }

    /// f ≡ 0, h ≡ 0 gives S ≡ 0 exactly: every theorem hypothesis fails
    fn degenerate_model() -> ModelSpec {
        ModelSpec::new(ReactionSpec::Zero, ConvectionSpec::Zero).unwrap()
    }

    #[test]
    fn fisher_burgers_regimes() {
        assert_eq!(classify_regime(&fb(1.0)).regime, Regime::Case1);
        assert_eq!(classify_regime(&fb(0.5)).regime, Regime::Case1);
        assert_eq!(classify_regime(&fb(0.05)).regime, Regime::Case2);
        assert_eq!(classify_regime(&fb(-0.05)).regime, Regime::Case2);
        assert_eq!(classify_regime(&fb(0.2)).regime, Regime::Case2);
        assert_eq!(classify_regime(&fb(-1.0 / 6.0)).regime, Regime::Case3);
        assert_eq!(classify_regime(&fb(-0.5)).regime, Regime::Case3);
        assert_eq!(classify_regime(&fig3_model()).regime, Regime::Case1);
        assert_eq!(classify_regime(&fig4_model()).regime, Regime::Case1);
    }

    #[test]
    fn degenerate_model_is_unclassified() {
        let report = classify_regime(&degenerate_model());
        assert_eq!(report.regime, Regime::Unclassified, "{report:?}");
        assert!(matches!(limit_profile(&degenerate_model()), Err(LimitsError::Unclassified)));
        let ls = limit_speed(&degenerate_model()).unwrap();
        assert!(!ls.theorem_value);
    }

    #[test]
    fn v_plus_closed_form() {
        // v₊ = 3(k/2 - α)/(2k)
        assert!((find_v_plus(&fb(0.05)).unwrap() - 0.675).abs() < 1e-9);
        assert!((find_v_plus(&fb(-0.05)).unwrap() - 0.825).abs() < 1e-9);
        // no-convection logistic: v₊ = 3/4
        let m = ModelSpec::new(ReactionSpec::Logistic { k: 1.0 }, ConvectionSpec::Zero).unwrap();
        assert!((find_v_plus(&m).unwrap() - 0.75).abs() < 1e-9);
        // wrong regime is refused
        assert!(matches!(find_v_plus(&fb(1.0)), Err(LimitsError::WrongRegime { .. })));
    }

    #[test]
    fn v_plus_symmetry() {
        for &alpha in &[0.02, 0.05, 0.1, 0.15] {
            let a = find_v_plus(&fb(alpha)).unwrap();
            let b = find_v_plus(&fb(-alpha)).unwrap();
            assert!((a + b - 1.5).abs() < 1e-9, "alpha={alpha}: {a} + {b}");
        }
    }

    #[test]
    fn limit_speed_closed_forms() {
        assert_eq!(limit_speed(&fb(1.0)).unwrap().c_bar, 0.0);
        assert!((limit_speed(&fb(-1.0 / 6.0)).unwrap().c_bar - 1.0 / 3.0).abs() < 1e-9);
        assert!((limit_speed(&fb(-0.5)).unwrap().c_bar - 2.0 / 3.0).abs() < 1e-9);
        assert!((limit_speed(&fb(0.05)).unwrap().c_bar - 0.151875).abs() < 1e-9);
        // the α = -0.05 value from the formula (see also the oracle): 0.226875
        assert!((limit_speed(&fb(-0.05)).unwrap().c_bar - 0.226875).abs() < 1e-9);
    }

    #[test]
    fn case2_triple_identity() {
        for &alpha in &[0.05, -0.05, 0.2] {
            let m = fb(alpha);
            let v_plus = find_v_plus(&m).unwrap();
            let c_bar = limit_speed(&m).unwrap().c_bar;
            let s = m.evaluate_s(v_plus).unwrap();
            let fh = m.f(v_plus) - m.h_prime(v_plus);
            assert!((c_bar - s).abs() <= 1e-10, "alpha={alpha}: c̄={c_bar} S(v₊)={s}");
            assert!((c_bar - fh).abs() <= 1e-10);
        }
    }

    #[test]
    fn inviscid_profile_closed_form_fig4() {
        // 2v v' = v²(1-v) reduces to the logistic v' = v(1-v)/2:
        // V_I(z) = 1/(1+e^{-z/2})
        let m = fig4_model();
        let samples = inviscid_profile(&m, 0.0, (0.0, 0.5), (-6.0, 6.0)).unwrap();
        let eval = |z: f64| {
            let seg = Segment::Inviscid { z_from: -6.0, z_to: 6.0, samples: samples.clone() };
            seg.eval(z)
        };
        assert!((eval(0.0) - 0.5).abs() < 1e-9);
        assert!((eval(2.0) - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-6);
        assert!((eval(-2.0) - 1.0 / (1.0 + 1.0f64.exp())).abs() < 1e-6);
    }

    #[test]
    fn sharpness_flags_per_model() {
        // Fisher-Burgers α=1: ℓ = 1/(2α) = 1/2 → sharp
        let s = sharpness_at_zero(&fb(1.0)).unwrap();
        assert!((s.ell.unwrap() - 0.5).abs() < 1e-6, "{s:?}");
        assert!(s.sharp && s.z0_finite);

        // fig3: ℓ = 0, z₀ finite → globally C¹
        let s3 = sharpness_at_zero(&fig3_model()).unwrap();
        assert!(s3.ell.unwrap().abs() < 1e-6, "{s3:?}");
        assert!(!s3.sharp && s3.z0_finite);

        // fig4: ℓ = 0, ∫ h'/f diverges → z₀ = -∞
        let s4 = sharpness_at_zero(&fig4_model()).unwrap();
        assert!(s4.ell.unwrap().abs() < 1e-6, "{s4:?}");
        assert!(!s4.sharp && !s4.z0_finite);

        assert!(matches!(
            sharpness_at_zero(&fb(-0.5)),
            Err(LimitsError::WrongRegime { .. })
        ));
    }

    #[test]
    fn case1_profile_truncates_at_z0() {
        // α=1: V_I(z) = 1 - e^{-z/2}/2 exits at z₀ = -2 ln 2
        let analysis = analyze(&fb(1.0)).unwrap();
        assert_eq!(analysis.regime.regime, Regime::Case1);
        assert!(analysis.sharp_at_zero);
        let z0 = analysis.z0.unwrap();
        assert!((z0 + 2.0 * 2f64.ln()).abs() < 1e-3, "z0 = {z0}");
        let profile = analysis.limit_profile.unwrap();
        assert_eq!(profile.eval(z0 - 0.5), 0.0);
        assert!((profile.eval(0.0) - 0.5).abs() < 1e-9);
        assert!((profile.eval(1.0) - (1.0 - 0.5 * (-0.5f64).exp())).abs() < 1e-5);
    }

    #[test]
    fn case1_fig4_profile_positive_everywhere() {
        let analysis = analyze(&fig4_model()).unwrap();
        assert!(analysis.z0_is_minus_infinity);
        assert!(analysis.kink_points.is_empty());
        let profile = analysis.limit_profile.unwrap();
        for &z in &[-10.0, -5.0, 0.0, 5.0] {
            assert!(profile.eval(z) > 0.0);
        }
    }

    #[test]
    fn case3_profile_is_the_full_ramp() {
        let analysis = analyze(&fb(-0.5)).unwrap();
        let profile = analysis.limit_profile.unwrap();
        assert!((profile.eval(0.3) - 0.8).abs() < 1e-12);
        assert!((profile.eval(0.0) - 0.5).abs() < 1e-12);
        assert_eq!(profile.eval(-2.0), 0.0);
        assert_eq!(profile.eval(2.0), 1.0);
        assert_eq!(analysis.kink_points, vec![-0.5, 0.5]);
        assert!((analysis.c_bar - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn case2_profile_glues_c1_at_the_joint() {
        // α=0.05: kink at z = v₊ - 1/2 = 0.175, C¹ gluing at the joint
        let analysis = analyze(&fb(0.05)).unwrap();
        let v_plus = analysis.v_plus.unwrap();
        assert!((v_plus - 0.675).abs() < 1e-9);
        let joint = v_plus - 0.5;
        let profile = analysis.limit_profile.unwrap();
        // continuity
        let below = profile.eval(joint - 1e-9);
        let above = profile.eval(joint + 1e-9);
        assert!((below - above).abs() < 1e-7);
        assert!((profile.eval(joint) - v_plus).abs() < 1e-9);
        // C¹: the analytic V_I slope at the joint, f(v₊)/(c̄+h'(v₊)), is 1
        let m = fb(0.05);
        let c_bar = limit_speed(&m).unwrap().c_bar;
        let analytic = m.f(v_plus) / (c_bar + m.h_prime(v_plus));
        assert!((analytic - 1.0).abs() < 1e-6, "analytic slope {analytic}");
        let chord = (profile.eval(joint + 1e-4) - profile.eval(joint)) / 1e-4;
        assert!((chord - 1.0).abs() < 2e-3, "chord slope {chord}");
        // the ramp below
        assert!((profile.eval(0.0) - 0.5).abs() < 1e-12);
        assert_eq!(analysis.kink_points, vec![-0.5]);
    }

    #[test]
    fn case2_small_v_plus_uses_z_plus() {
        // α=0.2: v₊ = 0.45 < 1/2
        let analysis = analyze(&fb(0.2)).unwrap();
        let v_plus = analysis.v_plus.unwrap();
        assert!((v_plus - 0.45).abs() < 1e-9);
        let z_plus = analysis.z_plus.unwrap();
        assert!(z_plus < 0.0);
        let profile = analysis.limit_profile.unwrap();
        // V_I(z₊) = v₊ and the linear piece attaches 0 at z₊ - v₊
        assert!((profile.eval(z_plus) - v_plus).abs() < 1e-7);
        assert_eq!(profile.eval(z_plus - v_plus - 1e-9), 0.0);
        assert!((profile.eval(0.0) - 0.5).abs() < 1e-7);
        assert_eq!(analysis.kink_points, vec![z_plus - v_plus]);
        // continuity at both joints
        assert!((profile.eval(z_plus - 1e-9) - profile.eval(z_plus + 1e-9)).abs() < 1e-7);
    }

    #[test]
    fn segment_values_are_continuous_at_joints() {
        for &alpha in &[1.0, 0.05, 0.2, -0.5] {
            let analysis = analyze(&fb(alpha)).unwrap();
            let profile = analysis.limit_profile.unwrap();
            for w in profile.segments.windows(2) {
                let z = w[0].span().1;
                if !z.is_finite() {
                    continue;
                }
                let a = w[0].eval(z);
                let b = w[1].eval(z);
                assert!((a - b).abs() < 1e-7, "alpha={alpha}: joint at {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn linear_piece_identity_case3() {
        let m = fb(-0.5);
        let settings = SpeedSettings::default();
        // (0, 1): reduces to c̄ = F(1) - h(1) = 2/3
        let r = check_linear_piece_identity(&m, &[2e-3, 1e-3, 5e-4], 0.0, 1.0, &settings, 1e-3)
            .unwrap();
        assert!((r.identity_rhs - 2.0 / 3.0).abs() < 1e-9, "{r:?}");
        assert!(r.pass, "{r:?}");

        // interior interval: ȳ(v) = c̄v + h(v) - F(v) substituted
        let r2 =
            check_linear_piece_identity(&m, &[2e-3, 1e-3, 5e-4], 0.25, 0.75, &settings, 1e-3)
                .unwrap();
        assert!(r2.pass, "{r2:?}");
        let c_bar = 2.0 / 3.0;
        for (v, y_bar) in [(0.25, r2.y_bar_v0), (0.75, r2.y_bar_v1)] {
            let exact = c_bar * v + m.h(v) - m.big_f(v);
            assert!((y_bar - exact).abs() < 2e-3, "ȳ({v}) = {y_bar}, exact {exact}");
        }

        // degenerate interval is rejected
        assert!(matches!(
            check_linear_piece_identity(&m, &[2e-3, 1e-3, 5e-4], 0.5, 0.5, &settings, 1e-3),
            Err(LimitsError::BadInterval { .. })
        ));
        // wrong regime is rejected
        assert!(matches!(
            check_linear_piece_identity(&fb(0.05), &[2e-3, 1e-3, 5e-4], 0.0, 1.0, &settings, 1e-3),
            Err(LimitsError::WrongRegime { .. })
        ));
    }

    #[test]
    fn case2_y_converges_to_limit_flux_on_compacts() {
        // on compact subsets of (0, v₊): y_ε → c̄v + h(v) - F(v)
        let m = fb(0.05);
        let v_plus = find_v_plus(&m).unwrap();
        let c_bar = limit_speed(&m).unwrap().c_bar;
        let settings = crate::speed::SpeedSettings::default();
        let mut sups = Vec::new();
        for eps in [2e-3, 1e-3, 5e-4] {
            let r = crate::speed::critical_speed(&m, eps, 1e-6, &settings).unwrap();
            let problem = crate::reduction::FrontProblem::new(&m, eps, r.bracket.1).unwrap();
            let traj = crate::reduction::integrate_backward(
                &problem,
                settings.reduction.v_min,
                &settings.reduction,
            )
            .unwrap();
            let mut worst = 0.0f64;
            for i in 0..=200 {
                let v = 0.1 + (v_plus - 0.2) * i as f64 / 200.0;
                let y_bar = c_bar * v + m.h(v) - m.big_f(v);
                worst = worst.max((traj.y_at(v) - y_bar).abs());
            }
            sups.push(worst);
        }
        assert!(
            sups.windows(2).all(|w| w[0] > w[1]),
            "sup|y_ε - ȳ| not decreasing: {sups:?}"
        );
        assert!(sups[2] < 0.5 * sups[0], "no substantial decay: {sups:?}");
    }

    #[test]
    fn profile_csv_has_tags() {
        let analysis = analyze(&fb(0.05)).unwrap();
        let profile = analysis.limit_profile.unwrap();
        let csv = profile.to_csv(-1.0, 1.0, 41);
        assert!(csv.starts_with("z,v,segment_tag\n"));
        assert!(csv.contains("const0") && csv.contains("linear") && csv.contains("inviscid"));
    }
}
