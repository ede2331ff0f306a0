//! Model definition: monostable reaction `f`, convection `h`, their
//! derivatives and antiderivative `F(v) = ∫₀ᵛ f`, the regime function
//! `S(v) = (F(v) - h(v))/v`, and validation of the standing assumptions
//!
//!   (F)  f(0) = f(1) = 0, f > 0 on (0,1), and f(s) ≤ k·s, f(s) ≤ k·(1-s)
//!        for some k > 0;
//!   (H)  h ∈ C²(\[0,1\]) with h(0) = h'(0) = 0.
//!
//! Builtin families evaluate through closed forms; tabulated input is
//! interpolated with monotone cubics and integrated exactly per segment.
//! The `zero` reaction family is the validation-exempt pure-convection test
//! mode used by the solver test suites.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::interp::Pchip;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("argument v = {v} outside the domain [0, 1]")]
    Domain { v: f64 },
    #[error("malformed tabulated model: {reason}")]
    MalformedTabulated { reason: String },
    #[error("invalid model parameter: {what}")]
    InvalidParameter { what: String },
    #[error("model JSON rejected: {0}")]
    Json(#[from] serde_json::Error),
}

/// Reaction term description (the serialized, user-facing form).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ReactionSpec {
    /// f(s) = k·s·(1-s)
    Logistic { k: f64 },
    /// f(s) = k·s^p·(1-s)
    PowerLogistic { p: f64, k: f64 },
    /// samples of (s, f(s)); at least 16, spanning [0, 1]
    Tabulated { samples: Vec<[f64; 2]> },
    /// f ≡ 0 — pure-convection test mode, exempt from assumption (F)
    Zero,
}

/// Convection term description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ConvectionSpec {
    Zero,
    /// h(s) = alpha·s²
    Quadratic { alpha: f64 },
    /// h(s) = coef·s^q with q > 1
    Power { q: f64, coef: f64 },
    /// samples of (s, h, h', h''); at least 16, spanning [0, 1]
    Tabulated { samples: Vec<[f64; 4]> },
}

/// Prepared reaction evaluator.
#[derive(Debug, Clone)]
enum ReactionKernel {
    Logistic { k: f64 },
    PowerLogistic { p: f64, k: f64 },
    Tabulated { f: Pchip },
    Zero,
}

/// Prepared convection evaluator.
#[derive(Debug, Clone)]
enum ConvectionKernel {
    Zero,
    Quadratic { alpha: f64 },
    Power { q: f64, coef: f64 },
    Tabulated { h: Box<Pchip>, hp: Box<Pchip>, hpp: Box<Pchip> },
}

/// The pair (f, h) with everything the solver needs precomputed.
///
/// Immutable after construction; all evaluation methods are pure, so shared
/// references may be used concurrently.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub reaction: ReactionSpec,
    pub convection: ConvectionSpec,
    /// Lipschitz-type constant of assumption (F)
    pub lipschitz_k: f64,
    /// grid resolution used by validation and regime classification
    pub quadrature_grid_size: usize,
    r: ReactionKernel,
    c: ConvectionKernel,
}

/// Serialized document: `{"f": {...}, "h": {...}}` plus optional overrides.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelJson {
    pub f: ReactionSpec,
    pub h: ConvectionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_grid_size: Option<usize>,
}

pub const DEFAULT_GRID_SIZE: usize = 4096;
const MIN_TABULATED_SAMPLES: usize = 16;

impl ModelSpec {
    pub fn new(reaction: ReactionSpec, convection: ConvectionSpec) -> Result<Self, ModelError> {
        let r = Self::build_reaction(&reaction)?;
        let c = Self::build_convection(&convection)?;
        let mut model = ModelSpec {
            reaction,
            convection,
            lipschitz_k: 0.0,
            quadrature_grid_size: DEFAULT_GRID_SIZE,
            r,
            c,
        };
        model.lipschitz_k = model.default_lipschitz();
        Ok(model)
    }

    /// f(s) = k·s(1-s), h(s) = α·s²  — the worked example family.
    pub fn fisher_burgers(k: f64, alpha: f64) -> Self {
        Self::new(ReactionSpec::Logistic { k }, ConvectionSpec::Quadratic { alpha })
            .expect("builtin families cannot be malformed")
    }

    pub fn with_lipschitz(mut self, k: f64) -> Self {
        self.lipschitz_k = k;
        self
    }

    pub fn with_grid_size(mut self, n: usize) -> Self {
        self.quadrature_grid_size = n.max(16);
        self
    }

    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let doc: ModelJson = serde_json::from_str(s)?;
        let mut model = Self::new(doc.f, doc.h)?;
        if let Some(k) = doc.lipschitz_k {
            if !k.is_finite() || k <= 0.0 {
                return Err(ModelError::InvalidParameter {
                    what: format!("lipschitz_k must be a positive finite real, got {k}"),
                });
            }
            model.lipschitz_k = k;
        }
        if let Some(n) = doc.quadrature_grid_size {
            if n < 16 {
                return Err(ModelError::InvalidParameter {
                    what: format!("quadrature_grid_size must be at least 16, got {n}"),
                });
            }
            model.quadrature_grid_size = n;
        }
        Ok(model)
    }

    pub fn to_json_string(&self) -> String {
        let doc = ModelJson {
            f: self.reaction.clone(),
            h: self.convection.clone(),
            lipschitz_k: Some(self.lipschitz_k),
            quadrature_grid_size: Some(self.quadrature_grid_size),
        };
        serde_json::to_string(&doc).expect("model serialization cannot fail")
    }

    /// FNV-1a hash of the canonical JSON form, for tagging result records.
    pub fn digest(&self) -> String {
        let canonical = self.to_json_string();
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{hash:016x}")
    }

    fn build_reaction(spec: &ReactionSpec) -> Result<ReactionKernel, ModelError> {
        Ok(match spec {
            ReactionSpec::Logistic { k } => {
                require_positive(*k, "logistic k")?;
                ReactionKernel::Logistic { k: *k }
            }
            ReactionSpec::PowerLogistic { p, k } => {
                require_positive(*k, "power_logistic k")?;
                require_positive(*p, "power_logistic p")?;
                ReactionKernel::PowerLogistic { p: *p, k: *k }
            }
            ReactionSpec::Tabulated { samples } => {
                let (xs, ys) = split_samples_2(samples, "reaction")?;
                ReactionKernel::Tabulated { f: Pchip::new(xs, ys) }
            }
            ReactionSpec::Zero => ReactionKernel::Zero,
        })
    }

    fn build_convection(spec: &ConvectionSpec) -> Result<ConvectionKernel, ModelError> {
        Ok(match spec {
            ConvectionSpec::Zero => ConvectionKernel::Zero,
            ConvectionSpec::Quadratic { alpha } => {
                require_finite(*alpha, "quadratic alpha")?;
                ConvectionKernel::Quadratic { alpha: *alpha }
            }
            ConvectionSpec::Power { q, coef } => {
                require_finite(*coef, "power coef")?;
                if q.is_nan() || *q <= 1.0 {
                    return Err(ModelError::InvalidParameter {
                        what: format!("power convection requires q > 1, got {q}"),
                    });
                }
                ConvectionKernel::Power { q: *q, coef: *coef }
            }
            ConvectionSpec::Tabulated { samples } => {
                let (xs, h, hp, hpp) = split_samples_4(samples)?;
                ConvectionKernel::Tabulated {
                    h: Box::new(Pchip::new(xs.clone(), h)),
                    hp: Box::new(Pchip::new(xs.clone(), hp)),
                    hpp: Box::new(Pchip::new(xs, hpp)),
                }
            }
        })
    }

    fn default_lipschitz(&self) -> f64 {
        match &self.r {
            ReactionKernel::Logistic { k } => *k,
            ReactionKernel::Zero => 1.0,
            // only the existence of some k matters; take the grid supremum of
            // f(s)/min(s, 1-s)
            _ => {
                let n = 4096;
                let mut k = 0.0f64;
                for i in 1..n {
                    let s = i as f64 / n as f64;
                    let denom = s.min(1.0 - s);
                    k = k.max(self.f(s) / denom);
                }
                if k > 0.0 {
                    k
                } else {
                    1.0
                }
            }
        }
    }

    // ---- raw evaluators (callers guarantee v ∈ [0, 1]) ----

    pub fn f(&self, v: f64) -> f64 {
        match &self.r {
            ReactionKernel::Logistic { k } => k * v * (1.0 - v),
            ReactionKernel::PowerLogistic { p, k } => k * v.powf(*p) * (1.0 - v),
            ReactionKernel::Tabulated { f } => f.eval(v),
            ReactionKernel::Zero => 0.0,
        }
    }

    pub fn f_prime(&self, v: f64) -> f64 {
        match &self.r {
            ReactionKernel::Logistic { k } => k * (1.0 - 2.0 * v),
            ReactionKernel::PowerLogistic { p, k } => {
                k * (p * v.powf(p - 1.0) - (p + 1.0) * v.powf(*p))
            }
            ReactionKernel::Tabulated { f } => f.eval_deriv(v),
            ReactionKernel::Zero => 0.0,
        }
    }

    /// F(v) = ∫₀ᵛ f(s) ds
    pub fn big_f(&self, v: f64) -> f64 {
        match &self.r {
            ReactionKernel::Logistic { k } => k * (0.5 * v * v - v * v * v / 3.0),
            ReactionKernel::PowerLogistic { p, k } => {
                k * (v.powf(p + 1.0) / (p + 1.0) - v.powf(p + 2.0) / (p + 2.0))
            }
            ReactionKernel::Tabulated { f } => f.integral_from_start(v),
            ReactionKernel::Zero => 0.0,
        }
    }

    pub fn h(&self, v: f64) -> f64 {
        match &self.c {
            ConvectionKernel::Zero => 0.0,
            ConvectionKernel::Quadratic { alpha } => alpha * v * v,
            ConvectionKernel::Power { q, coef } => coef * v.powf(*q),
            ConvectionKernel::Tabulated { h, .. } => h.eval(v),
        }
    }

    pub fn h_prime(&self, v: f64) -> f64 {
        match &self.c {
            ConvectionKernel::Zero => 0.0,
            ConvectionKernel::Quadratic { alpha } => 2.0 * alpha * v,
            ConvectionKernel::Power { q, coef } => coef * q * v.powf(q - 1.0),
            ConvectionKernel::Tabulated { hp, .. } => hp.eval(v),
        }
    }

    pub fn h_second(&self, v: f64) -> f64 {
        match &self.c {
            ConvectionKernel::Zero => 0.0,
            ConvectionKernel::Quadratic { alpha } => 2.0 * alpha,
            ConvectionKernel::Power { q, coef } => coef * q * (q - 1.0) * v.powf(q - 2.0),
            ConvectionKernel::Tabulated { hpp, .. } => hpp.eval(v),
        }
    }

    /// Limit slope of f at 1, i.e. m = -f'(1) for differentiable families,
    /// a secant estimate for tabulated data. Nonnegative for valid models.
    pub fn f_limit_slope_at_one(&self) -> f64 {
        match &self.r {
            ReactionKernel::Tabulated { f } => {
                let delta = 1e-6;
                f.eval(1.0 - delta) / delta
            }
            _ => -self.f_prime(1.0),
        }
    }

    pub fn is_pure_convection(&self) -> bool {
        matches!(self.r, ReactionKernel::Zero)
    }

    // ---- checked operations ----

    /// Pointwise evaluation record.
    pub fn evaluate(&self, v: f64) -> Result<Evaluation, ModelError> {
        check_domain(v)?;
        let f = self.f(v);
        // boundary values are pinned by assumption (F); interpolation noise
        // on tabulated input is clipped here
        let f_clamped = if v == 0.0 || v == 1.0 { 0.0 } else { f.max(0.0) };
        Ok(Evaluation {
            f,
            f_at_bounds_clamped: f_clamped,
            h: self.h(v),
            h_prime: self.h_prime(v),
            big_f: self.big_f(v),
        })
    }

    /// S(v) = (F(v) - h(v))/v, extended by continuity with S(0) = 0.
    pub fn evaluate_s(&self, v: f64) -> Result<f64, ModelError> {
        check_domain(v)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok((self.big_f(v) - self.h(v)) / v)
    }

    /// S'(v) = (f(v) - h'(v) - S(v))/v on (0, 1].
    pub fn evaluate_s_prime(&self, v: f64) -> Result<f64, ModelError> {
        check_domain(v)?;
        if v == 0.0 {
            return Err(ModelError::Domain { v });
        }
        let s = (self.big_f(v) - self.h(v)) / v;
        Ok((self.f(v) - self.h_prime(v) - s) / v)
    }

    /// Check assumptions (F) and (H) on a grid of `quadrature_grid_size`
    /// points. An empty report means the model is accepted.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.quadrature_grid_size;
        let tol = match (&self.r, &self.c) {
            (ReactionKernel::Tabulated { .. }, _) | (_, ConvectionKernel::Tabulated { .. }) => 1e-9,
            _ => 1e-12,
        };

        if !self.is_pure_convection() {
            let f0 = self.f(0.0);
            if f0.abs() > tol {
                violations.push(Violation::f(0.0, format!("f(0) = {f0:e}, expected 0")));
            }
            let f1 = self.f(1.0);
            if f1.abs() > tol {
                violations.push(Violation::f(1.0, format!("f(1) = {f1:e}, expected 0")));
            }
            let k = self.lipschitz_k;
            if !k.is_finite() || k <= 0.0 {
                violations.push(Violation::f(0.0, format!("lipschitz_k = {k}, expected > 0")));
            }
            for i in 1..n {
                let s = i as f64 / n as f64;
                let fv = self.f(s);
                if fv <= 0.0 {
                    violations.push(Violation::f(s, format!("f({s}) = {fv:e} not positive")));
                    break;
                }
                let cap = k * s.min(1.0 - s);
                if fv > cap * (1.0 + 1e-9) + tol {
                    violations.push(Violation::f(
                        s,
                        format!("f({s}) = {fv:e} exceeds k·min(s,1-s) = {cap:e}"),
                    ));
                    break;
                }
            }
        }

        let h0 = self.h(0.0);
        if h0.abs() > tol {
            violations.push(Violation::h(0.0, format!("h(0) = {h0:e}, expected 0")));
        }
        let hp0 = self.h_prime(0.0);
        if hp0.abs() > tol {
            violations.push(Violation::h(0.0, format!("h'(0) = {hp0:e}, expected 0")));
        }
        for i in 1..n {
            let s = i as f64 / n as f64;
            let (h, hp, hpp) = (self.h(s), self.h_prime(s), self.h_second(s));
            if !h.is_finite() || !hp.is_finite() || !hpp.is_finite() {
                violations.push(Violation::h(s, format!("h not C² at {s} (non-finite value)")));
                break;
            }
        }

        ValidationReport { violations }
    }
}

/// Pointwise values returned by [`ModelSpec::evaluate`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Evaluation {
    pub f: f64,
    /// f with the boundary conditions f(0)=f(1)=0 enforced exactly and
    /// negative interpolation noise removed
    pub f_at_bounds_clamped: f64,
    pub h: f64,
    pub h_prime: f64,
    /// F(v) = ∫₀ᵛ f
    pub big_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Assumption {
    F,
    H,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub assumption: Assumption,
    pub witness_v: f64,
    pub detail: String,
}

impl Violation {
    fn f(witness_v: f64, detail: String) -> Self {
        Violation { assumption: Assumption::F, witness_v, detail }
    }
    fn h(witness_v: f64, detail: String) -> Self {
        Violation { assumption: Assumption::H, witness_v, detail }
    }
}

/// Outcome of [`ModelSpec::validate`]; empty iff (F) and (H) hold on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(w, "model satisfies (F) and (H)");
        }
        for v in &self.violations {
            writeln!(w, "violated ({:?}) at v = {}: {}", v.assumption, v.witness_v, v.detail)?;
        }
        Ok(())
    }
}

fn check_domain(v: f64) -> Result<(), ModelError> {
    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
        Err(ModelError::Domain { v })
    } else {
        Ok(())
    }
}

fn require_positive(x: f64, what: &str) -> Result<(), ModelError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { what: format!("{what} must be positive, got {x}") })
    }
}

fn require_finite(x: f64, what: &str) -> Result<(), ModelError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { what: format!("{what} must be finite, got {x}") })
    }
}

fn split_samples_2(samples: &[[f64; 2]], what: &str) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
    if samples.len() < MIN_TABULATED_SAMPLES {
        return Err(ModelError::MalformedTabulated {
            reason: format!(
                "{what} table has {} samples, need at least {MIN_TABULATED_SAMPLES}",
                samples.len()
            ),
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s[0]).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s[1]).collect();
    check_knots(&xs, what)?;
    Ok((xs, ys))
}

#[allow(clippy::type_complexity)]
fn split_samples_4(
    samples: &[[f64; 4]],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>), ModelError> {
    if samples.len() < MIN_TABULATED_SAMPLES {
        return Err(ModelError::MalformedTabulated {
            reason: format!(
                "convection table has {} samples, need at least {MIN_TABULATED_SAMPLES}",
                samples.len()
            ),
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s[0]).collect();
    check_knots(&xs, "convection")?;
    Ok((
        xs,
        samples.iter().map(|s| s[1]).collect(),
        samples.iter().map(|s| s[2]).collect(),
        samples.iter().map(|s| s[3]).collect(),
    ))
}

fn check_knots(xs: &[f64], what: &str) -> Result<(), ModelError> {
    if !xs.windows(2).all(|w| w[0] < w[1]) {
        return Err(ModelError::MalformedTabulated {
            reason: format!("{what} sample abscissae must be strictly increasing"),
        });
    }
    if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
        return Err(ModelError::MalformedTabulated {
            reason: format!("{what} samples must span [0, 1] exactly"),
        });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(ModelError::MalformedTabulated {
            reason: format!("{what} samples contain non-finite abscissae"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad;

    fn fb(alpha: f64) -> ModelSpec {
        ModelSpec::fisher_burgers(1.0, alpha)
    }

    #[test]
    fn fisher_burgers_passes_validation() {
        // the full parameter matrix of the worked example
        for &alpha in &[1.0, 0.5, 0.05, -0.05, -1.0 / 6.0, -0.5] {
            let report = fb(alpha).validate();
            assert!(report.is_valid(), "alpha={alpha}: {report}");
        }
    }

    #[test]
    fn figs_3_and_4_models_pass_validation() {
        let fig3 = ModelSpec::new(
            ReactionSpec::Logistic { k: 1.0 },
            ConvectionSpec::Power { q: 1.5, coef: 1.0 },
        )
        .unwrap();
        assert!(fig3.validate().is_valid(), "{}", fig3.validate());

        let fig4 = ModelSpec::new(
            ReactionSpec::PowerLogistic { p: 2.0, k: 1.0 },
            ConvectionSpec::Quadratic { alpha: 1.0 },
        )
        .unwrap();
        assert!(fig4.validate().is_valid(), "{}", fig4.validate());
    }

    #[test]
    fn nonzero_h_prime_at_zero_violates_h() {
        // the power family refuses q ≤ 1, so h(s) = s cannot sneak in there
        let err = ModelSpec::new(
            ReactionSpec::Logistic { k: 1.0 },
            ConvectionSpec::Power { q: 1.0, coef: 1.0 },
        );
        assert!(matches!(err, Err(ModelError::InvalidParameter { .. })));

        // h(s) = s as a table has h'(0) = 1, violating (H)
        let n = 32;
        let samples: Vec<[f64; 4]> = (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                [s, s, 1.0, 0.0]
            })
            .collect();
        let model = ModelSpec::new(
            ReactionSpec::Logistic { k: 1.0 },
            ConvectionSpec::Tabulated { samples },
        )
        .unwrap();
        let report = model.validate();
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.assumption == Assumption::H));
    }

    #[test]
    fn shifted_reaction_violates_f() {
        // f(s) = s(1-s) - 0.3 fails f(0) = 0 and positivity
        let n = 64;
        let samples: Vec<[f64; 2]> = (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                [s, s * (1.0 - s) - 0.3]
            })
            .collect();
        let model =
            ModelSpec::new(ReactionSpec::Tabulated { samples }, ConvectionSpec::Zero).unwrap();
        let report = model.validate();
        assert!(report.violations.iter().any(|v| v.assumption == Assumption::F));
    }

    #[test]
    fn short_table_is_malformed() {
        let samples: Vec<[f64; 2]> = (0..10).map(|i| [i as f64 / 9.0, 0.1]).collect();
        let err = ModelSpec::new(ReactionSpec::Tabulated { samples }, ConvectionSpec::Zero);
        assert!(matches!(err, Err(ModelError::MalformedTabulated { .. })));
    }

    #[test]
    fn evaluate_matches_closed_forms() {
        // Fisher-Burgers k=1, alpha=-0.5 at v=1: f=0, h=-0.5, F=1/6
        let m = fb(-0.5);
        let e = m.evaluate(1.0).unwrap();
        assert!(e.f.abs() < 1e-15);
        assert!((e.h + 0.5).abs() < 1e-15);
        assert!((e.big_f - 1.0 / 6.0).abs() < 1e-15);

        // any model at v=0
        let e0 = m.evaluate(0.0).unwrap();
        assert_eq!(e0.f, 0.0);
        assert_eq!(e0.h, 0.0);
        assert_eq!(e0.big_f, 0.0);

        // f(s) = s²(1-s): F(1) = 1/3 - 1/4 = 1/12
        let m2 = ModelSpec::new(
            ReactionSpec::PowerLogistic { p: 2.0, k: 1.0 },
            ConvectionSpec::Zero,
        )
        .unwrap();
        assert!((m2.big_f(1.0) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_out_of_domain() {
        assert!(matches!(fb(0.0).evaluate(1.5), Err(ModelError::Domain { .. })));
        assert!(matches!(fb(0.0).evaluate(-0.1), Err(ModelError::Domain { .. })));
        assert!(matches!(fb(0.0).evaluate_s_prime(0.0), Err(ModelError::Domain { .. })));
    }

    #[test]
    fn quadrature_oracle_confirms_big_f_on_grid() {
        // closed-form F against adaptive quadrature, 101 points, 1e-10 relative
        for model in [
            fb(-0.5),
            ModelSpec::new(ReactionSpec::PowerLogistic { p: 2.0, k: 1.0 }, ConvectionSpec::Zero)
                .unwrap(),
        ] {
            for i in 1..=100 {
                let v = i as f64 / 100.0;
                let q = quad::integrate(|s| model.f(s), 0.0, v, 1e-14, 1e-13);
                let c = model.big_f(v);
                assert!(
                    (q - c).abs() <= 1e-10 * c.abs().max(1e-3),
                    "v={v}: quad={q:e} closed={c:e}"
                );
            }
        }
    }

    #[test]
    fn s_values_match_closed_form() {
        // S(1) = F(1) - h(1) = 1/6 + 1/2 for alpha = -0.5
        assert!((fb(-0.5).evaluate_s(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        // S(v) = (k/2 - α)v - k v²/3 for Fisher-Burgers
        let m = fb(0.05);
        let v = 0.675;
        assert!((m.evaluate_s(v).unwrap() - 0.151875).abs() < 1e-14);
        // continuity extension at 0
        assert_eq!(m.evaluate_s(0.0).unwrap(), 0.0);
        assert!(m.evaluate_s(1e-9).unwrap().abs() < 1e-8);
    }

    #[test]
    fn s_prime_sign_examples() {
        // v₊ = 3(k/2-α)/(2k) is the unique zero of S'
        let m = fb(0.05);
        assert!(m.evaluate_s_prime(0.675).unwrap().abs() < 1e-12);
        assert!(fb(-0.5).evaluate_s_prime(0.5).unwrap() > 0.0);
        assert!(fb(1.0).evaluate_s_prime(0.5).unwrap() < 0.0);
    }

    #[test]
    fn s_prime_matches_centered_difference() {
        let delta = 1e-6;
        for model in [fb(0.05), fb(-0.5), fb(1.0)] {
            let mut v = 0.01;
            while v <= 0.99 {
                let fd = (model.evaluate_s(v + delta).unwrap()
                    - model.evaluate_s(v - delta).unwrap())
                    / (2.0 * delta);
                let sp = model.evaluate_s_prime(v).unwrap();
                assert!((fd - sp).abs() < 1e-5, "v={v}: fd={fd} sp={sp}");
                v += 0.035;
            }
        }
    }

    #[test]
    fn tabulated_round_trip_close_to_builtin() {
        let n = 256;
        let samples: Vec<[f64; 2]> = (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                [s, s * (1.0 - s)]
            })
            .collect();
        let tab =
            ModelSpec::new(ReactionSpec::Tabulated { samples }, ConvectionSpec::Zero).unwrap();
        let exact = ModelSpec::new(ReactionSpec::Logistic { k: 1.0 }, ConvectionSpec::Zero)
            .unwrap();
        for i in 0..=100 {
            let v = i as f64 / 100.0;
            assert!((tab.f(v) - exact.f(v)).abs() < 1e-6);
            assert!((tab.big_f(v) - exact.big_f(v)).abs() < 1e-6);
        }
        assert!(tab.validate().is_valid());
    }

    #[test]
    fn json_schema_round_trip() {
        let m = fb(-0.5).with_grid_size(1024);
        let s = m.to_json_string();
        let back = ModelSpec::from_json_str(&s).unwrap();
        assert_eq!(back.reaction, m.reaction);
        assert_eq!(back.convection, m.convection);
        assert_eq!(back.quadrature_grid_size, 1024);
        assert_eq!(back.digest(), m.digest());

        let doc = r#"{"f": {"family": "logistic", "k": 1.0},
                      "h": {"family": "quadratic", "alpha": -0.5}}"#;
        let parsed = ModelSpec::from_json_str(doc).unwrap();
        assert!((parsed.h(1.0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn digests_distinguish_models() {
        assert_ne!(fb(-0.5).digest(), fb(0.5).digest());
        assert_eq!(fb(-0.5).digest(), fb(-0.5).digest());
    }
}
