//! Front-profile reconstruction.
//!
//! An admissible trajectory y(v) determines the front through
//!
//! ```text
//! z(v) = ∫_{1/2}^{v} (ε + y(s)) / √(y(s)(2ε + y(s))) ds,
//! v'(z) = √(y(2ε+y))/(ε+y) ∈ (0, 1),
//! ```
//!
//! normalized so that v(0) = 1/2. The integrand has simple-pole-like growth
//! at both ends of the window (y vanishes quadratically there), which the
//! adaptive quadrature resolves on the short end intervals; the window stays
//! strictly inside (0, 1) so every value is finite.
//!
//! The output grid is uniform in v (2001 points by default): z barely
//! advances through the sharp region, so uniform-in-v is what resolves it.

use serde::Serialize;
use thiserror::Error;

use crate::model::ModelSpec;
use crate::numerics::quad;
use crate::reduction::{FrontProblem, Verdict, YTrajectory};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("trajectory verdict is {0:?}; reconstruction needs an admissible trajectory")]
    NotAdmissible(Verdict),
    #[error("v window ({lo}, {hi}) invalid: must satisfy lo < 1/2 < hi inside the trajectory range ({tr_lo}, {tr_hi})")]
    BadWindow { lo: f64, hi: f64, tr_lo: f64, tr_hi: f64 },
    #[error("trajectory corrupted: y({v}) = {y:e} not positive inside the window")]
    CorruptedTrajectory { v: f64, y: f64 },
    #[error("gradient constraint violated: v'({z}) = {dv} ≥ 1")]
    GradientConstraint { z: f64, dv: f64 },
    #[error("profile too coarse: {0} interior points, need at least 400")]
    TooCoarse(usize),
}

/// Reconstructed traveling front on an increasing z grid.
#[derive(Debug, Clone)]
pub struct FrontProfile {
    pub z_grid: Vec<f64>,
    pub v_values: Vec<f64>,
    pub dv_values: Vec<f64>,
    pub epsilon: f64,
    pub speed_c: f64,
}

pub const DEFAULT_WINDOW: (f64, f64) = (1e-4, 1.0 - 1e-4);
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Rebuild v(z) from an admissible trajectory.
///
/// The grid is uniform in v over the window with the node nearest 1/2
/// replaced by exactly 1/2, where z = 0 is anchored.
pub fn reconstruct(
    trajectory: &YTrajectory,
    problem: &FrontProblem,
    v_window: (f64, f64),
    n_points: usize,
) -> Result<FrontProfile, ProfileError> {
    if !trajectory.verdict.is_admissible() {
        return Err(ProfileError::NotAdmissible(trajectory.verdict));
    }
    let (v_lo, v_hi) = v_window;
    let tr_lo = trajectory.v_min_reached;
    let tr_hi = trajectory.v_grid[0];
    if !(tr_lo <= v_lo && v_lo < 0.5 && 0.5 < v_hi && v_hi <= tr_hi) {
        return Err(ProfileError::BadWindow { lo: v_lo, hi: v_hi, tr_lo, tr_hi });
    }
    let n = n_points.max(5);

    let mut v_values: Vec<f64> = (0..n)
        .map(|i| v_lo + (v_hi - v_lo) * i as f64 / (n - 1) as f64)
        .collect();
    // pin the anchor node
    let mid = v_values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 0.5).abs().partial_cmp(&(b.1 - 0.5).abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    v_values[mid] = 0.5;

    let eps = problem.epsilon;
    let y_of = |s: f64| trajectory.y_at(s);
    for &v in &v_values {
        let y = y_of(v);
        if y.is_nan() || y <= 0.0 {
            return Err(ProfileError::CorruptedTrajectory { v, y });
        }
    }
    let integrand = |s: f64| {
        let y = y_of(s).max(1e-300);
        (eps + y) / (y * (2.0 * eps + y)).sqrt()
    };

    let mut z_grid = vec![0.0; n];
    for i in mid + 1..n {
        let dz = quad::integrate(integrand, v_values[i - 1], v_values[i], 1e-13, 1e-10);
        z_grid[i] = z_grid[i - 1] + dz;
    }
    for i in (0..mid).rev() {
        let dz = quad::integrate(integrand, v_values[i], v_values[i + 1], 1e-13, 1e-10);
        z_grid[i] = z_grid[i + 1] - dz;
    }

    let dv_values: Vec<f64> = v_values.iter().map(|&v| problem.slope_factor(y_of(v))).collect();

    Ok(FrontProfile { z_grid, v_values, dv_values, epsilon: eps, speed_c: problem.speed_c })
}

impl FrontProfile {
    pub fn z_range(&self) -> (f64, f64) {
        (self.z_grid[0], *self.z_grid.last().unwrap())
    }

    pub fn max_dv(&self) -> f64 {
        self.dv_values.iter().copied().fold(0.0, f64::max)
    }

    /// Linear interpolation of v at z (the grid is dense); clamped at the
    /// window edges.
    pub fn v_at_z(&self, z: f64) -> f64 {
        let n = self.z_grid.len();
        if z <= self.z_grid[0] {
            return self.v_values[0];
        }
        if z >= self.z_grid[n - 1] {
            return self.v_values[n - 1];
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let m = (lo + hi) / 2;
            if self.z_grid[m] <= z {
                lo = m;
            } else {
                hi = m;
            }
        }
        let t = (z - self.z_grid[lo]) / (self.z_grid[hi] - self.z_grid[lo]);
        self.v_values[lo] + t * (self.v_values[hi] - self.v_values[lo])
    }

    /// CSV with header `z,v,dv`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.z_grid.len() * 48 + 8);
        out.push_str("z,v,dv\n");
        for i in 0..self.z_grid.len() {
            out.push_str(&format!(
                "{:.11e},{:.11e},{:.11e}\n",
                self.z_grid[i], self.v_values[i], self.dv_values[i]
            ));
        }
        out
    }

    /// JSON metadata record.
    pub fn metadata_json(&self, model: &ModelSpec, residual: Option<f64>) -> String {
        #[derive(Serialize)]
        struct Meta {
            epsilon: f64,
            speed_c: f64,
            model_digest: String,
            points: usize,
            z_min: f64,
            z_max: f64,
            max_dv: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            residual: Option<f64>,
        }
        let (z_min, z_max) = self.z_range();
        serde_json::to_string(&Meta {
            epsilon: self.epsilon,
            speed_c: self.speed_c,
            model_digest: model.digest(),
            points: self.z_grid.len(),
            z_min,
            z_max,
            max_dv: self.max_dv(),
            residual,
        })
        .expect("metadata serialization cannot fail")
    }
}

/// Maximum absolute residual of the second-order traveling-wave equation
///
/// ```text
/// ε (v'/√(1-v'²))' - (c + h'(v)) v' + f(v) = 0
/// ```
///
/// evaluated by three-point (quadratic-fit) differences of `ε·v'/√(1-v'²)`
/// on the nonuniform z grid, over the middle 80% of the z range.
pub fn residual_second_order(
    profile: &FrontProfile,
    model: &ModelSpec,
) -> Result<f64, ProfileError> {
    let n = profile.z_grid.len();
    if n < 402 {
        return Err(ProfileError::TooCoarse(n.saturating_sub(2)));
    }
    for i in 0..n {
        if profile.dv_values[i] >= 1.0 {
            return Err(ProfileError::GradientConstraint {
                z: profile.z_grid[i],
                dv: profile.dv_values[i],
            });
        }
    }
    let u: Vec<f64> = profile
        .dv_values
        .iter()
        .map(|&dv| profile.epsilon * dv / (1.0 - dv * dv).sqrt())
        .collect();

    let (z0, z1) = profile.z_range();
    let span = z1 - z0;
    let (lo, hi) = (z0 + 0.1 * span, z1 - 0.1 * span);

    let mut max_res = 0.0f64;
    for i in 1..n - 1 {
        let z = profile.z_grid[i];
        if z < lo || z > hi {
            continue;
        }
        let (za, zb, zc) = (profile.z_grid[i - 1], z, profile.z_grid[i + 1]);
        let du = u[i - 1] * (zb - zc) / ((za - zb) * (za - zc))
            + u[i] * (2.0 * zb - za - zc) / ((zb - za) * (zb - zc))
            + u[i + 1] * (zb - za) / ((zc - za) * (zc - zb));
        let v = profile.v_values[i];
        let res = du - (profile.speed_c + model.h_prime(v)) * profile.dv_values[i] + model.f(v);
        max_res = max_res.max(res.abs());
    }
    Ok(max_res)
}
