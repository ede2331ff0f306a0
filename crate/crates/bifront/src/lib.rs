//! Traveling-front solver for 1-D reaction-convection equations with a
//! relativistic (Born-Infeld) diffusion term
//!
//! ```text
//! u_t = ε (u_x / √(1 - u_x²))_x - (h(u))_x + f(u)
//! ```
//!
//! The crate computes monotone front profiles `v(x + ct)` connecting the
//! equilibria 0 and 1, the critical wave speed `c*_ε` (smallest admissible
//! speed), and the vanishing-diffusion behavior for ε → 0⁺: the limit speed,
//! the regime of the limit profile (fully regular, sharp on one side, or
//! fully piecewise linear), and the piecewise limit profile itself.
//!
//! Pipeline:
//!
//! * [`model`] — reaction/convection families, assumption validation, the
//!   regime function `S(v) = (F(v) - h(v))/v`;
//! * [`reduction`] — the singular first-order two-point problem for
//!   `y(v) = ε(1/√(1-v'²) - 1)`, integrated backward from the degenerate
//!   endpoint `y(1) = 0` with a series start and admissibility verdicts;
//! * [`speed`] — certified speed bounds and bisection for `c*_ε`;
//! * [`profile`] — reconstruction of the front profile `v(z)` from an
//!   admissible trajectory, with the normalization `v(0) = 1/2`;
//! * [`limits`] — ε → 0 analysis: regime classification, limit speed,
//!   inviscid and piecewise-linear limit profiles, sharpness diagnostics;
//! * [`oracle`] — independent verification paths (phase-plane shooting,
//!   pure-convection closed forms, brute-force scans) and the machine-checked
//!   certification records consumed by the test suite;
//! * [`cli`] — the command-line surface (`critical-speed`, `classify`,
//!   `sweep`, `figures`, `verify`).

pub mod cli;
pub mod limits;
pub mod model;
pub mod numerics;
pub mod ode;
pub mod oracle;
pub mod profile;
pub mod reduction;
pub mod speed;

pub use limits::{LimitAnalysis, PiecewiseProfile, Regime, RegimeReport};
pub use model::{ConvectionSpec, ModelSpec, ReactionSpec, ValidationReport};
pub use profile::FrontProfile;
pub use reduction::{FrontProblem, Verdict, YTrajectory};
pub use speed::{CriticalSpeedResult, SpeedBounds};
