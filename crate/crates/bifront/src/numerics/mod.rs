//! Shared numerical kernels: adaptive quadrature, bracketing root finders,
//! monotone interpolation. All routines are deterministic and allocation-light.

pub mod interp;
pub mod quad;
pub mod rootfind;
