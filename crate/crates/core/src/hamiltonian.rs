//! Hamiltonian structure of the second equation.
//!
//! H(z; q, p) = p^2/2 - (q^2 + z/2) p - (alpha + 1/2) q couples three
//! objects: q solves the second equation with parameter alpha, the
//! conjugate momentum p solves the 34th equation with the same alpha,
//! and sigma = H evaluated along a solution solves the second sigma
//! equation with beta = alpha + 1/2. The converters below move between
//! the three pictures without integrating anything.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Phase-space point of the coupled system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamState {
    pub z: f64,
    pub q: f64,
    pub p: f64,
}

/// Hamiltonian value at a phase-space point.
pub fn h2_value(z: f64, q: f64, p: f64, alpha: f64) -> f64 {
    0.5 * p * p - (q * q + 0.5 * z) * p - (alpha + 0.5) * q
}

/// Hamilton equations: (dq/dz, dp/dz).
pub fn h2_rhs(z: f64, q: f64, p: f64, alpha: f64) -> (f64, f64) {
    (p - q * q - 0.5 * z, 2.0 * q * p + alpha + 0.5)
}

/// Momentum from the q-side jet: p = q' + q^2 + z/2.
pub fn p_from_q(z: f64, q: f64, dq: f64) -> f64 {
    dq + q * q + 0.5 * z
}

/// Coordinate from the p-side jet: q = (p' - alpha - 1/2) / (2p).
pub fn q_from_p(p: f64, dp: f64, alpha: f64) -> Result<f64> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::singular("q_from_p: p vanishes".to_string()));
    }
    Ok((dp - alpha - 0.5) / (2.0 * p))
}

/// Phase-space point from the sigma-side 2-jet.
///
/// sigma' = -p/2 and sigma'' = -(2qp + alpha + 1/2)/2 invert to
/// p = -2 sigma', q = (4 sigma'' + 2 alpha + 1) / (8 sigma').
pub fn qp_from_sigma(ds: f64, d2s: f64, alpha: f64) -> Result<(f64, f64)> {
    if ds == 0.0 || !ds.is_finite() {
        return Err(Error::singular("qp_from_sigma: sigma' vanishes".to_string()));
    }
    let p = -2.0 * ds;
    let q = (4.0 * d2s + 2.0 * alpha + 1.0) / (8.0 * ds);
    Ok((q, p))
}

/// Parameter of the sigma equation satisfied by H along solutions.
pub fn beta_sii(alpha: f64) -> f64 {
    alpha + 0.5
}
