//! Special function kernels with guaranteed accuracy windows.
//!
//! The seeding and verification layers lean on these hard: a connection
//! formula confronted at 1e-3 tolerance is meaningless if the Airy seed
//! carries 1e-6 error. Series summation runs in double-double arithmetic
//! so the worst-case cancellation still leaves comfortably more than f64
//! precision in the result.
//!
//! Guaranteed relative accuracy (absolute near zeros of the function):
//! Airy 1e-12 for |x| <= 30, Bessel 1e-10 for 0 < x <= 100 and order in
//! [-1, 1], complex log-gamma 1e-10 for |z| <= 50 away from the poles.

mod airy;
mod bessel;
mod gamma;

pub use airy::{airy, AiryPair};
pub use bessel::{bessel_j, bessel_k_scaled, bessel_mod, bessel_y0, ModBesselPair};
pub use gamma::log_gamma;
