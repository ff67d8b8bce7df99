use crate::error::{Error, Result};
use num_complex::Complex64;

const LN_SQRT_2PI: f64 = 0.9189385332046728;
const LN_PI: f64 = 1.1447298858494002;

// B_{2n} / (2n (2n-1)) for the Stirling tail, n = 1..11
const STIRLING: [f64; 11] = [
    8.333333333333333e-2,          // 1/12
    -2.777777777777778e-3,         // -1/360
    7.936507936507937e-4,          // 1/1260
    -5.952380952380952e-4,         // -1/1680
    8.417508417508418e-4,          // 1/1188
    -1.9175269175269175e-3,        // -691/360360
    6.41025641025641e-3,           // 1/156
    -2.955065359477124e-2,         // -3617/122400
    1.7964437236883057e-1,         // 43867/244188
    -1.3924322169059011,           // -174611/125400
    1.3402864044168392e1,          // 77683/5796
];

/// Principal branch of log Gamma on the complex plane, |z| <= 50.
///
/// Continuous on the plane cut along the negative real axis, real-valued
/// for positive real z, and satisfying log_gamma(z+1) = log_gamma(z) + ln z
/// with principal logs for Re z > 0. Fails with `Singular` at the poles
/// z = 0, -1, -2, ... and with `Domain` outside |z| <= 50.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain("log_gamma: argument must be finite"));
    }
    if z.norm() > 50.0 {
        return Err(Error::domain(format!(
            "log_gamma: |z| = {} exceeds guaranteed window 50",
            z.norm()
        )));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::singular(format!("log_gamma: pole at z = {}", z.re)));
    }
    if z.re >= 0.5 {
        Ok(lg_right(z))
    } else {
        // reflection; the log of sin stays on the branch that keeps the
        // result continuous off the negative real axis
        let ls = log_sin_pi(z);
        let lg1mz = lg_right_or_reflect(Complex64::new(1.0, 0.0) - z);
        Ok(Complex64::new(LN_PI, 0.0) - ls - lg1mz)
    }
}

fn lg_right_or_reflect(z: Complex64) -> Complex64 {
    // 1 - z has Re >= 0.5 whenever the caller reflected from Re < 0.5
    debug_assert!(z.re >= 0.5);
    lg_right(z)
}

// Stirling with upward recurrence to push |z| >= 10; valid for Re z >= 0.5.
fn lg_right(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut zz = z;
    while zz.norm() < 10.0 {
        shift += zz.ln();
        zz += 1.0;
    }
    let inv = 1.0 / zz;
    let inv2 = inv * inv;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        tail += p * c;
        p *= inv2;
    }
    (zz - 0.5) * zz.ln() - zz + LN_SQRT_2PI + tail - shift
}

// log sin(pi z) on the branch matching the principal log Gamma under
// reflection: for Im z >= 0,
//   log sin(pi z) = ln(1/2) + i pi/2 - i pi z + Log(1 - e^{2 pi i z}),
// and the conjugate formula below the axis. The last log is principal and
// its argument stays inside the unit disk centred at 1, so no winding.
fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        let e = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp();
        Complex64::new(-std::f64::consts::LN_2, std::f64::consts::FRAC_PI_2)
            + Complex64::new(0.0, -std::f64::consts::PI) * z
            + (Complex64::new(1.0, 0.0) - e).ln()
    } else {
        log_sin_pi(z.conj()).conj()
    }
}
