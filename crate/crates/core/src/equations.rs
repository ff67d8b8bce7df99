//! Residual forms, first-order systems, parameter schemas, and the
//! P_III / P_V case split.
//!
//! Every equation in the registry is stored as "second derivative minus
//! right-hand side" (first-degree family) or as the full polynomial
//! combination (second-degree sigma family), so a residual of zero is the
//! statement "this jet satisfies the equation at this point".

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Identifier for one equation of the registry.
///
/// `PIII6`, `PIII7a`, `PIII7b`, `PIII8` are the canonical scale-reduced
/// third-equation variants; `P34` is the second member of the P_II
/// Hamiltonian pair; `SI`..`SVI` are the sigma forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquationId {
    #[serde(rename = "PI")]
    PI,
    #[serde(rename = "PII")]
    PII,
    #[serde(rename = "PIII6")]
    PIII6,
    #[serde(rename = "PIII7a")]
    PIII7a,
    #[serde(rename = "PIII7b")]
    PIII7b,
    #[serde(rename = "PIII8")]
    PIII8,
    #[serde(rename = "PIV")]
    PIV,
    #[serde(rename = "PV")]
    PV,
    #[serde(rename = "PVdeg")]
    PVdeg,
    #[serde(rename = "PVI")]
    PVI,
    #[serde(rename = "P34")]
    P34,
    #[serde(rename = "SI")]
    SI,
    #[serde(rename = "SII")]
    SII,
    #[serde(rename = "SIII")]
    SIII,
    #[serde(rename = "SIV")]
    SIV,
    #[serde(rename = "SV")]
    SV,
    #[serde(rename = "SVI")]
    SVI,
}

pub const ALL_EQUATIONS: [EquationId; 17] = [
    EquationId::PI,
    EquationId::PII,
    EquationId::PIII6,
    EquationId::PIII7a,
    EquationId::PIII7b,
    EquationId::PIII8,
    EquationId::PIV,
    EquationId::PV,
    EquationId::PVdeg,
    EquationId::PVI,
    EquationId::P34,
    EquationId::SI,
    EquationId::SII,
    EquationId::SIII,
    EquationId::SIV,
    EquationId::SV,
    EquationId::SVI,
];

impl EquationId {
    pub fn name(self) -> &'static str {
        match self {
            EquationId::PI => "PI",
            EquationId::PII => "PII",
            EquationId::PIII6 => "PIII6",
            EquationId::PIII7a => "PIII7a",
            EquationId::PIII7b => "PIII7b",
            EquationId::PIII8 => "PIII8",
            EquationId::PIV => "PIV",
            EquationId::PV => "PV",
            EquationId::PVdeg => "PVdeg",
            EquationId::PVI => "PVI",
            EquationId::P34 => "P34",
            EquationId::SI => "SI",
            EquationId::SII => "SII",
            EquationId::SIII => "SIII",
            EquationId::SIV => "SIV",
            EquationId::SV => "SV",
            EquationId::SVI => "SVI",
        }
    }

    pub fn is_sigma(self) -> bool {
        matches!(
            self,
            EquationId::SI
                | EquationId::SII
                | EquationId::SIII
                | EquationId::SIV
                | EquationId::SV
                | EquationId::SVI
        )
    }
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquationId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        for id in ALL_EQUATIONS {
            if id.name().eq_ignore_ascii_case(s) {
                return Ok(id);
            }
        }
        Err(Error::parameter(format!("unknown equation \"{s}\"")))
    }
}

/// Named parameters. Exactly the fields of the paired equation's schema
/// may be set; [`validate`] enforces this.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<[f64; 4]>,
}

impl ParamSet {
    pub fn none() -> Self {
        ParamSet::default()
    }
    pub fn with_alpha(alpha: f64) -> Self {
        ParamSet { alpha: Some(alpha), ..Default::default() }
    }
    pub fn with_beta(beta: f64) -> Self {
        ParamSet { beta: Some(beta), ..Default::default() }
    }
    pub fn ab(alpha: f64, beta: f64) -> Self {
        ParamSet { alpha: Some(alpha), beta: Some(beta), ..Default::default() }
    }
    pub fn abg(alpha: f64, beta: f64, gamma: f64) -> Self {
        ParamSet {
            alpha: Some(alpha),
            beta: Some(beta),
            gamma: Some(gamma),
            ..Default::default()
        }
    }
    pub fn abgd(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        ParamSet {
            alpha: Some(alpha),
            beta: Some(beta),
            gamma: Some(gamma),
            delta: Some(delta),
            ..Default::default()
        }
    }
    pub fn thetas(theta0: f64, theta_inf: f64) -> Self {
        ParamSet {
            theta0: Some(theta0),
            theta_inf: Some(theta_inf),
            ..Default::default()
        }
    }
    pub fn kappas(kappa: [f64; 4]) -> Self {
        ParamSet { kappa: Some(kappa), ..Default::default() }
    }

    fn mask(&self) -> [bool; 7] {
        [
            self.alpha.is_some(),
            self.beta.is_some(),
            self.gamma.is_some(),
            self.delta.is_some(),
            self.theta0.is_some(),
            self.theta_inf.is_some(),
            self.kappa.is_some(),
        ]
    }
}

// field order: alpha, beta, gamma, delta, theta0, theta_inf, kappa
fn schema(eq: EquationId) -> [bool; 7] {
    use EquationId::*;
    match eq {
        PI | PIII8 | SI => [false; 7],
        PII | PIII7b | P34 => [true, false, false, false, false, false, false],
        PIII7a | SII => [false, true, false, false, false, false, false],
        PIII6 | PIV => [true, true, false, false, false, false, false],
        PVdeg => [true, true, true, false, false, false, false],
        PV | PVI => [true, true, true, true, false, false, false],
        SIII | SIV => [false, false, false, false, true, true, false],
        SV | SVI => [false, false, false, false, false, false, true],
    }
}

/// Checks that exactly the schema fields of `eq` are present in `p`.
pub fn validate(eq: EquationId, p: &ParamSet) -> Result<()> {
    const NAMES: [&str; 7] = ["alpha", "beta", "gamma", "delta", "theta0", "theta_inf", "kappa"];
    let want = schema(eq);
    let have = p.mask();
    for i in 0..7 {
        if want[i] && !have[i] {
            return Err(Error::parameter(format!("{eq}: missing parameter {}", NAMES[i])));
        }
        if !want[i] && have[i] {
            return Err(Error::parameter(format!("{eq}: unexpected parameter {}", NAMES[i])));
        }
    }
    Ok(())
}

/// Point on a solution graph: abscissa, value, first derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State2 {
    pub z: f64,
    pub w: f64,
    pub dw: f64,
}

fn nonzero(v: f64, what: &str, z: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        Err(Error::singular(format!("{what} vanishes at z = {z}")))
    } else {
        Ok(())
    }
}

// Second-derivative right-hand sides of the first-degree family, shared by
// residual and rhs so the two agree bit-for-bit.
fn second_derivative(eq: EquationId, p: &ParamSet, z: f64, w: f64, dw: f64) -> Result<f64> {
    use EquationId::*;
    match eq {
        PI => Ok(6.0 * w * w + z),
        PII => {
            let alpha = p.alpha.unwrap();
            Ok(2.0 * w * w * w + z * w + alpha)
        }
        PIII6 => {
            nonzero(w, "w", z)?;
            nonzero(z, "z", z)?;
            let (alpha, beta) = (p.alpha.unwrap(), p.beta.unwrap());
            Ok(dw * dw / w - dw / z + (alpha * w * w + beta) / z + w * w * w - 1.0 / w)
        }
        PIII7a => {
            nonzero(w, "w", z)?;
            nonzero(z, "z", z)?;
            let beta = p.beta.unwrap();
            Ok(dw * dw / w - dw / z + (w * w + beta) / z - 1.0 / w)
        }
        PIII7b => {
            nonzero(w, "w", z)?;
            nonzero(z, "z", z)?;
            let alpha = p.alpha.unwrap();
            Ok(dw * dw / w - dw / z + (alpha * w * w - 1.0) / z + w * w * w)
        }
        PIII8 => {
            nonzero(w, "w", z)?;
            nonzero(z, "z", z)?;
            Ok(dw * dw / w - dw / z + (w * w - 1.0) / z)
        }
        PIV => {
            nonzero(w, "w", z)?;
            let (alpha, beta) = (p.alpha.unwrap(), p.beta.unwrap());
            Ok(dw * dw / (2.0 * w)
                + 1.5 * w * w * w
                + 4.0 * z * w * w
                + 2.0 * (z * z - alpha) * w
                + beta / w)
        }
        PV => {
            nonzero(w, "w", z)?;
            nonzero(w - 1.0, "w-1", z)?;
            nonzero(z, "z", z)?;
            let (alpha, beta) = (p.alpha.unwrap(), p.beta.unwrap());
            let (gamma, delta) = (p.gamma.unwrap(), p.delta.unwrap());
            Ok((0.5 / w + 1.0 / (w - 1.0)) * dw * dw - dw / z
                + (w - 1.0) * (w - 1.0) * (alpha * w + beta / w) / (z * z)
                + gamma * w / z
                + delta * w * (w + 1.0) / (w - 1.0))
        }
        PVdeg => {
            nonzero(w, "w", z)?;
            nonzero(w - 1.0, "w-1", z)?;
            nonzero(z, "z", z)?;
            let (alpha, beta, gamma) = (p.alpha.unwrap(), p.beta.unwrap(), p.gamma.unwrap());
            Ok((0.5 / w + 1.0 / (w - 1.0)) * dw * dw - dw / z
                + (w - 1.0) * (w - 1.0) * (alpha * w + beta / w) / (z * z)
                + gamma * w / z)
        }
        PVI => {
            nonzero(z, "z", z)?;
            nonzero(z - 1.0, "z-1", z)?;
            nonzero(w, "w", z)?;
            nonzero(w - 1.0, "w-1", z)?;
            nonzero(w - z, "w-z", z)?;
            let (alpha, beta) = (p.alpha.unwrap(), p.beta.unwrap());
            let (gamma, delta) = (p.gamma.unwrap(), p.delta.unwrap());
            let quad = 0.5 * (1.0 / w + 1.0 / (w - 1.0) + 1.0 / (w - z)) * dw * dw;
            let lin = (1.0 / z + 1.0 / (z - 1.0) + 1.0 / (w - z)) * dw;
            let front = w * (w - 1.0) * (w - z) / (z * z * (z - 1.0) * (z - 1.0));
            let brace = alpha
                + beta * z / (w * w)
                + gamma * (z - 1.0) / ((w - 1.0) * (w - 1.0))
                + delta * z * (z - 1.0) / ((w - z) * (w - z));
            Ok(quad - lin + front * brace)
        }
        P34 => {
            nonzero(w, "p", z)?;
            let alpha = p.alpha.unwrap();
            let a_half = alpha + 0.5;
            Ok(dw * dw / (2.0 * w) + 2.0 * w * w - z * w - a_half * a_half / (2.0 * w))
        }
        SI | SII | SIII | SIV | SV | SVI => Err(Error::parameter(format!(
            "{eq} is second-degree; use sigma_residual"
        ))),
    }
}

// Validation-free path for integrator inner loops; callers validate once.
pub(crate) fn d2w_unchecked(eq: EquationId, p: &ParamSet, z: f64, w: f64, dw: f64) -> Result<f64> {
    second_derivative(eq, p, z, w, dw)
}

/// Residual of the first-degree equation `eq` at the 2-jet (w, dw, d2w).
pub fn residual(eq: EquationId, p: &ParamSet, z: f64, w: f64, dw: f64, d2w: f64) -> Result<f64> {
    validate(eq, p)?;
    Ok(d2w - second_derivative(eq, p, z, w, dw)?)
}

/// First-order system form: given (z, w, dw) returns (dw, d2w).
pub fn rhs(eq: EquationId, p: &ParamSet, state: &State2) -> Result<(f64, f64)> {
    validate(eq, p)?;
    let d2 = second_derivative(eq, p, state.z, state.w, state.dw)?;
    Ok((state.dw, d2))
}

/// Residual of a sigma equation at the 2-jet (s, ds, d2s).
pub fn sigma_residual(
    eq: EquationId,
    p: &ParamSet,
    z: f64,
    s: f64,
    ds: f64,
    d2s: f64,
) -> Result<f64> {
    validate(eq, p)?;
    use EquationId::*;
    match eq {
        SI => Ok(d2s * d2s + 4.0 * ds * ds * ds + 2.0 * z * ds - 2.0 * s),
        SII => {
            let beta = p.beta.unwrap();
            Ok(d2s * d2s + 4.0 * ds * ds * ds + 2.0 * ds * (z * ds - s) - 0.25 * beta * beta)
        }
        SIII => {
            let (t0, ti) = (p.theta0.unwrap(), p.theta_inf.unwrap());
            let a = z * d2s - ds;
            Ok(a * a + (4.0 * ds * ds - z * z) * (z * ds - 2.0 * s) + 4.0 * z * ti * ds
                - 2.0 * t0 * z * z)
        }
        SIV => {
            let (t0, ti) = (p.theta0.unwrap(), p.theta_inf.unwrap());
            let b = z * ds - s;
            Ok(d2s * d2s - 4.0 * b * b + 4.0 * ds * (ds + 2.0 * t0) * (ds + 2.0 * ti))
        }
        SV => {
            let k = p.kappa.unwrap();
            let a = z * d2s;
            let b = 2.0 * ds * ds - z * ds + s;
            let prod: f64 = k.iter().map(|kj| ds + kj).product();
            Ok(a * a - b * b + 4.0 * prod)
        }
        SVI => {
            nonzero(z, "z", z)?;
            nonzero(z - 1.0, "z-1", z)?;
            let k = p.kappa.unwrap();
            let a = z * (z - 1.0) * d2s;
            let kprod: f64 = k.iter().product();
            let b = ds * (2.0 * s - (2.0 * z - 1.0) * ds) + kprod;
            let prod: f64 = k.iter().map(|kj| ds + kj * kj).product();
            Ok(ds * a * a + b * b - prod)
        }
        _ => Err(Error::parameter(format!("{eq} is first-degree; use residual"))),
    }
}

// ---- complex-argument forms for the pole-aware solver ----

fn second_derivative_c(
    eq: EquationId,
    p: &ParamSet,
    z: Complex64,
    w: Complex64,
    dw: Complex64,
) -> Result<Complex64> {
    use EquationId::*;
    match eq {
        PI => Ok(6.0 * w * w + z),
        PII => {
            let alpha = p.alpha.unwrap();
            Ok(2.0 * w * w * w + z * w + alpha)
        }
        P34 => {
            if w.norm() == 0.0 {
                return Err(Error::singular("p vanishes".to_string()));
            }
            let alpha = p.alpha.unwrap();
            let a_half = alpha + 0.5;
            Ok(dw * dw / (2.0 * w) + 2.0 * w * w - z * w - a_half * a_half / (2.0 * w))
        }
        _ => Err(Error::parameter(format!(
            "{eq}: complex evaluation supported only for PI, PII, P34"
        ))),
    }
}

/// Complex residual; only P_I, P_II and P_34 admit off-axis evaluation.
pub fn residual_complex(
    eq: EquationId,
    p: &ParamSet,
    z: Complex64,
    w: Complex64,
    dw: Complex64,
    d2w: Complex64,
) -> Result<Complex64> {
    validate(eq, p)?;
    Ok(d2w - second_derivative_c(eq, p, z, w, dw)?)
}

/// Complex first-order system form for P_I, P_II, P_34.
pub fn rhs_complex(
    eq: EquationId,
    p: &ParamSet,
    z: Complex64,
    w: Complex64,
    dw: Complex64,
) -> Result<(Complex64, Complex64)> {
    validate(eq, p)?;
    Ok((dw, second_derivative_c(eq, p, z, w, dw)?))
}

// ---- case classification and normalization ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiiiCase {
    P3_6,
    P3_7,
    P3_8,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvCase {
    Generic,
    Degenerate,
    Quadrature,
}

/// Case split of the four-parameter third equation.
pub fn classify_piii(alpha: f64, beta: f64, gamma: f64, delta: f64) -> PiiiCase {
    if gamma * delta != 0.0 {
        PiiiCase::P3_6
    } else if (gamma == 0.0 && alpha * delta != 0.0) || (delta == 0.0 && beta * gamma != 0.0) {
        PiiiCase::P3_7
    } else if gamma == 0.0 && delta == 0.0 && alpha * beta != 0.0 {
        PiiiCase::P3_8
    } else {
        // alpha = gamma = 0 or beta = delta = 0: solvable by quadratures
        PiiiCase::Quadrature
    }
}

/// Case split of the four-parameter fifth equation.
pub fn classify_pv(_alpha: f64, _beta: f64, gamma: f64, delta: f64) -> PvCase {
    if delta != 0.0 {
        PvCase::Generic
    } else if gamma != 0.0 {
        PvCase::Degenerate
    } else {
        PvCase::Quadrature
    }
}

/// Substitution w(z) = lambda_w * W(mu_z * z) realizing a normalization:
/// W on the canonical side, w on the input side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub lambda_w: f64,
    pub mu_z: f64,
}

impl Scaling {
    pub fn identity() -> Self {
        Scaling { lambda_w: 1.0, mu_z: 1.0 }
    }
}

/// Maps a four-parameter third-equation parameter set to its canonical
/// variant and the (w, z) scaling that realizes the reduction.
///
/// Requires the abgd schema. The scaling law is alpha' = alpha lambda/mu,
/// beta' = beta/(lambda mu), gamma' = gamma lambda^2/mu^2,
/// delta' = delta/(lambda^2 mu^2); the target signs pin which orthant of
/// (gamma, delta) admits a real reduction, and inputs outside it fail
/// with a domain error rather than a silently complex scale.
pub fn normalize_piii(p: &ParamSet) -> Result<(EquationId, ParamSet, Scaling)> {
    let (alpha, beta, gamma, delta) = four_params(p)?;
    match classify_piii(alpha, beta, gamma, delta) {
        PiiiCase::Quadrature => Err(Error::parameter(
            "quadrature case (alpha=gamma=0 or beta=delta=0): no canonical form".to_string(),
        )),
        PiiiCase::P3_6 => {
            if gamma < 0.0 || delta > 0.0 {
                return Err(Error::domain(format!(
                    "no real scaling to (gamma, delta) = (1, -1) from ({gamma}, {delta}); \
                     need gamma > 0 and delta < 0"
                )));
            }
            let lambda = (-delta / gamma).powf(0.25);
            let mu = (-delta * gamma).powf(0.25);
            Ok((
                EquationId::PIII6,
                ParamSet::ab(alpha * lambda / mu, beta / (lambda * mu)),
                Scaling { lambda_w: lambda, mu_z: mu },
            ))
        }
        PiiiCase::P3_7 => {
            if gamma == 0.0 {
                // target alpha' = 1, delta' = -1
                if delta > 0.0 {
                    return Err(Error::domain(format!(
                        "no real scaling to delta' = -1 from delta = {delta} > 0"
                    )));
                }
                let mu = (-delta * alpha * alpha).powf(0.25);
                let lambda = mu / alpha;
                Ok((
                    EquationId::PIII7a,
                    ParamSet::with_beta(beta / (lambda * mu)),
                    Scaling { lambda_w: lambda, mu_z: mu },
                ))
            } else {
                // delta = 0; target beta' = -1, gamma' = 1
                if gamma < 0.0 {
                    return Err(Error::domain(format!(
                        "no real scaling to gamma' = 1 from gamma = {gamma} < 0"
                    )));
                }
                let mu = (beta.abs() * gamma.sqrt()).sqrt();
                let lambda = -beta / mu;
                Ok((
                    EquationId::PIII7b,
                    ParamSet::with_alpha(alpha * lambda / mu),
                    Scaling { lambda_w: lambda, mu_z: mu },
                ))
            }
        }
        PiiiCase::P3_8 => {
            // target alpha' = 1, beta' = -1
            if alpha * beta > 0.0 {
                return Err(Error::domain(format!(
                    "no real scaling to (alpha', beta') = (1, -1) from ({alpha}, {beta}); \
                     need alpha*beta < 0"
                )));
            }
            let mu = (-alpha * beta).sqrt();
            let lambda = mu / alpha;
            Ok((
                EquationId::PIII8,
                ParamSet::none(),
                Scaling { lambda_w: lambda, mu_z: mu },
            ))
        }
    }
}

/// Canonicalizes the fifth equation: delta' = -1/2 in the generic case
/// (pure z-scaling, w untouched), pass-through to the degenerate schema
/// when delta = 0.
pub fn normalize_pv(p: &ParamSet) -> Result<(EquationId, ParamSet, Scaling)> {
    let (alpha, beta, gamma, delta) = four_params(p)?;
    match classify_pv(alpha, beta, gamma, delta) {
        PvCase::Quadrature => Err(Error::parameter(
            "quadrature case (gamma = delta = 0): no canonical form".to_string(),
        )),
        PvCase::Generic => {
            if delta > 0.0 {
                return Err(Error::domain(format!(
                    "no real scaling to delta' = -1/2 from delta = {delta} > 0"
                )));
            }
            let mu = (-2.0 * delta).sqrt();
            Ok((
                EquationId::PV,
                ParamSet::abgd(alpha, beta, gamma / mu, -0.5),
                Scaling { lambda_w: 1.0, mu_z: mu },
            ))
        }
        PvCase::Degenerate => Ok((
            EquationId::PVdeg,
            ParamSet::abg(alpha, beta, gamma),
            Scaling::identity(),
        )),
    }
}

fn four_params(p: &ParamSet) -> Result<(f64, f64, f64, f64)> {
    match (p.alpha, p.beta, p.gamma, p.delta) {
        (Some(a), Some(b), Some(g), Some(d)) => Ok((a, b, g, d)),
        _ => Err(Error::parameter(
            "normalization requires the four-parameter schema (alpha, beta, gamma, delta)"
                .to_string(),
        )),
    }
}
