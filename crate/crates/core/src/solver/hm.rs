//! The separatrix solution of the second equation at alpha = 0.
//!
//! Among solutions decaying like k Ai(z) on the right, k = 1 is the
//! unique one that stays positive and approaches sqrt(-z/2) on the left;
//! k > 1 blows up at a finite point, k < 1 falls into oscillation. One
//! shooting parameter carries about sixteen digits, which buys roughly
//! 18 nats of the leftward instability; the cascade therefore re-anchors
//! at a ladder of stations, re-bisecting along the segment between the
//! propagated bracket edges at each one. Every leg of the returned
//! trajectory is integrated strictly inside its bracket's trust range.

use super::dopri5::Dopri5;
use super::{integrate, seed_from_airy, StepControl, Trajectory};
use crate::equations::{EquationId, ParamSet};
use crate::error::{Error, Result};

/// Shooting bracket and the stitched trajectory.
pub struct HastingsMcleod {
    pub k_lo: f64,
    pub k_hi: f64,
    pub trajectory: Trajectory,
}

const Z_SEED: f64 = 10.0;
const STATIONS: [f64; 5] = [-7.0, -11.0, -14.5, -18.0, -21.0];
const W_CAP: f64 = 50.0;

enum Fate {
    Blowup,
    Oscillation,
}

// Classifies initial data at z_from by integrating leftward until the
// solution either exceeds W_CAP (pole side) or dips negative
// (oscillation side).
fn fate(z_from: f64, y0: [f64; 2], ctrl: &StepControl) -> Result<Fate> {
    let f = |z: f64, s: &[f64; 2]| -> Result<[f64; 2]> {
        Ok([s[1], 2.0 * s[0] * s[0] * s[0] + z * s[0]])
    };
    let floor = z_from - 25.0;
    let mut st = Dopri5::new(f, z_from, y0, floor, ctrl.rtol, ctrl.atol, None)?
        .with_max_steps(ctrl.max_steps);
    loop {
        let out = st.step()?;
        // theta order equals travel order (h < 0), so the first trigger
        // along the scan is the first event
        for k in 1..=8 {
            let x = out.seg.x0 + out.seg.h * k as f64 / 8.0;
            let w = out.seg.eval(x)[0];
            if w > W_CAP {
                return Ok(Fate::Blowup);
            }
            if w < 0.0 {
                return Ok(Fate::Oscillation);
            }
        }
        if out.done {
            return Err(Error::numerical(format!(
                "no classification between z = {z_from} and z = {floor}"
            )));
        }
    }
}

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Computes the separatrix solution on [-21, 10].
pub fn hastings_mcleod(ctrl: &StepControl) -> Result<HastingsMcleod> {
    // the right-edge seed sits ten orders below unity, and error
    // tolerated there is amplified back to O(1) with the solution; keep
    // atol under the seed so the relative tolerance stays in charge
    let ctrl = &StepControl { atol: ctrl.atol.min(1e-22), ..*ctrl };
    let p = ParamSet::with_alpha(0.0);
    let (k0, k1) = (0.99, 1.01);
    let s_lo = seed_from_airy(k0, Z_SEED)?;
    let s_hi = seed_from_airy(k1, Z_SEED)?;
    let mut y_lo = [s_lo.0, s_lo.1];
    let mut y_hi = [s_hi.0, s_hi.1];
    let mut z_a = Z_SEED;
    let mut k_bracket = (k0, k1);

    let mut out = Trajectory::new(EquationId::PII, p, *ctrl);
    for (i, &z_s) in STATIONS.iter().enumerate() {
        if !matches!(fate(z_a, y_lo, ctrl)?, Fate::Oscillation) {
            return Err(Error::verification(format!(
                "lower bracket edge does not oscillate from z = {z_a}"
            )));
        }
        if !matches!(fate(z_a, y_hi, ctrl)?, Fate::Blowup) {
            return Err(Error::verification(format!(
                "upper bracket edge does not blow up from z = {z_a}"
            )));
        }
        let (mut t_lo, mut t_hi) = (0.0_f64, 1.0_f64);
        for _ in 0..60 {
            let tm = 0.5 * (t_lo + t_hi);
            if tm == t_lo || tm == t_hi {
                break;
            }
            match fate(z_a, lerp(y_lo, y_hi, tm), ctrl)? {
                Fate::Blowup => t_hi = tm,
                Fate::Oscillation => t_lo = tm,
            }
        }
        if i == 0 {
            // the seed is linear in k, so t-bisection is k-bisection
            k_bracket = (k0 + (k1 - k0) * t_lo, k0 + (k1 - k0) * t_hi);
        }

        let ym = lerp(y_lo, y_hi, 0.5 * (t_lo + t_hi));
        let leg = integrate(EquationId::PII, &p, z_a, ym[0], ym[1], z_s, ctrl)?;
        out.stats.absorb(leg.stats);
        out.segments.extend(leg.segments);
        out.samples.extend(leg.samples);

        // propagate the bracket edges to the next anchor; the edges stay
        // within one ulp of the separatrix, so both reach the station
        let lo_leg = {
            let y = lerp(y_lo, y_hi, t_lo);
            integrate(EquationId::PII, &p, z_a, y[0], y[1], z_s, ctrl)?
        };
        let hi_leg = {
            let y = lerp(y_lo, y_hi, t_hi);
            integrate(EquationId::PII, &p, z_a, y[0], y[1], z_s, ctrl)?
        };
        let (wl, dwl) = lo_leg.eval(z_s)?;
        let (wh, dwh) = hi_leg.eval(z_s)?;
        y_lo = [wl, dwl];
        y_hi = [wh, dwh];
        z_a = z_s;
    }

    out.finalize();
    out.samples.dedup_by(|a, b| a.z == b.z);
    Ok(HastingsMcleod { k_lo: k_bracket.0, k_hi: k_bracket.1, trajectory: out })
}

#[cfg(test)]
// Reference values keep every digit of the sources they were computed from.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn separatrix_matches_reference_and_left_asymptote() {
        let hm = hastings_mcleod(&StepControl::default()).unwrap();
        assert!(hm.k_lo > 0.99 && hm.k_hi < 1.01);
        assert!(hm.k_lo <= hm.k_hi);
        assert!(hm.k_hi - hm.k_lo < 1e-12, "bracket width {}", hm.k_hi - hm.k_lo);

        let t = &hm.trajectory;
        let spots = [
            (0.0, 0.36706155154807843, 1e-7),
            (-1.0, 0.68806036460511808, 1e-7),
            (-4.0, 1.4111769293623940, 1e-6),
            (2.0, 0.034928149264595720, 1e-7),
        ];
        for (z, want, tol) in spots {
            let (w, _) = t.eval(z).unwrap();
            assert!((w - want).abs() < tol, "w({z}) = {w}, want {want}");
        }

        // left edge rides the parabolic asymptote
        let (w20, _) = t.eval(-20.0).unwrap();
        assert!((w20 / 10f64.sqrt() - 1.0).abs() < 0.05, "w(-20) = {w20}");

        // positive and monotone decreasing across [-20, 0]
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let z = -20.0 + 20.0 * i as f64 / 100.0;
            let (w, _) = t.eval(z).unwrap();
            assert!(w > 0.0 && w < prev, "monotonicity fails at z = {z}");
            prev = w;
        }
    }
}
