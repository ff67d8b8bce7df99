//! Adaptive integration of the first-degree family, with pole traversal.
//!
//! [`integrate`] runs the plain stepper and fails honestly at movable
//! singularities. [`integrate_pole_aware`] continues through them for the
//! three equations whose pole structure this crate certifies (the first,
//! second, and 34th), vaulting each pole on a locally fitted Laurent
//! expansion. Results come back as a [`Trajectory`]: dense inside,
//! sampled on top, with every traversed pole on record.

mod dopri5;
mod hm;
mod pole;

pub use dopri5::{DenseSeg, Dopri5, Stats, StepOutcome};
pub use hm::{hastings_mcleod, HastingsMcleod};

use crate::equations::{self, EquationId, ParamSet};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Integration tolerances and the pole-handling thresholds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; estimated from the data when absent.
    pub h_init: Option<f64>,
    pub max_steps: usize,
    /// |w| beyond which the drivers treat the solution as entering a pole.
    pub pole_threshold: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            max_steps: 200_000,
            pole_threshold: 100.0,
        }
    }
}

/// One output point of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub z: f64,
    pub w: f64,
    pub dw: f64,
}

/// A movable singularity the driver passed through.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub z0: f64,
    pub order: u8,
    /// Sign of the residue for simple poles.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residue_sign: Option<i8>,
    /// Free series coefficient recovered by the local fit (double poles).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub free_coeff: Option<f64>,
    pub method: String,
}

#[derive(Clone, Debug)]
pub(crate) enum SegKind {
    /// Dense output in the original variables (w, w').
    Direct(DenseSeg<2>),
    /// Truncated pole expansion of the first equation.
    LaurentPI { z0: f64, c: f64 },
    /// Truncated pole expansion of the 34th equation.
    LaurentP34 { z0: f64, c: f64, a2: f64 },
    /// Truncated simple-pole expansion of the second equation.
    LaurentPII { z0: f64, sigma: f64, alpha: f64, c: f64 },
}

#[derive(Clone, Debug)]
pub(crate) struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub kind: SegKind,
}

impl Segment {
    pub(crate) fn from_seg(seg: DenseSeg<2>, cut: Option<f64>) -> Segment {
        let a = seg.x0;
        let b = cut.unwrap_or_else(|| seg.x1());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Segment { lo, hi, kind: SegKind::Direct(seg) }
    }
}

/// Numerical solution with dense evaluation, grid samples, and pole log.
#[derive(Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub equation: EquationId,
    pub params: ParamSet,
    pub samples: Vec<Sample>,
    pub poles: Vec<PoleRecord>,
    pub control: StepControl,
    pub stats: Stats,
    #[serde(skip)]
    pub(crate) segments: Vec<Segment>,
}

impl Trajectory {
    pub(crate) fn new(equation: EquationId, params: ParamSet, control: StepControl) -> Self {
        Trajectory {
            equation,
            params,
            samples: Vec::new(),
            poles: Vec::new(),
            control,
            stats: Stats::default(),
            segments: Vec::new(),
        }
    }

    pub(crate) fn finalize(&mut self) {
        self.segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        self.samples.sort_by(|a, b| a.z.total_cmp(&b.z));
        self.poles.sort_by(|a, b| a.z0.total_cmp(&b.z0));
    }

    /// Covered z-interval.
    pub fn domain(&self) -> Result<(f64, f64)> {
        match (self.segments.first(), self.segments.last()) {
            (Some(a), Some(b)) => Ok((a.lo, b.hi)),
            _ => Err(Error::numerical("trajectory has no dense segments".to_string())),
        }
    }

    fn find_segment(&self, z: f64) -> Result<&Segment> {
        let idx = self.segments.partition_point(|s| s.hi < z);
        let tol = 1e-12 * z.abs().max(1.0);
        if let Some(s) = self.segments.get(idx) {
            if z >= s.lo - tol {
                return Ok(s);
            }
        }
        // z may sit exactly on the junction of idx-1's hi
        if idx > 0 {
            let s = &self.segments[idx - 1];
            if z <= s.hi + tol {
                return Ok(s);
            }
        }
        Err(Error::domain(format!("z = {z} is outside the computed trajectory")))
    }

    /// (w, w') at z.
    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        let (w, dw, _) = self.eval_jet2(z)?;
        Ok((w, dw))
    }

    /// (w, w', w'') at z; the second derivative comes from the dense
    /// interpolant, not from the differential equation, so residuals
    /// built on it are a genuine check.
    pub fn eval_jet2(&self, z: f64) -> Result<(f64, f64, f64)> {
        let seg = self.find_segment(z)?;
        match &seg.kind {
            SegKind::Direct(d) => {
                let y = d.eval(z);
                let dy = d.eval_deriv(z);
                Ok((y[0], y[1], dy[1]))
            }
            SegKind::LaurentPI { z0, c } => {
                if z == *z0 {
                    return Err(Error::singular(format!("pole at z = {z}")));
                }
                Ok(pole::pi_series_jet(*z0, *c, z))
            }
            SegKind::LaurentP34 { z0, c, a2 } => {
                if z == *z0 {
                    return Err(Error::singular(format!("pole at z = {z}")));
                }
                Ok(pole::p34_series_jet(*z0, *c, *a2, z))
            }
            SegKind::LaurentPII { z0, sigma, alpha, c } => {
                if z == *z0 {
                    return Err(Error::singular(format!("pole at z = {z}")));
                }
                Ok(pole::pii_series_jet(*z0, *sigma, *alpha, *c, z))
            }
        }
    }

    /// Replaces the sample list with n points uniform over the domain,
    /// skipping points that land on a pole.
    pub fn resample(&mut self, n: usize) -> Result<()> {
        let (lo, hi) = self.domain()?;
        let n = n.max(2);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let z = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            if let Ok((w, dw)) = self.eval(z) {
                if w.is_finite() && dw.is_finite() {
                    out.push(Sample { z, w, dw });
                }
            }
        }
        self.samples = out;
        Ok(())
    }

    /// Sample table as CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z,w,dw\n");
        for p in &self.samples {
            s.push_str(&format!("{},{},{}\n", p.z, p.w, p.dw));
        }
        s
    }

    pub(crate) fn push_sample(&mut self, z: f64, w: f64, dw: f64) {
        if w.is_finite() && dw.is_finite() {
            self.samples.push(Sample { z, w, dw });
        }
    }
}

const FIRST_DEGREE: [EquationId; 11] = [
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
];

/// Integrates w'' = f(z, w, w') from (z0, w0, dw0) to zend.
///
/// No pole handling: a movable singularity inside the interval surfaces
/// as a step-size underflow error.
pub fn integrate(
    eq: EquationId,
    p: &ParamSet,
    z0: f64,
    w0: f64,
    dw0: f64,
    zend: f64,
    ctrl: &StepControl,
) -> Result<Trajectory> {
    equations::validate(eq, p)?;
    if !FIRST_DEGREE.contains(&eq) {
        return Err(Error::parameter(format!("{eq}: only first-degree equations integrate")));
    }
    let mut traj = Trajectory::new(eq, *p, *ctrl);
    let pp = *p;
    let f = move |z: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let d2 = equations::d2w_unchecked(eq, &pp, z, y[0], y[1])?;
        Ok([y[1], d2])
    };
    let mut stepper =
        Dopri5::new(f, z0, [w0, dw0], zend, ctrl.rtol, ctrl.atol, ctrl.h_init)?
            .with_max_steps(ctrl.max_steps);
    traj.push_sample(z0, w0, dw0);
    loop {
        let out = stepper.step()?;
        traj.segments.push(Segment::from_seg(out.seg, None));
        traj.push_sample(stepper.x, stepper.y[0], stepper.y[1]);
        if out.done {
            break;
        }
    }
    traj.stats = stepper.stats;
    traj.finalize();
    Ok(traj)
}

/// Integrates through movable poles.
///
/// Supported: the second equation (simple poles) and the first and 34th
/// (double poles). Each pole is vaulted on a locally fitted expansion;
/// poles traversed are appended to the trajectory's record.
pub fn integrate_pole_aware(
    eq: EquationId,
    p: &ParamSet,
    z0: f64,
    w0: f64,
    dw0: f64,
    zend: f64,
    ctrl: &StepControl,
) -> Result<Trajectory> {
    equations::validate(eq, p)?;
    if ctrl.pole_threshold < 20.0 {
        return Err(Error::parameter(
            "pole_threshold below 20 leaves no room between the pole expansions' validity \
             range and the working range"
                .to_string(),
        ));
    }
    match eq {
        EquationId::PI | EquationId::PII | EquationId::P34 => {
            pole::integrate_vault(eq, p, z0, w0, dw0, zend, ctrl)
        }
        _ => Err(Error::parameter(format!(
            "{eq}: pole-aware integration covers PI, PII, P34"
        ))),
    }
}

/// Decaying second-equation data at large positive z: w = k Ai(z).
///
/// Ai(10) is about 1e-10, and errors committed at that scale grow with
/// the solution as it comes back to O(1). Integrations launched from
/// this seed should set `atol` below the seed magnitude so the relative
/// tolerance stays in charge.
pub fn seed_from_airy(k: f64, z_start: f64) -> Result<(f64, f64)> {
    let a = crate::specialfn::airy(z_start)?;
    Ok((k * a.ai, k * a.ai_deriv))
}
