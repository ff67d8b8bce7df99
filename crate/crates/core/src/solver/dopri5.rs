//! Explicit Runge-Kutta 5(4) stepper with continuous output.
//!
//! The controller is proportional-integral: step factor
//! err^-0.17 * err_prev^0.04, clamped to [1/5, 10] and damped by 0.9.
//! The first same-as-last stage is reused, so an accepted step costs six
//! right-hand-side evaluations. Continuous output is the standard
//! quartic-in-theta interpolant of the pair, good to the order of the
//! step itself, and is what every downstream consumer (pole location,
//! grid sampling, curve transforms) evaluates.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FACC1: f64 = 5.0; // max step growth denominator bounds: h/5 .. 10h
const FACC2: f64 = 0.1;

/// One accepted step as a quartic interpolant on [x0, x0 + h].
#[derive(Clone, Copy, Debug)]
pub struct DenseSeg<const N: usize> {
    pub x0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseSeg<N> {
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    /// Interpolated state at x (valid for x between x0 and x0 + h).
    pub fn eval(&self, x: f64) -> [f64; N] {
        let th = (x - self.x0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.cont;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        }
        y
    }

    /// Derivative dy/dx of the interpolant at x.
    pub fn eval_deriv(&self, x: f64) -> [f64; N] {
        let th = (x - self.x0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.cont;
        let mut dy = [0.0; N];
        for i in 0..N {
            let cc = c[3][i] + th1 * c[4][i];
            let b = c[2][i] + th * cc;
            let bp = cc - th * c[4][i];
            let a = c[1][i] + th1 * b;
            let ap = -b + th1 * bp;
            dy[i] = (a + th * ap) / self.h;
        }
        dy
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl Stats {
    pub fn absorb(&mut self, other: Stats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.rhs_evals += other.rhs_evals;
    }
}

pub struct Dopri5<const N: usize, F> {
    f: F,
    pub x: f64,
    pub y: [f64; N],
    xend: f64,
    rtol: f64,
    atol: f64,
    h: f64,
    k1: [f64; N],
    facold: f64,
    reject: bool,
    max_steps: usize,
    pub stats: Stats,
}

pub struct StepOutcome<const N: usize> {
    pub seg: DenseSeg<N>,
    pub done: bool,
}

/// One trial step: the fifth-order solution at x + h and the seven stage slopes.
type TrialStep<const N: usize> = ([f64; N], [[f64; N]; 7]);

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    pub fn new(
        mut f: F,
        x0: f64,
        y0: [f64; N],
        xend: f64,
        rtol: f64,
        atol: f64,
        h0: Option<f64>,
    ) -> Result<Self> {
        if !(xend - x0).is_finite() || xend == x0 {
            return Err(Error::parameter("empty or non-finite integration interval".to_string()));
        }
        let mut stats = Stats::default();
        let k1 = f(x0, &y0).map_err(|e| {
            Error::numerical(format!("right-hand side fails at the initial point: {e}"))
        })?;
        stats.rhs_evals += 1;
        let mut me = Dopri5 {
            f,
            x: x0,
            y: y0,
            xend,
            rtol,
            atol,
            h: 0.0,
            k1,
            facold: 1e-4,
            reject: false,
            max_steps: 200_000,
            stats,
        };
        me.h = match h0 {
            Some(h) => h.abs() * (xend - x0).signum(),
            None => me.initial_step(),
        };
        Ok(me)
    }

    pub fn with_max_steps(mut self, n: usize) -> Self {
        self.max_steps = n;
        self
    }

    fn call(&mut self, x: f64, y: &[f64; N]) -> Result<[f64; N]> {
        self.stats.rhs_evals += 1;
        let k = (self.f)(x, y)?;
        if k.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical(format!("non-finite derivative at x = {x}")));
        }
        Ok(k)
    }

    fn initial_step(&mut self) -> f64 {
        let posneg = (self.xend - self.x).signum();
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..N {
            let sc = self.atol + self.rtol * self.y[i].abs();
            dnf += (self.k1[i] / sc).powi(2);
            dny += (self.y[i] / sc).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min((self.xend - self.x).abs()) * posneg;
        // refine with a crude second-derivative probe
        let mut y1 = self.y;
        for (v, k) in y1.iter_mut().zip(self.k1) {
            *v += h * k;
        }
        let h_abs = match self.call(self.x + h, &y1) {
            Ok(f1) => {
                let mut der2 = 0.0;
                for ((f, k), y) in f1.iter().zip(self.k1).zip(self.y) {
                    let sc = self.atol + self.rtol * y.abs();
                    der2 += ((f - k) / sc).powi(2);
                }
                let der2 = der2.sqrt() / h.abs();
                let der12 = der2.max(dnf.sqrt());
                let h1 = if der12 <= 1e-15 {
                    (h.abs() * 1e-3).max(1e-6)
                } else {
                    (0.01 / der12).powf(0.2)
                };
                (100.0 * h.abs()).min(h1).min((self.xend - self.x).abs())
            }
            Err(_) => h.abs().min(1e-6),
        };
        h_abs * posneg
    }

    /// Advances by one accepted step; `done` marks arrival at the end point.
    pub fn step(&mut self) -> Result<StepOutcome<N>> {
        let posneg = (self.xend - self.x).signum();
        loop {
            if self.stats.accepted + self.stats.rejected > self.max_steps {
                return Err(Error::numerical(format!(
                    "more than {} steps needed at x = {}",
                    self.max_steps, self.x
                )));
            }
            if self.h.abs() < self.x.abs().max(1.0) * 1e-14 {
                return Err(Error::numerical(format!("step size underflow at x = {}", self.x)));
            }
            let mut last = false;
            if (self.x + 1.01 * self.h - self.xend) * posneg > 0.0 {
                self.h = self.xend - self.x;
                last = true;
            }
            let h = self.h;
            let (x, y, k1) = (self.x, self.y, self.k1);

            let stages = (|| -> Result<TrialStep<N>> {
                let mut yt = [0.0; N];
                for i in 0..N {
                    yt[i] = y[i] + h * A21 * k1[i];
                }
                let k2 = self.call(x + C2 * h, &yt)?;
                for i in 0..N {
                    yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
                }
                let k3 = self.call(x + C3 * h, &yt)?;
                for i in 0..N {
                    yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
                }
                let k4 = self.call(x + C4 * h, &yt)?;
                for i in 0..N {
                    yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
                }
                let k5 = self.call(x + C5 * h, &yt)?;
                for i in 0..N {
                    yt[i] = y[i]
                        + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
                }
                let k6 = self.call(x + h, &yt)?;
                let mut y1 = [0.0; N];
                for i in 0..N {
                    y1[i] = y[i]
                        + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
                }
                let k7 = self.call(x + h, &y1)?;
                Ok((y1, [k1, k2, k3, k4, k5, k6, k7]))
            })();

            let (y1, k) = match stages {
                Ok(v) => v,
                Err(_) => {
                    // singular or non-finite stage: retreat hard
                    self.stats.rejected += 1;
                    self.reject = true;
                    self.h *= 0.25;
                    continue;
                }
            };

            let mut err = 0.0;
            for i in 0..N {
                let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                let e = h
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                        + E7 * k[6][i]);
                err += (e / sc).powi(2);
            }
            err = (err / N as f64).sqrt();
            if !err.is_finite() {
                err = 1e10;
            }

            let fac11 = err.powf(EXPO1);
            if err <= 1.0 {
                // accepted
                self.facold = err.max(1e-4);
                let fac = (fac11 / self.facold.powf(BETA) / SAFE).clamp(FACC2, FACC1);
                let mut hnew = h / fac;
                if self.reject {
                    hnew = if posneg > 0.0 { hnew.min(h) } else { hnew.max(h) };
                }
                self.reject = false;

                let mut cont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k[0][i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k[6][i] - bspl;
                    cont[4][i] = h
                        * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i]
                            + D6 * k[5][i] + D7 * k[6][i]);
                }
                let seg = DenseSeg { x0: x, h, cont };

                self.stats.accepted += 1;
                self.k1 = k[6];
                self.x = x + h;
                self.y = y1;
                self.h = hnew;
                let done = last || (self.x - self.xend) * posneg >= 0.0;
                return Ok(StepOutcome { seg, done });
            }
            // rejected
            self.stats.rejected += 1;
            self.reject = true;
            self.h = h / (fac11 / SAFE).min(FACC1);
        }
    }
}
