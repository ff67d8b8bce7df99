//! Exact and semi-exact solution families.
//!
//! Three generators live here: Yablonskii-Vorob'ev polynomials (exact
//! integer arithmetic, with their roots), the rational and Airy-type
//! closed-form solutions of the second equation built on them, and the
//! Bessel-seeded discrete ladder for the radial complex sine-Gordon
//! family. Everything evaluates pointwise with analytic derivatives; the
//! only interpolation in the module is the stencil differentiation used
//! by the ladder residual report, where that is the point of the check.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::specialfn::{airy, bessel_mod};

// ---- exact integer polynomials ----

/// Dense polynomial with exact big-integer coefficients, ascending degree.
///
/// The zero polynomial is stored as a single zero coefficient; otherwise
/// the leading coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> IntPolynomial {
        let mut p = IntPolynomial { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().map(|c| c.is_zero()) == Some(true) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(BigInt::ZERO);
        }
    }

    pub fn one() -> IntPolynomial {
        IntPolynomial { coeffs: vec![BigInt::from(1)] }
    }

    /// The monomial z.
    pub fn z() -> IntPolynomial {
        IntPolynomial { coeffs: vec![BigInt::ZERO, BigInt::from(1)] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or(BigInt::ZERO)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::from_coeffs(vec![]);
        }
        let mut out = vec![BigInt::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::from_coeffs(out)
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - other.coeff(k));
        }
        IntPolynomial::from_coeffs(out)
    }

    pub fn scale(&self, m: i64) -> IntPolynomial {
        let m = BigInt::from(m);
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|c| c * &m).collect())
    }

    /// Multiplication by z.
    pub fn shift_up(&self) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(BigInt::ZERO);
        out.extend(self.coeffs.iter().cloned());
        IntPolynomial::from_coeffs(out)
    }

    pub fn derivative(&self) -> IntPolynomial {
        let out: Vec<BigInt> =
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
        IntPolynomial::from_coeffs(out)
    }

    /// Division that must leave no remainder. A nonzero remainder means the
    /// caller's algebra is broken, so it comes back as an internal error.
    pub fn exact_div(&self, div: &IntPolynomial) -> Result<IntPolynomial> {
        if div.is_zero() {
            return Err(Error::internal("exact_div: division by the zero polynomial"));
        }
        if self.is_zero() {
            return Ok(IntPolynomial::from_coeffs(vec![]));
        }
        if self.degree() < div.degree() {
            return Err(Error::internal("exact_div: quotient degree would be negative"));
        }
        let dn = div.degree();
        let lead = &div.coeffs[dn];
        let mut rem = self.coeffs.clone();
        let qdeg = self.degree() - dn;
        let mut q = vec![BigInt::ZERO; qdeg + 1];
        for k in (0..=qdeg).rev() {
            let top = rem[k + dn].clone();
            if top.is_zero() {
                continue;
            }
            if (&top % lead) != BigInt::ZERO {
                return Err(Error::internal("exact_div: non-integer quotient coefficient"));
            }
            let qk = &top / lead;
            for (j, d) in div.coeffs.iter().enumerate() {
                rem[k + j] -= &qk * d;
            }
            q[k] = qk;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::internal("exact_div: nonzero remainder"));
        }
        Ok(IntPolynomial::from_coeffs(q))
    }

    /// Lossy evaluation. Valid while the coefficients and the running
    /// Horner terms stay inside f64 range; callers in this module keep the
    /// degree low enough for that.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + big_to_f64(c))
    }
}

fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(if c.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// log2 |a| for nonzero a, exact to f64 rounding even when a overflows f64.
fn log2_abs(a: &BigInt) -> f64 {
    let bits = a.bits();
    if bits <= 53 {
        return big_to_f64(a).abs().log2();
    }
    let shift = (bits - 53) as usize;
    let top = (a.magnitude() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

// ---- Yablonskii-Vorob'ev polynomials ----

/// n-th Yablonskii-Vorob'ev polynomial, exact.
///
/// Built from Q_0 = 1, Q_1 = z by
/// Q_{n+1} Q_{n-1} = z Q_n^2 - 4 [Q_n Q_n'' - (Q_n')^2],
/// where the division by Q_{n-1} is exact at every step; a nonzero
/// remainder or a wrong degree aborts with an internal error. Degree is
/// n(n+1)/2. Guaranteed for n <= 40.
pub fn yv_poly(n: usize) -> Result<IntPolynomial> {
    if n > 40 {
        return Err(Error::domain(format!("yv_poly: n = {n} beyond the guaranteed range n <= 40")));
    }
    let mut prev = IntPolynomial::one();
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = IntPolynomial::z();
    for m in 1..n {
        let d1 = cur.derivative();
        let d2 = d1.derivative();
        let num = cur.mul(&cur).shift_up().sub(&cur.mul(&d2).sub(&d1.mul(&d1)).scale(4));
        let next = num.exact_div(&prev)?;
        if next.degree() != (m + 1) * (m + 2) / 2 {
            return Err(Error::internal(format!(
                "yv_poly: degree {} at index {} (expected {})",
                next.degree(),
                m + 1,
                (m + 1) * (m + 2) / 2
            )));
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

// ---- roots ----

/// All n(n+1)/2 roots of the n-th Yablonskii-Vorob'ev polynomial.
///
/// The polynomial only carries powers congruent to its degree mod 3, so it
/// factors as z^rho R(z^3). R gets balanced by the geometric mean of its
/// root magnitudes (computed in log space, since its integer coefficients
/// can exceed f64 range), solved by companion-matrix eigenvalues with a
/// Newton polish, and each u-root fans out into three cube roots. Output
/// is exactly conjugation-symmetric, sorted by (re, im). Each polished
/// root is certified by |R(v)| <= 1e-8 * (sum of |term| magnitudes); any
/// failures are reported together. Guaranteed for n <= 25.
pub fn yv_roots(n: usize) -> Result<Vec<Complex64>> {
    if n > 25 {
        return Err(Error::domain(format!("yv_roots: n = {n} beyond the guaranteed range n <= 25")));
    }
    let q = yv_poly(n)?;
    let d = q.degree();
    if d == 0 {
        return Ok(vec![]);
    }
    let rho = d % 3;
    for (k, c) in q.coeffs().iter().enumerate() {
        if !c.is_zero() && k % 3 != rho {
            return Err(Error::internal(format!(
                "yv_roots: coefficient at power {k} breaks the z^3 structure"
            )));
        }
    }
    let mut r: Vec<BigInt> = (0..=(d - rho) / 3).map(|j| q.coeff(rho + 3 * j)).collect();
    let mut origin_mult = rho;
    while r.first().map(|c| c.is_zero()) == Some(true) {
        r.remove(0);
        origin_mult += 3;
    }
    let m = r.len() - 1;
    let mut roots: Vec<Complex64> = (0..origin_mult).map(|_| Complex64::new(0.0, 0.0)).collect();
    if m > 0 {
        // balance u = s v so the v-roots sit near unit magnitude
        let s_log2 = (log2_abs(&r[0]) - log2_abs(&r[m])) / m as f64;
        let lead_log2 = log2_abs(&r[m]);
        let lead_neg = r[m].is_negative();
        let chat: Vec<f64> = r
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.is_zero() {
                    return 0.0;
                }
                let mag = (log2_abs(c) - lead_log2 + (k as f64 - m as f64) * s_log2).exp2();
                if c.is_negative() != lead_neg { -mag } else { mag }
            })
            .collect();
        let mut comp = nalgebra::DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            comp[(k, m - 1)] = -chat[k];
            if k + 1 < m {
                comp[(k + 1, k)] = 1.0;
            }
        }
        balance_in_place(&mut comp);
        let eig = comp.complex_eigenvalues();
        let mut bad = Vec::new();
        let mut polished = Vec::with_capacity(m);
        for (idx, &e) in eig.iter().enumerate() {
            let mut v = Complex64::new(e.re, e.im);
            for _ in 0..30 {
                let (p, dp) = horner_c(&chat, v);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                v -= step;
                if step.norm() <= 1e-15 * v.norm().max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            let (p, _) = horner_c(&chat, v);
            let scale: f64 =
                chat.iter().enumerate().map(|(k, c)| c.abs() * v.norm().powi(k as i32)).sum();
            if p.norm() > 1e-8 * scale {
                bad.push((idx, v, p.norm() / scale));
            }
            polished.push(v);
        }
        if !bad.is_empty() {
            return Err(Error::numerical(format!(
                "yv_roots({n}): {} eigenvalues failed the residual certificate, first {:?}",
                bad.len(),
                bad[0]
            )));
        }
        // the roots are provably simple, so two Newton iterations landing
        // on the same point means an eigenvalue start was lost
        for i in 0..polished.len() {
            for j in 0..i {
                if (polished[i] - polished[j]).norm() < 1e-10 * (1.0 + polished[i].norm()) {
                    return Err(Error::numerical(format!(
                        "yv_roots({n}): two root candidates collapsed near {}",
                        polished[i]
                    )));
                }
            }
        }
        let s = s_log2.exp2();
        for v in polished {
            // keep one representative per conjugate pair, rebuild the pair
            // (and the cube-root triples) in exactly symmetric form
            if v.im > 1e-10 * (1.0 + v.norm()) {
                let u = v * s;
                let t = u.norm().cbrt();
                let th = u.arg() / 3.0;
                for dk in [0.0, 1.0, -1.0] {
                    let ang = th + dk * 2.0 * std::f64::consts::PI / 3.0;
                    let z = Complex64::new(t * ang.cos(), t * ang.sin());
                    roots.push(z);
                    roots.push(z.conj());
                }
            } else if v.im.abs() <= 1e-10 * (1.0 + v.norm()) {
                let u = v.re * s;
                let t = u.abs().cbrt() * u.signum();
                roots.push(Complex64::new(t, 0.0));
                let half = t.abs() * 0.5;
                let imag = t.abs() * 3f64.sqrt() * 0.5;
                let re = if u >= 0.0 { -half } else { half };
                roots.push(Complex64::new(re, imag));
                roots.push(Complex64::new(re, -imag));
            }
        }
    }
    if roots.len() != d {
        return Err(Error::internal(format!(
            "yv_roots({n}): produced {} roots for degree {d}",
            roots.len()
        )));
    }
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots)
}

/// Osborne balancing (the classic radix-2 similarity scaling): equalizes
/// row and column norms so the eigensolver, which does not balance
/// internally, keeps accuracy when the companion entries span many orders
/// of magnitude. Eigenvalues are unchanged.
fn balance_in_place(a: &mut nalgebra::DMatrix<f64>) {
    let m = a.nrows();
    loop {
        let mut converged = true;
        for i in 0..m {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..m {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c >= g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                let inv = 1.0 / f;
                for j in 0..m {
                    a[(i, j)] *= inv;
                }
                for j in 0..m {
                    a[(j, i)] *= f;
                }
                converged = false;
            }
        }
        if converged {
            return;
        }
    }
}

fn horner_c(coeffs: &[f64], v: Complex64) -> (Complex64, Complex64) {
    // coeffs holds the scaled polynomial ascending, leading slot exactly 1
    let mut p = Complex64::new(coeffs[coeffs.len() - 1], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs[..coeffs.len() - 1].iter().rev() {
        dp = dp * v + p;
        p = p * v + c;
    }
    (p, dp)
}

/// Root table as CSV with columns re, im, n (one block per call, the n
/// column is constant so tables for several n concatenate cleanly).
pub fn yv_roots_csv(n: usize) -> Result<String> {
    let roots = yv_roots(n)?;
    let mut out = String::from("re,im,n\n");
    for z in roots {
        out.push_str(&format!("{:.16e},{:.16e},{n}\n", z.re, z.im));
    }
    Ok(out)
}

// ---- rational solutions of the second equation ----

/// Closed-form rational solution w(z) = d/dz ln(Q_{n-1}/Q_n) of the second
/// equation with alpha = n, reflected through w -> -w for negative n.
pub struct RationalSolution {
    /// Numerator-side and denominator-side polynomial derivative stacks,
    /// each [P, P', P'', P''', P''''] as f64 coefficients.
    num: [Vec<f64>; 5],
    den: [Vec<f64>; 5],
    flip: bool,
    alpha: f64,
}

const RATIONAL_N_MAX: i64 = 16;

/// Rational solution of the second equation for integer alpha = n.
///
/// n = 0 yields the zero solution. Guaranteed for |n| <= 16; beyond that
/// the f64 image of the exact coefficients would start to lose the
/// evaluation accuracy the residual contract promises.
pub fn rational_p2(n: i64) -> Result<RationalSolution> {
    if n.abs() > RATIONAL_N_MAX {
        return Err(Error::domain(format!(
            "rational_p2: |n| = {} beyond the guaranteed range {RATIONAL_N_MAX}",
            n.abs()
        )));
    }
    let k = n.unsigned_abs() as usize;
    let (num, den) = if k == 0 {
        (yv_poly(0)?, yv_poly(0)?)
    } else {
        (yv_poly(k - 1)?, yv_poly(k)?)
    };
    let sol = RationalSolution {
        num: deriv_stack(&num),
        den: deriv_stack(&den),
        flip: n < 0,
        alpha: n as f64,
    };
    if sol
        .num
        .iter()
        .chain(sol.den.iter())
        .any(|v| v.iter().any(|c| !c.is_finite()))
    {
        return Err(Error::domain(format!(
            "rational_p2: coefficients at n = {n} overflow double precision"
        )));
    }
    Ok(sol)
}

fn deriv_stack(p: &IntPolynomial) -> [Vec<f64>; 5] {
    let mut cur = p.clone();
    let mut out: [Vec<f64>; 5] = Default::default();
    for slot in out.iter_mut() {
        *slot = cur.coeffs().iter().map(big_to_f64).collect();
        cur = cur.derivative();
    }
    out
}

/// Jet [L, L', L'', L'''] of the logarithmic derivative L = P'/P.
fn logderiv_jet(stack: &[Vec<f64>; 5], z: f64) -> Result<[f64; 4]> {
    let mut vals = [0.0; 5];
    for (v, coeffs) in vals.iter_mut().zip(stack.iter()) {
        *v = coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c);
    }
    let scale: f64 = stack[0]
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * z.abs().powi(k as i32))
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    if vals[0].abs() < 1e-13 * scale {
        return Err(Error::singular(format!("logarithmic derivative at a polynomial zero, z = {z}")));
    }
    let l = vals[1] / vals[0];
    let b = vals[2] / vals[0];
    let a = vals[3] / vals[0];
    let f = vals[4] / vals[0];
    Ok([
        l,
        b - l * l,
        a - 3.0 * l * b + 2.0 * l * l * l,
        f - 4.0 * l * a - 3.0 * b * b + 12.0 * l * l * b - 6.0 * l.powi(4),
    ])
}

impl RationalSolution {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// w and its first three derivatives.
    pub fn jet3(&self, z: f64) -> Result<[f64; 4]> {
        if self.alpha == 0.0 {
            return Ok([0.0; 4]);
        }
        let jn = logderiv_jet(&self.num, z)?;
        let jd = logderiv_jet(&self.den, z)?;
        let sgn = if self.flip { -1.0 } else { 1.0 };
        let mut out = [0.0; 4];
        for ((o, a), b) in out.iter_mut().zip(jn).zip(jd) {
            *o = sgn * (a - b);
        }
        Ok(out)
    }

    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        let j = self.jet3(z)?;
        Ok((j[0], j[1]))
    }
}

// ---- Airy-type solutions of the second equation ----

/// Closed-form solution of the second equation with alpha = n - 1/2,
/// n in {1, 2}, built on phi(z) = cos(theta) Ai(zeta) + sin(theta) Bi(zeta)
/// with zeta = -z / 2^(1/3), so that phi'' = -(z/2) phi.
///
/// n = 1 is w = -phi'/phi, which closes the Riccati relation
/// w' = w^2 + z/2 exactly. n = 2 stacks the standard alpha -> alpha + 1
/// step on top: w_2 = -w_1 - 1/(2 w_1^2 + z), whose denominator is
/// -2 W(phi, phi')/phi^2, so its evaluation fails exactly at the zeros of
/// the second Wronskian.
pub struct AirySolution {
    theta: f64,
    n: u8,
}

pub fn airy_p2(theta: f64, n: u8) -> Result<AirySolution> {
    if !(n == 1 || n == 2) {
        return Err(Error::parameter(format!("airy_p2: n must be 1 or 2, got {n}")));
    }
    if !theta.is_finite() {
        return Err(Error::parameter("airy_p2: theta must be finite"));
    }
    Ok(AirySolution { theta, n })
}

impl AirySolution {
    pub fn alpha(&self) -> f64 {
        self.n as f64 - 0.5
    }

    /// w and its first three derivatives. The derivatives use the closed
    /// Riccati chain, so the only primitive evaluations are Ai, Bi, and
    /// their first derivatives at the scaled argument.
    pub fn jet3(&self, z: f64) -> Result<[f64; 4]> {
        let scale = 0.5f64.cbrt(); // 2^(-1/3)
        let zeta = -scale * z;
        let a = airy(zeta)?;
        let (c, s) = (self.theta.cos(), self.theta.sin());
        let phi = c * a.ai + s * a.bi;
        let dphi = -scale * (c * a.ai_deriv + s * a.bi_deriv);
        let mag = (c * a.ai).abs() + (s * a.bi).abs();
        if phi.abs() < 1e-13 * mag {
            return Err(Error::singular(format!("airy-type solution at a zero of phi, z = {z}")));
        }
        let u = -dphi / phi;
        let du = u * u + 0.5 * z;
        let d2u = 2.0 * u * du + 0.5;
        let d3u = 2.0 * du * du + 2.0 * u * d2u;
        if self.n == 1 {
            return Ok([u, du, d2u, d3u]);
        }
        let den = 2.0 * u * u + z;
        if den.abs() < 1e-13 * (2.0 * u * u + z.abs() + 1.0) {
            return Err(Error::singular(format!(
                "airy-type solution at a zero of the second wronskian, z = {z}"
            )));
        }
        let dd = 4.0 * u * du + 1.0;
        let d2d = 4.0 * du * du + 4.0 * u * d2u;
        let d3d = 12.0 * du * d2u + 4.0 * u * d3u;
        let g = 1.0 / den;
        let dg = -dd * g * g;
        let d2g = -d2d * g * g + 2.0 * dd * dd * g.powi(3);
        let d3g = -d3d * g * g + 6.0 * dd * d2d * g.powi(3) - 6.0 * dd.powi(3) * g.powi(4);
        Ok([-u - g, -du - dg, -d2u - d2g, -d3u - d3g])
    }

    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        let j = self.jet3(z)?;
        Ok((j[0], j[1]))
    }
}

// ---- the discrete ladder for the radial complex sine-Gordon family ----

/// Ladder values phi_0 .. phi_n_max over a radial grid.
#[derive(Clone, Debug)]
pub struct LadderState {
    pub n_max: usize,
    pub r_grid: Vec<f64>,
    /// phi[n][i] is the n-th function at r_grid[i].
    pub phi: Vec<Vec<f64>>,
}

/// Residual maxima from [`ladder_verify`], taken over interior grid
/// points (full differentiation stencils) and every level they apply to.
#[derive(Clone, Copy, Debug)]
pub struct LadderReport {
    /// phi_n' + (n/r) phi_n - (1 - phi_n^2) phi_{n-1}, levels n >= 1.
    pub coupling_down_max: f64,
    /// phi_n' - (n/r) phi_n + (1 - phi_n^2) phi_{n+1}, levels n < n_max.
    pub coupling_up_max: f64,
    /// The single-function second-order radial equation, levels n >= 1.
    pub ode_max: f64,
}

fn ladder_seed(c1: f64, c2: f64, r: f64) -> Result<f64> {
    let b = bessel_mod(r)?;
    let den = c1 * b.i0 + c2 * b.k0;
    if den.abs() < 1e-14 * ((c1 * b.i0).abs() + (c2 * b.k0).abs()).max(f64::MIN_POSITIVE) {
        return Err(Error::singular(format!("ladder seed denominator vanishes at r = {r}")));
    }
    Ok((c1 * b.i1 - c2 * b.k1) / den)
}

/// Seed level of the ladder and its derivative: phi_1 from the modified
/// Bessel combination, phi_1' from the Riccati relation
/// phi_1' = 1 - phi_1^2 - phi_1/r that the Bessel derivative identities
/// collapse to.
pub fn ladder_seed_jet(c1: f64, c2: f64, r: f64) -> Result<(f64, f64)> {
    let p1 = ladder_seed(c1, c2, r)?;
    Ok((p1, 1.0 - p1 * p1 - p1 / r))
}

fn ladder_climb(c1: f64, c2: f64, n_max: usize, r: f64) -> Result<Vec<f64>> {
    let mut phi = Vec::with_capacity(n_max + 1);
    phi.push(1.0);
    if n_max == 0 {
        return Ok(phi);
    }
    phi.push(ladder_seed(c1, c2, r)?);
    for n in 1..n_max {
        let p = phi[n];
        let den = 1.0 - p * p;
        if den.abs() < 1e-12 {
            return Err(Error::singular(format!(
                "ladder recurrence degenerate at level n = {n}, r = {r}: |1 - phi^2| = {:.3e}",
                den.abs()
            )));
        }
        let next = (2.0 * n as f64 / r) * p / den - phi[n - 1];
        phi.push(next);
    }
    Ok(phi)
}

/// Ladder family phi_0 = 1, phi_1 = (C1 I1 - C2 K1)/(C1 I0 + C2 K0),
/// phi_{n+1} = (2n/r) phi_n/(1 - phi_n^2) - phi_{n-1} over a grid.
///
/// Stops with a singularity error when the recurrence denominator drops
/// below 1e-12 at some (n, r).
pub fn dp2_ladder(n_max: usize, c1: f64, c2: f64, r_grid: &[f64]) -> Result<LadderState> {
    if r_grid.is_empty() {
        return Err(Error::parameter("dp2_ladder: empty grid"));
    }
    if r_grid.iter().any(|&r| !r.is_finite() || r <= 0.0) {
        return Err(Error::parameter("dp2_ladder: grid must be positive and finite"));
    }
    let mut phi = vec![Vec::with_capacity(r_grid.len()); n_max + 1];
    for &r in r_grid {
        let col = ladder_climb(c1, c2, n_max, r)?;
        for (row, v) in phi.iter_mut().zip(col) {
            row.push(v);
        }
    }
    Ok(LadderState { n_max, r_grid: r_grid.to_vec(), phi })
}

/// Values and first two derivatives of the adjacent pair
/// (phi_n, phi_{n+1}) at one radius, with the derivatives taken from the
/// two coupled first-order relations rather than any differencing:
/// a' = (n/r) a - (1 - a^2) b and b' = -((n+1)/r) b + (1 - b^2) a,
/// differentiated once more for the second derivatives.
pub fn ladder_pair_jets(c1: f64, c2: f64, n: usize, r: f64) -> Result<([f64; 3], [f64; 3])> {
    let phi = ladder_climb(c1, c2, n + 1, r)?;
    let (a, b) = (phi[n], phi[n + 1]);
    let nf = n as f64;
    let da = nf / r * a - (1.0 - a * a) * b;
    let db = -(nf + 1.0) / r * b + (1.0 - b * b) * a;
    let d2a = nf / r * da - nf / (r * r) * a + 2.0 * a * da * b - (1.0 - a * a) * db;
    let d2b =
        -(nf + 1.0) / r * db + (nf + 1.0) / (r * r) * b - 2.0 * b * db * a + (1.0 - b * b) * da;
    Ok(([a, da, d2a], [b, db, d2b]))
}

/// Residual of the single-function radial equation
/// phi'' + phi'/r + phi/(1 - phi^2) [phi'^2 - n^2/r^2] + phi (1 - phi^2)
/// at one point. Meaningless where |phi| is within roundoff of 1; callers
/// guard that themselves.
pub fn csg_residual(n: f64, r: f64, phi: f64, dphi: f64, d2phi: f64) -> f64 {
    let om = 1.0 - phi * phi;
    d2phi + dphi / r + phi / om * (dphi * dphi - n * n / (r * r)) + phi * om
}

/// Finite-difference weights for derivative orders 0..=2 at x0 from
/// arbitrary nodes (Fornberg's recursion). weights[j][m] multiplies the
/// value at nodes[j] in the order-m derivative.
fn stencil_weights(nodes: &[f64], x0: f64) -> Vec<[f64; 3]> {
    let k = nodes.len();
    let mut c = vec![[0.0f64; 3]; k];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..k {
        let mn = i.min(2);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for s in (1..=mn).rev() {
                    c[i][s] = c1 * (s as f64 * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for s in (1..=mn).rev() {
                c[j][s] = (c4 * c[j][s] - s as f64 * c[j][s - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// Checks a ladder state against the two coupled first-order relations and
/// the single-function second-order equation, differentiating the stored
/// values through degree-5 stencils (six nearest nodes). Residuals are
/// taken at interior nodes only, so the report reflects the equations and
/// not one-sided differentiation error; points where |1 - phi^2| < 1e-6
/// are skipped in the second-order check.
pub fn ladder_verify(state: &LadderState) -> Result<LadderReport> {
    let len = state.r_grid.len();
    if len < 8 {
        return Err(Error::parameter("ladder_verify: need at least 8 grid points"));
    }
    if state.r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::parameter("ladder_verify: grid must be strictly increasing"));
    }
    if state.phi.len() != state.n_max + 1 || state.phi.iter().any(|row| row.len() != len) {
        return Err(Error::parameter("ladder_verify: state shape is inconsistent"));
    }
    let mut down_max = 0.0f64;
    let mut up_max = 0.0f64;
    let mut ode_max = 0.0f64;
    for i in 2..len - 3 {
        let lo = i - 2;
        let nodes = &state.r_grid[lo..lo + 6];
        let wts = stencil_weights(nodes, state.r_grid[i]);
        let r = state.r_grid[i];
        for (n, row) in state.phi.iter().enumerate() {
            let mut d = [0.0f64; 3];
            for (w, &v) in wts.iter().zip(&row[lo..lo + 6]) {
                d[0] += w[0] * v;
                d[1] += w[1] * v;
                d[2] += w[2] * v;
            }
            let (phi, dphi, d2phi) = (d[0], d[1], d[2]);
            let nf = n as f64;
            if n >= 1 {
                let below = state.phi[n - 1][i];
                down_max =
                    down_max.max((dphi + nf / r * phi - (1.0 - phi * phi) * below).abs());
                if (1.0 - phi * phi).abs() >= 1e-6 {
                    ode_max = ode_max.max(csg_residual(nf, r, phi, dphi, d2phi).abs());
                }
            }
            if n < state.n_max {
                let above = state.phi[n + 1][i];
                up_max = up_max.max((dphi - nf / r * phi + (1.0 - phi * phi) * above).abs());
            }
        }
    }
    Ok(LadderReport { coupling_down_max: down_max, coupling_up_max: up_max, ode_max })
}

#[cfg(test)]
// Reference values keep every digit of the sources they were computed from.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::equations::{residual, EquationId, ParamSet};

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn low_order_polynomials_exact() {
        assert_eq!(yv_poly(0).unwrap().coeffs(), &[big(1)]);
        assert_eq!(yv_poly(1).unwrap().coeffs(), &[big(0), big(1)]);
        // z^3 + 4
        assert_eq!(yv_poly(2).unwrap().coeffs(), &[big(4), big(0), big(0), big(1)]);
        // z^6 + 20 z^3 - 80
        let q3 = yv_poly(3).unwrap();
        assert_eq!(q3.degree(), 6);
        assert_eq!(q3.coeff(0), big(-80));
        assert_eq!(q3.coeff(3), big(20));
        assert_eq!(q3.coeff(6), big(1));
        assert_eq!(q3.coeff(1), big(0));
        // z^10 + 60 z^7 + 11200 z, worked through the recurrence by hand
        let q4 = yv_poly(4).unwrap();
        assert_eq!(q4.degree(), 10);
        assert_eq!(q4.coeff(10), big(1));
        assert_eq!(q4.coeff(7), big(60));
        assert_eq!(q4.coeff(1), big(11200));
        assert_eq!(q4.coeff(0), big(0));
        assert_eq!(q4.coeff(4), big(0));
    }

    #[test]
    fn degrees_and_exact_division_through_n_25() {
        for n in 0..=25usize {
            let q = yv_poly(n).unwrap();
            assert_eq!(q.degree(), n * (n + 1) / 2, "degree law fails at n = {n}");
        }
        assert!(yv_poly(41).is_err());
    }

    #[test]
    fn top_of_guaranteed_range_builds() {
        let q = yv_poly(40).unwrap();
        assert_eq!(q.degree(), 820);
    }

    #[test]
    fn exact_division_rejects_non_divisors() {
        let num = yv_poly(2).unwrap(); // z^3 + 4
        let div = IntPolynomial::from_coeffs(vec![big(1), big(1)]); // z + 1
        assert!(matches!(num.exact_div(&div), Err(Error::Internal(_))));
    }

    #[test]
    fn roots_of_the_cubic_level() {
        // z^3 = -4: one real root and a conjugate pair
        let roots = yv_roots(2).unwrap();
        assert_eq!(roots.len(), 3);
        let t = 4f64.powf(1.0 / 3.0);
        let expect = [
            Complex64::new(-t, 0.0),
            Complex64::new(t * 0.5, t * 3f64.sqrt() * 0.5),
            Complex64::new(t * 0.5, -t * 3f64.sqrt() * 0.5),
        ];
        for e in expect {
            assert!(
                roots.iter().any(|z| (z - e).norm() < 1e-12),
                "missing root {e} in {roots:?}"
            );
        }
    }

    #[test]
    fn root_counts_pairing_and_certificates() {
        for n in [1usize, 5, 8, 12, 25] {
            let roots = yv_roots(n).unwrap();
            assert_eq!(roots.len(), n * (n + 1) / 2, "count at n = {n}");
            // exact conjugation symmetry
            for z in &roots {
                assert!(
                    roots.iter().any(|w| w.re == z.re && w.im == -z.im),
                    "conjugate of {z} missing at n = {n}"
                );
            }
        }
        // spot-check the certificate against the original polynomial where
        // plain f64 evaluation is still safe
        for n in [5usize, 8, 10] {
            let q = yv_poly(n).unwrap();
            let coeffs: Vec<f64> = q.coeffs().iter().map(big_to_f64).collect();
            for z in yv_roots(n).unwrap() {
                let mut p = Complex64::new(0.0, 0.0);
                let mut scale = 0.0;
                for &c in coeffs.iter().rev() {
                    p = p * z + c;
                    scale = scale * z.norm() + c.abs();
                }
                assert!(p.norm() <= 1e-8 * scale, "residual {} at n = {n}, z = {z}", p.norm());
            }
        }
        // empirical observation, reported rather than asserted
        for n in 1..=10usize {
            for z in yv_roots(n).unwrap() {
                if z.im == 0.0 && z.re > 0.0 {
                    eprintln!("note: positive real-axis root {z} at n = {n}");
                }
            }
        }
    }

    #[test]
    fn csv_export_shape() {
        let csv = yv_roots_csv(5).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,n");
        assert_eq!(lines.len(), 1 + 15);
        assert!(lines[1].ends_with(",5"));
    }

    #[test]
    fn rational_low_orders_match_closed_forms() {
        // n = 1: w = -1/z
        let w1 = rational_p2(1).unwrap();
        for z in [0.3, 1.0, -2.5] {
            let j = w1.jet3(z).unwrap();
            assert!((j[0] + 1.0 / z).abs() < 1e-14 * (1.0 / z.abs()).max(1.0));
            assert!((j[1] - 1.0 / (z * z)).abs() < 1e-13 / (z * z));
        }
        // reflection: w(z; -n) = -w(z; n)
        let w3 = rational_p2(3).unwrap();
        let w3m = rational_p2(-3).unwrap();
        for z in [0.7, 1.9, -1.1] {
            let a = w3.jet3(z).unwrap();
            let b = w3m.jet3(z).unwrap();
            for (x, y) in a.iter().zip(b) {
                assert!((x + y).abs() < 1e-12 * (1.0 + x.abs()));
            }
        }
        // reference point computed at high precision
        let j = w3.jet3(1.234).unwrap();
        assert!((j[0] - 3.5680072862491905946).abs() < 1e-12);
        // n = 0 is the zero solution
        assert_eq!(rational_p2(0).unwrap().jet3(0.5).unwrap(), [0.0; 4]);
    }

    #[test]
    fn rational_jets_differentiate_consistently() {
        let w = rational_p2(4).unwrap();
        let h = 1e-4;
        for z in [0.9, 2.1, -1.7] {
            let j = w.jet3(z).unwrap();
            let jp = w.jet3(z + h).unwrap();
            let jm = w.jet3(z - h).unwrap();
            for k in 0..3 {
                let fd = (jp[k] - jm[k]) / (2.0 * h);
                let scale = 1.0 + j[k + 1].abs();
                assert!(
                    (fd - j[k + 1]).abs() < 1e-6 * scale,
                    "derivative order {} at z = {z}: {fd} vs {}",
                    k + 1,
                    j[k + 1]
                );
            }
        }
    }

    #[test]
    fn rational_residuals_vanish_off_poles() {
        for n in 1..=10i64 {
            let sol = rational_p2(n).unwrap();
            let p = ParamSet::with_alpha(n as f64);
            let mut checked = 0;
            for i in 0..200 {
                let z = -6.0 + 12.0 * (i as f64 + 0.5) / 200.0;
                let Ok(j) = sol.jet3(z) else { continue };
                if j[0].abs() > 1e3 {
                    continue;
                }
                let r = residual(EquationId::PII, &p, z, j[0], j[1], j[2]).unwrap();
                let scale = 1.0 + 2.0 * j[0].abs().powi(3) + (z * j[0]).abs() + n.unsigned_abs() as f64;
                assert!(r.abs() <= 1e-9 * scale, "n = {n}, z = {z}: residual {r}");
                checked += 1;
            }
            assert!(checked > 150, "n = {n}: only {checked} usable grid points");
        }
    }

    #[test]
    fn airy_type_reference_points() {
        let cases = [
            // (theta, z, w for n = 1, w for n = 2)
            (
                std::f64::consts::FRAC_PI_4,
                0.7,
                0.30921277902809850236,
                -1.4312637809016987685,
            ),
            (0.3, -1.3, 0.22550645240649848091, 0.60901351278972670288),
            (0.0, 2.0, 0.67550860987837375153, -1.0188416597375367914),
        ];
        for (theta, z, w1, w2) in cases {
            let s1 = airy_p2(theta, 1).unwrap();
            let s2 = airy_p2(theta, 2).unwrap();
            assert!((s1.eval(z).unwrap().0 - w1).abs() < 1e-12, "n=1 at ({theta}, {z})");
            assert!((s2.eval(z).unwrap().0 - w2).abs() < 1e-11, "n=2 at ({theta}, {z})");
        }
        assert!(airy_p2(0.0, 3).is_err());
    }

    #[test]
    fn airy_type_derivative_is_a_true_derivative() {
        // Richardson quotient of w itself against the Riccati value; this
        // checks the whole chain through the scaled Airy argument, not the
        // identity used to produce the jet.
        let sol = airy_p2(0.25, 1).unwrap();
        for z in [-1.0, 0.4, 1.6] {
            let w = sol.eval(z).unwrap().0;
            let h = 1e-5;
            let wp = sol.eval(z + h).unwrap().0;
            let wm = sol.eval(z - h).unwrap().0;
            let f2 = (wp - wm) / (2.0 * h);
            let wp2 = sol.eval(z + 2.0 * h).unwrap().0;
            let wm2 = sol.eval(z - 2.0 * h).unwrap().0;
            let f4 = (8.0 * (wp - wm) - (wp2 - wm2)) / (12.0 * h);
            let riccati = w * w + 0.5 * z;
            assert!((f4 - riccati).abs() < 5e-9 * (1.0 + riccati.abs()), "z = {z}");
            assert!((f2 - riccati).abs() < 1e-6 * (1.0 + riccati.abs()));
        }
    }

    #[test]
    fn airy_type_residuals_both_levels() {
        for (n, tol) in [(1u8, 1e-10), (2u8, 1e-8)] {
            for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_2] {
                let sol = airy_p2(theta, n).unwrap();
                let p = ParamSet::with_alpha(sol.alpha());
                let mut checked = 0;
                for i in 0..160 {
                    let z = -4.0 + 8.0 * (i as f64 + 0.5) / 160.0;
                    let Ok(j) = sol.jet3(z) else { continue };
                    if j[0].abs() > 50.0 {
                        continue;
                    }
                    let r = residual(EquationId::PII, &p, z, j[0], j[1], j[2]).unwrap();
                    let scale = 1.0 + 2.0 * j[0].abs().powi(3) + (z * j[0]).abs();
                    assert!(r.abs() <= tol * scale, "n = {n}, theta = {theta}, z = {z}: {r}");
                    checked += 1;
                }
                assert!(checked > 120);
            }
        }
    }

    #[test]
    fn ladder_reference_column() {
        let grid = [2.0];
        let st = dp2_ladder(4, 1.0, 0.3, &grid).unwrap();
        assert_eq!(st.phi[0][0], 1.0);
        assert!((st.phi[1][0] - 0.6693353955297019486).abs() < 1e-13);
        assert!((st.phi[2][0] - 0.21258580765183777639).abs() < 1e-12);
        assert!((st.phi[3][0] + 0.22403965186507037612).abs() < 1e-11);
        assert!((st.phi[4][0] + 0.92022377764824341851).abs() < 1e-10);
        let (p1, dp1) = ladder_seed_jet(1.0, 0.3, 2.0).unwrap();
        assert!((p1 - st.phi[1][0]).abs() < 1e-15);
        assert!((dp1 - 0.21732243052624647443).abs() < 1e-13);
    }

    #[test]
    fn pure_growing_seed_is_a_bessel_ratio() {
        let b = bessel_mod(3.1).unwrap();
        let st = dp2_ladder(1, 2.0, 0.0, &[3.1]).unwrap();
        assert!((st.phi[1][0] - b.i1 / b.i0).abs() < 1e-14);
    }

    #[test]
    fn recurrence_degeneracy_is_reported() {
        // pick c2 so that phi_1(2) = 1 to rounding, then the n = 1 -> 2
        // step divides by 1 - phi_1^2
        let b = bessel_mod(2.0).unwrap();
        let c2 = (b.i1 - b.i0) / (b.k0 + b.k1);
        let err = dp2_ladder(3, 1.0, c2, &[2.0]).unwrap_err();
        match err {
            Error::Singular(msg) => {
                assert!(msg.contains("n = 1"), "message: {msg}");
            }
            other => panic!("expected a singularity error, got {other:?}"),
        }
        assert!(dp2_ladder(2, 1.0, 0.5, &[]).is_err());
        assert!(dp2_ladder(2, 1.0, 0.5, &[-1.0]).is_err());
    }

    #[test]
    fn seed_satisfies_the_radial_equation_analytically() {
        // Closing phi_1'' through the Riccati relation makes the radial
        // equation an algebraic identity in phi_1, so the residual here
        // pins the jet algebra down to rounding; the Bessel values
        // themselves are pinned by the reference-column test.
        for i in 0..40 {
            let r = 0.8 + 7.0 * i as f64 / 39.0;
            let (p, dp) = ladder_seed_jet(1.0, 0.3, r).unwrap();
            let d2p = -2.0 * p * dp - dp / r + p / (r * r);
            let res = csg_residual(1.0, r, p, dp, d2p);
            assert!(res.abs() < 1e-9, "r = {r}: residual {res}");
        }
    }

    #[test]
    fn pair_jets_match_stencil_derivatives() {
        let (c1, c2) = (1.0, 0.3);
        for n in [1usize, 2, 3] {
            for r in [1.5, 2.5, 4.0] {
                let (a, b) = ladder_pair_jets(c1, c2, n, r).unwrap();
                let h = 1e-4;
                let va: Vec<f64> = (-2..=2)
                    .map(|k| ladder_pair_jets(c1, c2, n, r + k as f64 * h).unwrap().0[0])
                    .collect();
                let vb: Vec<f64> = (-2..=2)
                    .map(|k| ladder_pair_jets(c1, c2, n, r + k as f64 * h).unwrap().1[0])
                    .collect();
                let fd = |v: &[f64]| {
                    (
                        (8.0 * (v[3] - v[1]) - (v[4] - v[0])) / (12.0 * h),
                        (-(v[4] + v[0]) + 16.0 * (v[3] + v[1]) - 30.0 * v[2]) / (12.0 * h * h),
                    )
                };
                let (da, d2a) = fd(&va);
                let (db, d2b) = fd(&vb);
                assert!((da - a[1]).abs() < 1e-8 * (1.0 + a[1].abs()), "n={n} r={r}");
                assert!((db - b[1]).abs() < 1e-8 * (1.0 + b[1].abs()));
                assert!((d2a - a[2]).abs() < 1e-5 * (1.0 + a[2].abs()));
                assert!((d2b - b[2]).abs() < 1e-5 * (1.0 + b[2].abs()));
            }
        }
    }

    #[test]
    fn adjacent_ratio_solves_the_third_equation() {
        // w = phi_{n+1}/phi_n with exact jets lands on the scale-reduced
        // third equation (gamma = 1, delta = -1 built in) with
        // alpha = -2n, beta = 2n + 2
        for n in 1..=4usize {
            let p = ParamSet::ab(-2.0 * n as f64, 2.0 * n as f64 + 2.0);
            let mut checked = 0;
            for i in 0..100 {
                let r = 1.0 + 5.0 * (i as f64 + 0.5) / 100.0;
                let Ok((a, b)) = ladder_pair_jets(1.0, 0.3, n, r) else { continue };
                if a[0].abs() < 1e-3 || b[0].abs() > 1e3 {
                    continue;
                }
                let w = b[0] / a[0];
                let dw = (b[1] * a[0] - b[0] * a[1]) / (a[0] * a[0]);
                let d2w = b[2] / a[0] - 2.0 * b[1] * a[1] / (a[0] * a[0]) - b[0] * a[2] / (a[0] * a[0])
                    + 2.0 * b[0] * a[1] * a[1] / (a[0] * a[0] * a[0]);
                let res = residual(EquationId::PIII6, &p, r, w, dw, d2w).unwrap();
                let scale = 1.0 + w.abs().powi(3) + dw.abs().powi(2) / w.abs().max(1e-3);
                assert!(res.abs() <= 1e-6 * scale, "n = {n}, r = {r}: residual {res}");
                checked += 1;
            }
            assert!(checked > 60, "n = {n}: only {checked} points");
        }
    }

    #[test]
    fn stencil_weights_differentiate_polynomials_and_sin() {
        // degree-5 exactness
        let nodes = [0.0, 0.13, 0.29, 0.41, 0.56, 0.7];
        let x0 = 0.37;
        let w = stencil_weights(&nodes, x0);
        for pow in 0..=5usize {
            let (mut v0, mut v1, mut v2) = (0.0, 0.0, 0.0);
            for (wj, &x) in w.iter().zip(&nodes) {
                let f = x.powi(pow as i32);
                v0 += wj[0] * f;
                v1 += wj[1] * f;
                v2 += wj[2] * f;
            }
            let p = pow as f64;
            assert!((v0 - x0.powi(pow as i32)).abs() < 1e-12);
            let d1 = if pow == 0 { 0.0 } else { p * x0.powi(pow as i32 - 1) };
            let d2 = if pow <= 1 { 0.0 } else { p * (p - 1.0) * x0.powi(pow as i32 - 2) };
            assert!((v1 - d1).abs() < 1e-11, "pow {pow}");
            assert!((v2 - d2).abs() < 1e-10, "pow {pow}");
        }
        // smooth non-polynomial target, differentiated at a node as the
        // ladder check does; truncation there is h^5 f6/60 for the first
        // derivative and h^4 f6/90 for the second (h = 0.05)
        let nodes: Vec<f64> = (0..6).map(|i| 1.0 + 0.05 * i as f64).collect();
        let x0 = nodes[2];
        let w = stencil_weights(&nodes, x0);
        let (mut v1, mut v2) = (0.0, 0.0);
        for (wj, &x) in w.iter().zip(&nodes) {
            v1 += wj[1] * x.sin();
            v2 += wj[2] * x.sin();
        }
        assert!((v1 - x0.cos()).abs() < 2e-8, "{}", (v1 - x0.cos()).abs());
        assert!((v2 + x0.sin()).abs() < 5e-7, "{}", (v2 + x0.sin()).abs());
    }

    #[test]
    fn verify_passes_on_a_clean_state_and_flags_corruption() {
        // keep clear of r = 1.2 where the level-4 function of this seed
        // runs through a genuine pole (phi_3 crosses -1); its sixth
        // derivative tail would otherwise dominate the stencil error
        let grid: Vec<f64> = (0..351).map(|i| 3.0 + 0.02 * i as f64).collect();
        let mut st = dp2_ladder(4, 1.0, 0.3, &grid).unwrap();
        let rep = ladder_verify(&st).unwrap();
        assert!(rep.coupling_down_max <= 1e-6, "down {}", rep.coupling_down_max);
        assert!(rep.coupling_up_max <= 1e-6, "up {}", rep.coupling_up_max);
        assert!(rep.ode_max <= 1e-6, "ode {}", rep.ode_max);
        // the pure growing seed is regular for every level and all r, so
        // the dense grid the command-line ladder uses must verify too
        let grid0: Vec<f64> = (0..701).map(|i| 1.0 + 0.01 * i as f64).collect();
        let rep0 = ladder_verify(&dp2_ladder(4, 1.0, 0.0, &grid0).unwrap()).unwrap();
        assert!(rep0.coupling_down_max <= 1e-6 && rep0.coupling_up_max <= 1e-6);
        assert!(rep0.ode_max <= 1e-6, "regular family ode {}", rep0.ode_max);
        st.phi[2][70] += 1e-3;
        let bad = ladder_verify(&st).unwrap();
        assert!(
            bad.coupling_down_max > 1e-5 || bad.coupling_up_max > 1e-5 || bad.ode_max > 1e-5,
            "corruption not visible: {bad:?}"
        );
    }
}
