//! Local quintic Hermite interpolation.
//!
//! Three nodes with (value, slope) data determine a unique quintic; its
//! first three derivatives are what the transformation layer needs to
//! push a sampled curve through a change of variables. Accuracy is
//! O(h^6) in value and degrades one order per derivative, which keeps
//! third derivatives usable at the step sizes the integrator produces.

/// Quintic through three (x, y, y') nodes, in Newton form on the doubled
/// abscissa list.
#[derive(Clone, Copy, Debug)]
pub struct Quintic {
    xs: [f64; 6],
    coef: [f64; 6],
}

/// Builds the Hermite quintic. Nodes are (x, y, dy) triples with
/// pairwise distinct x.
pub fn hermite_quintic(n0: (f64, f64, f64), n1: (f64, f64, f64), n2: (f64, f64, f64)) -> Quintic {
    let xs = [n0.0, n0.0, n1.0, n1.0, n2.0, n2.0];
    // divided-difference table with repeated nodes: first column is the
    // values, confluent first differences are the prescribed slopes
    let mut d = [n0.1, n0.1, n1.1, n1.1, n2.1, n2.1];
    let slopes = [n0.2, n1.2, n2.2];
    let mut coef = [0.0; 6];
    coef[0] = d[0];
    for order in 1..6 {
        for i in (order..6).rev() {
            d[i] = if xs[i] == xs[i - order] {
                // only happens at order 1 on a doubled node
                slopes[i / 2]
            } else {
                (d[i] - d[i - 1]) / (xs[i] - xs[i - order])
            };
        }
        coef[order] = d[order];
    }
    Quintic { xs, coef }
}

impl Quintic {
    /// Value and first three derivatives at x.
    pub fn eval(&self, x: f64) -> (f64, f64, f64, f64) {
        let mut y = self.coef[5];
        let (mut dy, mut d2y, mut d3y) = (0.0, 0.0, 0.0);
        for k in (0..5).rev() {
            let t = x - self.xs[k];
            d3y = d3y * t + 3.0 * d2y;
            d2y = d2y * t + 2.0 * dy;
            dy = dy * t + y;
            y = y * t + self.coef[k];
        }
        (y, dy, d2y, d3y)
    }
}
