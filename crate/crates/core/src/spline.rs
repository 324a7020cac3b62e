//! Periodic cubic spline through the vertices of a closed polygon.
//!
//! The spline uses chordal parameterization: segment `i` runs over a local
//! parameter `t ∈ [0, h_i]` where `h_i = |p_{i+1} - p_i|`. Arclength and
//! tangents of a [`KnotCurve`](crate::KnotCurve) are read from this interpolant
//! so that the polygon vertices stand for samples of a smooth knot.

use crate::Vec3;

// 8-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Integrates `f` over `[a, b]` with the 8-point Gauss-Legendre rule.
pub(crate) fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

#[derive(Clone, Debug)]
pub struct PeriodicSpline {
    points: Vec<Vec3>,
    knots: Vec<f64>,
    second: Vec<Vec3>,
    /// Cumulative parameter at the start of each segment; `param_start[n] = total`.
    param_start: Vec<f64>,
}

impl PeriodicSpline {
    /// Builds the interpolant. Consecutive points must be distinct.
    pub fn new(points: &[Vec3]) -> Self {
        let n = points.len();
        let knots: Vec<f64> = (0..n)
            .map(|i| (points[(i + 1) % n] - points[i]).norm())
            .collect();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![Vec3::zeros(); n];
        for i in 0..n {
            let hp = knots[(i + n - 1) % n];
            let h = knots[i];
            lower[i] = hp;
            diag[i] = 2.0 * (hp + h);
            upper[i] = h;
            let fwd = (points[(i + 1) % n] - points[i]) / h;
            let bwd = (points[i] - points[(i + n - 1) % n]) / hp;
            rhs[i] = 6.0 * (fwd - bwd);
        }
        let second = solve_cyclic(&lower, &diag, &upper, &rhs);
        let mut param_start = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        param_start.push(0.0);
        for h in &knots {
            acc += h;
            param_start.push(acc);
        }
        Self {
            points: points.to_vec(),
            knots,
            second,
            param_start,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn knot(&self, seg: usize) -> f64 {
        self.knots[seg]
    }

    /// Total chordal parameter length (the polygon perimeter).
    pub fn param_length(&self) -> f64 {
        self.param_start[self.len()]
    }

    pub fn eval(&self, seg: usize, t: f64) -> Vec3 {
        let n = self.len();
        let h = self.knots[seg];
        let (p0, p1) = (self.points[seg], self.points[(seg + 1) % n]);
        let (m0, m1) = (self.second[seg], self.second[(seg + 1) % n]);
        let a = h - t;
        m0 * (a * a * a / (6.0 * h))
            + m1 * (t * t * t / (6.0 * h))
            + (p0 - m0 * (h * h / 6.0)) * (a / h)
            + (p1 - m1 * (h * h / 6.0)) * (t / h)
    }

    pub fn deriv(&self, seg: usize, t: f64) -> Vec3 {
        let n = self.len();
        let h = self.knots[seg];
        let (p0, p1) = (self.points[seg], self.points[(seg + 1) % n]);
        let (m0, m1) = (self.second[seg], self.second[(seg + 1) % n]);
        let a = h - t;
        -m0 * (a * a / (2.0 * h)) + m1 * (t * t / (2.0 * h)) + (p1 - p0) / h
            - (m1 - m0) * (h / 6.0)
    }

    /// Arclength of segment `seg` between local parameters 0 and `t`.
    pub fn arclength(&self, seg: usize, t: f64) -> f64 {
        gauss_legendre(0.0, t, |x| self.deriv(seg, x).norm())
    }

    /// Locates a global parameter `tau ∈ [0, param_length)` as (segment, local t).
    pub fn locate(&self, tau: f64) -> (usize, f64) {
        let total = self.param_length();
        let tau = tau.rem_euclid(total);
        let seg = match self
            .param_start
            .binary_search_by(|s| s.partial_cmp(&tau).unwrap())
        {
            Ok(k) => k.min(self.len() - 1),
            Err(k) => k - 1,
        };
        (seg, (tau - self.param_start[seg]).min(self.knots[seg]))
    }

    /// Position and velocity (derivative in the chordal parameter) at `tau`.
    pub fn at_param(&self, tau: f64) -> (Vec3, Vec3) {
        let (seg, t) = self.locate(tau);
        (self.eval(seg, t), self.deriv(seg, t))
    }
}

/// Solves a cyclic tridiagonal system with the Sherman-Morrison correction.
fn solve_cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Vec3]) -> Vec<Vec3> {
    let n = diag.len();
    // corner entries: row 0 couples to x[n-1], row n-1 couples to x[0]
    let beta = lower[0];
    let alpha = upper[n - 1];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] = diag[0] - gamma;
    bb[n - 1] = diag[n - 1] - alpha * beta / gamma;
    let x = thomas(lower, &bb, upper, rhs);
    let mut u = vec![Vec3::zeros(); n];
    u[0] = Vec3::repeat(gamma);
    u[n - 1] = Vec3::repeat(alpha);
    let z = thomas(lower, &bb, upper, &u);
    let mut out = x.clone();
    for c in 0..3 {
        let fact = (x[0][c] + beta * x[n - 1][c] / gamma)
            / (1.0 + z[0][c] + beta * z[n - 1][c] / gamma);
        for i in 0..n {
            out[i][c] -= fact * z[i][c];
        }
    }
    out
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Vec3]) -> Vec<Vec3> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Vec3::zeros(); n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - d[i - 1] * lower[i]) / m;
    }
    let mut x = vec![Vec3::zeros(); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - x[i + 1] * c[i];
    }
    x
}
