//! Closed polygonal space curves standing in for smooth geometric knots.

mod io;
mod zoo;

pub use io::CurveFile;
pub use zoo::{FourierTerm, ZooFamily, ZooSpec};

use rayon::prelude::*;

use crate::spline::PeriodicSpline;
use crate::{KnotError, Result, Vec3};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 16;

/// Default embeddedness threshold, relative to total length.
pub const DEFAULT_MIN_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct CurveOptions {
    /// Minimum distance between non-adjacent segments, as a fraction of total length.
    pub min_gap: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            min_gap: DEFAULT_MIN_GAP,
        }
    }
}

/// A closed, oriented, embedded polygonal curve.
///
/// Vertices are samples of the periodic cubic spline that interpolates them;
/// tangents, arclength and per-vertex quadrature weights come from that spline.
#[derive(Clone, Debug)]
pub struct KnotCurve {
    points: Vec<Vec3>,
    tangents: Vec<Vec3>,
    /// `cumlen[i]` is the arclength from vertex 0 to vertex i; `cumlen[n]` is the total.
    cumlen: Vec<f64>,
    weights: Vec<f64>,
    spline: PeriodicSpline,
}

impl KnotCurve {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        Self::with_options(points, CurveOptions::default())
    }

    pub fn with_options(points: Vec<Vec3>, opts: CurveOptions) -> Result<Self> {
        let curve = Self::build(points)?;
        curve.check_embedded(opts.min_gap)?;
        Ok(curve)
    }

    /// Builds without the O(N²) embeddedness scan. Used for transient trial
    /// curves whose embeddedness is validated by the caller when it matters.
    pub(crate) fn build(points: Vec<Vec3>) -> Result<Self> {
        let n = points.len();
        if n < MIN_SAMPLES {
            return Err(KnotError::InvalidCurve(format!(
                "need at least {MIN_SAMPLES} points, got {n}"
            )));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(KnotError::InvalidCurve("non-finite coordinate".into()));
        }
        let perimeter: f64 = (0..n).map(|i| (points[(i + 1) % n] - points[i]).norm()).sum();
        if perimeter <= 0.0 {
            return Err(KnotError::InvalidCurve("zero length".into()));
        }
        for i in 0..n {
            let seg = (points[(i + 1) % n] - points[i]).norm();
            if seg <= 1e-12 * perimeter {
                return Err(KnotError::InvalidCurve(format!(
                    "points {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        let spline = PeriodicSpline::new(&points);
        let seglen: Vec<f64> = (0..n).map(|i| spline.arclength(i, spline.knot(i))).collect();
        let mut cumlen = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cumlen.push(0.0);
        for l in &seglen {
            acc += l;
            cumlen.push(acc);
        }
        let weights = (0..n)
            .map(|i| 0.5 * (seglen[(i + n - 1) % n] + seglen[i]))
            .collect();
        let tangents = (0..n)
            .map(|i| spline.deriv(i, 0.0).normalize())
            .collect();
        Ok(Self {
            points,
            tangents,
            cumlen,
            weights,
            spline,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn tangents(&self) -> &[Vec3] {
        &self.tangents
    }

    /// Arclength quadrature weight attached to each vertex.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cumlen(&self) -> &[f64] {
        &self.cumlen
    }

    pub fn total_length(&self) -> f64 {
        self.cumlen[self.len()]
    }

    pub fn spline(&self) -> &PeriodicSpline {
        &self.spline
    }

    /// Intrinsic distance: the shorter of the two arcs between vertices `i` and `j`.
    pub fn arc_distance(&self, i: usize, j: usize) -> f64 {
        let total = self.total_length();
        let d = (self.cumlen[j] - self.cumlen[i]).abs();
        d.min(total - d)
    }

    pub fn centroid(&self) -> Vec3 {
        let total = self.total_length();
        self.points
            .iter()
            .zip(&self.weights)
            .fold(Vec3::zeros(), |acc, (p, w)| acc + p * *w)
            / total
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let pts = &self.points;
        (0..pts.len())
            .into_par_iter()
            .map(|i| {
                pts[i + 1..]
                    .iter()
                    .map(|q| (q - pts[i]).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Smallest distance between two non-adjacent segments, with the segment pair.
    pub fn min_segment_gap(&self) -> (f64, usize, usize) {
        let n = self.len();
        let pts = &self.points;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let (a0, a1) = (pts[i], pts[(i + 1) % n]);
                let mut best = (f64::INFINITY, i, i);
                for j in i + 2..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    let d = segment_distance(a0, a1, pts[j], pts[(j + 1) % n]);
                    if d < best.0 {
                        best = (d, i, j);
                    }
                }
                best
            })
            .reduce(
                || (f64::INFINITY, 0, 0),
                |a, b| if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a },
            )
    }

    fn check_embedded(&self, min_gap: f64) -> Result<()> {
        let threshold = min_gap * self.total_length();
        let (gap, i, j) = self.min_segment_gap();
        if gap <= threshold {
            return Err(KnotError::NotEmbedded {
                i,
                j,
                gap,
                threshold,
            });
        }
        Ok(())
    }

    /// Position and unit tangent at arclength `s` along the smooth interpolant.
    pub fn at_arclength(&self, s: f64) -> (Vec3, Vec3) {
        let (seg, t) = self.locate_arclength(s);
        (
            self.spline.eval(seg, t),
            self.spline.deriv(seg, t).normalize(),
        )
    }

    fn locate_arclength(&self, s: f64) -> (usize, f64) {
        let total = self.total_length();
        let s = s.rem_euclid(total);
        let seg = match self.cumlen.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(k) => k.min(self.len() - 1),
            Err(k) => k - 1,
        };
        let target = s - self.cumlen[seg];
        let seg_len = self.cumlen[seg + 1] - self.cumlen[seg];
        let h = self.spline.knot(seg);
        // Newton on the local arclength function, started from linear interpolation.
        let mut t = (target / seg_len * h).clamp(0.0, h);
        for _ in 0..8 {
            let f = self.spline.arclength(seg, t) - target;
            let speed = self.spline.deriv(seg, t).norm();
            let step = f / speed;
            t = (t - step).clamp(0.0, h);
            if step.abs() < 1e-15 * h {
                break;
            }
        }
        (seg, t)
    }

    /// Resamples to `n` points equally spaced in arclength along the interpolant.
    pub fn resample_arclength(&self, n: usize) -> Result<Self> {
        if n < MIN_SAMPLES {
            return Err(KnotError::InvalidCurve(format!(
                "need at least {MIN_SAMPLES} points, got {n}"
            )));
        }
        let total = self.total_length();
        let pts = (0..n)
            .into_par_iter()
            .map(|k| self.at_arclength(total * k as f64 / n as f64).0)
            .collect();
        Self::new(pts)
    }

    /// Applies `f` to every vertex and rebuilds (with validation).
    pub fn map_points(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.points.iter().map(f).collect())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.map_points(|p| p * factor)
    }

    /// Reflection through the plane z = 0.
    pub fn mirrored(&self) -> Result<Self> {
        self.map_points(|p| Vec3::new(p.x, p.y, -p.z))
    }

    /// Same point set traversed backwards.
    pub fn reversed(&self) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.reverse();
        Self::new(pts)
    }
}

/// Euclidean distance between segments [a0,a1] and [b0,b1].
pub fn segment_distance(a0: Vec3, a1: Vec3, b0: Vec3, b1: Vec3) -> f64 {
    let d1 = a1 - a0;
    let d2 = b1 - b0;
    let r = a0 - b0;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-14 * a * e {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    ((a0 + d1 * s) - (b0 + d2 * t)).norm()
}

/// Distance from `p` to the segment [a, b].
pub fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(&d) / d.dot(&d)).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}
