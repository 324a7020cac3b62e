//! Möbius transformations of space, the conformal angle between tangent
//! circles, and inversion of a knot at one of its points.

use nalgebra::Matrix3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{point_segment_distance, KnotCurve};
use crate::{rng, KnotError, Result, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MobiusStep {
    Inversion {
        center: [f64; 3],
        radius: f64,
    },
    Similarity {
        /// Row-major proper rotation.
        rotation: [[f64; 3]; 3],
        scale: f64,
        translation: [f64; 3],
    },
}

/// Composition of sphere inversions and similarities, applied first to last.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    pub steps: Vec<MobiusStep>,
}

/// Minimum distance between an inversion center and the curve it acts on,
/// relative to the curve's length.
pub const POLE_MARGIN: f64 = 1e-3;

impl MobiusStep {
    fn validate(&self) -> Result<()> {
        match self {
            MobiusStep::Inversion { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) || !center.iter().all(|c| c.is_finite()) {
                    return Err(KnotError::Domain("inversion radius must be positive".into()));
                }
            }
            MobiusStep::Similarity {
                rotation,
                scale,
                translation,
            } => {
                if !(scale.is_finite() && *scale > 0.0) || !translation.iter().all(|c| c.is_finite()) {
                    return Err(KnotError::Domain("similarity scale must be positive".into()));
                }
                let r = rotation_matrix(rotation);
                let orth = (r.transpose() * r - Matrix3::identity()).abs().max();
                if !(orth <= 1e-9) || (r.determinant() - 1.0).abs() > 1e-9 {
                    return Err(KnotError::Domain("rotation must be orthogonal with determinant +1".into()));
                }
            }
        }
        Ok(())
    }

    fn apply(&self, p: Vec3) -> Result<Vec3> {
        match self {
            MobiusStep::Inversion { center, radius } => {
                let d = p - Vec3::from(*center);
                let d2 = d.norm_squared();
                if d2 <= (f64::EPSILON * radius).powi(2) {
                    return Err(KnotError::Pole(format!("point {p:?} is an inversion center")));
                }
                Ok(Vec3::from(*center) + d * (radius * radius / d2))
            }
            MobiusStep::Similarity {
                rotation,
                scale,
                translation,
            } => Ok(rotation_matrix(rotation) * p * *scale + Vec3::from(*translation)),
        }
    }

    fn jacobian(&self, p: Vec3) -> Matrix3<f64> {
        match self {
            MobiusStep::Inversion { center, radius } => {
                let d = p - Vec3::from(*center);
                let d2 = d.norm_squared();
                let dh = d / d2.sqrt();
                (Matrix3::identity() - dh * dh.transpose() * 2.0) * (radius * radius / d2)
            }
            MobiusStep::Similarity {
                rotation, scale, ..
            } => rotation_matrix(rotation) * *scale,
        }
    }
}

fn rotation_matrix(r: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| r[i][j])
}

impl MobiusTransform {
    pub fn new(steps: Vec<MobiusStep>) -> Result<Self> {
        for s in &steps {
            s.validate()?;
        }
        Ok(Self { steps })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn inversion(center: Vec3, radius: f64) -> Result<Self> {
        Self::new(vec![MobiusStep::Inversion {
            center: center.into(),
            radius,
        }])
    }

    pub fn similarity(rotation: Matrix3<f64>, scale: f64, translation: Vec3) -> Result<Self> {
        let rows = [0, 1, 2].map(|i| [0, 1, 2].map(|j| rotation[(i, j)]));
        Self::new(vec![MobiusStep::Similarity {
            rotation: rows,
            scale,
            translation: translation.into(),
        }])
    }

    pub fn then(mut self, other: Self) -> Self {
        self.steps.extend(other.steps);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        Self::new(t.steps)
    }

    pub fn apply(&self, p: Vec3) -> Result<Vec3> {
        self.steps.iter().try_fold(p, |q, s| s.apply(q))
    }

    /// Image of the tangent vector `v` at `p` under the differential.
    pub fn push_tangent(&self, p: Vec3, v: Vec3) -> Result<Vec3> {
        let mut q = p;
        let mut w = v;
        for s in &self.steps {
            w = s.jacobian(q) * w;
            q = s.apply(q)?;
        }
        Ok(w)
    }

    /// Inversion in a sphere centered between 3 and 4 diameters from the
    /// curve's centroid (so at least twice the diameter from every point),
    /// with radius equal to that distance.
    pub fn random_far_inversion(curve: &KnotCurve, seed: u64, index: u64) -> Result<Self> {
        let mut g = rng::stream(seed, index);
        let diam = curve.diameter();
        let dist = diam * g.random_range(3.0..4.0);
        let center = curve.centroid() + rng::unit_vector(&mut g) * dist;
        Self::inversion(center, dist)
    }

    /// Pointwise image of the curve, resampled to uniform arclength at the same size.
    pub fn transform_curve(&self, curve: &KnotCurve) -> Result<KnotCurve> {
        let mut pts = curve.points().to_vec();
        for s in &self.steps {
            if let MobiusStep::Inversion { center, .. } = s {
                let c = Vec3::from(*center);
                let n = pts.len();
                let gap = (0..n)
                    .map(|i| point_segment_distance(c, pts[i], pts[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min);
                let length: f64 = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).sum();
                if gap <= POLE_MARGIN * length {
                    return Err(KnotError::Pole(format!(
                        "inversion center within {gap:.3e} of the curve"
                    )));
                }
            }
            pts = pts.into_iter().map(|p| s.apply(p)).collect::<Result<_>>()?;
        }
        KnotCurve::new(pts)?.resample_arclength(curve.len())
    }
}

/// Angle between the two round circles through `p1` and `p2` tangent to `t1`
/// at `p1` and to `t2` at `p2`. Computed by reflecting `t1` across the chord.
pub fn conformal_angle(p1: Vec3, t1: Vec3, p2: Vec3, t2: Vec3) -> Result<f64> {
    let chord = p2 - p1;
    let len = chord.norm();
    if len == 0.0 || !len.is_finite() {
        return Err(KnotError::Domain("conformal angle of coincident points".into()));
    }
    let w = chord / len;
    let reflected = w * (2.0 * t1.dot(&w)) - t1;
    // atan2 keeps full precision near 0 and π
    Ok(reflected.cross(&t2).norm().atan2(reflected.dot(&t2)))
}

/// Infinite curve through the point at infinity, with its asymptotic direction.
#[derive(Clone, Debug)]
pub struct OpenCurve {
    points: Vec<Vec3>,
    asymptotic_dir: Vec3,
}

impl OpenCurve {
    pub fn new(points: Vec<Vec3>, asymptotic_dir: Vec3) -> Result<Self> {
        if points.len() < 2 {
            return Err(KnotError::InvalidCurve("open curve needs two points".into()));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(KnotError::InvalidCurve("consecutive points coincide".into()));
        }
        if (asymptotic_dir.norm() - 1.0).abs() > 1e-9 {
            return Err(KnotError::InvalidCurve("asymptotic direction must be a unit vector".into()));
        }
        Ok(Self {
            points,
            asymptotic_dir,
        })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn asymptotic_dir(&self) -> Vec3 {
        self.asymptotic_dir
    }

    /// Σ (1 − cos θₖ) |Δₖ| over segments, θₖ measured from the asymptotic direction.
    pub fn horizontal_excess_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                let len = d.norm();
                len - d.dot(&self.asymptotic_dir)
            })
            .sum()
    }
}

/// Default number of segments dropped on each side of the inversion point.
pub const DEFAULT_WINDOW: usize = 4;

/// Moves vertex `i` to the origin with its tangent along +x, drops `window`
/// vertices on each side, and inverts in the unit sphere.
pub fn invert_at_curve_point(curve: &KnotCurve, i: usize, window: usize) -> Result<OpenCurve> {
    let n = curve.len();
    if i >= n {
        return Err(KnotError::Domain(format!("index {i} out of range")));
    }
    if 2 * window + 3 > n {
        return Err(KnotError::Domain("window leaves too few points".into()));
    }
    let origin = curve.points()[i];
    let rot = align_to_x(curve.tangents()[i]);
    let points = (window + 1..n - window)
        .map(|k| {
            let x = rot * (curve.points()[(i + k) % n] - origin);
            x / x.norm_squared()
        })
        .collect();
    // The traversal leaves the pole along +x, so its image arrives from +∞
    // and departs towards −∞.
    OpenCurve::new(points, -Vec3::x())
}

/// A rotation taking unit vector `t` to +x.
fn align_to_x(t: Vec3) -> Matrix3<f64> {
    let x = Vec3::x();
    let axis = t.cross(&x);
    let s = axis.norm();
    let c = t.dot(&x);
    if s < 1e-15 {
        if c > 0.0 {
            return Matrix3::identity();
        }
        return Matrix3::from_diagonal(&Vec3::new(-1.0, -1.0, 1.0));
    }
    let k = axis / s;
    let kx = k.cross_matrix();
    Matrix3::identity() + kx * s + kx * kx * (1.0 - c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ZooSpec;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, 0.0f64..2.0 * PI).prop_map(|(z, phi)| {
            let r = (1.0 - z * z).sqrt();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
    }

    fn point() -> impl Strategy<Value = Vec3> {
        (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    #[test]
    fn inversion_examples() {
        let t = MobiusTransform::inversion(Vec3::zeros(), 1.0).unwrap();
        let p = Vec3::new(0.6, 0.0, 0.8);
        assert!((t.apply(p).unwrap() - p).norm() < 1e-15);
        let q = t.apply(Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert!((q - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
        assert!(matches!(t.apply(Vec3::zeros()), Err(KnotError::Pole(_))));
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(MobiusTransform::inversion(Vec3::zeros(), 0.0).is_err());
        let shear = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(MobiusTransform::similarity(shear, 1.0, Vec3::zeros()).is_err());
        let flip = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(MobiusTransform::similarity(flip, 1.0, Vec3::zeros()).is_err());
        assert!(MobiusTransform::similarity(Matrix3::identity(), -1.0, Vec3::zeros()).is_err());
    }

    #[test]
    fn json_format() {
        let text = r#"{"steps":[{"inversion":{"center":[0,0,3],"radius":2}},
            {"similarity":{"rotation":[[1,0,0],[0,1,0],[0,0,1]],"scale":2,"translation":[1,0,0]}}]}"#;
        let t = MobiusTransform::from_json(text).unwrap();
        assert_eq!(t.steps.len(), 2);
        let back = MobiusTransform::from_json(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn transform_curve_examples() {
        let c = ZooSpec::circle(1.0, 128).sample().unwrap();
        let same = MobiusTransform::identity().transform_curve(&c).unwrap();
        for (p, q) in c.points().iter().zip(same.points()) {
            assert!((p - q).norm() < 1e-6);
        }
        let big = MobiusTransform::similarity(Matrix3::identity(), 2.0, Vec3::zeros())
            .unwrap()
            .transform_curve(&c)
            .unwrap();
        assert!((big.total_length() - 4.0 * PI).abs() < 1e-3);
        let onto = MobiusTransform::inversion(Vec3::new(1.0, 0.0, 0.0), 1.0).unwrap();
        assert!(matches!(onto.transform_curve(&c), Err(KnotError::Pole(_))));
    }

    #[test]
    fn conformal_angle_examples() {
        // points on a round circle with its tangents
        let (a, b) = (0.3f64, 2.1f64);
        let p = |s: f64| Vec3::new(s.cos(), s.sin(), 0.0);
        let t = |s: f64| Vec3::new(-s.sin(), s.cos(), 0.0);
        assert!(conformal_angle(p(a), t(a), p(b), t(b)).unwrap() < 1e-9);
        let u = Vec3::x();
        let alpha = conformal_angle(Vec3::zeros(), u, Vec3::y(), u).unwrap();
        assert!((alpha - PI).abs() < 1e-12);
        assert!(conformal_angle(u, u, u, u).is_err());
    }

    /// Independent construction: the circle through p1, p2 tangent to t at p1
    /// lies in the plane spanned by t and the chord; its tangent at p2 follows
    /// from the center found by intersecting perpendicular bisectors.
    fn circle_tangent_at_p2(p1: Vec3, t1: Vec3, p2: Vec3) -> Vec3 {
        let chord = p2 - p1;
        let normal = t1.cross(&chord);
        if normal.norm() < 1e-12 {
            // degenerate: the circle is the line through p1 and p2
            return t1;
        }
        let in_plane = normal.cross(&t1).normalize(); // points from p1 toward the center
        // center = p1 + ρ·in_plane with |center − p2| = ρ
        let rho = chord.norm_squared() / (2.0 * chord.dot(&in_plane));
        let center = p1 + in_plane * rho;
        // circle orientation: at p1 the velocity is t1; rotation axis
        let axis = (p1 - center).cross(&t1).normalize();
        axis.cross(&(p2 - center)).normalize()
    }

    proptest! {
        #[test]
        fn angle_matches_circle_construction(p1 in point(), p2 in point(), t1 in unit(), t2 in unit()) {
            prop_assume!((p2 - p1).norm() > 0.1);
            let u_at_p2 = circle_tangent_at_p2(p1, t1, p2);
            let want = u_at_p2.dot(&t2).clamp(-1.0, 1.0).acos();
            let got = conformal_angle(p1, t1, p2, t2).unwrap();
            prop_assert!((got - want).abs() < 1e-7, "{} vs {}", got, want);
        }

        #[test]
        fn angle_is_symmetric(p1 in point(), p2 in point(), t1 in unit(), t2 in unit()) {
            prop_assume!((p2 - p1).norm() > 1e-3);
            let a = conformal_angle(p1, t1, p2, t2).unwrap();
            let b = conformal_angle(p2, t2, p1, t1).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn angle_is_mobius_invariant(p1 in point(), p2 in point(), t1 in unit(), t2 in unit(),
                                     c in point(), r in 0.5f64..3.0) {
            prop_assume!((p2 - p1).norm() > 0.1 && (p1 - c).norm() > 0.1 && (p2 - c).norm() > 0.1);
            let m = MobiusTransform::inversion(c, r).unwrap()
                .then(MobiusTransform::similarity(Matrix3::identity(), 1.7, Vec3::new(0.3, -1.0, 2.0)).unwrap());
            let q1 = m.apply(p1).unwrap();
            let q2 = m.apply(p2).unwrap();
            let s1 = m.push_tangent(p1, t1).unwrap().normalize();
            let s2 = m.push_tangent(p2, t2).unwrap().normalize();
            let a = conformal_angle(p1, t1, p2, t2).unwrap();
            let b = conformal_angle(q1, s1, q2, s2).unwrap();
            prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
        }

        #[test]
        fn inversion_is_an_involution(p in point(), c in point(), r in 0.1f64..3.0) {
            prop_assume!((p - c).norm() > 1e-3);
            let t = MobiusTransform::inversion(c, r).unwrap();
            let back = t.apply(t.apply(p).unwrap()).unwrap();
            prop_assert!((back - p).norm() <= 1e-12 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn triple_product_bounded_by_sine() {
        let mut g = rng::stream(11, 0);
        for _ in 0..100_000 {
            let (w, u, v) = (rng::unit_vector(&mut g), rng::unit_vector(&mut g), rng::unit_vector(&mut g));
            let triple = w.dot(&u.cross(&v));
            let alpha = conformal_angle(Vec3::zeros(), u, w, v).unwrap();
            assert!(triple.abs() <= alpha.sin() + 1e-12);
        }
    }

    #[test]
    fn circle_inverts_to_a_line() {
        let c = ZooSpec::circle(1.0, 256).sample().unwrap();
        for i in [0, 37, 200] {
            let open = invert_at_curve_point(&c, i, DEFAULT_WINDOW).unwrap();
            let pts = open.points();
            let dir = open.asymptotic_dir();
            for p in pts {
                let off = p - pts[0];
                assert!((off - dir * off.dot(&dir)).norm() < 1e-6);
            }
            assert!(open.horizontal_excess_length() < 1e-6);
        }
    }

    #[test]
    fn inverted_endpoints_are_far() {
        let c = ZooSpec::trefoil(512).sample().unwrap();
        let window = DEFAULT_WINDOW;
        let open = invert_at_curve_point(&c, 0, window).unwrap();
        let delta = c.arc_distance(0, window + 1);
        for p in [open.points()[0], *open.points().last().unwrap()] {
            assert!(p.norm() >= 1.0 / delta);
        }
        assert!(open.horizontal_excess_length() >= 0.0);
        let line = OpenCurve::new(vec![Vec3::zeros(), Vec3::x() * 3.0], Vec3::x()).unwrap();
        assert_eq!(line.horizontal_excess_length(), 0.0);
    }
}
