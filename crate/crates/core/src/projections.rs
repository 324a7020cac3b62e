//! Plane projections of a polygonal knot: crossings, their signs, the Gauss
//! code of a regular projection, and direction-averaged crossing counts.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::diagrams::{CodeToken, KnotDiagramCode};
use crate::{rng, FunctionalReport, KnotCurve, KnotError, Result, Vec3};

/// Smallest accepted angle between two crossing projected segments.
pub const MIN_CROSSING_ANGLE: f64 = 1e-4;
/// Intersection parameters must lie in (ε, 1 − ε).
pub const PARAM_EPS: f64 = 1e-9;
/// Distinct crossings must be this far apart in the plane, relative to the diameter.
pub const TRIPLE_SEPARATION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    /// Segment indices with `i < j`.
    pub i: usize,
    pub j: usize,
    /// Intersection parameters on segments `i` and `j`.
    pub s: f64,
    pub u: f64,
    /// +1 or −1.
    pub sign: i8,
    /// Whether segment `i` passes over segment `j` (is nearer the viewer at +v).
    pub i_over: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingSet {
    pub direction: [f64; 3],
    pub crossings: Vec<Crossing>,
    pub regular: bool,
}

impl CrossingSet {
    /// n(γ; v): number of crossings.
    pub fn count(&self) -> usize {
        self.crossings.len()
    }

    /// w(γ; v): sum of crossing signs.
    pub fn signed_count(&self) -> i64 {
        self.crossings.iter().map(|c| i64::from(c.sign)).sum()
    }

    /// Crossings as chords between curve parameters (segment index + offset), lower end first.
    pub fn chords(&self) -> Vec<(f64, f64)> {
        self.crossings
            .iter()
            .map(|c| (c.i as f64 + c.s, c.j as f64 + c.u))
            .collect()
    }

    /// Gauss code of the projection read from vertex 0. Fails on irregular projections.
    pub fn gauss_code(&self) -> Result<KnotDiagramCode> {
        if !self.regular {
            return Err(KnotError::NonGeneric("projection is not regular".into()));
        }
        let mut events: Vec<(f64, CodeToken)> = Vec::with_capacity(2 * self.count());
        for (k, c) in self.crossings.iter().enumerate() {
            let id = k + 1;
            events.push((c.i as f64 + c.s, CodeToken { id, over: c.i_over, sign: c.sign }));
            events.push((c.j as f64 + c.u, CodeToken { id, over: !c.i_over, sign: c.sign }));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(KnotDiagramCode::new(events.into_iter().map(|e| e.1).collect())?.normalized())
    }
}

/// Orthonormal basis of the plane perpendicular to `v`.
fn plane_basis(v: Vec3) -> (Vec3, Vec3) {
    let helper = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vec3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = v.cross(&helper).normalize();
    (e1, v.cross(&e1))
}

#[inline]
fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

enum PairResult {
    None,
    Crossing(Crossing),
    Irregular,
}

struct Projected<'a> {
    pts3: &'a [Vec3],
    pts: Vec<[f64; 2]>,
    v: Vec3,
    tol: f64,
}

impl Projected<'_> {
    fn n(&self) -> usize {
        self.pts.len()
    }

    fn seg(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        let a = self.pts[i];
        let b = self.pts[(i + 1) % self.n()];
        (a, [b[0] - a[0], b[1] - a[1]])
    }

    fn test(&self, i: usize, j: usize) -> PairResult {
        let (a0, da) = self.seg(i);
        let (b0, db) = self.seg(j);
        let la = da[0].hypot(da[1]);
        let lb = db[0].hypot(db[1]);
        let w = [b0[0] - a0[0], b0[1] - a0[1]];
        let den = cross2(da, db);
        if den.abs() <= MIN_CROSSING_ANGLE.sin() * la * lb {
            // nearly parallel: only a problem if the segments touch
            return if seg_distance_2d(a0, da, b0, db) <= self.tol {
                PairResult::Irregular
            } else {
                PairResult::None
            };
        }
        let s = cross2(w, db) / den;
        let u = cross2(w, da) / den;
        let inside = |t: f64| t > PARAM_EPS && t < 1.0 - PARAM_EPS;
        let near = |t: f64| (-PARAM_EPS..=1.0 + PARAM_EPS).contains(&t);
        if inside(s) && inside(u) {
            let n = self.n();
            let (p, q) = (self.pts3[i], self.pts3[(i + 1) % n]);
            let (r, t) = (self.pts3[j], self.pts3[(j + 1) % n]);
            let pa = p + (q - p) * s;
            let pb = r + (t - r) * u;
            let ta = q - p;
            let tb = t - r;
            let sign = if (pb - pa).dot(&ta.cross(&tb)) > 0.0 { 1 } else { -1 };
            PairResult::Crossing(Crossing {
                i,
                j,
                s,
                u,
                sign,
                i_over: pa.dot(&self.v) > pb.dot(&self.v),
            })
        } else if near(s) && near(u) {
            PairResult::Irregular
        } else {
            PairResult::None
        }
    }

    /// Degenerate segments and folds at shared vertices.
    fn local_irregularity(&self) -> bool {
        let n = self.n();
        (0..n).any(|i| {
            let (_, da) = self.seg(i);
            let (_, db) = self.seg((i + 1) % n);
            let la = da[0].hypot(da[1]);
            let lb = db[0].hypot(db[1]);
            la <= self.tol || lb <= self.tol || {
                let cos = (da[0] * db[0] + da[1] * db[1]) / (la * lb);
                cos < -MIN_CROSSING_ANGLE.cos()
            }
        })
    }
}

fn seg_distance_2d(a0: [f64; 2], da: [f64; 2], b0: [f64; 2], db: [f64; 2]) -> f64 {
    let lift = |p: [f64; 2]| Vec3::new(p[0], p[1], 0.0);
    crate::curve::segment_distance(
        lift(a0),
        lift([a0[0] + da[0], a0[1] + da[1]]),
        lift(b0),
        lift([b0[0] + db[0], b0[1] + db[1]]),
    )
}

fn project<'a>(curve: &'a KnotCurve, v: Vec3) -> Projected<'a> {
    let (e1, e2) = plane_basis(v);
    let pts = curve.points().iter().map(|p| [p.dot(&e1), p.dot(&e2)]).collect();
    Projected {
        pts3: curve.points(),
        pts,
        v,
        tol: 1e-12 * curve.total_length(),
    }
}

fn non_adjacent(i: usize, j: usize, n: usize) -> bool {
    j > i + 1 && !(i == 0 && j == n - 1)
}

fn finish(curve: &KnotCurve, v: Vec3, mut crossings: Vec<Crossing>, mut regular: bool, proj: &Projected) -> CrossingSet {
    crossings.sort_by_key(|c| (c.i, c.j));
    regular &= !proj.local_irregularity();
    if regular {
        regular = !has_close_crossings(&crossings, proj, TRIPLE_SEPARATION * curve.diameter());
    }
    CrossingSet {
        direction: v.into(),
        crossings,
        regular,
    }
}

fn has_close_crossings(crossings: &[Crossing], proj: &Projected, sep: f64) -> bool {
    let mut pts: Vec<[f64; 2]> = crossings
        .iter()
        .map(|c| {
            let (a0, da) = proj.seg(c.i);
            [a0[0] + c.s * da[0], a0[1] + c.s * da[1]]
        })
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    for (k, p) in pts.iter().enumerate() {
        for q in &pts[k + 1..] {
            if q[0] - p[0] > sep {
                break;
            }
            if (q[1] - p[1]).abs() <= sep {
                return true;
            }
        }
    }
    false
}

/// All-pairs reference implementation of [`project_crossings`].
pub fn project_crossings_brute(curve: &KnotCurve, v: Vec3) -> CrossingSet {
    let v = v.normalize();
    let proj = project(curve, v);
    let n = proj.n();
    let mut crossings = Vec::new();
    let mut regular = true;
    for i in 0..n {
        for j in i + 2..n {
            if !non_adjacent(i, j, n) {
                continue;
            }
            match proj.test(i, j) {
                PairResult::None => {}
                PairResult::Crossing(c) => crossings.push(c),
                PairResult::Irregular => regular = false,
            }
        }
    }
    finish(curve, v, crossings, regular, &proj)
}

/// Crossings of the projection along `v`, with regularity flag.
///
/// Segments are bucketed on a uniform grid in the plane; a pair is tested
/// once, in the first cell common to both bounding boxes.
pub fn project_crossings(curve: &KnotCurve, v: Vec3) -> CrossingSet {
    let v = v.normalize();
    let proj = project(curve, v);
    let n = proj.n();
    let pad = proj.tol;
    let bbox = |i: usize| {
        let (a, d) = proj.seg(i);
        let (x0, x1) = (a[0].min(a[0] + d[0]) - pad, a[0].max(a[0] + d[0]) + pad);
        let (y0, y1) = (a[1].min(a[1] + d[1]) - pad, a[1].max(a[1] + d[1]) + pad);
        [x0, x1, y0, y1]
    };
    let boxes: Vec<[f64; 4]> = (0..n).map(bbox).collect();
    let lo_x = boxes.iter().map(|b| b[0]).fold(f64::INFINITY, f64::min);
    let hi_x = boxes.iter().map(|b| b[1]).fold(f64::NEG_INFINITY, f64::max);
    let lo_y = boxes.iter().map(|b| b[2]).fold(f64::INFINITY, f64::min);
    let hi_y = boxes.iter().map(|b| b[3]).fold(f64::NEG_INFINITY, f64::max);
    let side = ((n as f64).sqrt().ceil() as usize).max(1);
    let cw = ((hi_x - lo_x) / side as f64).max(f64::MIN_POSITIVE);
    let ch = ((hi_y - lo_y) / side as f64).max(f64::MIN_POSITIVE);
    let cell = |x: f64, y: f64| {
        let cx = (((x - lo_x) / cw) as usize).min(side - 1);
        let cy = (((y - lo_y) / ch) as usize).min(side - 1);
        (cx, cy)
    };
    let ranges: Vec<((usize, usize), (usize, usize))> =
        boxes.iter().map(|b| (cell(b[0], b[2]), cell(b[1], b[3]))).collect();
    let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, &((x0, y0), (x1, y1))) in ranges.iter().enumerate() {
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                grid.entry((cx, cy)).or_default().push(i);
            }
        }
    }
    let mut crossings = Vec::new();
    let mut regular = true;
    for (&(cx, cy), members) in &grid {
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                let (i, j) = (a.min(b), a.max(b));
                if !non_adjacent(i, j, n) {
                    continue;
                }
                let (ra, rb) = (ranges[i], ranges[j]);
                let first = (ra.0 .0.max(rb.0 .0), ra.0 .1.max(rb.0 .1));
                if first != (cx, cy) {
                    continue;
                }
                match proj.test(i, j) {
                    PairResult::None => {}
                    PairResult::Crossing(c) => crossings.push(c),
                    PairResult::Irregular => regular = false,
                }
            }
        }
    }
    finish(curve, v, crossings, regular, &proj)
}

/// Draws directions for sample `k` until a regular one appears.
fn regular_draw<T>(
    seed: u64,
    k: u64,
    max_tries: usize,
    mut attempt: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Option<T>,
) -> (Option<T>, usize) {
    let mut g = rng::stream(seed, k);
    for tries in 1..=max_tries {
        if let Some(t) = attempt(&mut g) {
            return (Some(t), tries);
        }
    }
    (None, max_tries)
}

const MAX_TRIES: usize = 64;

fn sphere_average(
    samples: usize,
    seed: u64,
    min_samples: usize,
    what: &str,
    f: impl Fn(&mut rand_chacha::ChaCha8Rng) -> Option<f64> + Sync,
) -> Result<(f64, f64)> {
    if samples < min_samples {
        return Err(KnotError::Domain(format!("need at least {min_samples} samples")));
    }
    let draws: Vec<(Option<f64>, usize)> = (0..samples as u64)
        .into_par_iter()
        .map(|k| regular_draw(seed, k, MAX_TRIES, &f))
        .collect();
    let attempts: usize = draws.iter().map(|d| d.1).sum();
    let values: Vec<f64> = draws.iter().filter_map(|d| d.0).collect();
    let rejected = attempts - values.len();
    if values.len() < samples || 2 * rejected > attempts {
        return Err(KnotError::Degenerate {
            rejected,
            drawn: attempts,
        });
    }
    let _ = what;
    Ok(rng::mean_stderr(&values))
}

fn report(curve: &KnotCurve, mean: f64, se: f64, method: &str, samples: usize, seed: u64) -> FunctionalReport {
    FunctionalReport::new(mean, se, method, curve.len()).with_config(json!({
        "samples": samples,
        "seed": seed,
        "min_crossing_angle": MIN_CROSSING_ANGLE,
        "param_eps": PARAM_EPS,
        "triple_separation": TRIPLE_SEPARATION,
    }))
}

/// Mean of n(γ; v) over uniform random directions.
pub fn average_crossing_number(curve: &KnotCurve, samples: usize, seed: u64) -> Result<FunctionalReport> {
    let (m, se) = sphere_average(samples, seed, 100, "crossing", |g| {
        let cs = project_crossings(curve, rng::unit_vector(g));
        cs.regular.then(|| cs.count() as f64)
    })?;
    Ok(report(curve, m, se, "average-crossing-number", samples, seed))
}

/// Mean of w(γ; v) over uniform random directions.
pub fn average_writhe(curve: &KnotCurve, samples: usize, seed: u64) -> Result<FunctionalReport> {
    let (m, se) = sphere_average(samples, seed, 100, "writhe", |g| {
        let cs = project_crossings(curve, rng::unit_vector(g));
        cs.regular.then(|| cs.signed_count() as f64)
    })?;
    Ok(report(curve, m, se, "average-writhe", samples, seed))
}

/// Minimum separation between endpoints of distinct chords, in segment-parameter units.
const ENDPOINT_SEPARATION: f64 = 1e-9;

/// n(γ; v₁, v₂): half the number of (v₁-crossing, v₂-crossing) chord pairs that interleave.
pub fn pair_crossing_count_of(a: &CrossingSet, b: &CrossingSet) -> Result<f64> {
    if !a.regular || !b.regular {
        return Err(KnotError::NonGeneric("projection is not regular".into()));
    }
    let ca = a.chords();
    let cb = b.chords();
    let mut pairs = 0usize;
    for x in &ca {
        for y in &cb {
            if x == y {
                continue;
            }
            let ends = [x.0, x.1, y.0, y.1];
            for p in 0..4 {
                for q in p + 1..4 {
                    if (ends[p] - ends[q]).abs() < ENDPOINT_SEPARATION {
                        return Err(KnotError::NonGeneric(
                            "crossings of the two projections share a curve point".into(),
                        ));
                    }
                }
            }
            let inside = |t: f64| x.0 < t && t < x.1;
            if inside(y.0) != inside(y.1) {
                pairs += 1;
            }
        }
    }
    Ok(pairs as f64 / 2.0)
}

pub fn pair_crossing_count(curve: &KnotCurve, v1: Vec3, v2: Vec3) -> Result<f64> {
    pair_crossing_count_of(&project_crossings(curve, v1), &project_crossings(curve, v2))
}

/// Mean of n(γ; v₁, v₂) over independent uniform direction pairs.
pub fn average_x_crossing(curve: &KnotCurve, samples: usize, seed: u64) -> Result<FunctionalReport> {
    let (m, se) = sphere_average(samples, seed, 100, "x-crossing", |g| {
        let v1 = rng::unit_vector(g);
        let v2 = rng::unit_vector(g);
        pair_crossing_count(curve, v1, v2).ok()
    })?;
    Ok(report(curve, m, se, "average-x-crossing", samples, seed))
}

/// First regular direction drawn from `seed`, with its crossings.
pub fn generic_projection(curve: &KnotCurve, seed: u64) -> Result<CrossingSet> {
    let (cs, _) = regular_draw(seed, u64::MAX, MAX_TRIES, |g| {
        let cs = project_crossings(curve, rng::unit_vector(g));
        cs.regular.then_some(cs)
    });
    cs.ok_or(KnotError::Degenerate {
        rejected: MAX_TRIES,
        drawn: MAX_TRIES,
    })
}

/// Gauss code of a generic projection.
pub fn projection_code(curve: &KnotCurve, seed: u64) -> Result<KnotDiagramCode> {
    generic_projection(curve, seed)?.gauss_code()
}
