//! Gauss-diagram functionals: writhe, I_D and its unsigned version, the
//! rotation-averaged functional, the volume functional I_Y and the
//! combination ¼I_X − ⅓I_Y + 1/24.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cyclic::{self, PairKernel};
use crate::diagrams::{ChordDiagram, GaussDiagram};
use crate::energies::QuadratureConfig;
use crate::{rng, FunctionalReport, KnotCurve, KnotError, Result, Vec3};

const FOUR_PI: f64 = 4.0 * PI;

/// Samples per deterministic random stream.
const CHUNK: usize = 4096;

/// Largest chord count evaluated on the grid; more chords use Monte Carlo.
pub const MAX_GRID_CHORDS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub samples: usize,
    pub seed: u64,
    /// Scale `s` of the far-field proposal ∝ (s² + |x − centroid|²)^{-5/2};
    /// defaults to the curve diameter.
    pub spatial_scale: Option<f64>,
    /// Radius of the balls around the three curve points used by the near-field
    /// proposals; defaults to a sixteenth of the total length.
    pub near_radius: Option<f64>,
    /// Ambient points closer than this to a sampled curve point contribute
    /// nothing; defaults to 10⁻²·L/N.
    pub exclusion: Option<f64>,
}

impl MCConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            spatial_scale: None,
            near_radius: None,
            exclusion: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 1000 {
            return Err(KnotError::Domain("Monte Carlo needs at least 1000 samples".into()));
        }
        for v in [self.spatial_scale, self.near_radius].into_iter().flatten() {
            if !(v.is_finite() && v > 0.0) {
                return Err(KnotError::Domain("Monte Carlo scales must be positive".into()));
            }
        }
        if let Some(e) = self.exclusion {
            if !(e.is_finite() && e >= 0.0) {
                return Err(KnotError::Domain("exclusion radius must be non-negative".into()));
            }
        }
        Ok(())
    }
}

impl Default for MCConfig {
    fn default() -> Self {
        Self::new(1_000_000, 0)
    }
}

/// Weighted Gauss kernel ⟨γⱼ − γᵢ, tᵢ, tⱼ⟩ / (4π|γⱼ − γᵢ|³)·Δsᵢ·Δsⱼ.
pub fn gauss_kernel(curve: &KnotCurve, skip: usize) -> PairKernel {
    let p = curve.points();
    let t = curve.tangents();
    PairKernel::build(curve, skip, |i, j| kernel_at(p[i], t[i], p[j], t[j]))
}

#[inline]
fn kernel_at(pa: Vec3, ta: Vec3, pb: Vec3, tb: Vec3) -> f64 {
    let d = pb - pa;
    let r = d.norm();
    d.dot(&ta.cross(&tb)) / (FOUR_PI * r * r * r)
}

fn grid_value(curve: &KnotCurve, d: &GaussDiagram, signed: bool, skip: usize) -> f64 {
    let mut k = gauss_kernel(curve, skip);
    if !signed {
        k = k.abs();
    }
    match d.n() {
        1 => k.total(),
        2 if d.intersecting_pairs() == 1 => cyclic::x_sum(&k),
        _ => cyclic::diagram_sum(&k, d),
    }
}

fn check_diagram(d: &GaussDiagram) -> Result<()> {
    if d.n() == 0 {
        return Err(KnotError::Diagram("diagram has no chords".into()));
    }
    Ok(())
}

/// Grid evaluation of I_D (signed) or 𝒞_D (unsigned) for diagrams with at
/// most three chords.
pub fn gauss_functional(
    curve: &KnotCurve,
    d: &GaussDiagram,
    signed: bool,
    cfg: &QuadratureConfig,
) -> Result<FunctionalReport> {
    check_diagram(d)?;
    if d.n() > MAX_GRID_CHORDS {
        return Err(KnotError::Domain(format!(
            "{} chords is beyond grid mode; use the Monte Carlo evaluator",
            d.n()
        )));
    }
    if cfg.diagonal_skip == 0 {
        return Err(KnotError::Domain("diagonal_skip must be at least 1".into()));
    }
    let n = curve.len();
    let value = grid_value(curve, d, signed, cfg.diagonal_skip);
    let (error, method) = if cfg.richardson && n / 2 >= crate::curve::MIN_SAMPLES {
        let coarse = curve.resample_arclength(n / 2)?;
        ((value - grid_value(&coarse, d, signed, cfg.diagonal_skip)).abs(), "grid+richardson")
    } else {
        (0.0, "grid")
    };
    Ok(FunctionalReport::new(value, error, method, n).with_config(json!({
        "diagram": d.to_json(),
        "signed": signed,
        "diagonal_skip": cfg.diagonal_skip,
        "richardson": cfg.richardson,
    })))
}

/// Monte Carlo evaluation over the configuration space for any chord count.
pub fn gauss_functional_mc(
    curve: &KnotCurve,
    d: &GaussDiagram,
    signed: bool,
    mc: &MCConfig,
) -> Result<FunctionalReport> {
    check_diagram(d)?;
    mc.validate()?;
    let m = d.points();
    let total = curve.total_length();
    // a uniform start point plus 2n − 1 sorted followers has density (2n−1)!/L^{2n}
    let volume = total.powi(m as i32) / (1..m).map(|k| k as f64).product::<f64>();
    let (mean, se) = chunked_mc(mc.samples, mc.seed, |g| {
        let mut s: Vec<f64> = (0..m).map(|_| g.random_range(0.0..total)).collect();
        let s0 = s[0];
        s[1..].sort_by(|a, b| (a - s0).rem_euclid(total).total_cmp(&(b - s0).rem_euclid(total)));
        let frames: Vec<(Vec3, Vec3)> = s.iter().map(|&x| curve.at_arclength(x)).collect();
        let mut prod = 1.0;
        for (a, b) in d.chords() {
            let (pa, ta) = frames[a];
            let (pb, tb) = frames[b];
            if pa == pb {
                return 0.0;
            }
            let k = kernel_at(pa, ta, pb, tb);
            prod *= if signed { k } else { k.abs() };
        }
        prod * volume
    });
    Ok(FunctionalReport::new(mean, se, "monte-carlo", curve.len()).with_config(json!({
        "diagram": d.to_json(),
        "signed": signed,
        "samples": mc.samples,
        "seed": mc.seed,
    })))
}

/// Grid mode up to three chords, Monte Carlo beyond.
pub fn gauss_functional_auto(
    curve: &KnotCurve,
    d: &GaussDiagram,
    signed: bool,
    cfg: &QuadratureConfig,
    mc: &MCConfig,
) -> Result<FunctionalReport> {
    if d.n() <= MAX_GRID_CHORDS {
        gauss_functional(curve, d, signed, cfg)
    } else {
        gauss_functional_mc(curve, d, signed, mc)
    }
}

/// The writhe: the one-chord functional.
pub fn writhe(curve: &KnotCurve, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    let mut r = gauss_functional(curve, &ChordDiagram::single(), true, cfg)?;
    r.method = format!("writhe:{}", r.method);
    Ok(r)
}

/// Average of the functional over the 2n rotations of the endpoint order.
pub fn reduced_functional(
    curve: &KnotCurve,
    d: &ChordDiagram,
    signed: bool,
    cfg: &QuadratureConfig,
) -> Result<FunctionalReport> {
    check_diagram(d)?;
    let m = d.points();
    let mut seen: Vec<(GaussDiagram, FunctionalReport)> = Vec::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for k in 0..m {
        let rot = d.rotated(k);
        let r = match seen.iter().find(|(g, _)| *g == rot) {
            Some((_, r)) => r.clone(),
            None => {
                let r = gauss_functional(curve, &rot, signed, cfg)?;
                seen.push((rot, r.clone()));
                r
            }
        };
        value += r.value;
        error += r.error;
    }
    Ok(FunctionalReport::new(value / m as f64, error / m as f64, "reduced", curve.len()).with_config(json!({
        "diagram": d.to_json(),
        "signed": signed,
        "distinct_rotations": seen.len(),
        "diagonal_skip": cfg.diagonal_skip,
    })))
}

/// Runs `f` once per sample, each chunk of samples on its own random stream,
/// and returns the mean and its standard error. Independent of thread count.
pub(crate) fn chunked_mc<F>(samples: usize, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut g = rng::stream(seed, c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut sum = 0.0;
            let mut sq = 0.0;
            for _ in 0..count {
                let v = f(&mut g);
                sum += v;
                sq += v * v;
            }
            (sum, sq)
        })
        .collect();
    let (sum, sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sq / m - mean * mean) * m / (m - 1.0)).max(0.0);
    (mean, (var / m).sqrt())
}

/// (1/4π)³ ∫_{C₃} ∫_{ℝ³} ⟨H(u₁,x), H(u₂,x), H(u₃,x)⟩ d³x du₁du₂du₃ with
/// H(u,x) = (γ(u) − x) × γ̇(u) / |γ(u) − x|³.
///
/// Three spline parameters are drawn independently; the sign of their cyclic
/// order folds the integral over all orderings onto the configuration space.
/// The ambient point is drawn from a mixture of a far-field density around
/// the centroid and three near-field densities ∝ 1/r² around the curve points.
pub fn i_y(curve: &KnotCurve, mc: &MCConfig) -> Result<FunctionalReport> {
    mc.validate()?;
    let spline = curve.spline();
    let period = spline.param_length();
    let length = curve.total_length();
    let s = mc.spatial_scale.unwrap_or_else(|| curve.diameter());
    let near = mc.near_radius.unwrap_or(length / 16.0);
    let excl = mc.exclusion.unwrap_or(1e-2 * length / curve.len() as f64);
    let centroid = curve.centroid();
    const W_FAR: f64 = 0.4;
    let w_near = (1.0 - W_FAR) / 3.0;
    let far_density = |x: Vec3| {
        let r2 = (x - centroid).norm_squared();
        3.0 * s * s / FOUR_PI * (s * s + r2).powf(-2.5)
    };
    let norm = period.powi(3) / 2.0 / FOUR_PI.powi(3);
    let (mean, se) = chunked_mc(mc.samples, mc.seed, |g| {
        let u: [f64; 3] = [0, 1, 2].map(|_| g.random_range(0.0..period));
        let frames = u.map(|t| spline.at_param(t));
        let pick: f64 = g.random();
        let x = if pick < W_FAR {
            let t = g.random::<f64>().cbrt();
            let rho = s * t / (1.0 - t * t).sqrt();
            centroid + rng::unit_vector(g) * rho
        } else {
            let k = (((pick - W_FAR) / w_near) as usize).min(2);
            let r = g.random_range(0.0..near);
            frames[k].0 + rng::unit_vector(g) * r
        };
        let mut density = W_FAR * far_density(x);
        let mut h = [Vec3::zeros(); 3];
        for k in 0..3 {
            let d = frames[k].0 - x;
            let r = d.norm();
            if r < excl {
                return 0.0;
            }
            if r < near {
                density += w_near / (FOUR_PI * near * r * r);
            }
            h[k] = d.cross(&frames[k].1) / (r * r * r);
        }
        let order = ((u[1] - u[0]) * (u[2] - u[1]) * (u[2] - u[0])).signum();
        order * h[0].dot(&h[1].cross(&h[2])) / density * norm
    });
    Ok(FunctionalReport::new(mean, se, "monte-carlo", curve.len()).with_config(json!({
        "samples": mc.samples,
        "seed": mc.seed,
        "spatial_scale": s,
        "near_radius": near,
        "exclusion": excl,
    })))
}

/// ¼I_X − ⅓I_Y + 1/24 with the X term on the grid and I_Y by Monte Carlo.
pub fn conway_a2_geometric(curve: &KnotCurve, cfg: &QuadratureConfig, mc: &MCConfig) -> Result<FunctionalReport> {
    let ix = gauss_functional(curve, &ChordDiagram::x_n(2), true, cfg)?;
    let iy = i_y(curve, mc)?;
    let value = 0.25 * ix.value - iy.value / 3.0 + 1.0 / 24.0;
    let error = (0.25 * ix.error).hypot(iy.error / 3.0);
    Ok(FunctionalReport::new(value, error, "a2:grid+monte-carlo", curve.len()).with_config(json!({
        "i_x": ix.value,
        "i_x_error": ix.error,
        "i_y": iy.value,
        "i_y_error": iy.error,
        "samples": mc.samples,
        "seed": mc.seed,
        "diagonal_skip": cfg.diagonal_skip,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ZooSpec;
    use nalgebra::Rotation3;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn planar_curves_have_no_writhe() {
        let c = ZooSpec::parse("ellipse:a=2,b=1,n=128").unwrap().sample().unwrap();
        assert!(writhe(&c, &cfg()).unwrap().value.abs() < 1e-6);
        let x = gauss_functional(&c, &ChordDiagram::x_n(2), true, &cfg()).unwrap();
        assert!(x.value.abs() < 1e-6);
    }

    #[test]
    fn writhe_symmetries() {
        let c = ZooSpec::trefoil(128).sample().unwrap();
        let w = writhe(&c, &cfg()).unwrap().value;
        assert!(w > 3.0, "{w}");
        let m = writhe(&c.mirrored().unwrap(), &cfg()).unwrap().value;
        assert!((w + m).abs() < 1e-9);
        let point = c.map_points(|p| -p).unwrap();
        assert!((writhe(&point, &cfg()).unwrap().value + w).abs() < 1e-9);
        let rot = Rotation3::from_euler_angles(1.0, 0.2, -0.7);
        let moved = c.map_points(|p| rot * p * 0.3 + Vec3::new(5.0, 1.0, 2.0)).unwrap();
        assert!((writhe(&moved, &cfg()).unwrap().value - w).abs() < 1e-9);
        let single = gauss_functional(&c, &ChordDiagram::single(), true, &cfg()).unwrap();
        assert!((single.value - w).abs() < 1e-12);
    }

    #[test]
    fn unsigned_dominates_and_labels_do_not_matter() {
        let c = ZooSpec::parse("twist:k=2,n=48").unwrap().sample().unwrap();
        for text in ["w", "X", "1-2,3-4", "1-4,2-5,3-6", "1-3,2-5,4-6"] {
            let d = ChordDiagram::parse(text).unwrap();
            let q = QuadratureConfig {
                richardson: false,
                ..cfg()
            };
            let s = gauss_functional(&c, &d, true, &q).unwrap().value;
            let u = gauss_functional(&c, &d, false, &q).unwrap().value;
            assert!(u >= s.abs() * (1.0 - 1e-12), "{text}: {u} < |{s}|");
        }
        // relabelling chords (listing them in another order) is the same diagram
        let a = ChordDiagram::parse("1-4,2-5,3-6").unwrap();
        let b = ChordDiagram::parse("3-6,1-4,2-5").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reduced_functional_cases() {
        let c = ZooSpec::trefoil(64).sample().unwrap();
        let q = QuadratureConfig {
            richardson: false,
            ..cfg()
        };
        let w = writhe(&c, &q).unwrap().value;
        let rw = reduced_functional(&c, &ChordDiagram::single(), true, &q).unwrap().value;
        assert!((w - rw).abs() < 1e-12);
        let x = gauss_functional(&c, &ChordDiagram::x_n(2), true, &q).unwrap().value;
        let rx = reduced_functional(&c, &ChordDiagram::x_n(2), true, &q).unwrap().value;
        assert!((x - rx).abs() < 1e-12);
        // two parallel chords: the orbit holds two distinct Gauss diagrams
        let d = ChordDiagram::parse("1-2,3-4").unwrap();
        let orbit: Vec<f64> = (0..4)
            .map(|k| gauss_functional(&c, &d.rotated(k), true, &q).unwrap().value)
            .collect();
        let mean = orbit.iter().sum::<f64>() / 4.0;
        let red = reduced_functional(&c, &d, true, &q).unwrap();
        assert!((red.value - mean).abs() < 1e-12);
        assert_eq!(red.config["distinct_rotations"], 2);
    }

    #[test]
    fn monte_carlo_matches_grid() {
        let c = ZooSpec::trefoil(128).sample().unwrap();
        let mc = MCConfig::new(200_000, 5);
        for (d, signed) in [(ChordDiagram::single(), true), (ChordDiagram::x_n(2), false)] {
            let grid = gauss_functional(&c, &d, signed, &cfg()).unwrap();
            let rand = gauss_functional_mc(&c, &d, signed, &mc).unwrap();
            assert!((grid.value - rand.value).abs() < 4.0 * rand.error + grid.error, "{grid:?} {rand:?}");
        }
    }

    #[test]
    fn four_chord_diagrams_need_monte_carlo() {
        let c = ZooSpec::trefoil(64).sample().unwrap();
        let d = ChordDiagram::x_n(4);
        assert!(gauss_functional(&c, &d, true, &cfg()).is_err());
        let r = gauss_functional_auto(&c, &d, false, &cfg(), &MCConfig::new(5000, 1)).unwrap();
        assert!(r.value > 0.0 && r.method == "monte-carlo");
    }

    #[test]
    fn iy_is_reproducible() {
        let c = ZooSpec::circle(1.0, 64).sample().unwrap();
        let mc = MCConfig::new(20_000, 3);
        let a = i_y(&c, &mc).unwrap();
        let b = i_y(&c, &mc).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| i_y(&c, &mc).unwrap());
        assert_eq!(a.value.to_bits(), single.value.to_bits());
        assert!(i_y(&c, &MCConfig::new(10, 3)).is_err());
    }

    #[test]
    fn iy_of_circle_is_one_eighth() {
        let c = ZooSpec::circle(1.0, 128).sample().unwrap();
        let r = i_y(&c, &MCConfig::new(400_000, 1)).unwrap();
        assert!((r.value - 0.125).abs() < 3.0 * r.error + 1e-3, "{r:?}");
    }
}
