//! Rejection-controlled gradient descent of a Möbius energy.
//!
//! Each iteration takes a central-difference gradient per vertex, drops its
//! tangential part, smooths it with a Fourier filter of order three (the
//! energies behave like an H^{3/2} seminorm, so the raw gradient is dominated
//! by high modes), and tries a step. A step is kept only if the curve stays
//! embedded and the energy does not increase.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::energies::{energy_value, EnergyKind};
use crate::{KnotCurve, KnotError, Result, Vec3};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowConfig {
    pub energy: EnergyKind,
    /// Maximum number of accepted steps.
    pub steps: usize,
    /// Initial largest vertex displacement per step, for a curve of length 2π.
    pub step_size: f64,
    /// Resample by arclength (and fix the gauge) after this many accepted steps; 0 disables.
    pub resample_every: usize,
    /// Finite-difference increment.
    pub gradient_eps: f64,
    pub diagonal_skip: usize,
    /// Stop once the energy is at or below this value.
    pub target: Option<f64>,
    /// Keep a curve snapshot every this many accepted steps; 0 keeps only the last.
    pub snapshot_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            energy: EnergyKind::E,
            steps: 500,
            step_size: 0.05,
            resample_every: 10,
            gradient_eps: 1e-6,
            diagonal_skip: 1,
            target: None,
            snapshot_every: 0,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.energy, EnergyKind::E | EnergyKind::Ecos | EnergyKind::Esin) {
            return Err(KnotError::Domain(format!("cannot flow {}", self.energy.name())));
        }
        if self.steps == 0 || !(self.step_size > 0.0) || !(self.gradient_eps > 0.0) || self.diagonal_skip == 0 {
            return Err(KnotError::Domain(
                "steps, step_size, gradient_eps and diagonal_skip must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    /// Ran the requested number of accepted steps.
    Completed,
    /// Reached the target energy.
    Converged,
    /// The step size underflowed without an accepted step.
    Stuck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub step: usize,
    pub energy: f64,
    pub step_size: f64,
    pub rejected: usize,
    pub resampled: bool,
    pub snapshot: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Record 0 is the (gauge-fixed) input.
    pub records: Vec<FlowRecord>,
    pub snapshots: Vec<KnotCurve>,
    pub status: FlowStatus,
    pub curve: KnotCurve,
}

impl Trajectory {
    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.energy)
    }

    pub fn accepted_steps(&self) -> usize {
        self.records.len() - 1
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }
}

const MIN_STEP: f64 = 1e-12;
/// Largest displacement as a fraction of the current self-distance.
const GAP_FRACTION: f64 = 0.25;

fn value(points: &[Vec3], cfg: &FlowConfig) -> Option<f64> {
    let c = KnotCurve::build(points.to_vec()).ok()?;
    let v = energy_value(&c, cfg.energy, cfg.diagonal_skip);
    v.is_finite().then_some(v)
}

/// Translate the centroid to the origin and scale to length 2π.
fn gauge_fixed(curve: &KnotCurve) -> Result<KnotCurve> {
    let c = curve.centroid();
    let s = 2.0 * PI / curve.total_length();
    KnotCurve::new(curve.points().iter().map(|p| (p - c) * s).collect())
}

fn gradient(curve: &KnotCurve, cfg: &FlowConfig) -> Vec<Vec3> {
    let pts = curve.points();
    let h = cfg.gradient_eps;
    (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut g = Vec3::zeros();
            let mut work = pts.to_vec();
            for axis in 0..3 {
                work[i][axis] = pts[i][axis] + h;
                let up = value(&work, cfg).unwrap_or(f64::NAN);
                work[i][axis] = pts[i][axis] - h;
                let down = value(&work, cfg).unwrap_or(f64::NAN);
                work[i][axis] = pts[i][axis];
                g[axis] = (up - down) / (2.0 * h);
            }
            let t = curve.tangents()[i];
            g - t * g.dot(&t)
        })
        .collect()
}

/// Damps Fourier mode k of each coordinate by (1 + |k|)^{-3}.
fn smooth(g: &[Vec3]) -> Vec<Vec3> {
    let n = g.len();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut out = vec![Vec3::zeros(); n];
    for axis in 0..3 {
        let mut buf: Vec<Complex64> = g.iter().map(|v| Complex64::new(v[axis], 0.0)).collect();
        forward.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            let freq = k.min(n - k) as f64;
            *c /= n as f64 * (1.0 + freq).powi(3);
        }
        inverse.process(&mut buf);
        for (o, c) in out.iter_mut().zip(&buf) {
            o[axis] = c.re;
        }
    }
    out
}

/// Runs the flow from `curve`.
pub fn relax(curve: &KnotCurve, cfg: &FlowConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let mut cur = gauge_fixed(curve)?;
    let mut energy = value(cur.points(), cfg)
        .ok_or_else(|| KnotError::Domain("energy of the input is not finite".into()))?;
    let mut snapshots = Vec::new();
    let mut records = vec![FlowRecord {
        step: 0,
        energy,
        step_size: cfg.step_size,
        rejected: 0,
        resampled: false,
        snapshot: None,
    }];
    let mut tau = cfg.step_size;
    let mut status = FlowStatus::Completed;
    let done = |e: f64| cfg.target.is_some_and(|t| e <= t);

    while records.len() <= cfg.steps {
        if done(energy) {
            status = FlowStatus::Converged;
            break;
        }
        let dir = smooth(&gradient(&cur, cfg));
        let biggest = dir.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if !(biggest > 0.0) {
            status = FlowStatus::Stuck;
            break;
        }
        let (gap, _, _) = cur.min_segment_gap();
        let mut rejected = 0;
        let next = loop {
            tau = tau.min(GAP_FRACTION * gap);
            if tau < MIN_STEP {
                break None;
            }
            let pts: Vec<Vec3> = cur.points().iter().zip(&dir).map(|(p, d)| p - d * (tau / biggest)).collect();
            let trial = KnotCurve::new(pts).ok().and_then(|c| {
                let e = value(c.points(), cfg)?;
                (e <= energy).then_some((c, e))
            });
            match trial {
                Some(t) => break Some(t),
                None => {
                    rejected += 1;
                    tau *= 0.5;
                }
            }
        };
        let Some((mut c, mut e)) = next else {
            status = FlowStatus::Stuck;
            break;
        };
        tau *= 1.2;
        let step = records.len();
        let mut resampled = false;
        if cfg.resample_every > 0 && step % cfg.resample_every == 0 {
            if let Ok(r) = c.resample_arclength(c.len()).and_then(|r| gauge_fixed(&r)) {
                if let Some(er) = value(r.points(), cfg).filter(|&er| er <= e) {
                    c = r;
                    e = er;
                    resampled = true;
                }
            }
        }
        let snapshot = (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0).then(|| {
            snapshots.push(c.clone());
            snapshots.len() - 1
        });
        cur = c;
        energy = e;
        records.push(FlowRecord {
            step,
            energy,
            step_size: tau,
            rejected,
            resampled,
            snapshot,
        });
    }
    if status == FlowStatus::Completed && done(energy) {
        status = FlowStatus::Converged;
    }
    if snapshots.is_empty() || records.last().and_then(|r| r.snapshot).is_none() {
        snapshots.push(cur.clone());
        if let Some(r) = records.last_mut() {
            r.snapshot = Some(snapshots.len() - 1);
        }
    }
    Ok(Trajectory {
        records,
        snapshots,
        status,
        curve: cur,
    })
}
