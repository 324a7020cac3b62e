//! Möbius energies E, E_cos, E_sin and the X-energies E_cos,X, E_sin,X.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cyclic::{self, PairKernel};
use crate::{FunctionalReport, KnotCurve, KnotError, Result, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    E,
    Ecos,
    Esin,
    Ecosx,
    Esinx,
}

impl EnergyKind {
    pub const ALL: [EnergyKind; 5] = [Self::E, Self::Ecos, Self::Esin, Self::Ecosx, Self::Esinx];

    pub fn name(self) -> &'static str {
        match self {
            Self::E => "e",
            Self::Ecos => "ecos",
            Self::Esin => "esin",
            Self::Ecosx => "ecosx",
            Self::Esinx => "esinx",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(text))
            .ok_or_else(|| KnotError::Domain(format!("unknown energy `{text}`")))
    }

    fn pair_kind(self) -> PairEnergy {
        match self {
            Self::E => PairEnergy::E,
            Self::Ecos | Self::Ecosx => PairEnergy::Cos,
            Self::Esin | Self::Esinx => PairEnergy::Sin,
        }
    }

    fn is_x(self) -> bool {
        matches!(self, Self::Ecosx | Self::Esinx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairEnergy {
    E,
    Cos,
    Sin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Neighbour offsets `1..=diagonal_skip` are filled from the first offset outside.
    pub diagonal_skip: usize,
    /// Also evaluate at N/2 and report the difference as the error.
    pub richardson: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            diagonal_skip: 1,
            richardson: true,
        }
    }
}

/// (1 − cos α, sin α) for the pair (i, j), from the reflected tangent.
#[inline]
fn angle_terms(pi: Vec3, ti: Vec3, pj: Vec3, tj: Vec3) -> (f64, f64, f64) {
    let chord = pj - pi;
    let c2 = chord.norm_squared();
    let w = chord / c2.sqrt();
    let reflected = w * (2.0 * ti.dot(&w)) - ti;
    let one_minus_cos = 0.5 * (reflected - tj).norm_squared();
    let sin = reflected.cross(&tj).norm();
    (c2, one_minus_cos, sin)
}

fn pair_kernel(curve: &KnotCurve, kind: PairEnergy, skip: usize) -> PairKernel {
    let p = curve.points();
    let t = curve.tangents();
    PairKernel::build(curve, skip, |i, j| {
        let (c2, omc, sin) = angle_terms(p[i], t[i], p[j], t[j]);
        match kind {
            PairEnergy::E => {
                let d = curve.arc_distance(i, j);
                1.0 / c2 - 1.0 / (d * d)
            }
            PairEnergy::Cos => omc / c2,
            PairEnergy::Sin => sin / c2,
        }
    })
}

/// The weighted pair kernel of an energy, as used by its quadrature.
pub fn energy_kernel(curve: &KnotCurve, kind: EnergyKind, skip: usize) -> PairKernel {
    pair_kernel(curve, kind.pair_kind(), skip)
}

fn raw_value(curve: &KnotCurve, kind: EnergyKind, skip: usize) -> f64 {
    let k = pair_kernel(curve, kind.pair_kind(), skip);
    if kind.is_x() {
        cyclic::x_sum(&k)
    } else {
        k.total()
    }
}

pub fn energy(curve: &KnotCurve, kind: EnergyKind, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    if cfg.diagonal_skip == 0 {
        return Err(KnotError::Domain("diagonal_skip must be at least 1".into()));
    }
    let n = curve.len();
    let value = raw_value(curve, kind, cfg.diagonal_skip);
    let half = n / 2;
    let (error, method) = if cfg.richardson && half >= crate::curve::MIN_SAMPLES {
        let coarse = curve.resample_arclength(half)?;
        let v2 = raw_value(&coarse, kind, cfg.diagonal_skip);
        ((value - v2).abs(), "grid+richardson")
    } else {
        (0.0, "grid")
    };
    Ok(FunctionalReport::new(value, error, format!("{}:{method}", kind.name()), n).with_config(json!({
        "energy": kind.name(),
        "diagonal_skip": cfg.diagonal_skip,
        "richardson": cfg.richardson,
        "total_length": curve.total_length(),
    })))
}

pub fn energy_e(curve: &KnotCurve, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    energy(curve, EnergyKind::E, cfg)
}

pub fn energy_ecos(curve: &KnotCurve, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    energy(curve, EnergyKind::Ecos, cfg)
}

pub fn energy_esin(curve: &KnotCurve, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    energy(curve, EnergyKind::Esin, cfg)
}

pub fn energy_ecos_x(curve: &KnotCurve, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    energy(curve, EnergyKind::Ecosx, cfg)
}

pub fn energy_esin_x(curve: &KnotCurve, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    energy(curve, EnergyKind::Esinx, cfg)
}

/// ∫ (1 − cos α(u, v)) / |γ(u) − γ(v)|² dv at the fixed vertex `i`.
pub fn inner_ecos(curve: &KnotCurve, i: usize, skip: usize) -> f64 {
    let k = pair_kernel(curve, PairEnergy::Cos, skip);
    k.row_total(i) / curve.weights()[i]
}

/// Plain energy value without error estimate (used inside the flow).
pub(crate) fn energy_value(curve: &KnotCurve, kind: EnergyKind, skip: usize) -> f64 {
    raw_value(curve, kind, skip)
}
