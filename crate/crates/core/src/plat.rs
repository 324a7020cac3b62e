//! Four-strand plat closures of braid words.
//!
//! A word on generators σ₁, σ₂, σ₃ (0-based indices 0, 1, 2 below) is drawn
//! as columns of crossings between four horizontal strands at heights 0..3;
//! caps join heights (0,1) and (2,3) on both sides. Twist knots are plat
//! closures of σ₂ᵏ σ₁⁻¹ σ₂.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::diagrams::{CodeToken, KnotDiagramCode};
use crate::{KnotError, Result, Vec3};

/// One braid generator: strands at heights `index` and `index + 1` cross.
/// Positive means the strand rising from `index` to `index + 1` (left to right) passes over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub index: usize,
    pub positive: bool,
}

#[derive(Clone, Debug)]
pub struct Plat {
    word: Vec<Generator>,
}

/// Vertical offset of the over/under strands at the middle of a column.
const LIFT: f64 = 0.35;

struct Pass {
    column: usize,
    /// Height on the left side of the column.
    left: usize,
    forward: bool,
    moves: bool,
}

impl Plat {
    pub fn new(word: Vec<Generator>) -> Result<Self> {
        if word.iter().any(|g| g.index > 2) {
            return Err(KnotError::Domain("plat generators are 0, 1, 2".into()));
        }
        let plat = Self { word };
        plat.passes()?;
        Ok(plat)
    }

    /// σ₂ᵏ σ₁⁻¹ σ₂: the k-half-twist twist knot (k = 1 trefoil, k = 2 figure-eight).
    pub fn twist(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(KnotError::Domain("twist count must be positive".into()));
        }
        let mut word = vec![
            Generator {
                index: 1,
                positive: true
            };
            k
        ];
        word.push(Generator {
            index: 0,
            positive: false,
        });
        word.push(Generator {
            index: 1,
            positive: true,
        });
        Self::new(word)
    }

    /// Traces the single component starting at height 0 heading right.
    fn passes(&self) -> Result<Vec<Pass>> {
        let cols = self.word.len();
        let mut out = Vec::new();
        let mut pos = 0usize;
        let mut forward = true;
        loop {
            let order: Vec<usize> = if forward {
                (0..cols).collect()
            } else {
                (0..cols).rev().collect()
            };
            for c in order {
                let g = self.word[c];
                let moves = pos == g.index || pos == g.index + 1;
                let next = if moves { 2 * g.index + 1 - pos } else { pos };
                let left = if forward { pos } else { next };
                out.push(Pass {
                    column: c,
                    left,
                    forward,
                    moves,
                });
                pos = next;
            }
            pos ^= 1;
            forward = !forward;
            if forward && pos == 0 {
                break;
            }
            if out.len() > 4 * cols + 4 {
                break;
            }
        }
        if out.len() != 4 * cols {
            return Err(KnotError::Domain("plat closure is not a knot".into()));
        }
        Ok(out)
    }

    /// Gauss code of the plat diagram viewed from +z.
    pub fn code(&self) -> KnotDiagramCode {
        let passes = self.passes().expect("validated on construction");
        // Per column: tangent of the over and under strands, for the sign.
        let mut tangents: HashMap<usize, [(f64, f64); 2]> = HashMap::new();
        let mut raw = Vec::new();
        for p in passes.iter().filter(|p| p.moves) {
            let g = self.word[p.column];
            let rising = p.left == g.index;
            let over = rising == g.positive;
            let d = if p.forward { 1.0 } else { -1.0 };
            let t = if rising { (d, d) } else { (d, -d) };
            tangents.entry(p.column).or_insert([(0.0, 0.0); 2])[usize::from(over)] = t;
            raw.push((p.column, over));
        }
        let mut ids = HashMap::new();
        let tokens = raw
            .into_iter()
            .map(|(c, over)| {
                let next = ids.len() + 1;
                let id = *ids.entry(c).or_insert(next);
                let [tu, to] = tangents[&c];
                let sign = if tu.0 * to.1 - tu.1 * to.0 > 0.0 { 1 } else { -1 };
                CodeToken { id, over, sign }
            })
            .collect();
        KnotDiagramCode::new(tokens).expect("plat traces are valid codes")
    }

    /// Dense polygon realising the diagram in space, over strands lifted to +z.
    pub fn polyline(&self, per_unit: usize) -> Vec<Vec3> {
        let per_unit = per_unit.max(8);
        let cols = self.word.len() as f64;
        let mut pts = Vec::new();
        let passes = self.passes().expect("validated on construction");
        for (k, p) in passes.iter().enumerate() {
            let g = self.word[p.column];
            let rising = p.left == g.index;
            let lift = if !p.moves {
                0.0
            } else if rising == g.positive {
                LIFT
            } else {
                -LIFT
            };
            let (y0, dy) = if !p.moves {
                (p.left as f64, 0.0)
            } else if rising {
                (p.left as f64, 1.0)
            } else {
                (p.left as f64, -1.0)
            };
            for m in 0..per_unit {
                let f = m as f64 / per_unit as f64;
                let s = if p.forward { f } else { 1.0 - f };
                let x = p.column as f64 + s;
                let y = y0 + dy * (1.0 - (PI * s).cos()) / 2.0;
                let z = lift * (PI * s).sin().powi(2);
                pts.push(Vec3::new(x, y, z));
            }
            // A cap follows the last pass of each sweep.
            let sweep_end = (k + 1) % self.word.len() == 0;
            if sweep_end {
                let right_side = p.forward;
                let exit = if p.forward {
                    if p.moves {
                        (2 * g.index + 1 - p.left) as f64
                    } else {
                        p.left as f64
                    }
                } else {
                    p.left as f64
                };
                let other = ((exit as usize) ^ 1) as f64;
                let cy = (exit + other) / 2.0;
                let x0 = if right_side { cols } else { 0.0 };
                let bulge = if right_side { 1.0 } else { -1.0 };
                let up = if other > exit { 1.0 } else { -1.0 };
                let cap_pts = per_unit * 3 / 2;
                for m in 0..cap_pts {
                    let phi = PI * m as f64 / cap_pts as f64;
                    // starts at (x0, exit), sweeps through the bulge to (x0, other)
                    let x = x0 + bulge * 0.5 * phi.sin();
                    let y = cy - up * 0.5 * phi.cos();
                    pts.push(Vec3::new(x, y, 0.0));
                }
            }
        }
        pts
    }
}
