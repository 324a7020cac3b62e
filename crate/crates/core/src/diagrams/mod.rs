//! Chord diagrams, Gauss codes of knot projections and their combinatorics.

mod chord;
mod code;
pub mod moves;
mod skein;

pub use chord::{ChordDiagram, GaussDiagram};
pub use code::{CodeToken, KnotDiagramCode};
pub use skein::{conway_a2_skein, conway_a2_skein_with_budget, DEFAULT_CROSSING_BUDGET};

use crate::plat::Plat;
use crate::{KnotError, Result};

/// Pairs the two occurrences of each crossing.
pub fn chord_diagram_of(code: &KnotDiagramCode) -> ChordDiagram {
    let mut first = std::collections::HashMap::new();
    let mut pairs = Vec::with_capacity(code.crossings());
    for (pos, tok) in code.tokens().iter().enumerate() {
        if let Some(p) = first.remove(&tok.id) {
            pairs.push((p, pos));
        } else {
            first.insert(tok.id, pos);
        }
    }
    ChordDiagram::from_pairs(code.len(), &pairs).expect("codes pair every crossing")
}

/// Number of interleaved chord pairs of this diagram's chord diagram; an upper
/// bound for the X-crossing number of the knot type.
pub fn x_crossing_upper_bound(code: &KnotDiagramCode) -> usize {
    chord_diagram_of(code).intersecting_pairs()
}

/// Standard diagram codes: `unknot`, `torus2q:q=5` (or `torus2q(5)`),
/// `twist:k=3` (or `twist(3)`), `figure-eight`, `trefoil`.
pub fn zoo_code(name: &str) -> Result<KnotDiagramCode> {
    let name = name.trim();
    let (family, arg) = split_name(name);
    match family {
        "unknot" => Ok(KnotDiagramCode::unknot()),
        "trefoil" => torus2q_code(3),
        "figure-eight" | "figure8" | "4_1" => twist_code(2),
        "torus2q" => torus2q_code(parse_arg(name, arg, "q")?),
        "twist" => twist_code(parse_arg(name, arg, "k")?),
        _ => Err(KnotError::Domain(format!("unknown knot name `{name}`"))),
    }
}

fn split_name(name: &str) -> (&str, Option<&str>) {
    if let Some((f, rest)) = name.split_once(':') {
        return (f, Some(rest));
    }
    if let Some((f, rest)) = name.split_once('(') {
        return (f, Some(rest.trim_end_matches(')')));
    }
    (name, None)
}

fn parse_arg(name: &str, arg: Option<&str>, key: &str) -> Result<usize> {
    let arg = arg.ok_or_else(|| KnotError::Domain(format!("`{name}` needs {key}")))?;
    let raw = arg
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .unwrap_or(arg);
    raw.trim()
        .parse()
        .map_err(|_| KnotError::Domain(format!("bad {key} in `{name}`")))
}

/// The standard closed 2-braid diagram: chord diagram X_q, all crossings positive.
pub fn torus2q_code(q: usize) -> Result<KnotDiagramCode> {
    if q < 3 || q.is_multiple_of(2) {
        return Err(KnotError::Domain(format!("q must be odd and at least 3, got {q}")));
    }
    let tokens = (0..2 * q)
        .map(|k| CodeToken {
            id: k % q + 1,
            over: k % 2 == 0,
            sign: 1,
        })
        .collect();
    KnotDiagramCode::new(tokens)
}

pub fn twist_code(k: usize) -> Result<KnotDiagramCode> {
    Ok(Plat::twist(k)?.code())
}
