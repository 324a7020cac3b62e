//! Reidemeister moves on Gauss codes, and a fixed catalogue of move pairs.

use super::{CodeToken, KnotDiagramCode};
use crate::plat::{Generator, Plat};
use crate::{KnotError, Result};

fn fresh_id(code: &KnotDiagramCode) -> usize {
    code.tokens().iter().map(|t| t.id).max().unwrap_or(0) + 1
}

/// First move: a small curl inserted before token `gap` (0..=len).
pub fn insert_kink(code: &KnotDiagramCode, gap: usize, over_first: bool, sign: i8) -> Result<KnotDiagramCode> {
    if gap > code.len() {
        return Err(KnotError::Domain(format!("gap {gap} out of range")));
    }
    let id = fresh_id(code);
    let mut tokens = code.tokens().to_vec();
    tokens.splice(
        gap..gap,
        [
            CodeToken { id, over: over_first, sign },
            CodeToken { id, over: !over_first, sign },
        ],
    );
    KnotDiagramCode::new(tokens)
}

/// Second move: the strand leaving one passage of crossing `id` is pushed
/// across the strand leaving the other passage, creating two crossings.
///
/// `finger_first` picks which passage carries the finger, `finger_over`
/// whether it passes above, and `same_order` whether the crossed strand meets
/// the two new crossings in the same order as the finger.
pub fn insert_finger(
    code: &KnotDiagramCode,
    id: usize,
    finger_first: bool,
    finger_over: bool,
    same_order: bool,
) -> Result<KnotDiagramCode> {
    let (p, q) = code
        .positions(id)
        .ok_or_else(|| KnotError::Domain(format!("no crossing {id}")))?;
    let (pa, pb) = if finger_first { (p, q) } else { (q, p) };
    let tok = code.tokens()[pa];
    // orientation of the pair (crossed strand, finger strand) at the crossing
    let sigma = if tok.over { tok.sign } else { -tok.sign };
    let down = if finger_over { -sigma } else { sigma };
    let (d, u) = (fresh_id(code), fresh_id(code) + 1);
    let finger = [
        CodeToken { id: d, over: finger_over, sign: down },
        CodeToken { id: u, over: finger_over, sign: -down },
    ];
    let mut crossed = [
        CodeToken { id: d, over: !finger_over, sign: down },
        CodeToken { id: u, over: !finger_over, sign: -down },
    ];
    if !same_order {
        crossed.swap(0, 1);
    }
    let mut tokens = code.tokens().to_vec();
    let (first, second) = if pa > pb { ((pa, finger), (pb, crossed)) } else { ((pb, crossed), (pa, finger)) };
    tokens.splice(first.0 + 1..first.0 + 1, first.1);
    tokens.splice(second.0 + 1..second.0 + 1, second.1);
    KnotDiagramCode::new(tokens)
}

fn g(index: usize, positive: bool) -> Generator {
    Generator { index, positive }
}

/// Pairs of plat words whose closures differ by one third move (a braid
/// relation σᵢσⱼσᵢ = σⱼσᵢσⱼ) or one second move (inserting σᵢσᵢ⁻¹).
pub fn plat_catalogue() -> Vec<(String, Vec<Generator>, Vec<Generator>)> {
    let mut out = Vec::new();
    let triples = [
        (0, 1, true),
        (0, 1, false),
        (1, 2, true),
        (1, 2, false),
    ];
    let contexts: Vec<(Vec<Generator>, Vec<Generator>)> = vec![
        (vec![g(1, true)], vec![g(0, false), g(1, true)]),
        (vec![g(1, true), g(1, true)], vec![g(0, false), g(1, true)]),
        (vec![g(1, false)], vec![g(0, true), g(2, false), g(1, false)]),
        (vec![], vec![g(1, true), g(0, false), g(1, true)]),
        (vec![g(1, true), g(0, false)], vec![g(1, true), g(2, true)]),
        (vec![g(1, false), g(1, false), g(1, false)], vec![g(0, true), g(1, false)]),
        (vec![g(1, true)], vec![]),
        (vec![], vec![g(1, false)]),
    ];
    for (ci, (pre, post)) in contexts.iter().enumerate() {
        for &(i, j, s) in &triples {
            let mut a = pre.clone();
            a.extend([g(i, s), g(j, s), g(i, s)]);
            a.extend(post.iter().copied());
            let mut b = pre.clone();
            b.extend([g(j, s), g(i, s), g(j, s)]);
            b.extend(post.iter().copied());
            let name = format!("R3 context {ci} σ{}σ{}σ{} {}", i + 1, j + 1, i + 1, if s { "+" } else { "-" });
            out.push((name, a, b));
        }
        for i in 0..3 {
            for s in [true, false] {
                let a: Vec<Generator> = pre.iter().chain(post.iter()).copied().collect();
                let mut b = pre.clone();
                b.extend([g(i, s), g(i, !s)]);
                b.extend(post.iter().copied());
                out.push((format!("R2 context {ci} σ{}{}", i + 1, if s { "+-" } else { "-+" }), a, b));
            }
        }
    }
    // only pairs whose closures are knots rather than links
    out.retain(|(_, a, b)| Plat::new(a.clone()).is_ok() && Plat::new(b.clone()).is_ok());
    out
}

/// Named pairs of codes related by a single Reidemeister move.
pub fn catalogue() -> Result<Vec<(String, KnotDiagramCode, KnotDiagramCode)>> {
    let mut out = Vec::new();
    let bases = [
        ("trefoil", super::torus2q_code(3)?),
        ("figure-eight", KnotDiagramCode::parse("O1+ U2+ O3- U4- O2+ U1+ O4- U3-")?),
        ("twist(3)", super::twist_code(3)?),
        ("unknot", KnotDiagramCode::unknot()),
    ];
    for (name, code) in &bases {
        for gap in 0..=code.len() {
            for (over_first, sign) in [(true, 1), (true, -1), (false, 1), (false, -1)] {
                out.push((
                    format!("R1 {name} gap {gap} {}{}", if over_first { 'O' } else { 'U' }, if sign > 0 { '+' } else { '-' }),
                    code.clone(),
                    insert_kink(code, gap, over_first, sign)?,
                ));
            }
        }
        for id in 1..=code.crossings() {
            for mask in 0..8u8 {
                let (ff, fo, so) = (mask & 1 != 0, mask & 2 != 0, mask & 4 != 0);
                out.push((
                    format!("R2 {name} at {id} [{ff} {fo} {so}]"),
                    code.clone(),
                    insert_finger(code, id, ff, fo, so)?,
                ));
            }
        }
    }
    for (name, a, b) in plat_catalogue() {
        out.push((name, Plat::new(a)?.code(), Plat::new(b)?.code()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::conway_a2_skein;

    #[test]
    fn catalogue_preserves_a2() {
        let cat = catalogue().unwrap();
        assert!(cat.len() > 100);
        for (name, a, b) in cat {
            assert_eq!(conway_a2_skein(&a).unwrap(), conway_a2_skein(&b).unwrap(), "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn moves_change_crossing_count() {
        let tre = crate::diagrams::torus2q_code(3).unwrap();
        assert_eq!(insert_kink(&tre, 2, true, -1).unwrap().crossings(), 4);
        assert_eq!(insert_finger(&tre, 1, true, true, true).unwrap().crossings(), 5);
        assert!(insert_kink(&tre, 7, true, 1).is_err());
        assert!(insert_finger(&tre, 9, true, true, true).is_err());
    }

    #[test]
    fn braid_relation_changes_the_code() {
        let cat = plat_catalogue();
        assert!(cat.iter().filter(|(n, _, _)| n.starts_with("R3")).count() >= 8);
        assert!(cat.iter().filter(|(n, _, _)| n.starts_with("R2")).count() >= 8);
        for (name, a, b) in cat.into_iter().filter(|(n, _, _)| n.starts_with("R3")) {
            let (ca, cb) = (Plat::new(a).unwrap().code(), Plat::new(b).unwrap().code());
            assert_eq!(ca.crossings(), cb.crossings(), "{name}");
            assert_ne!(ca, cb, "{name}");
        }
    }
}
