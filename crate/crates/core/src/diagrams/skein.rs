use std::collections::HashSet;

use super::KnotDiagramCode;
use crate::{KnotError, Result};

/// Crossing count above which [`conway_a2_skein`] refuses to run.
pub const DEFAULT_CROSSING_BUDGET: usize = 200;

/// Coefficient of z² in the Conway polynomial.
///
/// Walks the diagram from its base point. The first crossing met first as an
/// under-crossing is switched, using
/// a₂(K₊) − a₂(K₋) = lk(K₀)
/// where K₀ is the two-component smoothing. Once every crossing is first met
/// from above the diagram is descending, hence unknotted, and a₂ = 0.
pub fn conway_a2_skein(code: &KnotDiagramCode) -> Result<i64> {
    conway_a2_skein_with_budget(code, DEFAULT_CROSSING_BUDGET)
}

pub fn conway_a2_skein_with_budget(code: &KnotDiagramCode, budget: usize) -> Result<i64> {
    if code.crossings() > budget {
        return Err(KnotError::Resource(format!(
            "{} crossings exceed the skein budget of {budget}",
            code.crossings()
        )));
    }
    let mut tokens = code.tokens().to_vec();
    let mut doubled = 0i64;
    loop {
        let mut seen = HashSet::new();
        let bad = tokens
            .iter()
            .find(|t| seen.insert(t.id) && !t.over)
            .map(|t| t.id);
        let Some(id) = bad else {
            return Ok(doubled / 2);
        };
        let (p, q) = positions(&tokens, id);
        let sign = i64::from(tokens[p].sign);
        // Crossings with exactly one passage strictly between p and q join the
        // two smoothed components; their signs sum to twice the linking number.
        let mut inside = HashSet::new();
        let mut once = HashSet::new();
        for t in &tokens[p + 1..q] {
            if !inside.insert(t.id) {
                once.remove(&t.id);
            } else {
                once.insert(t.id);
            }
        }
        let lk2: i64 = tokens
            .iter()
            .filter(|t| once.contains(&t.id))
            .map(|t| i64::from(t.sign))
            .sum::<i64>()
            / 2;
        doubled += sign * lk2;
        for k in [p, q] {
            tokens[k].over = !tokens[k].over;
            tokens[k].sign = -tokens[k].sign;
        }
    }
}

fn positions(tokens: &[super::CodeToken], id: usize) -> (usize, usize) {
    let mut it = tokens.iter().enumerate().filter(|(_, t)| t.id == id).map(|(p, _)| p);
    (it.next().unwrap(), it.next().unwrap())
}
