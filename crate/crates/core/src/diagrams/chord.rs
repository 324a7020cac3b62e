use serde::{Deserialize, Serialize};

use crate::{KnotError, Result};

/// A perfect matching on `2n` cyclically ordered positions.
///
/// Positions are 0-based internally; text and JSON use 1-based positions.
/// Equality is literal (same positions); use [`ChordDiagram::canonical`] to
/// compare up to rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChordDiagram {
    partner: Vec<usize>,
}

/// A chord diagram whose positions carry the order of the circle; the same data.
pub type GaussDiagram = ChordDiagram;

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    n: usize,
    pairs: Vec<[usize; 2]>,
}

impl ChordDiagram {
    pub fn from_pairs(points: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if points != 2 * pairs.len() {
            return Err(KnotError::Diagram(format!(
                "{} chords need {} endpoints, got {points}",
                pairs.len(),
                2 * pairs.len()
            )));
        }
        let mut partner = vec![usize::MAX; points];
        for &(a, b) in pairs {
            if a == b || a >= points || b >= points {
                return Err(KnotError::Diagram(format!("bad chord ({a}, {b})")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(KnotError::Diagram(format!("endpoint reused in ({a}, {b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Ok(Self { partner })
    }

    /// The one-chord diagram.
    pub fn single() -> Self {
        Self { partner: vec![1, 0] }
    }

    /// `n` mutually crossing chords: position `i` pairs with `i + n`.
    pub fn x_n(n: usize) -> Self {
        let partner = (0..2 * n).map(|i| (i + n) % (2 * n)).collect();
        Self { partner }
    }

    /// `w` (one chord), `X` (two crossing chords), `X5` (X_n), or an explicit
    /// pairing such as `1-3,2-4`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "w" => return Ok(Self::single()),
            "X" => return Ok(Self::x_n(2)),
            _ => {}
        }
        if let Some(k) = t.strip_prefix('X').or_else(|| t.strip_prefix("X_")) {
            let k = k.trim_start_matches('_');
            let n: usize = k
                .parse()
                .map_err(|_| KnotError::Diagram(format!("bad diagram `{t}`")))?;
            if n == 0 {
                return Err(KnotError::Diagram("X_0 has no chords".into()));
            }
            return Ok(Self::x_n(n));
        }
        let mut pairs = Vec::new();
        for chunk in t.split(',') {
            let (a, b) = chunk
                .split_once('-')
                .ok_or_else(|| KnotError::Diagram(format!("bad chord `{chunk}`")))?;
            let parse = |s: &str| -> Result<usize> {
                let v: usize = s
                    .trim()
                    .parse()
                    .map_err(|_| KnotError::Diagram(format!("bad position `{s}`")))?;
                v.checked_sub(1)
                    .ok_or_else(|| KnotError::Diagram("positions start at 1".into()))
            };
            pairs.push((parse(a)?, parse(b)?));
        }
        Self::from_pairs(2 * pairs.len(), &pairs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: DiagramJson = serde_json::from_str(text)?;
        if j.n != j.pairs.len() {
            return Err(KnotError::Diagram(format!(
                "n = {} but {} pairs given",
                j.n,
                j.pairs.len()
            )));
        }
        let mut pairs = Vec::with_capacity(j.n);
        for [a, b] in j.pairs {
            if a == 0 || b == 0 {
                return Err(KnotError::Diagram("positions start at 1".into()));
            }
            pairs.push((a - 1, b - 1));
        }
        Self::from_pairs(2 * j.n, &pairs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<[usize; 2]> = self.chords().iter().map(|&(a, b)| [a + 1, b + 1]).collect();
        serde_json::to_value(DiagramJson { n: self.n(), pairs }).expect("plain data")
    }

    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn points(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, pos: usize) -> usize {
        self.partner[pos]
    }

    /// Chords as `(a, b)` with `a < b`, sorted by `a`.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        (0..self.points())
            .filter(|&a| a < self.partner[a])
            .map(|a| (a, self.partner[a]))
            .collect()
    }

    pub fn chords_cross(a: (usize, usize), b: (usize, usize)) -> bool {
        let inside = |x: usize| a.0 < x && x < a.1;
        inside(b.0) != inside(b.1)
    }

    /// Number of unordered chord pairs whose endpoints interleave.
    pub fn intersecting_pairs(&self) -> usize {
        let chords = self.chords();
        let mut count = 0;
        for (k, &a) in chords.iter().enumerate() {
            count += chords[k + 1..]
                .iter()
                .filter(|&&b| Self::chords_cross(a, b))
                .count();
        }
        count
    }

    /// Forward offsets to partners, starting from position `start`.
    fn offset_word(&self, start: usize) -> Vec<usize> {
        let m = self.points();
        (0..m)
            .map(|k| {
                let p = (start + k) % m;
                (self.partner[p] + m - p) % m
            })
            .collect()
    }

    /// Lexicographically least offset word over all rotations; equal exactly
    /// for diagrams related by an orientation-preserving relabelling of the circle.
    pub fn canonical(&self) -> Vec<usize> {
        (0..self.points().max(1))
            .map(|s| self.offset_word(s))
            .min()
            .unwrap_or_default()
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.points() == other.points() && self.canonical() == other.canonical()
    }

    /// Rotates positions by `k` (position `p` becomes `p + k`).
    pub fn rotated(&self, k: usize) -> Self {
        let m = self.points();
        let mut partner = vec![0; m];
        for p in 0..m {
            partner[(p + k) % m] = (self.partner[p] + k) % m;
        }
        Self { partner }
    }

    /// The diagram induced on a subset of chords (given by their left endpoints).
    pub fn induced(&self, chords: &[(usize, usize)]) -> Self {
        let mut ends: Vec<usize> = chords.iter().flat_map(|&(a, b)| [a, b]).collect();
        ends.sort_unstable();
        let index = |x: usize| ends.binary_search(&x).unwrap();
        let pairs: Vec<_> = chords.iter().map(|&(a, b)| (index(a), index(b))).collect();
        Self::from_pairs(ends.len(), &pairs).expect("subset of a matching")
    }

    /// Number of chord subsets whose induced diagram is isomorphic to `pattern`.
    pub fn count_subdiagrams(&self, pattern: &Self) -> usize {
        let k = pattern.n();
        let chords = self.chords();
        if k > chords.len() {
            return 0;
        }
        if k == 0 {
            return 1;
        }
        if *pattern == Self::x_n(k) {
            return count_cliques(&chords, k);
        }
        let target = pattern.canonical();
        let mut count = 0;
        let mut pick = Vec::with_capacity(k);
        for_each_subset(chords.len(), k, &mut |idx| {
            pick.clear();
            pick.extend(idx.iter().map(|&i| chords[i]));
            if self.induced(&pick).canonical() == target {
                count += 1;
            }
        });
        count
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// k-cliques of the chord intersection graph.
fn count_cliques(chords: &[(usize, usize)], k: usize) -> usize {
    let n = chords.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && ChordDiagram::chords_cross(chords[i], chords[j]))
                .collect()
        })
        .collect();
    fn extend(adj: &[Vec<bool>], cand: &[usize], need: usize) -> usize {
        if need == 0 {
            return 1;
        }
        let mut total = 0;
        for (pos, &v) in cand.iter().enumerate() {
            let next: Vec<usize> = cand[pos + 1..].iter().copied().filter(|&u| adj[v][u]).collect();
            if next.len() + 1 >= need {
                total += extend(adj, &next, need - 1);
            }
        }
        total
    }
    let all: Vec<usize> = (0..n).collect();
    extend(&adj, &all, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn complete_diagrams() {
        for n in 1..=11 {
            let x = ChordDiagram::x_n(n);
            assert_eq!(x.intersecting_pairs(), n * (n - 1) / 2);
            for k in 1..=n {
                assert_eq!(x.count_subdiagrams(&ChordDiagram::x_n(k)), binom(n, k), "X{n} ⊃ X{k}");
            }
        }
        assert_eq!(ChordDiagram::x_n(3).count_subdiagrams(&ChordDiagram::single()), 3);
    }

    #[test]
    fn literals() {
        assert_eq!(ChordDiagram::parse("X").unwrap(), ChordDiagram::parse("1-3,2-4").unwrap());
        assert_eq!(ChordDiagram::parse("w").unwrap().n(), 1);
        assert_eq!(ChordDiagram::parse("X3").unwrap(), ChordDiagram::x_n(3));
        assert_eq!(ChordDiagram::parse("1-2,3-4").unwrap().intersecting_pairs(), 0);
        assert!(ChordDiagram::parse("1-2,2-3").is_err());
        assert!(ChordDiagram::parse("0-1").is_err());
        assert!(ChordDiagram::parse("1-5,2-3").is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = ChordDiagram::x_n(3);
        let text = d.to_json().to_string();
        assert_eq!(text, r#"{"n":3,"pairs":[[1,4],[2,5],[3,6]]}"#);
        assert_eq!(ChordDiagram::from_json(&text).unwrap(), d);
        assert!(ChordDiagram::from_json(r#"{"n":2,"pairs":[[1,2]]}"#).is_err());
    }

    #[test]
    fn canonical_form_separates_rotation_classes() {
        let a = ChordDiagram::parse("1-2,3-4").unwrap();
        let b = ChordDiagram::parse("1-4,2-3").unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(!a.is_isomorphic(&ChordDiagram::x_n(2)));
        let c = ChordDiagram::parse("1-3,2-5,4-6").unwrap();
        assert!(c.is_isomorphic(&c.rotated(4)));
    }

    fn diagram(n: usize) -> impl Strategy<Value = ChordDiagram> {
        Just((0..2 * n).collect::<Vec<_>>()).prop_shuffle().prop_map(move |perm| {
            let pairs: Vec<_> = perm.chunks(2).map(|c| (c[0], c[1])).collect();
            ChordDiagram::from_pairs(2 * n, &pairs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn pairs_equal_x2_subdiagrams(d in (1usize..=8).prop_flat_map(diagram)) {
            prop_assert_eq!(d.intersecting_pairs(), d.count_subdiagrams(&ChordDiagram::x_n(2)));
        }

        #[test]
        fn clique_count_matches_brute_force(d in (3usize..=7).prop_flat_map(diagram)) {
            let target = ChordDiagram::x_n(3).canonical();
            let chords = d.chords();
            let mut brute = 0;
            for_each_subset(chords.len(), 3, &mut |idx| {
                let pick: Vec<_> = idx.iter().map(|&i| chords[i]).collect();
                if d.induced(&pick).canonical() == target {
                    brute += 1;
                }
            });
            prop_assert_eq!(d.count_subdiagrams(&ChordDiagram::x_n(3)), brute);
        }

        #[test]
        fn rotation_preserves_class(d in (1usize..=6).prop_flat_map(diagram), k in 0usize..12) {
            prop_assert!(d.is_isomorphic(&d.rotated(k)));
            prop_assert_eq!(d.intersecting_pairs(), d.rotated(k).intersecting_pairs());
        }
    }
}
