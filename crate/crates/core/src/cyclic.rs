//! Grid sums over cyclic configuration spaces of a sampled curve.
//!
//! A configuration of `m` points is a tuple `t₀ ≤ t₁ ≤ … ≤ t_{m−1} ≤ t₀ + N`
//! of grid indices with `t₀ ∈ [0, N)`. Coincident neighbours (including the
//! wrap-around pair `t_{m−1}, t₀ + N`) each contribute a factor ½, which makes
//! every sum the product trapezoid rule on the simplex and keeps the scheme
//! second order.

use rayon::prelude::*;

use crate::diagrams::GaussDiagram;
use crate::KnotCurve;

/// Dense weighted pair kernel `W(i, j) = k(i, j)·Δsᵢ·Δsⱼ`.
#[derive(Clone, Debug)]
pub struct PairKernel {
    n: usize,
    data: Vec<f64>,
}

impl PairKernel {
    /// Evaluates `k` off the band `|i − j| ≤ skip` (cyclically). Inside the band
    /// each row is extended by the mean of its first values outside the band,
    /// symmetrised across the diagonal.
    pub fn build<F>(curve: &KnotCurve, skip: usize, k: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let n = curve.len();
        let skip = skip.min(n / 2 - 1);
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                if cyclic_gap(i, j, n) > skip {
                    *slot = k(i, j);
                }
            }
        });
        let edge: Vec<f64> = (0..n)
            .map(|i| 0.5 * (data[i * n + (i + skip + 1) % n] + data[i * n + (i + n - skip - 1) % n]))
            .collect();
        let w = curve.weights();
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                if cyclic_gap(i, j, n) <= skip {
                    *slot = 0.5 * (edge[i] + edge[j]);
                }
                *slot *= w[i] * w[j];
            }
        });
        Self { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i % self.n) * self.n + j % self.n]
    }

    pub fn abs(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    fn row_sums(&self) -> Vec<f64> {
        self.data.par_chunks(self.n).map(|r| r.iter().sum()).collect()
    }

    /// Sum over the whole torus: the one-chord configuration space.
    pub fn total(&self) -> f64 {
        self.row_sums().iter().sum()
    }

    /// Row `i` alone: the inner integral at a fixed point.
    pub fn row_total(&self, i: usize) -> f64 {
        self.data[i * self.n..(i + 1) * self.n].iter().sum()
    }
}

fn cyclic_gap(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Integral over four cyclically ordered points with chords (0,2) and (1,3)
/// of `W(t₀,t₂)·W(t₁,t₃)`, in O(N²) using 2-D prefix sums.
pub fn x_sum(k: &PairKernel) -> f64 {
    let n = k.len();
    let m = 2 * n;
    // p[(i)(m+1) + j] = Σ_{i'<i, j'<j} W(i', j') on the doubled index range
    let mut p = vec![0.0; (m + 1) * (m + 1)];
    for i in 0..m {
        let mut run = 0.0;
        for j in 0..m {
            run += k.get(i, j);
            p[(i + 1) * (m + 1) + j + 1] = p[i * (m + 1) + j + 1] + run;
        }
    }
    let block = |b0: usize, b1: usize, d0: usize, d1: usize| -> f64 {
        if b1 < b0 || d1 < d0 {
            return 0.0;
        }
        let at = |i: usize, j: usize| p[i * (m + 1) + j];
        at(b1 + 1, d1 + 1) - at(b0, d1 + 1) - at(b1 + 1, d0) + at(b0, d0)
    };
    let rows = k.row_sums();
    let per_a: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let e = a + n;
            let mut acc = 0.5 * k.get(a, a) * rows[a];
            for c in a + 1..e {
                // trapezoid weights ½ at the ends of both ranges
                let inner = block(a, c, c, e)
                    + block(a + 1, c - 1, c, e)
                    + block(a, c, c + 1, e - 1)
                    + block(a + 1, c - 1, c + 1, e - 1);
                acc += k.get(a, c) * 0.25 * inner;
            }
            acc
        })
        .collect();
    per_a.iter().sum()
}

/// Direct enumeration of the configuration space of `d.points()` ordered
/// points, each chord of `d` contributing its kernel. Cost O(N^{2n}/(2n−1)!);
/// intended for n ≤ 3 and as an oracle for the fast paths.
pub fn diagram_sum(k: &PairKernel, d: &GaussDiagram) -> f64 {
    let n = k.len();
    let m = d.points();
    if m == 0 {
        return 1.0;
    }
    let per_start: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|t0| {
            let mut t = vec![0usize; m];
            t[0] = t0;
            let mut acc = 0.0;
            walk(k, d, &mut t, 1, 1.0, 1.0, &mut acc);
            acc
        })
        .collect();
    per_start.iter().sum()
}

fn walk(k: &PairKernel, d: &GaussDiagram, t: &mut [usize], pos: usize, weight: f64, prod: f64, acc: &mut f64) {
    let n = k.len();
    let m = t.len();
    if pos == m {
        let close = if t[m - 1] == t[0] + n { 0.5 } else { 1.0 };
        *acc += weight * close * prod;
        return;
    }
    let prev = t[pos - 1];
    for v in prev..=t[0] + n {
        t[pos] = v;
        let w = if v == prev { weight * 0.5 } else { weight };
        let partner = d.partner(pos);
        let p = if partner < pos { prod * k.get(t[partner], v) } else { prod };
        if p == 0.0 {
            continue;
        }
        walk(k, d, t, pos + 1, w, p, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::ChordDiagram;
    use crate::{rng, ZooSpec};
    use rand::Rng;

    fn random_kernel(n: usize, seed: u64) -> PairKernel {
        let mut g = rng::stream(seed, 0);
        let vals: Vec<f64> = (0..n * n).map(|_| g.random_range(-1.0..1.0)).collect();
        PairKernel::from_fn(n, |i, j| vals[i.min(j) * n + i.max(j)])
    }

    #[test]
    fn x_fast_path_matches_enumeration() {
        for n in [5, 12, 48] {
            let k = random_kernel(n, n as u64);
            let fast = x_sum(&k);
            let slow = diagram_sum(&k, &ChordDiagram::x_n(2));
            assert!((fast - slow).abs() <= 1e-10 * slow.abs().max(1.0), "{n}: {fast} vs {slow}");
        }
    }

    #[test]
    fn one_chord_is_the_torus_sum() {
        let k = random_kernel(20, 3);
        let slow = diagram_sum(&k, &ChordDiagram::single());
        assert!((slow - k.total()).abs() < 1e-12);
    }

    #[test]
    fn constant_kernel_gives_simplex_volume() {
        // all-ones kernel → N^{2n}/(2n−1)!, up to O(N^{2n−2})
        let n = 30;
        let nf = n as f64;
        let k = PairKernel::from_fn(n, |_, _| 1.0);
        let x = x_sum(&k);
        assert!((x - nf.powi(4) / 6.0).abs() <= nf * nf, "{x}");
        let three = diagram_sum(&k, &ChordDiagram::x_n(3));
        assert!((three - nf.powi(6) / 120.0).abs() <= nf.powi(4), "{three}");
    }

    #[test]
    fn band_fill_is_symmetric_and_weighted() {
        let c = ZooSpec::parse("ellipse:a=2,b=1,n=64").unwrap().sample().unwrap();
        let p = c.points().to_vec();
        let k = PairKernel::build(&c, 1, |i, j| (p[i] - p[j]).norm());
        for i in 0..64 {
            for j in 0..64 {
                assert!((k.get(i, j) - k.get(j, i)).abs() < 1e-15);
            }
        }
        let w = c.weights();
        let expect = (p[3] - p[9]).norm() * w[3] * w[9];
        assert!((k.get(3, 9) - expect).abs() < 1e-15);
    }
}
