//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use firestorm_core::corpus::Tweet;
use statrs::function::gamma::ln_gamma;

/// Exhaustive penalized segmentation over all 2^(n-1) split sets.
/// Returns `(changepoints, total_cost)` with changepoints as segment ends.
pub fn brute_force_segmentation(y: &[f64], penalty: f64) -> (Vec<usize>, f64) {
    let n = y.len();
    assert!(n <= 22, "exhaustive search only for short series");
    let seg = |a: usize, b: usize| {
        let s = &y[a..=b];
        let m = s.iter().sum::<f64>() / s.len() as f64;
        s.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
    };
    let mut best = (Vec::new(), f64::INFINITY);
    for mask in 0u32..(1 << (n - 1)) {
        let cps: Vec<usize> = (0..n - 1).filter(|i| mask & (1 << i) != 0).collect();
        let mut total = 0.0;
        let mut start = 0;
        for &c in cps.iter().chain(std::iter::once(&(n - 1))) {
            total += seg(start, c);
            start = c + 1;
        }
        total += penalty * cps.len() as f64;
        if total < best.1 - 1e-12 {
            best = (cps, total);
        }
    }
    best
}

/// Elbow rule evaluated directly from its definition.
pub fn elbow_oracle(counts: &[usize]) -> usize {
    let c: Vec<f64> = counts.iter().map(|&x| x as f64).collect();
    let mut scores: Vec<(f64, usize)> = (1..c.len() - 1)
        .map(|i| ((c[i + 1] + c[i - 1] - 2.0 * c[i]).abs(), i))
        .collect();
    // largest score first, then smallest index
    scores.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    scores[0].1
}

/// Welch statistics with a two-sided p-value obtained by integrating the
/// Student-t density with composite Gauss-Legendre quadrature.
pub fn welch_oracle(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (n, m, var)
    };
    let (na, ma, va) = stats(a);
    let (nb, mb, vb) = stats(b);
    let (sa, sb) = (va / na, vb / nb);
    let t = (ma - mb) / (sa + sb).sqrt();
    let dof = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    (t, dof, t_two_sided_quadrature(t, dof))
}

pub fn t_two_sided_quadrature(t: f64, dof: f64) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let log_c =
        ln_gamma((dof + 1.0) / 2.0) - ln_gamma(dof / 2.0) - 0.5 * (dof * std::f64::consts::PI).ln();
    let density = |x: f64| (log_c - (dof + 1.0) / 2.0 * (1.0 + x * x / dof).ln()).exp();
    let upper = t.abs();
    let panels = 4000;
    let h = upper / panels as f64;
    let mut integral = 0.0;
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            integral += w * density(mid + 0.5 * h * x) * 0.5 * h;
        }
    }
    (1.0 - 2.0 * integral).max(0.0)
}

/// Network quantities recomputed from an adjacency matrix.
pub struct NetworkOracle {
    pub nodes: Vec<String>,
    pub adj: Vec<Vec<bool>>,
}

impl NetworkOracle {
    pub fn from_mentions(tweets: &[Tweet]) -> Self {
        let mut names = BTreeSet::new();
        for t in tweets {
            for m in &t.mentions {
                if *m != t.author {
                    names.insert(t.author.clone());
                    names.insert(m.clone());
                }
            }
        }
        let nodes: Vec<String> = names.into_iter().collect();
        let idx = |s: &str| nodes.iter().position(|n| n == s).unwrap();
        let mut adj = vec![vec![false; nodes.len()]; nodes.len()];
        for t in tweets {
            for m in &t.mentions {
                if *m != t.author {
                    adj[idx(&t.author)][idx(m)] = true;
                }
            }
        }
        NetworkOracle { nodes, adj }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().flatten().filter(|&&e| e).count()
    }

    pub fn in_degree(&self, j: usize) -> usize {
        (0..self.n()).filter(|&i| self.adj[i][j]).count()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.n()).filter(|&j| self.adj[i][j]).count()
    }

    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() < 2 {
            0.0
        } else {
            self.n_edges() as f64 / (n * (n - 1.0))
        }
    }

    /// Size of the largest weakly connected component, by BFS.
    #[allow(clippy::needless_range_loop)]
    pub fn largest_weak_component(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut best = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut size = 0;
            let mut q = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = q.pop_front() {
                size += 1;
                for v in 0..n {
                    if !seen[v] && (self.adj[u][v] || self.adj[v][u]) {
                        seen[v] = true;
                        q.push_back(v);
                    }
                }
            }
            best = best.max(size);
        }
        best
    }
}
