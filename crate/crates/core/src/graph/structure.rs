use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Assignment, Edge, Graph};
use crate::error::{Error, Result};

/// Largest graph accepted by the dense adjacency eigensolve.
pub const MAX_EIGEN_VERTICES: usize = 64;

/// Largest graph accepted by the exact maximum-matching search.
pub const MAX_MATCHING_VERTICES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingStrategy {
    /// Greedy scan in canonical edge order.
    #[default]
    Greedy,
    /// Exact maximum-cardinality matching (exhaustive, small graphs only).
    Maximum,
}

impl MatchingStrategy {
    pub fn matching(self, g: &Graph) -> Result<Vec<Edge>> {
        match self {
            MatchingStrategy::Greedy => Ok(maximal_matching(g)),
            MatchingStrategy::Maximum => maximum_matching(g),
        }
    }
}

/// Greedy maximal matching over the canonical `(j, k)` edge order.
pub fn maximal_matching(g: &Graph) -> Vec<Edge> {
    let mut used = vec![false; g.n()];
    let mut out = Vec::new();
    for e in g.edges() {
        if !used[e.j] && !used[e.k] {
            used[e.j] = true;
            used[e.k] = true;
            out.push(*e);
        }
    }
    out
}

/// Maximum-cardinality matching. Ties are broken toward the lexicographically
/// smallest edge list so the result is deterministic.
pub fn maximum_matching(g: &Graph) -> Result<Vec<Edge>> {
    if g.n() > MAX_MATCHING_VERTICES {
        return Err(Error::Capacity {
            what: "vertices",
            value: g.n(),
            limit: MAX_MATCHING_VERTICES,
        });
    }
    // incident[v]: edges (by index) whose lower endpoint is v
    let mut incident = vec![Vec::new(); g.n()];
    for (idx, e) in g.edges().iter().enumerate() {
        incident[e.j].push(idx);
    }
    let mut memo = HashMap::new();
    let mut chosen = Vec::new();
    best_matching(g, &incident, 0, 0, &mut memo);
    // replay the memoized decisions
    let (mut v, mut used) = (0usize, 0u64);
    while v < g.n() {
        if used >> v & 1 == 1 {
            v += 1;
            continue;
        }
        let target = memo[&(v, used)];
        let skip = best_matching(g, &incident, v + 1, used, &mut memo);
        if skip == target {
            v += 1;
            continue;
        }
        let pick = incident[v]
            .iter()
            .copied()
            .find(|&idx| {
                let k = g.edges()[idx].k;
                used >> k & 1 == 0
                    && 1 + best_matching(g, &incident, v + 1, used | 1 << v | 1 << k, &mut memo)
                        == target
            })
            .expect("memoized optimum must be reachable");
        let e = g.edges()[pick];
        chosen.push(e);
        used |= 1 << e.j | 1 << e.k;
        v += 1;
    }
    Ok(chosen)
}

fn best_matching(
    g: &Graph,
    incident: &[Vec<usize>],
    v: usize,
    used: u64,
    memo: &mut HashMap<(usize, u64), usize>,
) -> usize {
    if v >= g.n() {
        return 0;
    }
    if used >> v & 1 == 1 {
        return best_matching(g, incident, v + 1, used, memo);
    }
    if let Some(&hit) = memo.get(&(v, used)) {
        return hit;
    }
    let mut best = best_matching(g, incident, v + 1, used, memo);
    for &idx in &incident[v] {
        let k = g.edges()[idx].k;
        if used >> k & 1 == 0 {
            best = best.max(1 + best_matching(g, incident, v + 1, used | 1 << v | 1 << k, memo));
        }
    }
    memo.insert((v, used), best);
    best
}

/// BFS 2-coloring, one root per connected component (root on side 0).
///
/// Returns `None` when an odd cycle exists.
pub fn bfs_bipartition(g: &Graph) -> Option<Assignment> {
    let adj = g.neighbors();
    let mut color: Vec<Option<u8>> = vec![None; g.n()];
    let mut queue = VecDeque::new();
    for root in 0..g.n() {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(0);
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].unwrap();
            for &u in &adj[v] {
                match color[u] {
                    None => {
                        color[u] = Some(1 - cv);
                        queue.push_back(u);
                    }
                    Some(cu) if cu == cv => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let bits = color
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == Some(1))
        .fold(0u64, |acc, (v, _)| acc | 1 << v);
    Some(Assignment::new(g.n(), bits).expect("n <= 63 for any 2-colorable input here"))
}

/// Smallest eigenvalue of the (weighted) adjacency matrix.
pub fn adjacency_min_eigenvalue(g: &Graph) -> Result<f64> {
    if g.n() > MAX_EIGEN_VERTICES {
        return Err(Error::Capacity {
            what: "vertices",
            value: g.n(),
            limit: MAX_EIGEN_VERTICES,
        });
    }
    let mut a = DMatrix::<f64>::zeros(g.n(), g.n());
    for e in g.edges() {
        a[(e.j, e.k)] = e.w;
        a[(e.k, e.j)] = e.w;
    }
    let eig = a.symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}
