//! Weighted undirected graphs, cut assignments and the classical MaxCut oracle.

mod io;
mod random;
mod structure;

pub use io::{read_graph, write_graph, GraphFile};
pub use random::{random_bipartite_3regular, random_u3r};
pub use structure::{
    adjacency_min_eigenvalue, bfs_bipartition, maximal_matching, maximum_matching, MatchingStrategy,
};

use std::fmt;

use crate::error::{Error, Result};

/// Largest vertex count accepted by the exhaustive oracle and dense tables.
pub const MAX_ORACLE_VERTICES: usize = 24;

/// Relative slack when comparing cut values that should be equal.
const CUT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub j: usize,
    pub k: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(j: usize, k: usize, w: f64) -> Self {
        Edge { j, k, w }
    }

    pub fn unit(j: usize, k: usize) -> Self {
        Edge { j, k, w: 1.0 }
    }

    /// True when the endpoints land on different sides of `bits`.
    #[inline]
    pub fn is_cut(&self, bits: u64) -> bool {
        ((bits >> self.j) ^ (bits >> self.k)) & 1 == 1
    }
}

/// Simple undirected graph with non-negative edge weights.
///
/// Edges are stored canonically: `j < k`, sorted by `(j, k)`, no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph, normalizing each edge to `j < k` and sorting the list.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "graph needs at least 2 vertices, got {n}"
            )));
        }
        let mut out = Vec::new();
        for e in edges {
            let (j, k) = if e.j <= e.k { (e.j, e.k) } else { (e.k, e.j) };
            if j == k {
                return Err(Error::InvalidArgument(format!("self-loop on vertex {j}")));
            }
            if k >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({j}, {k}) out of range for {n} vertices"
                )));
            }
            if !e.w.is_finite() || e.w < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "edge ({j}, {k}) has invalid weight {}",
                    e.w
                )));
            }
            out.push(Edge::new(j, k, e.w));
        }
        out.sort_by_key(|e| (e.j, e.k));
        if let Some(pair) = out
            .windows(2)
            .find(|p| (p[0].j, p[0].k) == (p[1].j, p[1].k))
        {
            return Err(Error::InvalidArgument(format!(
                "duplicate edge ({}, {})",
                pair[0].j, pair[0].k
            )));
        }
        Ok(Graph { n, edges: out })
    }

    /// Unit-weight graph from `(j, k)` pairs.
    pub fn unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Graph::new(n, pairs.iter().map(|&(j, k)| Edge::unit(j, k)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        let pairs: Vec<_> = (0..n)
            .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
            .collect();
        Graph::unweighted(n, &pairs)
    }

    /// Complete bipartite graph with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self> {
        let pairs: Vec<_> = (0..a)
            .flat_map(|j| (a..a + b).map(move |k| (j, k)))
            .collect();
        Graph::unweighted(a + b, &pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.j] += 1;
            deg[e.k] += 1;
        }
        deg
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.degrees().iter().all(|&x| x == d)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.j].push(e.k);
            adj[e.k].push(e.j);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    pub fn is_bipartite(&self) -> bool {
        bfs_bipartition(self).is_some()
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        Graph::new(
            self.n,
            self.edges
                .iter()
                .map(|e| Edge::new(perm[e.j], perm[e.k], e.w)),
        )
    }

    /// Cut value of every basis index `0..2^n`.
    pub fn cut_table(&self) -> Result<Vec<f64>> {
        check_oracle_size(self.n)?;
        Ok((0..1u64 << self.n).map(|z| self.cut_bits(z)).collect())
    }

    #[inline]
    pub(crate) fn cut_bits(&self, bits: u64) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.is_cut(bits))
            .map(|e| e.w)
            .sum()
    }
}

fn check_oracle_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_VERTICES {
        return Err(Error::Capacity {
            what: "vertices",
            value: n,
            limit: MAX_ORACLE_VERTICES,
        });
    }
    Ok(())
}

/// A bit string `z ∈ {0,1}^n`; bit `j` is vertex `j`'s side.
///
/// The spin form is `s_j = 1 - 2 z_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n: usize,
    bits: u64,
}

impl Assignment {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidArgument(format!(
                "assignment length {n} outside 1..=63"
            )));
        }
        if bits >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "bits {bits:#x} do not fit in {n} positions"
            )));
        }
        Ok(Assignment { n, bits })
    }

    /// Parses a string such as `"0011"`, where character `j` is vertex `j`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (j, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid character {ch:?} in assignment {s:?}"
                    )))
                }
            }
        }
        Assignment::new(s.chars().count(), bits)
    }

    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let mut bits = 0u64;
        for (j, &s) in spins.iter().enumerate() {
            match s {
                1 => {}
                -1 => bits |= 1 << j,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "spin {s} at position {j} is not ±1"
                    )))
                }
            }
        }
        Assignment::new(spins.len(), bits)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, j: usize) -> u8 {
        ((self.bits >> j) & 1) as u8
    }

    pub fn spin(&self, j: usize) -> i8 {
        1 - 2 * self.bit(j) as i8
    }

    pub fn complement(&self) -> Assignment {
        Assignment {
            n: self.n,
            bits: !self.bits & ((1u64 << self.n) - 1),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            f.write_str(if self.bit(j) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_len(g: &Graph, a: &Assignment) -> Result<()> {
    if a.len() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "assignment of length {} for a graph on {} vertices",
            a.len(),
            g.n()
        )));
    }
    Ok(())
}

/// `C(s) = ½ Σ w_jk (1 - s_j s_k)`.
pub fn cut_value(g: &Graph, a: &Assignment) -> Result<f64> {
    check_len(g, a)?;
    Ok(g.edges()
        .iter()
        .map(|e| 0.5 * e.w * (1.0 - f64::from(a.spin(e.j) * a.spin(e.k))))
        .sum())
}

/// Diagonal of the MaxCut cost Hamiltonian, `-Σ (w_jk/2)(1 - λ_jk(z))` with
/// `λ_jk(z) = (-1)^(z_j ⊕ z_k)`.
pub fn hamiltonian_energy(g: &Graph, a: &Assignment) -> Result<f64> {
    check_len(g, a)?;
    Ok(g.edges()
        .iter()
        .map(|e| {
            let parity = if a.bit(e.j) ^ a.bit(e.k) == 1 {
                -1.0
            } else {
                1.0
            };
            -0.5 * e.w * (1.0 - parity)
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutSolution {
    pub c_max: f64,
    /// Every optimal assignment, sorted by bit pattern.
    pub optima: Vec<Assignment>,
}

impl MaxCutSolution {
    pub fn contains(&self, a: &Assignment) -> bool {
        self.optima.binary_search(a).is_ok()
    }

    /// Membership mask over basis indices `0..2^n`.
    pub fn optimum_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; 1usize << n];
        for a in &self.optima {
            mask[a.bits() as usize] = true;
        }
        mask
    }
}

/// Exhaustive MaxCut: enumerates the half of the hypercube with vertex 0 on
/// side 0 and mirrors each optimum.
pub fn brute_force_maxcut(g: &Graph) -> Result<MaxCutSolution> {
    let n = g.n();
    check_oracle_size(n)?;
    let mut c_max = g.cut_bits(0);
    let mut best: Vec<u64> = vec![0];
    for half in 1..1u64 << (n - 1) {
        let bits = half << 1;
        let c = g.cut_bits(bits);
        let tol = CUT_EPS * c_max.abs().max(1.0);
        if c > c_max + tol {
            c_max = c;
            best.clear();
            best.push(bits);
        } else if (c - c_max).abs() <= tol {
            best.push(bits);
        }
    }
    let mask = (1u64 << n) - 1;
    let mut optima: Vec<Assignment> = best
        .iter()
        .flat_map(|&b| [b, !b & mask])
        .map(|b| Assignment { n, bits: b })
        .collect();
    optima.sort();
    Ok(MaxCutSolution { c_max, optima })
}
