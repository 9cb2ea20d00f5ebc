use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edge, Graph};
use crate::error::{Error, Result};

/// Uniform-ish random simple 3-regular graph with unit weights.
///
/// Pairing (configuration) model: `3n` half-edges are shuffled and paired;
/// any pairing containing a self-loop or a repeated edge is discarded.
pub fn random_u3r<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Graph> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "3-regular graphs need an even vertex count >= 4, got {n}"
        )));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    loop {
        stubs.shuffle(rng);
        if let Some(pairs) = simple_pairs(stubs.chunks_exact(2).map(|p| (p[0], p[1]))) {
            return Graph::new(n, pairs.into_iter().map(|(j, k)| Edge::unit(j, k)));
        }
    }
}

/// Random simple 3-regular bipartite graph with parts `0..n/2` and `n/2..n`.
///
/// Union of three random perfect matchings between the parts, retried until
/// the three matchings are pairwise edge-disjoint.
pub fn random_bipartite_3regular<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Graph> {
    if n < 6 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "bipartite 3-regular graphs need an even vertex count >= 6, got {n}"
        )));
    }
    let half = n / 2;
    let mut perm: Vec<usize> = (0..half).collect();
    'retry: loop {
        let mut pairs = Vec::with_capacity(3 * half);
        for _ in 0..3 {
            perm.shuffle(rng);
            pairs.extend(
                perm.iter()
                    .enumerate()
                    .map(|(left, &right)| (left, half + right)),
            );
        }
        match simple_pairs(pairs.into_iter()) {
            Some(p) => return Graph::new(n, p.into_iter().map(|(j, k)| Edge::unit(j, k))),
            None => continue 'retry,
        }
    }
}

fn simple_pairs(pairs: impl Iterator<Item = (usize, usize)>) -> Option<Vec<(usize, usize)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (a, b) in pairs {
        if a == b {
            return None;
        }
        let key = (a.min(b), a.max(b));
        if !seen.insert(key) {
            return None;
        }
        out.push(key);
    }
    Some(out)
}
