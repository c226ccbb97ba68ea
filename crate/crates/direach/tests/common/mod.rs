//! Shared oracles for the integration suites.
//!
//! Everything here recomputes reachability facts from plain edge lists with
//! queue-based BFS, deliberately avoiding the bit-matrix machinery under
//! test. Instance generation uses its own ChaCha stream so the tested
//! generator is never both producer and oracle.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Forward adjacency lists from an edge list.
pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
    }
    adj
}

/// Full reachability from one source, including the source itself.
pub fn bfs_reach(adj: &[Vec<usize>], src: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[src] = true;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Reachability from one source restricted to walks of at most `d` edges.
pub fn bounded_bfs_reach(adj: &[Vec<usize>], src: usize, d: usize) -> Vec<bool> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        if dist[u] == d {
            continue;
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist.into_iter().map(|x| x != usize::MAX).collect()
}

/// One BFS row per source, in source order.
pub fn bfs_rows(adj: &[Vec<usize>], sources: &[usize]) -> Vec<Vec<bool>> {
    sources.iter().map(|&s| bfs_reach(adj, s)).collect()
}

/// Full n x n closure as a dense boolean grid.
pub fn bfs_closure(adj: &[Vec<usize>]) -> Vec<Vec<bool>> {
    (0..adj.len()).map(|v| bfs_reach(adj, v)).collect()
}

/// Random simple digraph as an edge list: `m` distinct non-loop pairs, and
/// with `dag` every edge goes from a smaller to a larger vertex id.
pub fn random_edges(n: usize, m: usize, seed: u64, dag: bool) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = if dag { n * (n - 1) / 2 } else { n * (n - 1) };
    let m = m.min(cap);
    let mut chosen = std::collections::BTreeSet::new();
    while chosen.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let e = if dag { (u.min(v), u.max(v)) } else { (u, v) };
        chosen.insert(e);
    }
    chosen.into_iter().collect()
}

/// `count` distinct vertices of an n-vertex graph, ascending.
pub fn random_sources(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5051);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    ids.truncate(count.clamp(1, n));
    ids.sort_unstable();
    ids
}

/// Source count round(n^sigma), clamped to [1, n].
pub fn source_count(n: usize, sigma: f64) -> usize {
    ((n as f64).powf(sigma).round() as usize).clamp(1, n)
}

/// Vertex-disjoint chains pulled out of a closure grid, at most `want`.
/// Consecutive chain vertices are closure-connected, so the chains are valid
/// dipaths of the transitive closure.
pub fn sample_chains(
    n: usize,
    closure: &[Vec<bool>],
    want: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut used = vec![false; n];
    let mut chains = Vec::new();
    for _ in 0..want {
        let mut chain = Vec::new();
        let mut cur = rng.random_range(0..n);
        if used[cur] {
            continue;
        }
        used[cur] = true;
        chain.push(cur);
        loop {
            let nexts: Vec<usize> =
                (0..n).filter(|&v| !used[v] && closure[cur][v]).collect();
            if nexts.is_empty() || rng.random_range(0..4) == 0 {
                break;
            }
            cur = nexts[rng.random_range(0..nexts.len())];
            used[cur] = true;
            chain.push(cur);
        }
        chains.push(chain);
    }
    chains
}
