//! Exact minimum T-joins on small unit-weight graphs.
//!
//! A T-join is an edge set whose odd-degree vertices are exactly the
//! terminals, except that "free" vertices may have any parity. The minimum is
//! found by a minimum-weight perfect matching of the terminals (each may also
//! be matched to the nearest free vertex) over shortest-path distances,
//! solved exactly by dynamic programming over terminal subsets.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Largest terminal count accepted by [`min_t_join`].
pub const MAX_TERMINALS: usize = 20;

#[derive(Clone, Debug)]
pub struct Graph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut adj = vec![Vec::new(); nodes];
        for (i, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, i));
            if a != b {
                adj[b].push((a, i));
            }
        }
        Graph { nodes, edges, adj }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Breadth-first distances and the edge used to reach each node.
    fn bfs(&self, src: usize) -> (Vec<usize>, Vec<Option<usize>>) {
        let mut dist = vec![usize::MAX; self.nodes];
        let mut via = vec![None; self.nodes];
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(v) = q.pop_front() {
            for &(w, e) in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    via[w] = Some(e);
                    q.push_back(w);
                }
            }
        }
        (dist, via)
    }

    fn path(&self, via: &[Option<usize>], mut to: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(e) = via[to] {
            out.push(e);
            let (a, b) = self.edges[e];
            to = if a == to { b } else { a };
        }
        out
    }

    /// Degree parity of every node under an edge set.
    pub fn odd_nodes(&self, edge_set: &[usize]) -> Vec<usize> {
        let mut deg = vec![0usize; self.nodes];
        for &e in edge_set {
            let (a, b) = self.edges[e];
            deg[a] += 1;
            deg[b] += 1;
        }
        (0..self.nodes).filter(|&v| deg[v] % 2 == 1).collect()
    }
}

/// A minimum-cardinality edge set (sorted indices) with odd degree exactly at
/// the non-free `terminals`.
pub fn min_t_join(graph: &Graph, terminals: &[usize], free: &[bool]) -> Result<Vec<usize>> {
    assert_eq!(free.len(), graph.nodes);
    let mut t: Vec<usize> = terminals.iter().copied().filter(|&v| !free[v]).collect();
    t.sort_unstable();
    // repeated terminals cancel in pairs
    let mut dedup = Vec::new();
    for v in t {
        if dedup.last() == Some(&v) {
            dedup.pop();
        } else {
            dedup.push(v);
        }
    }
    let t = dedup;
    let k = t.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > MAX_TERMINALS {
        return Err(Error::TooLarge {
            what: "matching terminals",
            n: k,
            max: MAX_TERMINALS,
        });
    }
    let searches: Vec<(Vec<usize>, Vec<Option<usize>>)> = t.iter().map(|&v| graph.bfs(v)).collect();
    let to_free: Vec<Option<usize>> = searches
        .iter()
        .map(|(dist, _)| (0..graph.nodes).filter(|&v| free[v] && dist[v] != usize::MAX).min_by_key(|&v| (dist[v], v)))
        .collect();

    const INF: usize = usize::MAX / 4;
    let full = (1usize << k) - 1;
    let mut cost = vec![INF; 1 << k];
    // choice[mask] = partner of the lowest terminal in mask (k means the boundary)
    let mut choice = vec![usize::MAX; 1 << k];
    cost[0] = 0;
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        if let Some(f) = to_free[i] {
            let c = cost[rest].saturating_add(searches[i].0[f]);
            if c < cost[mask] {
                cost[mask] = c;
                choice[mask] = k;
            }
        }
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            let d = searches[i].0[t[j]];
            if d == usize::MAX {
                continue;
            }
            let c = cost[rest & !(1 << j)].saturating_add(d);
            if c < cost[mask] {
                cost[mask] = c;
                choice[mask] = j;
            }
        }
    }
    if cost[full] >= INF {
        return Err(Error::Matching(format!(
            "terminals {t:?} cannot be paired or routed to a free node"
        )));
    }
    let mut parity = vec![false; graph.edges.len()];
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask];
        let path = if j == k {
            mask &= !(1 << i);
            graph.path(&searches[i].1, to_free[i].unwrap())
        } else {
            mask &= !(1 << i) & !(1 << j);
            graph.path(&searches[i].1, t[j])
        };
        for e in path {
            parity[e] ^= true;
        }
    }
    Ok((0..graph.edges.len()).filter(|&e| parity[e]).collect())
}

/// Minimum T-join size by trying every edge subset (test oracle, ≤ 20 edges).
pub fn min_t_join_exhaustive(graph: &Graph, terminals: &[usize], free: &[bool]) -> Result<Option<usize>> {
    let m = graph.edges.len();
    if m > 20 {
        return Err(Error::TooLarge {
            what: "edges for exhaustive T-join",
            n: m,
            max: 20,
        });
    }
    let mut want = vec![false; graph.nodes];
    for &v in terminals {
        want[v] ^= true;
    }
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << m) {
        let w = mask.count_ones() as usize;
        if best.is_some_and(|b| w >= b) {
            continue;
        }
        let mut deg = vec![false; graph.nodes];
        for e in 0..m {
            if mask >> e & 1 == 1 {
                let (a, b) = graph.edges[e];
                deg[a] ^= true;
                deg[b] ^= true;
            }
        }
        if (0..graph.nodes).all(|v| free[v] || deg[v] == want[v]) {
            best = Some(w);
        }
    }
    Ok(best)
}
