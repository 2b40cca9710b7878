//! Pairing solvers for group sharing. Each solver sees a weighted graph
//! with positive edges only and returns a mate table.

mod blossom;

pub use blossom::max_weight_matching;

use crate::registry::{Named, Registry};

/// Undirected edge `(u, v, weight)`.
pub type WeightedEdge = (usize, usize, i64);

pub trait MatchingStrategy: Named + Send + Sync {
    /// `mate[v] = Some(u)` iff edge `(v, u)` is in the matching.
    fn solve(&self, n: usize, edges: &[WeightedEdge]) -> Vec<Option<usize>>;
}

/// Exact maximum-weight matching via the blossom method.
pub struct Blossom;

impl Named for Blossom {
    fn name(&self) -> &'static str {
        "blossom"
    }
    fn description(&self) -> &'static str {
        "exact maximum-weight matching (Edmonds blossom, primal-dual)"
    }
}

impl MatchingStrategy for Blossom {
    fn solve(&self, n: usize, edges: &[WeightedEdge]) -> Vec<Option<usize>> {
        // components are independent; solving each alone keeps n^3 small
        let mut mate = vec![None; n];
        for (vertices, local_edges) in components(n, edges) {
            let m = max_weight_matching(vertices.len(), &local_edges);
            for (lv, other) in m.into_iter().enumerate() {
                mate[vertices[lv]] = other.map(|o| vertices[o]);
            }
        }
        mate
    }
}

/// Heaviest edge first; ties by lower endpoints.
pub struct Greedy;

impl Named for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }
    fn description(&self) -> &'static str {
        "heaviest-edge-first greedy matching"
    }
}

impl MatchingStrategy for Greedy {
    fn solve(&self, n: usize, edges: &[WeightedEdge]) -> Vec<Option<usize>> {
        let mut order: Vec<WeightedEdge> = edges
            .iter()
            .map(|&(u, v, w)| (u.min(v), u.max(v), w))
            .collect();
        order.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        let mut mate = vec![None; n];
        for (u, v, w) in order {
            if w > 0 && mate[u].is_none() && mate[v].is_none() {
                mate[u] = Some(v);
                mate[v] = Some(u);
            }
        }
        mate
    }
}

/// Connected components over the positive edges, with vertices renumbered
/// locally. Isolated vertices are skipped.
fn components(n: usize, edges: &[WeightedEdge]) -> Vec<(Vec<usize>, Vec<WeightedEdge>)> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let positive: Vec<WeightedEdge> = edges.iter().copied().filter(|e| e.2 > 0).collect();
    for &(u, v, _) in &positive {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut root_slot = vec![usize::MAX; n];
    let mut local = vec![usize::MAX; n];
    let mut comps: Vec<(Vec<usize>, Vec<WeightedEdge>)> = Vec::new();
    let mut touched = vec![false; n];
    for &(u, v, _) in &positive {
        touched[u] = true;
        touched[v] = true;
    }
    for v in 0..n {
        if !touched[v] {
            continue;
        }
        let r = find(&mut parent, v);
        if root_slot[r] == usize::MAX {
            root_slot[r] = comps.len();
            comps.push((Vec::new(), Vec::new()));
        }
        let c = &mut comps[root_slot[r]];
        local[v] = c.0.len();
        c.0.push(v);
    }
    for &(u, v, w) in &positive {
        let r = find(&mut parent, u);
        comps[root_slot[r]].1.push((local[u], local[v], w));
    }
    comps
}

pub const DEFAULT_MATCHER: &str = "blossom";

pub fn matching_registry() -> Registry<dyn MatchingStrategy> {
    let mut reg: Registry<dyn MatchingStrategy> = Registry::new("matching");
    reg.register(Box::new(Blossom)).register(Box::new(Greedy));
    reg
}

/// Sum of weights of the matched edges.
pub fn matching_weight(mate: &[Option<usize>], edges: &[WeightedEdge]) -> i64 {
    edges
        .iter()
        .filter(|&&(u, v, _)| mate[u] == Some(v))
        .map(|e| e.2)
        .sum()
}
