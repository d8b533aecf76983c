//! Rooted bounded-degree graphs, balls in coherent BFS order, growth counts.

mod builders;
mod regular;

pub use builders::{
    build_comb, build_counterexample, build_regular_tree, build_sparse_tree_with_cycles,
    build_star, build_znxn, CounterexampleGraph,
};
pub use regular::{random_regular_with_girth, RegularBlock};

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UNREACHED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct RootedGraph {
    adjacency: Vec<Vec<usize>>,
    root: usize,
    max_degree: usize,
    frontier: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl RootedGraph {
    /// Validates and builds a graph from an undirected edge list.
    pub fn from_edges(vertex_count: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Graph(format!("edge ({u},{v}) out of range")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Self::from_adjacency(adjacency, root)
    }

    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>, root: usize) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::Graph("empty graph".into()));
        }
        if root >= n {
            return Err(Error::Graph(format!("root {root} out of range")));
        }
        for (v, nb) in adjacency.iter_mut().enumerate() {
            nb.sort_unstable();
            if nb.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Graph(format!("duplicate edge at vertex {v}")));
            }
            if nb.binary_search(&v).is_ok() {
                return Err(Error::Graph(format!("self-loop at vertex {v}")));
            }
        }
        for v in 0..n {
            for &u in &adjacency[v] {
                if adjacency[u].binary_search(&v).is_err() {
                    return Err(Error::Graph(format!("asymmetric edge ({v},{u})")));
                }
            }
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let g = RootedGraph { adjacency, root, max_degree, frontier: Vec::new(), labels: None };
        let dist = g.distances_from(root);
        if let Some(v) = dist.iter().position(|&d| d == UNREACHED) {
            return Err(Error::Graph(format!("vertex {v} unreachable from root")));
        }
        Ok(g)
    }

    /// Marks the vertices where a finite truncation cut off the infinite graph.
    pub fn with_frontier(mut self, mut frontier: Vec<usize>) -> Result<Self> {
        frontier.sort_unstable();
        frontier.dedup();
        if let Some(&v) = frontier.iter().find(|&&v| v >= self.vertex_count()) {
            return Err(Error::Graph(format!("frontier vertex {v} out of range")));
        }
        self.frontier = frontier;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::Dimension { expected: self.vertex_count(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn frontier(&self) -> &[usize] {
        &self.frontier
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    /// Edges (u, v) with u < v in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nb) in self.adjacency.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        self.multi_source_distances(&[source], UNREACHED)
    }

    /// BFS distances from a set of sources, not exploring beyond `limit`.
    pub fn multi_source_distances(&self, sources: &[usize], limit: usize) -> Vec<usize> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let dv = dist[v];
            if dv >= limit {
                continue;
            }
            for &u in &self.adjacency[v] {
                if dist[u] == UNREACHED {
                    dist[u] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Distance of every vertex to the truncation frontier (`UNREACHED` if there is none).
    pub fn frontier_distances(&self) -> Vec<usize> {
        self.multi_source_distances(&self.frontier, UNREACHED)
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        self.distances_from(u)[v]
    }

    /// |v| = distance from the root.
    pub fn levels(&self) -> Vec<usize> {
        self.distances_from(self.root)
    }

    pub fn ball(&self, center: usize, radius: usize) -> BallView {
        let mut dist: HashMap<usize, usize> = HashMap::new();
        dist.insert(center, 0);
        let mut frontier = vec![center];
        let mut members: Vec<(usize, usize)> = vec![(0, center)];
        for d in 1..=radius {
            let mut next = Vec::new();
            for &v in &frontier {
                for &u in &self.adjacency[v] {
                    if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(u) {
                        e.insert(d);
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            members.extend(next.iter().map(|&u| (d, u)));
            frontier = next;
        }
        members.sort_unstable();
        let index_of = members.iter().enumerate().map(|(i, &(_, v))| (v, i)).collect();
        BallView {
            center,
            radius,
            distances: members.iter().map(|&(d, _)| d).collect(),
            members: members.into_iter().map(|(_, v)| v).collect(),
            index_of,
        }
    }

    pub fn growth_profile(&self, base: usize, radius: usize) -> GrowthProfile {
        let dist = self.multi_source_distances(&[base], radius);
        let mut sphere_sizes = vec![0usize; radius + 1];
        for &d in &dist {
            if d <= radius {
                sphere_sizes[d] += 1;
            }
        }
        let ball_sizes: Vec<usize> = sphere_sizes
            .iter()
            .scan(0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect();
        let ratio_sup = (1..=radius)
            .filter(|&r| sphere_sizes[r] > 0)
            .map(|r| ball_sizes[r] as f64 / sphere_sizes[r] as f64)
            .fold(f64::NAN, f64::max);
        GrowthProfile { sphere_sizes, ball_sizes, ratio_sup }
    }

    /// Length of the shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertex_count();
        let mut best = UNREACHED;
        let mut dist = vec![UNREACHED; n];
        let mut parent = vec![UNREACHED; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let mut touched = vec![s];
            dist[s] = 0;
            queue.push_back(s);
            'bfs: while let Some(v) = queue.pop_front() {
                if 2 * dist[v] + 1 >= best {
                    break;
                }
                for &u in &self.adjacency[v] {
                    if dist[u] == UNREACHED {
                        dist[u] = dist[v] + 1;
                        parent[u] = v;
                        touched.push(u);
                        queue.push_back(u);
                    } else if parent[v] != u {
                        best = best.min(dist[u] + dist[v] + 1);
                        if best == 3 {
                            break 'bfs;
                        }
                    }
                }
            }
            queue.clear();
            for v in touched {
                dist[v] = UNREACHED;
                parent[v] = UNREACHED;
            }
            if best == 3 {
                break;
            }
        }
        (best != UNREACHED).then_some(best)
    }

    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            vertex_count: self.vertex_count(),
            root: self.root,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            labels: self.labels.clone(),
            frontier: self.frontier.clone(),
        };
        serde_json::to_string(&doc).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(text)?;
        let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        let mut g = Self::from_edges(doc.vertex_count, doc.root, &edges)?.with_frontier(doc.frontier)?;
        if let Some(labels) = doc.labels {
            g = g.with_labels(labels)?;
        }
        Ok(g)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertex_count: usize,
    root: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    frontier: Vec<usize>,
}

/// B_r(v) enumerated by (distance, global id).
#[derive(Debug, Clone, PartialEq)]
pub struct BallView {
    pub center: usize,
    pub radius: usize,
    pub members: Vec<usize>,
    pub distances: Vec<usize>,
    pub index_of: HashMap<usize, usize>,
}

impl BallView {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of members within distance `r` of the center.
    pub fn prefix_len(&self, r: usize) -> usize {
        self.distances.partition_point(|&d| d <= r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    pub sphere_sizes: Vec<usize>,
    pub ball_sizes: Vec<usize>,
    pub ratio_sup: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> RootedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        RootedGraph::from_edges(n, 0, &edges).unwrap()
    }

    fn grid(side: usize) -> RootedGraph {
        let id = |x: usize, y: usize| x * side + y;
        let mut edges = Vec::new();
        for x in 0..side {
            for y in 0..side {
                if x + 1 < side {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < side {
                    edges.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        RootedGraph::from_edges(side * side, id(side / 2, side / 2), &edges).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(RootedGraph::from_edges(2, 0, &[(0, 0)]).is_err());
        assert!(RootedGraph::from_edges(2, 0, &[(0, 1), (1, 0)]).is_err());
        assert!(RootedGraph::from_edges(3, 0, &[(0, 1)]).is_err());
    }

    #[test]
    fn ball_of_path_endpoint() {
        let g = path(10);
        assert_eq!(g.ball(0, 2).members, vec![0, 1, 2]);
        assert_eq!(g.ball(5, 0).members, vec![5]);
    }

    #[test]
    fn ball_order_breaks_ties_by_id() {
        let g = path(7);
        let b = g.ball(3, 2);
        assert_eq!(b.members, vec![3, 2, 4, 1, 5]);
        assert_eq!(b.prefix_len(1), 3);
    }

    #[test]
    fn growth_of_path_from_end() {
        let p = path(20).growth_profile(0, 5);
        assert_eq!(p.sphere_sizes, vec![1; 6]);
        assert_eq!(p.ball_sizes, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(p.ratio_sup, 6.0);
    }

    #[test]
    fn growth_of_grid_is_linear_ratio() {
        let g = grid(21);
        let p = g.growth_profile(g.root(), 5);
        for r in 1..=5 {
            assert_eq!(p.sphere_sizes[r], 4 * r);
            assert_eq!(p.ball_sizes[r], 2 * r * r + 2 * r + 1);
        }
        let ratio = p.ball_sizes[5] as f64 / p.sphere_sizes[5] as f64;
        assert!((ratio - (5.0 / 2.0 + 0.5 + 1.0 / 20.0)).abs() < 1e-12);
    }

    #[test]
    fn girth_examples() {
        assert_eq!(path(5).girth(), None);
        let cycle = RootedGraph::from_edges(6, 0, &(0..6).map(|i| (i, (i + 1) % 6)).collect::<Vec<_>>()).unwrap();
        assert_eq!(cycle.girth(), Some(6));
        assert_eq!(grid(3).girth(), Some(4));
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let g = grid(4).with_frontier(vec![0, 3]).unwrap();
        let text = g.to_json();
        let back = RootedGraph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
    }
}
