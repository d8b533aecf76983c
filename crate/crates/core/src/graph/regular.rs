use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

const RESTARTS: usize = 40;
const SWITCHES_PER_VERTEX: usize = 400;

/// A random d-regular graph with a girth floor and a diameter-realizing marked pair.
#[derive(Debug, Clone)]
pub struct RegularBlock {
    pub adjacency: Vec<Vec<usize>>,
    pub marked: (usize, usize),
    pub girth: usize,
}

/// Pairing model followed by double-edge switches that remove cycles shorter than `girth`.
pub fn random_regular_with_girth<R: Rng>(n: usize, d: usize, girth: usize, rng: &mut R) -> Result<RegularBlock> {
    if n * d % 2 != 0 || d >= n {
        return Err(Error::Parameter(format!("no {d}-regular simple graph on {n} vertices")));
    }
    let mut best = 0;
    for _ in 0..RESTARTS {
        let Some(mut adj) = pairing(n, d, rng) else { continue };
        if girth > 3 {
            remove_short_cycles(&mut adj, girth, rng);
        }
        let g = exact_girth(&adj);
        if g >= girth {
            for nb in adj.iter_mut() {
                nb.sort_unstable();
            }
            let marked = diameter_pair(&adj);
            return Ok(RegularBlock { adjacency: adj, marked, girth: g });
        }
        best = best.max(g);
    }
    Err(Error::Generation { size: n, target: girth, best })
}

fn pairing<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    'attempt: for _ in 0..100 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        let mut adj = vec![Vec::with_capacity(d); n];
        while !stubs.is_empty() {
            let mut placed = false;
            for _ in 0..50 * n {
                let i = rng.gen_range(0..stubs.len());
                let j = rng.gen_range(0..stubs.len());
                let (u, v) = (stubs[i], stubs[j]);
                if i == j || u == v || adj[u].contains(&v) {
                    continue;
                }
                adj[u].push(v);
                adj[v].push(u);
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                continue 'attempt;
            }
        }
        return Some(adj);
    }
    None
}

/// Shortest cycle through `v` if shorter than `girth`, with the edge that closes it.
fn short_cycle_through(
    adj: &[Vec<usize>],
    v: usize,
    girth: usize,
    scratch: &mut Scratch,
) -> Option<(usize, (usize, usize))> {
    let depth = (girth - 1) / 2;
    scratch.reset();
    scratch.visit(v, 0, usize::MAX);
    let mut best = (usize::MAX, (v, v));
    let mut head = 0;
    while head < scratch.order.len() {
        let x = scratch.order[head];
        head += 1;
        let dx = scratch.dist[x];
        for &y in &adj[x] {
            if scratch.dist[y] == usize::MAX {
                if dx < depth {
                    let branch = if x == v { y } else { scratch.branch[x] };
                    scratch.visit(y, dx + 1, branch);
                }
            } else if y != v && x != v && scratch.branch[x] != scratch.branch[y] {
                let len = dx + scratch.dist[y] + 1;
                if len < best.0 {
                    best = (len, (x, y));
                }
            }
        }
    }
    (best.0 < girth).then_some(best)
}

struct Scratch {
    dist: Vec<usize>,
    branch: Vec<usize>,
    order: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { dist: vec![usize::MAX; n], branch: vec![usize::MAX; n], order: Vec::new() }
    }

    fn reset(&mut self) {
        for &v in &self.order {
            self.dist[v] = usize::MAX;
            self.branch[v] = usize::MAX;
        }
        self.order.clear();
    }

    fn visit(&mut self, v: usize, d: usize, branch: usize) {
        self.dist[v] = d;
        self.branch[v] = branch;
        self.order.push(v);
    }
}

fn penalty(adj: &[Vec<usize>], v: usize, girth: usize, scratch: &mut Scratch) -> usize {
    short_cycle_through(adj, v, girth, scratch).map_or(0, |(c, _)| girth - c)
}

fn neighborhood(adj: &[Vec<usize>], seeds: &[usize], radius: usize, mark: &mut [bool], out: &mut Vec<usize>) {
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for &s in seeds {
        if !mark[s] {
            mark[s] = true;
            out.push(s);
            queue.push_back((s, 0));
        }
    }
    while let Some((v, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for &u in &adj[v] {
            if !mark[u] {
                mark[u] = true;
                out.push(u);
                queue.push_back((u, d + 1));
            }
        }
    }
}

fn replace(adj: &mut [Vec<usize>], v: usize, old: usize, new: usize) {
    let slot = adj[v].iter().position(|&x| x == old).expect("edge present");
    adj[v][slot] = new;
}

fn switch(adj: &mut [Vec<usize>], (a, b): (usize, usize), (c, e): (usize, usize)) {
    // (a,b),(c,e) -> (a,c),(b,e)
    replace(adj, a, b, c);
    replace(adj, b, a, e);
    replace(adj, c, e, a);
    replace(adj, e, c, b);
}

fn remove_short_cycles<R: Rng>(adj: &mut [Vec<usize>], girth: usize, rng: &mut R) {
    let n = adj.len();
    let mut scratch = Scratch::new(n);
    let mut scores: Vec<usize> = (0..n).map(|v| penalty(adj, v, girth, &mut scratch)).collect();
    let mut mark = vec![false; n];
    let mut region = Vec::new();
    let radius = girth / 2 + 1;
    for _ in 0..SWITCHES_PER_VERTEX * n {
        let bad: Vec<usize> = (0..n).filter(|&v| scores[v] > 0).collect();
        let Some(&v) = bad.choose(rng) else { return };
        let Some((_, (x, y))) = short_cycle_through(adj, v, girth, &mut scratch) else { continue };
        let (a, b) = if rng.gen() { (x, y) } else { (y, x) };
        let c = rng.gen_range(0..n);
        let e = *adj[c].choose(rng).unwrap();
        if [a, b].contains(&c) || [a, b].contains(&e) || adj[a].contains(&c) || adj[b].contains(&e) {
            continue;
        }
        region.clear();
        neighborhood(adj, &[a, b, c, e], radius, &mut mark, &mut region);
        switch(adj, (a, b), (c, e));
        neighborhood(adj, &[a, b, c, e], radius, &mut mark, &mut region);
        let before: usize = region.iter().map(|&v| scores[v]).sum();
        let fresh: Vec<usize> = region.iter().map(|&v| penalty(adj, v, girth, &mut scratch)).collect();
        let after: usize = fresh.iter().sum();
        if after <= before {
            for (&v, &s) in region.iter().zip(&fresh) {
                scores[v] = s;
            }
        } else {
            // undo: (a,c),(b,e) -> (a,b),(c,e)
            switch(adj, (a, c), (b, e));
        }
        for &v in &region {
            mark[v] = false;
        }
    }
}

fn exact_girth(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut best = usize::MAX;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    parent[u] = v;
                    queue.push_back(u);
                } else if parent[v] != u {
                    best = best.min(dist[u] + dist[v] + 1);
                }
            }
        }
    }
    best
}

/// Lexicographically first pair (u, v), u < v, realizing the diameter.
fn diameter_pair(adj: &[Vec<usize>]) -> (usize, usize) {
    let n = adj.len();
    let mut best = (0, (0, 0));
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        for t in s + 1..n {
            if dist[t] > best.0 {
                best = (dist[t], (s, t));
            }
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generates_regular_graphs_with_girth_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(n, d, g) in &[(20, 6, 4), (40, 6, 4), (80, 6, 4), (30, 3, 6), (150, 6, 5)] {
            let block = random_regular_with_girth(n, d, g, &mut rng).unwrap();
            assert!(block.adjacency.iter().all(|nb| nb.len() == d));
            assert!(block.girth >= g);
            assert_eq!(exact_girth(&block.adjacency), block.girth);
        }
    }

    #[test]
    fn local_penalty_agrees_with_exact_girth() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let adj = pairing(30, 4, &mut rng).unwrap();
        let g = exact_girth(&adj);
        let mut scratch = Scratch::new(30);
        let local = (0..30)
            .filter_map(|v| short_cycle_through(&adj, v, 64, &mut scratch).map(|c| c.0))
            .min()
            .unwrap();
        assert_eq!(local, g);
    }

    #[test]
    fn impossible_target_reports_best() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        match random_regular_with_girth(8, 3, 7, &mut rng) {
            Err(Error::Generation { best, .. }) => assert!(best >= 3 && best < 7),
            other => panic!("expected generation error, got {other:?}"),
        }
    }
}
