//! Canonical forms of rooted, vertex-labelled graphs by colour refinement and
//! individualization, with automorphism pruning.

use sha2::{Digest, Sha256};

/// Canonical encoding plus the vertex order realizing it (vertex at position i of the
/// canonical order is `order[i]`). Orders are sorted by distance from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub encoding: Vec<i64>,
    pub order: Vec<usize>,
}

impl CanonicalForm {
    pub fn hash_hex(&self) -> String {
        hash_encoding(&self.encoding)
    }
}

pub fn hash_encoding(encoding: &[i64]) -> String {
    let mut hasher = Sha256::new();
    for x in encoding {
        hasher.update(x.to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

const MAX_AUTOMORPHISMS: usize = 256;

struct Search<'a> {
    adj: &'a [Vec<usize>],
    dist: &'a [usize],
    labels: &'a [i64],
    first: Option<CanonicalForm>,
    best: Option<CanonicalForm>,
    automorphisms: Vec<Vec<usize>>,
    first_path: Vec<usize>,
}

/// Colour of v is the number of vertices with a strictly smaller signature.
fn refine(adj: &[Vec<usize>], mut colors: Vec<usize>) -> Vec<usize> {
    let n = colors.len();
    let mut classes = count_classes(&colors);
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = adj[v].iter().map(|&u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| signatures[a].cmp(&signatures[b]));
        let mut next = vec![0; n];
        for (pos, &v) in idx.iter().enumerate() {
            next[v] = if pos > 0 && signatures[idx[pos - 1]] == signatures[v] { next[idx[pos - 1]] } else { pos };
        }
        colors = next;
        let now = count_classes(&colors);
        if now == classes {
            return colors;
        }
        classes = now;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl Search<'_> {
    fn encode(&self, order: &[usize]) -> Vec<i64> {
        let n = order.len();
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut out = Vec::with_capacity(3 * n + 1);
        out.push(n as i64);
        for &v in order {
            out.push(self.dist[v] as i64);
            out.push(self.labels[v]);
        }
        for &v in order {
            let mut nb: Vec<i64> = self.adj[v].iter().map(|&u| pos[u] as i64).collect();
            nb.sort_unstable();
            out.push(nb.len() as i64);
            out.extend(nb);
        }
        out
    }

    /// Returns the depth to backtrack to when the leaf matches the first leaf.
    fn leaf(&mut self, colors: &[usize], prefix: &[usize]) -> Option<usize> {
        let mut order: Vec<usize> = (0..colors.len()).collect();
        order.sort_by_key(|&v| colors[v]);
        let form = CanonicalForm { encoding: self.encode(&order), order };
        let Some(first) = &self.first else {
            self.first = Some(form.clone());
            self.best = Some(form);
            self.first_path = prefix.to_vec();
            return None;
        };
        let best = self.best.as_ref().unwrap();
        let matches_first = first.encoding == form.encoding;
        let twin = [first, best].into_iter().find(|f| f.encoding == form.encoding);
        if let Some(other) = twin {
            let mut gamma = vec![0; form.order.len()];
            for (i, &v) in other.order.iter().enumerate() {
                gamma[v] = form.order[i];
            }
            if self.automorphisms.len() < MAX_AUTOMORPHISMS {
                self.automorphisms.push(gamma);
            }
            if matches_first {
                // the subtree below the divergence from the first path is equivalent to one already searched
                return Some(self.first_path.iter().zip(prefix).take_while(|(a, b)| a == b).count());
            }
        } else if form.encoding < best.encoding {
            self.best = Some(form);
        }
        None
    }

    fn same_orbit(&self, prefix: &[usize], v: usize, explored: &[usize]) -> bool {
        let n = self.adj.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for gamma in self.automorphisms.iter().filter(|g| prefix.iter().all(|&p| g[p] == p)) {
            for x in 0..n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, gamma[x]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, v);
        explored.iter().any(|&w| find(&mut parent, w) == root)
    }

    fn descend(&mut self, colors: Vec<usize>, prefix: &mut Vec<usize>) -> Option<usize> {
        let colors = refine(self.adj, colors);
        let n = colors.len();
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
            return self.leaf(&colors, prefix);
        };
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(prefix, v, &explored) {
                continue;
            }
            let mut next = colors.clone();
            for &w in &cell {
                if w != v {
                    next[w] = target + 1;
                }
            }
            prefix.push(v);
            let jump = self.descend(next, prefix);
            prefix.pop();
            explored.push(v);
            if let Some(depth) = jump {
                if depth < prefix.len() {
                    return Some(depth);
                }
            }
        }
        None
    }
}

/// Canonical form of a connected graph rooted at `root` with integer vertex labels.
/// Two inputs get equal encodings iff a root-preserving, label-preserving isomorphism exists.
pub fn canonical_form(adj: &[Vec<usize>], root: usize, labels: &[i64]) -> CanonicalForm {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let keys: Vec<(usize, i64)> = (0..n).map(|v| (dist[v], labels[v])).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&v| keys[v]);
    let mut colors = vec![0; n];
    for (pos, &v) in idx.iter().enumerate() {
        colors[v] = if pos > 0 && keys[idx[pos - 1]] == keys[v] { colors[idx[pos - 1]] } else { pos };
    }
    let mut search = Search { adj, dist: &dist, labels, first: None, best: None, automorphisms: Vec::new(), first_path: Vec::new() };
    search.descend(colors, &mut Vec::new());
    search.best.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect()
    }

    #[test]
    fn relabelled_cycle_agrees() {
        let a = cycle(7);
        let perm = [3, 6, 0, 2, 5, 1, 4];
        let mut b = vec![Vec::new(); 7];
        for (v, nb) in a.iter().enumerate() {
            b[perm[v]] = nb.iter().map(|&u| perm[u]).collect();
        }
        let labels = vec![0; 7];
        assert_eq!(canonical_form(&a, 0, &labels).encoding, canonical_form(&b, perm[0], &labels).encoding);
    }

    #[test]
    fn root_and_labels_matter() {
        // path 0-1-2: rooted at an end vs the middle
        let p = vec![vec![1], vec![0, 2], vec![1]];
        let l = vec![0, 0, 0];
        assert_ne!(canonical_form(&p, 0, &l).encoding, canonical_form(&p, 1, &l).encoding);
        assert_ne!(canonical_form(&p, 0, &l).encoding, canonical_form(&p, 0, &[0, 0, 1]).encoding);
        assert_eq!(canonical_form(&p, 0, &[0, 0, 1]).encoding, canonical_form(&p, 2, &[1, 0, 0]).encoding);
    }

    #[test]
    fn symmetric_tree_is_fast_and_distance_sorted() {
        // 6-regular tree ball of radius 3
        let mut adj: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier = vec![0];
        for level in 0..3 {
            let mut next = Vec::new();
            for &v in &frontier {
                for _ in 0..if level == 0 { 6 } else { 5 } {
                    let u = adj.len();
                    adj.push(vec![v]);
                    adj[v].push(u);
                    next.push(u);
                }
            }
            frontier = next;
        }
        let form = canonical_form(&adj, 0, &vec![0; adj.len()]);
        assert_eq!(form.order[0], 0);
        assert_eq!(form.encoding[1..2 * adj.len() + 1].iter().step_by(2).copied().collect::<Vec<_>>().windows(2).filter(|w| w[0] > w[1]).count(), 0);
    }
}
