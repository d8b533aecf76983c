use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{random_regular_with_girth, RegularBlock, RootedGraph};
use crate::error::{Error, Result};

const MAX_VERTICES: usize = 50_000_000;

struct Builder {
    adjacency: Vec<Vec<usize>>,
    labels: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Builder { adjacency: Vec::new(), labels: Vec::new() }
    }

    fn add_vertex(&mut self, label: String) -> usize {
        self.adjacency.push(Vec::new());
        self.labels.push(label);
        self.adjacency.len() - 1
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
    }

    fn finish(self, root: usize, frontier: Vec<usize>, keep_labels: bool) -> Result<RootedGraph> {
        let g = RootedGraph::from_adjacency(self.adjacency, root)?.with_frontier(frontier)?;
        if keep_labels {
            g.with_labels(self.labels)
        } else {
            Ok(g)
        }
    }
}

fn check_size(count: Option<usize>, what: &str) -> Result<usize> {
    match count {
        Some(n) if n <= MAX_VERTICES => Ok(n),
        _ => Err(Error::Size(format!("{what} exceeds {MAX_VERTICES} vertices"))),
    }
}

/// T_d truncated at `depth`, vertices numbered level by level.
pub fn build_regular_tree(degree: usize, depth: usize) -> Result<RootedGraph> {
    if degree < 2 {
        return Err(Error::Parameter(format!("tree degree {degree} < 2")));
    }
    let mut total = Some(1usize);
    let mut level = Some(1usize);
    for l in 1..=depth {
        let branching = if l == 1 { degree } else { degree - 1 };
        level = level.and_then(|s| s.checked_mul(branching));
        total = total.and_then(|t| level.and_then(|s| t.checked_add(s)));
    }
    let total = check_size(total, &format!("T_{degree} of depth {depth}"))?;
    let mut adjacency = vec![Vec::new(); total];
    let mut previous = 0..1;
    let mut next_id = 1;
    for l in 1..=depth {
        let branching = if l == 1 { degree } else { degree - 1 };
        let start = next_id;
        for parent in previous.clone() {
            for _ in 0..branching {
                adjacency[parent].push(next_id);
                adjacency[next_id].push(parent);
                next_id += 1;
            }
        }
        previous = start..next_id;
    }
    let frontier = previous.collect();
    RootedGraph::from_adjacency(adjacency, 0)?.with_frontier(frontier)
}

/// Boxes of side 2‖x‖∞+1 at each lattice point of [−levels, levels]^n joined by connector paths.
pub fn build_znxn(n: usize, levels: usize) -> Result<RootedGraph> {
    if n < 2 || levels < 1 {
        return Err(Error::Parameter(format!("Z_{{n×n}} needs n ≥ 2 and levels ≥ 1, got ({n}, {levels})")));
    }
    let side = 2 * levels + 1;
    let box_count = check_size(side.checked_pow(n as u32), "lattice of boxes")?;
    let coords = |mut idx: usize, half: usize| -> Vec<i64> {
        let width = 2 * half + 1;
        let mut c = vec![0i64; n];
        for slot in c.iter_mut().rev() {
            *slot = (idx % width) as i64 - half as i64;
            idx /= width;
        }
        c
    };
    let index = |c: &[i64], half: usize| -> usize {
        let width = (2 * half + 1) as i64;
        c.iter().fold(0i64, |acc, &x| acc * width + x + half as i64) as usize
    };
    let norm = |c: &[i64]| c.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0);
    let fmt = |c: &[i64]| c.iter().map(i64::to_string).collect::<Vec<_>>().join(",");

    let mut b = Builder::new();
    let mut box_base = Vec::with_capacity(box_count);
    let mut estimate = Some(0usize);
    for bi in 0..box_count {
        let m = norm(&coords(bi, levels));
        estimate = estimate.and_then(|e| (2 * m + 1).checked_pow(n as u32).and_then(|s| e.checked_add(s)));
    }
    check_size(estimate, "Z_{n×n} boxes")?;
    for bi in 0..box_count {
        let x = coords(bi, levels);
        let m = norm(&x);
        let w = 2 * m + 1;
        box_base.push(b.adjacency.len());
        for local in 0..w.pow(n as u32) {
            let y = coords(local, m);
            b.add_vertex(format!("B[{}]:[{}]", fmt(&x), fmt(&y)));
        }
        for local in 0..w.pow(n as u32) {
            let y = coords(local, m);
            for j in 0..n {
                if y[j] < m as i64 {
                    let mut z = y.clone();
                    z[j] += 1;
                    b.add_edge(box_base[bi] + local, box_base[bi] + index(&z, m));
                }
            }
        }
    }
    let face = |m: usize, j: usize, sign: i64| -> usize {
        let mut y = vec![0i64; n];
        y[j] = sign * m as i64;
        index(&y, m)
    };
    let mut frontier = Vec::new();
    for bi in 0..box_count {
        let x = coords(bi, levels);
        let m = norm(&x);
        for j in 0..n {
            if x[j] == levels as i64 {
                frontier.push(box_base[bi] + face(m, j, 1));
                continue;
            }
            if x[j] == -(levels as i64) {
                frontier.push(box_base[bi] + face(m, j, -1));
            }
            let mut xn = x.clone();
            xn[j] += 1;
            let bn = index(&xn, levels);
            let mn = norm(&xn);
            let length = m.max(mn);
            let mut prev = box_base[bi] + face(m, j, 1);
            for k in 1..length {
                let c = b.add_vertex(format!("C[{}]+{}:{}", fmt(&x), j, k));
                b.add_edge(prev, c);
                prev = c;
            }
            b.add_edge(prev, box_base[bn] + face(mn, j, -1));
        }
    }
    let root = box_base[index(&vec![0; n], levels)];
    b.finish(root, frontier, true)
}

/// Spherically homogeneous tree whose sphere size is multiplied by k_n at level L_n,
/// with the spheres at the levels C_n closed into cycles.
pub fn build_sparse_tree_with_cycles(
    k_values: &[usize],
    branch_levels: &[usize],
    cycle_levels: &[usize],
    depth: usize,
) -> Result<RootedGraph> {
    if k_values.len() != 1 && k_values.len() != branch_levels.len() {
        return Err(Error::Parameter("k_values must have one entry or one per branch level".into()));
    }
    if k_values.iter().any(|&k| k < 1) {
        return Err(Error::Parameter("branching numbers must be ≥ 1".into()));
    }
    if branch_levels.iter().any(|&l| l == 0) || branch_levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("branch levels must be positive and strictly increasing".into()));
    }
    if cycle_levels.len() >= branch_levels.len().max(1) {
        return Err(Error::Parameter("need fewer cycle levels than branch levels".into()));
    }
    for (i, &c) in cycle_levels.iter().enumerate() {
        if !(branch_levels[i] <= c && c < branch_levels[i + 1]) {
            return Err(Error::Parameter(format!(
                "cycle level {c} must satisfy L_{} ≤ C < L_{}",
                i + 1,
                i + 2
            )));
        }
    }
    let max_level = branch_levels.iter().chain(cycle_levels).copied().max().unwrap_or(0);
    if depth < max_level {
        return Err(Error::Parameter(format!("depth {depth} below level {max_level}")));
    }
    let kappa = |level: usize| -> usize {
        match branch_levels.iter().position(|&l| l == level + 1) {
            Some(i) => k_values[if k_values.len() == 1 { 0 } else { i }],
            None => 1,
        }
    };
    let mut total = Some(1usize);
    let mut size = Some(1usize);
    for level in 0..depth {
        size = size.and_then(|s| s.checked_mul(kappa(level)));
        total = total.and_then(|t| size.and_then(|s| t.checked_add(s)));
    }
    check_size(total, "sparse tree")?;

    let mut b = Builder::new();
    let mut parent = vec![usize::MAX];
    let mut level_of = vec![0usize];
    let root = b.add_vertex(String::new());
    let mut spheres = vec![vec![root]];
    for level in 0..depth {
        let mut next = Vec::new();
        for &v in &spheres[level] {
            for _ in 0..kappa(level) {
                let c = b.add_vertex(String::new());
                parent.push(v);
                level_of.push(level + 1);
                b.add_edge(v, c);
                next.push(c);
            }
        }
        spheres.push(next);
    }
    let tree_distance = |mut u: usize, mut v: usize| -> usize {
        let mut steps = 0;
        while level_of[u] > level_of[v] {
            u = parent[u];
            steps += 1;
        }
        while level_of[v] > level_of[u] {
            v = parent[v];
            steps += 1;
        }
        while u != v {
            u = parent[u];
            v = parent[v];
            steps += 2;
        }
        steps
    };
    for &c in cycle_levels {
        let sphere = &spheres[c];
        if sphere.len() < 2 {
            continue;
        }
        let mut order = vec![sphere[0]];
        let mut remaining: Vec<usize> = sphere[1..].to_vec();
        while !remaining.is_empty() {
            let last = *order.last().unwrap();
            let (pos, _) = remaining
                .iter()
                .enumerate()
                .min_by_key(|(_, &w)| (tree_distance(last, w), w))
                .unwrap();
            order.push(remaining.remove(pos));
        }
        for w in order.windows(2) {
            b.add_edge(w[0], w[1]);
        }
        if order.len() > 2 {
            b.add_edge(order[order.len() - 1], order[0]);
        }
    }
    let frontier = spheres[depth].clone();
    b.finish(root, frontier, false)
}

/// Half-line with regular blocks spliced in, plus the data needed downstream.
#[derive(Debug, Clone)]
pub struct CounterexampleGraph {
    pub graph: RootedGraph,
    pub degree: usize,
    /// Global vertex ids of each block.
    pub blocks: Vec<Vec<usize>>,
    /// Spine vertices k_i and k_i + 1 that the block replaces the edge between.
    pub attachments: Vec<(usize, usize)>,
    /// Marked block vertices (u_i^(1), u_i^(2)).
    pub marked: Vec<(usize, usize)>,
    pub block_girths: Vec<usize>,
}

/// The half-line 1, 2, 3, … with the edge (k_i, k_i + 1) replaced by a d-regular block of
/// size n_i and girth ≥ g_i, where k_i = n_1 + … + n_i. The spine continues for n_m vertices
/// past the last block; the root is spine vertex 1.
pub fn build_counterexample(
    degree: usize,
    block_sizes: &[usize],
    girth_floors: &[usize],
    seed: u64,
) -> Result<CounterexampleGraph> {
    if degree < 3 {
        return Err(Error::Parameter(format!("degree {degree} < 3")));
    }
    if block_sizes.is_empty() || block_sizes.len() != girth_floors.len() {
        return Err(Error::Parameter("need one girth floor per block".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks_raw: Vec<RegularBlock> = Vec::new();
    for (&n, &g) in block_sizes.iter().zip(girth_floors) {
        if n * degree % 2 != 0 || n <= degree {
            return Err(Error::Parameter(format!("no {degree}-regular graph on {n} vertices")));
        }
        blocks_raw.push(random_regular_with_girth(n, degree, g, &mut rng)?);
    }
    let cuts: Vec<usize> = block_sizes
        .iter()
        .scan(0, |acc, &n| {
            *acc += n;
            Some(*acc)
        })
        .collect();
    let spine_len = cuts.last().unwrap() + block_sizes.last().unwrap();
    let mut b = Builder::new();
    for j in 1..=spine_len {
        b.add_vertex(format!("n{j}"));
    }
    let spine = |j: usize| j - 1;
    let mut cut_iter = cuts.iter().peekable();
    for j in 1..spine_len {
        if cut_iter.peek() == Some(&&j) {
            cut_iter.next();
            continue;
        }
        b.add_edge(spine(j), spine(j + 1));
    }
    let mut blocks = Vec::new();
    let mut attachments = Vec::new();
    let mut marked = Vec::new();
    let mut block_girths = Vec::new();
    for (i, raw) in blocks_raw.iter().enumerate() {
        let base = b.adjacency.len();
        for j in 0..raw.adjacency.len() {
            b.add_vertex(format!("b{}:{}", i + 1, j));
        }
        for (u, nb) in raw.adjacency.iter().enumerate() {
            for &v in nb.iter().filter(|&&v| v > u) {
                b.add_edge(base + u, base + v);
            }
        }
        let (m1, m2) = raw.marked;
        let (k, k1) = (spine(cuts[i]), spine(cuts[i] + 1));
        b.add_edge(k, base + m1);
        b.add_edge(base + m2, k1);
        blocks.push((base..base + raw.adjacency.len()).collect());
        attachments.push((k, k1));
        marked.push((base + m1, base + m2));
        block_girths.push(raw.girth);
    }
    let graph = b.finish(spine(1), vec![spine(spine_len)], true)?;
    Ok(CounterexampleGraph { graph, degree, blocks, attachments, marked, block_girths })
}

/// Finite piece of the two-sided comb: spine {−s..s}×{0}, teeth {k}×{−a..a}.
pub fn build_comb(arm_length: usize, spine_length: usize) -> Result<RootedGraph> {
    let (a, s) = (arm_length as i64, spine_length as i64);
    let width = (2 * a + 1) as usize;
    let id = |k: i64, j: i64| ((k + s) as usize) * width + (j + a) as usize;
    let mut b = Builder::new();
    let mut frontier = Vec::new();
    for k in -s..=s {
        for j in -a..=a {
            b.add_vertex(format!("({k},{j})"));
        }
    }
    for k in -s..=s {
        for j in -a..a {
            b.add_edge(id(k, j), id(k, j + 1));
        }
        if k < s {
            b.add_edge(id(k, 0), id(k + 1, 0));
        }
        if a > 0 {
            frontier.push(id(k, -a));
            frontier.push(id(k, a));
        }
    }
    frontier.push(id(-s, 0));
    frontier.push(id(s, 0));
    b.finish(id(0, 0), frontier, true)
}

/// k rays of `ray_length` vertices glued at a common root.
pub fn build_star(k: usize, ray_length: usize) -> Result<RootedGraph> {
    if k < 2 || ray_length < 1 {
        return Err(Error::Parameter(format!("star needs k ≥ 2 and ray length ≥ 1, got ({k}, {ray_length})")));
    }
    let mut b = Builder::new();
    let root = b.add_vertex("0".into());
    let mut frontier = Vec::new();
    for ray in 0..k {
        let mut prev = root;
        for step in 1..=ray_length {
            let v = b.add_vertex(format!("{ray}:{step}"));
            b.add_edge(prev, v);
            prev = v;
        }
        frontier.push(prev);
    }
    b.finish(root, frontier, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_regular_trees() {
        let t = build_regular_tree(3, 2).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (10, 9));
        let line = build_regular_tree(2, 5).unwrap();
        assert_eq!(line.vertex_count(), 11);
        assert_eq!(line.max_degree(), 2);
        assert_eq!(line.girth(), None);
        assert!(build_regular_tree(3, 60).is_err());
    }

    #[test]
    fn tree_spheres_match_closed_form() {
        let t = build_regular_tree(3, 8).unwrap();
        let p = t.growth_profile(0, 8);
        for r in 1..=8 {
            assert_eq!(p.sphere_sizes[r], 3 << (r - 1));
        }
        assert_eq!(t.frontier().len(), 3 << 7);
    }

    #[test]
    fn znxn_boxes() {
        let g = build_znxn(2, 1).unwrap();
        let boxes: std::collections::BTreeSet<_> = g
            .labels()
            .unwrap()
            .iter()
            .filter(|l| l.starts_with('B'))
            .map(|l| l.split(':').next().unwrap().to_string())
            .collect();
        assert_eq!(boxes.len(), 9);
        let count = |prefix: &str| g.labels().unwrap().iter().filter(|l| l.starts_with(prefix)).count();
        assert_eq!(count("B[0,0]:"), 1);
        assert_eq!(count("B[1,1]:"), 9);
        assert_eq!(count("B[-1,0]:"), 9);
        assert_eq!(build_znxn(2, 2).unwrap().max_degree(), 4);
    }

    #[test]
    fn znxn_level_one_connectors_are_direct_edges() {
        let g = build_znxn(3, 1).unwrap();
        assert!(g.labels().unwrap().iter().all(|l| !l.starts_with('C')));
        let root = g.root();
        assert_eq!(g.degree(root), 6);
        for j in 0..3 {
            let mut face = vec!["0"; 3];
            face[j] = "-1";
            let mut x = vec!["0"; 3];
            x[j] = "1";
            let v = g.vertex_by_label(&format!("B[{}]:[{}]", x.join(","), face.join(","))).unwrap();
            assert_eq!(g.distance(root, v), 1);
        }
    }

    #[test]
    fn znxn_connector_lengths() {
        let g = build_znxn(2, 3).unwrap();
        let a = g.vertex_by_label("B[2,0]:[2,0]").unwrap();
        let b = g.vertex_by_label("B[3,0]:[-3,0]").unwrap();
        assert_eq!(g.distance(a, b), 3);
        let c = g.vertex_by_label("B[1,1]:[0,1]").unwrap();
        let d = g.vertex_by_label("B[1,2]:[0,-2]").unwrap();
        assert_eq!(g.distance(c, d), 2);
    }

    #[test]
    fn sparse_tree_spheres() {
        let g = build_sparse_tree_with_cycles(&[2], &[4, 8], &[6], 9).unwrap();
        let p = g.growth_profile(g.root(), 9);
        for r in 0..=9 {
            let expected = if r < 4 { 1 } else if r < 8 { 2 } else { 4 };
            assert_eq!(p.sphere_sizes[r], expected, "r = {r}");
        }
    }

    #[test]
    fn sparse_tree_degenerate_cycle_is_single_edge() {
        let g = build_sparse_tree_with_cycles(&[2], &[2, 6], &[4], 7).unwrap();
        let lv = g.levels();
        let level4: Vec<usize> = (0..g.vertex_count()).filter(|&v| lv[v] == 4).collect();
        assert_eq!(level4.len(), 2);
        assert!(g.has_edge(level4[0], level4[1]));
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.girth(), Some(7));
    }

    #[test]
    fn sparse_tree_cycle_closes() {
        let g = build_sparse_tree_with_cycles(&[2], &[1, 2, 4], &[1, 3], 5).unwrap();
        let lv = g.levels();
        for v in 0..g.vertex_count() {
            match lv[v] {
                1 => assert_eq!(g.degree(v), 4),
                3 => assert_eq!(g.degree(v), 5),
                _ => {}
            }
        }
        assert!(build_sparse_tree_with_cycles(&[2], &[4, 8], &[3], 9).is_err());
        assert!(build_sparse_tree_with_cycles(&[2], &[4, 8], &[6], 7).is_err());
    }

    #[test]
    fn comb_examples() {
        let g = build_comb(1, 1).unwrap();
        assert_eq!((g.vertex_count(), g.max_degree()), (9, 4));
        let p = build_comb(0, 3).unwrap();
        assert_eq!((p.vertex_count(), p.max_degree(), p.edge_count()), (7, 2, 6));
        let c = build_comb(2, 2).unwrap();
        assert_eq!(c.degree(c.vertex_by_label("(0,0)").unwrap()), 4);
        assert_eq!(c.degree(c.vertex_by_label("(2,2)").unwrap()), 1);
    }

    #[test]
    fn star_examples() {
        let claw = build_star(3, 1).unwrap();
        assert_eq!((claw.vertex_count(), claw.degree(claw.root())), (4, 3));
        let line = build_star(2, 4).unwrap();
        assert_eq!((line.vertex_count(), line.max_degree()), (9, 2));
        let s = build_star(3, 5).unwrap();
        assert_eq!(s.degree(s.root()), 3);
        assert!((1..s.vertex_count()).all(|v| s.degree(v) <= 2));
    }
}
