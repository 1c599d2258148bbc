//! Simple undirected graphs with stable edge indices, spanning trees, broken cycles
//! and greedy selection from an edge order.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::bareiss_det;

/// Sorted list of edge indices: a spanning tree, a forest or a spanning subgraph.
pub type EdgeSet = Vec<usize>;

/// Edge subsets as bit masks; the exact engines need `m <= 128`.
pub type Mask = u128;

pub const MAX_MASK_EDGES: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n, raw.edges)
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn sets(&self) -> usize {
        self.sets
    }

    pub fn component_sizes(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).filter(|&v| self.find(v) == v).collect();
        let mut sizes: Vec<usize> = roots.into_iter().map(|v| self.size[v]).collect();
        sizes.sort_unstable();
        sizes
    }
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge {i} = ({u},{v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("edge {i} is a self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::input(format!("edge {i} = ({u},{v}) is a duplicate")));
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph { n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        Graph {
            n,
            edges: (0..n).map(|i| (i, (i + 1) % n)).collect(),
        }
    }

    pub fn path(n: usize) -> Self {
        Graph {
            n,
            edges: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    /// Square 0-1-2-3 with the diagonal (0,2) as edge 4.
    pub fn square_with_diagonal() -> Self {
        Graph {
            n: 4,
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
        }
    }

    /// Square 0-1-2-3 with a roof vertex 4 on the side (2,3).
    pub fn house() -> Self {
        Graph {
            n: 5,
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)],
        }
    }

    /// Two poles 0 and 1 joined by internally disjoint paths of the given lengths.
    /// Edges are listed path by path, each from pole 0 towards pole 1.
    pub fn theta(lengths: &[usize]) -> Result<Self> {
        if lengths.iter().any(|&l| l == 0) {
            return Err(Error::input("theta path lengths must be positive"));
        }
        if lengths.iter().filter(|&&l| l == 1).count() > 1 {
            return Err(Error::input("at most one theta path can have length 1"));
        }
        let mut n = 2;
        let mut edges = Vec::new();
        for &l in lengths {
            let mut prev = 0;
            for _ in 0..l - 1 {
                edges.push((prev, n));
                prev = n;
                n += 1;
            }
            edges.push((prev, 1));
        }
        Graph::new(n, edges)
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        adj
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a))
    }

    pub fn is_connected(&self) -> bool {
        self.subgraph_connected(&(0..self.m()).collect::<Vec<_>>())
    }

    /// Whether the spanning subgraph with these edges is connected.
    pub fn subgraph_connected(&self, edges: &[usize]) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut uf = UnionFind::new(self.n);
        for &e in edges {
            let (u, v) = self.edges[e];
            uf.union(u, v);
        }
        uf.sets() == 1
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::input("graph not connected"))
        }
    }

    pub fn require_mask_size(&self) -> Result<()> {
        if self.m() > MAX_MASK_EDGES {
            Err(Error::cap("edge count", self.m(), MAX_MASK_EDGES))
        } else {
            Ok(())
        }
    }

    pub fn check_edge_set(&self, s: &[usize]) -> Result<EdgeSet> {
        let mut v = s.to_vec();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::input("repeated edge index"));
        }
        if let Some(&bad) = v.iter().find(|&&e| e >= self.m()) {
            return Err(Error::input(format!(
                "edge index {bad} out of range (m = {})",
                self.m()
            )));
        }
        Ok(v)
    }

    pub fn is_forest(&self, edges: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.n);
        edges.iter().all(|&e| {
            let (u, v) = self.edges[e];
            uf.union(u, v)
        })
    }

    pub fn is_spanning_tree(&self, t: &[usize]) -> bool {
        self.n >= 1 && t.len() + 1 == self.n && t.iter().all(|&e| e < self.m()) && self.is_forest(t)
    }

    /// Canonical form of a spanning tree, or an error naming the defect.
    pub fn check_spanning_tree(&self, t: &[usize]) -> Result<EdgeSet> {
        let t = self.check_edge_set(t)?;
        if t.len() + 1 != self.n {
            return Err(Error::input(format!(
                "not a spanning tree: {} edges for {} vertices",
                t.len(),
                self.n
            )));
        }
        if !self.is_forest(&t) {
            return Err(Error::input("not a spanning tree: contains a cycle"));
        }
        Ok(t)
    }

    /// Number of edges of `self` joining distinct components of the spanning subgraph `h`.
    pub fn boundary_size(&self, uf: &mut UnionFind) -> usize {
        self.edges.iter().filter(|&&(u, v)| !uf.same(u, v)).count()
    }

    /// Edges of `h` lying on a cycle of `h`.
    pub fn non_separating(&self, h: &[usize]) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n];
        for &e in h {
            let (u, v) = self.edges[e];
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let bridges = bridges(self.n, &adj);
        h.iter().copied().filter(|e| !bridges.contains(e)).collect()
    }
}

/// Bridges of a multigraph-free adjacency list, by low-link DFS.
fn bridges(n: usize, adj: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut out = Vec::new();
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (vertex, edge used to enter, next neighbour cursor)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, pe, ref mut cur)) = stack.last_mut() {
            if *cur < adj[v].len() {
                let (w, e) = adj[v][*cur];
                *cur += 1;
                if e == pe {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        out.push(pe);
                    }
                }
            }
        }
    }
    out
}

pub fn mask_of(edges: &[usize]) -> Mask {
    edges.iter().fold(0, |m, &e| m | (1u128 << e))
}

pub fn edges_of(mask: Mask) -> EdgeSet {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros() as usize;
        out.push(e);
        m &= m - 1;
    }
    out
}

/// All spanning trees in lexicographic order of their sorted edge-index tuples.
pub fn enumerate_spanning_trees(g: &Graph) -> Result<Vec<EdgeSet>> {
    enumerate_spanning_trees_capped(g, usize::MAX)
}

pub fn enumerate_spanning_trees_capped(g: &Graph, cap: usize) -> Result<Vec<EdgeSet>> {
    g.require_connected()?;
    let count = spanning_tree_count(g);
    if count > BigUint::from(cap) {
        return Err(Error::cap("spanning tree count", count, cap));
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(g.n.saturating_sub(1));
    branch(g, 0, &mut chosen, &mut out);
    Ok(out)
}

// Include-before-exclude over increasing edge index yields lexicographic order.
fn branch(g: &Graph, i: usize, chosen: &mut Vec<usize>, out: &mut Vec<EdgeSet>) {
    if chosen.len() + 1 == g.n {
        out.push(chosen.clone());
        return;
    }
    if i == g.m() {
        return;
    }
    chosen.push(i);
    if g.is_forest(chosen) {
        branch(g, i + 1, chosen, out);
    }
    chosen.pop();
    let rest: Vec<usize> = chosen.iter().copied().chain(i + 1..g.m()).collect();
    if g.subgraph_connected(&rest) {
        branch(g, i + 1, chosen, out);
    }
}

/// Kirchhoff count from a Laplacian cofactor; zero when disconnected.
pub fn spanning_tree_count(g: &Graph) -> BigUint {
    if g.n <= 1 {
        return BigUint::from(1u32);
    }
    let k = g.n - 1;
    let mut lap = vec![vec![BigInt::from(0); k]; k];
    for &(u, v) in &g.edges {
        for (a, b) in [(u, v), (v, u)] {
            if a >= 1 {
                lap[a - 1][a - 1] += 1;
                if b >= 1 {
                    lap[a - 1][b - 1] -= 1;
                }
            }
        }
    }
    bareiss_det(lap).abs().to_biguint().unwrap_or_default()
}

pub fn spanning_tree_count_u64(g: &Graph) -> Option<u64> {
    spanning_tree_count(g).to_u64()
}

/// Edges of the unique path between `a` and `b` inside the tree `t`, in walking order.
pub fn tree_path(g: &Graph, t: &[usize], a: usize, b: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); g.n];
    for &e in t {
        let (u, v) = g.edges[e];
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.n];
    let mut seen = vec![false; g.n];
    let mut queue = std::collections::VecDeque::from([a]);
    seen[a] = true;
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for &(y, e) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, e));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = b;
    while let Some((p, e)) = prev[cur] {
        path.push(e);
        cur = p;
    }
    path.reverse();
    path
}

/// The broken cycle `P_{T,e}`: tree edges joining the endpoints of the non-edge `e`, sorted.
pub fn broken_cycle(g: &Graph, t: &[usize], e: usize) -> Result<EdgeSet> {
    let t = g.check_spanning_tree(t)?;
    if e >= g.m() {
        return Err(Error::input(format!("edge index {e} out of range")));
    }
    if t.binary_search(&e).is_ok() {
        return Err(Error::input(format!("edge {e} belongs to the tree")));
    }
    let (u, v) = g.edges[e];
    let mut p = tree_path(g, &t, u, v);
    p.sort_unstable();
    Ok(p)
}

/// Pairs `(tree edge, non-edge)` with the tree edge on the non-edge's broken cycle.
pub fn cycle_relation(g: &Graph, t: &[usize]) -> Result<Vec<(usize, usize)>> {
    let t = g.check_spanning_tree(t)?;
    let mut rel = Vec::new();
    for e in (0..g.m()).filter(|e| t.binary_search(e).is_err()) {
        let (u, v) = g.edges[e];
        for f in tree_path(g, &t, u, v) {
            rel.push((f, e));
        }
    }
    rel.sort_unstable();
    Ok(rel)
}

pub fn check_permutation(order: &[usize], m: usize) -> Result<()> {
    if order.len() != m {
        return Err(Error::input(format!(
            "order has {} entries, expected {m}",
            order.len()
        )));
    }
    let mut seen = vec![false; m];
    for &e in order {
        if e >= m || std::mem::replace(&mut seen[e], true) {
            return Err(Error::input(
                "order is not a permutation of the edge indices",
            ));
        }
    }
    Ok(())
}

/// Greedy tree for the edge order, lowest rank first.
pub fn kruskal_select(g: &Graph, order: &[usize]) -> Result<EdgeSet> {
    check_permutation(order, g.m())?;
    let mut uf = UnionFind::new(g.n);
    let mut t: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&e| {
            let (u, v) = g.edges[e];
            uf.union(u, v)
        })
        .collect();
    if t.len() + 1 != g.n {
        return Err(Error::input("graph not connected"));
    }
    t.sort_unstable();
    Ok(t)
}
