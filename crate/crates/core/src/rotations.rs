//! Rotation moves between spanning trees and the inequalities they carry.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{cycle_relation, tree_path, EdgeSet, Graph};
use crate::mst_exact::{mst_distribution, mst_prob_internal};
use crate::rational::{factorial, from_biguint, pow2, Rational};
use crate::{factorial_u128, Limits};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    NotExpanding,
    Weak,
    Strict,
}

/// Compares `β(R_{t1})` with `R_{t2}`.
pub fn cycle_expanding_check(
    g: &Graph,
    t1: &[usize],
    t2: &[usize],
    beta: &[usize],
) -> Result<Expansion> {
    let t1 = g.check_spanning_tree(t1)?;
    let t2 = g.check_spanning_tree(t2)?;
    crate::graph::check_permutation(beta, g.m())
        .map_err(|_| Error::input("beta is not a bijection of the edges"))?;
    let mut image: Vec<usize> = t1.iter().map(|&e| beta[e]).collect();
    image.sort_unstable();
    if image != t2 {
        return Err(Error::input("beta does not map t1 onto t2"));
    }
    let r1: BTreeSet<(usize, usize)> = cycle_relation(g, &t1)?
        .into_iter()
        .map(|(a, b)| (beta[a], beta[b]))
        .collect();
    let r2: BTreeSet<(usize, usize)> = cycle_relation(g, &t2)?.into_iter().collect();
    Ok(if r1 == r2 {
        Expansion::Weak
    } else if r1.is_subset(&r2) {
        Expansion::Strict
    } else {
        Expansion::NotExpanding
    })
}

/// Searches every bijection of tree edges; non-edges are then assigned by bipartite matching.
pub fn find_cycle_expanding_bijection(
    g: &Graph,
    t1: &[usize],
    t2: &[usize],
    limits: &Limits,
) -> Result<Option<Vec<usize>>> {
    let t1 = g.check_spanning_tree(t1)?;
    let t2 = g.check_spanning_tree(t2)?;
    let k = t1.len();
    if factorial_u128(k) > limits.max_internal_terms {
        return Err(Error::cap(
            "tree-edge bijections",
            factorial_u128(k),
            limits.max_internal_terms,
        ));
    }
    let non = |t: &[usize]| {
        (0..g.m())
            .filter(|e| t.binary_search(e).is_err())
            .collect::<Vec<_>>()
    };
    let (n1, n2) = (non(&t1), non(&t2));
    let paths = |t: &[usize], ne: &[usize]| -> Vec<Vec<usize>> {
        ne.iter()
            .map(|&e| {
                let (u, v) = g.edges[e];
                tree_path(g, t, u, v)
                    .into_iter()
                    .map(|f| t.binary_search(&f).expect("tree edge"))
                    .collect()
            })
            .collect()
    };
    // Broken cycles as bitmasks over tree-edge positions.
    let p1: Vec<u64> = paths(&t1, &n1)
        .iter()
        .map(|p| p.iter().fold(0, |m, &i| m | 1 << i))
        .collect();
    let p2: Vec<u64> = paths(&t2, &n2)
        .iter()
        .map(|p| p.iter().fold(0, |m, &i| m | 1 << i))
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut found = None;
    permute_until(&mut perm, 0, &mut |tau| {
        let mapped: Vec<u64> = p1
            .iter()
            .map(|&m| {
                (0..k)
                    .filter(|&i| m >> i & 1 == 1)
                    .fold(0, |acc, i| acc | 1 << tau[i])
            })
            .collect();
        let adj: Vec<Vec<usize>> = mapped
            .iter()
            .map(|&m| (0..p2.len()).filter(|&j| m & !p2[j] == 0).collect())
            .collect();
        if let Some(matching) = perfect_matching(&adj, p2.len()) {
            let mut beta = vec![0; g.m()];
            for i in 0..k {
                beta[t1[i]] = t2[tau[i]];
            }
            for (i, &j) in matching.iter().enumerate() {
                beta[n1[i]] = n2[j];
            }
            found = Some(beta);
            return true;
        }
        false
    });
    Ok(found)
}

fn permute_until(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return visit(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permute_until(p, k + 1, visit) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// Kuhn's augmenting paths; returns the right partner of each left vertex.
fn perfect_matching(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    if adj.len() != right {
        return None;
    }
    let mut owner: Vec<Option<usize>> = vec![None; right];
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v].map_or(true, |w| augment(w, adj, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    for u in 0..adj.len() {
        let mut seen = vec![false; right];
        if !augment(u, adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut out = vec![0; adj.len()];
    for (v, u) in owner.into_iter().enumerate() {
        out[u.expect("perfect")] = v;
    }
    Some(out)
}

/// A pair of trees related by rotating `e12` to `e13` inside a triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleSite {
    pub triangle: [usize; 3],
    /// Vertex sets of the three trees containing `v1`, `v2`, `v3`.
    pub parts: [Vec<usize>; 3],
    /// Contains `e12` and `e23`.
    pub s: EdgeSet,
    /// Contains `e13` and `e23`.
    pub s_prime: EdgeSet,
}

impl TriangleSite {
    /// The bijection swapping `e12` and `e13`.
    pub fn beta(&self, g: &Graph) -> Vec<usize> {
        let [a, b, c] = self.triangle;
        let e12 = g.edge_index(a, b).expect("triangle edge");
        let e13 = g.edge_index(a, c).expect("triangle edge");
        let mut beta: Vec<usize> = (0..g.m()).collect();
        beta.swap(e12, e13);
        beta
    }
}

const MAX_SITE_VERTICES: usize = 12;

/// Every placement of a triangle and three vertex-disjoint trees meeting the rotation hypotheses.
pub fn triangle_rotation_sites(g: &Graph) -> Result<Vec<TriangleSite>> {
    if g.n > MAX_SITE_VERTICES {
        return Err(Error::cap("triangle-site vertices", g.n, MAX_SITE_VERTICES));
    }
    let adj = adjacency_matrix(g);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for a in 0..g.n {
        for b in 0..g.n {
            for c in 0..g.n {
                if a == b || b == c || a == c || !adj[a][b] || !adj[b][c] || !adj[a][c] {
                    continue;
                }
                let others: Vec<usize> = (0..g.n).filter(|&v| v != a && v != b && v != c).collect();
                let total = 3usize.pow(others.len() as u32);
                for code in 0..total {
                    let mut parts = [vec![a], vec![b], vec![c]];
                    let mut x = code;
                    for &v in &others {
                        parts[x % 3].push(v);
                        x /= 3;
                    }
                    if let Some(site) = make_site(g, &adj, [a, b, c], parts) {
                        if seen.insert((site.s.clone(), site.s_prime.clone())) {
                            out.push(site);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; g.n]; g.n];
    for &(u, v) in &g.edges {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

fn make_site(
    g: &Graph,
    adj: &[Vec<bool>],
    tri: [usize; 3],
    mut parts: [Vec<usize>; 3],
) -> Option<TriangleSite> {
    let [a, b, c] = tri;
    // Only e13 may join T1 and T3.
    for &u in &parts[0] {
        for &w in &parts[2] {
            if adj[u][w] && !(u == a && w == c) {
                return None;
            }
        }
    }
    let extra = parts[0]
        .iter()
        .any(|&u| parts[1].iter().any(|&w| adj[u][w] && !(u == a && w == b)));
    if !extra {
        return None;
    }
    let mut forest = Vec::new();
    for p in &parts {
        forest.extend(bfs_tree(g, adj, p)?);
    }
    let e12 = g.edge_index(a, b)?;
    let e13 = g.edge_index(a, c)?;
    let e23 = g.edge_index(b, c)?;
    let mut s = forest.clone();
    s.extend([e12, e23]);
    s.sort_unstable();
    let mut s_prime = forest;
    s_prime.extend([e13, e23]);
    s_prime.sort_unstable();
    for p in parts.iter_mut() {
        p.sort_unstable();
    }
    Some(TriangleSite {
        triangle: tri,
        parts,
        s,
        s_prime,
    })
}

/// Breadth-first spanning tree of the subgraph induced on `verts` (rooted at `verts[0]`).
fn bfs_tree(g: &Graph, adj: &[Vec<bool>], verts: &[usize]) -> Option<Vec<usize>> {
    let inside: Vec<bool> = (0..g.n).map(|v| verts.contains(&v)).collect();
    let mut seen = vec![false; g.n];
    seen[verts[0]] = true;
    let mut queue = std::collections::VecDeque::from([verts[0]]);
    let mut edges = Vec::new();
    while let Some(x) = queue.pop_front() {
        for y in 0..g.n {
            if inside[y] && !seen[y] && adj[x][y] {
                seen[y] = true;
                edges.push(g.edge_index(x, y)?);
                queue.push_back(y);
            }
        }
    }
    (edges.len() + 1 == verts.len()).then_some(edges)
}

/// Two trees of a graph with exactly verified `P(S) > P(S')`.
#[derive(Clone, Debug)]
pub struct GraphWitness {
    pub graph: Graph,
    /// Samples drawn before a connected graph appeared.
    pub draws: usize,
    pub s: EdgeSet,
    pub s_prime: EdgeSet,
    /// The triangle rotation relating the trees; `None` when they came from the full law.
    pub site: Option<TriangleSite>,
    pub p_s: Rational,
    pub p_s_prime: Rational,
}

const MAX_DRAWS: usize = 1000;

/// Samples `G(n, p)` until connected, then looks for a triangle site and compares the two trees
/// exactly. `None` when the graph has uniform MST law.
pub fn random_graph_witness(n: usize, p: f64, seed: u64) -> Result<Option<GraphWitness>> {
    if !(3..=9).contains(&n) {
        return Err(Error::input("witness search needs 3 <= n <= 9"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input("edge probability must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=MAX_DRAWS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges)?;
        if g.is_connected() {
            return graph_witness(&g).map(|w| {
                w.map(|mut w| {
                    w.draws = draw;
                    w
                })
            });
        }
    }
    Ok(None)
}

/// Tries `T1 = {v1}`, `T3 = {v3}` and everything else in `T2` first, then the full site search,
/// then the most and least likely trees of the exact law. `None` when that law is uniform.
pub fn graph_witness(g: &Graph) -> Result<Option<GraphWitness>> {
    if !g.is_connected() {
        return Ok(None);
    }
    let adj = adjacency_matrix(g);
    let mut site = None;
    'outer: for a in 0..g.n {
        for c in 0..g.n {
            for b in 0..g.n {
                if a == b || b == c || a == c || !adj[a][b] || !adj[b][c] || !adj[a][c] {
                    continue;
                }
                let rest: Vec<usize> = std::iter::once(b)
                    .chain((0..g.n).filter(|&v| v != a && v != b && v != c))
                    .collect();
                if let Some(s) = make_site(g, &adj, [a, b, c], [vec![a], rest, vec![c]]) {
                    site = Some(s);
                    break 'outer;
                }
            }
        }
    }
    let site = match site {
        Some(s) => Some(s),
        None => triangle_rotation_sites(g)?.into_iter().next(),
    };
    let Some(site) = site else {
        let d = mst_distribution(g)?;
        let hi = d.probs.iter().max_by(|a, b| a.1.cmp(b.1));
        let lo = d.probs.iter().min_by(|a, b| a.1.cmp(b.1));
        return Ok(match (hi, lo) {
            (Some((s, p)), Some((sp, pp))) if p > pp => Some(GraphWitness {
                graph: g.clone(),
                draws: 1,
                s: s.clone(),
                s_prime: sp.clone(),
                site: None,
                p_s: p.clone(),
                p_s_prime: pp.clone(),
            }),
            _ => None,
        });
    };
    let p_s = mst_prob_internal(g, &site.s)?;
    let p_s_prime = mst_prob_internal(g, &site.s_prime)?;
    if p_s <= p_s_prime {
        return Err(Error::internal("rotation site without a strict inequality"));
    }
    Ok(Some(GraphWitness {
        graph: g.clone(),
        draws: 1,
        s: site.s.clone(),
        s_prime: site.s_prime.clone(),
        site: Some(site),
        p_s,
        p_s_prime,
    }))
}

/// Product of vertex degrees of a tree.
pub fn degree_product(g: &Graph, t: &[usize]) -> Result<BigUint> {
    let t = g.check_spanning_tree(t)?;
    Ok(degrees(g, &t).into_iter().map(BigUint::from).product())
}

fn degrees(g: &Graph, t: &[usize]) -> Vec<usize> {
    let mut d = vec![0; g.n];
    for &e in t {
        let (u, v) = g.edges[e];
        d[u] += 1;
        d[v] += 1;
    }
    d
}

fn tree_adjacency(g: &Graph, t: &[usize]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.n];
    for &e in t {
        let (u, v) = g.edges[e];
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Vertices of the component of `start` after removing the edge `start`–`away`.
fn branch(adj: &[Vec<usize>], start: usize, away: usize) -> Vec<usize> {
    let mut out = vec![start];
    let mut stack = vec![(start, away)];
    while let Some((x, from)) = stack.pop() {
        for &y in &adj[x] {
            if y != from {
                out.push(y);
                stack.push((y, x));
            }
        }
    }
    out
}

/// A rotation that lowers the degree product: a tree with a three-edge path `a-x-y-b` moves
/// everything hanging at `y` over to `x`. `None` for stars. Works in `K_n`.
pub fn star_ward_move(g: &Graph, t: &[usize]) -> Result<Option<EdgeSet>> {
    let t = g.check_spanning_tree(t)?;
    let adj = tree_adjacency(g, &t);
    for &e in &t {
        let (x, y) = g.edges[e];
        if adj[x].len() < 2 || adj[y].len() < 2 {
            continue;
        }
        let moved: Vec<usize> = adj[y].iter().copied().filter(|&w| w != x).collect();
        let mut out: Vec<usize> = t
            .iter()
            .copied()
            .filter(|&f| {
                let (u, v) = g.edges[f];
                !((u == y && moved.contains(&v)) || (v == y && moved.contains(&u)))
            })
            .collect();
        for w in moved {
            out.push(
                g.edge_index(x, w)
                    .ok_or_else(|| Error::input("moves need a complete graph"))?,
            );
        }
        out.sort_unstable();
        return Ok(Some(out));
    }
    Ok(None)
}

/// A rotation that raises the degree product: a bare leg `x … leaf` at a vertex of degree at
/// least three takes one other branch of `x` to its leaf end. `None` for paths.
pub fn path_ward_move(g: &Graph, t: &[usize]) -> Result<Option<PathRotationInstance>> {
    let t = g.check_spanning_tree(t)?;
    let adj = tree_adjacency(g, &t);
    for leaf in (0..g.n).filter(|&v| adj[v].len() == 1) {
        let mut path = vec![leaf];
        let mut prev = leaf;
        let mut cur = adj[leaf][0];
        while adj[cur].len() == 2 {
            path.push(cur);
            let next = if adj[cur][0] == prev {
                adj[cur][1]
            } else {
                adj[cur][0]
            };
            prev = cur;
            cur = next;
        }
        if adj[cur].len() < 3 {
            continue;
        }
        path.push(cur);
        path.reverse();
        let x = cur;
        let others: Vec<usize> = adj[x].iter().copied().filter(|&w| w != path[1]).collect();
        let side_edges = |roots: &[usize]| -> Vec<(usize, usize)> {
            let mut edges = Vec::new();
            for &r in roots {
                edges.push((r, x));
                let verts = branch(&adj, r, x);
                for &e in &t {
                    let (u, v) = g.edges[e];
                    if verts.contains(&u) && verts.contains(&v) {
                        edges.push((u, v));
                    }
                }
            }
            edges
        };
        let right = side_edges(&others[..1]);
        let left = side_edges(&others[1..]);
        return PathRotationInstance::new(g.n, left, path, right).map(Some);
    }
    Ok(None)
}

/// `T = L ∪ P ∪ R` with both `L` and `R` hanging at `v1`; `T'` hangs `R` at `vℓ` instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRotationInstance {
    pub n: usize,
    pub left: Vec<(usize, usize)>,
    pub path: Vec<usize>,
    /// Attached at `v1`.
    pub right: Vec<(usize, usize)>,
}

impl PathRotationInstance {
    /// `right` may be attached at either end of the path; it is stored attached at `v1`.
    pub fn new(
        n: usize,
        left: Vec<(usize, usize)>,
        path: Vec<usize>,
        right: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let l = path.len();
        if l < 2 {
            return Err(Error::input("the path needs at least two vertices"));
        }
        if left.is_empty() || right.is_empty() {
            return Err(Error::input("L and R each need at least one edge"));
        }
        let (v1, vl) = (path[0], path[l - 1]);
        let touches =
            |edges: &[(usize, usize)], x: usize| edges.iter().any(|&(a, b)| a == x || b == x);
        let right = match (touches(&right, v1), touches(&right, vl)) {
            (true, false) => right,
            (false, true) => right
                .into_iter()
                .map(|(a, b)| (if a == vl { v1 } else { a }, if b == vl { v1 } else { b }))
                .collect(),
            _ => return Err(Error::input("R must attach to exactly one end of the path")),
        };
        if !touches(&left, v1) {
            return Err(Error::input("L must attach at the first path vertex"));
        }
        let inst = PathRotationInstance {
            n,
            left,
            path,
            right,
        };
        let side_vertices = |edges: &[(usize, usize)]| -> BTreeSet<usize> {
            edges
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .filter(|&x| x != v1)
                .collect()
        };
        let (vl_set, vr_set) = (side_vertices(&inst.left), side_vertices(&inst.right));
        let pv: BTreeSet<usize> = inst.path.iter().copied().collect();
        if pv.len() != l
            || vl_set.iter().any(|x| pv.contains(x) || vr_set.contains(x))
            || vr_set.iter().any(|x| pv.contains(x))
            || vl_set.len() + vr_set.len() + l != n
            || inst.left.len() != vl_set.len()
            || inst.right.len() != vr_set.len()
        {
            return Err(Error::input(
                "L, P and R must partition the vertices into trees",
            ));
        }
        let g = Graph::complete(n);
        g.check_spanning_tree(&inst.tree()?)?;
        Ok(inst)
    }

    pub fn l(&self) -> usize {
        self.path.len()
    }

    pub fn r(&self) -> usize {
        self.l() / 2
    }

    /// Number of two-element folding classes.
    pub fn a(&self) -> usize {
        let l = self.l();
        (l * (l - 1) / 2 - self.r()) / 2
    }

    pub fn graph(&self) -> Graph {
        Graph::complete(self.n)
    }

    fn position(&self, v: usize) -> Option<usize> {
        self.path.iter().position(|&x| x == v).map(|i| i + 1)
    }

    fn in_right(&self, v: usize) -> bool {
        v != self.path[0] && self.right.iter().any(|&(a, b)| a == v || b == v)
    }

    fn in_left(&self, v: usize) -> bool {
        v != self.path[0] && self.left.iter().any(|&(a, b)| a == v || b == v)
    }

    /// Edge map carrying `T` to `T'`: edges from `R` into the path are reflected.
    pub fn beta_edge(&self, (u, v): (usize, usize)) -> (usize, usize) {
        let l = self.l();
        let reflect = |x: usize| self.position(x).map_or(x, |p| self.path[l - p]);
        if self.in_right(u) && self.position(v).is_some() {
            (u, reflect(v))
        } else if self.in_right(v) && self.position(u).is_some() {
            (reflect(u), v)
        } else {
            (u, v)
        }
    }

    fn edge_set(&self, pairs: impl Iterator<Item = (usize, usize)>) -> Result<EdgeSet> {
        let g = self.graph();
        let mut t: Vec<usize> = pairs
            .map(|(a, b)| {
                g.edge_index(a, b)
                    .ok_or_else(|| Error::input(format!("({a},{b}) is not an edge")))
            })
            .collect::<Result<_>>()?;
        t.sort_unstable();
        Ok(t)
    }

    fn path_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.path.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn tree(&self) -> Result<EdgeSet> {
        self.edge_set(
            self.left
                .iter()
                .copied()
                .chain(self.path_pairs())
                .chain(self.right.iter().copied()),
        )
    }

    pub fn tree_prime(&self) -> Result<EdgeSet> {
        self.edge_set(
            self.left
                .iter()
                .copied()
                .chain(self.path_pairs())
                .chain(self.right.iter().map(|&e| self.beta_edge(e))),
        )
    }
}

/// One entry of the folded state vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry {
    Neither,
    Both,
    Left,
    Right,
    /// Bitmask over indices `1..=r`.
    Set(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// `{e_i, ē_i}` for `i` below the middle.
    PathPair(usize),
    /// `e_r = ē_r` for even `ℓ`.
    Middle,
    /// An edge of `L` or `R`.
    SideTree,
    NonTree {
        path_classes: Vec<usize>,
        shape: Shape,
    },
}

/// How a non-tree class meets the path. `j1` and `j2` are bitmasks of path indices whose edges
/// lie on the broken cycle once, respectively twice (the middle edge counts as twice).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Inert,
    Cross,
    Side { side: Entry, j1: u64, j2: u64 },
    Chord { j1: u64, j2: u64 },
    SymmetricChord { j2: u64 },
}

#[derive(Clone, Debug)]
pub struct FoldedClass {
    pub reps: Vec<usize>,
    pub kind: ClassKind,
}

/// Edge classes of `K_n` under the reflection of the path, with their roles.
#[derive(Clone, Debug)]
pub struct Folding {
    pub instance: PathRotationInstance,
    pub graph: Graph,
    pub classes: Vec<FoldedClass>,
    pub class_of: Vec<usize>,
    /// Class map induced by `beta_edge`.
    pub beta: Vec<usize>,
}

impl Folding {
    pub fn new(inst: &PathRotationInstance) -> Result<Self> {
        let g = inst.graph();
        if inst.r() >= 64 {
            return Err(Error::cap("path-rotation half length", inst.r(), 63));
        }
        let t = inst.tree()?;
        let l = inst.l();
        let r = inst.r();
        let mut class_of = vec![usize::MAX; g.m()];
        let mut classes = Vec::new();
        for e in 0..g.m() {
            if class_of[e] != usize::MAX {
                continue;
            }
            let (u, v) = g.edges[e];
            let mut reps = vec![e];
            if let (Some(i), Some(j)) = (inst.position(u), inst.position(v)) {
                let mirror = g
                    .edge_index(inst.path[l - i], inst.path[l - j])
                    .expect("complete graph");
                if mirror != e {
                    reps.push(mirror);
                }
            }
            for &x in &reps {
                class_of[x] = classes.len();
            }
            classes.push(reps);
        }
        let index = |p: usize| if p <= r { p } else { l - p };
        let jsets = |a: usize, b: usize| {
            let mut count = vec![0u8; r + 1];
            for p in a..=b {
                count[index(p)] += 1;
            }
            let (mut j1, mut j2) = (0u64, 0u64);
            for (i, &c) in count.iter().enumerate().skip(1) {
                let middle = l % 2 == 0 && i == r;
                if c >= 2 || (c == 1 && middle) {
                    j2 |= 1 << i;
                } else if c == 1 {
                    j1 |= 1 << i;
                }
            }
            (j1, j2)
        };
        let mut out = Vec::with_capacity(classes.len());
        for reps in classes {
            let e = reps[0];
            let (u, v) = g.edges[e];
            let (pu, pv) = (inst.position(u), inst.position(v));
            let kind = if t.binary_search(&e).is_ok() {
                match (pu, pv) {
                    (Some(a), Some(b)) => {
                        let p = a.min(b);
                        if l % 2 == 0 && p == r {
                            ClassKind::Middle
                        } else {
                            ClassKind::PathPair(index(p))
                        }
                    }
                    _ => ClassKind::SideTree,
                }
            } else {
                let mut path_classes: Vec<usize> = tree_path(&g, &t, u, v)
                    .into_iter()
                    .map(|f| class_of[f])
                    .collect();
                path_classes.sort_unstable();
                path_classes.dedup();
                let shape = match (pu, pv) {
                    (Some(a), Some(b)) => {
                        let (i1, i2) = (a.min(b), a.max(b));
                        let (j1, j2) = jsets(i1, i2 - 1);
                        if i1 + i2 == l + 1 {
                            Shape::SymmetricChord { j2 }
                        } else {
                            Shape::Chord { j1, j2 }
                        }
                    }
                    (Some(p), None) | (None, Some(p)) => {
                        let x = if pu.is_some() { v } else { u };
                        if p == 1 {
                            Shape::Inert
                        } else {
                            let (j1, j2) = jsets(1, p - 1);
                            let side = if inst.in_left(x) {
                                Entry::Left
                            } else {
                                Entry::Right
                            };
                            Shape::Side { side, j1, j2 }
                        }
                    }
                    (None, None) => {
                        if (inst.in_left(u) && inst.in_right(v))
                            || (inst.in_right(u) && inst.in_left(v))
                        {
                            Shape::Cross
                        } else {
                            Shape::Inert
                        }
                    }
                };
                ClassKind::NonTree {
                    path_classes,
                    shape,
                }
            };
            out.push(FoldedClass { reps, kind });
        }
        let beta = out
            .iter()
            .map(|c| {
                let (a, b) = inst.beta_edge(g.edges[c.reps[0]]);
                class_of[g.edge_index(a, b).expect("complete graph")]
            })
            .collect();
        Ok(Folding {
            instance: inst.clone(),
            graph: g,
            classes: out,
            class_of,
            beta,
        })
    }

    pub fn r(&self) -> usize {
        self.instance.r()
    }

    /// How often each class occurs in a folded permutation.
    pub fn multiplicities(&self) -> Vec<u8> {
        self.classes.iter().map(|c| c.reps.len() as u8).collect()
    }

    /// The folded permutation of an edge order.
    pub fn fold(&self, sigma: &[usize]) -> Vec<usize> {
        sigma.iter().map(|&e| self.class_of[e]).collect()
    }
}

/// The state of one folded permutation after a prefix; `q` and `q'` are stored as exponents
/// `k` of `2^-k`, with `None` for zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedState {
    /// Entries `1..=r`; slot 0 is unused.
    pub s: Vec<Entry>,
    pub q: Option<u32>,
    pub q_prime: Option<u32>,
    pub seen: Vec<u8>,
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn dyadic(e: Option<u32>) -> Rational {
    e.map_or_else(Rational::zero, |k| {
        Rational::new(1.into(), from_biguint(pow2(k)).to_integer())
    })
}

impl FoldedState {
    pub fn new(f: &Folding) -> Self {
        FoldedState {
            s: vec![Entry::Neither; f.r() + 1],
            q: Some(0),
            q_prime: Some(0),
            seen: vec![0; f.classes.len()],
        }
    }

    pub fn q(&self) -> Rational {
        dyadic(self.q)
    }

    pub fn q_prime(&self) -> Rational {
        dyadic(self.q_prime)
    }

    pub fn is_dead(&self) -> bool {
        self.q.is_none() && self.q_prime.is_none()
    }

    fn kill(&mut self) {
        self.q = None;
        self.q_prime = None;
    }

    fn halve(&mut self, k: usize) {
        let k = k as u32;
        self.q = self.q.map(|e| e + k);
        self.q_prime = self.q_prime.map(|e| e + k);
    }

    fn all_both(&self, mask: u64) -> bool {
        bits(mask).all(|j| self.s[j] == Entry::Both)
    }

    /// Distinct undecided sets and the decided entries among the indices of `mask`.
    fn undecided(&self, mask: u64) -> (Vec<u64>, BTreeSet<Entry>) {
        let mut sets = Vec::new();
        let mut fixed = BTreeSet::new();
        for j in bits(mask) {
            match self.s[j] {
                Entry::Set(m) => {
                    if !sets.contains(&m) {
                        sets.push(m);
                    }
                }
                Entry::Both => {}
                x => {
                    fixed.insert(x);
                }
            }
        }
        (sets, fixed)
    }

    fn assign(&mut self, sets: &[u64], value: impl Fn(u64) -> Entry) {
        let union = sets.iter().fold(0, |a, b| a | b);
        for j in bits(union) {
            self.s[j] = value(union);
        }
    }

    /// Processes the next class of the folded permutation.
    pub fn step(&mut self, f: &Folding, class: usize) {
        let before = self.seen[class];
        self.seen[class] += 1;
        let r = f.r();
        match &f.classes[class].kind {
            ClassKind::PathPair(i) => {
                let i = *i;
                if before == 0 {
                    self.s[i] = Entry::Set(1 << i);
                } else {
                    self.s[i] = Entry::Both;
                    for e in self.s.iter_mut() {
                        if let Entry::Set(m) = e {
                            *m &= !(1 << i);
                        }
                    }
                }
            }
            ClassKind::Middle => self.s[r] = Entry::Both,
            ClassKind::SideTree => {}
            ClassKind::NonTree {
                path_classes,
                shape,
            } => {
                if path_classes.iter().any(|&c| self.seen[c] == 0) {
                    self.kill();
                    return;
                }
                match *shape {
                    Shape::Inert => {}
                    Shape::Cross => {
                        if !(1..=r).all(|j| self.s[j] == Entry::Both) {
                            self.q_prime = None;
                        }
                    }
                    Shape::Side { side, j1, j2 } => {
                        if !self.all_both(j2) {
                            self.kill();
                            return;
                        }
                        let (sets, fixed) = self.undecided(j1);
                        self.halve(sets.len());
                        if fixed.iter().any(|&x| x != side) {
                            self.q_prime = None;
                        }
                        self.assign(&sets, |_| side);
                    }
                    Shape::Chord { j1, j2 } => {
                        if before > 0 {
                            if !self.all_both(j1 | j2) {
                                self.kill();
                            }
                            return;
                        }
                        if !self.all_both(j2) {
                            self.kill();
                            return;
                        }
                        let (sets, fixed) = self.undecided(j1);
                        if fixed.contains(&Entry::Neither) {
                            self.kill();
                        } else if !fixed.is_empty() {
                            self.halve(sets.len() + 1);
                            let target = if fixed.len() == 1 {
                                *fixed.iter().next().expect("one entry")
                            } else {
                                self.q_prime = None;
                                Entry::Left
                            };
                            self.assign(&sets, |_| target);
                        } else if !sets.is_empty() {
                            self.halve(sets.len());
                            self.assign(&sets, Entry::Set);
                        }
                    }
                    Shape::SymmetricChord { j2 } => {
                        if !self.all_both(j2) {
                            self.kill();
                        }
                    }
                }
            }
        }
    }
}

/// Exact `(P(T), P(T'))` by walking every folded permutation.
pub fn path_rotation_probs(
    inst: &PathRotationInstance,
    limits: &Limits,
) -> Result<(Rational, Rational)> {
    let f = Folding::new(inst)?;
    let m = f.graph.m();
    let count = factorial_u128(m) >> inst.a();
    if count > limits.max_folded {
        return Err(Error::cap("folded permutations", count, limits.max_folded));
    }
    let mult = f.multiplicities();
    let start = FoldedState::new(&f);
    let firsts: Vec<usize> = (0..f.classes.len()).collect();
    let parts: Vec<(Vec<u128>, Vec<u128>)> = firsts
        .par_iter()
        .map(|&c| {
            let mut hist = (Vec::new(), Vec::new());
            let mut state = start.clone();
            state.step(&f, c);
            if !state.is_dead() {
                let mut rem = mult.clone();
                rem[c] -= 1;
                folded_rec(&f, &state, &mut rem, m - 1, &mut hist);
            }
            hist
        })
        .collect();
    let mut q = Rational::zero();
    let mut qp = Rational::zero();
    for (a, b) in parts {
        for (e, &c) in a.iter().enumerate() {
            q += Rational::from_integer(c.into()) * dyadic(Some(e as u32));
        }
        for (e, &c) in b.iter().enumerate() {
            qp += Rational::from_integer(c.into()) * dyadic(Some(e as u32));
        }
    }
    let scale = from_biguint(pow2(inst.a() as u32)) / from_biguint(factorial(m as u64));
    Ok((q * &scale, qp * scale))
}

fn tally(hist: &mut Vec<u128>, e: Option<u32>) {
    if let Some(e) = e {
        let e = e as usize;
        if hist.len() <= e {
            hist.resize(e + 1, 0);
        }
        hist[e] += 1;
    }
}

fn folded_rec(
    f: &Folding,
    state: &FoldedState,
    rem: &mut Vec<u8>,
    left: usize,
    hist: &mut (Vec<u128>, Vec<u128>),
) {
    if left == 0 {
        tally(&mut hist.0, state.q);
        tally(&mut hist.1, state.q_prime);
        return;
    }
    for c in 0..rem.len() {
        if rem[c] == 0 {
            continue;
        }
        let mut next = state.clone();
        next.step(f, c);
        if next.is_dead() {
            continue;
        }
        rem[c] -= 1;
        folded_rec(f, &next, rem, left - 1, hist);
        rem[c] += 1;
    }
}

/// Every path-rotation instance of `K_n` up to relabeling: all path lengths and all shapes of
/// `L` and `R` as rooted trees.
pub fn all_instances(n: usize) -> Result<Vec<PathRotationInstance>> {
    let mut out = Vec::new();
    for l in 2..=n.saturating_sub(2) {
        let rest = n - l;
        for nl in 1..rest {
            let nr = rest - nl;
            for ls in rooted_shapes(nl) {
                for rs in rooted_shapes(nr) {
                    let path: Vec<usize> = (0..l).collect();
                    let relabel = |shape: &[(usize, usize)], base: usize| {
                        shape
                            .iter()
                            .map(|&(a, b)| (if a == 0 { 0 } else { base + a - 1 }, base + b - 1))
                            .collect()
                    };
                    out.push(PathRotationInstance::new(
                        n,
                        relabel(&ls, l),
                        path,
                        relabel(&rs, l + nl),
                    )?);
                }
            }
        }
    }
    Ok(out)
}

/// Non-isomorphic rooted trees with `k` non-root vertices, as edges `(parent, child)` on
/// `0..=k` rooted at 0.
fn rooted_shapes(k: usize) -> Vec<Vec<(usize, usize)>> {
    let mut seen: HashMap<String, Vec<(usize, usize)>> = HashMap::new();
    let mut parents = vec![0usize; k];
    fn rec(i: usize, parents: &mut Vec<usize>, seen: &mut HashMap<String, Vec<(usize, usize)>>) {
        if i == parents.len() {
            let edges: Vec<(usize, usize)> = parents
                .iter()
                .enumerate()
                .map(|(c, &p)| (p, c + 1))
                .collect();
            seen.entry(rooted_key(&edges, 0)).or_insert(edges);
            return;
        }
        for p in 0..=i {
            parents[i] = p;
            rec(i + 1, parents, seen);
        }
    }
    rec(0, &mut parents, &mut seen);
    let mut shapes: Vec<_> = seen.into_iter().collect();
    shapes.sort();
    shapes.into_iter().map(|(_, e)| e).collect()
}

fn rooted_key(edges: &[(usize, usize)], v: usize) -> String {
    let mut kids: Vec<String> = edges
        .iter()
        .filter(|&&(p, _)| p == v)
        .map(|&(_, c)| rooted_key(edges, c))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_spanning_trees, kruskal_select};
    use crate::rational::rat;

    fn k5_l3() -> PathRotationInstance {
        PathRotationInstance::new(5, vec![(3, 0)], vec![0, 1, 2], vec![(2, 4)]).unwrap()
    }

    #[test]
    fn instance_normalizes_right_side() {
        let inst = k5_l3();
        assert_eq!(inst.right, vec![(0, 4)]);
        assert_eq!(inst.r(), 1);
        assert_eq!(inst.a(), 1);
        let g = inst.graph();
        let tp = inst.tree_prime().unwrap();
        assert!(tp.contains(&g.edge_index(2, 4).unwrap()));
        assert!(PathRotationInstance::new(5, vec![], vec![0, 1, 2], vec![(2, 4)]).is_err());
        assert!(PathRotationInstance::new(5, vec![(3, 1)], vec![0, 1, 2], vec![(2, 4)]).is_err());
    }

    #[test]
    fn k5_matches_internal_formula() {
        let inst = k5_l3();
        let (p, pp) = path_rotation_probs(&inst, &Limits::default()).unwrap();
        let g = inst.graph();
        assert_eq!(p, mst_prob_internal(&g, &inst.tree().unwrap()).unwrap());
        assert_eq!(
            pp,
            mst_prob_internal(&g, &inst.tree_prime().unwrap()).unwrap()
        );
        assert!(p > pp);
    }

    #[test]
    fn folded_cap() {
        let inst =
            PathRotationInstance::new(6, vec![(4, 0)], vec![0, 1, 2, 3], vec![(0, 5)]).unwrap();
        assert!(matches!(
            path_rotation_probs(&inst, &Limits::default()),
            Err(Error::Cap { .. })
        ));
    }

    #[test]
    fn figure_six_prefix() {
        // L = {a-v1, a2-a}, R = {b-v1}, path v1..v5 = 0..4.
        let inst =
            PathRotationInstance::new(8, vec![(5, 0), (6, 5)], vec![0, 1, 2, 3, 4], vec![(7, 0)])
                .unwrap();
        let f = Folding::new(&inst).unwrap();
        let g = &f.graph;
        let class = |a: usize, b: usize| f.class_of[g.edge_index(a, b).unwrap()];
        let mut st = FoldedState::new(&f);
        for c in [
            class(0, 1),
            class(1, 2),
            class(0, 2),
            class(5, 0),
            class(6, 5),
        ] {
            st.step(&f, c);
        }
        assert_eq!((st.q(), st.q_prime()), (rat(1, 4), rat(1, 4)));
        assert_eq!(st.s[1], Entry::Set(0b110));
        st.step(&f, class(5, 1));
        assert_eq!((st.q(), st.q_prime()), (rat(1, 8), rat(1, 8)));
        assert_eq!(&st.s[1..], &[Entry::Left, Entry::Left]);
        st.step(&f, class(7, 0));
        st.step(&f, class(7, 2));
        assert_eq!((st.q(), st.q_prime()), (rat(1, 8), rat(0, 1)));
    }

    #[test]
    fn triangle_sites_and_expansion() {
        let g = Graph::square_with_diagonal();
        let sites = triangle_rotation_sites(&g).unwrap();
        assert!(!sites.is_empty());
        for site in &sites {
            let beta = site.beta(&g);
            assert_eq!(
                cycle_expanding_check(&g, &site.s, &site.s_prime, &beta).unwrap(),
                Expansion::Strict
            );
            assert!(
                mst_prob_internal(&g, &site.s).unwrap()
                    > mst_prob_internal(&g, &site.s_prime).unwrap()
            );
        }
        assert!(triangle_rotation_sites(&Graph::cycle(6))
            .unwrap()
            .is_empty());
        let t = vec![0, 1, 2];
        let id: Vec<usize> = (0..5).collect();
        assert_eq!(
            cycle_expanding_check(&g, &t, &t, &id).unwrap(),
            Expansion::Weak
        );
        assert!(cycle_expanding_check(&g, &t, &[0, 1, 4], &id).is_err());
    }

    #[test]
    fn bijection_search() {
        let g = Graph::square_with_diagonal();
        let site = &triangle_rotation_sites(&g).unwrap()[0];
        let lim = Limits::default();
        let beta = find_cycle_expanding_bijection(&g, &site.s, &site.s_prime, &lim)
            .unwrap()
            .unwrap();
        assert_ne!(
            cycle_expanding_check(&g, &site.s, &site.s_prime, &beta).unwrap(),
            Expansion::NotExpanding
        );
        assert!(
            find_cycle_expanding_bijection(&g, &site.s_prime, &site.s, &lim)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn degree_products() {
        let g = Graph::complete(5);
        let star: Vec<usize> = (0..4).collect();
        assert_eq!(degree_product(&g, &star).unwrap(), BigUint::from(4u32));
        let path: Vec<usize> = (1..5).map(|i| g.edge_index(i - 1, i).unwrap()).collect();
        assert_eq!(degree_product(&g, &path).unwrap(), BigUint::from(8u32));
        assert_eq!(
            degree_product(&Graph::complete(2), &[0]).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn moves_are_monotone() {
        let g = Graph::complete(6);
        for t in enumerate_spanning_trees(&g)
            .unwrap()
            .into_iter()
            .step_by(37)
        {
            let d = degree_product(&g, &t).unwrap();
            let p = mst_prob_internal(&g, &t).unwrap();
            if let Some(u) = star_ward_move(&g, &t).unwrap() {
                assert!(degree_product(&g, &u).unwrap() < d);
                assert!(mst_prob_internal(&g, &u).unwrap() > p);
            }
            if let Some(inst) = path_ward_move(&g, &t).unwrap() {
                assert_eq!(inst.tree().unwrap(), t);
                let u = inst.tree_prime().unwrap();
                assert!(degree_product(&g, &u).unwrap() > d);
                assert!(mst_prob_internal(&g, &u).unwrap() < p);
            }
        }
    }

    #[test]
    fn k5_instances() {
        let all = all_instances(5).unwrap();
        assert_eq!(all.len(), 5);
        assert_eq!(all.iter().filter(|i| i.l() == 2).count(), 4);
    }

    #[test]
    fn witness_on_fixed_graphs() {
        assert!(graph_witness(&Graph::path(5)).unwrap().is_none());
        assert!(graph_witness(&Graph::cycle(6)).unwrap().is_none());
        let w = graph_witness(&Graph::complete(5)).unwrap().unwrap();
        assert!(w.p_s > w.p_s_prime);
        let t = kruskal_select(&Graph::complete(4), &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(t, vec![0, 1, 2]);
    }
}
