//! Exact probabilities of forests, subgraphs and trees under i.i.d. edge weights.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    broken_cycle, edges_of, enumerate_spanning_trees_capped, mask_of, spanning_tree_count, EdgeSet,
    Graph, Mask, UnionFind,
};
use crate::rational::{double_factorial, factorial, from_biguint, int, Rational};
use crate::{factorial_u128, Limits};

/// Probabilities of spanning trees, keyed by canonical edge sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeDistribution {
    pub probs: BTreeMap<EdgeSet, Rational>,
}

impl TreeDistribution {
    pub fn get(&self, t: &[usize]) -> Rational {
        self.probs.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.probs.values().sum()
    }

    /// Total variation distance over the union of supports.
    pub fn tv(&self, other: &TreeDistribution) -> Rational {
        let mut keys: Vec<&EdgeSet> = self.probs.keys().chain(other.probs.keys()).collect();
        keys.sort();
        keys.dedup();
        let s: Rational = keys
            .into_iter()
            .map(|k| {
                let d = self.get(k) - other.get(k);
                if d < Rational::zero() {
                    -d
                } else {
                    d
                }
            })
            .sum();
        s / int(2)
    }

    pub fn is_uniform(&self) -> bool {
        let mut vals = self.probs.values();
        match vals.next() {
            Some(first) => vals.all(|v| v == first),
            None => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Internal,
    External,
    Kruskal,
    ReverseDelete,
    Brute,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "internal" => Method::Internal,
            "external" => Method::External,
            "kruskal" => Method::Kruskal,
            "rd" | "reverse-delete" => Method::ReverseDelete,
            "brute" => Method::Brute,
            _ => return Err(Error::input(format!("unknown method {s:?}"))),
        })
    }
}

pub fn mst_prob(g: &Graph, t: &[usize], method: Method, limits: &Limits) -> Result<Rational> {
    match method {
        Method::Internal => mst_prob_internal_with(g, t, limits),
        Method::External => mst_prob_external_with(g, t, limits),
        Method::Kruskal => {
            let t = g.check_spanning_tree(t)?;
            kruskal_forest_prob(g, &t)
        }
        Method::ReverseDelete => {
            let t = g.check_spanning_tree(t)?;
            reverse_delete_prob(g, &t)
        }
        Method::Brute => brute_force_mst_prob_with(g, t, limits),
    }
}

fn boundary_of(g: &Graph, mask: Mask) -> usize {
    let mut uf = UnionFind::new(g.n);
    for e in edges_of(mask) {
        let (u, v) = g.edges[e];
        uf.union(u, v);
    }
    g.boundary_size(&mut uf)
}

/// Memo of Kruskal-induction values, reusable across forests of one graph.
pub struct ForestMemo<'g> {
    g: &'g Graph,
    memo: HashMap<Mask, Rational>,
}

impl<'g> ForestMemo<'g> {
    pub fn new(g: &'g Graph) -> Result<Self> {
        g.require_connected()?;
        g.require_mask_size()?;
        Ok(ForestMemo {
            g,
            memo: HashMap::new(),
        })
    }

    /// `P_Kru(F)` for a forest given as a mask (caller guarantees acyclicity).
    pub fn prob(&mut self, f: Mask) -> Rational {
        if f == 0 {
            return Rational::one();
        }
        if let Some(v) = self.memo.get(&f) {
            return v.clone();
        }
        let mut total = Rational::zero();
        for e in edges_of(f) {
            let h = f & !(1u128 << e);
            total += self.prob(h) / int(boundary_of(self.g, h) as i64);
        }
        self.memo.insert(f, total.clone());
        total
    }

    /// The weighted variant `P_Kru(F) / |∂F|`.
    pub fn weighted(&mut self, f: Mask) -> Rational {
        self.prob(f) / int(boundary_of(self.g, f) as i64)
    }
}

pub fn kruskal_forest_prob(g: &Graph, f: &[usize]) -> Result<Rational> {
    let f = g.check_edge_set(f)?;
    if !g.is_forest(&f) {
        return Err(Error::input("edge set contains a cycle"));
    }
    Ok(ForestMemo::new(g)?.prob(mask_of(&f)))
}

pub fn weighted_forest_prob(g: &Graph, f: &[usize]) -> Result<Rational> {
    let f = g.check_edge_set(f)?;
    if !g.is_forest(&f) {
        return Err(Error::input("edge set contains a cycle"));
    }
    Ok(ForestMemo::new(g)?.weighted(mask_of(&f)))
}

/// Probability that reverse-delete passes through the connected spanning subgraph `h`.
pub fn reverse_delete_prob(g: &Graph, h: &[usize]) -> Result<Rational> {
    g.require_mask_size()?;
    let h = g.check_edge_set(h)?;
    if !g.subgraph_connected(&h) {
        return Err(Error::input("subgraph is not connected and spanning"));
    }
    let full: Mask = if g.m() == 128 {
        u128::MAX
    } else {
        (1u128 << g.m()) - 1
    };
    let mut memo: HashMap<Mask, Rational> = HashMap::new();
    Ok(rd_rec(g, mask_of(&h), full, &mut memo))
}

fn rd_rec(g: &Graph, h: Mask, full: Mask, memo: &mut HashMap<Mask, Rational>) -> Rational {
    if h == full {
        return Rational::one();
    }
    if let Some(v) = memo.get(&h) {
        return v.clone();
    }
    let mut total = Rational::zero();
    for e in edges_of(full & !h) {
        let bigger = h | (1u128 << e);
        let inner = g.non_separating(&edges_of(bigger)).len();
        total += rd_rec(g, bigger, full, memo) / int(inner as i64);
    }
    memo.insert(h, total.clone());
    total
}

pub fn mst_prob_internal(g: &Graph, t: &[usize]) -> Result<Rational> {
    mst_prob_internal_with(g, t, &Limits::default())
}

/// Sum over all orders of the tree edges of the product of `1/|∂F_j|`.
pub fn mst_prob_internal_with(g: &Graph, t: &[usize], limits: &Limits) -> Result<Rational> {
    g.require_connected()?;
    let t = g.check_spanning_tree(t)?;
    let terms = factorial_u128(t.len());
    if terms > limits.max_internal_terms {
        return Err(Error::cap(
            "internal-formula terms",
            terms,
            limits.max_internal_terms,
        ));
    }
    let uf = UnionFind::new(g.n);
    let used = vec![false; t.len()];
    Ok(internal_rec(g, &t, used, uf, 0))
}

fn internal_rec(
    g: &Graph,
    t: &[usize],
    used: Vec<bool>,
    mut uf: UnionFind,
    depth: usize,
) -> Rational {
    if depth == t.len() {
        return Rational::one();
    }
    let d = g.boundary_size(&mut uf);
    let child = |i: usize| {
        let mut uf = uf.clone();
        let (u, v) = g.edges[t[i]];
        uf.union(u, v);
        let mut used = used.clone();
        used[i] = true;
        internal_rec(g, t, used, uf, depth + 1)
    };
    let free: Vec<usize> = (0..t.len()).filter(|&i| !used[i]).collect();
    let sum: Rational = if depth == 0 && t.len() >= 7 {
        free.par_iter().map(|&i| child(i)).sum()
    } else {
        free.into_iter().map(child).sum()
    };
    sum / int(d as i64)
}

pub fn mst_prob_external(g: &Graph, t: &[usize]) -> Result<Rational> {
    mst_prob_external_with(g, t, &Limits::default())
}

/// Sum over all orders of the non-edges of the product of `1/|D_j|`, where `D_j` is the
/// union of the first `j` closed broken cycles.
pub fn mst_prob_external_with(g: &Graph, t: &[usize], limits: &Limits) -> Result<Rational> {
    g.require_connected()?;
    g.require_mask_size()?;
    let t = g.check_spanning_tree(t)?;
    let non_edges: Vec<usize> = (0..g.m()).filter(|e| t.binary_search(e).is_err()).collect();
    let terms = factorial_u128(non_edges.len());
    if terms > limits.max_external_terms {
        return Err(Error::cap(
            "too many non-edges",
            terms,
            limits.max_external_terms,
        ));
    }
    let cycles: Vec<Mask> = non_edges
        .iter()
        .map(|&e| broken_cycle(g, &t, e).map(|p| mask_of(&p) | (1u128 << e)))
        .collect::<Result<_>>()?;
    Ok(external_rec(&cycles, 0, 0))
}

fn external_rec(cycles: &[Mask], used: u64, d: Mask) -> Rational {
    if used.count_ones() as usize == cycles.len() {
        return Rational::one();
    }
    let child = |i: usize| {
        let nd = d | cycles[i];
        external_rec(cycles, used | (1 << i), nd) / int(nd.count_ones() as i64)
    };
    let free: Vec<usize> = (0..cycles.len())
        .filter(|&i| used & (1 << i) == 0)
        .collect();
    if used == 0 && cycles.len() >= 7 {
        free.par_iter().map(|&i| child(i)).sum()
    } else {
        free.into_iter().map(child).sum()
    }
}

/// Number of edge permutations selecting each tree (keyed by tree mask).
pub fn brute_force_counts(g: &Graph, limits: &Limits) -> Result<HashMap<Mask, u128>> {
    g.require_connected()?;
    g.require_mask_size()?;
    let perms = factorial_u128(g.m());
    if perms > limits.max_brute_perms {
        return Err(Error::cap(
            "edge permutations",
            perms,
            limits.max_brute_perms,
        ));
    }
    let full: Mask = (1u128 << g.m()) - 1;
    let firsts: Vec<usize> = (0..g.m()).collect();
    let parts: Vec<HashMap<Mask, u128>> = firsts
        .par_iter()
        .map(|&e| {
            let mut uf = UnionFind::new(g.n);
            let (u, v) = g.edges[e];
            uf.union(u, v);
            let mut tally = HashMap::new();
            brute_rec(g, &uf, full & !(1u128 << e), 1u128 << e, &mut tally);
            tally
        })
        .collect();
    let mut total: HashMap<Mask, u128> = HashMap::new();
    for p in parts {
        for (k, v) in p {
            *total.entry(k).or_default() += v;
        }
    }
    Ok(total)
}

fn brute_rec(
    g: &Graph,
    uf: &UnionFind,
    remaining: Mask,
    accepted: Mask,
    tally: &mut HashMap<Mask, u128>,
) {
    if accepted.count_ones() as usize + 1 == g.n {
        *tally.entry(accepted).or_default() += factorial_u128(remaining.count_ones() as usize);
        return;
    }
    for e in edges_of(remaining) {
        let mut next = uf.clone();
        let (u, v) = g.edges[e];
        if next.union(u, v) {
            brute_rec(
                g,
                &next,
                remaining & !(1u128 << e),
                accepted | (1u128 << e),
                tally,
            );
        } else {
            brute_rec(g, uf, remaining & !(1u128 << e), accepted, tally);
        }
    }
}

pub fn brute_force_mst_prob(g: &Graph, t: &[usize]) -> Result<Rational> {
    brute_force_mst_prob_with(g, t, &Limits::default())
}

/// `#{σ : Kruskal(σ) = t} / m!`.
pub fn brute_force_mst_prob_with(g: &Graph, t: &[usize], limits: &Limits) -> Result<Rational> {
    let t = g.check_spanning_tree(t)?;
    let counts = brute_force_counts(g, limits)?;
    let c = counts.get(&mask_of(&t)).copied().unwrap_or(0);
    Ok(Rational::new(c.into(), factorial_u128(g.m()).into()))
}

pub fn brute_force_distribution(g: &Graph, limits: &Limits) -> Result<TreeDistribution> {
    let counts = brute_force_counts(g, limits)?;
    let denom = factorial_u128(g.m());
    let probs = counts
        .into_iter()
        .map(|(k, c)| (edges_of(k), Rational::new(c.into(), denom.into())))
        .collect();
    Ok(TreeDistribution { probs })
}

pub fn mst_distribution(g: &Graph) -> Result<TreeDistribution> {
    mst_distribution_with(g, &Limits::default())
}

/// All tree probabilities through Kruskal induction with one shared memo.
pub fn mst_distribution_with(g: &Graph, limits: &Limits) -> Result<TreeDistribution> {
    let trees = enumerate_spanning_trees_capped(g, limits.max_trees)?;
    let mut memo = ForestMemo::new(g)?;
    let probs = trees
        .into_iter()
        .map(|t| {
            let p = memo.prob(mask_of(&t));
            (t, p)
        })
        .collect();
    Ok(TreeDistribution { probs })
}

pub fn ust_distribution(g: &Graph, limits: &Limits) -> Result<TreeDistribution> {
    let trees = enumerate_spanning_trees_capped(g, limits.max_trees)?;
    let p = Rational::new(1.into(), (trees.len() as u64).into());
    Ok(TreeDistribution {
        probs: trees.into_iter().map(|t| (t, p.clone())).collect(),
    })
}

/// `1 / (2n-3)!!`.
pub fn star_prob_closed_form(n: usize) -> Result<Rational> {
    if n < 2 {
        return Err(Error::input("star closed form needs n >= 2"));
    }
    Ok(Rational::new(
        1.into(),
        double_factorial(2 * n as u64 - 3).into(),
    ))
}

/// One isomorphism class of spanning forests of `K_n`.
#[derive(Clone, Debug)]
pub struct ForestClass {
    /// Canonical form: sorted rooted-tree codes of the components.
    pub key: String,
    pub edges: usize,
    pub component_sizes: Vec<usize>,
    pub degrees: Vec<usize>,
    pub representative: Vec<(usize, usize)>,
    pub labeled_count: BigUint,
    pub prob: Rational,
    pub weighted: Rational,
}

pub fn forest_class_probs_kn(n: usize) -> Result<Vec<ForestClass>> {
    if !(2..=8).contains(&n) {
        return Err(Error::input("forest classes need 2 <= n <= 8"));
    }
    let mut classes: Vec<ForestClass> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let empty: Vec<(usize, usize)> = Vec::new();
    let sizes = vec![1; n];
    let e2 = boundary_kn(&sizes);
    classes.push(ForestClass {
        key: forest_key(n, &empty),
        edges: 0,
        component_sizes: sizes,
        degrees: vec![0; n],
        representative: empty,
        labeled_count: BigUint::one(),
        prob: Rational::one(),
        weighted: Rational::new(1.into(), (e2 as u64).into()),
    });
    index.insert(classes[0].key.clone(), 0);
    let mut level = vec![0usize];
    for k in 1..n {
        let mut next = Vec::new();
        for &ci in &level {
            let rep = classes[ci].representative.clone();
            let mut uf = uf_of(n, &rep);
            for u in 0..n {
                for v in u + 1..n {
                    if uf.same(u, v) {
                        continue;
                    }
                    let mut f = rep.clone();
                    f.push((u, v));
                    let key = forest_key(n, &f);
                    if index.contains_key(&key) {
                        continue;
                    }
                    // Kruskal induction on unlabeled classes: delete each edge in turn.
                    let prob: Rational = (0..f.len())
                        .map(|i| {
                            let mut h = f.clone();
                            h.remove(i);
                            classes[index[&forest_key(n, &h)]].weighted.clone()
                        })
                        .sum();
                    let sizes = uf_of(n, &f).component_sizes();
                    let weighted = match boundary_kn(&sizes) {
                        0 => prob.clone(),
                        b => &prob / int(b as i64),
                    };
                    let mut degrees = vec![0; n];
                    for &(a, b) in &f {
                        degrees[a] += 1;
                        degrees[b] += 1;
                    }
                    degrees.sort_unstable_by(|a, b| b.cmp(a));
                    let labeled_count = factorial(n as u64) / automorphisms(n, &f);
                    index.insert(key.clone(), classes.len());
                    next.push(classes.len());
                    classes.push(ForestClass {
                        key,
                        edges: k,
                        component_sizes: sizes,
                        degrees,
                        representative: f,
                        labeled_count,
                        prob,
                        weighted,
                    });
                }
            }
        }
        level = next;
    }
    Ok(classes)
}

fn boundary_kn(sizes: &[usize]) -> usize {
    let total: usize = sizes.iter().sum();
    let sq: usize = sizes.iter().map(|s| s * s).sum();
    (total * total - sq) / 2
}

fn uf_of(n: usize, f: &[(usize, usize)]) -> UnionFind {
    let mut uf = UnionFind::new(n);
    for &(u, v) in f {
        uf.union(u, v);
    }
    uf
}

/// Canonical code of an unlabeled forest on `n` vertices.
pub fn forest_key(n: usize, f: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in f {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut comp = vec![usize::MAX; n];
    let mut codes = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut verts = vec![s];
        comp[s] = s;
        let mut i = 0;
        while i < verts.len() {
            for &w in &adj[verts[i]] {
                if comp[w] == usize::MAX {
                    comp[w] = s;
                    verts.push(w);
                }
            }
            i += 1;
        }
        codes.push(
            tree_centers(&adj, &verts)
                .into_iter()
                .map(|c| rooted_code(&adj, c, usize::MAX))
                .min()
                .unwrap_or_default(),
        );
    }
    codes.sort();
    codes.join("")
}

fn tree_centers(adj: &[Vec<usize>], verts: &[usize]) -> Vec<usize> {
    if verts.len() <= 2 {
        return verts.to_vec();
    }
    let mut deg: HashMap<usize, usize> = verts.iter().map(|&v| (v, adj[v].len())).collect();
    let mut leaves: Vec<usize> = verts.iter().copied().filter(|v| deg[v] <= 1).collect();
    let mut left = verts.len();
    while left > 2 {
        left -= leaves.len();
        let mut next = Vec::new();
        for &l in &leaves {
            for &w in &adj[l] {
                let d = deg.get_mut(&w).expect("vertex in component");
                if *d > 0 {
                    *d -= 1;
                    if *d == 1 {
                        next.push(w);
                    }
                }
            }
            deg.insert(l, 0);
        }
        leaves = next;
    }
    leaves
}

fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(adj, w, v))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

fn automorphisms(n: usize, f: &[(usize, usize)]) -> BigUint {
    let mut edge_set = vec![vec![false; n]; n];
    for &(u, v) in f {
        edge_set[u][v] = true;
        edge_set[v][u] = true;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0u64;
    permute(&mut perm, 0, &mut |p| {
        if f.iter().all(|&(u, v)| edge_set[p[u]][p[v]]) {
            count += 1;
        }
    });
    BigUint::from(count)
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Probability of the labeled spanning path 0-1-...-(n-1) in `K_n`, times `m!`.
pub fn labeled_path_numerator_kn(n: usize) -> Result<BigUint> {
    let g = Graph::complete(n);
    let t: Vec<usize> = (1..n)
        .map(|i| g.edge_index(i - 1, i).expect("complete graph"))
        .collect();
    let p = mst_prob_internal(&g, &t)?;
    let scaled = p * from_biguint(factorial(g.m() as u64));
    if !scaled.is_integer() {
        return Err(Error::internal(
            "path probability times m! is not an integer",
        ));
    }
    scaled
        .to_integer()
        .to_biguint()
        .ok_or_else(|| Error::internal("negative probability"))
}

pub fn tree_count_u64(g: &Graph) -> u64 {
    spanning_tree_count(g).to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn single_edge_and_empty() {
        let g = Graph::complete(4);
        assert_eq!(kruskal_forest_prob(&g, &[]).unwrap(), int(1));
        assert_eq!(kruskal_forest_prob(&g, &[2]).unwrap(), rat(1, 6));
        assert_eq!(kruskal_forest_prob(&g, &[0, 1, 2]).unwrap(), rat(1, 15));
        assert!(kruskal_forest_prob(&g, &[0, 1, 3]).is_err());
    }

    #[test]
    fn square_with_diagonal_values() {
        let g = Graph::square_with_diagonal();
        let d = mst_distribution(&g).unwrap();
        assert_eq!(d.total(), int(1));
        for (t, p) in &d.probs {
            let want = if t.contains(&4) {
                rat(2, 15)
            } else {
                rat(7, 60)
            };
            assert_eq!(p, &want, "tree {t:?}");
            assert_eq!(mst_prob_external(&g, t).unwrap(), want);
            assert_eq!(brute_force_mst_prob(&g, t).unwrap(), want);
            assert_eq!(reverse_delete_prob(&g, t).unwrap(), want);
        }
    }

    #[test]
    fn cycles_are_uniform() {
        for n in 3..7 {
            let g = Graph::cycle(n);
            let t: Vec<usize> = (1..n).collect();
            assert_eq!(mst_prob_external(&g, &t).unwrap(), rat(1, n as i64));
            assert_eq!(brute_force_mst_prob(&g, &t).unwrap(), rat(1, n as i64));
        }
    }

    #[test]
    fn reverse_delete_biconnected() {
        let g = Graph::complete(4);
        assert_eq!(
            reverse_delete_prob(&g, &(0..6).collect::<Vec<_>>()).unwrap(),
            int(1)
        );
        // K4 minus one edge and K4 minus a perfect matching are biconnected.
        assert_eq!(
            reverse_delete_prob(&g, &[0, 1, 2, 3, 4]).unwrap(),
            rat(1, 6)
        );
        let minus_matching: Vec<usize> = (0..6).filter(|&e| e != 0 && e != 5).collect();
        assert_eq!(
            reverse_delete_prob(&g, &minus_matching).unwrap(),
            rat(1, 15)
        );
        assert!(reverse_delete_prob(&g, &[0]).is_err());
    }

    #[test]
    fn stars_and_paths() {
        for n in 2..7 {
            let g = Graph::complete(n);
            let star: Vec<usize> = (0..n - 1).collect();
            assert_eq!(
                mst_prob_internal(&g, &star).unwrap(),
                star_prob_closed_form(n).unwrap()
            );
        }
        assert_eq!(star_prob_closed_form(3).unwrap(), rat(1, 3));
        assert!(star_prob_closed_form(1).is_err());
        assert_eq!(labeled_path_numerator_kn(4).unwrap(), BigUint::from(44u32));
        assert_eq!(
            labeled_path_numerator_kn(5).unwrap(),
            BigUint::from(27120u32)
        );
    }

    #[test]
    fn external_cap() {
        let g = Graph::complete(7);
        let star: Vec<usize> = (0..6).collect();
        let err = mst_prob_external(&g, &star).unwrap_err();
        assert!(matches!(err, Error::Cap { ref what, .. } if what == "too many non-edges"));
    }

    #[test]
    fn k5_forest_classes() {
        let classes = forest_class_probs_kn(5).unwrap();
        assert_eq!(classes.len(), 10);
        let find = |edges: usize, degrees: &[usize]| {
            classes
                .iter()
                .find(|c| c.edges == edges && c.degrees[..degrees.len()] == *degrees)
                .unwrap()
                .prob
                .clone()
        };
        assert_eq!(find(4, &[4]), rat(1, 105));
        assert_eq!(find(4, &[3, 2]), rat(127, 15120));
        assert_eq!(find(4, &[2, 2, 2]), rat(113, 15120));
        for k in 0..5 {
            let total: Rational = classes
                .iter()
                .filter(|c| c.edges == k)
                .map(|c| from_biguint(c.labeled_count.clone()) * &c.prob)
                .sum();
            assert_eq!(total, int(1), "edge count {k}");
        }
    }

    #[test]
    fn forest_keys_identify_isomorphism() {
        let a = forest_key(5, &[(0, 1), (1, 2)]);
        let b = forest_key(5, &[(3, 4), (4, 0)]);
        let c = forest_key(5, &[(0, 1), (2, 3)]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
