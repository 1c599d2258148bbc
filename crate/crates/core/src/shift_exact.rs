//! Shifted-interval weights, exact finite product measures and theta graphs.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_permutation, edges_of, Graph, Mask, UnionFind};
use crate::mst_exact::TreeDistribution;
use crate::poly::{PiecewisePoly, Poly};
use crate::rational::{int, rat, to_f64, QJson, Rational};
use crate::Limits;

/// Edge `i` is uniform on `[s_i, s_i + 1]`.
pub type ShiftVector = Vec<Rational>;

/// A finite mixture of point masses and uniform pieces.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawEdgeMeasure", into = "RawEdgeMeasure")]
pub struct EdgeMeasure {
    /// `(location, mass)`.
    pub atoms: Vec<(Rational, Rational)>,
    /// `(a, b, mass)` with `a < b`.
    pub uniform: Vec<(Rational, Rational, Rational)>,
}

#[derive(Serialize, Deserialize)]
struct RawEdgeMeasure {
    #[serde(default)]
    atoms: Vec<(QJson, QJson)>,
    #[serde(default)]
    uniform: Vec<(QJson, QJson, QJson)>,
}

impl TryFrom<RawEdgeMeasure> for EdgeMeasure {
    type Error = Error;
    fn try_from(r: RawEdgeMeasure) -> Result<Self> {
        let m = EdgeMeasure {
            atoms: r.atoms.into_iter().map(|(a, b)| (a.0, b.0)).collect(),
            uniform: r
                .uniform
                .into_iter()
                .map(|(a, b, c)| (a.0, b.0, c.0))
                .collect(),
        };
        m.validate()?;
        Ok(m)
    }
}

impl From<EdgeMeasure> for RawEdgeMeasure {
    fn from(m: EdgeMeasure) -> Self {
        RawEdgeMeasure {
            atoms: m
                .atoms
                .into_iter()
                .map(|(a, b)| (QJson(a), QJson(b)))
                .collect(),
            uniform: m
                .uniform
                .into_iter()
                .map(|(a, b, c)| (QJson(a), QJson(b), QJson(c)))
                .collect(),
        }
    }
}

impl EdgeMeasure {
    pub fn interval(a: Rational, b: Rational) -> Self {
        EdgeMeasure {
            atoms: Vec::new(),
            uniform: vec![(a, b, Rational::one())],
        }
    }

    pub fn shifted(s: &Rational) -> Self {
        EdgeMeasure::interval(s.clone(), s + int(1))
    }

    pub fn atoms(atoms: Vec<(Rational, Rational)>) -> Self {
        EdgeMeasure {
            atoms,
            uniform: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut total = Rational::zero();
        for (_, w) in &self.atoms {
            if w.is_negative() {
                return Err(Error::input("negative atom mass"));
            }
            total += w;
        }
        for (a, b, w) in &self.uniform {
            if a >= b {
                return Err(Error::input("uniform piece needs a < b"));
            }
            if w.is_negative() {
                return Err(Error::input("negative uniform mass"));
            }
            total += w;
        }
        if total != Rational::one() {
            return Err(Error::input(format!("edge masses sum to {total}, not 1")));
        }
        let mut locs: Vec<&Rational> = self
            .atoms
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(x, _)| x)
            .collect();
        locs.sort();
        if locs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::input("repeated atom location within one edge"));
        }
        Ok(())
    }

    fn support_points(&self) -> impl Iterator<Item = &Rational> {
        self.atoms
            .iter()
            .map(|(x, _)| x)
            .chain(self.uniform.iter().map(|(a, _, _)| a))
    }

    /// `x ↦ P(Y < X < x)` given `f(x) = P(Y < x)` for the event `Y`.
    pub fn transform(&self, f: &PiecewisePoly) -> PiecewisePoly {
        let mut out = PiecewisePoly::zero();
        for (c, w) in &self.atoms {
            if !w.is_zero() {
                out = out.add(&f.atom_transform(c, w));
            }
        }
        for (a, b, w) in &self.uniform {
            if !w.is_zero() {
                out = out.add(&f.uniform_transform(a, b, w));
            }
        }
        out
    }

    pub fn mean(&self) -> Rational {
        let a: Rational = self.atoms.iter().map(|(x, w)| x * w).sum();
        let u: Rational = self
            .uniform
            .iter()
            .map(|(l, r, w)| (l + r) * w / int(2))
            .sum();
        a + u
    }
}

/// Independent per-edge measures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<EdgeMeasure>", into = "Vec<EdgeMeasure>")]
pub struct ProductMeasureSpec {
    pub edges: Vec<EdgeMeasure>,
}

impl TryFrom<Vec<EdgeMeasure>> for ProductMeasureSpec {
    type Error = Error;
    fn try_from(edges: Vec<EdgeMeasure>) -> Result<Self> {
        ProductMeasureSpec::new(edges)
    }
}

impl From<ProductMeasureSpec> for Vec<EdgeMeasure> {
    fn from(s: ProductMeasureSpec) -> Self {
        s.edges
    }
}

impl ProductMeasureSpec {
    pub fn new(edges: Vec<EdgeMeasure>) -> Result<Self> {
        let spec = ProductMeasureSpec { edges };
        spec.validate()?;
        Ok(spec)
    }

    pub fn iid_uniform(m: usize) -> Self {
        ProductMeasureSpec {
            edges: vec![EdgeMeasure::interval(int(0), int(1)); m],
        }
    }

    pub fn from_shifts(s: &[Rational]) -> Self {
        ProductMeasureSpec {
            edges: s.iter().map(EdgeMeasure::shifted).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen: HashMap<&Rational, usize> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            e.validate()
                .map_err(|err| Error::input(format!("edge {i}: {err}")))?;
            for (x, w) in &e.atoms {
                if w.is_zero() {
                    continue;
                }
                if let Some(j) = seen.insert(x, i) {
                    return Err(Error::input(format!(
                        "collision: edges {j} and {i} share an atom at {x}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn start(&self) -> PiecewisePoly {
        let lo = self
            .edges
            .iter()
            .flat_map(EdgeMeasure::support_points)
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero);
        PiecewisePoly::step(lo - int(1), Rational::one())
    }

    fn check_size(&self, limits: &Limits) -> Result<()> {
        if self.m() > limits.max_exact_edges {
            return Err(Error::cap(
                "exact product-measure edges",
                self.m(),
                limits.max_exact_edges,
            ));
        }
        Ok(())
    }
}

/// `P(X_{σ(1)} < … < X_{σ(m)})`.
pub fn perm_prob_exact(
    spec: &ProductMeasureSpec,
    sigma: &[usize],
    limits: &Limits,
) -> Result<Rational> {
    spec.check_size(limits)?;
    check_permutation(sigma, spec.m())?;
    let f = sigma
        .iter()
        .fold(spec.start(), |f, &i| spec.edges[i].transform(&f));
    Ok(f.limit())
}

/// The induced law on all `m!` orderings (lowest first), omitting null orderings.
pub fn order_distribution_exact(
    spec: &ProductMeasureSpec,
    limits: &Limits,
) -> Result<BTreeMap<Vec<usize>, Rational>> {
    spec.check_size(limits)?;
    let mut out = BTreeMap::new();
    let mut prefix = Vec::with_capacity(spec.m());
    order_rec(spec, &spec.start(), &mut prefix, &mut out);
    Ok(out)
}

fn order_rec(
    spec: &ProductMeasureSpec,
    f: &PiecewisePoly,
    prefix: &mut Vec<usize>,
    out: &mut BTreeMap<Vec<usize>, Rational>,
) {
    if f.is_zero() {
        return;
    }
    if prefix.len() == spec.m() {
        out.insert(prefix.clone(), f.limit());
        return;
    }
    for i in 0..spec.m() {
        if prefix.contains(&i) {
            continue;
        }
        let g = spec.edges[i].transform(f);
        prefix.push(i);
        order_rec(spec, &g, prefix, out);
        prefix.pop();
    }
}

/// Law of the minimum spanning tree when edge weights follow `spec`.
pub fn tree_distribution_exact(
    g: &Graph,
    spec: &ProductMeasureSpec,
    limits: &Limits,
) -> Result<TreeDistribution> {
    if spec.m() != g.m() {
        return Err(Error::input(format!(
            "spec has {} edges, graph has {}",
            spec.m(),
            g.m()
        )));
    }
    g.require_connected()?;
    spec.check_size(limits)?;
    let start = spec.start();
    let uf = UnionFind::new(g.n);
    let parts: Vec<HashMap<Mask, Rational>> = (0..g.m())
        .into_par_iter()
        .map(|e| {
            let mut tally = HashMap::new();
            let mut uf = uf.clone();
            let (u, v) = g.edges[e];
            uf.union(u, v);
            let f = spec.edges[e].transform(&start);
            tree_rec(g, spec, &f, &uf, 1u128 << e, 1u128 << e, &mut tally);
            tally
        })
        .collect();
    let mut probs: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for part in parts {
        for (mask, p) in part {
            *probs.entry(edges_of(mask)).or_insert_with(Rational::zero) += p;
        }
    }
    probs.retain(|_, p| !p.is_zero());
    Ok(TreeDistribution { probs })
}

fn tree_rec(
    g: &Graph,
    spec: &ProductMeasureSpec,
    f: &PiecewisePoly,
    uf: &UnionFind,
    accepted: Mask,
    used: Mask,
    tally: &mut HashMap<Mask, Rational>,
) {
    if f.is_zero() {
        return;
    }
    if used.count_ones() as usize == g.m() {
        *tally.entry(accepted).or_insert_with(Rational::zero) += f.limit();
        return;
    }
    let complete = accepted.count_ones() as usize + 1 == g.n;
    for e in 0..g.m() {
        if used & (1u128 << e) != 0 {
            continue;
        }
        let next_f = spec.edges[e].transform(f);
        let bit = 1u128 << e;
        if complete {
            tree_rec(g, spec, &next_f, uf, accepted, used | bit, tally);
            continue;
        }
        let mut next = uf.clone();
        let (u, v) = g.edges[e];
        if next.union(u, v) {
            tree_rec(g, spec, &next_f, &next, accepted | bit, used | bit, tally);
        } else {
            tree_rec(g, spec, &next_f, uf, accepted, used | bit, tally);
        }
    }
}

/// Sum of coordinates of every point of the shiftahedron: the sum of its extreme point `(1, …, m)`.
pub fn shiftahedron_sum(m: usize) -> Rational {
    int((m * (m + 1) / 2) as i64)
}

pub fn shiftahedron_contains(s: &[Rational]) -> bool {
    let mut v = s.to_vec();
    v.sort();
    let sum: Rational = v.iter().sum();
    sum == shiftahedron_sum(v.len()) && v.windows(2).all(|w| &w[1] - &w[0] <= int(1))
}

/// Caps every gap between consecutive sorted shifts at 1, then translates onto the shiftahedron.
pub fn closing_gaps(s: &[Rational]) -> ShiftVector {
    let m = s.len();
    if m == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| s[a].cmp(&s[b]));
    let mut out = vec![Rational::zero(); m];
    out[idx[0]] = s[idx[0]].clone();
    for w in idx.windows(2) {
        let gap = &s[w[1]] - &s[w[0]];
        out[w[1]] = &out[w[0]] + gap.min(int(1));
    }
    let sum: Rational = out.iter().sum();
    let delta = (shiftahedron_sum(m) - sum) / int(m as i64);
    out.iter().map(|x| x + &delta).collect()
}

/// Exact per-type and per-tree probabilities on the theta graph with arms `r, s, t`.
#[derive(Clone, Debug)]
pub struct ThetaReport {
    pub lengths: [usize; 3],
    pub tree_count: u64,
    /// Probability under i.i.d. weights that the tree keeps arm `i` whole.
    pub mst0_type: [Rational; 3],
    pub mst0_tree: [Rational; 3],
    pub ust_type: [Rational; 3],
    pub ust_tree: Rational,
    /// `ust_type - mst0_type`.
    pub gap_type: [Rational; 3],
    /// `ust_tree - mst0_tree`.
    pub gap_tree: [Rational; 3],
    /// `rst(r² - st) / ((r+s)(r+t)(rs+rt+st))` with arm `i` in the role of `r`.
    pub closed_form_gap: [Rational; 3],
    pub shifted: Option<ShiftedTheta>,
}

#[derive(Clone, Debug)]
pub struct ShiftedTheta {
    pub shifts: [Rational; 3],
    pub type_probs: [Rational; 3],
    pub tv_to_ust: Rational,
}

fn rotations(l: [usize; 3]) -> [[i64; 3]; 3] {
    let [r, s, t] = l.map(|x| x as i64);
    [[r, s, t], [s, t, r], [t, r, s]]
}

fn check_lengths(l: [usize; 3]) -> Result<()> {
    if l.iter().any(|&x| x == 0) {
        return Err(Error::input("theta arm lengths must be positive"));
    }
    if l.iter().filter(|&&x| x == 1).count() > 1 {
        return Err(Error::input("at most one theta arm may have length 1"));
    }
    Ok(())
}

pub fn theta_report(
    l: [usize; 3],
    shifts: Option<[Rational; 3]>,
    limits: &Limits,
) -> Result<ThetaReport> {
    check_lengths(l)?;
    let [r, s, t] = l.map(|x| x as i64);
    let count = r * s + r * t + s * t;
    let mut mst0_type = [Rational::zero(), Rational::zero(), Rational::zero()];
    let mut mst0_tree = mst0_type.clone();
    let mut ust_type = mst0_type.clone();
    let mut closed = mst0_type.clone();
    for (i, [a, b, c]) in rotations(l).into_iter().enumerate() {
        // Arm `a` survives iff its maximum is below the maxima of both other arms.
        let p = int(1) - rat(a, a + b) - rat(a, a + c) + rat(a, a + b + c);
        mst0_tree[i] = &p / int(b * c);
        mst0_type[i] = p;
        ust_type[i] = rat(b * c, count);
        closed[i] = rat(a * b * c * (a * a - b * c), (a + b) * (a + c) * count);
    }
    let ust_tree = rat(1, count);
    let gap_type = [0, 1, 2].map(|i| &ust_type[i] - &mst0_type[i]);
    let gap_tree = [0, 1, 2].map(|i| &ust_tree - &mst0_tree[i]);
    let shifted = match shifts {
        None => None,
        Some(sh) => {
            let type_probs = if l.iter().sum::<usize>() <= limits.max_exact_edges {
                theta_type_probs_via_trees(l, &sh, limits)?
            } else {
                theta_type_probs(l, &sh)
            };
            let tv: Rational = (0..3)
                .map(|i| (&type_probs[i] - &ust_type[i]).abs())
                .sum::<Rational>()
                / int(2);
            Some(ShiftedTheta {
                shifts: sh,
                type_probs,
                tv_to_ust: tv,
            })
        }
    };
    Ok(ThetaReport {
        lengths: l,
        tree_count: count as u64,
        mst0_type,
        mst0_tree,
        ust_type,
        ust_tree,
        gap_type,
        gap_tree,
        closed_form_gap: closed,
        shifted,
    })
}

/// Theta graph with every edge of arm `i` uniform on `[shift_i, shift_i + 1]`.
pub fn theta_spec(l: [usize; 3], shifts: &[Rational; 3]) -> ProductMeasureSpec {
    let s: Vec<Rational> = (0..3)
        .flat_map(|i| std::iter::repeat(shifts[i].clone()).take(l[i]))
        .collect();
    ProductMeasureSpec::from_shifts(&s)
}

/// Which arm a spanning tree of the theta graph keeps whole.
pub fn theta_tree_type(l: [usize; 3], tree: &[usize]) -> usize {
    let mut start = 0;
    for (i, &len) in l.iter().enumerate() {
        if (start..start + len).all(|e| tree.contains(&e)) {
            return i;
        }
        start += len;
    }
    unreachable!("a spanning tree of a theta graph keeps one arm whole")
}

fn theta_type_probs_via_trees(
    l: [usize; 3],
    shifts: &[Rational; 3],
    limits: &Limits,
) -> Result<[Rational; 3]> {
    let g = Graph::theta(&l)?;
    let dist = tree_distribution_exact(&g, &theta_spec(l, shifts), limits)?;
    let mut out = [Rational::zero(), Rational::zero(), Rational::zero()];
    for (t, p) in &dist.probs {
        out[theta_tree_type(l, t)] += p;
    }
    Ok(out)
}

/// Type probabilities from the law of the three arm maxima.
pub fn theta_type_probs(l: [usize; 3], shifts: &[Rational; 3]) -> [Rational; 3] {
    let lo = shifts.iter().min().expect("three shifts") - int(1);
    let survival = |i: usize| {
        let a = &shifts[i];
        let p = Poly::constant(int(1)).sub(&Poly::shifted_power(a, l[i]));
        PiecewisePoly::from_pieces(vec![
            (lo.clone(), Poly::constant(int(1))),
            (a.clone(), p),
            (a + int(1), Poly::zero()),
        ])
    };
    let density = |i: usize| {
        let a = &shifts[i];
        let p = Poly::shifted_power(a, l[i]).derivative();
        PiecewisePoly::from_pieces(vec![(a.clone(), p), (a + int(1), Poly::zero())])
    };
    [0, 1, 2].map(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        density(i)
            .mul(&survival(j))
            .mul(&survival(k))
            .total_integral()
    })
}

#[derive(Clone, Debug)]
pub struct ThetaSolution {
    pub shifts: [Rational; 3],
    pub type_probs: [Rational; 3],
    pub tv_to_ust: Rational,
}

const THETA_ITERS: usize = 50;

/// Per-arm shifts `(0, β, γ)` under which the minimum spanning tree is uniform.
pub fn solve_theta_ust_shift(l: [usize; 3]) -> Result<ThetaSolution> {
    check_lengths(l)?;
    let report = theta_report(l, None, &Limits::default())?;
    let target = report.ust_type.clone();
    let probs =
        |b: &Rational, c: &Rational| theta_type_probs(l, &[Rational::zero(), b.clone(), c.clone()]);
    // For fixed β, the chance that arm T survives falls as γ grows.
    let solve_gamma = |b: &Rational| {
        let (mut lo, mut hi) = (int(-3), int(3));
        let mut mid = Rational::zero();
        for _ in 0..THETA_ITERS {
            mid = (&lo + &hi) / int(2);
            let p = &probs(b, &mid)[2];
            if *p == target[2] {
                break;
            }
            if *p > target[2] {
                lo = mid.clone();
            } else {
                hi = mid.clone();
            }
        }
        mid
    };
    let (mut lo, mut hi) = (int(-3), int(3));
    let mut best = (Rational::zero(), Rational::zero());
    for _ in 0..THETA_ITERS {
        let b = (&lo + &hi) / int(2);
        let c = solve_gamma(&b);
        let p = &probs(&b, &c)[1];
        best = (b.clone(), c);
        if *p == target[1] {
            break;
        }
        if *p > target[1] {
            lo = b;
        } else {
            hi = b;
        }
    }
    let shifts = [Rational::zero(), best.0, best.1];
    let type_probs = theta_type_probs(l, &shifts);
    let tv: Rational = (0..3)
        .map(|i| (&type_probs[i] - &target[i]).abs())
        .sum::<Rational>()
        / int(2);
    if to_f64(&tv) >= 1e-9 {
        return Err(Error::internal(format!(
            "theta shift search did not converge: best (0, {}, {}) has distance {}",
            to_f64(&shifts[1]),
            to_f64(&shifts[2]),
            to_f64(&tv)
        )));
    }
    Ok(ThetaSolution {
        shifts,
        type_probs,
        tv_to_ust: tv,
    })
}

/// True iff no subgraph is a theta graph with arms of unequal lengths.
pub fn is_snowman_free(g: &Graph) -> Result<bool> {
    if g.n > 12 {
        return Err(Error::cap("snowman search vertices", g.n, 12));
    }
    let mut adj = vec![Vec::new(); g.n];
    for &(u, v) in &g.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for x in 0..g.n {
        for y in x + 1..g.n {
            let mut blocked = vec![false; g.n];
            blocked[x] = true;
            if unequal_theta(&adj, x, y, &mut blocked, &mut Vec::new()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Extends `lens` with internally disjoint `x`–`y` paths; true once three of unequal length exist.
fn unequal_theta(
    adj: &[Vec<usize>],
    x: usize,
    y: usize,
    blocked: &mut Vec<bool>,
    lens: &mut Vec<usize>,
) -> bool {
    if lens.len() == 3 {
        return !(lens[0] == lens[1] && lens[1] == lens[2]);
    }
    let direct_used = lens.contains(&1);
    let mut interior = Vec::new();
    walk(
        adj,
        x,
        y,
        blocked,
        &mut interior,
        &mut |interior: &[usize], blocked: &mut Vec<bool>| {
            if interior.is_empty() && direct_used {
                return false;
            }
            lens.push(interior.len() + 1);
            let found = unequal_theta(adj, x, y, blocked, lens);
            lens.pop();
            found
        },
    )
}

fn walk(
    adj: &[Vec<usize>],
    cur: usize,
    y: usize,
    blocked: &mut Vec<bool>,
    interior: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize], &mut Vec<bool>) -> bool,
) -> bool {
    for &w in &adj[cur] {
        if w == y {
            if visit(interior, blocked) {
                return true;
            }
            continue;
        }
        if blocked[w] {
            continue;
        }
        blocked[w] = true;
        interior.push(w);
        let found = walk(adj, w, y, blocked, interior, visit);
        interior.pop();
        blocked[w] = false;
        if found {
            return true;
        }
    }
    false
}
