//! Seeded Monte Carlo estimates of minimum-spanning-tree laws under product measures.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edges_of, EdgeSet, Graph, Mask, UnionFind};
use crate::mst_exact::TreeDistribution;
use crate::rational::{to_f64, Rational};
use crate::shift_exact::{EdgeMeasure, ProductMeasureSpec};

static TIE_WARNED: AtomicBool = AtomicBool::new(false);

/// Generator: `ChaCha8Rng::seed_from_u64(seed)` with one stream per substream index
/// (rand_chacha 0.3). Counts depend only on `(seed, samples, streams)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: u64,
    pub streams: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        SamplerConfig {
            seed,
            samples,
            streams: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::input("sample count must be at least 1"));
        }
        if self.streams == 0 {
            return Err(Error::input("stream count must be at least 1"));
        }
        Ok(())
    }

    fn with_seed(&self, seed: u64) -> Self {
        SamplerConfig { seed, ..*self }
    }

    fn share(&self, i: usize) -> u64 {
        let s = self.streams as u64;
        self.samples / s + u64::from((i as u64) < self.samples % s)
    }

    fn rng(&self, i: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        rng
    }

    /// Runs `body` once per substream in parallel and returns the partial results in stream order.
    fn run<T: Send>(&self, body: impl Fn(&mut ChaCha8Rng, u64) -> T + Sync) -> Vec<T> {
        (0..self.streams)
            .into_par_iter()
            .map(|i| body(&mut self.rng(i), self.share(i)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Atom(f64),
    Uniform(f64, f64),
}

/// Floating-point copy of a product measure, ready for inverse-CDF draws.
#[derive(Clone, Debug)]
pub struct FloatMeasure {
    edges: Vec<Vec<(f64, Piece)>>,
}

impl FloatMeasure {
    pub fn new(spec: &ProductMeasureSpec) -> Self {
        FloatMeasure {
            edges: spec.edges.iter().map(Self::edge).collect(),
        }
    }

    fn edge(e: &EdgeMeasure) -> Vec<(f64, Piece)> {
        let mut acc = 0.0;
        let mut out = Vec::new();
        let atoms = e
            .atoms
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(x, w)| (w, Piece::Atom(to_f64(x))));
        let unif = e
            .uniform
            .iter()
            .filter(|(_, _, w)| !w.is_zero())
            .map(|(a, b, w)| (w, Piece::Uniform(to_f64(a), to_f64(b) - to_f64(a))));
        for (w, p) in atoms.chain(unif) {
            acc += to_f64(w);
            out.push((acc, p));
        }
        if let Some(last) = out.last_mut() {
            last.0 = f64::INFINITY;
        }
        out
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn draw(&self, rng: &mut impl Rng, out: &mut [f64]) {
        for (x, pieces) in out.iter_mut().zip(&self.edges) {
            let u: f64 = rng.gen();
            let piece = pieces
                .iter()
                .find(|(c, _)| u < *c)
                .map_or(pieces[0].1, |p| p.1);
            *x = match piece {
                Piece::Atom(a) => a,
                Piece::Uniform(a, w) => a + w * rng.gen::<f64>(),
            };
        }
    }
}

/// Sorts edge indices by weight, ties broken by index.
fn weight_order(w: &[f64], order: &mut [usize]) {
    for (i, o) in order.iter_mut().enumerate() {
        *o = i;
    }
    order.sort_unstable_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    if order.windows(2).any(|p| w[p[0]] == w[p[1]]) && !TIE_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!("tied edge weights in a floating-point draw; ties broken by edge index");
    }
}

fn kruskal_mask(g: &Graph, order: &[usize], uf: &mut UnionFind) -> Mask {
    *uf = UnionFind::new(g.n);
    let mut mask: Mask = 0;
    let mut left = g.n.saturating_sub(1);
    for &e in order {
        if left == 0 {
            break;
        }
        let (u, v) = g.edges[e];
        if uf.union(u, v) {
            mask |= 1 << e;
            left -= 1;
        }
    }
    mask
}

/// Tallies of sampled trees.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EmpiricalTreeDistribution {
    pub counts: BTreeMap<EdgeSet, u64>,
    pub n: u64,
}

impl EmpiricalTreeDistribution {
    pub fn count(&self, t: &[usize]) -> u64 {
        self.counts.get(t).copied().unwrap_or(0)
    }

    pub fn freq(&self, t: &[usize]) -> f64 {
        self.count(t) as f64 / self.n as f64
    }

    /// Binomial standard error of the frequency of `t`.
    pub fn stderr(&self, t: &[usize]) -> f64 {
        let p = self.freq(t);
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    pub fn frequencies(&self) -> BTreeMap<EdgeSet, f64> {
        self.counts
            .keys()
            .map(|t| (t.clone(), self.freq(t)))
            .collect()
    }

    /// Empirical probability that edge `e` lies in the tree.
    pub fn edge_freq(&self, e: usize) -> f64 {
        let c: u64 = self
            .counts
            .iter()
            .filter(|(t, _)| t.contains(&e))
            .map(|(_, c)| c)
            .sum();
        c as f64 / self.n as f64
    }

    pub fn tv(&self, exact: &TreeDistribution) -> f64 {
        let mut keys: Vec<&EdgeSet> = self.counts.keys().chain(exact.probs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.iter()
            .map(|t| (self.freq(t) - to_f64(&exact.get(t))).abs())
            .sum::<f64>()
            / 2.0
    }

    /// Largest deviation from `exact`, in standard errors computed from the exact cell probability.
    /// A sampled tree of exact probability zero gives infinity.
    pub fn max_z(&self, exact: &TreeDistribution) -> f64 {
        let mut worst: f64 = 0.0;
        for (t, p) in &exact.probs {
            let p = to_f64(p);
            let sd = (p * (1.0 - p) / self.n as f64).sqrt();
            let d = (self.freq(t) - p).abs();
            worst = worst.max(if sd > 0.0 {
                d / sd
            } else if d > 0.0 {
                f64::INFINITY
            } else {
                0.0
            });
        }
        if self.counts.keys().any(|t| !exact.probs.contains_key(t)) {
            worst = f64::INFINITY;
        }
        worst
    }
}

/// Draws `cfg.samples` independent weight vectors and tallies the greedy tree of each.
pub fn sample_mst_empirical(
    g: &Graph,
    spec: &ProductMeasureSpec,
    cfg: &SamplerConfig,
) -> Result<EmpiricalTreeDistribution> {
    cfg.validate()?;
    g.require_connected()?;
    g.require_mask_size()?;
    if spec.m() != g.m() {
        return Err(Error::input(format!(
            "measure has {} edges, graph has {}",
            spec.m(),
            g.m()
        )));
    }
    let fm = FloatMeasure::new(spec);
    let parts = cfg.run(|rng, n| {
        let mut tally: HashMap<Mask, u64> = HashMap::new();
        let mut w = vec![0.0; g.m()];
        let mut order = vec![0; g.m()];
        let mut uf = UnionFind::new(g.n);
        for _ in 0..n {
            fm.draw(rng, &mut w);
            weight_order(&w, &mut order);
            *tally.entry(kruskal_mask(g, &order, &mut uf)).or_insert(0) += 1;
        }
        tally
    });
    let mut counts = BTreeMap::new();
    for part in parts {
        for (mask, c) in part {
            *counts.entry(edges_of(mask)).or_insert(0) += c;
        }
    }
    Ok(EmpiricalTreeDistribution {
        counts,
        n: cfg.samples,
    })
}

/// Tallies of sampled orderings, each ordering listing indices from smallest weight up.
pub fn sample_orders(
    spec: &ProductMeasureSpec,
    cfg: &SamplerConfig,
) -> Result<BTreeMap<Vec<usize>, u64>> {
    cfg.validate()?;
    let fm = FloatMeasure::new(spec);
    let parts = cfg.run(|rng, n| {
        let mut tally: HashMap<Vec<usize>, u64> = HashMap::new();
        let mut w = vec![0.0; fm.m()];
        let mut order = vec![0; fm.m()];
        for _ in 0..n {
            fm.draw(rng, &mut w);
            weight_order(&w, &mut order);
            *tally.entry(order.clone()).or_insert(0) += 1;
        }
        tally
    });
    let mut out = BTreeMap::new();
    for part in parts {
        for (k, c) in part {
            *out.entry(k).or_insert(0) += c;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlideRow {
    pub edge: usize,
    pub estimates: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Per grid step: the two intervals overlap somewhere on the step.
    pub overlap: Vec<bool>,
    /// Per grid step: the estimate went up.
    pub increased: Vec<bool>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlideReport {
    pub slid_edge: usize,
    pub grid: Vec<f64>,
    pub rows: Vec<SlideRow>,
    pub pass: bool,
}

/// Estimates `P(e_j ∈ T)` for every `j ≠ k` while edge `k` slides to `s_k + t`, `t` over the grid.
/// A row fails when some later estimate drops more than three standard errors below an earlier one.
pub fn slide_monotonicity_test(
    g: &Graph,
    s: &[Rational],
    k: usize,
    t_grid: &[Rational],
    cfg: &SamplerConfig,
) -> Result<SlideReport> {
    if t_grid.len() < 3 {
        return Err(Error::input("slide grid needs at least 3 points"));
    }
    if s.len() != g.m() {
        return Err(Error::input(format!(
            "shift vector has {} entries, graph has {} edges",
            s.len(),
            g.m()
        )));
    }
    if k >= g.m() {
        return Err(Error::input(format!("edge {k} out of range")));
    }
    let dists = t_grid
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut s2 = s.to_vec();
            s2[k] = &s2[k] + t;
            let sub = cfg.with_seed(
                cfg.seed
                    .wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            sample_mst_empirical(g, &ProductMeasureSpec::from_shifts(&s2), &sub)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = cfg.samples as f64;
    let rows: Vec<SlideRow> = (0..g.m())
        .filter(|&j| j != k)
        .map(|j| {
            let estimates: Vec<f64> = dists.iter().map(|d| d.edge_freq(j)).collect();
            let stderrs: Vec<f64> = estimates
                .iter()
                .map(|p| (p * (1.0 - p) / n).sqrt())
                .collect();
            let gap = |t: &Rational| s[k].clone() + t - &s[j];
            let overlap = t_grid
                .windows(2)
                .map(|w| {
                    let (lo, hi) = (to_f64(&gap(&w[0])), to_f64(&gap(&w[1])));
                    lo.min(hi) < 1.0 && lo.max(hi) > -1.0
                })
                .collect();
            let increased = estimates.windows(2).map(|w| w[1] > w[0]).collect();
            let monotone = (0..estimates.len()).all(|a| {
                (a + 1..estimates.len()).all(|b| {
                    let sd = (stderrs[a].powi(2) + stderrs[b].powi(2)).sqrt();
                    estimates[b] >= estimates[a] - 3.0 * sd
                })
            });
            SlideRow {
                edge: j,
                estimates,
                stderrs,
                overlap,
                increased,
                monotone,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.monotone);
    Ok(SlideReport {
        slid_edge: k,
        grid: t_grid.iter().map(to_f64).collect(),
        rows,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FkgReport {
    pub p_ab: f64,
    pub p_ab_given_ac: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Compares `P(a<b | a<c)` with `P(a<b)` for a three-variable product measure,
/// passing unless the conditional falls more than four standard errors below.
pub fn fkg_check(spec: &ProductMeasureSpec, cfg: &SamplerConfig) -> Result<FkgReport> {
    if spec.m() != 3 {
        return Err(Error::input("FKG check needs exactly three variables"));
    }
    let tally = sample_orders(spec, cfg)?;
    let pos = |o: &[usize], v: usize| o.iter().position(|&x| x == v).unwrap_or(0);
    let (mut ab, mut ac, mut both) = (0u64, 0u64, 0u64);
    for (o, c) in &tally {
        let (x, y, z) = (pos(o, 0), pos(o, 1), pos(o, 2));
        ab += c * u64::from(x < y);
        ac += c * u64::from(x < z);
        both += c * u64::from(x < y && x < z);
    }
    let n = cfg.samples as f64;
    let p_ab = ab as f64 / n;
    let (p_cond, n_c) = if ac == 0 {
        (p_ab, 1.0)
    } else {
        (both as f64 / ac as f64, ac as f64)
    };
    let sigma = (p_ab * (1.0 - p_ab) / n + p_cond * (1.0 - p_cond) / n_c).sqrt();
    Ok(FkgReport {
        p_ab,
        p_ab_given_ac: p_cond,
        sigma,
        pass: p_cond >= p_ab - 4.0 * sigma,
    })
}
