#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use treelaw::rational::{int, rat, Rational};
use treelaw::rotations::{Entry, FoldedState, Folding, PathRotationInstance};
use treelaw::shift_exact::{EdgeMeasure, ProductMeasureSpec};
use treelaw::Graph;

/// Kruskal over every edge order, with a hand-rolled union-find.
pub fn brute_tree_law(n: usize, edges: &[(usize, usize)]) -> BTreeMap<Vec<usize>, Rational> {
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let m = edges.len();
    let mut order: Vec<usize> = (0..m).collect();
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut total = 0u64;
    loop {
        let mut p: Vec<usize> = (0..n).collect();
        let mut tree = Vec::with_capacity(n - 1);
        for &e in &order {
            let (a, b) = (find(&mut p, edges[e].0), find(&mut p, edges[e].1));
            if a != b {
                p[a] = b;
                tree.push(e);
            }
        }
        tree.sort_unstable();
        *counts.entry(tree).or_default() += 1;
        total += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    counts
        .into_iter()
        .map(|(t, c)| (t, Rational::new(BigInt::from(c), BigInt::from(total))))
        .collect()
}

pub fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Law of the relative order of the symbols when each symbol independently picks one of its
/// positions with probability proportional to the weight there.
pub fn word_law(word: &[usize], weights: &[Rational]) -> BTreeMap<Vec<usize>, Rational> {
    let m = word.iter().max().map_or(0, |&x| x + 1);
    let occ: Vec<Vec<(usize, Rational)>> = (0..m)
        .map(|c| {
            let pos: Vec<(usize, Rational)> = word
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == c)
                .map(|(i, _)| (i, weights[i].clone()))
                .collect();
            let tot: Rational = pos.iter().map(|(_, w)| w.clone()).sum();
            pos.into_iter().map(|(i, w)| (i, w / &tot)).collect()
        })
        .collect();
    let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    let mut idx = vec![0usize; m];
    'outer: loop {
        let mut p = Rational::one();
        let mut at: Vec<(usize, usize)> = Vec::with_capacity(m);
        for c in 0..m {
            let (i, w) = &occ[c][idx[c]];
            p *= w;
            at.push((*i, c));
        }
        at.sort_unstable();
        *out.entry(at.into_iter().map(|(_, c)| c).collect())
            .or_insert_with(|| int(0)) += p;
        for c in 0..m {
            idx[c] += 1;
            if idx[c] < occ[c].len() {
                continue 'outer;
            }
            idx[c] = 0;
        }
        break;
    }
    out
}

pub fn random_connected_graph(rng: &mut impl Rng, n: usize, max_edges: usize) -> Graph {
    loop {
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        all.shuffle(rng);
        let m = rng.gen_range(n - 1..=max_edges.min(all.len()));
        all.truncate(m);
        all.sort_unstable();
        let g = Graph::new(n, all).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// Atoms, intervals or a half/half mixture, with atom locations offset per variable so that no
/// two variables share an atom.
pub fn random_spec(rng: &mut impl Rng, m: usize) -> ProductMeasureSpec {
    let edges = (0..m)
        .map(|i| {
            let off = rat(i as i64 + 1, 1000);
            let a = rat(rng.gen_range(0..16), 8);
            let b = &a + rat(rng.gen_range(1..=8), 8);
            let x = rng.gen_range(0..10i64);
            let y = x + rng.gen_range(1..10i64);
            let atom = |k: i64| rat(k, 5) + &off;
            match rng.gen_range(0..3) {
                0 => EdgeMeasure::interval(a, b),
                1 => {
                    let w = rat(rng.gen_range(1..8), 8);
                    EdgeMeasure::atoms(vec![(atom(x), w.clone()), (atom(y), int(1) - w)])
                }
                _ => EdgeMeasure {
                    atoms: vec![(atom(x), rat(1, 2))],
                    uniform: vec![(a, b, rat(1, 2))],
                },
            }
        })
        .collect();
    ProductMeasureSpec::new(edges).unwrap()
}

/// The mid-run state of the 14-edge path example, with `L = {x-v1}` and `R = {y-v1}`.
pub struct Table3 {
    pub folding: Folding,
    pub start: FoldedState,
}

impl Table3 {
    pub fn new() -> Self {
        let inst =
            PathRotationInstance::new(16, vec![(14, 0)], (0..14).collect(), vec![(15, 0)]).unwrap();
        let folding = Folding::new(&inst).unwrap();
        let mut start = FoldedState::new(&folding);
        start.s = vec![
            Entry::Neither,
            Entry::Right,
            Entry::Set(1 << 2),
            Entry::Neither,
            Entry::Set(1 << 4 | 1 << 5),
            Entry::Set(1 << 4 | 1 << 5),
            Entry::Set(1 << 6),
            Entry::Both,
        ];
        start.q = Some(2);
        start.q_prime = Some(2);
        let mut t = Table3 { folding, start };
        for (a, b) in [
            (0, 1),
            (1, 2),
            (3, 4),
            (4, 5),
            (5, 6),
            (6, 7),
            (14, 0),
            (15, 0),
        ] {
            let c = t.class(a, b);
            t.start.seen[c] = 1;
        }
        t
    }

    pub fn class(&self, a: usize, b: usize) -> usize {
        self.folding.class_of[self.folding.graph.edge_index(a, b).unwrap()]
    }

    pub fn after(&self, edges: &[(usize, usize)]) -> FoldedState {
        let mut st = self.start.clone();
        for &(a, b) in edges {
            st.step(&self.folding, self.class(a, b));
        }
        st
    }

    /// One `(row, matches)` pair per row of the example table.
    pub fn rows(&self) -> Vec<(&'static str, bool)> {
        let set = |bits: &[usize]| Entry::Set(bits.iter().fold(0u64, |m, &b| m | 1 << b));
        let base = self.start.s.clone();
        let with = |base: &Vec<Entry>, changes: &[(usize, Entry)]| {
            let mut s = base.clone();
            for &(i, e) in changes {
                s[i] = e;
            }
            s
        };
        let q = |st: &FoldedState| (st.q(), st.q_prime());
        let quarter = (rat(1, 4), rat(1, 4));
        let zero = (int(0), int(0));
        let mut out = Vec::new();

        let st = self.after(&[(2, 3)]);
        out.push((
            "first sighting of a pair",
            st.s == with(&base, &[(3, set(&[3]))]) && q(&st) == quarter,
        ));
        let st = self.after(&[(3, 4)]);
        out.push((
            "second sighting of a pair",
            st.s == with(&base, &[(4, Entry::Both), (5, set(&[5]))]) && q(&st) == quarter,
        ));
        let st = self.after(&[(14, 3)]);
        out.push(("definite fail", q(&st) == zero));
        let st = self.after(&[(14, 15)]);
        out.push((
            "cross over the whole path",
            st.s == base && q(&st) == (rat(1, 4), int(0)),
        ));
        let st = self.after(&[(15, 2)]);
        out.push((
            "side edge to the path",
            st.s == with(&base, &[(2, Entry::Right)]) && q(&st) == (rat(1, 8), rat(1, 8)),
        ));
        let st = self.after(&[(14, 1)]);
        out.push((
            "side inductive collapse",
            st.s == base && q(&st) == (rat(1, 4), int(0)),
        ));
        let st = self.after(&[(5, 9)]);
        out.push(("chord over an undecided middle", q(&st) == zero));
        let st = self.after(&[(3, 6)]);
        let ent = set(&[4, 5, 6]);
        out.push((
            "entanglement",
            st.s == with(&base, &[(4, ent), (5, ent), (6, ent)])
                && q(&st) == (rat(1, 16), rat(1, 16)),
        ));
        let st = self.after(&[(0, 2)]);
        out.push((
            "chord inductive collapse",
            st.s == with(&base, &[(2, Entry::Right)]) && q(&st) == (rat(1, 16), rat(1, 16)),
        ));
        let st = self.after(&[(2, 3), (15, 11)]);
        out.push(("first sighting then a long side edge", q(&st) == zero));
        out
    }
}
