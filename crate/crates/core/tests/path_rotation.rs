//! Algorithm 1 state machine against brute force over the representatives of each folded
//! permutation.

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treelaw::graph::kruskal_select;
use treelaw::rational::{rat, Rational};
use treelaw::rotations::{
    all_instances, ClassKind, Entry, FoldedState, Folding, PathRotationInstance,
};

/// Fraction of the representatives of `rho` whose Kruskal tree is `target`.
fn oracle(f: &Folding, rho: &[usize], target: &[usize]) -> Rational {
    let pairs: Vec<usize> = (0..f.classes.len())
        .filter(|&c| f.classes[c].reps.len() == 2)
        .collect();
    let mut hits = 0i64;
    let total = 1i64 << pairs.len();
    for code in 0..total {
        let mut used = vec![0usize; f.classes.len()];
        let sigma: Vec<usize> = rho
            .iter()
            .map(|&c| {
                let reps = &f.classes[c].reps;
                let k = used[c];
                used[c] += 1;
                if reps.len() == 1 {
                    reps[0]
                } else {
                    let bit = pairs.iter().position(|&p| p == c).unwrap();
                    reps[k ^ ((code >> bit) & 1) as usize]
                }
            })
            .collect();
        if kruskal_select(&f.graph, &sigma).unwrap() == target {
            hits += 1;
        }
    }
    rat(hits, total)
}

fn random_rho(f: &Folding, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if seed % 4 == 0 {
        let mut sigma: Vec<usize> = (0..f.graph.m()).collect();
        sigma.shuffle(&mut rng);
        return f.fold(&sigma);
    }
    // Tree classes in random order, then each non-tree occurrence usually placed after the
    // first sighting of every class on its broken cycle.
    let mut rho = Vec::new();
    let mut later = Vec::new();
    for (c, class) in f.classes.iter().enumerate() {
        for _ in 0..class.reps.len() {
            match &class.kind {
                ClassKind::NonTree { .. } => later.push(c),
                _ => rho.push(c),
            }
        }
    }
    rho.shuffle(&mut rng);
    later.shuffle(&mut rng);
    for c in later {
        let ClassKind::NonTree { path_classes, .. } = &f.classes[c].kind else {
            unreachable!()
        };
        let earliest = if rng.gen_bool(0.9) {
            path_classes
                .iter()
                .map(|pc| rho.iter().position(|x| x == pc).unwrap() + 1)
                .max()
                .unwrap_or(0)
        } else {
            0
        };
        let at = rng.gen_range(earliest..=rho.len());
        rho.insert(at, c);
    }
    rho
}

fn instances() -> Vec<PathRotationInstance> {
    let mut out: Vec<PathRotationInstance> = all_instances(7).unwrap();
    out.extend(all_instances(8).unwrap().into_iter().filter(|i| i.l() >= 5));
    assert!(out.iter().any(|i| i.l() == 6));
    out
}

fn run(f: &Folding, rho: &[usize]) -> Vec<FoldedState> {
    let mut st = FoldedState::new(f);
    let mut trace = vec![st.clone()];
    for &c in rho {
        st.step(f, c);
        trace.push(st.clone());
    }
    trace
}

#[test]
fn every_instance_matches_oracle_on_many_permutations() {
    for inst in instances() {
        let f = Folding::new(&inst).unwrap();
        let t = inst.tree().unwrap();
        let tp = inst.tree_prime().unwrap();
        let mut alive = 0;
        for seed in 0..200 {
            let rho = random_rho(&f, seed);
            let rho_prime: Vec<usize> = rho.iter().map(|&c| f.beta[c]).collect();
            let end = run(&f, &rho).pop().unwrap();
            assert_eq!(end.q(), oracle(&f, &rho, &t), "q for {inst:?}, seed {seed}");
            assert_eq!(
                end.q_prime(),
                oracle(&f, &rho_prime, &tp),
                "q' for {inst:?}, seed {seed}"
            );
            alive += end.q.is_some() as usize;
        }
        assert!(
            alive >= 3,
            "only {alive} surviving permutations for {inst:?}"
        );
    }
}

#[test]
fn chord_and_entanglement_cases_are_exercised() {
    let mut entangled = 0;
    let mut strict = 0;
    for inst in instances().into_iter().filter(|i| i.l() >= 5) {
        let f = Folding::new(&inst).unwrap();
        for seed in 0..60 {
            let trace = run(&f, &random_rho(&f, seed));
            if trace.iter().any(|s| {
                s.s.iter()
                    .any(|e| matches!(e, Entry::Set(m) if m.count_ones() > 1))
            }) {
                entangled += 1;
            }
            let end = trace.last().unwrap();
            if end.q.is_some() && end.q_prime.is_none() {
                strict += 1;
            }
        }
    }
    assert!(entangled > 0, "no entangled state reached");
    assert!(strict > 0, "no strict case reached");
}

#[test]
fn worked_example_transitions() {
    let t = common::Table3::new();
    let rows = t.rows();
    assert_eq!(rows.len(), 10);
    for (name, ok) in rows {
        assert!(ok, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn probabilities_only_fall_and_in_step(pick in 0usize..1000, seed in any::<u64>()) {
        let all = instances();
        let inst = &all[pick % all.len()];
        let f = Folding::new(inst).unwrap();
        let trace = run(&f, &random_rho(&f, seed));
        for w in trace.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            prop_assert!(b.q() <= a.q());
            prop_assert!(b.q_prime() <= a.q_prime());
            if let (Some(qa), Some(qb), Some(pa), Some(pb)) = (a.q, b.q, a.q_prime, b.q_prime) {
                prop_assert_eq!(qb - qa, pb - pa);
            }
            prop_assert!(b.q() >= b.q_prime() || a.q() < a.q_prime());
        }
        let end = trace.last().unwrap();
        prop_assert!(end.q() >= end.q_prime());
    }
}
