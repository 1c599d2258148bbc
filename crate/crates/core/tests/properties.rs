mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use treelaw::locus::{
    cycle_vector, lie_shuffle_vector, trybula_contains, CyclePermutation, OrderingVector,
};
use treelaw::rational::{rat, Rational};
use treelaw::sampler::{sample_mst_empirical, sample_orders, SamplerConfig};
use treelaw::shift_exact::ProductMeasureSpec;
use treelaw::word_maps::{embed_in_universal, shorten_word_map, word_distribution, WordMap};
use treelaw::Graph;

fn word_map(m: usize) -> impl Strategy<Value = WordMap> {
    (
        Just(m),
        prop::collection::vec((0..m, 1i64..8, 1i64..5), 0..2 * m + 2),
        Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
    )
        .prop_map(|(m, extra, base)| {
            let mut word: Vec<usize> = base;
            let mut weights: Vec<Rational> = vec![Rational::one(); m];
            for (i, (c, a, b)) in extra.into_iter().enumerate() {
                let at = (i * 7 + c) % (word.len() + 1);
                word.insert(at, c);
                weights.insert(at, rat(a, b));
            }
            WordMap::new(word, weights).unwrap()
        })
}

fn any_word_map(min_m: usize, max_m: usize) -> impl Strategy<Value = WordMap> {
    (min_m..=max_m).prop_flat_map(word_map)
}

/// `P(X < Y)` for independent finitely supported variables without common atoms.
fn less(x: &[(i64, Rational)], y: &[(i64, Rational)]) -> Rational {
    let mut p = Rational::zero();
    for (a, pa) in x {
        for (b, pb) in y {
            if a < b {
                p += pa * pb;
            }
        }
    }
    p
}

fn die(values: Vec<i64>, masses: Vec<i64>) -> Vec<(i64, Rational)> {
    let total: i64 = masses.iter().sum();
    values
        .into_iter()
        .zip(masses)
        .map(|(v, w)| (v, rat(w, total)))
        .collect()
}

fn dice() -> impl Strategy<Value = [Vec<(i64, Rational)>; 3]> {
    (
        Just((0..60).collect::<Vec<i64>>()).prop_shuffle(),
        prop::collection::vec(1i64..6, 9),
    )
        .prop_map(|(vals, masses)| {
            let die_of = |k: usize| {
                let v: Vec<i64> = vals[..9].iter().skip(k).step_by(3).copied().collect();
                let w: Vec<i64> = masses.iter().skip(k).step_by(3).copied().collect();
                die(v, w)
            };
            [die_of(0), die_of(1), die_of(2)]
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn word_law_matches_enumeration(wm in any_word_map(1, 4)) {
        let d = word_distribution(&wm).unwrap();
        let total: Rational = d.values().sum();
        prop_assert!(total.is_one());
        let oracle = common::word_law(&wm.word, &wm.weights);
        for (k, v) in &d {
            prop_assert_eq!(v, &oracle.get(k).cloned().unwrap_or_default());
        }
    }

    #[test]
    fn shortening_keeps_the_law(wm in any_word_map(1, 4)) {
        let short = shorten_word_map(&wm).unwrap();
        prop_assert!(short.len() <= wm.len());
        prop_assert_eq!(word_distribution(&short).unwrap(), word_distribution(&wm).unwrap());
    }

    #[test]
    fn universal_word_reaches_every_law(wm in any_word_map(2, 3)) {
        let u = embed_in_universal(&wm).unwrap();
        prop_assert_eq!(word_distribution(&u).unwrap(), word_distribution(&wm).unwrap());
    }

    #[test]
    fn independent_dice_lie_in_the_region(d in dice()) {
        let x = less(&d[0], &d[1]);
        let y = less(&d[1], &d[2]);
        let z = less(&d[2], &d[0]);
        prop_assert!(trybula_contains(&x, &y, &z).unwrap());
        prop_assert!(trybula_contains(&y, &z, &x).unwrap());
        let one = Rational::one();
        prop_assert!(trybula_contains(&(&one - &x), &(&one - &y), &(&one - &z)).unwrap());
    }

    #[test]
    fn lie_vectors_are_balanced(p in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
        let pi = CyclePermutation::from_images(&p).unwrap();
        prop_assume!(!pi.nontrivial().is_empty());
        let v = lie_shuffle_vector(&pi).unwrap();
        let sum: Rational = v.terms.values().sum();
        prop_assert!(sum.is_zero());
        prop_assert_eq!(v.positive_terms() > 0, v.negative_terms() > 0);
        for c in pi.nontrivial() {
            let cv = cycle_vector(c);
            prop_assert_eq!(cv.positive_terms(), cv.negative_terms());
            prop_assert_eq!(cv.terms.len(), 1 << (c.len() - 1));
        }
    }
}

#[test]
fn shuffle_counts_interleavings() {
    let u = OrderingVector::basis(vec![0, 1]);
    let v = OrderingVector::basis(vec![2, 3, 4]);
    let s = u.shuffle(&v).unwrap();
    assert_eq!(s.terms.len(), 10);
    assert!(s.terms.values().all(One::is_one));
    assert!(u.shuffle(&u).is_err());
}

#[test]
fn points_outside_the_region() {
    let (h, t) = (rat(1, 2), rat(3, 4));
    assert!(trybula_contains(&h, &h, &h).unwrap());
    assert!(!trybula_contains(&t, &t, &t).unwrap());
    assert!(trybula_contains(&rat(5, 4), &h, &h).is_err());
}

#[test]
fn sampling_does_not_depend_on_thread_count() {
    let g = Graph::complete(4);
    let spec = ProductMeasureSpec::iid_uniform(6);
    let cfg = SamplerConfig::new(42, 20_000);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            (
                sample_mst_empirical(&g, &spec, &cfg).unwrap().counts,
                sample_orders(&spec, &cfg).unwrap(),
            )
        })
    };
    let (a, oa) = run(1);
    let (b, ob) = run(3);
    assert_eq!(a, b);
    assert_eq!(oa, ob);
    assert_eq!(oa.values().sum::<u64>(), 20_000);
    let other = sample_mst_empirical(&g, &spec, &SamplerConfig::new(43, 20_000))
        .unwrap()
        .counts;
    assert_ne!(a, other);
}
