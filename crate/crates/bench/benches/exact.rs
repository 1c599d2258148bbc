use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use treelaw::mst_exact::{mst_distribution, mst_prob, Method};
use treelaw::rotations::{path_rotation_probs, PathRotationInstance};
use treelaw::shift_exact::{tree_distribution_exact, ProductMeasureSpec};
use treelaw::word_maps::{universal_word, word_distribution, WordMap};
use treelaw::{Graph, Limits};

fn mst(c: &mut Criterion) {
    let lim = Limits::default();
    let g = Graph::complete(5);
    let t = vec![0, 1, 2, 3];
    let mut group = c.benchmark_group("mst_prob_k5_star");
    for (name, m) in [
        ("internal", Method::Internal),
        ("external", Method::External),
        ("kruskal", Method::Kruskal),
        ("rd", Method::ReverseDelete),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| mst_prob(black_box(&g), &t, m, &lim).unwrap())
        });
    }
    group.finish();

    c.bench_function("mst_distribution_house", |b| {
        b.iter(|| mst_distribution(black_box(&Graph::house())).unwrap())
    });
}

fn shifted(c: &mut Criterion) {
    let lim = Limits::default();
    let mut group = c.benchmark_group("shift_dist_cycle");
    for n in [4usize, 6, 8] {
        let g = Graph::cycle(n);
        let shifts: Vec<_> = (0..n)
            .map(|i| treelaw::rational::rat(i as i64, 2 * n as i64))
            .collect();
        let spec = ProductMeasureSpec::from_shifts(&shifts);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| tree_distribution_exact(&g, &spec, &lim).unwrap())
        });
    }
    group.finish();
}

fn rotation(c: &mut Criterion) {
    let lim = Limits::default();
    let inst = PathRotationInstance::new(5, vec![(3, 0)], vec![0, 1, 2], vec![(4, 0)]).unwrap();
    c.bench_function("path_rotation_k5", |b| {
        b.iter(|| path_rotation_probs(black_box(&inst), &lim).unwrap())
    });
}

fn words(c: &mut Criterion) {
    let mut group = c.benchmark_group("universal_word_law");
    for m in [3usize, 4, 5] {
        let wm = WordMap::unit(universal_word(m).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &wm, |b, wm| {
            b.iter(|| word_distribution(wm).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, mst, shifted, rotation, words);
criterion_main!(benches);
