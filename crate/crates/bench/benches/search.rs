use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sftlab_bench::diagonal_hard_squares;
use sftlab_core::attractor::{image_cover, unit_square_spiral, Affine, IntervalOracle};
use sftlab_core::blockcode::{search_factor, SearchBounds};
use sftlab_core::dyadic::{Dyadic, DyadicCell};
use sftlab_core::multidim::{semidecide_empty, Fuel};
use sftlab_core::onedim::emptiness_report;
use sftlab_core::patterns::count_admissible;
use sftlab_core::{Budget, SftSpec};

fn counting(c: &mut Criterion) {
    let spec = diagonal_hard_squares();
    c.bench_function("count_admissible 2d n=5", |b| {
        b.iter(|| count_admissible(black_box(&spec), 5, &mut Budget::unlimited()).unwrap())
    });
}

fn emptiness(c: &mut Criterion) {
    let gm1 = SftSpec::golden_mean(1);
    c.bench_function("emptiness_report golden mean", |b| b.iter(|| emptiness_report(black_box(&gm1))));
    let spec = diagonal_hard_squares();
    c.bench_function("semidecide_empty 2d radius 3", |b| {
        b.iter(|| semidecide_empty(black_box(&spec), Fuel { max_radius: 3, nodes: 10_000_000 }))
    });
}

fn factor_search(c: &mut Criterion) {
    let src = SftSpec::golden_mean(1);
    let dst = SftSpec::golden_mean(1);
    let bounds = SearchBounds { max_k: 1, max_r: 6, max_rules: 64, nodes: 10_000_000 };
    c.bench_function("search_factor golden mean onto itself", |b| {
        b.iter(|| search_factor(black_box(&src), black_box(&dst), bounds).unwrap())
    });
}

fn images(c: &mut Criterion) {
    let half = IntervalOracle::new(Affine::scalar(1, Dyadic::new(1, 1), 2));
    let unit = DyadicCell::new(0, vec![0]);
    c.bench_function("image_cover halving m=64", |b| {
        b.iter(|| image_cover(&half, black_box(&unit), 64, &mut Budget::unlimited()).unwrap())
    });
    let spiral = IntervalOracle::new(unit_square_spiral());
    let cell = DyadicCell::new(2, vec![3, 1]);
    c.bench_function("image_cover spiral m=16", |b| {
        b.iter(|| image_cover(&spiral, black_box(&cell), 16, &mut Budget::unlimited()).unwrap())
    });
}

criterion_group!(benches, counting, emptiness, factor_search, images);
criterion_main!(benches);
