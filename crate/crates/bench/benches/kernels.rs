use criterion::{black_box, criterion_group, criterion_main, Criterion};

use trifree::{
    count_snc, enumerate_psnc, models, product_cumulant, EnumMode, GammaShape, Grouping,
    SizesVector,
};

fn bench_snc(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_snc");
    for shape in ["8", "3,3", "2,2,2", "4,4"] {
        let parsed: GammaShape = shape.parse().unwrap();
        group.bench_function(shape, |b| {
            b.iter(|| black_box(count_snc(&parsed, 12).unwrap()));
        });
    }
    group.finish();
}

fn bench_psnc(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_psnc");
    for shape in ["2,2,2", "3,2,1"] {
        let parsed: GammaShape = shape.parse().unwrap();
        group.bench_function(shape, |b| {
            b.iter(|| {
                black_box(
                    enumerate_psnc(&parsed, EnumMode::Structural, 7, 12).unwrap().len(),
                )
            });
        });
    }
    group.finish();
}

fn bench_product_cumulant(c: &mut Criterion) {
    let mut group = c.benchmark_group("product_cumulant");
    let semi = models::semicircular();
    let s = semi.resolve("s", false).unwrap();
    let grouping = Grouping::new(1, 1, 1).unwrap();
    let sizes = SizesVector::new(&[2, 2, 2]).unwrap();
    let letters = vec![s; 6];
    group.bench_function("s2_222_paired", |b| {
        b.iter(|| {
            black_box(product_cumulant(&semi, &letters, &sizes, &grouping, 24).unwrap())
        });
    });
    let generic = models::seeded_generic("a", "a", true, 6, 1).unwrap();
    let a = generic.resolve("a", false).unwrap();
    let gsizes = SizesVector::new(&[2, 2, 1]).unwrap();
    let gletters = vec![a; 5];
    group.bench_function("generic_221", |b| {
        b.iter(|| {
            black_box(product_cumulant(&generic, &gletters, &gsizes, &grouping, 12).unwrap())
        });
    });
    group.finish();
}

fn bench_halfmap(c: &mut Criterion) {
    let shape: GammaShape = "4,2,2".parse().unwrap();
    c.bench_function("halfmap_separated_422", |b| {
        b.iter(|| black_box(trifree::halfmap::separated_parity_reversing(&shape).unwrap().len()));
    });
}

criterion_group!(benches, bench_snc, bench_psnc, bench_product_cumulant, bench_halfmap);
criterion_main!(benches);
