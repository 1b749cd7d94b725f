use criterion::{black_box, criterion_group, criterion_main, Criterion};

use chromatic_lattice::exactlin::{hnf_modified, IntMatrix, Rat};
use chromatic_lattice::forbidden::{cone_cell_with_radius, forbidden_set};
use chromatic_lattice::lattice::catalog;
use chromatic_lattice::subverify::{Verifier, VerifyMethod};
use chromatic_lattice::symmetry::ReflectionGroup;

fn bench_enumeration(c: &mut Criterion) {
    let d4 = catalog("Dn", Some(4)).unwrap();
    let r16 = Rat::from_int(16);
    c.bench_function("enumerate_d4_ball16", |b| {
        b.iter(|| black_box(d4.enumerate_in_ball(black_box(&r16))).len())
    });
    let a5 = catalog("An_star_dilated", Some(5)).unwrap();
    let r = Rat::from_int(280);
    c.bench_function("enumerate_a5star_candidates", |b| {
        b.iter(|| black_box(a5.enumerate_in_ball(black_box(&r))).len())
    });
}

fn bench_cell_distance(c: &mut Criterion) {
    let d4 = catalog("Dn", Some(4)).unwrap();
    let group = ReflectionGroup::from_lattice(&d4).unwrap();
    let (cell, _) = cone_cell_with_radius(&d4, &group).unwrap();
    let y = vec![Rat::new(3, 2), Rat::new(1, 2), Rat::new(5, 2), Rat::new(1, 3)];
    c.bench_function("dist_sq_d4_cone_cell", |b| b.iter(|| black_box(cell.dist_sq(black_box(&y)))));
}

fn bench_verification(c: &mut Criterion) {
    let d4 = catalog("Dn", Some(4)).unwrap();
    let f = forbidden_set(&d4).unwrap();
    let v = Verifier::new(&d4, &f);
    let candidate = IntMatrix::from_rows(&[
        vec![3, 0, 0, 1],
        vec![0, 3, 0, 1],
        vec![0, 0, 3, 1],
        vec![0, 0, 0, 7],
    ]);
    c.bench_function("check_i_d4", |b| b.iter(|| black_box(v.check_i(black_box(&candidate), 1))));
    c.bench_function("check_iii_d4", |b| {
        b.iter(|| black_box(v.check_iii(black_box(&candidate)).unwrap()))
    });
    c.bench_function("verify_d4", |b| {
        b.iter(|| black_box(v.verify(black_box(&candidate), None, VerifyMethod::Auto).unwrap()))
    });
}

fn bench_normal_form(c: &mut Criterion) {
    let m = IntMatrix::from_rows(&[
        vec![12, -7, 3, 5],
        vec![0, 9, -2, 11],
        vec![4, 4, 8, -6],
        vec![1, 0, -5, 10],
    ]);
    c.bench_function("hnf_modified_4x4", |b| {
        b.iter(|| black_box(hnf_modified(black_box(&m)).unwrap()))
    });
}

fn bench_forbidden_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("forbidden_set_d4", |b| {
        let d4 = catalog("Dn", Some(4)).unwrap();
        b.iter(|| black_box(forbidden_set(black_box(&d4)).unwrap()).len())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_enumeration,
    bench_cell_distance,
    bench_verification,
    bench_normal_form,
    bench_forbidden_pipeline
);
criterion_main!(benches);
