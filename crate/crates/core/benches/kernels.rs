//! Data-parallel kernel benchmarks. The same benchmark names run under
//! both feature configurations, so the rayon path and the sequential
//! fallback can be compared directly:
//!
//!   cargo bench -p padiclf                         # parallel (default)
//!   cargo bench -p padiclf --no-default-features   # sequential
//!
//! The hot loops are the Mazur-Tate layer evaluations (parallel over the
//! residue classes), the Hecke coset operator (parallel over basis
//! columns), and the congruence-grid construction and gluing (parallel
//! over rows).

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use num_rational::BigRational;
use padiclf::distributions::{av_glue, CongruenceGrid, HhSeries};
use padiclf::modsym::{
    build_space, find_eigensymbol, p_stabilize, DirichletNebentypus, RootChoice,
};
use padiclf::padic::PadicScalar;
use padiclf::plfn::mazur_tate;
use padiclf::PrecisionProfile;
use std::hint::black_box;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn bench_mazur_tate(c: &mut Criterion) {
    let prof = PrecisionProfile::new(3, 30, 40).unwrap();
    let space = build_space(1, 12, DirichletNebentypus::Trivial).unwrap();
    let mut plus = find_eigensymbol(&space, &[(2, rat(-24))], 1).unwrap();
    let mut minus = find_eigensymbol(&space, &[(2, rat(-24))], -1).unwrap();
    plus.eigenvalues.insert(3, rat(252));
    minus.eigenvalues.insert(3, rat(252));
    let form = p_stabilize(&plus, &minus, &space, 3, RootChoice::SmallSlope, &prof).unwrap();
    let mut g = c.benchmark_group("mazur_tate");
    g.sample_size(10);
    g.bench_function("weight12_layer3", |b| {
        b.iter(|| black_box(mazur_tate(&form, &space, 3)));
    });
    g.finish();
}

fn bench_hecke(c: &mut Criterion) {
    let space = build_space(15, 2, DirichletNebentypus::Trivial).unwrap();
    let mut g = c.benchmark_group("hecke");
    g.sample_size(10);
    g.bench_function("t13_level15", |b| {
        b.iter(|| black_box(space.hecke_matrix(13)));
    });
    g.finish();
}

fn bench_glue(c: &mut Criterion) {
    let prof = PrecisionProfile::new(3, 30, 60).unwrap();
    // deterministic order-2 series and its reduction grid
    let coeffs: Vec<PadicScalar> = (0..=26)
        .map(|i| {
            let scale = -2 * padiclf::distributions::ell(i, 3) as i64;
            PadicScalar::from_u64((i as u64 * 7 + 1) % 81 + 1, &prof).mul_p_power(scale)
        })
        .collect();
    let f = HhSeries::new(coeffs, 2, &prof);
    let grid = CongruenceGrid::from_reductions(&f, 1, 3, 2, &prof).unwrap();
    let mut g = c.benchmark_group("amice_velu");
    g.sample_size(10);
    g.bench_function("grid_reduce_p3_h2", |b| {
        b.iter(|| black_box(CongruenceGrid::from_reductions(&f, 1, 3, 2, &prof).unwrap()));
    });
    g.bench_function("glue_p3_h2", |b| {
        b.iter(|| black_box(av_glue(&grid, 2, &prof).unwrap()));
    });
    g.finish();
}

criterion_group!(benches, bench_mazur_tate, bench_hecke, bench_glue);
criterion_main!(benches);
