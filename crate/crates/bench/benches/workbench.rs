use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cylindra::games::{cone_script, solve_game, verify_script, GameConfig, GraphArena};
use cylindra::rablur::{basic_matrices, check_cylindric_basis, maddux_ek23};
use cylindra::rainbow::{build_bf, enumerate_atoms};
use cylindra::repsearch::{brute_force_represent, check_m_square, RepSearch, UnitKind};
use cylindra::{check_ca_axioms, check_tca_axioms, complex_algebra};
use cylindra_bench::{chain_algebra, small_subalgebra};

fn axioms(c: &mut Criterion) {
    let mut group = c.benchmark_group("axioms");
    let tca = chain_algebra(3);
    group.bench_function("tca_chain3", |b| b.iter(|| check_tca_axioms(black_box(&tca), 0).unwrap()));
    let bf = enumerate_atoms(&build_bf(3).unwrap()).unwrap();
    let a = complex_algebra(bf.structure);
    group.bench_function("ca_bf3", |b| b.iter(|| check_ca_axioms(black_box(&a)).unwrap()));
    group.finish();
}

fn rainbow(c: &mut Criterion) {
    let sig = build_bf(3).unwrap();
    let mut group = c.benchmark_group("rainbow");
    group.sample_size(10);
    group.bench_function("enumerate_bf3", |b| b.iter(|| enumerate_atoms(black_box(&sig)).unwrap()));
    let arena = GraphArena::new(&sig, 7).unwrap();
    group.bench_function("gmk_4_2", |b| b.iter(|| solve_game(&arena, &GameConfig::gmk(4, 2)).unwrap()));
    group.bench_function("cone_script_7", |b| {
        b.iter(|| verify_script(&arena, &cone_script(1..=5), &GameConfig::bold(7, 12)).unwrap())
    });
    group.finish();
}

fn bases(c: &mut Criterion) {
    let mut group = c.benchmark_group("bases");
    for k in [2, 3] {
        let r = maddux_ek23(k).unwrap();
        group.bench_function(format!("mat3_e{k}"), |b| {
            b.iter(|| {
                let m = basic_matrices(&r, 3).unwrap();
                check_cylindric_basis(&m, &r, 3).unwrap()
            })
        });
    }
    group.finish();
}

fn representations(c: &mut Criterion) {
    let mut group = c.benchmark_group("repsearch");
    let sub = small_subalgebra();
    let q = RepSearch::new(3, UnitKind::Square);
    group.bench_function("subalgebra", |b| b.iter(|| brute_force_represent(black_box(&sub), &q).unwrap()));
    let chain = chain_algebra(2);
    let qt = RepSearch::new(2, UnitKind::Square).topological();
    group.bench_function("chain2_topological", |b| b.iter(|| brute_force_represent(&chain, &qt).unwrap()));
    let rep = brute_force_represent(&sub, &q).unwrap().found.unwrap();
    group.bench_function("msquare_5", |b| b.iter(|| check_m_square(&sub, &rep, 5).unwrap()));
    group.finish();
}

criterion_group!(benches, axioms, rainbow, bases, representations);
criterion_main!(benches);
