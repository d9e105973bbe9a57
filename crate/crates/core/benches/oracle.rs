//! Class-space search, sequential against rayon.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rlab_core::oracle::ClassSpace;
use rlab_core::par::Exec;
use rlab_core::sample::{random_element, Constraint};
use rlab_core::{make_field, FieldDesc};

fn strategies() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn class_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("class_coordinates");
    group.sample_size(20);
    for (label, desc) in [("F0", FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])), ("Q5(zeta5)", FieldDesc::cyclotomic(5, 1))] {
        let field = make_field(desc).unwrap();
        let units: Vec<_> = (0..8).map(|s| random_element(&field, Constraint::Unit, s)).collect();
        for (name, exec) in strategies() {
            let space = ClassSpace::with_exec(&field, exec).unwrap();
            group.bench_with_input(BenchmarkId::new(name, label), &units, |b, units| {
                b.iter(|| {
                    for u in units {
                        black_box(space.coordinates(u).unwrap());
                    }
                })
            });
        }
    }
    group.finish();
}

fn space_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("class_space_build");
    group.sample_size(10);
    let field = make_field(FieldDesc::cyclotomic(5, 1)).unwrap();
    for (name, exec) in strategies() {
        group.bench_function(name, |b| b.iter(|| black_box(ClassSpace::with_exec(&field, exec).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, class_search, space_build);
criterion_main!(benches);
