// Copyright 2026 The rio-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rio_core::par::{map_indices, Execution};
use rio_core::protocol::{verify, Sweep};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("exhaustive_n2", name), &exec, |bch, &e| {
            bch.iter(|| verify(Sweep::Exhaustive { n: 2, reps: 1 }, 7, e).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sampled_n3", name), &exec, |bch, &e| {
            bch.iter(|| {
                verify(
                    Sweep::Sampled {
                        n: 3,
                        trials: 32,
                        forced: true,
                    },
                    7,
                    e,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

fn bench_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("map_indices");
    let len = 1usize << 18;
    let data: Vec<f64> = (0..len).map(|i| i as f64).collect();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("pair_sum_2^18", name), &exec, |bch, &e| {
            bch.iter(|| {
                map_indices(len, e, |i| {
                    black_box(data[i] * 0.5 + data[i ^ 1] * 0.25 + data[i ^ (len >> 1)])
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_verify, bench_kernel);
criterion_main!(benches);
