//! Sweep-level scaling of mean query counts in k, ε and n.

use kmismatch::harness::{bench_sweep, BenchRow, GridPoint};
use kmismatch::{BackendHandle, ExecMode, RngSeed};

const TRIALS: usize = 80;

fn rows(grid: &[GridPoint], seed: u64) -> Vec<BenchRow> {
    bench_sweep(
        grid,
        TRIALS,
        &BackendHandle::analytic(),
        RngSeed::new(seed),
        ExecMode::Parallel,
    )
    .unwrap()
}

fn point(n: usize, k: u64, epsilon: f64) -> GridPoint {
    GridPoint { n, m: 256, k, epsilon }
}

fn assert_ratio(rows: &[BenchRow], want: f64) {
    let ratio = rows[1].mean_queries / rows[0].mean_queries;
    assert!(
        (ratio / want - 1.0).abs() <= 0.35,
        "ratio {ratio:.3}, expected {want} ± 35%: {rows:?}"
    );
    for r in rows {
        assert!(r.success_rate >= 0.6, "{r:?}");
    }
}

#[test]
fn quadrupling_k_halves_queries() {
    assert_ratio(&rows(&[point(1024, 4, 1.0), point(1024, 16, 1.0)], 1), 0.5);
}

#[test]
fn halving_epsilon_doubles_queries() {
    assert_ratio(&rows(&[point(1024, 16, 1.0), point(1024, 16, 0.5)], 2), 2.0);
}

#[test]
fn quadrupling_n_doubles_queries() {
    assert_ratio(&rows(&[point(1024, 16, 1.0), point(4096, 16, 1.0)], 3), 2.0);
}
