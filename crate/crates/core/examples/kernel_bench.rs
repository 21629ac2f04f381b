//! Rough throughput probe for the frontier kernels.
//!
//! Run with: cargo run --release --example kernel_bench

use lpp_lab::environment::{Environment, STREAM_BULK};
use lpp_lab::sweep::{boundary_frontiers, BoundaryData};
use std::time::Instant;

fn main() {
    let env = Environment::new(1);
    let bulk = env.stream(STREAM_BULK);

    for &(m, w, nm, labels) in &[
        (4000i64, 63i64, 1usize, false),
        (4000, 63, 1, true),
        (4000, 63, 4, false),
        (4000, 63, 4, true),
        (32000, 63, 4, false),
    ] {
        let x_max = (m + w) as usize;
        let bx: Vec<f64> = (0..=x_max).map(|z| z as f64 * 2.0).collect();
        let by = bx.clone();
        let models: Vec<BoundaryData> = (0..nm).map(|_| BoundaryData { bx: &bx, by: &by, lab_x: None, lab_y: None }).collect();
        let reps = if m > 10_000 { 1 } else { 5 };
        let mut dt = f64::INFINITY;
        let mut out = Vec::new();
        for _ in 0..reps {
            let t0 = Instant::now();
            out = boundary_frontiers(&bulk, &models, m, w, labels);
            dt = dt.min(t0.elapsed().as_secs_f64());
        }
        // cells ~ 2m^2 - (m-w)^2
        let cells = (2 * m * m - (m - w) * (m - w)) as f64;
        println!(
            "m={m} w={w} models={nm} labels={labels}: {:.3}s  {:.2} ns/cell  (checksum {:.3})",
            dt,
            dt * 1e9 / cells,
            out[0].values[w as usize]
        );
    }
}
