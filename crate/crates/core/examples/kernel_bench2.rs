//! Component-level probe: weight fill vs stencil.

use lpp_lab::environment::{Environment, STREAM_BULK};
use std::time::Instant;

fn main() {
    let env = Environment::new(1);
    let bulk = env.stream(STREAM_BULK);
    let width = 32064usize;
    let reps = 20_000usize;

    let mut wbuf = vec![0.0f64; width];
    let t0 = Instant::now();
    for d in 0..reps {
        bulk.fill_exp1_antidiag(d as i64 + 1_000_000, 1, &mut wbuf);
    }
    let dt = t0.elapsed().as_secs_f64();
    println!(
        "fill: {:.2} ns/cell (checksum {:.3})",
        dt * 1e9 / (width * reps) as f64,
        wbuf[17]
    );

    // chunked fill (4096) as used in the sweep
    let t0 = Instant::now();
    for d in 0..reps {
        for c in 0..(width / 4096) {
            bulk.fill_exp1_antidiag(d as i64 + 1_000_000, 1 + (c * 4096) as i64, &mut wbuf[..4096]);
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    println!(
        "fill chunked: {:.2} ns/cell (checksum {:.3})",
        dt * 1e9 / ((width / 4096) * 4096 * reps) as f64,
        wbuf[17]
    );
}
