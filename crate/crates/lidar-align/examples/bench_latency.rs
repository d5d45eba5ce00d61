//! Measures end-to-end pipeline latency (clustering through pose solve)
//! over repeated scans and prints the distribution.
//!
//! ```text
//! cargo run --release --example bench_latency [scans]
//! ```

use lidar_align::{run_bench, RunConfig};

fn main() -> lidar_align::Result<()> {
    let scans: usize =
        std::env::args().nth(1).map(|s| s.parse().expect("scan count")).unwrap_or(20);

    let report = run_bench(&RunConfig::default(), scans)?;

    println!("pipeline latency over {scans} scans:");
    println!("  median {:>8.2} ms", report.median_ms);
    println!("  mean   {:>8.2} ms", report.mean_ms);
    println!("  min    {:>8.2} ms", report.min_ms);
    println!("  p95    {:>8.2} ms", report.p95_ms);
    println!("  max    {:>8.2} ms", report.max_ms);

    // Coarse histogram of the distribution.
    let lo = report.min_ms;
    let width = ((report.max_ms - lo) / 8.0).max(0.01);
    let mut bins = [0usize; 8];
    for &l in &report.latencies_ms {
        let b = (((l - lo) / width) as usize).min(7);
        bins[b] += 1;
    }
    println!("\n  histogram (bin width {width:.2} ms):");
    for (i, count) in bins.iter().enumerate() {
        println!("  {:>6.2} ms | {}", lo + i as f64 * width, "#".repeat(*count));
    }
    Ok(())
}
