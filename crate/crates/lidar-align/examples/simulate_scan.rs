//! Simulates one scan of the target board with a known misalignment and
//! writes it to a scan CSV.
//!
//! ```text
//! cargo run --example simulate_scan [out.csv]
//! ```

use lidar_align::{generate_scan, load_scan, save_scan, PoseVector, Scene, SensorModel};

fn main() -> lidar_align::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "scan.csv".into());

    let sensor = SensorModel::vlp16();
    let scene = Scene::default();
    // 1° yaw error and 10 mm of horizontal displacement.
    let truth = PoseVector::new(0.0, 1f64.to_radians(), 0.0, 0.010, 0.0, 0.0);
    let scan = generate_scan(&sensor, &scene, &truth, 42)?;

    println!("simulated {} beams (seed {})", scan.beams.len(), scan.seed);
    let mut per_ring = [0usize; 16];
    let mut board_hits = 0;
    for b in &scan.beams {
        per_ring[b.ring as usize] += 1;
        if b.reflectivity > 0.5 {
            board_hits += 1;
        }
    }
    println!("high-reflectivity (board) returns: {board_hits}");
    println!("returns per ring:");
    for (ring, count) in per_ring.iter().enumerate() {
        println!("  ring {ring:>2} ({:+3}°): {count}", -15 + 2 * ring as i32);
    }

    save_scan(&scan, &out)?;
    let reloaded = load_scan(&out)?;
    println!(
        "wrote {out} and read it back: {} beams, truth preserved: {}",
        reloaded.beams.len(),
        reloaded.truth.is_some()
    );
    Ok(())
}
