//! Tiles a random crack with ground-truth boxes, simulates a noisy detector
//! and prints the scene document.
//!
//! ```bash
//! cargo run --example synth_scene > scene.json
//! ```

use coveval::datasets::write_scene;
use coveval::fractal::{generate_curve, synthesize_annotations, NoiseModel, Point, TransformParams};

fn main() -> coveval::Result<()> {
    let params = TransformParams::random(1, (0.35, 0.65), (-0.25, 0.25))?;
    let curve = generate_curve(&params, 6, 42, Point::new(40.0, 200.0), Point::new(440.0, 200.0))?;
    let noise = NoiseModel {
        scale_jitter: 0.6,
        position_jitter: 0.1,
        duplication: 2,
        dropout: 0.2,
        false_alarms: 1.0,
        ..NoiseModel::default()
    };
    let scene = synthesize_annotations(&curve, "example", 32.0, 32.0, &noise, 42)?;
    eprintln!(
        "{} ground-truth boxes, {} detections, image {}x{}",
        scene.ground_truths.len(),
        scene.detections.len(),
        scene.width,
        scene.height
    );
    println!("{}", write_scene(&scene)?);
    Ok(())
}
