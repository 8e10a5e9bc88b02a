//! Sweeps the detector's box scale on synthetic cracks. The ranked IoU
//! standard collapses as soon as boxes stop matching the annotation size,
//! while the covering standard keeps crediting boxes that lie on the crack.
//!
//! ```bash
//! cargo run --release --example underestimation
//! ```

use coveval::fractal::{generate_curve, synthesize_annotations, NoiseModel, Point, TransformParams, CRACK_CLASS};
use coveval::metrics::format_percent;
use coveval::{evaluate, EvalConfig, EvalSet, ImageInfo};

fn main() -> coveval::Result<()> {
    let params = TransformParams::random(1, (0.35, 0.65), (-0.25, 0.25))?;
    let scenes = 20u64;
    println!("{:>6} {:>5} {:>7} {:>7} {:>7}", "scale", "dup", "mAP", "F(0.5)", "F(0.8)");
    for (scale, dup) in [(1.0, 1), (0.75, 1), (0.5, 1), (0.25, 1), (0.25, 2), (2.0, 1)] {
        let noise = NoiseModel {
            scale_jitter: scale,
            duplication: dup,
            ..NoiseModel::default()
        };
        let mut set = EvalSet {
            classes: vec![CRACK_CLASS.into()],
            ..EvalSet::default()
        };
        for seed in 0..scenes {
            let id = format!("scene_{seed}");
            let curve = generate_curve(&params, 8, seed, Point::new(64.0, 300.0), Point::new(544.0, 300.0))?;
            let scene = synthesize_annotations(&curve, &id, 32.0, 32.0, &noise, seed)?;
            set.images.push(ImageInfo {
                image_id: id,
                width: Some(scene.width),
                height: Some(scene.height),
            });
            set.ground_truths.extend(scene.ground_truths);
            set.detections.extend(scene.detections);
        }
        let r = evaluate(&set, &EvalConfig::default(), 0)?;
        println!(
            "{scale:>6} {dup:>5} {:>7} {:>7} {:>7}",
            format_percent(r.map),
            format_percent(r.mf_ext_at(0.5)),
            format_percent(r.mf_ext_at(0.8))
        );
    }
    Ok(())
}
