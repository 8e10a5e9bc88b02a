//! Multi-matching over the cover area rate matrix next to greedy IoU
//! matching, for a crack marked with three boxes and detected with two.
//!
//! ```bash
//! cargo run --example multi_match
//! ```

use coveval::matching::{build_car_matrix, greedy_one_to_one_match, image_precision_map, multi_match};
use coveval::metrics::image_scores;
use coveval::{BBox, Detection, GroundTruth};

fn main() -> coveval::Result<()> {
    let gts = [(0.0, 40.0), (40.0, 80.0), (80.0, 120.0)]
        .into_iter()
        .map(|(x1, x2)| Ok(GroundTruth::new("img", "crack", BBox::new(x1, 0.0, x2, 40.0)?)))
        .collect::<coveval::Result<Vec<_>>>()?;
    // one long box over the first two marks, one small box inside the third
    let dets = vec![
        Detection::new("img", "crack", BBox::new(0.0, 0.0, 80.0, 40.0)?, 0.9)?,
        Detection::new("img", "crack", BBox::new(90.0, 10.0, 110.0, 30.0)?, 0.7)?,
    ];

    let matrix = build_car_matrix(&dets, &gts)?;
    println!("cover area rate (rows: detections, columns: ground truth)");
    for row in matrix.to_rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
        println!("  [{}]", cells.join(", "));
    }
    let result = multi_match(&matrix, 0.55)?;
    let (xp, xr) = image_scores(&result);
    println!("multi-match: {}/{} detections valid, {}/{} ground truths covered", result.k_p, result.m, result.k_r, result.n);
    println!("XP = {:.3}, XR = {:.3}", xp.unwrap_or(0.0), xr.unwrap_or(0.0));

    let one_to_one = greedy_one_to_one_match(&dets, &gts, 0.55)?;
    println!(
        "one-to-one IoU: {} pairs, image precision {:.3}",
        one_to_one.pairs.len(),
        image_precision_map(&one_to_one, gts.len()).unwrap_or(0.0)
    );
    Ok(())
}
