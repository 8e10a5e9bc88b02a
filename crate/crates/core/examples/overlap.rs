//! IoU against cover area rate on the box pairs that break IoU matching.
//!
//! ```bash
//! cargo run --example overlap
//! ```

use coveval::geometry::{car, intersection_area, iou};
use coveval::BBox;

fn main() -> coveval::Result<()> {
    let gt = BBox::new(0.0, 0.0, 120.0, 40.0)?;
    let cases = [
        ("same box", BBox::new(0.0, 0.0, 120.0, 40.0)?),
        ("small part of the crack", BBox::new(10.0, 5.0, 40.0, 35.0)?),
        ("covers the crack and more", BBox::new(-40.0, -20.0, 160.0, 60.0)?),
        ("shifted right by half", BBox::new(60.0, 0.0, 180.0, 40.0)?),
        ("touching edge", BBox::new(120.0, 0.0, 160.0, 40.0)?),
    ];
    println!("{:<28} {:>10} {:>7} {:>7}", "detection", "overlap", "IoU", "CAr");
    for (name, det) in cases {
        println!(
            "{name:<28} {:>10.1} {:>7.3} {:>7.3}",
            intersection_area(&gt, &det),
            iou(&gt, &det),
            car(&gt, &det)
        );
    }
    Ok(())
}
