//! Loads VOC annotations and per-class detection files from disk and scores
//! them under both standards.
//!
//! ```bash
//! cargo run --example evaluate_dataset
//! cargo run --example evaluate_dataset -- path/to/gt path/to/det
//! ```
//!
//! Without arguments a small two-class dataset is written to a temporary
//! directory first.

use std::fs;
use std::path::{Path, PathBuf};

use coveval::cli::render_table;
use coveval::datasets::{load_detections, load_ground_truth};
use coveval::{evaluate, EvalConfig, EvalSet};

const ANNOTATION: &str = r#"<annotation>
  <size><width>640</width><height>480</height></size>
  <object><name>crack</name><bndbox><xmin>0</xmin><ymin>200</ymin><xmax>100</xmax><ymax>260</ymax></bndbox></object>
  <object><name>crack</name><bndbox><xmin>100</xmin><ymin>210</ymin><xmax>200</xmax><ymax>270</ymax></bndbox></object>
  <object><name>spall</name><bndbox><xmin>400</xmin><ymin>50</ymin><xmax>480</xmax><ymax>130</ymax></bndbox></object>
</annotation>
"#;

fn sample(dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
    let (gt, det) = (dir.join("gt"), dir.join("det"));
    fs::create_dir_all(&gt)?;
    fs::create_dir_all(&det)?;
    fs::write(gt.join("img001.xml"), ANNOTATION)?;
    // one long box over both crack marks, a small one inside the first
    fs::write(det.join("crack.txt"), "img001 0.93 0 200 200 270\nimg001 0.61 20 215 50 245\n")?;
    fs::write(det.join("spall.txt"), "img001 0.88 405 55 475 125\n")?;
    Ok((gt, det))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let tmp = tempfile::tempdir()?;
    let (gt, det) = match &args[..] {
        [g, d] => (PathBuf::from(g), PathBuf::from(d)),
        _ => sample(tmp.path())?,
    };
    let truth = load_ground_truth(&gt)?;
    let detections = load_detections(&det, &truth.classes)?;
    let set = EvalSet {
        images: truth.images,
        classes: truth.classes,
        ground_truths: truth.ground_truths,
        detections,
    };
    let report = evaluate(&set, &EvalConfig::default(), 0)?;
    print!("{}", render_table(&report));
    Ok(())
}
