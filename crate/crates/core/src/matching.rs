//! Box matching for both evaluation standards.
//!
//! The covering standard builds a cover-area-rate matrix per image and class
//! and lets detections and ground truths match freely: a row is valid when
//! its best entry clears the threshold, a column is covered when its best
//! entry does. The classical path pairs detections with ground truths
//! one-to-one by IoU in confidence order and scores the image with the
//! rank-based precision `p(n) = n / m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{car, iou, BBox};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub image_id: String,
    pub class_id: String,
    #[serde(rename = "box")]
    pub bbox: BBox,
    pub confidence: f64,
}

impl Detection {
    pub fn new(
        image_id: impl Into<String>,
        class_id: impl Into<String>,
        bbox: BBox,
        confidence: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::config(format!("confidence {confidence} outside [0, 1]")));
        }
        Ok(Detection {
            image_id: image_id.into(),
            class_id: class_id.into(),
            bbox,
            confidence,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub image_id: String,
    pub class_id: String,
    #[serde(rename = "box")]
    pub bbox: BBox,
}

impl GroundTruth {
    pub fn new(image_id: impl Into<String>, class_id: impl Into<String>, bbox: BBox) -> Self {
        GroundTruth {
            image_id: image_id.into(),
            class_id: class_id.into(),
            bbox,
        }
    }
}

/// Stable sort by descending confidence; equal confidences keep input order.
pub fn sort_by_confidence(dets: &mut [Detection]) {
    dets.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
}

/// `m x n` cover-area-rate table, rows are detections and columns ground truths.
#[derive(Debug, Clone, PartialEq)]
pub struct CarMatrix {
    /// Indices into the detection slice the matrix was built from.
    pub rows: Vec<usize>,
    /// Indices into the ground-truth slice the matrix was built from.
    pub cols: Vec<usize>,
    values: Vec<f64>,
}

impl CarMatrix {
    /// Builds a matrix directly from row-major values. Entries must lie in `[0, 1]`.
    pub fn from_rows(rows: &[Vec<f64>], n_cols: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::config(format!(
                    "matrix row has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::config(format!("matrix entry {v} outside [0, 1]")));
            }
            values.extend_from_slice(row);
        }
        Ok(CarMatrix {
            rows: (0..rows.len()).collect(),
            cols: (0..n_cols).collect(),
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_cols();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|i| self.row(i).to_vec()).collect()
    }
}

fn check_group<'a>(
    mut ids: impl Iterator<Item = (&'a str, &'a str)>,
) -> Result<Option<(&'a str, &'a str)>> {
    let Some(first) = ids.next() else {
        return Ok(None);
    };
    for (image, class) in ids {
        if (image, class) != first {
            return Err(Error::MixedGroup {
                image_id: first.0.to_string(),
                class_id: first.1.to_string(),
                found_image: image.to_string(),
                found_class: class.to_string(),
            });
        }
    }
    Ok(Some(first))
}

fn group_ids<'a>(
    dets: &'a [Detection],
    gts: &'a [GroundTruth],
) -> impl Iterator<Item = (&'a str, &'a str)> {
    dets.iter()
        .map(|d| (d.image_id.as_str(), d.class_id.as_str()))
        .chain(gts.iter().map(|g| (g.image_id.as_str(), g.class_id.as_str())))
}

/// Cover-area-rate matrix for one image and class. Entry `(i, j)` is
/// `car(gts[j], dets[i])`; rows follow the order of `dets`.
pub fn build_car_matrix(dets: &[Detection], gts: &[GroundTruth]) -> Result<CarMatrix> {
    check_group(group_ids(dets, gts))?;
    let mut values = Vec::with_capacity(dets.len() * gts.len());
    for d in dets {
        values.extend(gts.iter().map(|g| car(&g.bbox, &d.bbox)));
    }
    Ok(CarMatrix {
        rows: (0..dets.len()).collect(),
        cols: (0..gts.len()).collect(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiMatchResult {
    /// Detections whose best cover rate clears the threshold.
    pub k_p: usize,
    /// Ground truths covered by at least one detection.
    pub k_r: usize,
    pub m: usize,
    pub n: usize,
    pub valid_rows: Vec<bool>,
    pub covered_cols: Vec<bool>,
}

pub(crate) fn check_threshold(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("{name} {value} outside (0, 1]")))
    }
}

/// Matches rows and columns without a one-to-one restriction: a detection
/// may cover several ground truths and a ground truth may be covered by
/// several detections. Comparisons use `>=`.
pub fn multi_match(matrix: &CarMatrix, car_threshold: f64) -> Result<MultiMatchResult> {
    check_threshold("overlap threshold", car_threshold)?;
    let (m, n) = (matrix.n_rows(), matrix.n_cols());
    let mut valid_rows = vec![false; m];
    let mut covered_cols = vec![false; n];
    for (i, valid) in valid_rows.iter_mut().enumerate() {
        for (j, covered) in covered_cols.iter_mut().enumerate() {
            if matrix.get(i, j) >= car_threshold {
                *valid = true;
                *covered = true;
            }
        }
    }
    Ok(MultiMatchResult {
        k_p: valid_rows.iter().filter(|v| **v).count(),
        k_r: covered_cols.iter().filter(|v| **v).count(),
        m,
        n,
        valid_rows,
        covered_cols,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    /// Zero-based position of the detection in the confidence-sorted list.
    pub det_rank: usize,
    pub gt_index: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OneToOneMatch {
    /// Pairs in detection rank order.
    pub pairs: Vec<MatchedPair>,
    pub unmatched_detections: Vec<usize>,
    pub unmatched_gts: Vec<usize>,
}

/// Greedy one-to-one IoU matching.
///
/// `dets` must already be in descending confidence order; the slice position
/// is the detection's rank. Each detection claims the still-free ground truth
/// with the highest IoU at or above the threshold, ties going to the lowest
/// ground-truth index.
pub fn greedy_one_to_one_match(
    dets: &[Detection],
    gts: &[GroundTruth],
    iou_threshold: f64,
) -> Result<OneToOneMatch> {
    check_threshold("overlap threshold", iou_threshold)?;
    check_group(group_ids(dets, gts))?;
    let mut taken = vec![false; gts.len()];
    let mut out = OneToOneMatch::default();
    for (rank, d) in dets.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (j, g) in gts.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let o = iou(&g.bbox, &d.bbox);
            if o >= iou_threshold && best.is_none_or(|(_, b)| o > b) {
                best = Some((j, o));
            }
        }
        match best {
            Some((j, o)) => {
                taken[j] = true;
                out.pairs.push(MatchedPair {
                    det_rank: rank,
                    gt_index: j,
                    iou: o,
                });
            }
            None => out.unmatched_detections.push(rank),
        }
    }
    out.unmatched_gts = taken
        .iter()
        .enumerate()
        .filter(|(_, t)| !**t)
        .map(|(j, _)| j)
        .collect();
    Ok(out)
}

/// Rank-based image precision.
///
/// The k-th detected ground truth (ordered by the rank of the detection that
/// found it) scores `k / m`, with `m` the detection's 1-based rank; missed
/// ground truths score 0. Returns the mean over `n_gts`, or `None` when the
/// image has no ground truth for the class.
pub fn image_precision_map(matched: &OneToOneMatch, n_gts: usize) -> Option<f64> {
    if n_gts == 0 {
        return None;
    }
    let mut ranks: Vec<usize> = matched.pairs.iter().map(|p| p.det_rank).collect();
    ranks.sort_unstable();
    let sum: f64 = ranks
        .iter()
        .enumerate()
        .fold(0.0, |acc, (k, &rank)| acc + (k + 1) as f64 / (rank + 1) as f64);
    Some(sum / n_gts as f64)
}
