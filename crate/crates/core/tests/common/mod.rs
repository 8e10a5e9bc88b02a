#![allow(dead_code)]

use coveval::geometry::iou;
use coveval::{BBox, Detection, GroundTruth};
use proptest::prelude::*;

pub fn bx(x1: f64, y1: f64, x2: f64, y2: f64) -> BBox {
    BBox::new(x1, y1, x2, y2).unwrap()
}

/// Intersection from clamped spans, independent of the sort construction.
pub fn clamped_intersection(a: &BBox, b: &BBox) -> f64 {
    let w = (a.x2().min(b.x2()) - a.x1().max(b.x1())).max(0.0);
    let h = (a.y2().min(b.y2()) - a.y1().max(b.y1())).max(0.0);
    w * h
}

pub fn arb_box() -> impl Strategy<Value = BBox> {
    (-100.0..100.0f64, -100.0..100.0f64, 0.01..80.0f64, 0.01..80.0f64)
        .prop_map(|(x, y, w, h)| bx(x, y, x + w, y + h))
}

/// Small integer grid so touching, nested and identical boxes are common.
pub fn arb_grid_box() -> impl Strategy<Value = BBox> {
    (0i32..8, 0i32..8, 1i32..6, 1i32..6)
        .prop_map(|(x, y, w, h)| bx(x as f64, y as f64, (x + w) as f64, (y + h) as f64))
}

/// `(k_p, k_r)` by scanning every row and every column.
pub fn scan_multi_match(rows: &[Vec<f64>], n: usize, th: f64) -> (usize, usize) {
    let k_p = rows.iter().filter(|r| r.iter().any(|&v| v >= th)).count();
    let k_r = (0..n).filter(|&j| rows.iter().any(|r| r[j] >= th)).count();
    (k_p, k_r)
}

/// Enumerates every partial one-to-one assignment of detections (in rank
/// order) to ground truths and keeps those where each detection took the best
/// free ground truth available at its turn. Returns all survivors.
pub fn brute_greedy(dets: &[Detection], gts: &[GroundTruth], th: f64) -> Vec<Vec<Option<usize>>> {
    let o: Vec<Vec<f64>> = dets
        .iter()
        .map(|d| gts.iter().map(|g| iou(&g.bbox, &d.bbox)).collect())
        .collect();
    let mut all = Vec::new();
    let mut current = Vec::new();
    enumerate(dets.len(), gts.len(), &mut vec![false; gts.len()], &mut current, &mut all);
    all.into_iter()
        .filter(|assign| greedy_consistent(assign, &o, gts.len(), th))
        .collect()
}

fn enumerate(
    m: usize,
    n: usize,
    used: &mut Vec<bool>,
    current: &mut Vec<Option<usize>>,
    out: &mut Vec<Vec<Option<usize>>>,
) {
    if current.len() == m {
        out.push(current.clone());
        return;
    }
    current.push(None);
    enumerate(m, n, used, current, out);
    current.pop();
    for j in 0..n {
        if !used[j] {
            used[j] = true;
            current.push(Some(j));
            enumerate(m, n, used, current, out);
            current.pop();
            used[j] = false;
        }
    }
}

fn greedy_consistent(assign: &[Option<usize>], o: &[Vec<f64>], n: usize, th: f64) -> bool {
    let mut used = vec![false; n];
    for (i, choice) in assign.iter().enumerate() {
        let best = (0..n)
            .filter(|&j| !used[j] && o[i][j] >= th)
            .fold(None, |acc: Option<usize>, j| match acc {
                Some(b) if o[i][b] >= o[i][j] => Some(b),
                _ => Some(j),
            });
        if *choice != best {
            return false;
        }
        if let Some(j) = choice {
            used[*j] = true;
        }
    }
    true
}

pub fn dets_from(boxes: &[BBox]) -> Vec<Detection> {
    boxes
        .iter()
        .enumerate()
        .map(|(i, b)| Detection::new("img", "c", *b, 1.0 - i as f64 * 0.01).unwrap())
        .collect()
}

pub fn gts_from(boxes: &[BBox]) -> Vec<GroundTruth> {
    boxes.iter().map(|b| GroundTruth::new("img", "c", *b)).collect()
}

/// Sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
